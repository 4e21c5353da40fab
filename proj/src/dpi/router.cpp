#include "fleet/dpi/router.hpp"

#include <algorithm>
#include <cmath>

#include "fleet/error.hpp"

namespace fleet::dpi {

FlowKey FlowKey::of(const net::Packet& packet)
{
    return {packet.ip.src, packet.ip.dst, packet.src_port(), packet.dst_port(), packet.ip.proto};
}

std::string FlowKey::to_string() const
{
    return std::string(proto == net::kProtoTcp ? "tcp " : proto == net::kProtoUdp ? "udp " : "ip ") +
           src_ip.to_string() + ":" + std::to_string(src_port) + " > " + dst_ip.to_string() + ":" +
           std::to_string(dst_port);
}

SimTime TokenBucket::admit(double size, SimTime now, double rate_bps, double burst)
{
    SimTime t = std::max(now, last);
    tokens = std::min(burst, tokens + rate_bps * static_cast<double>(t - last) / 1000.0);
    last = t;
    if (tokens < size) {
        const auto wait = static_cast<SimTime>(std::ceil((size - tokens) * 1000.0 / rate_bps));
        tokens = std::min(burst, tokens + rate_bps * static_cast<double>(wait) / 1000.0);
        t += wait;
        last = t;
    }
    tokens -= size;
    return t;
}

std::string Flow::label() const
{
    switch (state) {
    case ClassState::pending: return std::string(kPendingLabel);
    case ClassState::unknown: return std::string(kUnknownLabel);
    case ClassState::classified: return app;
    }
    return std::string(kPendingLabel);
}

void AnomalyConfig::validate() const
{
    if (window_ms <= 0) throw ConfigError("anomaly.window_ms", "must be positive");
}

void TrailingWindow::add(SimTime at, std::uint64_t amount)
{
    if (!entries_.empty() && entries_.back().first == at)
        entries_.back().second += amount;
    else
        entries_.emplace_back(at, amount);
    sum_ += amount;
}

std::uint64_t TrailingWindow::total(SimTime now, SimTime width)
{
    while (!entries_.empty() && entries_.front().first <= now - width) {
        sum_ -= entries_.front().second;
        entries_.pop_front();
    }
    return sum_;
}

AppCounters SubscriberStats::totals() const
{
    AppCounters sum;
    for (const auto& [label, c] : apps) {
        sum.bytes += c.bytes;
        sum.packets += c.packets;
        sum.flows += c.flows;
    }
    return sum;
}

Router::Router(std::vector<SignatureRule> rules, PolicyTable policies, RouterConfig config)
    : rules_(std::move(rules)), policies_(std::move(policies)), config_(config)
{
    if (config_.max_inspect == 0) throw ConfigError("max_inspect", "must be at least 1");
    config_.anomaly.validate();
}

const Flow* Router::find_flow(const FlowKey& key) const
{
    if (auto it = flows_.find(key); it != flows_.end()) return &it->second;
    if (auto it = flows_.find(key.reversed()); it != flows_.end()) return &it->second;
    return nullptr;
}

Flow& Router::flow_for(Side ingress, const net::Packet& packet, SimTime now)
{
    const auto key = FlowKey::of(packet);
    if (auto it = flows_.find(key); it != flows_.end()) return it->second;
    if (auto it = flows_.find(key.reversed()); it != flows_.end()) return it->second;

    Flow flow;
    flow.key = key;
    flow.subscriber = ingress == Side::lan ? packet.ip.src : packet.ip.dst;
    flow.first_seen = now;
    set_verdict(flow, policies_.fallback());

    auto& stats = subscribers_[flow.subscriber];
    stats.ip = flow.subscriber;
    stats.apps[std::string(kPendingLabel)].flows += 1;
    stats.recent_flows.add(now, 1);
    return flows_.emplace(key, std::move(flow)).first->second;
}

void Router::set_verdict(Flow& flow, const Action& action)
{
    flow.verdict = action;
    if (action.kind == ActionKind::throttle) {
        if (!flow.bucket) flow.bucket = TokenBucket{action.burst, flow.last_seen};
    } else {
        flow.bucket.reset();
    }
}

void Router::classify(Flow& flow, const net::Packet& packet, SubscriberStats& stats)
{
    ++flow.inspected;
    if (auto app = first_match(rules_, packet)) {
        flow.state = ClassState::classified;
        flow.app = std::move(*app);
    } else if (flow.inspected >= config_.max_inspect) {
        flow.state = ClassState::unknown;
    } else {
        return;
    }

    auto& pending = stats.apps[std::string(kPendingLabel)];
    auto& target = stats.apps[flow.label()];
    pending.bytes -= flow.bytes();
    pending.packets -= flow.packets();
    pending.flows -= 1;
    target.bytes += flow.bytes();
    target.packets += flow.packets();
    target.flows += 1;
    if (pending == AppCounters{}) stats.apps.erase(std::string(kPendingLabel));

    set_verdict(flow, policies_.action_for(flow.label()));
}

Decision Router::route(Side ingress, net::Packet& packet, SimTime now)
{
    ++counters_.presented;
    if (packet.ip.ttl <= 1) {
        ++counters_.ttl_expired;
        ++counters_.dropped;
        return Decision::drop();
    }
    packet.ip.ttl -= 1;

    Flow& flow = flow_for(ingress, packet, now);
    auto& stats = subscribers_[flow.subscriber];
    const std::uint64_t size = packet.ip.total_length ? packet.ip.total_length : packet.wire_size();

    flow.last_seen = now;
    if (ingress == Side::lan) {
        ++flow.pkts_up;
        flow.bytes_up += size;
    } else {
        ++flow.pkts_down;
        flow.bytes_down += size;
    }
    auto& counters = stats.apps[flow.label()];
    counters.bytes += size;
    counters.packets += 1;
    stats.recent_bytes.add(now, size);

    if (flow.state == ClassState::pending) classify(flow, packet, stats);
    check_flags(stats, now);

    SimTime release = now;
    switch (flow.verdict.kind) {
    case ActionKind::allow:
        break;
    case ActionKind::prioritize:
        packet.ip.tos = net::kTosExpedited;
        ++stats.prioritized_packets;
        break;
    case ActionKind::block:
        ++flow.dropped_pkts;
        ++counters_.dropped;
        return Decision::drop();
    case ActionKind::throttle:
        release = flow.bucket->admit(static_cast<double>(size), now, flow.verdict.rate_bps, flow.verdict.burst);
        break;
    }
    // Never overtake packets still held back by an earlier throttle.
    release = std::max(release, flow.last_release);
    flow.last_release = release;
    const Decision decision = release > now ? Decision::delay(release) : Decision::forward();

    if (decision.kind == Decision::Kind::delay) {
        ++flow.delayed_pkts;
        ++counters_.delayed;
    } else {
        ++counters_.forwarded;
    }
    ++flow.forwarded_pkts;
    flow.forwarded_bytes += size;
    if (flow.state != ClassState::pending) flow.forwarded_bytes_after_classification += size;
    return decision;
}

void Router::check_flags(SubscriberStats& stats, SimTime now)
{
    const auto& a = config_.anomaly;
    if (stats.recent_bytes.total(now, a.window_ms) > a.heavy_bytes) stats.heavy_user = true;
    if (stats.recent_flows.total(now, a.window_ms) > a.max_new_flows) stats.signaling_overload = true;
}

void Router::scan_anomalies(SimTime now)
{
    for (auto& [ip, stats] : subscribers_) check_flags(stats, now);
}

}  // namespace fleet::dpi
