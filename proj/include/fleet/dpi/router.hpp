#pragma once

#include <compare>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fleet/dpi/rules.hpp"
#include "fleet/net/addr.hpp"
#include "fleet/net/clock.hpp"
#include "fleet/net/packet.hpp"

namespace fleet::dpi {

using net::Ipv4Addr;
using net::SimTime;

enum class Side { lan, cloud };

// 5-tuple in canonical orientation: the sender of the first packet seen is
// the initiator and sits in the src fields.
struct FlowKey {
    Ipv4Addr src_ip;
    Ipv4Addr dst_ip;
    std::uint16_t src_port = 0;
    std::uint16_t dst_port = 0;
    std::uint8_t proto = 0;

    static FlowKey of(const net::Packet& packet);
    FlowKey reversed() const { return {dst_ip, src_ip, dst_port, src_port, proto}; }
    // `tcp 10.0.2.100:40000 > 198.51.100.20:3478`
    std::string to_string() const;

    auto operator<=>(const FlowKey&) const = default;
};

enum class ClassState { pending, classified, unknown };

inline constexpr std::string_view kPendingLabel = "pending";
inline constexpr std::string_view kUnknownLabel = "unknown";

// Per-flow shaper. Release times never decrease, so delayed packets keep
// their order.
struct TokenBucket {
    double tokens = 0;
    SimTime last = 0;

    // Takes `size` bytes; returns the time they may leave (>= now).
    SimTime admit(double size, SimTime now, double rate_bps, double burst);
};

struct Flow {
    FlowKey key;
    Ipv4Addr subscriber;  // LAN-side address
    SimTime first_seen = 0;
    SimTime last_seen = 0;

    std::uint64_t pkts_up = 0;
    std::uint64_t pkts_down = 0;
    std::uint64_t bytes_up = 0;  // presented, drops included
    std::uint64_t bytes_down = 0;

    std::uint64_t forwarded_pkts = 0;
    std::uint64_t forwarded_bytes = 0;  // delayed packets count at decision time
    std::uint64_t forwarded_bytes_after_classification = 0;
    std::uint64_t dropped_pkts = 0;
    std::uint64_t delayed_pkts = 0;

    ClassState state = ClassState::pending;
    std::uint32_t inspected = 0;
    std::string app;  // set once classified
    Action verdict;
    std::optional<TokenBucket> bucket;
    SimTime last_release = 0;

    // App name, "unknown" or "pending".
    std::string label() const;
    std::uint64_t bytes() const { return bytes_up + bytes_down; }
    std::uint64_t packets() const { return pkts_up + pkts_down; }
};

struct AnomalyConfig {
    SimTime window_ms = 60'000;
    std::uint64_t heavy_bytes = 10'000'000;
    std::uint64_t max_new_flows = 100;

    // Throws ConfigError for a non-positive window.
    void validate() const;
    bool operator==(const AnomalyConfig&) const = default;
};

// Running sum over (now - width, now].
class TrailingWindow {
public:
    void add(SimTime at, std::uint64_t amount);
    std::uint64_t total(SimTime now, SimTime width);

private:
    std::deque<std::pair<SimTime, std::uint64_t>> entries_;
    std::uint64_t sum_ = 0;
};

struct AppCounters {
    std::uint64_t bytes = 0;
    std::uint64_t packets = 0;
    std::uint64_t flows = 0;

    bool operator==(const AppCounters&) const = default;
};

struct SubscriberStats {
    Ipv4Addr ip;
    // Keyed by flow label; a flow's totals move from "pending" at classification.
    std::map<std::string, AppCounters> apps;
    std::uint64_t prioritized_packets = 0;
    bool heavy_user = false;
    bool signaling_overload = false;

    TrailingWindow recent_bytes;
    TrailingWindow recent_flows;

    AppCounters totals() const;
};

struct Decision {
    enum class Kind { forward, drop, delay };
    Kind kind = Kind::forward;
    SimTime until = 0;  // delay only

    static Decision forward() { return {}; }
    static Decision drop() { return {Kind::drop, 0}; }
    static Decision delay(SimTime until) { return {Kind::delay, until}; }
    bool operator==(const Decision&) const = default;
};

struct RouterConfig {
    std::uint32_t max_inspect = 8;
    AnomalyConfig anomaly;
};

struct RouterCounters {
    std::uint64_t presented = 0;
    std::uint64_t forwarded = 0;
    std::uint64_t delayed = 0;
    std::uint64_t dropped = 0;
    std::uint64_t ttl_expired = 0;
};

class Router {
public:
    Router(std::vector<SignatureRule> rules, PolicyTable policies, RouterConfig config = {});

    // Decrements ttl, accounts the packet to its flow and subscriber,
    // classifies while the flow is pending and applies the flow's verdict.
    // Prioritized packets leave with the expedited TOS mark.
    Decision route(Side ingress, net::Packet& packet, SimTime now);

    // Re-evaluates the trailing windows at `now`; flags stay set once raised.
    void scan_anomalies(SimTime now);

    const std::map<FlowKey, Flow>& flows() const { return flows_; }
    const Flow* find_flow(const FlowKey& key) const;
    const std::map<Ipv4Addr, SubscriberStats>& subscribers() const { return subscribers_; }
    const RouterCounters& counters() const { return counters_; }
    const std::vector<SignatureRule>& rules() const { return rules_; }
    const PolicyTable& policies() const { return policies_; }
    const RouterConfig& config() const { return config_; }

private:
    Flow& flow_for(Side ingress, const net::Packet& packet, SimTime now);
    void classify(Flow& flow, const net::Packet& packet, SubscriberStats& stats);
    void set_verdict(Flow& flow, const Action& action);
    void check_flags(SubscriberStats& stats, SimTime now);

    std::vector<SignatureRule> rules_;
    PolicyTable policies_;
    RouterConfig config_;
    std::map<FlowKey, Flow> flows_;
    std::map<Ipv4Addr, SubscriberStats> subscribers_;
    RouterCounters counters_;
};

}  // namespace fleet::dpi
