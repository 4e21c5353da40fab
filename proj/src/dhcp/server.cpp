#include "fleet/dhcp/server.hpp"

#include <algorithm>

#include "fleet/error.hpp"

namespace fleet::dhcp {

void AddressPool::validate() const
{
    if (first.to_u32() > last.to_u32()) throw ConfigError("pool.first", "must not exceed pool.last");
    if (router.to_u32() >= first.to_u32() && router.to_u32() <= last.to_u32()) {
        throw ConfigError("pool.router", "must lie outside [first, last]");
    }
    const auto mask = subnet_mask.to_u32();
    if ((~mask & (~mask + 1)) != 0) throw ConfigError("pool.mask", "not a contiguous netmask");
    if ((first.to_u32() & mask) != (last.to_u32() & mask) || (router.to_u32() & mask) != (first.to_u32() & mask)) {
        throw ConfigError("pool.mask", "pool and router must share one subnet");
    }
    if (lease_seconds == 0) throw ConfigError("pool.lease_seconds", "must be positive");
}

bool AddressPool::contains(Ipv4Addr ip) const
{
    return ip.to_u32() >= first.to_u32() && ip.to_u32() <= last.to_u32();
}

std::size_t AddressPool::size() const
{
    return first.to_u32() > last.to_u32() ? 0 : std::size_t{last.to_u32() - first.to_u32()} + 1;
}

DhcpServer::DhcpServer(AddressPool pool, Ipv4Addr server_ip, std::optional<std::filesystem::path> leases_path,
                       net::SimTime offer_hold_ms)
    : pool_(pool), server_ip_(server_ip), leases_path_(std::move(leases_path)), offer_hold_ms_(offer_hold_ms)
{
    pool_.validate();
    persist();
}

std::vector<Lease> DhcpServer::active_leases() const
{
    std::vector<Lease> out;
    std::copy_if(leases_.begin(), leases_.end(), std::back_inserter(out),
                 [](const Lease& l) { return l.state == BindingState::active; });
    return out;
}

const Lease* DhcpServer::active_lease_of(const MacAddr& mac) const
{
    for (const auto& lease : leases_) {
        if (lease.state == BindingState::active && lease.mac == mac) return &lease;
    }
    return nullptr;
}

bool DhcpServer::available_for(Ipv4Addr ip, const MacAddr& mac, net::SimTime now) const
{
    if (!pool_.contains(ip)) return false;
    for (const auto& lease : leases_) {
        if (lease.state == BindingState::active && lease.ip == ip && lease.mac != mac) return false;
    }
    for (const auto& [owner, offer] : offers_) {
        if (owner != mac && offer.ip == ip && offer.expires > now) return false;
    }
    return true;
}

std::optional<Ipv4Addr> DhcpServer::choose_address(const MacAddr& mac, net::SimTime now) const
{
    if (const auto* bound = active_lease_of(mac)) return bound->ip;
    if (auto it = offers_.find(mac); it != offers_.end() && it->second.expires > now &&
                                      available_for(it->second.ip, mac, now)) {
        return it->second.ip;
    }
    // Affinity: the most recent binding this client held.
    for (auto it = leases_.rbegin(); it != leases_.rend(); ++it) {
        if (it->mac == mac && available_for(it->ip, mac, now)) return it->ip;
    }
    for (std::uint32_t v = pool_.first.to_u32();; ++v) {
        const auto ip = Ipv4Addr::from_u32(v);
        if (available_for(ip, mac, now)) return ip;
        if (v == pool_.last.to_u32()) break;
    }
    return std::nullopt;
}

DhcpMessage DhcpServer::reply(const DhcpMessage& request, MessageType type, Ipv4Addr yiaddr) const
{
    DhcpMessage msg;
    msg.op = kOpReply;
    msg.xid = request.xid;
    msg.yiaddr = yiaddr;
    msg.siaddr = server_ip_;
    msg.chaddr = request.chaddr;
    msg.add(option::message_type, Bytes{static_cast<std::uint8_t>(type)});
    msg.add_ip(option::server_id, server_ip_);
    if (type != MessageType::nak) {
        msg.add_u32(option::lease_seconds, pool_.lease_seconds);
        msg.add_ip(option::subnet_mask, pool_.subnet_mask);
        msg.add_ip(option::router, pool_.router);
    }
    return msg;
}

std::optional<DhcpMessage> DhcpServer::on_discover(const DhcpMessage& msg, net::SimTime now)
{
    const auto ip = choose_address(msg.chaddr, now);
    if (!ip) {
        events_.push_back({ServerEvent::Kind::pool_exhausted, now, msg.chaddr, {}});
        return std::nullopt;
    }
    offers_[msg.chaddr] = Offer{*ip, now + offer_hold_ms_};
    return reply(msg, MessageType::offer, *ip);
}

std::optional<DhcpMessage> DhcpServer::on_request(const DhcpMessage& msg, net::SimTime now)
{
    if (auto sid = msg.ip_option(option::server_id); sid && *sid != server_ip_) {
        // The client picked another server.
        offers_.erase(msg.chaddr);
        return std::nullopt;
    }
    std::optional<Ipv4Addr> wanted = msg.ip_option(option::requested_ip);
    if (!wanted && msg.ciaddr != Ipv4Addr::any()) wanted = msg.ciaddr;

    if (!wanted || !available_for(*wanted, msg.chaddr, now)) {
        events_.push_back({ServerEvent::Kind::nak, now, msg.chaddr, wanted.value_or(Ipv4Addr::any())});
        return reply(msg, MessageType::nak, Ipv4Addr::any());
    }

    const auto ip = *wanted;
    const net::SimTime ends = now + net::SimTime{pool_.lease_seconds} * 1000;
    auto same = std::find_if(leases_.begin(), leases_.end(), [&](const Lease& l) {
        return l.state == BindingState::active && l.ip == ip && l.mac == msg.chaddr;
    });
    if (same != leases_.end()) {
        same->starts_ms = now;
        same->ends_ms = ends;
    } else {
        for (auto& lease : leases_) {
            if (lease.state == BindingState::active && lease.mac == msg.chaddr) lease.state = BindingState::expired;
        }
        std::erase_if(leases_, [&](const Lease& l) { return l.ip == ip; });
        leases_.push_back(Lease{ip, msg.chaddr, now, ends, BindingState::active});
    }
    offers_.erase(msg.chaddr);
    events_.push_back({ServerEvent::Kind::lease_granted, now, msg.chaddr, ip});
    persist();
    return reply(msg, MessageType::ack, ip);
}

std::optional<DhcpMessage> DhcpServer::handle_message(const DhcpMessage& msg, net::SimTime now)
{
    if (msg.op != kOpRequest) return std::nullopt;
    const auto type = msg.type();
    if (!type) return std::nullopt;
    expire_leases(now);
    std::erase_if(offers_, [now](const auto& entry) { return entry.second.expires <= now; });

    switch (*type) {
    case MessageType::discover:
        return on_discover(msg, now);
    case MessageType::request:
        return on_request(msg, now);
    default:
        return std::nullopt;
    }
}

std::vector<Lease> DhcpServer::expire_leases(net::SimTime now)
{
    std::vector<Lease> expired;
    for (auto& lease : leases_) {
        if (lease.state == BindingState::active && lease.ends_ms <= now) {
            lease.state = BindingState::expired;
            expired.push_back(lease);
            events_.push_back({ServerEvent::Kind::lease_expired, now, lease.mac, lease.ip});
        }
    }
    if (!expired.empty()) persist();
    return expired;
}

void DhcpServer::persist() const
{
    if (leases_path_) write_leases(leases_, *leases_path_);
}

net::Frame reply_frame(const DhcpMessage& reply, Ipv4Addr server_ip, MacAddr server_mac)
{
    const auto dst = reply.yiaddr == Ipv4Addr::any() ? Ipv4Addr::broadcast() : reply.yiaddr;
    const auto packet = net::make_udp(server_ip, kServerPort, dst, kClientPort, encode_dhcp(reply));
    return net::make_ipv4_frame(server_mac, reply.chaddr, packet);
}

}  // namespace fleet::dhcp
