#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fleet/dhcp/lease.hpp"
#include "fleet/dhcp/message.hpp"
#include "fleet/net/clock.hpp"
#include "fleet/net/frame.hpp"

namespace fleet::dhcp {

// The address range handed out by the server, as in /etc/dhcpd.conf.
struct AddressPool {
    Ipv4Addr first{{10, 0, 2, 100}};
    Ipv4Addr last{{10, 0, 2, 199}};
    Ipv4Addr subnet_mask{{255, 255, 255, 0}};
    Ipv4Addr router{{10, 0, 2, 1}};
    std::uint32_t lease_seconds = 86400;

    // Throws ConfigError naming the offending field.
    void validate() const;

    bool contains(Ipv4Addr ip) const;
    std::size_t size() const;
};

struct ServerEvent {
    enum class Kind { pool_exhausted, nak, lease_granted, lease_expired };
    Kind kind;
    net::SimTime time;
    MacAddr mac;
    Ipv4Addr ip;
};

class DhcpServer {
public:
    // Offers reserve their address for offer_hold_ms so concurrent DISCOVERs
    // from distinct clients get distinct addresses.
    DhcpServer(AddressPool pool, Ipv4Addr server_ip, std::optional<std::filesystem::path> leases_path = {},
               net::SimTime offer_hold_ms = 10'000);

    // Answers DISCOVER with OFFER and REQUEST with ACK/NAK; everything else,
    // and a DISCOVER against an exhausted pool, yields no reply.
    std::optional<DhcpMessage> handle_message(const DhcpMessage& msg, net::SimTime now);

    // Moves every active lease with ends_ms <= now to expired.
    std::vector<Lease> expire_leases(net::SimTime now);

    const AddressPool& pool() const { return pool_; }
    Ipv4Addr server_ip() const { return server_ip_; }
    const std::vector<Lease>& leases() const { return leases_; }
    std::vector<Lease> active_leases() const;
    const std::vector<ServerEvent>& events() const { return events_; }

private:
    struct Offer {
        Ipv4Addr ip;
        net::SimTime expires;
    };

    std::optional<Ipv4Addr> choose_address(const MacAddr& mac, net::SimTime now) const;
    bool available_for(Ipv4Addr ip, const MacAddr& mac, net::SimTime now) const;
    const Lease* active_lease_of(const MacAddr& mac) const;
    DhcpMessage reply(const DhcpMessage& request, MessageType type, Ipv4Addr yiaddr) const;
    std::optional<DhcpMessage> on_discover(const DhcpMessage& msg, net::SimTime now);
    std::optional<DhcpMessage> on_request(const DhcpMessage& msg, net::SimTime now);
    void persist() const;

    AddressPool pool_;
    Ipv4Addr server_ip_;
    std::optional<std::filesystem::path> leases_path_;
    net::SimTime offer_hold_ms_;
    std::vector<Lease> leases_;
    std::map<MacAddr, Offer> offers_;
    std::vector<ServerEvent> events_;
};

// Wraps a server reply for the wire: unicast to chaddr at the ethernet layer,
// addressed to yiaddr (broadcast for a NAK) on UDP 67 -> 68.
net::Frame reply_frame(const DhcpMessage& reply, Ipv4Addr server_ip, MacAddr server_mac);

}  // namespace fleet::dhcp
