#pragma once

#include <functional>
#include <map>

#include "fleet/dpi/router.hpp"
#include "fleet/net/fabric.hpp"

namespace fleet::dpi {

// Places a Router between the LAN bridge and the uplink. LAN frames addressed
// to the gateway MAC are routed out end `a` of the link; cloud packets are
// delivered to the MAC the directory holds for their destination.
class Gateway {
public:
    Gateway(net::SimClock& clock, net::Fabric& lan, net::PointLink& uplink, const net::MacDirectory& directory,
            Router& router, net::MacAddr mac, Ipv4Addr ip);

    Gateway(const Gateway&) = delete;
    Gateway& operator=(const Gateway&) = delete;

    net::MacAddr mac() const { return mac_; }
    Ipv4Addr ip() const { return ip_; }
    net::PortId port() const { return port_; }

    // Frames the gateway saw but could not route (bad payload, no directory
    // entry for the LAN destination, or addressed to the gateway itself).
    std::uint64_t unroutable() const { return unroutable_; }

private:
    void from_lan(const net::Frame& frame);
    void from_cloud(const net::Frame& frame);
    void emit(Side ingress, net::Packet packet);
    void release(Side ingress, const net::Packet& packet);

    net::SimClock& clock_;
    net::Fabric& lan_;
    net::PointLink& uplink_;
    const net::MacDirectory& directory_;
    Router& router_;
    net::MacAddr mac_;
    Ipv4Addr ip_;
    net::PortId port_;
    std::uint64_t unroutable_ = 0;
};

// Far end of the uplink standing in for every cloud host. Models inject their
// server-side packets here; packets the router lets through are tallied per
// flow.
class CloudEdge {
public:
    using Observer = std::function<void(net::SimTime, const net::Packet&)>;

    CloudEdge(net::SimClock& clock, net::PointLink& uplink, net::MacAddr gateway_mac);

    void inject(const net::Packet& packet);
    void set_observer(Observer observer) { observer_ = std::move(observer); }

    std::uint64_t packets_received() const { return packets_; }
    std::uint64_t bytes_received() const { return bytes_; }
    // Delivered IPv4 bytes keyed by the packet's own orientation.
    const std::map<FlowKey, std::uint64_t>& delivered() const { return delivered_; }

    static net::MacAddr mac();

private:
    net::SimClock& clock_;
    net::PointLink& uplink_;
    net::MacAddr gateway_mac_;
    Observer observer_;
    std::uint64_t packets_ = 0;
    std::uint64_t bytes_ = 0;
    std::map<FlowKey, std::uint64_t> delivered_;
};

}  // namespace fleet::dpi
