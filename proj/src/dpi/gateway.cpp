#include "fleet/dpi/gateway.hpp"

#include "fleet/error.hpp"

namespace fleet::dpi {

namespace {

std::optional<net::Packet> ipv4_payload(const net::Frame& frame)
{
    if (frame.ethertype != net::kEtherTypeIpv4) return std::nullopt;
    try {
        return net::decode_packet(frame.payload);
    } catch (const Error&) {
        return std::nullopt;
    }
}

}  // namespace

Gateway::Gateway(net::SimClock& clock, net::Fabric& lan, net::PointLink& uplink, const net::MacDirectory& directory,
                 Router& router, net::MacAddr mac, Ipv4Addr ip)
    : clock_(clock), lan_(lan), uplink_(uplink), directory_(directory), router_(router), mac_(mac), ip_(ip)
{
    port_ = lan_.attach(mac_, [this](const net::Frame& frame) { from_lan(frame); });
    uplink_.bind(net::PointLink::End::a, [this](const net::Frame& frame) { from_cloud(frame); });
}

void Gateway::from_lan(const net::Frame& frame)
{
    // Floods (DHCP broadcasts, unknown unicast) reach every port; only frames
    // for the gateway are routed.
    if (frame.dst != mac_) return;
    auto packet = ipv4_payload(frame);
    if (!packet || packet->ip.dst == ip_) {
        ++unroutable_;
        return;
    }
    emit(Side::lan, std::move(*packet));
}

void Gateway::from_cloud(const net::Frame& frame)
{
    auto packet = ipv4_payload(frame);
    if (!packet) {
        ++unroutable_;
        return;
    }
    emit(Side::cloud, std::move(*packet));
}

void Gateway::emit(Side ingress, net::Packet packet)
{
    const auto decision = router_.route(ingress, packet, clock_.now());
    switch (decision.kind) {
    case Decision::Kind::drop:
        return;
    case Decision::Kind::forward:
        release(ingress, packet);
        return;
    case Decision::Kind::delay:
        clock_.schedule(decision.until, [this, ingress, packet = std::move(packet)] { release(ingress, packet); });
        return;
    }
}

void Gateway::release(Side ingress, const net::Packet& packet)
{
    if (ingress == Side::lan) {
        uplink_.transmit(net::PointLink::End::a, net::make_ipv4_frame(mac_, CloudEdge::mac(), packet));
        return;
    }
    const auto dst = directory_.lookup(packet.ip.dst);
    if (!dst) {
        ++unroutable_;
        return;
    }
    lan_.transmit(port_, net::make_ipv4_frame(mac_, *dst, packet));
}

CloudEdge::CloudEdge(net::SimClock& clock, net::PointLink& uplink, net::MacAddr gateway_mac)
    : clock_(clock), uplink_(uplink), gateway_mac_(gateway_mac)
{
    uplink_.bind(net::PointLink::End::b, [this](const net::Frame& frame) {
        auto packet = ipv4_payload(frame);
        if (!packet) return;
        const std::uint64_t size = packet->ip.total_length;
        ++packets_;
        bytes_ += size;
        delivered_[FlowKey::of(*packet)] += size;
        if (observer_) observer_(clock_.now(), *packet);
    });
}

void CloudEdge::inject(const net::Packet& packet)
{
    uplink_.transmit(net::PointLink::End::b, net::make_ipv4_frame(mac(), gateway_mac_, packet));
}

net::MacAddr CloudEdge::mac()
{
    return net::MacAddr{{0x02, 0xc1, 0x00, 0x00, 0x00, 0x01}};
}

}  // namespace fleet::dpi
