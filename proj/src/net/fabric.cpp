#include "fleet/net/fabric.hpp"

#include <cstdio>
#include <memory>

namespace fleet::net {

std::string format_frame_record(const FrameRecord& record)
{
    char ethertype[8];
    std::snprintf(ethertype, sizeof ethertype, "0x%04x", record.ethertype);
    return std::to_string(record.time) + '\t' + record.src.to_string() + '\t' + record.dst.to_string() +
           '\t' + ethertype + '\t' + std::to_string(record.length);
}

PortId Fabric::attach(MacAddr mac, Receiver receiver)
{
    const PortId id = bridge_.attach_port(mac);
    receivers_.push_back(std::move(receiver));
    return id;
}

void Fabric::transmit(PortId ingress, Frame frame)
{
    auto shared = std::make_shared<const Frame>(std::move(frame));
    clock_.schedule_in(latency_, [this, ingress, shared] {
        for (PortId egress : bridge_.forward(ingress, *shared)) {
            clock_.schedule_in(latency_, [this, egress, shared] {
                ++delivered_;
                if (observer_) {
                    observer_(FrameRecord{clock_.now(), shared->src, shared->dst, shared->ethertype,
                                          kEthernetHeaderLen + shared->payload.size()});
                }
                if (receivers_[egress]) receivers_[egress](*shared);
            });
        }
    });
}

void PointLink::bind(End end, Receiver receiver)
{
    (end == End::a ? a_ : b_) = std::move(receiver);
}

void PointLink::transmit(End from, Frame frame)
{
    clock_.schedule_in(latency_, [this, from, frame = std::move(frame)] {
        if (observer_) {
            observer_(FrameRecord{clock_.now(), frame.src, frame.dst, frame.ethertype,
                                  kEthernetHeaderLen + frame.payload.size()});
        }
        auto& receiver = from == End::a ? b_ : a_;
        if (receiver) receiver(frame);
    });
}

std::optional<MacAddr> MacDirectory::lookup(Ipv4Addr ip) const
{
    if (auto it = entries_.find(ip); it != entries_.end()) return it->second;
    return std::nullopt;
}

}  // namespace fleet::net
