#include "fleet/net/bridge.hpp"

#include <string>

#include "fleet/error.hpp"

namespace fleet::net {

PortId Bridge::attach_port(MacAddr mac)
{
    if (attached_.contains(mac)) throw DuplicateEndpoint("mac " + mac.to_string() + " already attached");
    const PortId id = port_macs_.size();
    port_macs_.push_back(mac);
    attached_.emplace(mac, id);
    return id;
}

std::vector<PortId> Bridge::forward(PortId ingress, const Frame& frame)
{
    if (ingress >= port_macs_.size()) {
        throw PreconditionViolated("ingress port " + std::to_string(ingress) + " is not attached");
    }
    if (!frame.src.is_broadcast()) learned_[frame.src] = ingress;

    if (!frame.dst.is_broadcast()) {
        if (auto it = learned_.find(frame.dst); it != learned_.end()) {
            return {it->second};
        }
    }
    std::vector<PortId> flood;
    flood.reserve(port_macs_.size());
    for (PortId p = 0; p < port_macs_.size(); ++p) {
        if (p != ingress) flood.push_back(p);
    }
    return flood;
}

std::optional<PortId> Bridge::lookup(const MacAddr& mac) const
{
    if (auto it = learned_.find(mac); it != learned_.end()) return it->second;
    return std::nullopt;
}

}  // namespace fleet::net
