#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "fleet/net/addr.hpp"
#include "fleet/net/frame.hpp"

namespace fleet::net {

using PortId = std::size_t;

// Transparent learning bridge. Ports get dense ids in attachment order.
class Bridge {
public:
    // Throws DuplicateEndpoint if mac already owns a port.
    PortId attach_port(MacAddr mac);

    // Learns frame.src on ingress, then returns the egress set: the learned
    // port for a known unicast destination, otherwise every port but ingress.
    std::vector<PortId> forward(PortId ingress, const Frame& frame);

    std::optional<PortId> lookup(const MacAddr& mac) const;
    std::size_t port_count() const { return port_macs_.size(); }
    const MacAddr& port_mac(PortId port) const { return port_macs_.at(port); }
    const std::map<MacAddr, PortId>& learning_table() const { return learned_; }

private:
    std::vector<MacAddr> port_macs_;
    std::map<MacAddr, PortId> attached_;
    std::map<MacAddr, PortId> learned_;
};

}  // namespace fleet::net
