#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fleet/net/bridge.hpp"
#include "fleet/net/clock.hpp"
#include "fleet/net/frame.hpp"

namespace fleet::net {

// One delivered frame, as written to the optional frame log.
struct FrameRecord {
    SimTime time;
    MacAddr src;
    MacAddr dst;
    std::uint16_t ethertype;
    std::size_t length;
};

// `time_ms  src_mac  dst_mac  ethertype  length`, tab separated, no newline.
std::string format_frame_record(const FrameRecord& record);

using FrameObserver = std::function<void(const FrameRecord&)>;

// The LAN: a learning bridge whose ports are bound to receive callbacks and
// whose hops are dispatched through the simulation clock.
class Fabric {
public:
    using Receiver = std::function<void(const Frame&)>;

    explicit Fabric(SimClock& clock, SimTime hop_latency_ms = 0)
        : clock_(clock), latency_(hop_latency_ms) {}

    Fabric(const Fabric&) = delete;
    Fabric& operator=(const Fabric&) = delete;

    PortId attach(MacAddr mac, Receiver receiver);

    // Queues the frame at the bridge; deliveries follow one hop later.
    void transmit(PortId ingress, Frame frame);

    void set_observer(FrameObserver observer) { observer_ = std::move(observer); }

    Bridge& bridge() { return bridge_; }
    const Bridge& bridge() const { return bridge_; }
    std::uint64_t frames_delivered() const { return delivered_; }

private:
    SimClock& clock_;
    SimTime latency_;
    Bridge bridge_;
    std::vector<Receiver> receivers_;
    FrameObserver observer_;
    std::uint64_t delivered_ = 0;
};

// Point-to-point link between two endpoints (the router's uplink to the cloud).
class PointLink {
public:
    using Receiver = std::function<void(const Frame&)>;
    enum class End { a, b };

    explicit PointLink(SimClock& clock, SimTime latency_ms = 0) : clock_(clock), latency_(latency_ms) {}

    PointLink(const PointLink&) = delete;
    PointLink& operator=(const PointLink&) = delete;

    void bind(End end, Receiver receiver);
    void transmit(End from, Frame frame);
    void set_observer(FrameObserver observer) { observer_ = std::move(observer); }

private:
    SimClock& clock_;
    SimTime latency_;
    Receiver a_;
    Receiver b_;
    FrameObserver observer_;
};

// Stand-in for ARP: the simulation publishes ip -> mac bindings here.
class MacDirectory {
public:
    void publish(Ipv4Addr ip, MacAddr mac) { entries_[ip] = mac; }
    void withdraw(Ipv4Addr ip) { entries_.erase(ip); }
    std::optional<MacAddr> lookup(Ipv4Addr ip) const;

private:
    std::map<Ipv4Addr, MacAddr> entries_;
};

}  // namespace fleet::net
