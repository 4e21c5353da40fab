#pragma once

#include <deque>
#include <functional>
#include <string>

#include "fleet/device/control.hpp"
#include "fleet/net/fabric.hpp"

namespace fleet::driver {

using net::Ipv4Addr;
using net::MacAddr;
using net::SimTime;

// Client end of one control session to a device's tcp/5555 listener.
// Commands are serialized: the next one goes out when the previous reply's
// terminator arrives.
class ControlClient {
public:
    enum class State { connecting, connected, closed };
    using ReplyHandler = std::function<void(const device::ControlReply&)>;
    using Sender = std::function<void(const MacAddr&, net::Packet)>;

    struct Callbacks {
        std::function<void()> connected;
        std::function<void(std::string_view why)> refused;
    };

    ControlClient(net::SimClock& clock, Sender send, Ipv4Addr local_ip, std::uint16_t local_port, Ipv4Addr device_ip,
                  MacAddr device_mac, SimTime connect_timeout, Callbacks callbacks);

    ControlClient(const ControlClient&) = delete;
    ControlClient& operator=(const ControlClient&) = delete;

    void open();
    void send(std::string request, ReplyHandler on_reply);
    void on_segment(const net::Packet& packet);

    State state() const { return state_; }
    Ipv4Addr device_ip() const { return device_ip_; }
    std::uint16_t local_port() const { return local_port_; }
    std::size_t queued() const { return queue_.size(); }

private:
    struct Pending {
        std::string request;
        ReplyHandler on_reply;
    };

    void transmit_front();
    void segment(std::uint8_t flags, std::string_view data);
    void fail(std::string_view why);

    net::SimClock& clock_;
    Sender send_;
    Ipv4Addr local_ip_;
    std::uint16_t local_port_;
    Ipv4Addr device_ip_;
    MacAddr device_mac_;
    SimTime connect_timeout_;
    Callbacks callbacks_;

    State state_ = State::connecting;
    std::uint32_t seq_ = 0;
    std::uint32_t ack_ = 0;
    std::optional<net::EventId> timeout_;
    std::deque<Pending> queue_;
    bool in_flight_ = false;
    device::ReplyReader reader_;
};

}  // namespace fleet::driver
