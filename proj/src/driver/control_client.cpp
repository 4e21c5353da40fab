#include "fleet/driver/control_client.hpp"

#include "fleet/apps/rng.hpp"

namespace fleet::driver {

ControlClient::ControlClient(net::SimClock& clock, Sender send, Ipv4Addr local_ip, std::uint16_t local_port,
                             Ipv4Addr device_ip, MacAddr device_mac, SimTime connect_timeout, Callbacks callbacks)
    : clock_(clock), send_(std::move(send)), local_ip_(local_ip), local_port_(local_port), device_ip_(device_ip),
      device_mac_(device_mac), connect_timeout_(connect_timeout), callbacks_(std::move(callbacks))
{
}

void ControlClient::open()
{
    seq_ = static_cast<std::uint32_t>(apps::splitmix64((std::uint64_t{device_ip_.to_u32()} << 16) | local_port_));
    segment(net::tcp_flags::syn, {});
    seq_ += 1;
    timeout_ = clock_.schedule_in(connect_timeout_, [this] {
        timeout_.reset();
        if (state_ == State::connecting) fail("timed out");
    });
}

void ControlClient::fail(std::string_view why)
{
    state_ = State::closed;
    if (timeout_) clock_.cancel(*timeout_);
    timeout_.reset();
    if (callbacks_.refused) callbacks_.refused(why);
}

void ControlClient::send(std::string request, ReplyHandler on_reply)
{
    queue_.push_back({std::move(request), std::move(on_reply)});
    if (state_ == State::connected && !in_flight_) transmit_front();
}

void ControlClient::transmit_front()
{
    if (queue_.empty()) return;
    in_flight_ = true;
    const std::string_view text = queue_.front().request;
    for (std::size_t off = 0; off < text.size(); off += device::kSegmentBytes) {
        const auto chunk = text.substr(off, device::kSegmentBytes);
        segment(net::tcp_flags::psh | net::tcp_flags::ack, chunk);
        seq_ += static_cast<std::uint32_t>(chunk.size());
    }
}

void ControlClient::segment(std::uint8_t flags, std::string_view data)
{
    auto packet = net::make_tcp(local_ip_, local_port_, device_ip_, device::kControlPort, flags, seq_,
                                net::Bytes(data.begin(), data.end()));
    std::get<net::TcpSegment>(packet.l4).ack = ack_;
    send_(device_mac_, std::move(packet));
}

void ControlClient::on_segment(const net::Packet& packet)
{
    using namespace net::tcp_flags;
    const auto& seg = packet.tcp();
    if (state_ == State::closed) return;
    if (seg.has(rst)) {
        fail(state_ == State::connecting ? "connection refused" : "connection reset");
        return;
    }
    if (state_ == State::connecting) {
        if (!(seg.has(syn) && seg.has(ack))) return;
        ack_ = seg.seq + 1;
        state_ = State::connected;
        if (timeout_) clock_.cancel(*timeout_);
        timeout_.reset();
        segment(ack, {});
        if (callbacks_.connected) callbacks_.connected();
        if (!in_flight_) transmit_front();
        return;
    }
    if (seg.payload.empty()) return;
    ack_ += static_cast<std::uint32_t>(seg.payload.size());
    reader_.feed(seg.payload);
    while (auto reply = reader_.next()) {
        if (queue_.empty()) continue;
        auto handler = std::move(queue_.front().on_reply);
        queue_.pop_front();
        in_flight_ = false;
        if (handler) handler(*reply);
        if (!in_flight_ && state_ == State::connected) transmit_front();
    }
}

}  // namespace fleet::driver
