#include "fleet/net/frame.hpp"

#include <algorithm>

#include "fleet/error.hpp"

namespace fleet::net {

Frame make_ipv4_frame(MacAddr src, MacAddr dst, const Packet& packet)
{
    Frame frame{dst, src, kEtherTypeIpv4, encode_packet(packet)};
    if (frame.payload.size() > kMtu) throw MalformedPacket("payload exceeds mtu");
    return frame;
}

Bytes encode_frame(const Frame& frame)
{
    if (frame.payload.size() > kMtu) throw MalformedPacket("payload exceeds mtu");
    Bytes out;
    out.reserve(kEthernetHeaderLen + frame.payload.size());
    out.insert(out.end(), frame.dst.octets.begin(), frame.dst.octets.end());
    out.insert(out.end(), frame.src.octets.begin(), frame.src.octets.end());
    out.push_back(static_cast<std::uint8_t>(frame.ethertype >> 8));
    out.push_back(static_cast<std::uint8_t>(frame.ethertype));
    out.insert(out.end(), frame.payload.begin(), frame.payload.end());
    return out;
}

Frame decode_frame(std::span<const std::uint8_t> bytes)
{
    if (bytes.size() < kEthernetHeaderLen) throw MalformedPacket("truncated ethernet header");
    if (bytes.size() - kEthernetHeaderLen > kMtu) throw MalformedPacket("payload exceeds mtu");
    Frame frame;
    std::copy_n(bytes.begin(), 6, frame.dst.octets.begin());
    std::copy_n(bytes.begin() + 6, 6, frame.src.octets.begin());
    frame.ethertype = static_cast<std::uint16_t>((bytes[12] << 8) | bytes[13]);
    frame.payload.assign(bytes.begin() + kEthernetHeaderLen, bytes.end());
    if (frame.ethertype == kEtherTypeIpv4) {
        try {
            (void)decode_packet(frame.payload);
        } catch (const UnsupportedProtocol&) {
            // Valid IPv4 carrying a protocol this stack does not speak.
        }
    }
    return frame;
}

}  // namespace fleet::net
