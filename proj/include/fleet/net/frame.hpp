#pragma once

#include <cstdint>
#include <span>

#include "fleet/net/addr.hpp"
#include "fleet/net/packet.hpp"

namespace fleet::net {

inline constexpr std::uint16_t kEtherTypeIpv4 = 0x0800;
inline constexpr std::size_t kMtu = 1500;
inline constexpr std::size_t kEthernetHeaderLen = 14;

struct Frame {
    MacAddr dst;
    MacAddr src;
    std::uint16_t ethertype = kEtherTypeIpv4;
    Bytes payload;

    bool operator==(const Frame&) const = default;
};

// Wraps an encoded packet; throws MalformedPacket when it exceeds the MTU.
Frame make_ipv4_frame(MacAddr src, MacAddr dst, const Packet& packet);

Bytes encode_frame(const Frame& frame);

// Throws MalformedPacket on truncation, oversize payload, or an IPv4
// ethertype whose payload does not decode.
Frame decode_frame(std::span<const std::uint8_t> bytes);

}  // namespace fleet::net
