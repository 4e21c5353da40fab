#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "fleet/net/addr.hpp"

namespace fleet::net {

using Bytes = std::vector<std::uint8_t>;

inline constexpr std::uint8_t kProtoTcp = 6;
inline constexpr std::uint8_t kProtoUdp = 17;
inline constexpr std::size_t kIpv4HeaderLen = 20;
inline constexpr std::size_t kUdpHeaderLen = 8;
inline constexpr std::size_t kTcpHeaderLen = 20;
inline constexpr std::uint8_t kDefaultTtl = 64;

// DSCP Expedited Forwarding, shifted into the TOS byte.
inline constexpr std::uint8_t kTosExpedited = 46 << 2;

namespace tcp_flags {
inline constexpr std::uint8_t fin = 0x01;
inline constexpr std::uint8_t syn = 0x02;
inline constexpr std::uint8_t rst = 0x04;
inline constexpr std::uint8_t psh = 0x08;
inline constexpr std::uint8_t ack = 0x10;
}  // namespace tcp_flags

struct Ipv4Header {
    Ipv4Addr src;
    Ipv4Addr dst;
    std::uint8_t proto = kProtoUdp;
    std::uint8_t ttl = kDefaultTtl;
    std::uint8_t tos = 0;
    std::uint16_t id = 0;
    // Whole datagram length; encode_packet writes the computed value.
    std::uint16_t total_length = 0;

    bool operator==(const Ipv4Header&) const = default;
};

struct UdpDatagram {
    std::uint16_t src_port = 0;
    std::uint16_t dst_port = 0;
    Bytes payload;

    bool operator==(const UdpDatagram&) const = default;
};

struct TcpSegment {
    std::uint16_t src_port = 0;
    std::uint16_t dst_port = 0;
    std::uint32_t seq = 0;
    std::uint32_t ack = 0;
    std::uint8_t flags = 0;
    Bytes payload;

    bool has(std::uint8_t flag) const { return (flags & flag) != 0; }
    bool operator==(const TcpSegment&) const = default;
};

// Decoded IPv4 datagram carrying UDP or TCP.
struct Packet {
    Ipv4Header ip;
    std::variant<UdpDatagram, TcpSegment> l4;

    bool is_tcp() const { return std::holds_alternative<TcpSegment>(l4); }
    bool is_udp() const { return std::holds_alternative<UdpDatagram>(l4); }
    const TcpSegment& tcp() const { return std::get<TcpSegment>(l4); }
    const UdpDatagram& udp() const { return std::get<UdpDatagram>(l4); }

    std::uint16_t src_port() const;
    std::uint16_t dst_port() const;
    const Bytes& payload() const;

    // Encoded byte count, independent of ip.total_length.
    std::size_t wire_size() const;

    bool operator==(const Packet&) const = default;
};

Packet make_udp(Ipv4Addr src, std::uint16_t src_port, Ipv4Addr dst, std::uint16_t dst_port,
                Bytes payload);
Packet make_tcp(Ipv4Addr src, std::uint16_t src_port, Ipv4Addr dst, std::uint16_t dst_port,
                std::uint8_t flags, std::uint32_t seq, Bytes payload = {});

// Big-endian, checksums written as zero.
Bytes encode_packet(const Packet& packet);

// Throws MalformedPacket for truncated or inconsistent buffers and
// UnsupportedProtocol for a well-formed header with proto other than 6/17.
Packet decode_packet(std::span<const std::uint8_t> bytes);

}  // namespace fleet::net
