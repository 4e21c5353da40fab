#include "fleet/net/packet.hpp"

#include <string>

#include "fleet/error.hpp"

namespace fleet::net {

namespace {

void put16(Bytes& out, std::uint16_t v)
{
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

void put32(Bytes& out, std::uint32_t v)
{
    put16(out, static_cast<std::uint16_t>(v >> 16));
    put16(out, static_cast<std::uint16_t>(v));
}

void put_ip(Bytes& out, const Ipv4Addr& ip)
{
    out.insert(out.end(), ip.octets.begin(), ip.octets.end());
}

std::uint16_t get16(std::span<const std::uint8_t> b, std::size_t at)
{
    return static_cast<std::uint16_t>((b[at] << 8) | b[at + 1]);
}

std::uint32_t get32(std::span<const std::uint8_t> b, std::size_t at)
{
    return (std::uint32_t{get16(b, at)} << 16) | get16(b, at + 2);
}

Ipv4Addr get_ip(std::span<const std::uint8_t> b, std::size_t at)
{
    return Ipv4Addr{{b[at], b[at + 1], b[at + 2], b[at + 3]}};
}

[[noreturn]] void malformed(const std::string& what)
{
    throw MalformedPacket(what);
}

}  // namespace

std::uint16_t Packet::src_port() const
{
    return std::visit([](const auto& seg) { return seg.src_port; }, l4);
}

std::uint16_t Packet::dst_port() const
{
    return std::visit([](const auto& seg) { return seg.dst_port; }, l4);
}

const Bytes& Packet::payload() const
{
    return std::visit([](const auto& seg) -> const Bytes& { return seg.payload; }, l4);
}

std::size_t Packet::wire_size() const
{
    return kIpv4HeaderLen + (is_tcp() ? kTcpHeaderLen : kUdpHeaderLen) + payload().size();
}

Packet make_udp(Ipv4Addr src, std::uint16_t src_port, Ipv4Addr dst, std::uint16_t dst_port,
                Bytes payload)
{
    Packet p;
    p.ip.src = src;
    p.ip.dst = dst;
    p.ip.proto = kProtoUdp;
    p.l4 = UdpDatagram{src_port, dst_port, std::move(payload)};
    p.ip.total_length = static_cast<std::uint16_t>(p.wire_size());
    return p;
}

Packet make_tcp(Ipv4Addr src, std::uint16_t src_port, Ipv4Addr dst, std::uint16_t dst_port,
                std::uint8_t flags, std::uint32_t seq, Bytes payload)
{
    Packet p;
    p.ip.src = src;
    p.ip.dst = dst;
    p.ip.proto = kProtoTcp;
    TcpSegment seg;
    seg.src_port = src_port;
    seg.dst_port = dst_port;
    seg.seq = seq;
    seg.flags = flags;
    seg.payload = std::move(payload);
    p.l4 = std::move(seg);
    p.ip.total_length = static_cast<std::uint16_t>(p.wire_size());
    return p;
}

Bytes encode_packet(const Packet& packet)
{
    const std::size_t total = packet.wire_size();
    if (total > 0xffff) malformed("datagram exceeds 65535 bytes");

    Bytes out;
    out.reserve(total);
    out.push_back(0x45);
    out.push_back(packet.ip.tos);
    put16(out, static_cast<std::uint16_t>(total));
    put16(out, packet.ip.id);
    put16(out, 0);  // flags + fragment offset
    out.push_back(packet.ip.ttl);
    out.push_back(packet.is_tcp() ? kProtoTcp : kProtoUdp);
    put16(out, 0);  // checksum
    put_ip(out, packet.ip.src);
    put_ip(out, packet.ip.dst);

    if (packet.is_udp()) {
        const auto& udp = packet.udp();
        put16(out, udp.src_port);
        put16(out, udp.dst_port);
        put16(out, static_cast<std::uint16_t>(kUdpHeaderLen + udp.payload.size()));
        put16(out, 0);
        out.insert(out.end(), udp.payload.begin(), udp.payload.end());
    } else {
        const auto& tcp = packet.tcp();
        put16(out, tcp.src_port);
        put16(out, tcp.dst_port);
        put32(out, tcp.seq);
        put32(out, tcp.ack);
        out.push_back(5 << 4);
        out.push_back(tcp.flags);
        put16(out, 0xffff);  // window
        put16(out, 0);       // checksum
        put16(out, 0);       // urgent
        out.insert(out.end(), tcp.payload.begin(), tcp.payload.end());
    }
    return out;
}

Packet decode_packet(std::span<const std::uint8_t> bytes)
{
    if (bytes.size() < kIpv4HeaderLen) malformed("truncated ipv4 header");
    if ((bytes[0] >> 4) != 4) malformed("not ipv4");
    const std::size_t header_len = std::size_t{bytes[0] & 0x0fu} * 4;
    if (header_len < kIpv4HeaderLen || header_len > bytes.size()) malformed("bad ipv4 header length");

    Packet p;
    p.ip.tos = bytes[1];
    p.ip.total_length = get16(bytes, 2);
    p.ip.id = get16(bytes, 4);
    if ((get16(bytes, 6) & 0x3fff) != 0) malformed("fragments are not supported");
    p.ip.ttl = bytes[8];
    p.ip.proto = bytes[9];
    p.ip.src = get_ip(bytes, 12);
    p.ip.dst = get_ip(bytes, 16);
    if (p.ip.total_length != bytes.size()) malformed("total length does not match buffer");

    if (p.ip.proto != kProtoUdp && p.ip.proto != kProtoTcp) {
        throw UnsupportedProtocol("ip proto " + std::to_string(p.ip.proto));
    }

    const auto l4 = bytes.subspan(header_len);
    if (p.ip.proto == kProtoUdp) {
        if (l4.size() < kUdpHeaderLen) malformed("truncated udp header");
        if (get16(l4, 4) != l4.size()) malformed("udp length does not match datagram");
        UdpDatagram udp;
        udp.src_port = get16(l4, 0);
        udp.dst_port = get16(l4, 2);
        udp.payload.assign(l4.begin() + kUdpHeaderLen, l4.end());
        p.l4 = std::move(udp);
    } else {
        if (l4.size() < kTcpHeaderLen) malformed("truncated tcp header");
        const std::size_t data_offset = std::size_t{static_cast<std::uint8_t>(l4[12] >> 4)} * 4;
        if (data_offset < kTcpHeaderLen || data_offset > l4.size()) malformed("bad tcp data offset");
        TcpSegment tcp;
        tcp.src_port = get16(l4, 0);
        tcp.dst_port = get16(l4, 2);
        tcp.seq = get32(l4, 4);
        tcp.ack = get32(l4, 8);
        tcp.flags = l4[13];
        tcp.payload.assign(l4.begin() + static_cast<std::ptrdiff_t>(data_offset), l4.end());
        p.l4 = std::move(tcp);
    }
    return p;
}

}  // namespace fleet::net
