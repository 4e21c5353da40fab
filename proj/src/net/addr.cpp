#include "fleet/net/addr.hpp"

#include <charconv>
#include <cstdio>

namespace fleet::net {

MacAddr MacAddr::local(std::uint16_t id)
{
    return MacAddr{{0x02, 0x00, 0x00, 0x00, static_cast<std::uint8_t>(id >> 8),
                    static_cast<std::uint8_t>(id & 0xff)}};
}

std::string MacAddr::to_string() const
{
    char buf[18];
    std::snprintf(buf, sizeof buf, "%02x:%02x:%02x:%02x:%02x:%02x", octets[0], octets[1],
                  octets[2], octets[3], octets[4], octets[5]);
    return buf;
}

namespace {

int hex_value(char c)
{
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

}  // namespace

std::optional<MacAddr> MacAddr::parse(std::string_view text)
{
    if (text.size() != 17) return std::nullopt;
    MacAddr mac;
    for (std::size_t i = 0; i < 6; ++i) {
        const std::size_t at = i * 3;
        if (i > 0 && text[at - 1] != ':') return std::nullopt;
        const int hi = hex_value(text[at]);
        const int lo = hex_value(text[at + 1]);
        if (hi < 0 || lo < 0) return std::nullopt;
        mac.octets[i] = static_cast<std::uint8_t>(hi * 16 + lo);
    }
    return mac;
}

Ipv4Addr Ipv4Addr::from_u32(std::uint32_t value)
{
    return Ipv4Addr{{static_cast<std::uint8_t>(value >> 24), static_cast<std::uint8_t>(value >> 16),
                     static_cast<std::uint8_t>(value >> 8), static_cast<std::uint8_t>(value)}};
}

std::uint32_t Ipv4Addr::to_u32() const
{
    return (std::uint32_t{octets[0]} << 24) | (std::uint32_t{octets[1]} << 16) |
           (std::uint32_t{octets[2]} << 8) | std::uint32_t{octets[3]};
}

std::string Ipv4Addr::to_string() const
{
    return std::to_string(octets[0]) + '.' + std::to_string(octets[1]) + '.' +
           std::to_string(octets[2]) + '.' + std::to_string(octets[3]);
}

std::optional<Ipv4Addr> Ipv4Addr::parse(std::string_view text)
{
    Ipv4Addr ip;
    const char* p = text.data();
    const char* end = text.data() + text.size();
    for (std::size_t i = 0; i < 4; ++i) {
        if (i > 0) {
            if (p == end || *p != '.') return std::nullopt;
            ++p;
        }
        if (p == end || *p < '0' || *p > '9') return std::nullopt;
        unsigned value = 0;
        auto [next, ec] = std::from_chars(p, end, value);
        if (ec != std::errc{} || value > 255 || next - p > 3) return std::nullopt;
        ip.octets[i] = static_cast<std::uint8_t>(value);
        p = next;
    }
    if (p != end) return std::nullopt;
    return ip;
}

}  // namespace fleet::net
