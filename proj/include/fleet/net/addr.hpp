#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace fleet::net {

struct MacAddr {
    std::array<std::uint8_t, 6> octets{};

    static MacAddr broadcast() { return MacAddr{{0xff, 0xff, 0xff, 0xff, 0xff, 0xff}}; }

    // Locally administered 02:00:00:00:hi:lo, used for device and host NICs.
    static MacAddr local(std::uint16_t id);

    bool is_broadcast() const { return *this == broadcast(); }

    // Lowercase colon-separated hex.
    std::string to_string() const;
    static std::optional<MacAddr> parse(std::string_view text);

    auto operator<=>(const MacAddr&) const = default;
};

struct Ipv4Addr {
    std::array<std::uint8_t, 4> octets{};

    static Ipv4Addr from_u32(std::uint32_t value);
    std::uint32_t to_u32() const;

    static Ipv4Addr any() { return {}; }
    static Ipv4Addr broadcast() { return Ipv4Addr{{255, 255, 255, 255}}; }

    std::string to_string() const;
    static std::optional<Ipv4Addr> parse(std::string_view text);

    auto operator<=>(const Ipv4Addr&) const = default;
};

}  // namespace fleet::net

template <>
struct std::hash<fleet::net::MacAddr> {
    std::size_t operator()(const fleet::net::MacAddr& mac) const noexcept {
        std::uint64_t v = 0;
        for (auto o : mac.octets) v = (v << 8) | o;
        return std::hash<std::uint64_t>{}(v);
    }
};

template <>
struct std::hash<fleet::net::Ipv4Addr> {
    std::size_t operator()(const fleet::net::Ipv4Addr& ip) const noexcept {
        return std::hash<std::uint32_t>{}(ip.to_u32());
    }
};
