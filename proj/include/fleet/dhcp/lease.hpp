#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fleet/net/addr.hpp"
#include "fleet/net/clock.hpp"

namespace fleet::dhcp {

enum class BindingState { active, expired };

struct Lease {
    net::Ipv4Addr ip;
    net::MacAddr mac;
    net::SimTime starts_ms = 0;
    net::SimTime ends_ms = 0;
    BindingState state = BindingState::active;

    bool operator==(const Lease&) const = default;
};

// dhcpd.leases rendering: one block per lease, each followed by a blank line.
//
//   lease 10.0.2.100 {
//     starts 0;
//     ends 86400000;
//     hardware ethernet 02:00:00:00:00:01;
//     binding state active;
//   }
std::string format_leases(std::span<const Lease> leases);

// Strict inverse of format_leases; throws LeaseFileCorrupt with a 1-based line.
std::vector<Lease> parse_leases_text(std::string_view text);

// Writes to a sibling temp file and renames it over path.
void write_leases(std::span<const Lease> leases, const std::filesystem::path& path);

// A missing file reads as an empty lease set.
std::vector<Lease> parse_leases(const std::filesystem::path& path);

}  // namespace fleet::dhcp
