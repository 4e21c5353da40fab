#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "fleet/device/manifest.hpp"
#include "fleet/dhcp/server.hpp"
#include "fleet/dpi/router.hpp"
#include "fleet/dpi/rules.hpp"

namespace fleet::driver {

using net::SimTime;

// Fixed addressing of the test bed. The router address comes from the pool.
inline constexpr net::Ipv4Addr kHostIp{{10, 0, 2, 2}};
inline constexpr net::MacAddr kHostMac{{0x02, 0x00, 0x00, 0x00, 0xfe, 0x02}};
inline constexpr net::MacAddr kGatewayMac{{0x02, 0x00, 0x00, 0x00, 0xff, 0x01}};

struct Scenario {
    std::uint32_t device_count = 1;
    std::vector<device::AppManifest> apps;
    SimTime intent_delay_ms = 5000;
    SimTime poll_interval_ms = 1000;
    SimTime duration_ms = 0;
    std::uint64_t seed = 0;
    SimTime boot_stagger_ms = 100;
    dhcp::AddressPool pool;
    std::vector<dpi::SignatureRule> signatures = dpi::parse_signatures(dpi::default_signature_text());
    dpi::PolicyTable policies = dpi::parse_policies(dpi::default_policy_text());
    dpi::AnomalyConfig anomaly;
    // Where dhcpd writes its leases; a private temporary file when unset.
    std::optional<std::filesystem::path> leases_file;

    // Throws ConfigError naming the field.
    void validate() const;
};

}  // namespace fleet::driver
