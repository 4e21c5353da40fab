#pragma once

#include <filesystem>
#include <string_view>

#include "fleet/driver/scenario.hpp"

namespace fleet::cli {

// Scenario JSON. Required: device_count, apps, duration_ms. Everything else
// has a default. Unknown keys are rejected.
//
//   {
//     "device_count": 20,
//     "apps": ["skype", "facebook", "manifests/custom.json"],
//     "duration_ms": 60000,
//     "seed": 1,
//     "intent_delay_ms": 5000,
//     "poll_interval_ms": 1000,
//     "boot_stagger_ms": 100,
//     "pool": {"first": "10.0.2.100", "last": "10.0.2.199", "mask": "255.255.255.0",
//              "router": "10.0.2.1", "lease_seconds": 86400},
//     "signatures": "rules/signatures.rules",
//     "policies": "rules/policies.rules",
//     "anomaly": {"window_ms": 60000, "heavy_bytes": 10000000, "max_new_flows": 100},
//     "leases_file": "/tmp/dhcpd.leases"
//   }
//
// An app is a builtin manifest name or a path to a manifest file. Relative
// paths resolve against base_dir. Throws ConfigError with the field path.
driver::Scenario parse_scenario_text(std::string_view text, const std::filesystem::path& base_dir);
driver::Scenario parse_scenario(const std::filesystem::path& path);

}  // namespace fleet::cli
