#include "fleet/driver/scenario.hpp"

#include "fleet/error.hpp"

namespace fleet::driver {

void Scenario::validate() const
{
    if (device_count < 1) throw ConfigError("device_count", "must be at least 1");
    if (intent_delay_ms <= 0) throw ConfigError("intent_delay_ms", "must be positive");
    if (poll_interval_ms <= 0) throw ConfigError("poll_interval_ms", "must be positive");
    if (boot_stagger_ms < 0) throw ConfigError("boot_stagger_ms", "must not be negative");
    if (duration_ms <= 0) throw ConfigError("duration_ms", "must be positive");
    const auto cycle = static_cast<SimTime>(apps.size()) * intent_delay_ms;
    if (duration_ms < cycle)
        throw ConfigError("duration_ms", "shorter than one app cycle (" + std::to_string(cycle) + " ms)");
    pool.validate();
    if (pool.contains(kHostIp)) throw ConfigError("pool.first", "pool overlaps the host address " + kHostIp.to_string());
    anomaly.validate();
}

}  // namespace fleet::driver
