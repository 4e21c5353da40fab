#include "fleet/cli/scenario_file.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fleet/error.hpp"

namespace fleet::cli {

namespace {

using nlohmann::json;
using net::SimTime;

void only_keys(const json& node, const std::string& path, const std::set<std::string>& allowed)
{
    if (!node.is_object()) throw ConfigError(path.empty() ? "scenario" : path, "must be an object");
    for (const auto& [key, value] : node.items())
        if (!allowed.contains(key)) throw ConfigError(path.empty() ? key : path + "." + key, "unknown key");
}

std::uint64_t unsigned_field(const json& node, const std::string& path, std::uint64_t max = UINT64_MAX)
{
    if (!node.is_number_unsigned()) throw ConfigError(path, "must be a non-negative integer");
    const auto v = node.get<std::uint64_t>();
    if (v > max) throw ConfigError(path, "out of range");
    return v;
}

SimTime time_field(const json& node, const std::string& path)
{
    return static_cast<SimTime>(unsigned_field(node, path, 1ULL << 53));
}

std::string string_field(const json& node, const std::string& path)
{
    if (!node.is_string()) throw ConfigError(path, "must be a string");
    return node.get<std::string>();
}

net::Ipv4Addr ip_field(const json& node, const std::string& path)
{
    auto ip = net::Ipv4Addr::parse(string_field(node, path));
    if (!ip) throw ConfigError(path, "not a dotted-quad address");
    return *ip;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& text)
{
    std::filesystem::path p(text);
    return p.is_absolute() ? p : base / p;
}

device::AppManifest app_entry(const json& node, const std::string& path, const std::filesystem::path& base)
{
    const auto text = string_field(node, path);
    if (auto builtin = device::builtin_manifest(text)) return *builtin;
    if (text.find('/') == std::string::npos && !text.ends_with(".json"))
        throw ConfigError(path, "unknown app '" + text + "'");
    try {
        return device::load_manifest(resolve(base, text));
    } catch (const ConfigError& e) {
        throw ConfigError(path + "." + e.field(), e.reason());
    }
}

}  // namespace

driver::Scenario parse_scenario_text(std::string_view text, const std::filesystem::path& base_dir)
{
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("scenario", std::string("invalid JSON: ") + e.what());
    }
    only_keys(root, "",
              {"device_count", "apps", "duration_ms", "seed", "intent_delay_ms", "poll_interval_ms",
               "boot_stagger_ms", "pool", "signatures", "policies", "anomaly", "leases_file"});
    for (const char* key : {"device_count", "apps", "duration_ms"})
        if (!root.contains(key)) throw ConfigError(key, "required");

    driver::Scenario s;
    s.device_count = static_cast<std::uint32_t>(unsigned_field(root["device_count"], "device_count", 65535));
    if (s.device_count == 0) throw ConfigError("device_count", "must be at least 1");

    const auto& apps = root["apps"];
    if (!apps.is_array()) throw ConfigError("apps", "must be an array");
    for (std::size_t i = 0; i < apps.size(); ++i)
        s.apps.push_back(app_entry(apps[i], "apps[" + std::to_string(i) + "]", base_dir));

    s.duration_ms = time_field(root["duration_ms"], "duration_ms");
    if (root.contains("seed")) s.seed = unsigned_field(root["seed"], "seed");
    if (root.contains("intent_delay_ms")) s.intent_delay_ms = time_field(root["intent_delay_ms"], "intent_delay_ms");
    if (root.contains("poll_interval_ms"))
        s.poll_interval_ms = time_field(root["poll_interval_ms"], "poll_interval_ms");
    if (root.contains("boot_stagger_ms")) s.boot_stagger_ms = time_field(root["boot_stagger_ms"], "boot_stagger_ms");

    if (root.contains("pool")) {
        const auto& pool = root["pool"];
        only_keys(pool, "pool", {"first", "last", "mask", "router", "lease_seconds"});
        if (pool.contains("first")) s.pool.first = ip_field(pool["first"], "pool.first");
        if (pool.contains("last")) s.pool.last = ip_field(pool["last"], "pool.last");
        if (pool.contains("mask")) s.pool.subnet_mask = ip_field(pool["mask"], "pool.mask");
        if (pool.contains("router")) s.pool.router = ip_field(pool["router"], "pool.router");
        if (pool.contains("lease_seconds"))
            s.pool.lease_seconds =
                static_cast<std::uint32_t>(unsigned_field(pool["lease_seconds"], "pool.lease_seconds", UINT32_MAX));
    }

    if (root.contains("signatures")) {
        const auto path = resolve(base_dir, string_field(root["signatures"], "signatures"));
        if (!std::filesystem::exists(path)) throw ConfigError("signatures", "no such file " + path.string());
        s.signatures = dpi::load_signatures(path);
    }
    if (root.contains("policies")) {
        const auto path = resolve(base_dir, string_field(root["policies"], "policies"));
        if (!std::filesystem::exists(path)) throw ConfigError("policies", "no such file " + path.string());
        s.policies = dpi::load_policies(path);
    }

    if (root.contains("anomaly")) {
        const auto& a = root["anomaly"];
        only_keys(a, "anomaly", {"window_ms", "heavy_bytes", "max_new_flows"});
        if (a.contains("window_ms")) s.anomaly.window_ms = time_field(a["window_ms"], "anomaly.window_ms");
        if (a.contains("heavy_bytes")) s.anomaly.heavy_bytes = unsigned_field(a["heavy_bytes"], "anomaly.heavy_bytes");
        if (a.contains("max_new_flows"))
            s.anomaly.max_new_flows = unsigned_field(a["max_new_flows"], "anomaly.max_new_flows");
    }

    if (root.contains("leases_file")) s.leases_file = resolve(base_dir, string_field(root["leases_file"], "leases_file"));

    s.validate();
    return s;
}

driver::Scenario parse_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("scenario", "cannot read " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_scenario_text(text.str(), path.parent_path());
}

}  // namespace fleet::cli
