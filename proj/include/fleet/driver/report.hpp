#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fleet/dpi/router.hpp"

namespace fleet::driver {

using net::Ipv4Addr;
using net::SimTime;

struct FlowRow {
    dpi::FlowKey key;
    Ipv4Addr subscriber;
    std::string app;      // label: app name, "unknown" or "pending"
    std::string verdict;  // format_action of the flow's current action
    std::uint64_t pkts_up = 0;
    std::uint64_t pkts_down = 0;
    std::uint64_t bytes_up = 0;
    std::uint64_t bytes_down = 0;
    std::uint64_t forwarded_bytes = 0;
    std::uint64_t forwarded_bytes_after_classification = 0;
    std::uint64_t dropped_pkts = 0;
    SimTime first_seen = 0;
    SimTime last_seen = 0;

    bool operator==(const FlowRow&) const = default;
};

struct AppRow {
    std::uint64_t bytes = 0;
    std::uint64_t packets = 0;
    std::uint64_t flows = 0;

    bool operator==(const AppRow&) const = default;
};

struct SubscriberRow {
    Ipv4Addr ip;
    std::map<std::string, AppRow> apps;
    std::uint64_t prioritized_packets = 0;
    bool heavy_user = false;
    bool signaling_overload = false;

    bool operator==(const SubscriberRow&) const = default;
};

struct Totals {
    std::uint64_t flows = 0;
    std::uint64_t pkts_up = 0;
    std::uint64_t pkts_down = 0;
    std::uint64_t bytes_up = 0;
    std::uint64_t bytes_down = 0;
    std::uint64_t forwarded_bytes = 0;
    std::uint64_t dropped_pkts = 0;
    std::map<std::string, std::uint64_t> flows_by_app;
    std::map<std::string, std::uint64_t> flows_by_verdict;

    bool operator==(const Totals&) const = default;
};

struct RunReport {
    std::uint64_t seed = 0;
    std::uint32_t device_count = 0;
    SimTime duration_ms = 0;
    std::uint32_t devices_online = 0;
    std::uint32_t sessions = 0;

    // Sorted by subscriber, then first_seen, then key.
    std::vector<FlowRow> flows;
    // Sorted by ip.
    std::vector<SubscriberRow> subscribers;
    std::vector<std::string> heavy_users;
    std::vector<std::string> signaling_overload;
    Totals totals;
    // FNV-1a over every frame record on the LAN and the uplink, hex.
    std::string trace_digest;

    bool any_anomaly() const { return !heavy_users.empty() || !signaling_overload.empty(); }
    bool operator==(const RunReport&) const = default;
};

// Recomputes totals from the rows.
Totals sum_rows(const std::vector<FlowRow>& rows);

// Fills flows, subscribers, anomalies and totals from the router state.
void fill_from_router(RunReport& report, const dpi::Router& router);

}  // namespace fleet::driver
