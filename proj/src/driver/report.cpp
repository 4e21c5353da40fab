#include "fleet/driver/report.hpp"

#include <algorithm>
#include <tuple>

namespace fleet::driver {

Totals sum_rows(const std::vector<FlowRow>& rows)
{
    Totals t;
    for (const auto& r : rows) {
        ++t.flows;
        t.pkts_up += r.pkts_up;
        t.pkts_down += r.pkts_down;
        t.bytes_up += r.bytes_up;
        t.bytes_down += r.bytes_down;
        t.forwarded_bytes += r.forwarded_bytes;
        t.dropped_pkts += r.dropped_pkts;
        ++t.flows_by_app[r.app];
        ++t.flows_by_verdict[r.verdict];
    }
    return t;
}

void fill_from_router(RunReport& report, const dpi::Router& router)
{
    report.flows.clear();
    for (const auto& [key, flow] : router.flows()) {
        report.flows.push_back({key, flow.subscriber, flow.label(), dpi::format_action(flow.verdict), flow.pkts_up,
                                flow.pkts_down, flow.bytes_up, flow.bytes_down, flow.forwarded_bytes,
                                flow.forwarded_bytes_after_classification, flow.dropped_pkts, flow.first_seen,
                                flow.last_seen});
    }
    std::sort(report.flows.begin(), report.flows.end(), [](const FlowRow& a, const FlowRow& b) {
        return std::tie(a.subscriber, a.first_seen, a.key) < std::tie(b.subscriber, b.first_seen, b.key);
    });

    report.subscribers.clear();
    report.heavy_users.clear();
    report.signaling_overload.clear();
    for (const auto& [ip, stats] : router.subscribers()) {
        SubscriberRow row{ip, {}, stats.prioritized_packets, stats.heavy_user, stats.signaling_overload};
        for (const auto& [app, c] : stats.apps) row.apps[app] = {c.bytes, c.packets, c.flows};
        report.subscribers.push_back(std::move(row));
        if (stats.heavy_user) report.heavy_users.push_back(ip.to_string());
        if (stats.signaling_overload) report.signaling_overload.push_back(ip.to_string());
    }
    report.totals = sum_rows(report.flows);
}

}  // namespace fleet::driver
