#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fleet/device/device.hpp"
#include "fleet/dhcp/lease.hpp"
#include "fleet/dhcp/server.hpp"
#include "fleet/dpi/gateway.hpp"
#include "fleet/driver/driver.hpp"
#include "fleet/driver/report.hpp"
#include "fleet/driver/scenario.hpp"

namespace fleet::driver {

struct DeviceTimeline {
    std::uint32_t index = 0;
    net::MacAddr mac;
    std::optional<Ipv4Addr> ip;
    std::optional<SimTime> online_at;
    std::optional<SimTime> session_at;
    std::vector<device::ActivityRecord> activities;
};

// Everything a run leaves behind. The report is the canonical part; the rest
// is for inspection and tests.
struct RunOutcome {
    RunReport report;
    std::vector<LogLine> host_log;
    std::vector<std::string> device_list;
    std::vector<DeviceTimeline> devices;
    std::vector<Launch> launches;
    // Device-oriented key of every connection a model opened.
    std::map<dpi::FlowKey, apps::ModelId> ground_truth;
    std::vector<dhcp::Lease> leases;
    std::uint64_t events_dispatched = 0;
};

// The whole test bed wired on one clock: LAN fabric, the host VM (dhcpd and
// driver at one address), the devices, the gateway router and the cloud.
class Testbed {
public:
    // Validates the scenario; throws ConfigError before anything is built.
    explicit Testbed(const Scenario& scenario);
    ~Testbed();

    Testbed(const Testbed&) = delete;
    Testbed& operator=(const Testbed&) = delete;

    // Schedules the staggered boots and the driver's first poll.
    void start();
    // Runs to duration_ms and collects the outcome.
    RunOutcome finish();

    const Scenario& scenario() const { return scenario_; }
    const std::filesystem::path& leases_path() const { return leases_path_; }
    net::SimClock& clock() { return clock_; }
    net::Fabric& fabric() { return fabric_; }
    net::MacDirectory& directory() { return directory_; }
    dhcp::DhcpServer& server() { return server_; }
    dpi::Router& router() { return router_; }
    dpi::CloudEdge& cloud() { return cloud_; }
    Driver& driver() { return driver_; }
    device::Device& device(std::size_t i) { return *devices_.at(i); }
    std::size_t device_count() const { return devices_.size(); }

private:
    void on_host_frame(const net::Frame& frame);

    Scenario scenario_;
    std::filesystem::path leases_path_;
    bool scratch_leases_;
    net::SimClock clock_;
    net::Fabric fabric_;
    net::PointLink uplink_;
    net::MacDirectory directory_;
    std::uint64_t digest_;
    dhcp::DhcpServer server_;
    dpi::Router router_;
    dpi::Gateway gateway_;
    dpi::CloudEdge cloud_;
    net::PortId host_port_ = 0;
    Driver driver_;
    std::vector<std::unique_ptr<device::Device>> devices_;
};

// Validates, builds the test bed, runs it to duration_ms and reports.
// Throws ConfigError before any simulation step when the scenario is invalid.
RunOutcome run_scenario(const Scenario& scenario);

}  // namespace fleet::driver
