#include "fleet/driver/simulation.hpp"

#include <atomic>
#include <cstdio>

#include <unistd.h>

#include "fleet/apps/rng.hpp"
#include "fleet/error.hpp"

namespace fleet::driver {

namespace {

constexpr std::uint64_t kFnvBasis = 0xcbf29ce484222325ULL;

std::filesystem::path private_leases_path()
{
    static std::atomic<std::uint64_t> counter{0};
    return std::filesystem::temp_directory_path() /
           ("fleet-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) + ".leases");
}

const Scenario& validated(const Scenario& scenario)
{
    scenario.validate();
    return scenario;
}

// A run always starts from an empty leases file.
std::filesystem::path cleared(std::filesystem::path path)
{
    std::filesystem::remove(path);
    return path;
}

std::string hex64(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace

Testbed::Testbed(const Scenario& scenario)
    : scenario_(validated(scenario)),
      leases_path_(cleared(scenario.leases_file.value_or(private_leases_path()))),
      scratch_leases_(!scenario.leases_file),
      fabric_(clock_),
      uplink_(clock_),
      digest_(kFnvBasis),
      server_(scenario.pool, kHostIp, leases_path_),
      router_(scenario.signatures, scenario.policies, dpi::RouterConfig{.anomaly = scenario.anomaly}),
      gateway_(clock_, fabric_, uplink_, directory_, router_, kGatewayMac, scenario.pool.router),
      cloud_(clock_, uplink_, kGatewayMac),
      driver_(DriverConfig{leases_path_, scenario.apps, scenario.poll_interval_ms, scenario.intent_delay_ms,
                           scenario.duration_ms},
              clock_, directory_,
              [this](const net::MacAddr& mac, net::Packet packet) {
                  fabric_.transmit(host_port_, net::make_ipv4_frame(kHostMac, mac, packet));
              },
              kHostIp)
{
    auto record = [this](const net::FrameRecord& r) {
        digest_ = apps::fnv1a64(net::format_frame_record(r), digest_);
        digest_ = apps::fnv1a64("\n", digest_);
    };
    fabric_.set_observer(record);
    uplink_.set_observer(record);

    directory_.publish(scenario_.pool.router, kGatewayMac);
    host_port_ = fabric_.attach(kHostMac, [this](const net::Frame& frame) { on_host_frame(frame); });
    directory_.publish(kHostIp, kHostMac);

    for (std::uint32_t i = 0; i < scenario_.device_count; ++i)
        devices_.push_back(std::make_unique<device::Device>(
            device::DeviceConfig{i, net::MacAddr::local(static_cast<std::uint16_t>(i)), scenario_.seed}, clock_,
            fabric_, directory_, [this](const net::Packet& p) { cloud_.inject(p); }));
}

Testbed::~Testbed()
{
    if (!scratch_leases_) return;
    std::error_code ec;
    std::filesystem::remove(leases_path_, ec);
}

void Testbed::on_host_frame(const net::Frame& frame)
{
    if (frame.dst != kHostMac && !frame.dst.is_broadcast()) return;
    if (frame.ethertype != net::kEtherTypeIpv4) return;
    net::Packet packet;
    try {
        packet = net::decode_packet(frame.payload);
    } catch (const Error&) {
        return;
    }
    if (packet.is_udp() && packet.dst_port() == dhcp::kServerPort) {
        std::optional<dhcp::DhcpMessage> reply;
        try {
            reply = server_.handle_message(dhcp::decode_dhcp(packet.payload()), clock_.now());
        } catch (const Error&) {
            return;
        }
        if (reply) fabric_.transmit(host_port_, dhcp::reply_frame(*reply, kHostIp, kHostMac));
        return;
    }
    if (packet.is_tcp() && packet.ip.dst == kHostIp) driver_.on_segment(packet);
}

void Testbed::start()
{
    for (std::size_t i = 0; i < devices_.size(); ++i) {
        auto* d = devices_[i].get();
        clock_.schedule(static_cast<SimTime>(i) * scenario_.boot_stagger_ms, [d] { d->boot(); });
    }
    driver_.start();
}

RunOutcome Testbed::finish()
{
    clock_.run_until(scenario_.duration_ms);
    router_.scan_anomalies(scenario_.duration_ms);

    RunOutcome out;
    auto& report = out.report;
    report.seed = scenario_.seed;
    report.device_count = scenario_.device_count;
    report.duration_ms = scenario_.duration_ms;
    fill_from_router(report, router_);
    report.trace_digest = hex64(digest_);

    for (const auto& d : devices_) {
        DeviceTimeline t{d->index(), d->mac(), d->ip(), {}, {}, d->activity_log()};
        for (const auto& e : d->events())
            if (e.kind == device::DeviceEvent::Kind::online && !t.online_at) t.online_at = e.time;
        if (d->state() == device::BootState::online) ++report.devices_online;
        if (t.ip) {
            if (const auto* s = driver_.session(*t.ip)) t.session_at = s->connected_at;
            for (const auto& a : t.activities)
                for (const auto& c : a.conns)
                    out.ground_truth[{*t.ip, c.remote_ip, c.local_port, c.remote_port, c.proto}] = a.model;
        }
        out.devices.push_back(std::move(t));
    }
    out.device_list = driver_.list_devices();
    report.sessions = static_cast<std::uint32_t>(out.device_list.size());
    out.host_log = driver_.log();
    out.launches = driver_.launches();
    out.leases = server_.leases();
    out.events_dispatched = clock_.dispatched();
    return out;
}

RunOutcome run_scenario(const Scenario& scenario)
{
    Testbed bed(scenario);
    bed.start();
    return bed.finish();
}

}  // namespace fleet::driver
