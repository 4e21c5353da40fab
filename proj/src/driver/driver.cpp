#include "fleet/driver/driver.hpp"

#include <algorithm>

#include "fleet/dhcp/lease.hpp"
#include "fleet/error.hpp"

namespace fleet::driver {

namespace {

std::string_view level_name(LogLine::Level level)
{
    switch (level) {
    case LogLine::Level::info: return "info";
    case LogLine::Level::warn: return "warn";
    case LogLine::Level::trace: return "trace";
    }
    return "?";
}

std::string endpoint(Ipv4Addr ip)
{
    return ip.to_string() + ":" + std::to_string(device::kControlPort);
}

}  // namespace

std::string format_log_line(const LogLine& line)
{
    return std::to_string(line.time) + "\t" + std::string(level_name(line.level)) + "\t" + line.text;
}

Driver::Driver(DriverConfig config, net::SimClock& clock, const net::MacDirectory& directory,
               ControlClient::Sender send, Ipv4Addr local_ip)
    : config_(std::move(config)), clock_(clock), directory_(directory), send_(std::move(send)), local_ip_(local_ip)
{
    if (config_.poll_interval_ms <= 0) throw ConfigError("poll_interval_ms", "must be positive");
    if (config_.intent_delay_ms <= 0) throw ConfigError("intent_delay_ms", "must be positive");
}

void Driver::note(LogLine::Level level, std::string text)
{
    log_.push_back({clock_.now(), level, std::move(text)});
}

void Driver::start()
{
    clock_.schedule(clock_.now(), [this] { tick(); });
}

std::vector<Ipv4Addr> Driver::poll_leases()
{
    const auto leases = dhcp::parse_leases(config_.leases_file);
    std::set<Ipv4Addr> active;
    std::vector<Ipv4Addr> fresh;
    for (const auto& lease : leases) {
        if (lease.state != dhcp::BindingState::active) continue;
        if (!active.insert(lease.ip).second) continue;
        if (!known_.contains(lease.ip)) fresh.push_back(lease.ip);
    }
    known_ = std::move(active);
    return fresh;
}

void Driver::tick()
{
    ++polls_;
    std::vector<Ipv4Addr> targets;
    try {
        targets = poll_leases();
    } catch (const dhcp::LeaseFileCorrupt& e) {
        note(LogLine::Level::warn, std::string("leases file unreadable, poll skipped: ") + e.what());
    }
    for (const auto& ip : retry_)
        if (known_.contains(ip) && std::find(targets.begin(), targets.end(), ip) == targets.end())
            targets.push_back(ip);
    retry_.clear();

    for (const auto& ip : targets) {
        note(LogLine::Level::trace, "lease seen for " + ip.to_string());
        try {
            connect(ip);
        } catch (const ConnectRefused& e) {
            on_refused(ip, e.what());
        }
    }

    const auto next = clock_.now() + config_.poll_interval_ms;
    if (next < config_.end_ms) clock_.schedule(next, [this] { tick(); });
}

Session& Driver::connect(Ipv4Addr ip)
{
    auto it = sessions_.find(ip);
    if (it != sessions_.end() && it->second.client && it->second.client->state() != ControlClient::State::closed)
        return it->second;

    const auto mac = directory_.lookup(ip);
    if (!mac) throw ConnectRefused("no host at " + endpoint(ip));

    auto& s = sessions_[ip];
    s.ip = ip;
    const auto port = next_port_++;
    if (next_port_ < 33000) next_port_ = 33000;
    by_port_[port] = ip;
    s.client = std::make_unique<ControlClient>(
        clock_, send_, local_ip_, port, ip, *mac, config_.connect_timeout_ms,
        ControlClient::Callbacks{[this, ip] { on_connected(sessions_.at(ip)); },
                                 [this, ip](std::string_view why) { on_refused(ip, why); }});
    note(LogLine::Level::trace, "connecting to " + endpoint(ip));
    s.client->open();
    return s;
}

void Driver::on_refused(Ipv4Addr ip, std::string_view why)
{
    note(LogLine::Level::warn, "connect to " + endpoint(ip) + " refused (" + std::string(why) + "), retrying");
    retry_.insert(ip);
}

void Driver::on_connected(Session& s)
{
    note(LogLine::Level::info, "connected to " + endpoint(s.ip));
    if (s.connected_at) return;  // reconnect after a reset; the cycle is already running
    s.connected_at = clock_.now();
    connect_order_.push_back(s.ip);
    const auto ip = s.ip;
    s.client->send("shell pm list packages\n", [this, ip](const device::ControlReply& reply) {
        install_missing(sessions_.at(ip), reply);
    });
}

void Driver::install_missing(Session& s, const device::ControlReply& listing)
{
    std::set<std::string> present;
    if (listing.ok())
        for (const auto& line : listing.body)
            if (line.starts_with("package:")) present.insert(line.substr(8));

    std::vector<const device::AppManifest*> missing;
    for (const auto& app : config_.apps)
        if (!present.contains(app.package)) {
            present.insert(app.package);
            missing.push_back(&app);
        }

    const auto ip = s.ip;
    auto begin_cycle = [this, ip] {
        auto& session = sessions_.at(ip);
        session.ready_at = clock_.now();
        launch(session, clock_.now());
    };
    if (missing.empty()) {
        begin_cycle();
        return;
    }
    auto remaining = std::make_shared<std::size_t>(missing.size());
    for (const auto* app : missing) {
        const auto apk = app->apk_name;
        s.client->send(device::install_request(apk, device::serialize_manifest(*app)),
                       [this, ip, apk, remaining, begin_cycle](const device::ControlReply& reply) {
                           if (reply.ok())
                               note(LogLine::Level::info, "installed " + apk + " on " + ip.to_string());
                           else
                               note(LogLine::Level::warn,
                                    "install " + apk + " on " + ip.to_string() + ": " + reply.terminator);
                           if (--*remaining == 0) begin_cycle();
                       });
    }
}

void Driver::launch(Session& s, SimTime at)
{
    if (config_.apps.empty() || at >= config_.end_ms) return;
    const auto& app = config_.apps[s.next_app % config_.apps.size()];
    ++s.next_app;
    const auto ip = s.ip;

    if (s.running) s.client->send("shell am force-stop " + *s.running + "\n", {});
    s.running = app.package;

    const auto index = launches_.size();
    launches_.push_back({ip, at, app.package, false});
    const auto pkg = app.package;
    s.client->send("shell am start -n " + app.package + "/" + app.launch_activity + "\n",
                   [this, index, ip, pkg](const device::ControlReply& reply) {
                       launches_[index].ok = reply.ok();
                       if (reply.ok())
                           note(LogLine::Level::info, "launched " + pkg + " on " + ip.to_string());
                       else
                           note(LogLine::Level::warn,
                                "skipped " + pkg + " on " + ip.to_string() + ": " + reply.terminator);
                   });

    clock_.schedule(at + config_.intent_delay_ms, [this, ip, at] { launch(sessions_.at(ip), at + config_.intent_delay_ms); });
}

std::vector<std::string> Driver::list_devices() const
{
    std::vector<std::string> lines;
    for (const auto& ip : connect_order_) lines.push_back(endpoint(ip) + "\tdevice");
    return lines;
}

void Driver::on_segment(const net::Packet& packet)
{
    if (!packet.is_tcp() || packet.src_port() != device::kControlPort) return;
    const auto port = by_port_.find(packet.dst_port());
    if (port == by_port_.end() || port->second != packet.ip.src) return;
    auto it = sessions_.find(port->second);
    if (it == sessions_.end() || !it->second.client || it->second.client->local_port() != port->first) return;
    it->second.client->on_segment(packet);
}

const Session* Driver::session(Ipv4Addr ip) const
{
    auto it = sessions_.find(ip);
    return it == sessions_.end() ? nullptr : &it->second;
}

}  // namespace fleet::driver
