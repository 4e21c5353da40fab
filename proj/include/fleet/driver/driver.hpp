#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "fleet/device/manifest.hpp"
#include "fleet/driver/control_client.hpp"

namespace fleet::driver {

struct DriverConfig {
    std::filesystem::path leases_file;
    std::vector<device::AppManifest> apps;
    SimTime poll_interval_ms = 1000;
    SimTime intent_delay_ms = 5000;
    // Nothing is launched at or after this time.
    SimTime end_ms = 0;
    SimTime connect_timeout_ms = 500;
};

struct LogLine {
    enum class Level { info, warn, trace };
    SimTime time;
    Level level;
    std::string text;

    bool operator==(const LogLine&) const = default;
};

std::string format_log_line(const LogLine& line);

// A launch the appmanager sent, with the device's verdict.
struct Launch {
    Ipv4Addr ip;
    SimTime time;
    std::string package;
    bool ok = false;
};

// One control session plus its appmanager cursor.
struct Session {
    Ipv4Addr ip;
    std::unique_ptr<ControlClient> client;
    std::optional<SimTime> connected_at;
    std::optional<SimTime> ready_at;  // apps installed, cycle started
    std::size_t next_app = 0;
    std::optional<std::string> running;
};

// The host-side test driver: finds devices in the leases file, connects to
// their control port, installs the scenario's apps and cycles through them.
class Driver {
public:
    Driver(DriverConfig config, net::SimClock& clock, const net::MacDirectory& directory,
           ControlClient::Sender send, Ipv4Addr local_ip);

    Driver(const Driver&) = delete;
    Driver& operator=(const Driver&) = delete;

    // Polls now and every poll_interval_ms after.
    void start();

    // Active-lease ips not seen before. Throws LeaseFileCorrupt.
    std::vector<Ipv4Addr> poll_leases();

    // Opens (or returns) the session for ip. Throws ConnectRefused when no
    // host answers for the address.
    Session& connect(Ipv4Addr ip);

    // `<ip>:5555\tdevice` per connected session, in connection order.
    std::vector<std::string> list_devices() const;

    void on_segment(const net::Packet& packet);

    const std::set<Ipv4Addr>& known() const { return known_; }
    const Session* session(Ipv4Addr ip) const;
    const std::vector<LogLine>& log() const { return log_; }
    const std::vector<Launch>& launches() const { return launches_; }
    std::uint64_t polls() const { return polls_; }

private:
    void tick();
    void note(LogLine::Level level, std::string text);
    void on_connected(Session& s);
    void on_refused(Ipv4Addr ip, std::string_view why);
    void install_missing(Session& s, const device::ControlReply& listing);
    void launch(Session& s, SimTime at);

    DriverConfig config_;
    net::SimClock& clock_;
    const net::MacDirectory& directory_;
    ControlClient::Sender send_;
    Ipv4Addr local_ip_;

    std::set<Ipv4Addr> known_;
    std::set<Ipv4Addr> retry_;
    std::map<Ipv4Addr, Session> sessions_;
    std::map<std::uint16_t, Ipv4Addr> by_port_;
    std::vector<Ipv4Addr> connect_order_;
    std::uint16_t next_port_ = 33000;
    std::uint64_t polls_ = 0;
    std::vector<LogLine> log_;
    std::vector<Launch> launches_;
};

}  // namespace fleet::driver
