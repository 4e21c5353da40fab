#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fleet/apps/model.hpp"
#include "fleet/device/control.hpp"
#include "fleet/device/manifest.hpp"
#include "fleet/dhcp/message.hpp"
#include "fleet/net/fabric.hpp"

namespace fleet::device {

using net::Ipv4Addr;
using net::MacAddr;
using net::SimTime;

enum class BootState { powered_off, discovering, requesting, online };

std::string_view to_string(BootState state);

// DHCP client timing: DISCOVERs at boot, +2 s, +4 s; failure declared at +6 s.
inline constexpr int kDiscoverAttempts = 3;
inline constexpr SimTime kDiscoverInterval = 2000;

struct DeviceConfig {
    std::uint32_t index = 0;
    MacAddr mac;
    std::uint64_t scenario_seed = 0;
};

struct DeviceEvent {
    enum class Kind { boot_failed, online, activity_started, activity_stopped };
    Kind kind;
    SimTime time;
    std::string detail;  // ip for online, package/activity otherwise
};

// One connection an activity's model opened, as seen from the device.
struct ConnRecord {
    std::uint8_t proto = 0;
    std::uint16_t local_port = 0;
    Ipv4Addr remote_ip;
    std::uint16_t remote_port = 0;
};

struct ActivityRecord {
    std::string package;
    std::string activity;
    apps::ModelId model;
    std::uint64_t seed = 0;
    SimTime started = 0;
    std::optional<SimTime> stopped;
    std::vector<ConnRecord> conns;
};

class Device {
public:
    // Delivers a model's server-side packet at the cloud end of the uplink.
    using CloudInjector = std::function<void(const net::Packet&)>;
    using PacketObserver = std::function<void(SimTime, const net::Packet&)>;

    Device(DeviceConfig config, net::SimClock& clock, net::Fabric& fabric, net::MacDirectory& directory,
           CloudInjector cloud);

    Device(const Device&) = delete;
    Device& operator=(const Device&) = delete;

    // Starts DORA. Throws PreconditionViolated unless powered off.
    void boot();

    std::uint32_t index() const { return config_.index; }
    const MacAddr& mac() const { return config_.mac; }
    BootState state() const { return state_; }
    const std::optional<Ipv4Addr>& ip() const { return ip_; }
    const std::optional<Ipv4Addr>& gateway() const { return gateway_; }

    // One control command; always ends in exactly one terminator.
    ControlReply handle_control_line(std::string_view line, const std::string& payload = {});

    // Adds or replaces (keeping install position).
    void install(AppManifest manifest);
    // False when the package was not installed.
    bool uninstall(std::string_view package);
    const std::vector<AppManifest>& packages() const { return packages_; }

    // Resolves and starts an activity, stopping whatever ran before. Throws
    // PreconditionViolated for an empty intent or an offline device and
    // NoActivityForIntent when nothing resolves.
    const ActivityRecord& start_intent(const Intent& intent);
    // Idempotent; a package that is not running is left alone.
    void force_stop(std::string_view package);
    const ActivityRecord* running() const;

    const std::vector<DeviceEvent>& events() const { return events_; }
    const std::vector<ActivityRecord>& activity_log() const { return activities_; }

    // Every packet the device puts on the LAN (control and DHCP excluded).
    void set_uplink_observer(PacketObserver observer) { uplink_observer_ = std::move(observer); }
    std::uint64_t packets_received() const { return packets_received_; }
    std::uint64_t app_packets_sent() const { return app_packets_sent_; }

private:
    struct Session {
        MacAddr peer_mac;
        std::uint32_t seq = 0;
        std::uint32_t ack = 0;
        CommandReader reader;
    };
    struct Running {
        std::size_t record;
        std::unique_ptr<apps::TrafficModel> model;
        std::map<std::uint32_t, std::uint16_t> ports;  // model conn -> local port
        std::optional<net::EventId> wake;
    };

    void on_frame(const net::Frame& frame);
    void on_dhcp(const dhcp::DhcpMessage& msg);
    void send_discover();
    void on_boot_timer(int attempt);
    void on_tcp(const net::Packet& packet, const MacAddr& peer_mac);
    void send_segment(const Session& session, Ipv4Addr peer_ip, std::uint16_t peer_port, std::uint8_t flags,
                      std::string_view data);
    void reply(std::pair<Ipv4Addr, std::uint16_t> peer, const ControlReply& reply);

    ControlReply cmd_am(const std::vector<std::string>& words);
    ControlReply cmd_pm(const std::vector<std::string>& words);
    ControlReply cmd_install(std::string_view line, const std::string& payload);

    void schedule_wake();
    void on_wake();
    std::uint16_t port_for(std::uint32_t conn, const apps::Emission& e);
    void stop_running();
    void send_ip(const MacAddr& dst, net::Packet packet);

    DeviceConfig config_;
    net::SimClock& clock_;
    net::Fabric& fabric_;
    net::MacDirectory& directory_;
    CloudInjector cloud_;
    net::PortId port_;

    BootState state_ = BootState::powered_off;
    std::optional<Ipv4Addr> ip_;
    std::optional<Ipv4Addr> gateway_;
    std::uint32_t xid_ = 0;
    std::uint32_t boot_generation_ = 0;
    std::optional<net::EventId> boot_timer_;

    std::vector<AppManifest> packages_;
    std::optional<Running> running_;
    std::vector<ActivityRecord> activities_;
    std::vector<DeviceEvent> events_;
    std::map<std::pair<Ipv4Addr, std::uint16_t>, Session> sessions_;

    std::uint16_t next_port_;
    std::uint16_t ip_id_ = 0;
    PacketObserver uplink_observer_;
    std::uint64_t packets_received_ = 0;
    std::uint64_t app_packets_sent_ = 0;
};

}  // namespace fleet::device
