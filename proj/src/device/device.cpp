#include "fleet/device/device.hpp"

#include <algorithm>

#include "fleet/apps/rng.hpp"
#include "fleet/error.hpp"

namespace fleet::device {

namespace {

constexpr std::uint16_t kFirstEphemeralPort = 40000;
constexpr std::uint16_t kLastEphemeralPort = 60999;

net::Bytes to_bytes(std::string_view text)
{
    return net::Bytes(text.begin(), text.end());
}

std::string describe(const Intent& intent)
{
    std::string out = "Starting: Intent {";
    if (intent.action) out += " act=" + *intent.action;
    if (intent.component) out += " cmp=" + intent.component->first + "/" + intent.component->second;
    for (const auto& [k, v] : intent.extras) out += " " + k + "=" + v;
    return out + " }";
}

}  // namespace

std::string_view to_string(BootState state)
{
    switch (state) {
    case BootState::powered_off: return "PoweredOff";
    case BootState::discovering: return "Discovering";
    case BootState::requesting: return "Requesting";
    case BootState::online: return "Online";
    }
    return "PoweredOff";
}

Device::Device(DeviceConfig config, net::SimClock& clock, net::Fabric& fabric, net::MacDirectory& directory,
               CloudInjector cloud)
    : config_(config), clock_(clock), fabric_(fabric), directory_(directory), cloud_(std::move(cloud)),
      next_port_(kFirstEphemeralPort)
{
    port_ = fabric_.attach(config_.mac, [this](const net::Frame& frame) { on_frame(frame); });
}

void Device::boot()
{
    if (state_ != BootState::powered_off)
        throw PreconditionViolated("device " + std::to_string(config_.index) + " is already booting or online");
    ++boot_generation_;
    xid_ = static_cast<std::uint32_t>(apps::splitmix64((std::uint64_t{config_.index} << 16) ^ boot_generation_));
    state_ = BootState::discovering;
    send_discover();
    boot_timer_ = clock_.schedule_in(kDiscoverInterval, [this] { on_boot_timer(2); });
}

void Device::on_boot_timer(int attempt)
{
    boot_timer_.reset();
    if (state_ == BootState::online) return;
    if (attempt > kDiscoverAttempts) {
        state_ = BootState::powered_off;
        events_.push_back({DeviceEvent::Kind::boot_failed, clock_.now(), config_.mac.to_string()});
        return;
    }
    state_ = BootState::discovering;
    send_discover();
    boot_timer_ = clock_.schedule_in(kDiscoverInterval, [this, attempt] { on_boot_timer(attempt + 1); });
}

void Device::send_discover()
{
    const auto msg = dhcp::make_client_message(dhcp::MessageType::discover, xid_, config_.mac);
    auto packet = net::make_udp(Ipv4Addr::any(), dhcp::kClientPort, Ipv4Addr::broadcast(), dhcp::kServerPort,
                                dhcp::encode_dhcp(msg));
    send_ip(MacAddr::broadcast(), std::move(packet));
}

void Device::on_dhcp(const dhcp::DhcpMessage& msg)
{
    if (msg.op != dhcp::kOpReply || msg.xid != xid_ || msg.chaddr != config_.mac) return;
    const auto type = msg.type();
    if (type == dhcp::MessageType::offer && state_ == BootState::discovering) {
        auto request = dhcp::make_client_message(dhcp::MessageType::request, xid_, config_.mac);
        request.add_ip(dhcp::option::requested_ip, msg.yiaddr);
        if (const auto server = msg.ip_option(dhcp::option::server_id))
            request.add_ip(dhcp::option::server_id, *server);
        state_ = BootState::requesting;
        send_ip(MacAddr::broadcast(), net::make_udp(Ipv4Addr::any(), dhcp::kClientPort, Ipv4Addr::broadcast(),
                                                    dhcp::kServerPort, dhcp::encode_dhcp(request)));
    } else if (type == dhcp::MessageType::ack && state_ == BootState::requesting) {
        ip_ = msg.yiaddr;
        gateway_ = msg.ip_option(dhcp::option::router);
        state_ = BootState::online;
        if (boot_timer_) clock_.cancel(*boot_timer_);
        boot_timer_.reset();
        directory_.publish(*ip_, config_.mac);
        events_.push_back({DeviceEvent::Kind::online, clock_.now(), ip_->to_string()});
    } else if (type == dhcp::MessageType::nak && state_ == BootState::requesting) {
        state_ = BootState::discovering;
        send_discover();
    }
}

void Device::on_frame(const net::Frame& frame)
{
    if (frame.dst != config_.mac && !frame.dst.is_broadcast()) return;
    if (frame.ethertype != net::kEtherTypeIpv4) return;
    net::Packet packet;
    try {
        packet = net::decode_packet(frame.payload);
    } catch (const Error&) {
        return;
    }

    if (packet.is_udp() && packet.dst_port() == dhcp::kClientPort && packet.src_port() == dhcp::kServerPort) {
        try {
            on_dhcp(dhcp::decode_dhcp(packet.payload()));
        } catch (const Error&) {
        }
        return;
    }
    if (state_ != BootState::online || packet.ip.dst != *ip_) return;
    ++packets_received_;
    if (packet.is_tcp()) on_tcp(packet, frame.src);
}

void Device::on_tcp(const net::Packet& packet, const MacAddr& peer_mac)
{
    using namespace net::tcp_flags;
    const auto& seg = packet.tcp();
    const bool bare_syn = seg.has(syn) && !seg.has(ack);
    const std::pair peer{packet.ip.src, seg.src_port};

    if (seg.dst_port != kControlPort) {
        // Nothing else listens; app downlink traffic never carries a bare SYN.
        if (bare_syn) {
            Session closed{peer_mac, 0, seg.seq + 1, {}};
            send_segment(closed, peer.first, peer.second, rst | ack, {});
        }
        return;
    }

    if (bare_syn) {
        auto& session = sessions_[peer];
        session = Session{peer_mac, static_cast<std::uint32_t>(apps::splitmix64(seg.seq)), seg.seq + 1, {}};
        send_segment(session, peer.first, peer.second, syn | ack, {});
        session.seq += 1;
        return;
    }

    const auto it = sessions_.find(peer);
    if (it == sessions_.end()) {
        if (!seg.has(rst)) {
            Session stray{peer_mac, seg.ack, seg.seq, {}};
            send_segment(stray, peer.first, peer.second, rst, {});
        }
        return;
    }
    if (seg.has(rst)) {
        sessions_.erase(it);
        return;
    }

    auto& session = it->second;
    if (!seg.payload.empty()) {
        session.ack += static_cast<std::uint32_t>(seg.payload.size());
        session.reader.feed(seg.payload);
        while (auto command = session.reader.next()) reply(peer, handle_control_line(command->line, command->payload));
    }
    if (seg.has(fin)) {
        auto& s = sessions_.at(peer);
        s.ack += 1;
        send_segment(s, peer.first, peer.second, fin | ack, {});
        sessions_.erase(peer);
    }
}

void Device::reply(std::pair<Ipv4Addr, std::uint16_t> peer, const ControlReply& reply)
{
    const auto it = sessions_.find(peer);
    if (it == sessions_.end()) return;
    const auto text = reply.wire();
    for (std::size_t off = 0; off < text.size(); off += kSegmentBytes) {
        const auto chunk = std::string_view(text).substr(off, kSegmentBytes);
        send_segment(it->second, peer.first, peer.second, net::tcp_flags::psh | net::tcp_flags::ack, chunk);
        it->second.seq += static_cast<std::uint32_t>(chunk.size());
    }
}

void Device::send_segment(const Session& session, Ipv4Addr peer_ip, std::uint16_t peer_port, std::uint8_t flags,
                          std::string_view data)
{
    auto packet = net::make_tcp(*ip_, kControlPort, peer_ip, peer_port, flags, session.seq, to_bytes(data));
    std::get<net::TcpSegment>(packet.l4).ack = session.ack;
    send_ip(session.peer_mac, std::move(packet));
}

void Device::send_ip(const MacAddr& dst, net::Packet packet)
{
    packet.ip.id = ip_id_++;
    fabric_.transmit(port_, net::make_ipv4_frame(config_.mac, dst, packet));
}

ControlReply Device::handle_control_line(std::string_view line, const std::string& payload)
{
    if (state_ != BootState::online) return ControlReply::failure("device offline");
    const auto words = split_words(line);
    try {
        if (words.size() >= 2 && words[0] == "shell" && words[1] == "am") return cmd_am(words);
        if (words.size() >= 2 && words[0] == "shell" && words[1] == "pm") return cmd_pm(words);
        if (!words.empty() && words[0] == "install") return cmd_install(line, payload);
    } catch (const Error& e) {
        return ControlReply::failure(std::string("error: ") + e.what());
    }
    return ControlReply::failure("unknown command");
}

ControlReply Device::cmd_am(const std::vector<std::string>& words)
{
    if (words.size() >= 3 && words[2] == "start") {
        Intent intent;
        for (std::size_t i = 3; i < words.size(); ++i) {
            const auto& flag = words[i];
            if (flag == "-a" && i + 1 < words.size()) {
                intent.action = words[++i];
            } else if (flag == "-n" && i + 1 < words.size()) {
                const auto& cmp = words[++i];
                const auto slash = cmp.find('/');
                if (slash == std::string::npos || slash == 0 || slash + 1 == cmp.size())
                    return ControlReply::failure("bad component");
                intent.component = {cmp.substr(0, slash), cmp.substr(slash + 1)};
            } else if ((flag == "-e" || flag == "--es") && i + 2 < words.size()) {
                intent.extras[words[i + 1]] = words[i + 2];
                i += 2;
            } else {
                return ControlReply::failure("bad arguments");
            }
        }
        if (!intent.action && !intent.component) return ControlReply::failure("bad arguments");
        try {
            start_intent(intent);
        } catch (const NoActivityForIntent&) {
            return ControlReply::failure(intent.component ? "no activity for component" : "no activity for action");
        }
        return ControlReply::success({describe(intent)});
    }
    if (words.size() == 4 && words[2] == "force-stop") {
        force_stop(words[3]);
        return ControlReply::success();
    }
    return ControlReply::failure("unknown command");
}

ControlReply Device::cmd_pm(const std::vector<std::string>& words)
{
    if (words.size() >= 4 && words.size() <= 5 && words[2] == "list" && words[3] == "packages") {
        const bool files = words.size() == 5;
        if (files && words[4] != "-f") return ControlReply::failure("bad arguments");
        std::vector<std::string> body;
        for (const auto& m : packages_)
            body.push_back(files ? "package:/data/app/" + m.apk_name + "=" + m.package : "package:" + m.package);
        return ControlReply::success(std::move(body));
    }
    if (words.size() == 4 && words[2] == "uninstall") {
        return uninstall(words[3]) ? ControlReply::success() : ControlReply::failure("not installed");
    }
    return ControlReply::failure("unknown command");
}

ControlReply Device::cmd_install(std::string_view line, const std::string& payload)
{
    const auto header = parse_install_header(line);
    if (!header) return ControlReply::failure("bad arguments");
    if (header->bytes > kMaxInstallBytes) return ControlReply::failure("install too large");
    if (payload.size() != header->bytes) return ControlReply::failure("invalid manifest");
    AppManifest manifest;
    try {
        manifest = parse_manifest(payload);
    } catch (const ConfigError&) {
        return ControlReply::failure("invalid manifest");
    }
    if (manifest.apk_name != header->apk_name) return ControlReply::failure("invalid manifest");
    install(std::move(manifest));
    return ControlReply::success();
}

void Device::install(AppManifest manifest)
{
    const auto it = std::find_if(packages_.begin(), packages_.end(),
                                 [&](const AppManifest& m) { return m.package == manifest.package; });
    if (it == packages_.end()) {
        packages_.push_back(std::move(manifest));
        return;
    }
    force_stop(it->package);
    *it = std::move(manifest);
}

bool Device::uninstall(std::string_view package)
{
    const auto it = std::find_if(packages_.begin(), packages_.end(),
                                 [&](const AppManifest& m) { return m.package == package; });
    if (it == packages_.end()) return false;
    force_stop(package);
    packages_.erase(it);
    return true;
}

const ActivityRecord& Device::start_intent(const Intent& intent)
{
    if (state_ != BootState::online) throw PreconditionViolated("device is not online");
    if (!intent.action && !intent.component) throw PreconditionViolated("intent names neither action nor component");

    const AppManifest* target = nullptr;
    const Activity* activity = nullptr;
    if (intent.component) {
        for (const auto& m : packages_)
            if (m.package == intent.component->first) {
                target = &m;
                activity = m.find_activity(intent.component->second);
            }
        if (!activity) throw NoActivityForIntent(intent.component->first + "/" + intent.component->second);
    } else {
        for (const auto& m : packages_) {
            for (const auto& a : m.activities)
                if (std::find(a.actions.begin(), a.actions.end(), *intent.action) != a.actions.end()) {
                    target = &m;
                    activity = &a;
                    break;
                }
            if (activity) break;
        }
        if (!activity) throw NoActivityForIntent(*intent.action);
    }

    stop_running();
    const auto seed = apps::derive_seed(config_.scenario_seed, config_.index, target->package);
    activities_.push_back(ActivityRecord{target->package, activity->name, apps::model_of(target->model), seed,
                                         clock_.now(), std::nullopt, {}});
    running_.emplace(Running{activities_.size() - 1, apps::spawn(target->model, seed, clock_.now()), {}, {}});
    events_.push_back({DeviceEvent::Kind::activity_started, clock_.now(), target->package + "/" + activity->name});
    schedule_wake();
    return activities_.back();
}

void Device::force_stop(std::string_view package)
{
    if (running_ && activities_[running_->record].package == package) stop_running();
}

const ActivityRecord* Device::running() const
{
    return running_ ? &activities_[running_->record] : nullptr;
}

void Device::stop_running()
{
    if (!running_) return;
    if (running_->wake) clock_.cancel(*running_->wake);
    auto& record = activities_[running_->record];
    record.stopped = clock_.now();
    events_.push_back({DeviceEvent::Kind::activity_stopped, clock_.now(), record.package + "/" + record.activity});
    running_.reset();
}

void Device::schedule_wake()
{
    running_->wake.reset();
    if (running_->model->done()) return;
    const auto at = std::max(*running_->model->next_wake(), clock_.now());
    running_->wake = clock_.schedule(at, [this] { on_wake(); });
}

std::uint16_t Device::port_for(std::uint32_t conn, const apps::Emission& e)
{
    auto& ports = running_->ports;
    if (const auto it = ports.find(conn); it != ports.end()) return it->second;
    const auto port = next_port_;
    next_port_ = next_port_ == kLastEphemeralPort ? kFirstEphemeralPort : static_cast<std::uint16_t>(next_port_ + 1);
    ports.emplace(conn, port);
    activities_[running_->record].conns.push_back(ConnRecord{e.proto, port, e.remote_ip, e.remote_port});
    return port;
}

void Device::on_wake()
{
    running_->wake.reset();
    const auto batch = running_->model->next_events(clock_.now());
    for (const auto& e : batch.packets) {
        const auto local = port_for(e.conn, e);
        const bool up = e.dir == apps::Direction::up;
        const auto src = up ? *ip_ : e.remote_ip;
        const auto dst = up ? e.remote_ip : *ip_;
        const auto sport = up ? local : e.remote_port;
        const auto dport = up ? e.remote_port : local;
        net::Packet packet = e.proto == net::kProtoTcp ? net::make_tcp(src, sport, dst, dport, e.tcp_flags, e.seq, e.payload)
                                                       : net::make_udp(src, sport, dst, dport, e.payload);
        if (packet.is_tcp()) std::get<net::TcpSegment>(packet.l4).ack = e.ack;

        if (!up) {
            if (cloud_) cloud_(packet);
            continue;
        }
        const auto gateway_mac = gateway_ ? directory_.lookup(*gateway_) : std::nullopt;
        if (!gateway_mac) continue;
        ++app_packets_sent_;
        if (uplink_observer_) uplink_observer_(clock_.now(), packet);
        send_ip(*gateway_mac, std::move(packet));
    }
    schedule_wake();
}

}  // namespace fleet::device
