#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "fleet/apps/rng.hpp"
#include "fleet/net/addr.hpp"
#include "fleet/net/clock.hpp"
#include "fleet/net/packet.hpp"

namespace fleet::apps {

using net::Bytes;
using net::Ipv4Addr;
using net::SimTime;

enum class ModelId { voip_call, social_feed, game_burst, unknown_app };

std::optional<ModelId> parse_model_id(std::string_view text);
std::string_view to_string(ModelId id);

// Signature-bearing constants. The default signature file matches on these.
namespace wire {
// First four payload bytes of every voip relay probe; 0x02 sits at offset 2.
inline constexpr std::array<std::uint8_t, 4> kProbeMagic{0x53, 0x4b, 0x02, 0x50};
inline constexpr std::uint8_t kProbeMarker = 0x02;
inline constexpr std::size_t kProbeMarkerOffset = 2;
inline constexpr std::string_view kSocialHost = "m.social.test";
inline constexpr std::string_view kGameHost = "cdn.game.test";
inline constexpr std::uint16_t kUnknownPort = 9999;
}  // namespace wire

// A host in the cloud subnet (198.51.100.0/24), behind the router.
struct RemoteEndpoint {
    std::string label;
    Ipv4Addr ip;
    std::uint16_t port = 0;

    bool operator==(const RemoteEndpoint&) const = default;
};

struct VoipParams {
    RemoteEndpoint relay{"media relay", Ipv4Addr{{198, 51, 100, 20}}, 3478};
    std::uint32_t probe_count = 3;
    SimTime probe_gap_ms = 100;
    std::uint32_t probe_bytes = 64;
    std::uint32_t media_pps = 50;
    std::uint32_t media_bytes = 160;
    SimTime call_duration_ms = 30'000;

    bool operator==(const VoipParams&) const = default;
};

struct SocialParams {
    std::string host{wire::kSocialHost};
    RemoteEndpoint server{"feed server", Ipv4Addr{{198, 51, 100, 30}}, 443};
    SimTime think_time_ms = 5'000;
    SimTime think_jitter_ms = 1'000;
    std::uint32_t min_segments = 2;
    std::uint32_t max_segments = 6;
    std::uint32_t segment_bytes = 1'200;
    SimTime rtt_ms = 20;

    bool operator==(const SocialParams&) const = default;
};

struct GameParams {
    std::string host{wire::kGameHost};
    RemoteEndpoint cdn{"cdn host", Ipv4Addr{{198, 51, 100, 40}}, 80};
    std::uint32_t segments = 200;
    std::uint32_t segment_bytes = 1'200;
    SimTime segment_gap_ms = 5;
    SimTime rtt_ms = 20;

    bool operator==(const GameParams&) const = default;
};

struct UnknownParams {
    RemoteEndpoint peer{"peer", Ipv4Addr{{198, 51, 100, 99}}, wire::kUnknownPort};
    SimTime interval_ms = 250;
    std::uint32_t count = 40;
    std::uint32_t min_payload = 32;
    std::uint32_t max_payload = 512;

    bool operator==(const UnknownParams&) const = default;
};

using ModelParams = std::variant<VoipParams, SocialParams, GameParams, UnknownParams>;

ModelId model_of(const ModelParams& params);
ModelParams default_params(ModelId id);

// Applies `overrides` on top of the defaults. Unknown keys, wrong types and
// values that would break the MTU or the millisecond clock throw ConfigError.
ModelParams params_from_json(ModelId id, const nlohmann::json& overrides);
nlohmann::json params_to_json(const ModelParams& params);

enum class Direction { up, down };

// One packet a model wants on the wire. `conn` is a model-local connection
// index; the hosting device maps it to an ephemeral port.
struct Emission {
    Direction dir = Direction::up;
    std::uint32_t conn = 0;
    std::uint8_t proto = net::kProtoUdp;
    Ipv4Addr remote_ip;
    std::uint16_t remote_port = 0;
    std::uint8_t tcp_flags = 0;
    std::uint32_t seq = 0;
    std::uint32_t ack = 0;
    Bytes payload;

    // IPv4 datagram size once framed.
    std::size_t wire_size() const;

    bool operator==(const Emission&) const = default;
};

struct Batch {
    std::vector<Emission> packets;
    // Absent once the model is done.
    std::optional<SimTime> next_wake;
};

// Seeded phase machine standing in for an app's network behaviour.
class TrafficModel {
public:
    TrafficModel(ModelParams params, std::uint64_t seed, SimTime start);
    virtual ~TrafficModel() = default;

    TrafficModel(const TrafficModel&) = delete;
    TrafficModel& operator=(const TrafficModel&) = delete;

    ModelId id() const { return model_of(params_); }
    const ModelParams& params() const { return params_; }
    std::uint64_t seed() const { return seed_; }
    bool done();
    std::optional<SimTime> next_wake();

    // Emits every scheduled packet due at or before now. Throws ModelExhausted
    // once the model is done.
    Batch next_events(SimTime now);

    std::uint64_t packets_emitted(Direction dir) const { return packets_[dir == Direction::up ? 0 : 1]; }
    std::uint64_t bytes_emitted(Direction dir) const { return bytes_[dir == Direction::up ? 0 : 1]; }

protected:
    // Append the next phase to the script; set exhausted_ when nothing follows.
    virtual void refill() = 0;

    void push(SimTime at, Emission emission) { script_.emplace_back(at, std::move(emission)); }
    Bytes random_bytes(std::size_t n);

    ModelParams params_;
    std::uint64_t seed_;
    Rng rng_;
    SimTime cursor_;  // start time of the next phase to script
    bool exhausted_ = false;

private:
    void ensure_script();

    std::deque<std::pair<SimTime, Emission>> script_;
    std::array<std::uint64_t, 2> packets_{};
    std::array<std::uint64_t, 2> bytes_{};
};

// Throws UnknownModel for an unrecognised model name.
std::unique_ptr<TrafficModel> spawn(std::string_view model_id, const nlohmann::json& params, std::uint64_t seed,
                                    SimTime start = 0);
std::unique_ptr<TrafficModel> spawn(const ModelParams& params, std::uint64_t seed, SimTime start = 0);

}  // namespace fleet::apps
