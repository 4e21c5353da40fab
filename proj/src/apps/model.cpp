#include "fleet/apps/model.hpp"

#include <functional>
#include <map>

#include "fleet/error.hpp"
#include "fleet/net/frame.hpp"

namespace fleet::apps {

namespace {

using nlohmann::json;

constexpr std::size_t kMaxUdpPayload = net::kMtu - net::kIpv4HeaderLen - net::kUdpHeaderLen;
constexpr std::size_t kMaxTcpPayload = net::kMtu - net::kIpv4HeaderLen - net::kTcpHeaderLen;

// Strict reader for a flat params object: every key must be claimed.
class ParamReader {
public:
    explicit ParamReader(const json& object) : object_(object)
    {
        if (!object_.is_null() && !object_.is_object()) throw ConfigError("params", "must be an object");
    }

    template <typename T>
    void number(const char* key, T& out, std::int64_t lo, std::int64_t hi)
    {
        claimed_.emplace(key, true);
        if (!object_.is_object() || !object_.contains(key)) return;
        const auto& v = object_.at(key);
        if (!v.is_number_integer()) throw ConfigError(std::string("params.") + key, "must be an integer");
        const auto value = v.get<std::int64_t>();
        if (value < lo || value > hi) {
            throw ConfigError(std::string("params.") + key,
                              "must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
        }
        out = static_cast<T>(value);
    }

    void text(const char* key, std::string& out)
    {
        claimed_.emplace(key, true);
        if (!object_.is_object() || !object_.contains(key)) return;
        const auto& v = object_.at(key);
        if (!v.is_string() || v.get<std::string>().empty()) {
            throw ConfigError(std::string("params.") + key, "must be a non-empty string");
        }
        out = v.get<std::string>();
    }

    void address(const char* key, Ipv4Addr& out)
    {
        claimed_.emplace(key, true);
        if (!object_.is_object() || !object_.contains(key)) return;
        const auto& v = object_.at(key);
        auto ip = v.is_string() ? Ipv4Addr::parse(v.get<std::string>()) : std::nullopt;
        if (!ip) throw ConfigError(std::string("params.") + key, "must be a dotted-quad string");
        out = *ip;
    }

    void finish() const
    {
        if (!object_.is_object()) return;
        for (const auto& [key, value] : object_.items()) {
            if (!claimed_.contains(key)) throw ConfigError("params." + key, "unknown parameter");
        }
    }

private:
    const json& object_;
    std::map<std::string, bool, std::less<>> claimed_;
};

constexpr std::int64_t kHour = 3'600'000;

void check(bool ok, const char* field, const char* what)
{
    if (!ok) throw ConfigError(std::string("params.") + field, what);
}

std::string http_request(std::string_view path, std::string_view host, std::string_view agent)
{
    std::string req = "GET ";
    req += path;
    req += " HTTP/1.1\r\nHost: ";
    req += host;
    req += "\r\nUser-Agent: ";
    req += agent;
    req += "\r\nAccept: */*\r\n\r\n";
    return req;
}

Emission tcp_emission(Direction dir, std::uint32_t conn, const RemoteEndpoint& remote, std::uint8_t flags,
                      std::uint32_t seq, std::uint32_t ack, Bytes payload = {})
{
    Emission e;
    e.dir = dir;
    e.conn = conn;
    e.proto = net::kProtoTcp;
    e.remote_ip = remote.ip;
    e.remote_port = remote.port;
    e.tcp_flags = flags;
    e.seq = seq;
    e.ack = ack;
    e.payload = std::move(payload);
    return e;
}

Emission udp_emission(Direction dir, std::uint32_t conn, const RemoteEndpoint& remote, Bytes payload)
{
    Emission e;
    e.dir = dir;
    e.conn = conn;
    e.proto = net::kProtoUdp;
    e.remote_ip = remote.ip;
    e.remote_port = remote.port;
    e.payload = std::move(payload);
    return e;
}

Bytes to_bytes(std::string_view text)
{
    return Bytes(text.begin(), text.end());
}

// Three UDP probes carrying the relay magic, then a fixed-rate two-way media
// stream for the call duration.
class VoipCall final : public TrafficModel {
public:
    using TrafficModel::TrafficModel;

protected:
    void refill() override
    {
        const auto& p = std::get<VoipParams>(params_);
        if (probes_ < p.probe_count) {
            Bytes payload = random_bytes(p.probe_bytes);
            std::copy(wire::kProbeMagic.begin(), wire::kProbeMagic.end(), payload.begin());
            push(cursor_, udp_emission(Direction::up, 0, p.relay, std::move(payload)));
            ++probes_;
            cursor_ += p.probe_gap_ms;
            return;
        }
        const std::uint64_t ticks = static_cast<std::uint64_t>(p.call_duration_ms) * p.media_pps / 1000;
        if (tick_ >= ticks) {
            exhausted_ = true;
            return;
        }
        if (tick_ == 0) {
            ssrc_up_ = static_cast<std::uint32_t>(rng_());
            ssrc_down_ = static_cast<std::uint32_t>(rng_());
        }
        push(cursor_, udp_emission(Direction::up, 0, p.relay, media(p, ssrc_up_)));
        push(cursor_, udp_emission(Direction::down, 0, p.relay, media(p, ssrc_down_)));
        ++tick_;
        cursor_ += 1000 / p.media_pps;
    }

private:
    // RTP-shaped: version 2, PCMU, sequence, timestamp, ssrc, noise.
    Bytes media(const VoipParams& p, std::uint32_t ssrc)
    {
        Bytes b = random_bytes(p.media_bytes);
        const auto seq = static_cast<std::uint16_t>(tick_);
        const auto ts = static_cast<std::uint32_t>(tick_ * 8000 / p.media_pps);
        b[0] = 0x80;
        b[1] = 0x00;
        b[2] = static_cast<std::uint8_t>(seq >> 8);
        b[3] = static_cast<std::uint8_t>(seq);
        for (int i = 0; i < 4; ++i) {
            b[4 + i] = static_cast<std::uint8_t>(ts >> (24 - 8 * i));
            b[8 + i] = static_cast<std::uint8_t>(ssrc >> (24 - 8 * i));
        }
        return b;
    }

    std::uint32_t probes_ = 0;
    std::uint64_t tick_ = 0;
    std::uint32_t ssrc_up_ = 0;
    std::uint32_t ssrc_down_ = 0;
};

// Repeating fetch: handshake, one request naming the Host, k response
// segments, close, then a jittered think time before the next connection.
class SocialFeed final : public TrafficModel {
public:
    using TrafficModel::TrafficModel;

protected:
    void refill() override
    {
        const auto& p = std::get<SocialParams>(params_);
        const std::uint32_t conn = cycle_++;
        const SimTime t = cursor_;
        const SimTime half = p.rtt_ms / 2;
        auto client_seq = static_cast<std::uint32_t>(rng_());
        auto server_seq = static_cast<std::uint32_t>(rng_());
        using namespace net::tcp_flags;

        push(t, tcp_emission(Direction::up, conn, p.server, syn, client_seq, 0));
        ++client_seq;
        push(t + half, tcp_emission(Direction::down, conn, p.server, syn | ack, server_seq, client_seq));
        ++server_seq;
        push(t + p.rtt_ms, tcp_emission(Direction::up, conn, p.server, ack, client_seq, server_seq));

        auto request = to_bytes(http_request("/feed?page=" + std::to_string(conn), p.host, "fleet-social/1.0"));
        const auto request_len = static_cast<std::uint32_t>(request.size());
        push(t + p.rtt_ms, tcp_emission(Direction::up, conn, p.server, psh | ack, client_seq, server_seq,
                                        std::move(request)));
        client_seq += request_len;

        const auto segments = static_cast<std::uint32_t>(uniform_between(rng_, p.min_segments, p.max_segments));
        const SimTime first = t + p.rtt_ms + half;
        for (std::uint32_t i = 0; i < segments; ++i) {
            Bytes body = random_bytes(p.segment_bytes);
            if (i == 0) {
                static constexpr std::string_view head = "HTTP/1.1 200 OK\r\nContent-Type: application/json\r\n\r\n";
                std::copy(head.begin(), head.end(), body.begin());
            }
            push(first + 2 * i, tcp_emission(Direction::down, conn, p.server, psh | ack, server_seq, client_seq,
                                             std::move(body)));
            server_seq += p.segment_bytes;
        }
        const SimTime last = first + 2 * (segments - 1);
        push(last + half, tcp_emission(Direction::up, conn, p.server, fin | ack, client_seq, server_seq));
        push(last + p.rtt_ms, tcp_emission(Direction::down, conn, p.server, fin | ack, server_seq, client_seq + 1));

        cursor_ = t + p.think_time_ms + uniform_between(rng_, -p.think_jitter_ms, p.think_jitter_ms);
    }

private:
    std::uint32_t cycle_ = 0;
};

// One request, then a bulk download from the cdn.
class GameBurst final : public TrafficModel {
public:
    using TrafficModel::TrafficModel;

protected:
    void refill() override
    {
        const auto& p = std::get<GameParams>(params_);
        using namespace net::tcp_flags;
        const SimTime half = p.rtt_ms / 2;
        if (phase_ == 0) {
            client_seq_ = static_cast<std::uint32_t>(rng_());
            server_seq_ = static_cast<std::uint32_t>(rng_());
            push(cursor_, tcp_emission(Direction::up, 0, p.cdn, syn, client_seq_, 0));
            ++client_seq_;
            push(cursor_ + half, tcp_emission(Direction::down, 0, p.cdn, syn | ack, server_seq_, client_seq_));
            ++server_seq_;
            push(cursor_ + p.rtt_ms, tcp_emission(Direction::up, 0, p.cdn, ack, client_seq_, server_seq_));
            auto request = to_bytes(http_request("/assets/levels.pak", p.host, "fleet-game/1.0"));
            const auto len = static_cast<std::uint32_t>(request.size());
            push(cursor_ + p.rtt_ms,
                 tcp_emission(Direction::up, 0, p.cdn, psh | ack, client_seq_, server_seq_, std::move(request)));
            client_seq_ += len;
            cursor_ += p.rtt_ms + half;
            phase_ = 1;
            return;
        }
        if (sent_ < p.segments) {
            push(cursor_, tcp_emission(Direction::down, 0, p.cdn, psh | ack, server_seq_, client_seq_,
                                       random_bytes(p.segment_bytes)));
            server_seq_ += p.segment_bytes;
            ++sent_;
            cursor_ += p.segment_gap_ms;
            return;
        }
        if (phase_ == 1) {
            push(cursor_, tcp_emission(Direction::up, 0, p.cdn, fin | ack, client_seq_, server_seq_));
            push(cursor_ + half, tcp_emission(Direction::down, 0, p.cdn, fin | ack, server_seq_, client_seq_ + 1));
            phase_ = 2;
            return;
        }
        exhausted_ = true;
    }

private:
    int phase_ = 0;
    std::uint32_t sent_ = 0;
    std::uint32_t client_seq_ = 0;
    std::uint32_t server_seq_ = 0;
};

// Random UDP chatter on :9999; nothing in it should look like a known app.
class UnknownApp final : public TrafficModel {
public:
    using TrafficModel::TrafficModel;

protected:
    void refill() override
    {
        const auto& p = std::get<UnknownParams>(params_);
        if (sent_ >= p.count) {
            exhausted_ = true;
            return;
        }
        auto size = [&] { return static_cast<std::size_t>(uniform_between(rng_, p.min_payload, p.max_payload)); };
        push(cursor_, udp_emission(Direction::up, 0, p.peer, random_bytes(size())));
        if (sent_ % 2 == 1) push(cursor_ + p.interval_ms / 2, udp_emission(Direction::down, 0, p.peer, random_bytes(size())));
        ++sent_;
        cursor_ += p.interval_ms;
    }

private:
    std::uint32_t sent_ = 0;
};

}  // namespace

std::optional<ModelId> parse_model_id(std::string_view text)
{
    if (text == "voip_call") return ModelId::voip_call;
    if (text == "social_feed") return ModelId::social_feed;
    if (text == "game_burst") return ModelId::game_burst;
    if (text == "unknown_app") return ModelId::unknown_app;
    return std::nullopt;
}

std::string_view to_string(ModelId id)
{
    switch (id) {
    case ModelId::voip_call:
        return "voip_call";
    case ModelId::social_feed:
        return "social_feed";
    case ModelId::game_burst:
        return "game_burst";
    case ModelId::unknown_app:
        return "unknown_app";
    }
    return "?";
}

ModelId model_of(const ModelParams& params)
{
    return static_cast<ModelId>(params.index());
}

ModelParams default_params(ModelId id)
{
    switch (id) {
    case ModelId::voip_call:
        return VoipParams{};
    case ModelId::social_feed:
        return SocialParams{};
    case ModelId::game_burst:
        return GameParams{};
    case ModelId::unknown_app:
        return UnknownParams{};
    }
    throw UnknownModel("unknown model id");
}

ModelParams params_from_json(ModelId id, const json& overrides)
{
    ParamReader r(overrides);
    ModelParams out = default_params(id);
    std::visit(
        [&](auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, VoipParams>) {
                r.address("relay_ip", p.relay.ip);
                r.number("relay_port", p.relay.port, 1, 65535);
                r.number("probe_count", p.probe_count, 0, 100);
                r.number("probe_gap_ms", p.probe_gap_ms, 1, kHour);
                r.number("probe_bytes", p.probe_bytes, wire::kProbeMagic.size(), kMaxUdpPayload);
                r.number("media_pps", p.media_pps, 1, 1000);
                r.number("media_bytes", p.media_bytes, 12, kMaxUdpPayload);
                r.number("call_duration_ms", p.call_duration_ms, 0, 24 * kHour);
                check(1000 % p.media_pps == 0, "media_pps", "must divide 1000 (millisecond clock)");
            } else if constexpr (std::is_same_v<P, SocialParams>) {
                r.text("host", p.host);
                r.address("server_ip", p.server.ip);
                r.number("server_port", p.server.port, 1, 65535);
                r.number("think_time_ms", p.think_time_ms, 1, kHour);
                r.number("think_jitter_ms", p.think_jitter_ms, 0, kHour);
                r.number("min_segments", p.min_segments, 1, 1000);
                r.number("max_segments", p.max_segments, 1, 1000);
                r.number("segment_bytes", p.segment_bytes, 64, kMaxTcpPayload);
                r.number("rtt_ms", p.rtt_ms, 0, 10'000);
                check(p.min_segments <= p.max_segments, "min_segments", "must not exceed max_segments");
                check(p.think_time_ms - p.think_jitter_ms > 2 * p.rtt_ms + 2 * SimTime{p.max_segments}, "think_time_ms",
                      "minus think_jitter_ms must outlast one fetch");
                check(p.host.size() < 256, "host", "too long");
            } else if constexpr (std::is_same_v<P, GameParams>) {
                r.text("host", p.host);
                r.address("cdn_ip", p.cdn.ip);
                r.number("cdn_port", p.cdn.port, 1, 65535);
                r.number("segments", p.segments, 0, 1'000'000);
                r.number("segment_bytes", p.segment_bytes, 1, kMaxTcpPayload);
                r.number("segment_gap_ms", p.segment_gap_ms, 0, kHour);
                r.number("rtt_ms", p.rtt_ms, 0, 10'000);
                check(p.host.size() < 256, "host", "too long");
            } else {
                r.address("peer_ip", p.peer.ip);
                r.number("peer_port", p.peer.port, 1, 65535);
                r.number("interval_ms", p.interval_ms, 2, kHour);
                r.number("count", p.count, 0, 1'000'000);
                r.number("min_payload", p.min_payload, 0, kMaxUdpPayload);
                r.number("max_payload", p.max_payload, 0, kMaxUdpPayload);
                check(p.min_payload <= p.max_payload, "min_payload", "must not exceed max_payload");
            }
        },
        out);
    r.finish();
    return out;
}

json params_to_json(const ModelParams& params)
{
    return std::visit(
        [](const auto& p) -> json {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, VoipParams>) {
                return {{"relay_ip", p.relay.ip.to_string()}, {"relay_port", p.relay.port},
                        {"probe_count", p.probe_count},       {"probe_gap_ms", p.probe_gap_ms},
                        {"probe_bytes", p.probe_bytes},       {"media_pps", p.media_pps},
                        {"media_bytes", p.media_bytes},       {"call_duration_ms", p.call_duration_ms}};
            } else if constexpr (std::is_same_v<P, SocialParams>) {
                return {{"host", p.host},
                        {"server_ip", p.server.ip.to_string()},
                        {"server_port", p.server.port},
                        {"think_time_ms", p.think_time_ms},
                        {"think_jitter_ms", p.think_jitter_ms},
                        {"min_segments", p.min_segments},
                        {"max_segments", p.max_segments},
                        {"segment_bytes", p.segment_bytes},
                        {"rtt_ms", p.rtt_ms}};
            } else if constexpr (std::is_same_v<P, GameParams>) {
                return {{"host", p.host},         {"cdn_ip", p.cdn.ip.to_string()},
                        {"cdn_port", p.cdn.port}, {"segments", p.segments},
                        {"segment_bytes", p.segment_bytes}, {"segment_gap_ms", p.segment_gap_ms},
                        {"rtt_ms", p.rtt_ms}};
            } else {
                return {{"peer_ip", p.peer.ip.to_string()}, {"peer_port", p.peer.port},
                        {"interval_ms", p.interval_ms},     {"count", p.count},
                        {"min_payload", p.min_payload},     {"max_payload", p.max_payload}};
            }
        },
        params);
}

std::size_t Emission::wire_size() const
{
    return net::kIpv4HeaderLen + (proto == net::kProtoTcp ? net::kTcpHeaderLen : net::kUdpHeaderLen) +
           payload.size();
}

TrafficModel::TrafficModel(ModelParams params, std::uint64_t seed, SimTime start)
    : params_(std::move(params)), seed_(seed), rng_(seed), cursor_(start)
{
}

bool TrafficModel::done()
{
    ensure_script();
    return script_.empty();
}

std::optional<SimTime> TrafficModel::next_wake()
{
    ensure_script();
    if (script_.empty()) return std::nullopt;
    return script_.front().first;
}

void TrafficModel::ensure_script()
{
    while (script_.empty() && !exhausted_) refill();
}

Bytes TrafficModel::random_bytes(std::size_t n)
{
    Bytes out(n);
    std::size_t i = 0;
    while (i < n) {
        std::uint64_t word = rng_();
        for (int k = 0; k < 8 && i < n; ++k, ++i, word >>= 8) out[i] = static_cast<std::uint8_t>(word);
    }
    return out;
}

Batch TrafficModel::next_events(SimTime now)
{
    ensure_script();
    if (done()) throw ModelExhausted(std::string(to_string(id())) + " has no further events");
    Batch batch;
    while (!script_.empty() && script_.front().first <= now) {
        auto emission = std::move(script_.front().second);
        script_.pop_front();
        const int d = emission.dir == Direction::up ? 0 : 1;
        ++packets_[d];
        bytes_[d] += emission.wire_size();
        batch.packets.push_back(std::move(emission));
        ensure_script();
    }
    batch.next_wake = next_wake();
    return batch;
}

std::unique_ptr<TrafficModel> spawn(const ModelParams& params, std::uint64_t seed, SimTime start)
{
    std::unique_ptr<TrafficModel> model;
    switch (model_of(params)) {
    case ModelId::voip_call:
        model = std::make_unique<VoipCall>(params, seed, start);
        break;
    case ModelId::social_feed:
        model = std::make_unique<SocialFeed>(params, seed, start);
        break;
    case ModelId::game_burst:
        model = std::make_unique<GameBurst>(params, seed, start);
        break;
    case ModelId::unknown_app:
        model = std::make_unique<UnknownApp>(params, seed, start);
        break;
    }
    return model;
}

std::unique_ptr<TrafficModel> spawn(std::string_view model_id, const json& params, std::uint64_t seed, SimTime start)
{
    const auto id = parse_model_id(model_id);
    if (!id) throw UnknownModel("unknown traffic model `" + std::string(model_id) + "`");
    return spawn(params_from_json(*id, params), seed, start);
}

}  // namespace fleet::apps
