#include "fleet/dpi/rules.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "fleet/error.hpp"
#include "fleet/net/frame.hpp"

namespace fleet::dpi {

namespace {

struct Line {
    std::size_t number;
    std::map<std::string, std::string> fields;
};

std::string location(std::string_view source, std::size_t line)
{
    return std::string(source) + ":" + std::to_string(line);
}

// Splits into `key=value` tokens; comments and blank lines yield nothing.
std::vector<Line> tokenize(std::string_view text, std::string_view source)
{
    std::vector<Line> lines;
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t number = 0;
    while (std::getline(in, raw)) {
        ++number;
        if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        std::istringstream words(raw);
        std::string word;
        Line line{number, {}};
        while (words >> word) {
            const auto eq = word.find('=');
            if (eq == std::string::npos || eq == 0)
                throw ConfigError(location(source, number), "expected key=value, got '" + word + "'");
            auto key = word.substr(0, eq);
            if (line.fields.count(key)) throw ConfigError(location(source, number), "repeated key '" + key + "'");
            line.fields.emplace(std::move(key), word.substr(eq + 1));
        }
        if (!line.fields.empty()) lines.push_back(std::move(line));
    }
    return lines;
}

std::string take(Line& line, const std::string& key, std::string_view source)
{
    const auto it = line.fields.find(key);
    if (it == line.fields.end()) throw ConfigError(location(source, line.number), "missing '" + key + "'");
    auto value = std::move(it->second);
    line.fields.erase(it);
    return value;
}

std::optional<std::string> take_optional(Line& line, const std::string& key)
{
    const auto it = line.fields.find(key);
    if (it == line.fields.end()) return std::nullopt;
    auto value = std::move(it->second);
    line.fields.erase(it);
    return value;
}

void reject_leftovers(const Line& line, std::string_view source)
{
    if (!line.fields.empty())
        throw ConfigError(location(source, line.number), "unknown key '" + line.fields.begin()->first + "'");
}

template <typename T>
std::optional<T> to_number(std::string_view text)
{
    T value{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty() || ec != std::errc{} || ptr != end) return std::nullopt;
    return value;
}

std::optional<net::Bytes> from_hex(std::string_view hex)
{
    if (hex.empty() || hex.size() % 2 != 0) return std::nullopt;
    net::Bytes out;
    for (std::size_t i = 0; i < hex.size(); i += 2) {
        std::uint8_t byte = 0;
        const auto [ptr, ec] = std::from_chars(hex.data() + i, hex.data() + i + 2, byte, 16);
        if (ec != std::errc{} || ptr != hex.data() + i + 2) return std::nullopt;
        out.push_back(byte);
    }
    return out;
}

bool valid_label(std::string_view app)
{
    return !app.empty() && std::all_of(app.begin(), app.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_' || c == '-' || c == '.';
    });
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path.string(), "cannot read file");
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

char lower(char c)
{
    return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}

bool host_header_contains(std::string_view payload, std::string_view literal)
{
    std::size_t pos = 0;
    while (pos < payload.size()) {
        auto end = payload.find('\n', pos);
        if (end == std::string_view::npos) end = payload.size();
        auto line = payload.substr(pos, end - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        constexpr std::string_view name = "host:";
        if (line.size() >= name.size() &&
            std::equal(name.begin(), name.end(), line.begin(), [](char a, char b) { return a == lower(b); })) {
            if (line.substr(name.size()).find(literal) != std::string_view::npos) return true;
        }
        pos = end + 1;
    }
    return false;
}

}  // namespace

std::vector<SignatureRule> parse_signatures(std::string_view text, std::string_view source)
{
    std::vector<SignatureRule> rules;
    for (auto& line : tokenize(text, source)) {
        const auto where = location(source, line.number);
        SignatureRule rule;
        rule.app = take(line, "app", source);
        if (!valid_label(rule.app) || rule.app == "pending" || rule.app == "unknown")
            throw ConfigError(where, "bad app label '" + rule.app + "'");

        const auto proto = take(line, "proto", source);
        if (proto == "tcp")
            rule.proto = net::kProtoTcp;
        else if (proto == "udp")
            rule.proto = net::kProtoUdp;
        else
            throw ConfigError(where, "proto must be tcp or udp");

        if (const auto port = take_optional(line, "port")) {
            const auto n = to_number<std::uint16_t>(*port);
            if (!n || *n == 0) throw ConfigError(where, "bad port '" + *port + "'");
            rule.port = *n;
        }
        if (const auto min_len = take_optional(line, "min_len")) {
            const auto n = to_number<std::size_t>(*min_len);
            if (!n) throw ConfigError(where, "bad min_len '" + *min_len + "'");
            rule.min_len = *n;
        }

        const auto match = take(line, "match", source);
        if (match.rfind("prefix@", 0) == 0) {
            const auto spec = std::string_view(match).substr(7);
            const auto colon = spec.find(':');
            if (colon == std::string_view::npos) throw ConfigError(where, "prefix needs <offset>:<hex>");
            const auto offset = to_number<std::size_t>(spec.substr(0, colon));
            auto bytes = from_hex(spec.substr(colon + 1));
            if (!offset || !bytes) throw ConfigError(where, "bad prefix '" + match + "'");
            if (*offset + bytes->size() > kInspectBytes)
                throw ConfigError(where, "prefix reaches past the inspected " + std::to_string(kInspectBytes) + " bytes");
            rule.match = PayloadPrefix{*offset, std::move(*bytes)};
        } else if (match.rfind("host~", 0) == 0) {
            if (rule.proto != net::kProtoTcp) throw ConfigError(where, "host match requires proto=tcp");
            auto literal = match.substr(5);
            if (literal.empty()) throw ConfigError(where, "empty host literal");
            rule.match = HostContains{std::move(literal)};
        } else {
            throw ConfigError(where, "match must be prefix@<off>:<hex> or host~<literal>");
        }
        reject_leftovers(line, source);
        rules.push_back(std::move(rule));
    }
    return rules;
}

std::vector<SignatureRule> load_signatures(const std::filesystem::path& path)
{
    return parse_signatures(read_file(path), path.string());
}

std::string format_signature(const SignatureRule& rule)
{
    std::ostringstream out;
    out << "app=" << rule.app << " proto=" << (rule.proto == net::kProtoTcp ? "tcp" : "udp");
    if (rule.port) out << " port=" << *rule.port;
    if (rule.min_len) out << " min_len=" << *rule.min_len;
    if (const auto* prefix = std::get_if<PayloadPrefix>(&rule.match)) {
        static constexpr char digits[] = "0123456789abcdef";
        out << " match=prefix@" << prefix->offset << ':';
        for (auto b : prefix->bytes) out << digits[b >> 4] << digits[b & 0xf];
    } else {
        out << " match=host~" << std::get<HostContains>(rule.match).literal;
    }
    return out.str();
}

bool rule_matches(const SignatureRule& rule, const net::Packet& packet)
{
    if (packet.ip.proto != rule.proto) return false;
    if (rule.port && packet.src_port() != *rule.port && packet.dst_port() != *rule.port) return false;
    const auto& payload = packet.payload();
    if (rule.min_len && payload.size() < *rule.min_len) return false;
    const std::size_t visible = std::min(payload.size(), kInspectBytes);

    if (const auto* prefix = std::get_if<PayloadPrefix>(&rule.match)) {
        if (prefix->offset + prefix->bytes.size() > visible) return false;
        return std::equal(prefix->bytes.begin(), prefix->bytes.end(), payload.begin() + prefix->offset);
    }
    const std::string_view text(reinterpret_cast<const char*>(payload.data()), visible);
    return host_header_contains(text, std::get<HostContains>(rule.match).literal);
}

std::optional<std::string> first_match(const std::vector<SignatureRule>& rules, const net::Packet& packet)
{
    for (const auto& rule : rules)
        if (rule_matches(rule, packet)) return rule.app;
    return std::nullopt;
}

std::string format_action(const Action& action)
{
    switch (action.kind) {
    case ActionKind::allow: return "allow";
    case ActionKind::block: return "block";
    case ActionKind::prioritize: return "prioritize";
    case ActionKind::throttle: {
        std::ostringstream out;
        out << "throttle:" << static_cast<std::uint64_t>(action.rate_bps) << ':'
            << static_cast<std::uint64_t>(action.burst);
        return out.str();
    }
    }
    return "allow";
}

PolicyTable::PolicyTable(std::vector<Policy> policies) : policies_(std::move(policies))
{
    std::size_t defaults = 0;
    for (std::size_t i = 0; i < policies_.size(); ++i) {
        if (policies_[i].app == "*") ++defaults;
        for (std::size_t j = 0; j < i; ++j)
            if (policies_[j].app == policies_[i].app)
                throw ConfigError("policies", "more than one policy for '" + policies_[i].app + "'");
    }
    if (defaults != 1) throw ConfigError("policies", "exactly one `app=*` default is required");
}

PolicyTable PolicyTable::allow_all()
{
    return PolicyTable({Policy{"*", Action{}}});
}

const Action& PolicyTable::action_for(std::string_view app) const
{
    const Action* fallback = nullptr;
    for (const auto& policy : policies_) {
        if (policy.app == app) return policy.action;
        if (policy.app == "*") fallback = &policy.action;
    }
    return *fallback;
}

PolicyTable parse_policies(std::string_view text, std::string_view source)
{
    std::vector<Policy> policies;
    for (auto& line : tokenize(text, source)) {
        const auto where = location(source, line.number);
        Policy policy;
        policy.app = take(line, "app", source);
        if (policy.app != "*" && !valid_label(policy.app))
            throw ConfigError(where, "bad app label '" + policy.app + "'");

        const auto action = take(line, "action", source);
        if (action == "allow") {
            policy.action.kind = ActionKind::allow;
        } else if (action == "block") {
            policy.action.kind = ActionKind::block;
        } else if (action == "prioritize") {
            policy.action.kind = ActionKind::prioritize;
        } else if (action.rfind("throttle:", 0) == 0) {
            const auto spec = std::string_view(action).substr(9);
            const auto colon = spec.find(':');
            const auto rate = to_number<std::uint64_t>(spec.substr(0, colon));
            const auto burst = colon == std::string_view::npos ? std::nullopt
                                                               : to_number<std::uint64_t>(spec.substr(colon + 1));
            if (!rate || !burst) throw ConfigError(where, "throttle needs <bytes_per_sec>:<burst>");
            if (*rate == 0) throw ConfigError(where, "throttle rate must be positive");
            if (*burst < net::kMtu)
                throw ConfigError(where, "throttle burst must be at least " + std::to_string(net::kMtu) + " bytes");
            policy.action = Action{ActionKind::throttle, static_cast<double>(*rate), static_cast<double>(*burst)};
        } else {
            throw ConfigError(where, "unknown action '" + action + "'");
        }
        reject_leftovers(line, source);
        policies.push_back(std::move(policy));
    }
    return PolicyTable(std::move(policies));
}

PolicyTable load_policies(const std::filesystem::path& path)
{
    return parse_policies(read_file(path), path.string());
}

std::string_view default_signature_text()
{
    return R"(# Application signatures. First match wins, top to bottom.
#
# voip relay probes open with a fixed 4-byte magic (0x02 at offset 2)
app=skype_like proto=udp match=prefix@0:534b0250
app=social_like proto=tcp port=443 match=host~m.social.test
app=social_like proto=tcp port=443 match=host~twitter.test
app=game_like proto=tcp port=80 match=host~cdn.game.test
)";
}

std::string_view default_policy_text()
{
    return R"(# Per-app enforcement. `*` covers pending and unmatched flows.
app=* action=allow
app=skype_like action=prioritize
app=social_like action=throttle:64000:16000
app=game_like action=allow
)";
}

}  // namespace fleet::dpi
