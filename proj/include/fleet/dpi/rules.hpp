#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fleet/net/packet.hpp"

namespace fleet::dpi {

// Bytes of each packet's payload the classifier looks at.
inline constexpr std::size_t kInspectBytes = 256;

struct PayloadPrefix {
    std::size_t offset = 0;
    net::Bytes bytes;

    bool operator==(const PayloadPrefix&) const = default;
};

// Matches a `Host:` header line whose value contains the literal.
struct HostContains {
    std::string literal;

    bool operator==(const HostContains&) const = default;
};

struct SignatureRule {
    std::string app;
    std::uint8_t proto = net::kProtoUdp;
    std::optional<std::uint16_t> port;
    std::variant<PayloadPrefix, HostContains> match;
    std::optional<std::size_t> min_len;

    bool operator==(const SignatureRule&) const = default;
};

// One rule per line:
//   app=<name> proto=<tcp|udp> [port=<n>] [min_len=<n>] match=prefix@<off>:<hex>|host~<literal>
// Blank lines and `#` comments are skipped. Errors are ConfigError with field
// "<source>:<line>".
std::vector<SignatureRule> parse_signatures(std::string_view text, std::string_view source = "signatures");
std::vector<SignatureRule> load_signatures(const std::filesystem::path& path);
std::string format_signature(const SignatureRule& rule);

// True when the packet's transport, ports and first kInspectBytes of payload
// satisfy the rule.
bool rule_matches(const SignatureRule& rule, const net::Packet& packet);

// Label of the first matching rule, in order.
std::optional<std::string> first_match(const std::vector<SignatureRule>& rules, const net::Packet& packet);

enum class ActionKind { allow, block, throttle, prioritize };

struct Action {
    ActionKind kind = ActionKind::allow;
    double rate_bps = 0;  // bytes per second, throttle only
    double burst = 0;     // bytes, throttle only

    bool operator==(const Action&) const = default;
};

std::string format_action(const Action& action);

struct Policy {
    std::string app;  // "*" is the default
    Action action;

    bool operator==(const Policy&) const = default;
};

class PolicyTable {
public:
    // Throws ConfigError unless exactly one `*` entry is present and no app
    // repeats.
    explicit PolicyTable(std::vector<Policy> policies);

    // Everything allowed.
    static PolicyTable allow_all();

    const Action& action_for(std::string_view app) const;
    const Action& fallback() const { return action_for("*"); }
    const std::vector<Policy>& policies() const { return policies_; }

private:
    std::vector<Policy> policies_;
};

// `app=<name|*> action=allow|block|prioritize|throttle:<bytes_per_sec>:<burst>`
// per line, `#` comments. A throttle burst below one MTU could never release a
// full-size packet and is rejected.
PolicyTable parse_policies(std::string_view text, std::string_view source = "policies");
PolicyTable load_policies(const std::filesystem::path& path);

// Text of data/signatures.rules and data/policies.rules, built in so a
// scenario without rule files still classifies.
std::string_view default_signature_text();
std::string_view default_policy_text();

}  // namespace fleet::dpi
