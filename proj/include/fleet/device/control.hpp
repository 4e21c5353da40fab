#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fleet::device {

inline constexpr std::uint16_t kControlPort = 5555;
// Largest manifest accepted by `install`.
inline constexpr std::size_t kMaxInstallBytes = 65536;
// A line without LF is cut here and handled as a command of its own.
inline constexpr std::size_t kMaxLineBytes = 4096;
// Payload bytes per simulated control segment.
inline constexpr std::size_t kSegmentBytes = 1400;

struct ControlReply {
    std::vector<std::string> body;
    std::string terminator;  // "Success" or "Failure [<reason>]"

    bool ok() const { return terminator == "Success"; }
    // Body lines then terminator, each LF-terminated.
    std::string wire() const;

    static ControlReply success(std::vector<std::string> body = {}) { return {std::move(body), "Success"}; }
    static ControlReply failure(std::string_view reason) { return {{}, "Failure [" + std::string(reason) + "]"}; }
    bool operator==(const ControlReply&) const = default;
};

bool is_terminator(std::string_view line);

// Builds the request bytes for `install <apk_name> <n>` plus the manifest.
std::string install_request(std::string_view apk_name, std::string_view manifest_text);

struct Command {
    std::string line;     // without LF
    std::string payload;  // install body, empty otherwise
};

// Server side: cuts an inbound byte stream into commands. An `install` line
// with a byte count within kMaxInstallBytes waits for that many payload bytes.
class CommandReader {
public:
    void feed(std::span<const std::uint8_t> bytes);
    void feed(std::string_view text);
    std::optional<Command> next();
    bool idle() const { return buffer_.empty() && !awaiting_; }

private:
    std::string buffer_;
    std::optional<Command> awaiting_;  // install header seen, payload incomplete
    std::size_t awaiting_bytes_ = 0;
};

// Client side: collects reply lines until a terminator.
class ReplyReader {
public:
    void feed(std::span<const std::uint8_t> bytes);
    std::optional<ControlReply> next();

private:
    std::string buffer_;
    std::vector<std::string> body_;
    std::deque<ControlReply> ready_;
};

// Parses `install [-r] <apk_name> <count>`; nullopt for anything else.
struct InstallHeader {
    std::string apk_name;
    std::size_t bytes = 0;
};
std::optional<InstallHeader> parse_install_header(std::string_view line);

std::vector<std::string> split_words(std::string_view line);

}  // namespace fleet::device
