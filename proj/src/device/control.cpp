#include "fleet/device/control.hpp"

#include <charconv>

namespace fleet::device {

std::string ControlReply::wire() const
{
    std::string out;
    for (const auto& line : body) {
        out += line;
        out += '\n';
    }
    out += terminator;
    out += '\n';
    return out;
}

bool is_terminator(std::string_view line)
{
    if (line == "Success") return true;
    return line.size() >= 10 && line.substr(0, 9) == "Failure [" && line.back() == ']';
}

std::string install_request(std::string_view apk_name, std::string_view manifest_text)
{
    std::string out = "install ";
    out += apk_name;
    out += ' ';
    out += std::to_string(manifest_text.size());
    out += '\n';
    out += manifest_text;
    return out;
}

std::vector<std::string> split_words(std::string_view line)
{
    std::vector<std::string> words;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        const auto start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
        if (i > start) words.emplace_back(line.substr(start, i - start));
    }
    return words;
}

std::optional<InstallHeader> parse_install_header(std::string_view line)
{
    auto words = split_words(line);
    if (words.empty() || words[0] != "install") return std::nullopt;
    std::size_t at = 1;
    if (at < words.size() && words[at] == "-r") ++at;
    if (words.size() != at + 2) return std::nullopt;
    const auto& count = words[at + 1];
    std::size_t bytes = 0;
    const auto [ptr, ec] = std::from_chars(count.data(), count.data() + count.size(), bytes);
    if (ec != std::errc{} || ptr != count.data() + count.size()) return std::nullopt;
    return InstallHeader{words[at], bytes};
}

void CommandReader::feed(std::span<const std::uint8_t> bytes)
{
    buffer_.append(bytes.begin(), bytes.end());
}

void CommandReader::feed(std::string_view text)
{
    buffer_.append(text);
}

std::optional<Command> CommandReader::next()
{
    if (awaiting_) {
        if (buffer_.size() < awaiting_bytes_) return std::nullopt;
        awaiting_->payload = buffer_.substr(0, awaiting_bytes_);
        buffer_.erase(0, awaiting_bytes_);
        auto done = std::move(*awaiting_);
        awaiting_.reset();
        return done;
    }

    auto lf = buffer_.find('\n');
    std::string line;
    if (lf == std::string::npos) {
        if (buffer_.size() < kMaxLineBytes) return std::nullopt;
        line = buffer_.substr(0, kMaxLineBytes);
        buffer_.erase(0, kMaxLineBytes);
    } else if (lf > kMaxLineBytes) {
        line = buffer_.substr(0, kMaxLineBytes);
        buffer_.erase(0, kMaxLineBytes);
    } else {
        line = buffer_.substr(0, lf);
        buffer_.erase(0, lf + 1);
    }

    const auto header = parse_install_header(line);
    if (header && header->bytes <= kMaxInstallBytes && header->bytes > 0) {
        awaiting_ = Command{std::move(line), {}};
        awaiting_bytes_ = header->bytes;
        return next();
    }
    return Command{std::move(line), {}};
}

void ReplyReader::feed(std::span<const std::uint8_t> bytes)
{
    buffer_.append(bytes.begin(), bytes.end());
    std::size_t lf;
    while ((lf = buffer_.find('\n')) != std::string::npos) {
        auto line = buffer_.substr(0, lf);
        buffer_.erase(0, lf + 1);
        if (is_terminator(line)) {
            ready_.push_back(ControlReply{std::move(body_), std::move(line)});
            body_.clear();
        } else {
            body_.push_back(std::move(line));
        }
    }
}

std::optional<ControlReply> ReplyReader::next()
{
    if (ready_.empty()) return std::nullopt;
    auto reply = std::move(ready_.front());
    ready_.pop_front();
    return reply;
}

}  // namespace fleet::device
