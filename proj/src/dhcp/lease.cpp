#include "fleet/dhcp/lease.hpp"

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>

#include "fleet/error.hpp"

namespace fleet::dhcp {

namespace {

std::optional<std::string_view> strip(std::string_view line, std::string_view prefix, std::string_view suffix)
{
    if (line.size() < prefix.size() + suffix.size()) return std::nullopt;
    if (line.substr(0, prefix.size()) != prefix) return std::nullopt;
    if (line.substr(line.size() - suffix.size()) != suffix) return std::nullopt;
    return line.substr(prefix.size(), line.size() - prefix.size() - suffix.size());
}

std::optional<net::SimTime> parse_ms(std::string_view text)
{
    std::uint64_t value = 0;
    if (text.empty()) return std::nullopt;
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || end != text.data() + text.size()) return std::nullopt;
    if (value > static_cast<std::uint64_t>(INT64_MAX)) return std::nullopt;
    return static_cast<net::SimTime>(value);
}

class LineReader {
public:
    explicit LineReader(std::string_view text) : text_(text) {}

    bool done() const { return pos_ >= text_.size(); }
    std::size_t line_no() const { return line_; }

    std::string_view next()
    {
        ++line_;
        const auto nl = text_.find('\n', pos_);
        if (nl == std::string_view::npos) {
            throw LeaseFileCorrupt(line_, "missing newline");
        }
        auto line = text_.substr(pos_, nl - pos_);
        pos_ = nl + 1;
        return line;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 0;
};

}  // namespace

std::string format_leases(std::span<const Lease> leases)
{
    std::ostringstream out;
    for (const auto& lease : leases) {
        out << "lease " << lease.ip.to_string() << " {\n"
            << "  starts " << lease.starts_ms << ";\n"
            << "  ends " << lease.ends_ms << ";\n"
            << "  hardware ethernet " << lease.mac.to_string() << ";\n"
            << "  binding state " << (lease.state == BindingState::active ? "active" : "expired") << ";\n"
            << "}\n\n";
    }
    return out.str();
}

std::vector<Lease> parse_leases_text(std::string_view text)
{
    std::vector<Lease> leases;
    LineReader reader(text);
    while (!reader.done()) {
        Lease lease;

        auto line = reader.next();
        auto ip_text = strip(line, "lease ", " {");
        auto ip = ip_text ? net::Ipv4Addr::parse(*ip_text) : std::nullopt;
        if (!ip) throw LeaseFileCorrupt(reader.line_no(), "expected `lease <ip> {`");
        lease.ip = *ip;

        line = reader.next();
        auto starts = strip(line, "  starts ", ";");
        auto starts_ms = starts ? parse_ms(*starts) : std::nullopt;
        if (!starts_ms) throw LeaseFileCorrupt(reader.line_no(), "expected `starts <ms>;`");
        lease.starts_ms = *starts_ms;

        line = reader.next();
        auto ends = strip(line, "  ends ", ";");
        auto ends_ms = ends ? parse_ms(*ends) : std::nullopt;
        if (!ends_ms) throw LeaseFileCorrupt(reader.line_no(), "expected `ends <ms>;`");
        lease.ends_ms = *ends_ms;

        line = reader.next();
        auto mac_text = strip(line, "  hardware ethernet ", ";");
        auto mac = mac_text ? net::MacAddr::parse(*mac_text) : std::nullopt;
        if (!mac) throw LeaseFileCorrupt(reader.line_no(), "expected `hardware ethernet <mac>;`");
        lease.mac = *mac;

        line = reader.next();
        auto state = strip(line, "  binding state ", ";");
        if (state == "active") {
            lease.state = BindingState::active;
        } else if (state == "expired") {
            lease.state = BindingState::expired;
        } else {
            throw LeaseFileCorrupt(reader.line_no(), "expected `binding state <active|expired>;`");
        }

        if (reader.next() != "}") throw LeaseFileCorrupt(reader.line_no(), "expected `}`");
        if (!reader.next().empty()) throw LeaseFileCorrupt(reader.line_no(), "expected blank line");
        leases.push_back(lease);
    }
    return leases;
}

void write_leases(std::span<const Lease> leases, const std::filesystem::path& path)
{
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open " + tmp.string() + " for writing");
        const auto text = format_leases(leases);
        out.write(text.data(), static_cast<std::streamsize>(text.size()));
        if (!out) throw Error("write to " + tmp.string() + " failed");
    }
    std::filesystem::rename(tmp, path);
}

std::vector<Lease> parse_leases(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        if (!std::filesystem::exists(path)) return {};
        throw Error("cannot read " + path.string());
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_leases_text(text.str());
}

}  // namespace fleet::dhcp
