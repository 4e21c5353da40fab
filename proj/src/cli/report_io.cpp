#include "fleet/cli/report_io.hpp"

#include <algorithm>
#include <sstream>

#include <json.hpp>

#include "fleet/error.hpp"

namespace fleet::cli {

namespace {

using nlohmann::json;
using net::SimTime;

std::string proto_name(std::uint8_t proto)
{
    if (proto == net::kProtoTcp) return "tcp";
    if (proto == net::kProtoUdp) return "udp";
    return std::to_string(proto);
}

json key_json(const dpi::FlowKey& k)
{
    return {{"proto", proto_name(k.proto)},
            {"src_ip", k.src_ip.to_string()},
            {"src_port", k.src_port},
            {"dst_ip", k.dst_ip.to_string()},
            {"dst_port", k.dst_port}};
}

json counts_json(const std::map<std::string, std::uint64_t>& m)
{
    json out = json::object();
    for (const auto& [k, v] : m) out[k] = v;
    return out;
}

// Reads a report back, tracking the path of the node being read.
class Reader {
public:
    const json& at(const json& node, const std::string& path, const char* key)
    {
        if (!node.is_object()) throw ConfigError(path, "must be an object");
        auto it = node.find(key);
        if (it == node.end()) throw ConfigError(join(path, key), "missing");
        return *it;
    }

    void exact_keys(const json& node, const std::string& path, std::initializer_list<const char*> keys)
    {
        if (!node.is_object()) throw ConfigError(path, "must be an object");
        for (const auto& [k, v] : node.items())
            if (std::find_if(keys.begin(), keys.end(), [&](const char* want) { return k == want; }) == keys.end())
                throw ConfigError(join(path, k.c_str()), "unknown key");
    }

    std::uint64_t u64(const json& node, const std::string& path, const char* key)
    {
        const auto& v = at(node, path, key);
        if (!v.is_number_unsigned()) throw ConfigError(join(path, key), "must be a non-negative integer");
        return v.get<std::uint64_t>();
    }

    std::uint64_t u64_max(const json& node, const std::string& path, const char* key, std::uint64_t max)
    {
        const auto v = u64(node, path, key);
        if (v > max) throw ConfigError(join(path, key), "out of range");
        return v;
    }

    std::string str(const json& node, const std::string& path, const char* key)
    {
        const auto& v = at(node, path, key);
        if (!v.is_string()) throw ConfigError(join(path, key), "must be a string");
        return v.get<std::string>();
    }

    bool boolean(const json& node, const std::string& path, const char* key)
    {
        const auto& v = at(node, path, key);
        if (!v.is_boolean()) throw ConfigError(join(path, key), "must be a boolean");
        return v.get<bool>();
    }

    net::Ipv4Addr ip(const json& node, const std::string& path, const char* key)
    {
        auto parsed = net::Ipv4Addr::parse(str(node, path, key));
        if (!parsed) throw ConfigError(join(path, key), "not an address");
        return *parsed;
    }

    const json& array(const json& node, const std::string& path, const char* key)
    {
        const auto& v = at(node, path, key);
        if (!v.is_array()) throw ConfigError(join(path, key), "must be an array");
        return v;
    }

    std::map<std::string, std::uint64_t> counts(const json& node, const std::string& path, const char* key)
    {
        const auto& v = at(node, path, key);
        if (!v.is_object()) throw ConfigError(join(path, key), "must be an object");
        std::map<std::string, std::uint64_t> out;
        for (const auto& [k, n] : v.items()) {
            if (!n.is_number_unsigned()) throw ConfigError(join(join(path, key), k.c_str()), "must be an integer");
            out[k] = n.get<std::uint64_t>();
        }
        return out;
    }

    static std::string join(const std::string& path, const char* key)
    {
        return path.empty() ? std::string(key) : path + "." + key;
    }
};

std::string index_path(const char* base, std::size_t i)
{
    return std::string(base) + "[" + std::to_string(i) + "]";
}

std::vector<std::string> string_list(Reader& r, const json& node, const std::string& path, const char* key)
{
    std::vector<std::string> out;
    const auto& arr = r.array(node, path, key);
    for (std::size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_string()) throw ConfigError(Reader::join(path, key) + "[" + std::to_string(i) + "]", "must be a string");
        out.push_back(arr[i].get<std::string>());
    }
    return out;
}

}  // namespace

std::optional<Format> parse_format(std::string_view text)
{
    if (text == "table") return Format::table;
    if (text == "json") return Format::json;
    if (text == "csv") return Format::csv;
    return std::nullopt;
}

std::string report_to_json(const driver::RunReport& report)
{
    json root;
    root["scenario"] = {{"seed", report.seed},
                        {"device_count", report.device_count},
                        {"duration_ms", report.duration_ms},
                        {"devices_online", report.devices_online},
                        {"sessions", report.sessions}};

    json flows = json::array();
    for (const auto& f : report.flows)
        flows.push_back({{"key", key_json(f.key)},
                         {"subscriber", f.subscriber.to_string()},
                         {"app", f.app},
                         {"verdict", f.verdict},
                         {"pkts_up", f.pkts_up},
                         {"pkts_down", f.pkts_down},
                         {"bytes_up", f.bytes_up},
                         {"bytes_down", f.bytes_down},
                         {"forwarded_bytes", f.forwarded_bytes},
                         {"forwarded_bytes_after_classification", f.forwarded_bytes_after_classification},
                         {"dropped_pkts", f.dropped_pkts},
                         {"first_seen_ms", f.first_seen},
                         {"last_seen_ms", f.last_seen}});
    root["flows"] = std::move(flows);

    json subs = json::array();
    for (const auto& s : report.subscribers) {
        json apps = json::object();
        for (const auto& [name, c] : s.apps) apps[name] = {{"bytes", c.bytes}, {"packets", c.packets}, {"flows", c.flows}};
        subs.push_back({{"ip", s.ip.to_string()},
                        {"apps", std::move(apps)},
                        {"prioritized_packets", s.prioritized_packets},
                        {"heavy_user", s.heavy_user},
                        {"signaling_overload", s.signaling_overload}});
    }
    root["subscribers"] = std::move(subs);
    root["anomalies"] = {{"heavy_user", report.heavy_users}, {"signaling_overload", report.signaling_overload}};

    const auto& t = report.totals;
    root["totals"] = {{"flows", t.flows},
                      {"pkts_up", t.pkts_up},
                      {"pkts_down", t.pkts_down},
                      {"bytes_up", t.bytes_up},
                      {"bytes_down", t.bytes_down},
                      {"forwarded_bytes", t.forwarded_bytes},
                      {"dropped_pkts", t.dropped_pkts},
                      {"flows_by_app", counts_json(t.flows_by_app)},
                      {"flows_by_verdict", counts_json(t.flows_by_verdict)}};
    root["trace_digest"] = report.trace_digest;
    return root.dump(2) + "\n";
}

driver::RunReport report_from_json(std::string_view text)
{
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("report", std::string("invalid JSON: ") + e.what());
    }
    Reader r;
    r.exact_keys(root, "", {"scenario", "flows", "subscribers", "anomalies", "totals", "trace_digest"});

    driver::RunReport rep;
    const auto& sc = r.at(root, "", "scenario");
    r.exact_keys(sc, "scenario", {"seed", "device_count", "duration_ms", "devices_online", "sessions"});
    rep.seed = r.u64(sc, "scenario", "seed");
    rep.device_count = static_cast<std::uint32_t>(r.u64_max(sc, "scenario", "device_count", UINT32_MAX));
    rep.duration_ms = static_cast<SimTime>(r.u64_max(sc, "scenario", "duration_ms", INT64_MAX));
    rep.devices_online = static_cast<std::uint32_t>(r.u64_max(sc, "scenario", "devices_online", UINT32_MAX));
    rep.sessions = static_cast<std::uint32_t>(r.u64_max(sc, "scenario", "sessions", UINT32_MAX));

    const auto& flows = r.array(root, "", "flows");
    for (std::size_t i = 0; i < flows.size(); ++i) {
        const auto path = index_path("flows", i);
        const auto& f = flows[i];
        r.exact_keys(f, path,
                     {"key", "subscriber", "app", "verdict", "pkts_up", "pkts_down", "bytes_up", "bytes_down",
                      "forwarded_bytes", "forwarded_bytes_after_classification", "dropped_pkts", "first_seen_ms",
                      "last_seen_ms"});
        driver::FlowRow row;
        const auto& k = r.at(f, path, "key");
        const auto kpath = path + ".key";
        r.exact_keys(k, kpath, {"proto", "src_ip", "src_port", "dst_ip", "dst_port"});
        const auto proto = r.str(k, kpath, "proto");
        if (proto == "tcp")
            row.key.proto = net::kProtoTcp;
        else if (proto == "udp")
            row.key.proto = net::kProtoUdp;
        else
            throw ConfigError(kpath + ".proto", "must be tcp or udp");
        row.key.src_ip = r.ip(k, kpath, "src_ip");
        row.key.dst_ip = r.ip(k, kpath, "dst_ip");
        row.key.src_port = static_cast<std::uint16_t>(r.u64_max(k, kpath, "src_port", 65535));
        row.key.dst_port = static_cast<std::uint16_t>(r.u64_max(k, kpath, "dst_port", 65535));
        row.subscriber = r.ip(f, path, "subscriber");
        row.app = r.str(f, path, "app");
        row.verdict = r.str(f, path, "verdict");
        row.pkts_up = r.u64(f, path, "pkts_up");
        row.pkts_down = r.u64(f, path, "pkts_down");
        row.bytes_up = r.u64(f, path, "bytes_up");
        row.bytes_down = r.u64(f, path, "bytes_down");
        row.forwarded_bytes = r.u64(f, path, "forwarded_bytes");
        row.forwarded_bytes_after_classification = r.u64(f, path, "forwarded_bytes_after_classification");
        row.dropped_pkts = r.u64(f, path, "dropped_pkts");
        row.first_seen = static_cast<SimTime>(r.u64_max(f, path, "first_seen_ms", INT64_MAX));
        row.last_seen = static_cast<SimTime>(r.u64_max(f, path, "last_seen_ms", INT64_MAX));
        rep.flows.push_back(std::move(row));
    }

    const auto& subs = r.array(root, "", "subscribers");
    for (std::size_t i = 0; i < subs.size(); ++i) {
        const auto path = index_path("subscribers", i);
        const auto& s = subs[i];
        r.exact_keys(s, path, {"ip", "apps", "prioritized_packets", "heavy_user", "signaling_overload"});
        driver::SubscriberRow row;
        row.ip = r.ip(s, path, "ip");
        const auto& apps = r.at(s, path, "apps");
        if (!apps.is_object()) throw ConfigError(path + ".apps", "must be an object");
        for (const auto& [name, c] : apps.items()) {
            const auto apath = path + ".apps." + name;
            r.exact_keys(c, apath, {"bytes", "packets", "flows"});
            row.apps[name] = {r.u64(c, apath, "bytes"), r.u64(c, apath, "packets"), r.u64(c, apath, "flows")};
        }
        row.prioritized_packets = r.u64(s, path, "prioritized_packets");
        row.heavy_user = r.boolean(s, path, "heavy_user");
        row.signaling_overload = r.boolean(s, path, "signaling_overload");
        rep.subscribers.push_back(std::move(row));
    }

    const auto& an = r.at(root, "", "anomalies");
    r.exact_keys(an, "anomalies", {"heavy_user", "signaling_overload"});
    rep.heavy_users = string_list(r, an, "anomalies", "heavy_user");
    rep.signaling_overload = string_list(r, an, "anomalies", "signaling_overload");

    const auto& t = r.at(root, "", "totals");
    r.exact_keys(t, "totals",
                 {"flows", "pkts_up", "pkts_down", "bytes_up", "bytes_down", "forwarded_bytes", "dropped_pkts",
                  "flows_by_app", "flows_by_verdict"});
    rep.totals.flows = r.u64(t, "totals", "flows");
    rep.totals.pkts_up = r.u64(t, "totals", "pkts_up");
    rep.totals.pkts_down = r.u64(t, "totals", "pkts_down");
    rep.totals.bytes_up = r.u64(t, "totals", "bytes_up");
    rep.totals.bytes_down = r.u64(t, "totals", "bytes_down");
    rep.totals.forwarded_bytes = r.u64(t, "totals", "forwarded_bytes");
    rep.totals.dropped_pkts = r.u64(t, "totals", "dropped_pkts");
    rep.totals.flows_by_app = r.counts(t, "totals", "flows_by_app");
    rep.totals.flows_by_verdict = r.counts(t, "totals", "flows_by_verdict");
    rep.trace_digest = r.str(root, "", "trace_digest");

    if (rep.totals != driver::sum_rows(rep.flows)) throw ConfigError("totals", "do not equal the sum of the flow rows");
    return rep;
}

std::string report_to_csv(const driver::RunReport& report)
{
    std::ostringstream out;
    out << "subscriber,app,proto,bytes_up,bytes_down,forwarded,verdict\n";
    for (const auto& f : report.flows)
        out << f.subscriber.to_string() << ',' << f.app << ',' << proto_name(f.key.proto) << ',' << f.bytes_up << ','
            << f.bytes_down << ',' << f.forwarded_bytes << ',' << f.verdict << '\n';
    return out.str();
}

std::string report_to_table(const driver::RunReport& report)
{
    std::vector<std::vector<std::string>> rows{{"SUBSCRIBER", "APP", "FLOWS", "PACKETS", "BYTES", "FLAGS"}};
    for (const auto& s : report.subscribers) {
        std::string flags;
        if (s.heavy_user) flags += "heavy_user";
        if (s.signaling_overload) flags += flags.empty() ? "signaling_overload" : ",signaling_overload";
        if (flags.empty()) flags = "-";
        for (const auto& [app, c] : s.apps)
            rows.push_back({s.ip.to_string(), app, std::to_string(c.flows), std::to_string(c.packets),
                            std::to_string(c.bytes), flags});
    }

    std::vector<std::size_t> width(rows[0].size(), 0);
    for (const auto& row : rows)
        for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());

    std::ostringstream out;
    for (const auto& row : rows) {
        std::string line;
        for (std::size_t c = 0; c < row.size(); ++c) {
            // Text columns left-aligned, counters right-aligned.
            const bool numeric = c >= 2 && c <= 4;
            const std::string pad(width[c] - row[c].size(), ' ');
            line += numeric ? pad + row[c] : row[c] + pad;
            if (c + 1 < row.size()) line += "  ";
        }
        while (!line.empty() && line.back() == ' ') line.pop_back();
        out << line << '\n';
    }

    const auto& t = report.totals;
    out << '\n'
        << "devices " << report.devices_online << '/' << report.device_count << " online, " << report.sessions
        << " sessions, " << report.duration_ms << " ms, seed " << report.seed << '\n'
        << "flows " << t.flows << ", bytes up " << t.bytes_up << ", bytes down " << t.bytes_down << ", forwarded "
        << t.forwarded_bytes << ", dropped packets " << t.dropped_pkts << '\n';
    out << "heavy_user:";
    for (const auto& ip : report.heavy_users) out << ' ' << ip;
    out << (report.heavy_users.empty() ? " none\n" : "\n");
    out << "signaling_overload:";
    for (const auto& ip : report.signaling_overload) out << ' ' << ip;
    out << (report.signaling_overload.empty() ? " none\n" : "\n");
    return out.str();
}

std::string render(const driver::RunReport& report, Format format)
{
    switch (format) {
    case Format::json: return report_to_json(report);
    case Format::csv: return report_to_csv(report);
    case Format::table: return report_to_table(report);
    }
    return {};
}

}  // namespace fleet::cli
