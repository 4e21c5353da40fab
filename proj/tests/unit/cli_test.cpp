#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "fleet/cli/commands.hpp"
#include "fleet/cli/report_io.hpp"
#include "fleet/cli/scenario_file.hpp"
#include "fleet/driver/simulation.hpp"
#include "fleet/error.hpp"

using namespace fleet;
using namespace fleet::cli;

namespace {

const std::filesystem::path kData = std::filesystem::path(FLEET_SOURCE_DIR) / "data";

struct TempDir {
    std::filesystem::path path;
    TempDir()
    {
        static int n = 0;
        path = std::filesystem::temp_directory_path() / ("cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(n++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }

    std::filesystem::path write(const std::string& name, const std::string& text) const
    {
        const auto p = path / name;
        std::filesystem::create_directories(p.parent_path());
        std::ofstream(p) << text;
        return p;
    }
};

std::string field_of(const std::string& text, const std::filesystem::path& base = ".")
{
    try {
        parse_scenario_text(text, base);
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "<none>";
}

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result fleet_cmd(std::vector<std::string> args, const char* log = "quiet")
{
    std::ostringstream out, err;
    const int code = run_cli(args, out, err, log);
    return {code, out.str(), err.str()};
}

std::vector<std::string> split_lines(const std::string& text)
{
    std::vector<std::string> lines;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    return lines;
}

std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> cells;
    std::istringstream in(line);
    for (std::string cell; std::getline(in, cell, ',');) cells.push_back(cell);
    return cells;
}

driver::RunReport small_run()
{
    driver::Scenario s;
    s.device_count = 2;
    s.apps = {*device::builtin_manifest("skype"), *device::builtin_manifest("facebook")};
    s.duration_ms = 12'000;
    s.seed = 5;
    return driver::run_scenario(s).report;
}

}  // namespace

TEST_CASE("parse_scenario: a minimal file gets the documented defaults")
{
    const auto s = parse_scenario_text(R"({"device_count": 3, "apps": ["skype"], "duration_ms": 10000})", ".");
    CHECK(s.device_count == 3);
    CHECK(s.poll_interval_ms == 1000);
    CHECK(s.intent_delay_ms == 5000);
    CHECK(s.boot_stagger_ms == 100);
    CHECK(s.seed == 0);
    CHECK(s.pool.first == net::Ipv4Addr{{10, 0, 2, 100}});
    CHECK(s.pool.last == net::Ipv4Addr{{10, 0, 2, 199}});
    CHECK(s.signatures == dpi::load_signatures(kData / "signatures.rules"));
    CHECK(s.policies.policies() == dpi::load_policies(kData / "policies.rules").policies());
    CHECK(s.anomaly == dpi::AnomalyConfig{});
    CHECK_FALSE(s.leases_file.has_value());
    REQUIRE(s.apps.size() == 1);
    CHECK(s.apps[0].package == "com.skype.test");
}

TEST_CASE("parse_scenario: errors name the offending field")
{
    CHECK(field_of(R"({"device_count": 0, "apps": [], "duration_ms": 1000})") == "device_count");
    CHECK(field_of(R"({"device_count": 1, "apps": [], "duration_ms": 1000, "sead": 3})") == "sead");
    CHECK(field_of(R"({"apps": [], "duration_ms": 1000})") == "device_count");
    CHECK(field_of(R"({"device_count": 1, "apps": []})") == "duration_ms");
    CHECK(field_of(R"({"device_count": 1, "apps": ["skype", "whatsapp"], "duration_ms": 10000})") == "apps[1]");
    CHECK(field_of(R"({"device_count": 1, "apps": ["skype", "game"], "duration_ms": 9999})") == "duration_ms");
    CHECK(field_of(R"({"device_count": 1, "apps": [], "duration_ms": 1000, "pool": {"frist": "10.0.2.5"}})") ==
          "pool.frist");
    CHECK(field_of(R"({"device_count": 1, "apps": [], "duration_ms": 1000, "pool": {"first": "10.0.2.300"}})") ==
          "pool.first");
    CHECK(field_of(R"({"device_count": 1, "apps": [], "duration_ms": 1000, "anomaly": {"window_ms": 0}})") ==
          "anomaly.window_ms");
    CHECK(field_of(R"({"device_count": -4, "apps": [], "duration_ms": 1000})") == "device_count");
    CHECK(field_of(R"({"device_count": 1, "apps": [], "duration_ms": 1000, "seed": "x"})") == "seed");
    CHECK(field_of(R"([1, 2])") == "scenario");
    CHECK(field_of(R"({"device_count": 1,)") == "scenario");
    CHECK(field_of(R"({"device_count": 1, "apps": [], "duration_ms": 1000,
                       "pool": {"first": "10.0.2.1", "last": "10.0.2.9", "router": "10.0.2.254"}})") == "pool.first");
}

TEST_CASE("parse_scenario: manifest and rule paths resolve against the scenario file")
{
    TempDir dir;
    auto manifest = device::manifest_to_json(*device::builtin_manifest("game"));
    manifest["package"] = "org.example.racer";
    manifest["apk_name"] = "Racer_2.0.apk";
    dir.write("apps/racer.json", manifest.dump());
    dir.write("rules/p.rules", "app=* action=block\n");
    const auto path = dir.write("s/scenario.json", R"({"device_count": 1, "apps": ["../apps/racer.json", "unknown"],
        "duration_ms": 10000, "policies": "../rules/p.rules"})");
    const auto s = parse_scenario(path);
    REQUIRE(s.apps.size() == 2);
    CHECK(s.apps[0].package == "org.example.racer");
    CHECK(s.policies.fallback().kind == dpi::ActionKind::block);

    dir.write("apps/broken.json", R"({"package": "nodots"})");
    const auto bad = dir.write("s/bad.json", R"({"device_count": 1, "apps": ["../apps/broken.json"], "duration_ms": 10000})");
    try {
        parse_scenario(bad);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.field().starts_with("apps[0].manifest."));
    }
}

TEST_CASE("shipped scenarios validate")
{
    for (const auto& entry : std::filesystem::directory_iterator(kData / "scenarios")) {
        CAPTURE(entry.path().string());
        const auto r = fleet_cmd({"validate", entry.path().string()});
        CHECK(r.code == kExitOk);
        CHECK(r.out.starts_with("ok: "));
    }
}

TEST_CASE("report json: canonical and a strict inverse")
{
    const auto report = small_run();
    REQUIRE(report.flows.size() >= 3);
    const auto text = report_to_json(report);
    const auto parsed = report_from_json(text);
    CHECK(parsed == report);
    CHECK(report_to_json(parsed) == text);
    CHECK(text.back() == '\n');

    // Keys come out sorted at every level.
    CHECK(text.find("\"anomalies\"") < text.find("\"flows\""));
    CHECK(text.find("\"flows\"") < text.find("\"scenario\""));

    auto tampered = text;
    const auto at = tampered.find("\"bytes_up\": ");
    tampered.insert(at + 12, "1");
    try {
        report_from_json(tampered);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.field() == "totals");
    }
    CHECK_THROWS_AS(report_from_json("{}"), ConfigError);
    CHECK_THROWS_AS(report_from_json(R"({"scenario": 1})"), ConfigError);
}

TEST_CASE("report csv: one row per flow and column sums equal the json totals")
{
    const auto report = small_run();
    const auto lines = split_lines(report_to_csv(report));
    REQUIRE(!lines.empty());
    CHECK(lines[0] == "subscriber,app,proto,bytes_up,bytes_down,forwarded,verdict");
    CHECK(lines.size() == report.flows.size() + 1);

    std::uint64_t up = 0, down = 0, fwd = 0;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto cells = split_csv(lines[i]);
        REQUIRE(cells.size() == 7);
        up += std::stoull(cells[3]);
        down += std::stoull(cells[4]);
        fwd += std::stoull(cells[5]);
    }
    const auto totals = report_from_json(report_to_json(report)).totals;
    CHECK(up == totals.bytes_up);
    CHECK(down == totals.bytes_down);
    CHECK(fwd == totals.forwarded_bytes);

    driver::RunReport empty;
    empty.totals = driver::sum_rows(empty.flows);
    CHECK(report_to_csv(empty) == "subscriber,app,proto,bytes_up,bytes_down,forwarded,verdict\n");

    driver::RunReport three;
    for (std::uint16_t p = 1; p <= 3; ++p)
        three.flows.push_back({{net::Ipv4Addr{{10, 0, 2, 100}}, net::Ipv4Addr{{198, 51, 100, 1}}, p, 80, net::kProtoTcp},
                               net::Ipv4Addr{{10, 0, 2, 100}}, "unknown", "allow", 1, 1, 100, 200, 300, 300, 0, p, p});
    three.totals = driver::sum_rows(three.flows);
    CHECK(split_lines(report_to_csv(three)).size() == 4);
}

TEST_CASE("report table: aligned columns, one row per subscriber and app")
{
    const auto report = small_run();
    const auto lines = split_lines(report_to_table(report));
    std::size_t rows = 0;
    for (const auto& s : report.subscribers) rows += s.apps.size();
    REQUIRE(lines.size() > rows + 1);
    const auto app_col = lines[0].find("APP");
    const auto bytes_end = lines[0].find("BYTES") + 5;
    for (std::size_t i = 1; i <= rows; ++i) {
        CHECK(lines[i].find_first_not_of(' ', app_col) == app_col);
        CHECK(lines[i][app_col - 1] == ' ');
        CHECK(lines[i][bytes_end - 1] != ' ');
        CHECK(lines[i][bytes_end] == ' ');
    }
    CHECK(lines[rows + 1].empty());
}

TEST_CASE("fleet run: formats, determinism and exit codes")
{
    TempDir dir;
    const auto scenario = dir.write("s.json", R"({"device_count": 2, "apps": ["facebook", "game"], "duration_ms": 10000})");

    const auto a = fleet_cmd({"run", scenario.string(), "--seed", "7", "--format", "json"});
    const auto b = fleet_cmd({"run", scenario.string(), "--seed", "7", "--format", "json"});
    CHECK(a.code == kExitOk);
    CHECK(a.out == b.out);
    const auto parsed = report_from_json(a.out);
    CHECK(parsed.seed == 7);

    const auto c = fleet_cmd({"run", scenario.string(), "--seed", "8", "--format", "json"});
    CHECK(report_from_json(c.out).trace_digest != parsed.trace_digest);

    const auto more = fleet_cmd({"run", scenario.string(), "--devices", "3", "--format", "csv"});
    CHECK(more.code == kExitOk);
    CHECK(report_from_json(fleet_cmd({"run", scenario.string(), "--devices", "3", "--format", "json"}).out).device_count == 3);

    const auto out_path = dir.path / "report.json";
    const auto to_file = fleet_cmd({"run", scenario.string(), "--seed", "7", "--format", "json", "--out", out_path.string()});
    CHECK(to_file.code == kExitOk);
    CHECK(to_file.out.empty());
    std::ifstream in(out_path);
    std::stringstream saved;
    saved << in.rdbuf();
    CHECK(saved.str() == a.out);

    const auto rendered = fleet_cmd({"report", out_path.string(), "--format", "json"});
    CHECK(rendered.code == kExitOk);
    CHECK(rendered.out == a.out);
    CHECK(fleet_cmd({"report", out_path.string(), "--format", "csv"}).out == report_to_csv(parsed));
    CHECK(fleet_cmd({"report", out_path.string()}).out == report_to_table(parsed));

    const auto missing = fleet_cmd({"run", (dir.path / "missing.json").string()});
    CHECK(missing.code == kExitConfig);
    CHECK(!missing.err.empty());
    CHECK(fleet_cmd({"run", scenario.string(), "--format", "xml"}).code == kExitConfig);
    CHECK(fleet_cmd({"run", scenario.string(), "--devices", "0"}).code == kExitConfig);
    CHECK(fleet_cmd({"report", (dir.path / "nope.json").string()}).code == kExitConfig);
    CHECK(fleet_cmd({"report", scenario.string()}).code == kExitConfig);
    CHECK(fleet_cmd({"frobnicate"}).code == kExitConfig);
    CHECK(fleet_cmd({}).code == kExitConfig);
    CHECK(fleet_cmd({"run", scenario.string()}, "loud").code == kExitConfig);
    CHECK(fleet_cmd({"--help"}).code == kExitOk);
}

TEST_CASE("fleet run: --fail-on-anomaly gates on anomaly flags")
{
    TempDir dir;
    const auto noisy = dir.write("noisy.json", R"({"device_count": 2, "apps": ["game"], "duration_ms": 6000,
        "anomaly": {"heavy_bytes": 100000}})");
    const auto quiet = dir.write("quiet.json", R"({"device_count": 2, "apps": ["game"], "duration_ms": 6000})");
    CHECK(fleet_cmd({"run", noisy.string(), "--fail-on-anomaly"}).code == kExitAnomaly);
    CHECK(fleet_cmd({"run", noisy.string()}).code == kExitOk);
    CHECK(fleet_cmd({"run", quiet.string(), "--fail-on-anomaly"}).code == kExitOk);
    const auto flagged = report_from_json(fleet_cmd({"run", noisy.string(), "--format", "json"}).out);
    CHECK(flagged.heavy_users.size() == 2);
}

TEST_CASE("FLEET_LOG selects host log verbosity")
{
    TempDir dir;
    const auto scenario = dir.write("s.json", R"({"device_count": 1, "apps": ["skype"], "duration_ms": 6000})");
    CHECK(fleet_cmd({"run", scenario.string()}, "quiet").err.empty());
    const auto info = fleet_cmd({"run", scenario.string()}, nullptr).err;
    CHECK(info.find("connected to 10.0.2.100:5555") != std::string::npos);
    CHECK(info.find("connecting to") == std::string::npos);
    CHECK(fleet_cmd({"run", scenario.string()}, "trace").err.find("connecting to") != std::string::npos);
}
