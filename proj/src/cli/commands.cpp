#include "fleet/cli/commands.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fleet/cli/report_io.hpp"
#include "fleet/cli/scenario_file.hpp"
#include "fleet/driver/simulation.hpp"
#include "fleet/error.hpp"

namespace fleet::cli {

namespace {

struct RunArgs {
    std::string scenario;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint32_t> devices;
    std::string format = "table";
    std::string out;
    bool fail_on_anomaly = false;
};

struct ReportArgs {
    std::string path;
    std::string format = "table";
};

bool shown(LogLevel level, driver::LogLine::Level line)
{
    switch (level) {
    case LogLevel::quiet: return false;
    case LogLevel::info: return line != driver::LogLine::Level::trace;
    case LogLevel::trace: return true;
    }
    return false;
}

void write_out(const std::string& text, const std::string& path, std::ostream& out)
{
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw ConfigError("--out", "cannot write " + path);
    file << text;
    if (!file.flush()) throw ConfigError("--out", "cannot write " + path);
}

int cmd_run(const RunArgs& args, LogLevel level, std::ostream& out, std::ostream& err)
{
    const auto format = parse_format(args.format);
    if (!format) throw ConfigError("--format", "expected table, json or csv");
    auto scenario = parse_scenario(args.scenario);
    if (args.seed) scenario.seed = *args.seed;
    if (args.devices) scenario.device_count = *args.devices;
    scenario.validate();

    const auto outcome = driver::run_scenario(scenario);
    for (const auto& line : outcome.host_log)
        if (shown(level, line.level)) err << driver::format_log_line(line) << '\n';

    write_out(render(outcome.report, *format), args.out, out);
    if (args.fail_on_anomaly && outcome.report.any_anomaly()) {
        if (level != LogLevel::quiet) err << "anomaly flags raised\n";
        return kExitAnomaly;
    }
    return kExitOk;
}

int cmd_report(const ReportArgs& args, std::ostream& out)
{
    const auto format = parse_format(args.format);
    if (!format) throw ConfigError("--format", "expected table, json or csv");
    std::ifstream in(args.path, std::ios::binary);
    if (!in) throw ConfigError("report", "cannot read " + args.path);
    std::ostringstream text;
    text << in.rdbuf();
    out << render(report_from_json(text.str()), *format);
    return kExitOk;
}

int cmd_validate(const std::string& path, std::ostream& out)
{
    const auto s = parse_scenario(path);
    out << "ok: " << s.device_count << " devices, " << s.apps.size() << " apps, " << s.duration_ms << " ms, "
        << s.signatures.size() << " signatures, " << s.policies.policies().size() << " policies\n";
    return kExitOk;
}

}  // namespace

std::optional<LogLevel> parse_log_level(const char* value)
{
    if (value == nullptr || std::string_view(value).empty()) return LogLevel::info;
    const std::string_view v(value);
    if (v == "quiet") return LogLevel::quiet;
    if (v == "info") return LogLevel::info;
    if (v == "trace") return LogLevel::trace;
    return std::nullopt;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const char* fleet_log)
{
    CLI::App app{"Simulated smartphone fleet behind a DPI gateway", "fleet"};
    app.require_subcommand(1);

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "Run a scenario and print its report");
    run_cmd->add_option("scenario", run.scenario, "Scenario JSON file")->required();
    run_cmd->add_option("--seed", run.seed, "Override the scenario seed");
    run_cmd->add_option("--devices", run.devices, "Override the device count");
    run_cmd->add_option("--format", run.format, "table, json or csv");
    run_cmd->add_option("--out", run.out, "Write the report here instead of stdout");
    run_cmd->add_flag("--fail-on-anomaly", run.fail_on_anomaly, "Exit 1 when any anomaly flag is raised");

    ReportArgs report;
    auto* report_cmd = app.add_subcommand("report", "Render a saved JSON report");
    report_cmd->add_option("report", report.path, "Report JSON file")->required();
    report_cmd->add_option("--format", report.format, "table, json or csv");

    std::string validate_path;
    auto* validate_cmd = app.add_subcommand("validate", "Check a scenario file");
    validate_cmd->add_option("scenario", validate_path, "Scenario JSON file")->required();

    // CLI11 wants argv order with the program name first, reversed.
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitConfig;
    }

    const auto level = parse_log_level(fleet_log);
    if (!level) {
        err << "fleet: FLEET_LOG must be quiet, info or trace\n";
        return kExitConfig;
    }

    try {
        if (*run_cmd) return cmd_run(run, *level, out, err);
        if (*report_cmd) return cmd_report(report, out);
        if (*validate_cmd) return cmd_validate(validate_path, out);
    } catch (const ConfigError& e) {
        err << "fleet: " << e.what() << '\n';
        return kExitConfig;
    } catch (const Error& e) {
        err << "fleet: " << e.what() << '\n';
        return kExitConfig;
    }
    return kExitConfig;
}

}  // namespace fleet::cli
