#pragma once

#include <string>
#include <string_view>

#include "fleet/driver/report.hpp"

namespace fleet::cli {

enum class Format { table, json, csv };

// Accepts "table", "json", "csv".
std::optional<Format> parse_format(std::string_view text);

// Canonical: sorted keys, two-space indent, integers only, trailing newline.
// Equal reports serialize to equal bytes.
std::string report_to_json(const driver::RunReport& report);

// Strict inverse of report_to_json. Throws ConfigError naming the bad field,
// including when the totals disagree with the flow rows.
driver::RunReport report_from_json(std::string_view text);

// One flow per row under `subscriber,app,proto,bytes_up,bytes_down,forwarded,verdict`.
std::string report_to_csv(const driver::RunReport& report);

// Aligned per-subscriber, per-app table followed by totals and anomalies.
std::string report_to_table(const driver::RunReport& report);

std::string render(const driver::RunReport& report, Format format);

}  // namespace fleet::cli
