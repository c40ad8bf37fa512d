#pragma once

#include <filesystem>
#include <string>

#include "cougar/metrics.hpp"

namespace cougar {

// Percentiles listed in every report and comparison table.
inline constexpr double kReportPercentiles[] = {50, 90, 95, 99};

std::string report_json(const MetricsReport& report);
std::string curve_csv(const MetricsReport& report);
std::string percentiles_csv(const MetricsReport& report);
std::string deliveries_csv(const MetricsReport& report);
std::string overlay_json(const MetricsReport& report);

// report.json, curve.csv and percentiles.csv, plus deliveries.csv and
// overlay.json when the config asks for them. Creates `dir` as needed.
void write_report(const MetricsReport& report, const std::filesystem::path& dir);

// Microseconds with sub-microsecond precision kept, e.g. "150.5".
std::string format_us(Duration d);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace cougar
