#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cougar/config.hpp"
#include "cougar/metrics.hpp"

namespace cougar {

// Axes a sweep may vary: split (C/R division of a fixed link budget), degree,
// body_validation (ms), body_batches, parallelism, failure_prob.
bool sweepable_axis(std::string_view axis);

// Expands "a,b,c", "start:stop:step" (inclusive) or, for split, "all".
std::vector<std::string> expand_sweep_values(const ScenarioConfig& base, std::string_view axis,
                                             std::string_view values);

void apply_axis_value(ScenarioConfig& cfg, std::string_view axis, std::string_view value);

struct SweepPoint {
  std::string value;
  std::uint64_t seed = 0;
  std::string dir;
  double coverage = 0;
  std::optional<Duration> p50, p90, p95, p99;
  bool within_10ms_of_best = false;
};

// One report directory per value plus summary.csv under `out`. Seeds are
// base + value index unless fixed_seed is set. Runs use up to `jobs` threads.
std::vector<SweepPoint> run_sweep(const ScenarioConfig& base, std::string_view axis,
                                  const std::vector<std::string>& values, const std::filesystem::path& out,
                                  std::size_t jobs, bool fixed_seed = false);

struct ComparisonRow {
  std::string protocol;
  double percentile;
  std::optional<Duration> time;
  std::size_t rank;
};

// Runs each config (they must agree on nodes, latency source, delays, body
// batches, failure probability and seed), writes one report directory per
// protocol and comparison.csv ranking them at each listed percentile.
std::vector<ComparisonRow> compare_protocols(const std::vector<ScenarioConfig>& configs,
                                             const std::filesystem::path& out, std::size_t jobs);

}  // namespace cougar
