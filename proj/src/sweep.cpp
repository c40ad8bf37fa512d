#include "cougar/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdio>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "cougar/report_io.hpp"
#include "cougar/scenario.hpp"
#include "csv.hpp"

namespace cougar {

namespace {

constexpr std::string_view kAxes[] = {"split", "degree", "body_validation", "body_batches", "parallelism",
                                      "failure_prob"};

std::string_view canonical_axis(std::string_view axis) {
  if (axis == "body_validation_ms") return "body_validation";
  return axis;
}

// Runs task(i) for i in [0, count) on up to `jobs` threads; rethrows the first
// failure after all workers stop.
template <class Task>
void parallel_for(std::size_t count, std::size_t jobs, Task task) {
  jobs = std::max<std::size_t>(1, std::min(jobs, count));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex mu;
  auto worker = [&] {
    while (true) {
      std::size_t i = next++;
      if (i >= count) return;
      try {
        task(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!error) error = std::current_exception();
        next = count;
        return;
      }
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
}

std::string sanitize(std::string s) {
  for (char& c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.' || c == '_')) c = '_';
  return s;
}

std::string opt_us(const std::optional<Duration>& d) { return d ? format_us(*d) : std::string("not_reached"); }

}  // namespace

bool sweepable_axis(std::string_view axis) {
  axis = canonical_axis(axis);
  return std::find(std::begin(kAxes), std::end(kAxes), axis) != std::end(kAxes);
}

std::vector<std::string> expand_sweep_values(const ScenarioConfig& base, std::string_view axis,
                                             std::string_view values) {
  axis = canonical_axis(axis);
  if (!sweepable_axis(axis)) throw ConfigError("axis '" + std::string(axis) + "' cannot be swept");
  values = csv::trim(values);
  std::vector<std::string> out;
  if (axis == "split" && values == "all") {
    const std::size_t total = base.close + base.random;
    for (std::size_t c = 0; c <= total; ++c)
      out.push_back("C" + std::to_string(c) + "-R" + std::to_string(total - c));
    return out;
  }
  if (values.find(':') != std::string_view::npos) {
    auto parts = csv::split(values, ':');
    if (parts.size() != 3) throw ConfigError("range must be start:stop:step");
    auto a = csv::parse_number<double>(parts[0]), b = csv::parse_number<double>(parts[1]),
         s = csv::parse_number<double>(parts[2]);
    if (!a || !b || !s || !(*s > 0) || *b < *a) throw ConfigError("invalid range '" + std::string(values) + "'");
    const auto steps = static_cast<std::size_t>(std::floor((*b - *a) / *s + 1e-9));
    for (std::size_t i = 0; i <= steps; ++i) out.push_back(csv::format_double(*a + static_cast<double>(i) * *s));
    return out;
  }
  for (auto v : csv::split(values, ','))
    if (!v.empty()) out.emplace_back(v);
  if (out.empty()) throw ConfigError("no sweep values given");
  return out;
}

void apply_axis_value(ScenarioConfig& cfg, std::string_view axis, std::string_view value) {
  axis = canonical_axis(axis);
  if (axis == "split") {
    unsigned c = 0, r = 0;
    std::string v(value);
    if (std::sscanf(v.c_str(), "C%u-R%u", &c, &r) != 2 ||
        v != "C" + std::to_string(c) + "-R" + std::to_string(r))
      throw ConfigError("split value '" + v + "' must look like C4-R4");
    cfg.close = c;
    cfg.random = r;
  } else if (axis == "degree") {
    cfg.set("degree", value);
    cfg.close = cfg.degree / 2;
    cfg.random = cfg.degree - cfg.close;
    cfg.perigee_outgoing = cfg.degree;
  } else if (axis == "body_validation") {
    cfg.set("body_validation_ms", value);
  } else if (sweepable_axis(axis)) {
    cfg.set(axis, value);
  } else {
    throw ConfigError("axis '" + std::string(axis) + "' cannot be swept");
  }
}

std::vector<SweepPoint> run_sweep(const ScenarioConfig& base, std::string_view axis,
                                  const std::vector<std::string>& values, const std::filesystem::path& out,
                                  std::size_t jobs, bool fixed_seed) {
  if (!sweepable_axis(axis)) throw ConfigError("axis '" + std::string(axis) + "' cannot be swept");
  const std::string ax(canonical_axis(axis));
  std::vector<ScenarioConfig> configs;
  std::vector<SweepPoint> points(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    ScenarioConfig cfg = base;
    apply_axis_value(cfg, ax, values[i]);
    cfg.seed = fixed_seed ? base.seed : base.seed + i;
    cfg.validate();
    configs.push_back(cfg);
    points[i].value = values[i];
    points[i].seed = cfg.seed;
    points[i].dir = sanitize(ax + "-" + values[i]);
  }
  std::filesystem::create_directories(out);
  parallel_for(values.size(), jobs, [&](std::size_t i) {
    MetricsReport r = run_scenario(configs[i]);
    write_report(r, out / points[i].dir);
    auto& p = points[i];
    p.coverage = coverage(r);
    p.p50 = dissemination_percentile(r, 50, Weighting::mining_power);
    p.p90 = dissemination_percentile(r, 90, Weighting::mining_power);
    p.p95 = dissemination_percentile(r, 95, Weighting::mining_power);
    p.p99 = dissemination_percentile(r, 99, Weighting::mining_power);
  });

  std::optional<Duration> best;
  for (const auto& p : points)
    if (p.p95 && (!best || *p.p95 < *best)) best = p.p95;
  for (auto& p : points) p.within_10ms_of_best = best && p.p95 && *p.p95 - *best <= std::chrono::milliseconds(10);

  std::string csv = "axis,value,seed,dir,coverage,p50_us,p90_us,p95_us,p99_us,within_10ms_of_best\n";
  for (const auto& p : points)
    csv += ax + "," + p.value + "," + std::to_string(p.seed) + "," + p.dir + "," + csv::format_double(p.coverage) +
           "," + opt_us(p.p50) + "," + opt_us(p.p90) + "," + opt_us(p.p95) + "," + opt_us(p.p99) + "," +
           (p.within_10ms_of_best ? "true" : "false") + "\n";
  write_text(out / "summary.csv", csv);
  return points;
}

std::vector<ComparisonRow> compare_protocols(const std::vector<ScenarioConfig>& configs,
                                             const std::filesystem::path& out, std::size_t jobs) {
  if (configs.empty()) throw ConfigError("compare needs at least one config");
  const auto shared = {"nodes", "seed", "trace_file", "servers_file", "distribution_file", "synth_clusters",
                       "synth_servers_per_cluster", "synth_intra_min_ms", "synth_intra_max_ms",
                       "synth_inter_min_ms", "synth_inter_max_ms", "synth_asymmetry_jitter",
                       "header_validation_ms", "body_validation_ms", "body_batches", "failure_prob", "mining"};
  for (const auto& c : configs) {
    c.validate();
    for (const char* key : shared)
      if (c.get(key) != configs.front().get(key))
        throw ConfigError("compared configs disagree on '" + std::string(key) + "': " + configs.front().get(key) +
                          " vs " + c.get(key));
  }
  for (std::size_t i = 0; i < configs.size(); ++i)
    for (std::size_t j = i + 1; j < configs.size(); ++j)
      if (configs[i].protocol == configs[j].protocol)
        throw ConfigError("protocol '" + std::string(protocol_name(configs[i].protocol)) + "' listed twice");

  std::filesystem::create_directories(out);
  std::vector<std::vector<std::optional<Duration>>> times(configs.size());
  parallel_for(configs.size(), jobs, [&](std::size_t i) {
    MetricsReport r = run_scenario(configs[i]);
    write_report(r, out / std::string(protocol_name(configs[i].protocol)));
    for (double q : kReportPercentiles) times[i].push_back(dissemination_percentile(r, q, Weighting::mining_power));
  });

  std::vector<ComparisonRow> rows;
  std::string csv = "protocol,percentile,time_us,rank\n";
  for (std::size_t qi = 0; qi < std::size(kReportPercentiles); ++qi) {
    std::vector<std::size_t> order(configs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const auto &ta = times[a][qi], &tb = times[b][qi];
      if (ta && tb) return *ta < *tb;
      return ta.has_value() && !tb.has_value();
    });
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
      std::size_t i = order[pos];
      ComparisonRow row{std::string(protocol_name(configs[i].protocol)), kReportPercentiles[qi], times[i][qi], pos + 1};
      csv += row.protocol + "," + csv::format_double(row.percentile) + "," + opt_us(row.time) + "," +
             std::to_string(row.rank) + "\n";
      rows.push_back(std::move(row));
    }
  }
  write_text(out / "comparison.csv", csv);
  return rows;
}

}  // namespace cougar
