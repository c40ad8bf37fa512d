#include "cougar/cougar.h"

#include <memory>
#include <string>

#include "cougar/config.hpp"
#include "cougar/latency.hpp"
#include "cougar/metrics.hpp"
#include "cougar/report_io.hpp"
#include "cougar/scenario.hpp"
#include "cougar/sweep.hpp"

struct cougar_config {
  cougar::ScenarioConfig cfg;
  std::string scratch;
};

struct cougar_report {
  cougar::MetricsReport report;
};

struct cougar_trace {
  std::shared_ptr<const cougar::LatencyTrace> trace;
};

struct cougar_topology {
  cougar::NodeTopology topology;
};

namespace {

thread_local std::string g_last_error;

cougar_status fail(cougar_status code, const std::string& message) {
  g_last_error = message;
  return code;
}

// Maps exceptions escaping the core onto status codes.
template <class F>
cougar_status guarded(F&& f) {
  g_last_error.clear();
  try {
    f();
    return COUGAR_OK;
  } catch (const cougar::ConfigError& e) {
    return fail(COUGAR_ERR_CONFIG, e.what());
  } catch (const cougar::LoadError& e) {
    return fail(COUGAR_ERR_TOPOLOGY, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(COUGAR_ERR_IO, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(COUGAR_ERR_INVALID_ARG, e.what());
  } catch (const std::exception& e) {
    return fail(COUGAR_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(COUGAR_ERR_INTERNAL, "unknown error");
  }
}

#define REQUIRE(cond, what) \
  if (!(cond)) return fail(COUGAR_ERR_INVALID_ARG, what)

}  // namespace

extern "C" {

const char* cougar_last_error(void) { return g_last_error.c_str(); }

const char* cougar_version(void) { return "1.0.0"; }

cougar_status cougar_config_create(cougar_config** out) {
  REQUIRE(out, "null output handle");
  return guarded([&] { *out = new cougar_config{}; });
}

cougar_status cougar_config_load(const char* path, cougar_config** out) {
  REQUIRE(path && out, "null argument");
  return guarded([&] {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec)) throw std::filesystem::filesystem_error(
        "cannot open config", std::filesystem::path(path), std::make_error_code(std::errc::no_such_file_or_directory));
    auto cfg = cougar::load_config(path);
    *out = new cougar_config{std::move(cfg), {}};
  });
}

cougar_status cougar_config_apply_text(cougar_config* cfg, const char* text) {
  REQUIRE(cfg && text, "null argument");
  return guarded([&] { cougar::apply_config_text(cfg->cfg, text); });
}

cougar_status cougar_config_set(cougar_config* cfg, const char* key, const char* value) {
  REQUIRE(cfg && key && value, "null argument");
  return guarded([&] { cfg->cfg.set(key, value); });
}

cougar_status cougar_config_get(cougar_config* cfg, const char* key, const char** value) {
  REQUIRE(cfg && key && value, "null argument");
  return guarded([&] {
    cfg->scratch = cfg->cfg.get(key);
    *value = cfg->scratch.c_str();
  });
}

cougar_status cougar_config_render(cougar_config* cfg, const char** text) {
  REQUIRE(cfg && text, "null argument");
  return guarded([&] {
    cfg->scratch = cfg->cfg.render();
    *text = cfg->scratch.c_str();
  });
}

cougar_status cougar_config_validate(const cougar_config* cfg) {
  REQUIRE(cfg, "null config");
  return guarded([&] { cfg->cfg.validate(); });
}

void cougar_config_destroy(cougar_config* cfg) { delete cfg; }

cougar_status cougar_run(const cougar_config* cfg, cougar_report** out) {
  REQUIRE(cfg && out, "null argument");
  return guarded([&] { *out = new cougar_report{cougar::run_scenario(cfg->cfg)}; });
}

cougar_status cougar_report_write(const cougar_report* report, const char* dir) {
  REQUIRE(report && dir, "null argument");
  cougar_status st = guarded([&] { cougar::write_report(report->report, dir); });
  return st == COUGAR_ERR_TOPOLOGY ? COUGAR_ERR_IO : st;
}

cougar_status cougar_report_percentile(const cougar_report* report, double q, int weighting, double* time_us,
                                       int* reached) {
  REQUIRE(report && time_us && reached, "null argument");
  REQUIRE(weighting == 0 || weighting == 1, "weighting must be 0 (nodes) or 1 (mining power)");
  return guarded([&] {
    auto d = cougar::dissemination_percentile(
        report->report, q, weighting == 0 ? cougar::Weighting::nodes : cougar::Weighting::mining_power);
    *reached = d.has_value();
    *time_us = d ? static_cast<double>(d->count()) / 1000.0 : 0.0;
  });
}

cougar_status cougar_report_coverage(const cougar_report* report, double* fraction) {
  REQUIRE(report && fraction, "null argument");
  *fraction = cougar::coverage(report->report);
  return COUGAR_OK;
}

cougar_status cougar_report_hash(const cougar_report* report, uint64_t* hash) {
  REQUIRE(report && hash, "null argument");
  *hash = report->report.scenario_hash;
  return COUGAR_OK;
}

size_t cougar_report_warning_count(const cougar_report* report) { return report ? report->report.warnings.size() : 0; }

const char* cougar_report_warning(const cougar_report* report, size_t index) {
  if (!report || index >= report->report.warnings.size()) return nullptr;
  return report->report.warnings[index].c_str();
}

void cougar_report_destroy(cougar_report* report) { delete report; }

cougar_status cougar_sweep(const cougar_config* base, const char* axis, const char* values, const char* out_dir,
                           size_t jobs, int fixed_seed, size_t* runs) {
  REQUIRE(base && axis && values && out_dir, "null argument");
  return guarded([&] {
    auto list = cougar::expand_sweep_values(base->cfg, axis, values);
    auto points = cougar::run_sweep(base->cfg, axis, list, out_dir, jobs, fixed_seed != 0);
    if (runs) *runs = points.size();
  });
}

cougar_status cougar_compare(const cougar_config* const* configs, size_t count, const char* out_dir, size_t jobs) {
  REQUIRE(configs && out_dir, "null argument");
  for (size_t i = 0; i < count; ++i) REQUIRE(configs[i], "null config in list");
  return guarded([&] {
    std::vector<cougar::ScenarioConfig> list;
    for (size_t i = 0; i < count; ++i) list.push_back(configs[i]->cfg);
    cougar::compare_protocols(list, out_dir, jobs);
  });
}

cougar_status cougar_trace_synth(const cougar_config* cfg, uint64_t seed, cougar_trace** out) {
  REQUIRE(cfg && out, "null argument");
  return guarded([&] {
    cougar::Rng rng(seed, cougar::Stream::topology);
    *out = new cougar_trace{std::make_shared<cougar::LatencyTrace>(cougar::synth_trace(cfg->cfg.synth, rng))};
  });
}

cougar_status cougar_trace_load(const char* rtt_csv, const char* servers_csv, cougar_trace** out) {
  REQUIRE(rtt_csv && servers_csv && out, "null argument");
  return guarded([&] {
    *out = new cougar_trace{std::make_shared<cougar::LatencyTrace>(cougar::load_trace(rtt_csv, servers_csv))};
  });
}

cougar_status cougar_trace_save(const cougar_trace* trace, const char* rtt_csv, const char* servers_csv) {
  REQUIRE(trace && rtt_csv && servers_csv, "null argument");
  cougar_status st = guarded([&] { cougar::save_trace(*trace->trace, rtt_csv, servers_csv); });
  return st == COUGAR_ERR_TOPOLOGY ? COUGAR_ERR_IO : st;
}

size_t cougar_trace_server_count(const cougar_trace* trace) { return trace ? trace->trace->size() : 0; }

void cougar_trace_destroy(cougar_trace* trace) { delete trace; }

cougar_status cougar_topology_project(const cougar_trace* trace, const char* distribution_csv, size_t n,
                                      uint64_t seed, cougar_topology** out) {
  REQUIRE(trace && out, "null argument");
  return guarded([&] {
    auto dist = distribution_csv && *distribution_csv ? cougar::load_distribution(distribution_csv)
                                                      : cougar::uniform_distribution(*trace->trace);
    cougar::Rng rng(seed, cougar::Stream::topology);
    *out = new cougar_topology{cougar::project(trace->trace, dist, n, rng)};
  });
}

size_t cougar_topology_size(const cougar_topology* topology) { return topology ? topology->topology.size() : 0; }

cougar_status cougar_topology_save(const cougar_topology* topology, const char* path) {
  REQUIRE(topology && path, "null argument");
  cougar_status st = guarded([&] { cougar::save_topology(topology->topology, path); });
  return st == COUGAR_ERR_TOPOLOGY ? COUGAR_ERR_IO : st;
}

void cougar_topology_destroy(cougar_topology* topology) { delete topology; }

}  // extern "C"
