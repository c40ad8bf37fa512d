// Command-line front end. Talks to the simulator only through the C API.
#include <cstdio>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cougar/cougar.h"

namespace {

struct ConfigDeleter {
  void operator()(cougar_config* c) const { cougar_config_destroy(c); }
};
using ConfigPtr = std::unique_ptr<cougar_config, ConfigDeleter>;

struct ReportDeleter {
  void operator()(cougar_report* r) const { cougar_report_destroy(r); }
};
struct TraceDeleter {
  void operator()(cougar_trace* t) const { cougar_trace_destroy(t); }
};
struct TopologyDeleter {
  void operator()(cougar_topology* t) const { cougar_topology_destroy(t); }
};

class Failure {
 public:
  explicit Failure(cougar_status s) : status(s) {}
  cougar_status status;
};

void check(cougar_status s) {
  if (s != COUGAR_OK) throw Failure(s);
}

int exit_code(cougar_status s) {
  switch (s) {
    case COUGAR_ERR_CONFIG: return 2;
    case COUGAR_ERR_IO:
    case COUGAR_ERR_TOPOLOGY: return 3;
    default: return 4;
  }
}

struct Common {
  std::vector<std::string> configs;
  std::vector<std::string> sets;
  std::uint64_t seed = 0;
  bool has_seed = false;
  std::string out;
  std::size_t jobs = 1;
};

ConfigPtr make_config(const std::string& path, const Common& common) {
  cougar_config* raw = nullptr;
  if (path.empty())
    check(cougar_config_create(&raw));
  else
    check(cougar_config_load(path.c_str(), &raw));
  ConfigPtr cfg(raw);
  for (const auto& kv : common.sets) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "error: --set expects key=value, got '%s'\n", kv.c_str());
      throw Failure(COUGAR_ERR_CONFIG);
    }
    check(cougar_config_set(cfg.get(), kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()));
  }
  if (common.has_seed) check(cougar_config_set(cfg.get(), "seed", std::to_string(common.seed).c_str()));
  return cfg;
}

void print_summary(const cougar_report* report) {
  double cov = 0;
  check(cougar_report_coverage(report, &cov));
  std::printf("coverage %.6f\n", cov);
  for (double q : {50.0, 90.0, 95.0, 99.0}) {
    double t = 0;
    int reached = 0;
    check(cougar_report_percentile(report, q, 1, &t, &reached));
    if (reached)
      std::printf("p%g %.3f ms\n", q, t / 1000.0);
    else
      std::printf("p%g not reached\n", q);
  }
  for (std::size_t i = 0; i < cougar_report_warning_count(report); ++i)
    std::fprintf(stderr, "warning: %s\n", cougar_report_warning(report, i));
}

void add_common(CLI::App* cmd, Common& c, bool multi_config = false) {
  if (multi_config)
    cmd->add_option("--config", c.configs, "Config file (repeatable, one per protocol)")->check(CLI::ExistingFile);
  else
    cmd->add_option("--config", c.configs, "Config file")->expected(0, 1)->check(CLI::ExistingFile);
  cmd->add_option("--set", c.sets, "Override one key, key=value (repeatable)");
  cmd->add_option_function<std::uint64_t>(
      "--seed", [&c](const std::uint64_t& s) { c.seed = s, c.has_seed = true; }, "Base seed");
  cmd->add_option("--out", c.out, "Output directory")->required();
  cmd->add_option("--jobs", c.jobs, "Concurrent runs")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Block dissemination simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(cougar_version()));

  Common run_opts, sweep_opts, cmp_opts;
  auto* run = app.add_subcommand("run", "Run one scenario");
  add_common(run, run_opts);

  auto* sweep = app.add_subcommand("sweep", "Run a scenario once per value of one parameter");
  add_common(sweep, sweep_opts);
  std::string axis, values;
  bool fixed_seed = false;
  sweep->add_option("--axis", axis, "split, degree, body_validation, body_batches, parallelism or failure_prob")
      ->required();
  sweep->add_option("--values", values, "a,b,c | start:stop:step | all (split only)")->required();
  sweep->add_flag("--fixed-seed", fixed_seed, "Use the base seed for every value");

  auto* compare = app.add_subcommand("compare", "Run several protocols on the same network");
  add_common(compare, cmp_opts, true);
  std::vector<std::string> protocols;
  compare->add_option("--protocols", protocols, "Protocols to run from one base config")->delimiter(',');

  auto* synth = app.add_subcommand("synth-trace", "Write a clustered synthetic latency trace");
  std::string synth_out, synth_config;
  std::vector<std::string> synth_sets;
  std::uint64_t synth_seed = 1;
  int clusters = -1, per_cluster = -1;
  synth->add_option("--config", synth_config, "Config file supplying synth_* keys")->check(CLI::ExistingFile);
  synth->add_option("--set", synth_sets, "Override one key, key=value (repeatable)");
  synth->add_option("--clusters", clusters, "Number of clusters");
  synth->add_option("--servers-per-cluster", per_cluster, "Servers per cluster");
  synth->add_option("--seed", synth_seed, "Seed");
  synth->add_option("--out", synth_out, "Output directory (rtt.csv, servers.csv)")->required();

  auto* proj = app.add_subcommand("project", "Place N nodes onto trace servers");
  std::string trace_rtt, trace_servers, dist_file, topo_out;
  std::size_t nodes = 0;
  std::uint64_t proj_seed = 1;
  proj->add_option("--trace", trace_rtt, "RTT matrix CSV")->required()->check(CLI::ExistingFile);
  proj->add_option("--servers", trace_servers, "Server list CSV")->required()->check(CLI::ExistingFile);
  proj->add_option("--distribution", dist_file, "Node distribution CSV (default: uniform)")
      ->check(CLI::ExistingFile);
  proj->add_option("--nodes", nodes, "Node count")->required()->check(CLI::PositiveNumber);
  proj->add_option("--seed", proj_seed, "Seed");
  proj->add_option("--out", topo_out, "Topology CSV to write")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      auto cfg = make_config(run_opts.configs.empty() ? "" : run_opts.configs.front(), run_opts);
      cougar_report* raw = nullptr;
      check(cougar_run(cfg.get(), &raw));
      std::unique_ptr<cougar_report, ReportDeleter> report(raw);
      check(cougar_report_write(report.get(), run_opts.out.c_str()));
      print_summary(report.get());
    } else if (*sweep) {
      auto cfg = make_config(sweep_opts.configs.empty() ? "" : sweep_opts.configs.front(), sweep_opts);
      std::size_t runs = 0;
      check(cougar_sweep(cfg.get(), axis.c_str(), values.c_str(), sweep_opts.out.c_str(), sweep_opts.jobs,
                         fixed_seed, &runs));
      std::printf("%zu runs written to %s\n", runs, sweep_opts.out.c_str());
    } else if (*compare) {
      std::vector<ConfigPtr> owned;
      if (!protocols.empty()) {
        if (cmp_opts.configs.size() > 1) {
          std::fprintf(stderr, "error: --protocols takes a single base --config\n");
          return 2;
        }
        for (const auto& p : protocols) {
          owned.push_back(make_config(cmp_opts.configs.empty() ? "" : cmp_opts.configs.front(), cmp_opts));
          check(cougar_config_set(owned.back().get(), "protocol", p.c_str()));
        }
      } else {
        if (cmp_opts.configs.size() < 2) {
          std::fprintf(stderr, "error: compare needs --protocols or at least two --config files\n");
          return 2;
        }
        for (const auto& path : cmp_opts.configs) owned.push_back(make_config(path, cmp_opts));
      }
      std::vector<const cougar_config*> list;
      for (const auto& c : owned) list.push_back(c.get());
      check(cougar_compare(list.data(), list.size(), cmp_opts.out.c_str(), cmp_opts.jobs));
      std::printf("comparison written to %s/comparison.csv\n", cmp_opts.out.c_str());
    } else if (*synth) {
      Common c;
      c.sets = synth_sets;
      auto cfg = make_config(synth_config, c);
      if (clusters >= 0) check(cougar_config_set(cfg.get(), "synth_clusters", std::to_string(clusters).c_str()));
      if (per_cluster >= 0)
        check(cougar_config_set(cfg.get(), "synth_servers_per_cluster", std::to_string(per_cluster).c_str()));
      cougar_trace* raw = nullptr;
      check(cougar_trace_synth(cfg.get(), synth_seed, &raw));
      std::unique_ptr<cougar_trace, TraceDeleter> trace(raw);
      std::error_code ec;
      std::filesystem::create_directories(synth_out, ec);
      const std::string rtt = synth_out + "/rtt.csv", servers = synth_out + "/servers.csv";
      check(cougar_trace_save(trace.get(), rtt.c_str(), servers.c_str()));
      std::printf("%zu servers written to %s\n", cougar_trace_server_count(trace.get()), synth_out.c_str());
    } else if (*proj) {
      cougar_trace* raw = nullptr;
      check(cougar_trace_load(trace_rtt.c_str(), trace_servers.c_str(), &raw));
      std::unique_ptr<cougar_trace, TraceDeleter> trace(raw);
      cougar_topology* topo_raw = nullptr;
      check(cougar_topology_project(trace.get(), dist_file.empty() ? nullptr : dist_file.c_str(), nodes, proj_seed,
                                    &topo_raw));
      std::unique_ptr<cougar_topology, TopologyDeleter> topo(topo_raw);
      check(cougar_topology_save(topo.get(), topo_out.c_str()));
      std::printf("%zu nodes written to %s\n", cougar_topology_size(topo.get()), topo_out.c_str());
    }
  } catch (const Failure& f) {
    const char* msg = cougar_last_error();
    if (msg && *msg) std::fprintf(stderr, "error: %s\n", msg);
    return exit_code(f.status);
  }
  return 0;
}
