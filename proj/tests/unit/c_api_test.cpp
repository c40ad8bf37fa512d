#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "cougar/cougar.h"

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("cougar_capi_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t count_lines(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

// Runs the CLI with stdout and stderr captured into `log`; returns the exit code.
int cli(const std::string& args, const fs::path& log) {
  std::string cmd = std::string(COUGAR_CLI_PATH) + " " + args + " >" + log.string() + " 2>&1";
  int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

struct Config {
  cougar_config* h = nullptr;
  Config() { EXPECT_EQ(cougar_config_create(&h), COUGAR_OK); }
  ~Config() { cougar_config_destroy(h); }
};

TEST(CApi, ConfigRoundTrip) {
  Config c;
  EXPECT_EQ(cougar_config_set(c.h, "nodes", "77"), COUGAR_OK);
  const char* v = nullptr;
  ASSERT_EQ(cougar_config_get(c.h, "nodes", &v), COUGAR_OK);
  EXPECT_STREQ(v, "77");
  EXPECT_EQ(cougar_config_set(c.h, "wat", "1"), COUGAR_ERR_CONFIG);
  EXPECT_NE(std::string(cougar_last_error()).find("wat"), std::string::npos);
  EXPECT_EQ(cougar_config_apply_text(c.h, "close = 3\nrandom = 5\n"), COUGAR_OK);
  const char* text = nullptr;
  ASSERT_EQ(cougar_config_render(c.h, &text), COUGAR_OK);
  EXPECT_NE(std::string(text).find("random = 5"), std::string::npos);
  EXPECT_EQ(cougar_config_validate(c.h), COUGAR_OK);
  EXPECT_EQ(cougar_config_set(c.h, "failure_prob", "1"), COUGAR_OK);
  EXPECT_EQ(cougar_config_validate(c.h), COUGAR_ERR_CONFIG);
}

TEST(CApi, NullHandlesRejected) {
  EXPECT_EQ(cougar_config_create(nullptr), COUGAR_ERR_INVALID_ARG);
  EXPECT_EQ(cougar_run(nullptr, nullptr), COUGAR_ERR_INVALID_ARG);
  double t = 0;
  int reached = 0;
  EXPECT_EQ(cougar_report_percentile(nullptr, 50, 0, &t, &reached), COUGAR_ERR_INVALID_ARG);
  EXPECT_EQ(cougar_report_warning_count(nullptr), 0u);
  cougar_config_destroy(nullptr);
  cougar_report_destroy(nullptr);
  EXPECT_NE(cougar_version(), nullptr);
  cougar_config* missing = nullptr;
  EXPECT_EQ(cougar_config_load("/nonexistent/x.conf", &missing), COUGAR_ERR_IO);
}

TEST(CApi, RunAndQuery) {
  Config c;
  cougar_config_apply_text(c.h, "nodes = 100\nblocks = 5\nrejuvenation_warmup_rounds = 5\n");
  cougar_report* r = nullptr;
  ASSERT_EQ(cougar_run(c.h, &r), COUGAR_OK) << cougar_last_error();
  double cov = 0;
  EXPECT_EQ(cougar_report_coverage(r, &cov), COUGAR_OK);
  EXPECT_DOUBLE_EQ(cov, 1.0);
  double p50 = 0, p95 = 0;
  int reached = 0;
  ASSERT_EQ(cougar_report_percentile(r, 50, 1, &p50, &reached), COUGAR_OK);
  EXPECT_EQ(reached, 1);
  ASSERT_EQ(cougar_report_percentile(r, 95, 1, &p95, &reached), COUGAR_OK);
  EXPECT_LE(p50, p95);
  EXPECT_EQ(cougar_report_percentile(r, 0, 1, &p50, &reached), COUGAR_ERR_INVALID_ARG);
  EXPECT_EQ(cougar_report_warning(r, 1000), nullptr);
  auto dir = scratch("run");
  EXPECT_EQ(cougar_report_write(r, (dir / "rep").c_str()), COUGAR_OK);
  EXPECT_TRUE(fs::exists(dir / "rep" / "report.json"));
  cougar_report_destroy(r);
  fs::remove_all(dir);
}

TEST(CApi, TraceAndProjection) {
  Config c;
  cougar_trace* t = nullptr;
  ASSERT_EQ(cougar_trace_synth(c.h, 5, &t), COUGAR_OK);
  EXPECT_EQ(cougar_trace_server_count(t), 60u);
  auto dir = scratch("trace");
  auto rtt = dir / "rtt.csv", servers = dir / "servers.csv";
  ASSERT_EQ(cougar_trace_save(t, rtt.c_str(), servers.c_str()), COUGAR_OK);
  cougar_trace* back = nullptr;
  ASSERT_EQ(cougar_trace_load(rtt.c_str(), servers.c_str(), &back), COUGAR_OK);
  EXPECT_EQ(cougar_trace_server_count(back), 60u);
  cougar_topology* topo = nullptr;
  ASSERT_EQ(cougar_topology_project(back, nullptr, 1, 1, &topo), COUGAR_OK);
  EXPECT_EQ(cougar_topology_size(topo), 1u);
  cougar_topology_destroy(topo);
  EXPECT_EQ(cougar_topology_project(back, nullptr, 0, 1, &topo), COUGAR_ERR_INVALID_ARG);
  EXPECT_EQ(cougar_trace_load(servers.c_str(), rtt.c_str(), &back), COUGAR_ERR_TOPOLOGY);
  cougar_trace_destroy(t);
  cougar_trace_destroy(back);
  fs::remove_all(dir);
}

TEST(Cli, RunIsByteIdentical) {
  auto dir = scratch("cli_run");
  const std::string args = "run --set nodes=150 --set blocks=5 --set rejuvenation_warmup_rounds=5 --seed 9 --out ";
  ASSERT_EQ(cli(args + (dir / "a").string(), dir / "a.log"), 0) << slurp(dir / "a.log");
  ASSERT_EQ(cli(args + (dir / "b").string(), dir / "b.log"), 0);
  for (const char* f : {"report.json", "curve.csv", "percentiles.csv"}) {
    EXPECT_FALSE(slurp(dir / "a" / f).empty());
    EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
  }
  fs::remove_all(dir);
}

TEST(Cli, ConfigFileAndUnknownKey) {
  auto dir = scratch("cli_cfg");
  std::ofstream(dir / "bad.conf") << "nodes = 50\nfanciness = 11\n";
  int rc = cli("run --config " + (dir / "bad.conf").string() + " --out " + (dir / "o").string(), dir / "log");
  EXPECT_NE(rc, 0);
  EXPECT_NE(slurp(dir / "log").find("fanciness"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Cli, CloseOnlyWarnsButSucceeds) {
  auto dir = scratch("cli_c8");
  int rc = cli("run --set nodes=600 --set blocks=3 --set close=8 --set random=0 --set rejuvenation_warmup_rounds=40"
               " --out " + (dir / "o").string(),
               dir / "log");
  EXPECT_EQ(rc, 0) << slurp(dir / "log");
  EXPECT_NE(slurp(dir / "o" / "report.json").find("overlay disconnected"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Cli, SynthTraceAndProject) {
  auto dir = scratch("cli_synth");
  ASSERT_EQ(cli("synth-trace --seed 4 --out " + (dir / "t").string(), dir / "log"), 0) << slurp(dir / "log");
  EXPECT_EQ(count_lines(dir / "t" / "servers.csv"), 61u);
  const std::string base = "project --trace " + (dir / "t" / "rtt.csv").string() + " --servers " +
                           (dir / "t" / "servers.csv").string();
  ASSERT_EQ(cli(base + " --nodes 1 --out " + (dir / "one.csv").string(), dir / "log"), 0);
  EXPECT_EQ(count_lines(dir / "one.csv"), 2u);
  ASSERT_EQ(cli(base + " --nodes 16000 --out " + (dir / "big.csv").string(), dir / "log"), 0);
  EXPECT_EQ(count_lines(dir / "big.csv"), 16001u);
  EXPECT_NE(cli(base + " --nodes 0 --out " + (dir / "zero.csv").string(), dir / "log"), 0);
  fs::remove_all(dir);
}

TEST(Cli, SweepAndCompare) {
  auto dir = scratch("cli_sweep");
  const std::string common = " --set nodes=100 --set blocks=3 --set rejuvenation_warmup_rounds=5 --set perigee_rounds=2"
                             " --set perigee_blocks_per_round=3 --jobs 2";
  ASSERT_EQ(cli("sweep --axis split --values C2-R6,C4-R4" + common + " --out " + (dir / "s").string(), dir / "log"), 0)
      << slurp(dir / "log");
  EXPECT_EQ(count_lines(dir / "s" / "summary.csv"), 3u);
  ASSERT_EQ(cli("compare --protocols cougar,perigee,random" + common + " --out " + (dir / "c").string(), dir / "log"),
            0)
      << slurp(dir / "log");
  EXPECT_EQ(count_lines(dir / "c" / "comparison.csv"), 13u);
  EXPECT_NE(cli("sweep --axis nodes --values 1,2 --out " + (dir / "x").string(), dir / "log"), 0);
  fs::remove_all(dir);
}

}  // namespace
