#include "cougar/report_io.hpp"

#include <cstdio>
#include <fstream>
#include "json.hpp"

#include "cougar/latency.hpp"
#include "csv.hpp"

namespace cougar {

namespace {

using Json = nlohmann::ordered_json;

double us(std::int64_t ns) { return static_cast<double>(ns) / 1000.0; }

Json us_or_null(std::optional<Duration> d) { return d ? Json(us(d->count())) : Json(nullptr); }

Json times_us(const std::vector<std::int64_t>& ns) {
  Json arr = Json::array();
  for (auto t : ns) arr.push_back(t == kUnreached ? Json(nullptr) : Json(us(t)));
  return arr;
}

std::string pct_label(double q) { return csv::format_double(q); }

Json percentile_table(const MetricsReport& r, bool optimal) {
  Json out = Json::object();
  for (auto [name, w] : {std::pair{"nodes", Weighting::nodes}, std::pair{"mining_power", Weighting::mining_power}}) {
    Json row = Json::object();
    for (double q : kReportPercentiles)
      row[pct_label(q)] = us_or_null(optimal ? optimal_percentile(r, q, w) : dissemination_percentile(r, q, w));
    out[name] = row;
  }
  return out;
}

Json histogram(const std::map<std::uint32_t, std::uint64_t>& h) {
  Json out = Json::object();
  for (auto [k, v] : h) out[std::to_string(k)] = v;
  return out;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

std::string format_us(Duration d) { return csv::format_double(us(d.count())); }

std::string report_json(const MetricsReport& r) {
  Json j;
  j["protocol"] = r.protocol;
  j["seed"] = r.seed;
  j["scenario_hash"] = hex64(r.scenario_hash);
  j["nodes"] = r.nodes;
  j["blocks_measured"] = r.blocks.size();

  Json cfg = Json::object();
  for (const auto& [k, v] : r.config_entries) cfg[k] = v;
  j["config"] = cfg;
  j["config_text"] = r.effective_config;

  Json meta;
  meta["time_unit"] = "us";
  meta["mining_power"] = r.mining == MiningKind::exponential ? "exponential" : "uniform";
  meta["mining_power_rule"] = r.mining == MiningKind::exponential
                                  ? "weights drawn i.i.d. from Exp(1), then normalized to sum 1"
                                  : "equal weight per node";
  meta["rtt_aggregate"] = "mean of rtt_pings pings, each scaled by 1 + U(-rtt_noise, rtt_noise)";
  meta["curve_bucket_us"] = 5000;
  meta["near_optimal_threshold_us"] = 10000;
  j["metadata"] = meta;

  j["coverage"] = coverage(r);
  j["percentiles"] = percentile_table(r, false);
  j["optimal_percentiles"] = percentile_table(r, true);

  Json curves = Json::object();
  curves["bucket_us"] = 5000;
  for (auto [name, w] : {std::pair{"nodes", Weighting::nodes}, std::pair{"mining_power", Weighting::mining_power}}) {
    Json pts = Json::array();
    for (const auto& p : uninformed_curve(r, w)) pts.push_back(p.fraction_uninformed);
    curves[name] = pts;
  }
  j["fraction_uninformed"] = curves;

  Json msg;
  msg["headers_sent"] = r.counts.headers_sent;
  msg["headers_received"] = r.counts.headers_received;
  msg["headers_lost_to_teardown"] = r.counts.headers_lost_to_teardown;
  msg["headers_suppressed"] = r.counts.headers_suppressed;
  msg["pulls_sent"] = r.counts.pulls_sent;
  msg["bodies_sent"] = r.counts.bodies_sent;
  msg["bodies_lost"] = r.counts.bodies_lost;
  msg["bodies_received"] = r.counts.bodies_received;
  msg["timeouts"] = r.counts.timeouts;
  j["messages"] = msg;

  Json ov;
  ov["components"] = r.overlay.components;
  ov["largest_component"] = r.overlay.largest_component;
  ov["mean_degree"] = r.overlay.mean_degree;
  ov["max_degree"] = r.overlay.max_degree;
  j["overlay"] = ov;

  j["redundancy_histogram"] = histogram(redundancy_histogram(r));
  j["responder_rank_histogram"] = histogram(responder_rank_histogram(r));
  if (!r.perigee_established_churn.empty()) j["perigee_established_churn"] = r.perigee_established_churn;
  j["warnings"] = r.warnings;

  Json blocks = Json::array();
  for (const auto& b : r.blocks) {
    Json jb;
    jb["id"] = b.id;
    jb["miner"] = b.miner;
    jb["validated_us"] = times_us(b.validated_ns);
    blocks.push_back(jb);
  }
  j["blocks"] = blocks;
  return j.dump(2) + "\n";
}

std::string curve_csv(const MetricsReport& r) {
  std::string out = "time_us,fraction_uninformed\n";
  for (const auto& p : uninformed_curve(r, Weighting::nodes))
    out += format_us(p.t) + "," + csv::format_double(p.fraction_uninformed) + "\n";
  return out;
}

std::string percentiles_csv(const MetricsReport& r) {
  std::string out = "protocol,percentile,time_us\n";
  auto rows = [&](const std::string& name, bool optimal) {
    for (double q : kReportPercentiles) {
      auto d = optimal ? optimal_percentile(r, q, Weighting::mining_power)
                       : dissemination_percentile(r, q, Weighting::mining_power);
      out += name + "," + pct_label(q) + "," + (d ? format_us(*d) : std::string("not_reached")) + "\n";
    }
  };
  rows(r.protocol, false);
  rows("optimal", true);
  return out;
}

std::string deliveries_csv(const MetricsReport& r) {
  std::string out = "block_id,node_id,first_header_us,body_validated_us,redundant_bodies,responder_rank\n";
  auto t = [](std::int64_t ns) { return ns == kUnreached ? std::string() : csv::format_double(us(ns)); };
  for (const auto& b : r.blocks)
    for (std::size_t v = 0; v < b.validated_ns.size(); ++v)
      out += std::to_string(b.id) + "," + std::to_string(v) + "," + t(b.first_header_ns[v]) + "," +
             t(b.validated_ns[v]) + "," + std::to_string(b.redundant[v]) + "," + std::to_string(b.responder_rank[v]) +
             "\n";
  return out;
}

std::string overlay_json(const MetricsReport& r) {
  Json nodes = Json::array();
  for (const auto& s : r.snapshot) {
    Json n;
    n["node_id"] = s.id;
    n["server_id"] = s.server;
    n["close"] = s.close;
    n["random"] = s.random;
    n["incoming"] = s.incoming;
    nodes.push_back(n);
  }
  Json j;
  j["protocol"] = r.protocol;
  j["nodes"] = nodes;
  return j.dump(2) + "\n";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw LoadError("cannot write " + path.string());
  out << text;
  if (!out) throw LoadError("write failed for " + path.string());
}

void write_report(const MetricsReport& r, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw LoadError("cannot create " + dir.string() + ": " + ec.message());
  write_text(dir / "report.json", report_json(r));
  write_text(dir / "curve.csv", curve_csv(r));
  write_text(dir / "percentiles.csv", percentiles_csv(r));
  bool deliveries = false, snapshot = false;
  for (const auto& [k, v] : r.config_entries) {
    if (k == "delivery_trace") deliveries = v == "true";
    if (k == "overlay_snapshot") snapshot = v == "true";
  }
  if (deliveries) write_text(dir / "deliveries.csv", deliveries_csv(r));
  if (snapshot) write_text(dir / "overlay.json", overlay_json(r));
}

}  // namespace cougar
