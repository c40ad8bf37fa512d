#include "cougar/latency.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <unordered_map>

#include "csv.hpp"

namespace cougar {

namespace {

[[noreturn]] void fail_at(const std::string& path, std::size_t line, const std::string& what) {
  throw LoadError(path + ":" + std::to_string(line) + ": " + what);
}

constexpr std::string_view kContinentNames[kContinentCount] = {"Africa", "Europe", "NorthAmerica",
                                                               "SouthAmerica", "Oceania", "Asia"};

}  // namespace

std::string_view continent_name(Continent c) { return kContinentNames[static_cast<int>(c)]; }

std::optional<Continent> parse_continent(std::string_view label) {
  for (int i = 0; i < kContinentCount; ++i)
    if (kContinentNames[i] == label) return static_cast<Continent>(i);
  return std::nullopt;
}

LatencyTrace::LatencyTrace(std::vector<Server> servers, std::vector<std::int64_t> rtt_us)
    : servers_(std::move(servers)), rtt_us_(std::move(rtt_us)) {
  if (rtt_us_.size() != servers_.size() * servers_.size())
    throw std::invalid_argument("LatencyTrace: matrix size does not match server count");
  for (std::size_t a = 0; a < servers_.size(); ++a) {
    for (std::size_t b = 0; b < servers_.size(); ++b) {
      auto v = rtt_us_[a * servers_.size() + b];
      if (v <= 0) throw std::invalid_argument("LatencyTrace: non-positive rtt");
    }
  }
}

std::optional<ServerIndex> LatencyTrace::find(std::string_view id) const {
  for (std::size_t i = 0; i < servers_.size(); ++i)
    if (servers_[i].id == id) return static_cast<ServerIndex>(i);
  return std::nullopt;
}

LatencyTrace load_trace(const std::filesystem::path& rtt_csv, const std::filesystem::path& servers_csv) {
  std::vector<Server> servers;
  std::unordered_map<std::string, ServerIndex> index;
  {
    csv::Reader in(servers_csv.string());
    if (!in.ok()) throw LoadError("cannot open " + servers_csv.string());
    std::string line;
    std::size_t no = 0;
    bool header = true;
    while (in.next(line, no)) {
      auto f = csv::split(line);
      if (header) {
        header = false;
        if (!f.empty() && f[0] == "server_id") continue;
      }
      if (f.size() != 6) fail_at(in.path(), no, "expected 6 fields, got " + std::to_string(f.size()));
      Server s;
      s.id = std::string(f[0]);
      s.city = std::string(f[1]);
      s.country = std::string(f[2]);
      auto c = parse_continent(f[3]);
      if (!c) fail_at(in.path(), no, "unknown continent '" + std::string(f[3]) + "'");
      s.continent = *c;
      auto lat = csv::parse_number<double>(f[4]);
      auto lon = csv::parse_number<double>(f[5]);
      if (!lat || !lon) fail_at(in.path(), no, "malformed coordinates");
      s.latitude = *lat;
      s.longitude = *lon;
      if (s.id.empty()) fail_at(in.path(), no, "empty server id");
      if (!index.emplace(s.id, static_cast<ServerIndex>(servers.size())).second)
        fail_at(in.path(), no, "duplicate server '" + s.id + "'");
      servers.push_back(std::move(s));
    }
  }
  if (servers.empty()) throw LoadError(servers_csv.string() + ": no servers");

  const std::size_t n = servers.size();
  std::vector<std::int64_t> rtt(n * n, 0);
  {
    csv::Reader in(rtt_csv.string());
    if (!in.ok()) throw LoadError("cannot open " + rtt_csv.string());
    std::string line;
    std::size_t no = 0;
    bool header = true;
    while (in.next(line, no)) {
      auto f = csv::split(line);
      if (header) {
        header = false;
        if (!f.empty() && f[0] == "src_id") continue;
      }
      if (f.size() != 3) fail_at(in.path(), no, "expected src_id,dst_id,rtt_us");
      auto a = index.find(std::string(f[0]));
      auto b = index.find(std::string(f[1]));
      if (a == index.end()) fail_at(in.path(), no, "unknown server '" + std::string(f[0]) + "'");
      if (b == index.end()) fail_at(in.path(), no, "unknown server '" + std::string(f[1]) + "'");
      auto v = csv::parse_number<std::int64_t>(f[2]);
      if (!v) fail_at(in.path(), no, "malformed rtt '" + std::string(f[2]) + "'");
      if (*v <= 0) fail_at(in.path(), no, "non-positive rtt");
      auto& slot = rtt[a->second * n + b->second];
      if (slot != 0) fail_at(in.path(), no, "duplicate pair " + std::string(f[0]) + "->" + std::string(f[1]));
      slot = *v;
    }
  }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (rtt[a * n + b] == 0)
        throw LoadError(rtt_csv.string() + ": missing rtt " + servers[a].id + "→" + servers[b].id);
  return LatencyTrace(std::move(servers), std::move(rtt));
}

void save_trace(const LatencyTrace& trace, const std::filesystem::path& rtt_csv,
                const std::filesystem::path& servers_csv) {
  std::ofstream s(servers_csv);
  if (!s) throw LoadError("cannot write " + servers_csv.string());
  s.precision(17);
  s << "server_id,city,country,continent,lat,lon\n";
  for (const auto& sv : trace.servers())
    s << sv.id << ',' << sv.city << ',' << sv.country << ',' << continent_name(sv.continent) << ','
      << sv.latitude << ',' << sv.longitude << '\n';

  std::ofstream r(rtt_csv);
  if (!r) throw LoadError("cannot write " + rtt_csv.string());
  r << "src_id,dst_id,rtt_us\n";
  for (ServerIndex a = 0; a < trace.size(); ++a)
    for (ServerIndex b = 0; b < trace.size(); ++b)
      r << trace.server(a).id << ',' << trace.server(b).id << ',' << trace.rtt_us(a, b) << '\n';
}

LatencyTrace synth_trace(const SynthTraceParams& p, Rng& rng) {
  if (p.clusters < 1 || p.servers_per_cluster < 1)
    throw std::invalid_argument("synth_trace: need at least one cluster and one server per cluster");
  if (p.assign_continents && p.clusters > kContinentCount)
    throw std::invalid_argument("synth_trace: more than 6 clusters cannot be mapped to continents");
  if (p.intra_min <= Duration::zero() || p.inter_min <= Duration::zero() || p.intra_max < p.intra_min ||
      p.inter_max < p.inter_min)
    throw std::invalid_argument("synth_trace: rtt ranges must be positive and ordered");
  if (p.intra_max >= p.inter_min)
    throw std::invalid_argument("synth_trace: intra range must lie below inter range");
  if (p.asymmetry_jitter < 0 || p.asymmetry_jitter >= 1)
    throw std::invalid_argument("synth_trace: asymmetry_jitter must be in [0,1)");
  if (p.self_rtt < from_us(1)) throw std::invalid_argument("synth_trace: self rtt must be at least 1us");

  const auto k = static_cast<std::size_t>(p.clusters);
  const std::size_t n = k * static_cast<std::size_t>(p.servers_per_cluster);

  std::vector<Server> servers;
  servers.reserve(n);
  for (std::size_t c = 0; c < k; ++c) {
    for (int i = 0; i < p.servers_per_cluster; ++i) {
      Server s;
      s.id = "c" + std::to_string(c) + "s" + std::to_string(i);
      s.city = "cluster" + std::to_string(c) + "-" + std::to_string(i);
      s.country = "C" + std::to_string(c);
      s.continent = p.assign_continents ? static_cast<Continent>(c % kContinentCount) : Continent::Europe;
      s.latitude = 0;
      s.longitude = -180.0 + 360.0 * static_cast<double>(c) / static_cast<double>(k);
      servers.push_back(std::move(s));
    }
  }

  auto draw_us = [&](Duration lo, Duration hi) {
    return rng.uniform(static_cast<double>(lo.count()) / 1e3, static_cast<double>(hi.count()) / 1e3);
  };

  std::vector<double> pair_base(k * k, 0);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a + 1; b < k; ++b) pair_base[a * k + b] = pair_base[b * k + a] = draw_us(p.inter_min, p.inter_max);

  std::vector<std::int64_t> rtt(n * n, 0);
  const auto spc = static_cast<std::size_t>(p.servers_per_cluster);
  for (std::size_t a = 0; a < n; ++a) {
    rtt[a * n + a] = p.self_rtt.count() / 1000;
    for (std::size_t b = a + 1; b < n; ++b) {
      std::size_t ca = a / spc, cb = b / spc;
      bool intra = ca == cb;
      Duration lo = intra ? p.intra_min : p.inter_min;
      Duration hi = intra ? p.intra_max : p.inter_max;
      double base = intra ? draw_us(lo, hi) : pair_base[ca * k + cb];
      for (auto [src, dst] : {std::pair{a, b}, std::pair{b, a}}) {
        double v = base;
        if (p.asymmetry_jitter > 0) v *= 1.0 + p.asymmetry_jitter * rng.uniform(-1.0, 1.0);
        v = std::clamp(v, static_cast<double>(lo.count()) / 1e3, static_cast<double>(hi.count()) / 1e3);
        rtt[src * n + dst] = std::max<std::int64_t>(1, std::llround(v));
      }
    }
  }
  return LatencyTrace(std::move(servers), std::move(rtt));
}

NodeDistribution load_distribution(const std::filesystem::path& path) {
  csv::Reader in(path.string());
  if (!in.ok()) throw LoadError("cannot open " + path.string());
  NodeDistribution d;
  std::string line;
  std::size_t no = 0;
  bool header = true;
  while (in.next(line, no)) {
    auto f = csv::split(line);
    if (header) {
      header = false;
      if (f.size() == 2 && f[0] == "server_id") continue;
    }
    if (f.size() != 2) fail_at(in.path(), no, "expected server_id,weight");
    auto w = csv::parse_number<double>(f[1]);
    if (!w || !std::isfinite(*w) || *w < 0) fail_at(in.path(), no, "weight must be a finite non-negative number");
    d.weights.emplace_back(std::string(f[0]), *w);
  }
  return d;
}

NodeDistribution uniform_distribution(const LatencyTrace& trace) {
  NodeDistribution d;
  for (const auto& s : trace.servers()) d.weights.emplace_back(s.id, 1.0);
  return d;
}

NodeTopology::NodeTopology(std::shared_ptr<const LatencyTrace> trace, std::vector<ServerIndex> placement)
    : trace_(std::move(trace)), placement_(std::move(placement)) {
  if (!trace_) throw std::invalid_argument("NodeTopology: null trace");
  for (auto s : placement_)
    if (s >= trace_->size()) throw std::invalid_argument("NodeTopology: placement refers to unknown server");
}

std::vector<std::size_t> proportional_counts(const LatencyTrace& trace, const NodeDistribution& dist,
                                             std::size_t n) {
  std::vector<double> w(trace.size(), 0.0);
  for (const auto& [id, weight] : dist.weights) {
    auto s = trace.find(id);
    if (!s) throw std::invalid_argument("distribution refers to unknown server '" + id + "'");
    if (!std::isfinite(weight) || weight < 0) throw std::invalid_argument("distribution weight must be finite and >= 0");
    w[*s] += weight;
  }
  double total = std::accumulate(w.begin(), w.end(), 0.0);
  if (!(total > 0)) throw std::invalid_argument("distribution has no positive weight");

  std::vector<std::size_t> counts(w.size());
  std::vector<double> remainder(w.size());
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    double quota = static_cast<double>(n) * w[i] / total;
    counts[i] = static_cast<std::size_t>(std::floor(quota));
    remainder[i] = quota - static_cast<double>(counts[i]);
    assigned += counts[i];
  }
  std::vector<std::size_t> order(w.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t i = 0; assigned < n; ++i, ++assigned) ++counts[order[i % order.size()]];
  return counts;
}

NodeTopology project(std::shared_ptr<const LatencyTrace> trace, const NodeDistribution& dist, std::size_t n,
                     Rng& rng) {
  if (n < 1) throw std::invalid_argument("project: need at least one node");
  auto counts = proportional_counts(*trace, dist, n);
  std::vector<ServerIndex> placement;
  placement.reserve(n);
  for (std::size_t s = 0; s < counts.size(); ++s)
    placement.insert(placement.end(), counts[s], static_cast<ServerIndex>(s));
  rng.shuffle(std::span(placement));
  return NodeTopology(std::move(trace), std::move(placement));
}

void save_topology(const NodeTopology& topology, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw LoadError("cannot write " + path.string());
  out << "node_id,server_id\n";
  for (NodeId v = 0; v < topology.size(); ++v) out << v << ',' << topology.trace().server(topology.server_of(v)).id << '\n';
}

}  // namespace cougar
