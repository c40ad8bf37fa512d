#include "cougar/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include "cougar/dissemination.hpp"
#include "cougar/rng.hpp"
#include "csv.hpp"

namespace cougar {

namespace {


std::string fmt_ms(Duration d) { return csv::format_double(static_cast<double>(d.count()) / 1e6); }
std::string fmt_s(Duration d) { return csv::format_double(static_cast<double>(d.count()) / 1e9); }

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expect) {
  throw ConfigError("invalid value '" + std::string(value) + "' for key '" + std::string(key) + "': expected " +
                    std::string(expect));
}

std::uint64_t to_u64(std::string_view key, std::string_view v) {
  auto x = csv::parse_number<std::uint64_t>(v);
  if (!x) bad_value(key, v, "a non-negative integer");
  return *x;
}

std::size_t to_size(std::string_view key, std::string_view v) { return static_cast<std::size_t>(to_u64(key, v)); }

double to_double(std::string_view key, std::string_view v) {
  auto x = csv::parse_number<double>(v);
  if (!x || !std::isfinite(*x)) bad_value(key, v, "a number");
  return *x;
}

Duration to_ms(std::string_view key, std::string_view v) {
  double ms = to_double(key, v);
  if (ms < 0) bad_value(key, v, "a non-negative duration in milliseconds");
  return from_ms(ms);
}

Duration to_s(std::string_view key, std::string_view v) {
  double s = to_double(key, v);
  if (s < 0) bad_value(key, v, "a non-negative duration in seconds");
  return from_ms(s * 1000.0);
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad_value(key, v, "true or false");
}

struct Field {
  std::string key;
  std::function<void(ScenarioConfig&, std::string_view)> set;
  std::function<std::string(const ScenarioConfig&)> get;
};

#define SIZE_FIELD(name, member)                                                         \
  Field {                                                                                \
    name, [](ScenarioConfig& c, std::string_view v) { c.member = to_size(name, v); },    \
        [](const ScenarioConfig& c) { return std::to_string(c.member); }                \
  }
#define MS_FIELD(name, member)                                                        \
  Field {                                                                             \
    name, [](ScenarioConfig& c, std::string_view v) { c.member = to_ms(name, v); },   \
        [](const ScenarioConfig& c) { return fmt_ms(c.member); }                      \
  }
#define S_FIELD(name, member)                                                        \
  Field {                                                                            \
    name, [](ScenarioConfig& c, std::string_view v) { c.member = to_s(name, v); },   \
        [](const ScenarioConfig& c) { return fmt_s(c.member); }                      \
  }
#define STR_FIELD(name, member)                                                          \
  Field {                                                                                \
    name, [](ScenarioConfig& c, std::string_view v) { c.member = std::string(v); },      \
        [](const ScenarioConfig& c) { return c.member; }                                 \
  }
#define BOOL_FIELD(name, member)                                                         \
  Field {                                                                                \
    name, [](ScenarioConfig& c, std::string_view v) { c.member = to_bool(name, v); },    \
        [](const ScenarioConfig& c) { return std::string(c.member ? "true" : "false"); } \
  }
#define DOUBLE_FIELD(name, member)                                                        \
  Field {                                                                                 \
    name, [](ScenarioConfig& c, std::string_view v) { c.member = to_double(name, v); },   \
        [](const ScenarioConfig& c) { return csv::format_double(c.member); }                      \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      Field{"protocol", [](ScenarioConfig& c, std::string_view v) { c.protocol = parse_protocol(v); },
            [](const ScenarioConfig& c) { return std::string(protocol_name(c.protocol)); }},
      SIZE_FIELD("nodes", nodes),
      Field{"seed", [](ScenarioConfig& c, std::string_view v) { c.seed = to_u64("seed", v); },
            [](const ScenarioConfig& c) { return std::to_string(c.seed); }},
      STR_FIELD("trace_file", trace_file),
      STR_FIELD("servers_file", servers_file),
      STR_FIELD("distribution_file", distribution_file),
      Field{"synth_clusters", [](ScenarioConfig& c, std::string_view v) { c.synth.clusters = static_cast<int>(to_size("synth_clusters", v)); },
            [](const ScenarioConfig& c) { return std::to_string(c.synth.clusters); }},
      Field{"synth_servers_per_cluster",
            [](ScenarioConfig& c, std::string_view v) {
              c.synth.servers_per_cluster = static_cast<int>(to_size("synth_servers_per_cluster", v));
            },
            [](const ScenarioConfig& c) { return std::to_string(c.synth.servers_per_cluster); }},
      MS_FIELD("synth_intra_min_ms", synth.intra_min),
      MS_FIELD("synth_intra_max_ms", synth.intra_max),
      MS_FIELD("synth_inter_min_ms", synth.inter_min),
      MS_FIELD("synth_inter_max_ms", synth.inter_max),
      DOUBLE_FIELD("synth_asymmetry_jitter", synth.asymmetry_jitter),
      SIZE_FIELD("close", close),
      SIZE_FIELD("random", random),
      SIZE_FIELD("degree", degree),
      SIZE_FIELD("max_degree", max_degree),
      Field{"parallelism",
            [](ScenarioConfig& c, std::string_view v) {
              c.parallelism = v == "greedy" ? kGreedy : to_size("parallelism", v);
            },
            [](const ScenarioConfig& c) {
              return c.parallelism == kGreedy ? std::string("greedy") : std::to_string(c.parallelism);
            }},
      Field{"pull_split",
            [](ScenarioConfig& c, std::string_view v) {
              if (v == "close_random")
                c.pull_split = true;
              else if (v == "none")
                c.pull_split = false;
              else
                bad_value("pull_split", v, "close_random or none");
            },
            [](const ScenarioConfig& c) { return std::string(c.pull_split ? "close_random" : "none"); }},
      MS_FIELD("header_validation_ms", header_validation),
      MS_FIELD("body_validation_ms", body_validation),
      Field{"body_batches",
            [](ScenarioConfig& c, std::string_view v) { c.body_batches = static_cast<std::uint32_t>(to_size("body_batches", v)); },
            [](const ScenarioConfig& c) { return std::to_string(c.body_batches); }},
      DOUBLE_FIELD("failure_prob", failure_prob),
      SIZE_FIELD("blocks", blocks),
      Field{"mining",
            [](ScenarioConfig& c, std::string_view v) {
              if (v == "uniform")
                c.mining = MiningKind::uniform;
              else if (v == "exponential")
                c.mining = MiningKind::exponential;
              else
                bad_value("mining", v, "uniform or exponential");
            },
            [](const ScenarioConfig& c) {
              return std::string(c.mining == MiningKind::uniform ? "uniform" : "exponential");
            }},
      S_FIELD("block_interval_s", block_interval),
      S_FIELD("rejuvenation_period_s", rejuvenation_period),
      SIZE_FIELD("rejuvenation_warmup_rounds", rejuvenation_warmup_rounds),
      SIZE_FIELD("rejuvenation_probes", rejuvenation_probes),
      DOUBLE_FIELD("rtt_noise", rtt_noise),
      Field{"rtt_pings", [](ScenarioConfig& c, std::string_view v) { c.rtt_pings = static_cast<int>(to_size("rtt_pings", v)); },
            [](const ScenarioConfig& c) { return std::to_string(c.rtt_pings); }},
      SIZE_FIELD("kad_fanout", kad_fanout),
      SIZE_FIELD("kad_bucket_size", kad_bucket_size),
      SIZE_FIELD("perigee_rounds", perigee_rounds),
      SIZE_FIELD("perigee_blocks_per_round", perigee_blocks_per_round),
      SIZE_FIELD("perigee_outgoing", perigee_outgoing),
      SIZE_FIELD("perigee_incoming", perigee_incoming),
      BOOL_FIELD("delivery_trace", delivery_trace),
      BOOL_FIELD("overlay_snapshot", overlay_snapshot),
  };
  return table;
}

const Field& field(std::string_view key) {
  for (const auto& f : fields())
    if (f.key == key) return f;
  throw ConfigError("unknown config key '" + std::string(key) + "'");
}

}  // namespace

std::string_view protocol_name(Protocol p) {
  switch (p) {
    case Protocol::cougar: return "cougar";
    case Protocol::random: return "random";
    case Protocol::geographic: return "geographic";
    case Protocol::kademlia: return "kademlia";
    case Protocol::perigee: return "perigee";
  }
  return "unknown";
}

Protocol parse_protocol(std::string_view s) {
  for (auto p : {Protocol::cougar, Protocol::random, Protocol::geographic, Protocol::kademlia, Protocol::perigee})
    if (protocol_name(p) == s) return p;
  throw ConfigError("invalid value '" + std::string(s) +
                    "' for key 'protocol': expected cougar, random, geographic, kademlia or perigee");
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& f : fields()) k.push_back(f.key);
    return k;
  }();
  return keys;
}

void ScenarioConfig::set(std::string_view key, std::string_view value) { field(key).set(*this, csv::trim(value)); }

std::string ScenarioConfig::get(std::string_view key) const { return field(key).get(*this); }

std::vector<std::pair<std::string, std::string>> ScenarioConfig::entries() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& f : fields()) out.emplace_back(f.key, f.get(*this));
  return out;
}

std::string ScenarioConfig::render() const {
  std::string out;
  for (const auto& [k, v] : entries()) out += k + " = " + v + "\n";
  return out;
}

std::uint64_t ScenarioConfig::hash() const { return fnv1a64(render()); }

void ScenarioConfig::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError(m); };
  if (nodes < 1) fail("nodes must be at least 1");
  if (parallelism < 1) fail("parallelism must be at least 1");
  if (body_batches < 1) fail("body_batches must be at least 1");
  if (!(failure_prob >= 0 && failure_prob < 1)) fail("failure_prob must be in [0, 1)");
  if (blocks < 1) fail("blocks must be at least 1");
  if (block_interval <= Duration::zero()) fail("block_interval_s must be positive");
  if (trace_file.empty() != servers_file.empty()) fail("trace_file and servers_file must be given together");
  if (trace_file.empty() && (synth.clusters < 1 || synth.clusters > kContinentCount))
    fail("synth_clusters must be between 1 and 6 (one continent per cluster)");
  if (trace_file.empty() && synth.servers_per_cluster < 1) fail("synth_servers_per_cluster must be at least 1");
  switch (protocol) {
    case Protocol::cougar:
      if (close + random < 1) fail("cougar needs close + random >= 1");
      if (max_degree <= close + random) fail("max_degree must exceed close + random");
      if (rejuvenation_period <= Duration::zero()) fail("rejuvenation_period_s must be positive");
      if (rtt_noise < 0 || rtt_noise >= 1) fail("rtt_noise must be in [0, 1)");
      if (rtt_pings < 1) fail("rtt_pings must be at least 1");
      break;
    case Protocol::random:
    case Protocol::geographic:
      if (degree < 1) fail("degree must be at least 1");
      if (max_degree <= degree) fail("max_degree must exceed degree");
      break;
    case Protocol::kademlia:
      if (kad_fanout < 1 || kad_bucket_size < 1) fail("kad_fanout and kad_bucket_size must be at least 1");
      break;
    case Protocol::perigee:
      if (perigee_outgoing < 2) fail("perigee_outgoing must be at least 2");
      if (perigee_blocks_per_round < 1) fail("perigee_blocks_per_round must be at least 1");
      break;
  }
}

void apply_config_text(ScenarioConfig& cfg, std::string_view text, std::string_view origin) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    std::string_view sv = line;
    if (auto hash = sv.find('#'); hash != std::string_view::npos) sv = sv.substr(0, hash);
    sv = csv::trim(sv);
    if (sv.empty()) continue;
    auto eq = sv.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(std::string(origin) + ":" + std::to_string(no) + ": expected key = value");
    auto key = csv::trim(sv.substr(0, eq));
    auto value = csv::trim(sv.substr(eq + 1));
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') && value.back() == value.front())
      value = value.substr(1, value.size() - 2);
    try {
      cfg.set(key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string(origin) + ":" + std::to_string(no) + ": " + e.what());
    }
  }
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  ScenarioConfig cfg;
  apply_config_text(cfg, ss.str(), path.string());
  return cfg;
}

}  // namespace cougar
