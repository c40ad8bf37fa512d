#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cougar/latency.hpp"
#include "cougar/time.hpp"

namespace cougar {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Protocol : std::uint8_t { cougar, random, geographic, kademlia, perigee };
enum class MiningKind : std::uint8_t { uniform, exponential };

std::string_view protocol_name(Protocol p);
Protocol parse_protocol(std::string_view s);

// Complete parameterization of one experiment. Defaults mirror the
// comparison scenario: C4-R4, four parallel pulls split between close and
// random advertisers, 5ms/50ms validation, single-batch bodies, no failures,
// uniform mining power, 100 measured blocks.
struct ScenarioConfig {
  Protocol protocol = Protocol::cougar;
  std::size_t nodes = 1000;
  std::uint64_t seed = 1;

  // Latency source. Without a trace file a clustered synthetic trace is used.
  std::string trace_file;
  std::string servers_file;
  std::string distribution_file;
  SynthTraceParams synth;

  std::size_t close = 4;
  std::size_t random = 4;
  std::size_t degree = 8;  // outgoing links for the random and geographic baselines
  std::size_t max_degree = 125;

  std::size_t parallelism = 4;  // kGreedy for the greedy policy
  bool pull_split = true;
  Duration header_validation = std::chrono::milliseconds(5);
  Duration body_validation = std::chrono::milliseconds(50);
  std::uint32_t body_batches = 1;
  double failure_prob = 0;

  std::size_t blocks = 100;
  MiningKind mining = MiningKind::uniform;
  Duration block_interval = std::chrono::seconds(60);

  Duration rejuvenation_period = std::chrono::seconds(10);
  std::size_t rejuvenation_warmup_rounds = 100;
  std::size_t rejuvenation_probes = 8;
  double rtt_noise = 0;
  int rtt_pings = 1;

  std::size_t kad_fanout = 8;  // peers per bucket; 8 matches the header budget of the degree-8 overlays
  std::size_t kad_bucket_size = 20;

  std::size_t perigee_rounds = 128;
  std::size_t perigee_blocks_per_round = 100;
  std::size_t perigee_outgoing = 8;
  std::size_t perigee_incoming = 20;

  bool delivery_trace = false;
  bool overlay_snapshot = false;

  // Sets one key from its textual value. Unknown keys and malformed values
  // throw ConfigError naming the key.
  void set(std::string_view key, std::string_view value);
  std::string get(std::string_view key) const;

  // Every key in a fixed order, one `key = value` per line.
  std::string render() const;
  std::vector<std::pair<std::string, std::string>> entries() const;

  std::uint64_t hash() const;

  // Throws ConfigError when parameters fall outside their documented ranges.
  void validate() const;
};

const std::vector<std::string>& config_keys();

// Parses `key = value` lines; `#` starts a comment. Later keys override
// earlier ones.
void apply_config_text(ScenarioConfig& cfg, std::string_view text, std::string_view origin = "<config>");
ScenarioConfig load_config(const std::filesystem::path& path);

}  // namespace cougar
