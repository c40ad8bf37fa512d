#pragma once

#include <memory>

#include "cougar/config.hpp"
#include "cougar/latency.hpp"
#include "cougar/metrics.hpp"

namespace cougar {

// Latency trace and node placement for a config: trace files when given,
// otherwise the synthetic clustered trace, both drawn from the topology stream.
NodeTopology build_topology(const ScenarioConfig& config);

// Runs one complete experiment. Throws ConfigError for bad parameters and
// LoadError for unreadable inputs.
MetricsReport run_scenario(const ScenarioConfig& config);

}  // namespace cougar
