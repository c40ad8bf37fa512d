#pragma once

#include <memory>
#include <vector>

#include "cougar/latency.hpp"

namespace cougar::test {

// Trace from a full RTT matrix in milliseconds. Diagonal entries of 0 become
// the 1ms self RTT.
inline std::shared_ptr<const LatencyTrace> trace_ms(const std::vector<std::vector<double>>& ms,
                                                    std::vector<Continent> continents = {}) {
  const std::size_t s = ms.size();
  std::vector<Server> servers(s);
  for (std::size_t i = 0; i < s; ++i) {
    servers[i].id = "s" + std::to_string(i);
    servers[i].city = "city" + std::to_string(i);
    servers[i].country = "XX";
    servers[i].continent = continents.empty() ? Continent::Europe : continents[i];
  }
  std::vector<std::int64_t> rtt(s * s);
  for (std::size_t a = 0; a < s; ++a)
    for (std::size_t b = 0; b < s; ++b) {
      double v = ms[a][b];
      if (a == b && v == 0) v = 1;
      rtt[a * s + b] = static_cast<std::int64_t>(v * 1000.0 + 0.5);
    }
  return std::make_shared<LatencyTrace>(std::move(servers), std::move(rtt));
}

// Every node on its own server.
inline NodeTopology one_per_server(std::shared_ptr<const LatencyTrace> trace) {
  std::vector<ServerIndex> placement(trace->size());
  for (ServerIndex i = 0; i < placement.size(); ++i) placement[i] = i;
  return NodeTopology(std::move(trace), std::move(placement));
}

// n nodes, all pairs at the same symmetric RTT.
inline NodeTopology uniform_topology(std::size_t n, double rtt_ms) {
  std::vector<std::vector<double>> ms(n, std::vector<double>(n, rtt_ms));
  for (std::size_t i = 0; i < n; ++i) ms[i][i] = 0;
  return one_per_server(trace_ms(ms));
}

}  // namespace cougar::test
