#pragma once

#include <cstdint>
#include <functional>
#include <span>

#include "troika/graph.hpp"

namespace troika {

inline constexpr NodeId kOracleMaxNodes = 12;

struct OracleResult {
  Partition partition;
  double weight = 0.0;
  std::uint64_t visited = 0;
};

/// Exact optimum by enumerating every set partition (n <= 12). The first
/// optimum in restricted-growth order wins ties.
OracleResult brute_force_optimum(const WeightedGraph& graph);

/// Calls fn with every restricted-growth string of length n.
void for_each_partition(NodeId n, const std::function<void(std::span<const int>)>& fn);

std::uint64_t bell_number(int n);

}  // namespace troika
