#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "troika/graph.hpp"
#include "troika/model.hpp"

namespace troika {

struct HeuristicConfig {
  enum class Start { Separate, Together };

  /// Kept for interface symmetry with the solver; ties are broken by
  /// (source, destination, node id), so the search itself is seed-free.
  std::uint64_t seed = 0;
  Start start = Start::Separate;
  int max_rounds = 100;
  /// Longest shift chain; 0 means n.
  int shift_chain_depth = 0;
};

struct HeuristicResult {
  Partition partition;
  double weight = 0.0;
  /// Objective after the start and after every accepted recombination.
  std::vector<double> trace;
};

/**
 * Merge/split/shift local search.
 *
 * Each round looks at every ordered pair of clusters (destination possibly a
 * fresh empty cluster), builds a greedy chain of single-node shifts from
 * source to destination with every node moved at most once, and keeps the
 * chain prefix with the largest cumulative gain. Improving prefixes are
 * applied best first, one per cluster per round; rounds stop when nothing
 * improves.
 */
HeuristicResult heuristic_search(const WeightedGraph& graph, const HeuristicConfig& cfg = {});

Partition heuristic_partition(const WeightedGraph& graph, const HeuristicConfig& cfg = {});

/// Searches on a copy with delta subtracted from the non-loop edges touching
/// t.i, t.j or t.k; the partition is meant to be scored on the original graph.
Partition heuristic_right_branch(const WeightedGraph& graph, Triple t, double delta, const HeuristicConfig& cfg = {});

/// Searches on the graph with every merged set contracted to one node; each
/// set ends up inside a single cluster.
Partition heuristic_left_branch(const WeightedGraph& graph, std::span<const std::vector<NodeId>> merged_sets,
                                const HeuristicConfig& cfg = {});

/// |median| of the non-loop edge weights, 0 for an edgeless graph.
double median_delta(const WeightedGraph& graph);

struct Contraction {
  WeightedGraph graph;
  /// super_of[v] is the contracted node holding original node v.
  std::vector<NodeId> super_of;
};

/// Contracts each set to one node: parallel edges add up, edges inside a set
/// become a self-loop. Throws std::invalid_argument on overlapping sets.
Contraction contract(const WeightedGraph& graph, std::span<const std::vector<NodeId>> sets);

/// Partition of the original nodes induced by a partition of the contracted graph.
Partition expand(const Contraction& c, const Partition& contracted);

}  // namespace troika
