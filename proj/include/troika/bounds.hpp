#pragma once

#include "troika/graph.hpp"
#include "troika/heuristic.hpp"
#include "troika/lp.hpp"

namespace troika {

/**
 * Combinatorial upper bound from an edge-disjoint packing of triangles that
 * carry both a positive and a negative edge.
 *
 * Triangles are taken greedily by how much their exact three-node optimum
 * undercuts their positive weight. Each packed triangle contributes that
 * optimum, every other edge its positive part, every self-loop its weight.
 */
double upper_bound_subnetwork(const WeightedGraph& graph);

struct RootBounds {
  Partition partition;
  double lower = 0.0;
  double upper = 0.0;
  double subnetwork = 0.0;
  double lp = 0.0;
};

/// Heuristic lower bound and min(subnetwork, LP) upper bound.
RootBounds root_bounds(const WeightedGraph& graph, const HeuristicConfig& heuristic = {},
                       const SeparationOptions& separation = {});

}  // namespace troika
