#pragma once

#include <variant>
#include <vector>

#include "troika/graph.hpp"

namespace troika {

struct Component {
  WeightedGraph graph;
  /// id_map[k] is the original id of local node k.
  std::vector<NodeId> id_map;
};

/// Splits G into connected components (sign ignored).
std::vector<Component> decompose_components(const WeightedGraph& graph);

/// Degree-one node removed; it rejoins `neighbor` on lift unless
/// kept_separate (negative edge), in which case it becomes a singleton.
struct PendantNode {
  NodeId pendant = 0;
  NodeId neighbor = 0;
  double w = 0.0;
  bool kept_separate = false;
};

/// Positive clique hanging off `connector`; all members rejoin it on lift.
struct PendantClique {
  std::vector<NodeId> members;
  NodeId connector = 0;
  double internal_weight = 0.0;
};

using ReductionStep = std::variant<PendantNode, PendantClique>;

/// Replayable record of reduce_pendants. Node ids in steps are ids of the
/// input graph.
struct ReductionLog {
  NodeId original_count = 0;
  std::vector<ReductionStep> steps;
  /// id_map[k] is the input-graph id of reduced node k.
  std::vector<NodeId> id_map;
};

struct ReducedGraph {
  WeightedGraph graph;
  ReductionLog log;
};

/**
 * Pendant node and pendant clique reduction, applied to a fixpoint.
 *
 * Absorbed weight moves onto self-loops of the surviving nodes so every
 * partition of the reduced graph has the same weight as its lift.
 */
ReducedGraph reduce_pendants(const WeightedGraph& graph);

/// Identity reduction (used when pendant reduction is disabled).
ReducedGraph identity_reduction(const WeightedGraph& graph);

/// Maps a partition of the reduced graph back to the input graph.
Partition lift_partition(const ReductionLog& log, const Partition& reduced);

}  // namespace troika
