#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "troika/lp.hpp"
#include "troika/model.hpp"

namespace troika {

enum class BranchSide : std::uint8_t { Left, Right };

/// One branching decision. Triple steps split on x_ij + x_ik + x_jk = 0
/// versus >= 2; pair steps (t.k < 0) split on x_ij = 0 versus 1.
struct BranchStep {
  Triple t;
  BranchSide side = BranchSide::Left;

  bool is_pair() const { return t.k < 0; }
};

enum class NodeStatus : std::uint8_t { Open, IntegralLp, InfeasibleLp, BoundDominated };

const char* to_string(NodeStatus s);

using PairKey = std::pair<NodeId, NodeId>;

inline PairKey make_pair_key(NodeId a, NodeId b) { return a < b ? PairKey{a, b} : PairKey{b, a}; }

struct SearchNode {
  int depth = 0;
  /// Deterministic id used to seed the node's triple selection.
  std::uint64_t serial = 0;
  std::vector<BranchStep> history;
  /// Pair -> 0 (same cluster) or 1 (different clusters).
  std::map<PairKey, int> fixed;
  /// x_ij + x_ik + x_jk >= 2 rows: right branches first, implied cuts after.
  std::vector<Triple> local_cuts;
  /// Pool rows inherited from the parent's final relaxation.
  std::vector<Cut> pool;
  Basis warm_start;
  double parent_bound = std::numeric_limits<double>::infinity();
  double lp_bound = std::numeric_limits<double>::infinity();
  double heuristic_value = -std::numeric_limits<double>::infinity();
  Partition heuristic_partition;
  NodeStatus status = NodeStatus::Open;
  /// Set when propagation found contradictory fixings.
  bool conflict = false;
};

/// Disjoint node sets coalesced from the left-branch decisions in history.
std::vector<std::vector<NodeId>> merged_sets(const SearchNode& node, NodeId n);

struct PropagationCounts {
  std::size_t fixings = 0;
  std::size_t cuts = 0;
  bool conflict = false;
};

/**
 * Closes the fixings of a node.
 *
 * Pairs fixed to 0 are merged into classes (union-find); a pair fixed to 1
 * separates two classes. Every pair inside a class is then fixed to 0 and
 * every pair across separated classes to 1, which covers both transitive
 * rules and the left-branch implications. A right-branch triple with two
 * members in one class separates the third one. With `implied_cuts`, each
 * right-branch triple (i, j, k) and node p in the class of i adds the cut
 * on (j, k, p), likewise for j and k. A pair that ends up both 0 and 1
 * marks the node infeasible.
 */
PropagationCounts propagate_logical(SearchNode& node, NodeId n, bool implied_cuts = true);

/// Reduced-cost fixing against the lower bound `incumbent`; returns the
/// number of new fixings. Only variables not already fixed are touched.
std::size_t fix_by_reduced_cost(SearchNode& node, const CpModel& model, const LpSolution& lp, double incumbent);

/// s_i = 1 - exp(-f_i) + beta_i + |d_i| / (n - 1).
double node_score(const SearchNode& node, NodeId i, NodeId n, double degree);

/**
 * Roulette-wheel choice among the candidates of the highest available
 * stratum (three, then two, then one positive pair). A candidate's score
 * is the sum of its node scores; all-zero scores fall back to uniform.
 */
Triple select_triple(const SearchNode& node, std::span<const Triple> candidates, const CpModel& model,
                     std::span<const double> degree, std::mt19937_64& rng);

/// Children of a triple or pair decision. Both inherit fixings and cuts;
/// the caller runs propagate_logical. Throws std::invalid_argument when the
/// step is already decided by the node's fixings.
std::pair<SearchNode, SearchNode> branch(const SearchNode& node, Triple t);
std::pair<SearchNode, SearchNode> branch_pair(const SearchNode& node, NodeId i, NodeId j);

/// Installs the node's fixings, right-branch rows and inherited pool into
/// a model sharing `base`'s structure.
CpModel node_model(const CpModel& base, const SearchNode& node);

}  // namespace troika
