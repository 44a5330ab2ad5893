#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "troika/graph.hpp"
#include "troika/heuristic.hpp"
#include "troika/lp.hpp"
#include "troika/search.hpp"

namespace troika {

/// Relative gap (b - i) / b; for b <= 1e-12 it is 0 when b - i <= 1e-9 and
/// 1 otherwise. Throws InternalError when b is clearly below i.
double compute_gap(double bound, double incumbent);

/// Evaluated search node as seen by SolveConfig::observer.
struct NodeEvent {
  std::size_t component = 0;
  /// Graph the node's fixings refer to (component after reduction).
  const WeightedGraph* graph = nullptr;
  const SearchNode* node = nullptr;
  /// Incumbent the node was judged against.
  double incumbent = 0.0;
};

struct SolveConfig {
  /// 1 - alpha; the search stops once the relative gap is at most this.
  double gap_tolerance = 1e-6;
  std::optional<double> time_limit_seconds;
  std::uint64_t seed = 0;
  int workers = 1;
  SeparationOptions separation;
  /// Right-branch heuristic perturbation; default is median_delta per component.
  std::optional<double> delta;
  HeuristicConfig heuristic;

  bool pendant_reduction = true;
  bool reduced_cost_fixing = true;
  bool logical_propagation = true;
  bool implied_cuts = true;

  std::function<void(const NodeEvent&)> observer;
};

enum class SolveStatus { GapReached, TimeLimit, Exhausted };

const char* to_string(SolveStatus s);

struct SolveStats {
  std::size_t nodes = 0;
  std::size_t lp_solves = 0;
  std::size_t cuts_added = 0;
  std::size_t variables_fixed = 0;
  std::size_t levels = 0;
  std::size_t components = 0;
  double wall_seconds = 0.0;
};

/// Totals across components after the root phase and after each level.
struct TracePoint {
  double incumbent = 0.0;
  double best_bound = 0.0;
};

struct SolveReport {
  Partition best_partition;
  double incumbent = 0.0;
  double best_bound = 0.0;
  double gap = 0.0;
  SolveStatus status = SolveStatus::Exhausted;
  SolveStats stats;
  std::vector<TracePoint> trace;
};

/**
 * Branch-and-cut on triples.
 *
 * Components are reduced and bounded independently, then the component
 * with the largest absolute gap advances its tree by one depth level at a
 * time. Nodes of a level are judged against the incumbent known when the
 * level started (plus their own primal values), so the result does not
 * depend on the number of workers.
 */
SolveReport solve(const WeightedGraph& graph, const SolveConfig& cfg = {});

}  // namespace troika
