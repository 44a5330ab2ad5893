#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "troika/graph.hpp"

namespace troika {

/// Node triple with i < j < k.
struct Triple {
  NodeId i = 0;
  NodeId j = 0;
  NodeId k = 0;

  friend auto operator<=>(const Triple&, const Triple&) = default;
};

Triple make_triple(NodeId a, NodeId b, NodeId c);

/// Which node of the triple the two left-hand-side pairs share:
/// apex a gives x_ab + x_ac >= x_bc.
enum class Apex : std::uint8_t { I, J, K };

/**
 * A row of the relaxation. Transitivity rows come from the model's pool;
 * AtLeastTwo rows (x_ij + x_ik + x_jk >= 2) come from right branches and
 * implied cuts.
 */
struct Cut {
  enum class Kind : std::uint8_t { Transitivity, AtLeastTwo };
  Kind kind = Kind::Transitivity;
  Triple t;
  Apex apex = Apex::I;

  static Cut transitivity(Triple t, Apex apex) { return {Kind::Transitivity, t, apex}; }
  static Cut at_least_two(Triple t) { return {Kind::AtLeastTwo, t, Apex::I}; }

  friend auto operator<=>(const Cut&, const Cut&) = default;
};

struct CutHash {
  std::size_t operator()(const Cut& c) const noexcept;
};

struct TripleSets {
  std::vector<Triple> t3;
  std::vector<Triple> t2;
  std::vector<Triple> t1;

  std::size_t size() const { return t3.size() + t2.size() + t1.size(); }
};

/// Number of strictly positive pair weights in t (0..3).
int positive_pair_count(const WeightedGraph& graph, Triple t);

/// T3/T2/T1 stratification of the reduced triple set.
TripleSets stratify_triples(const WeightedGraph& graph);

/// 3 * C(n, 3): rows of the classic formulation; 0 for n < 3.
std::int64_t classic_constraint_count(std::int64_t n);

/// Index of the unordered pair {i, j} among all C(n, 2) pairs.
inline std::size_t pair_index(NodeId n, NodeId i, NodeId j) {
  if (i > j) std::swap(i, j);
  const auto a = static_cast<std::size_t>(i);
  const auto nn = static_cast<std::size_t>(n);
  return a * nn - a * (a + 1) / 2 + static_cast<std::size_t>(j - i - 1);
}

/// Immutable part of the RP* model, shared by all search nodes.
struct ModelStructure {
  WeightedGraph graph;
  NodeId n = 0;
  std::vector<double> weights;          // dense n x n
  std::vector<int> var_of_pair;         // -1 for pairs outside the variable scope
  std::vector<std::pair<NodeId, NodeId>> pair_of_var;
  std::vector<double> objective;        // -w_ij per variable
  double constant = 0.0;                // sum of edge weights and self-loops
};

/**
 * The RP* integer program over one connected graph: variables, objective,
 * the lazily separated transitivity pool, the active rows, and bounds.
 *
 * Objective: constant + sum_v objective[v] * x_v, which equals the partition
 * weight for any integral transitive x.
 */
class CpModel {
 public:
  CpModel() = default;
  explicit CpModel(std::shared_ptr<const ModelStructure> structure);

  const ModelStructure& structure() const { return *s_; }
  std::shared_ptr<const ModelStructure> shared_structure() const { return s_; }
  NodeId node_count() const { return s_->n; }
  std::size_t var_count() const { return s_->pair_of_var.size(); }

  /// Variable slot of {i, j}, or -1 when out of scope.
  int var(NodeId i, NodeId j) const;
  double weight(NodeId i, NodeId j) const {
    return s_->weights[static_cast<std::size_t>(i) * static_cast<std::size_t>(s_->n) + static_cast<std::size_t>(j)];
  }

  /// Is (t, apex) one of the retained RP* inequalities?
  bool in_pool(Triple t, Apex apex) const;
  /// Does t belong to the reduced triple set (some pair strictly positive)?
  bool in_triple_set(Triple t) const;

  std::span<const Cut> cuts() const { return cuts_; }
  void add_cut(const Cut& cut) { cuts_.push_back(cut); }
  void set_cuts(std::vector<Cut> cuts) { cuts_ = std::move(cuts); }

  std::span<const double> lower() const { return lo_; }
  std::span<const double> upper() const { return hi_; }
  void set_bounds(std::size_t v, double lo, double hi);
  /// Folds a {0,1} fixing into the bounds.
  void fix(std::size_t v, int value) { set_bounds(v, value, value); }

  /// Row coefficients of a cut as (variable, coefficient) plus the
  /// activity lower bound. Out-of-scope pairs are fixed at 1 and moved into
  /// the bound.
  struct Row {
    std::array<std::pair<int, double>, 3> terms{};
    int size = 0;
    double lo = 0.0;
    double hi = 0.0;
  };
  Row row(const Cut& cut) const;

  /// Activity minus right-hand side; negative means violated.
  double slack(const Cut& cut, std::span<const double> x) const;

  double objective_value(std::span<const double> x) const;

  /// x_ij under x with out-of-scope pairs read as 1.
  double pair_value(std::span<const double> x, NodeId i, NodeId j) const;

 private:
  std::shared_ptr<const ModelStructure> s_;
  std::vector<Cut> cuts_;
  std::vector<double> lo_;
  std::vector<double> hi_;
};

/// Builds RP* for a graph; starts with no active rows.
CpModel build_model(const WeightedGraph& graph);

struct ViolatedCut {
  Cut cut;
  double violation = 0.0;
};

/// Up to `cap` most violated pool inequalities, violation descending, ties
/// by triple then apex. Rows already active are skipped.
std::vector<ViolatedCut> separate_violations(const CpModel& model, std::span<const double> x, std::size_t cap,
                                             double tolerance = 1e-7);

/// Clusters are the components of the graph on V whose edges are the
/// pairs with x rounded to 0; out-of-scope pairs count as 1.
Partition pp_postprocess(const CpModel& model, std::span<const double> x);

/// Triples of the reduced set with 0 < x_ij + x_ik + x_jk < 2 (strictly,
/// by `tolerance` on both sides).
std::vector<Triple> violated_branch_triples(const CpModel& model, std::span<const double> x,
                                            double tolerance = 1e-7);

bool is_integral(std::span<const double> x, double tolerance = 1e-6);

/// CPLEX-LP text of the active relaxation.
void write_lp(std::ostream& out, const CpModel& model);

}  // namespace troika
