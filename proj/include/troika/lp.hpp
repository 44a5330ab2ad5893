#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "troika/model.hpp"

namespace troika {

/// Numerical tolerances of the LP layer, in one place.
struct LpTolerances {
  double primal_feasibility = 1e-7;
  double optimality = 1e-9;
  double pivot = 1e-9;
};

enum class LpStatus { Optimal, Infeasible, IterationLimit };

enum class BasisStatus : std::uint8_t { Basic, AtLower, AtUpper };

/// Warm-start token: column statuses, rows keyed by cut identity.
struct Basis {
  std::vector<BasisStatus> structural;
  std::vector<std::pair<Cut, BasisStatus>> rows;
};

struct LpSolution {
  LpStatus status = LpStatus::IterationLimit;
  /// Relaxation maximum including the model's constant.
  double objective = 0.0;
  std::vector<double> primal;
  /// d objective / d x_v at the optimum: <= 0 at the lower bound, >= 0 at
  /// the upper bound, 0 for basic variables.
  std::vector<double> reduced_costs;
  Basis basis;
  std::size_t iterations = 0;
};

/// Pluggable relaxation solver. One instance serves one solve at a time.
class LpBackend {
 public:
  virtual ~LpBackend() = default;
  virtual LpSolution solve(const CpModel& model, const Basis* warm_start = nullptr) = 0;
};

struct SimplexOptions {
  LpTolerances tolerances;
  std::size_t iteration_limit = 1'000'000;
  /// Consecutive degenerate pivots before switching to Bland's rule.
  std::size_t bland_after = 1000;
};

/**
 * Bounded-variable dual simplex over a sparse LU factorization of the
 * basis with product-form updates and dual steepest-edge pricing.
 *
 * Every column is boxed (structural x in [0, 1], each row's logical in its
 * activity range), so any basis is made dual feasible by bound flips and
 * no phase one is needed. Re-solving after appended rows, removed slack
 * rows, or changed bounds reuses the current basis.
 */
class DualSimplexBackend final : public LpBackend {
 public:
  explicit DualSimplexBackend(SimplexOptions options = {});
  ~DualSimplexBackend() override;
  DualSimplexBackend(DualSimplexBackend&&) noexcept;
  DualSimplexBackend& operator=(DualSimplexBackend&&) noexcept;

  LpSolution solve(const CpModel& model, const Basis* warm_start = nullptr) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// One-shot solve with a fresh default backend.
LpSolution solve_lp(const CpModel& model, const Basis* warm_start = nullptr);

struct SeparationOptions {
  int max_rounds = 50;
  std::size_t cuts_per_round = 500;
  /// Slack pool rows are dropped once the pool holds more rows than this.
  std::size_t purge_above = 2000;
};

struct RelaxationResult {
  LpSolution lp;
  int rounds = 0;
  std::size_t cuts_added = 0;
  /// True when the last solve had no violated pool inequality.
  bool fixpoint = false;
};

/// Solve, separate, re-solve until no pool inequality is violated or the
/// round limit is hit. Cuts are appended to `model`.
RelaxationResult solve_relaxation(CpModel& model, LpBackend& backend, const SeparationOptions& options = {},
                                  const Basis* warm_start = nullptr);

/// Root relaxation bound of the RP* model at the separation fixpoint.
double lp_upper_bound(const WeightedGraph& graph, const SeparationOptions& options = {});

}  // namespace troika
