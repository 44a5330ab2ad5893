#include "troika/lp.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace troika {

namespace {

using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

constexpr double kTiny = 1e-14;
constexpr double kResidualLimit = 1e-6;
constexpr std::size_t kRefreshEvery = 60;

}  // namespace

// Columns 0..nv-1 are the structural variables, nv + i is the logical of
// row i with coefficient -1, so every row reads a_i x - s_i = 0 with
// lo_i <= s_i <= hi_i. Internally the objective is minimised: cost = -objective.
struct DualSimplexBackend::Impl {
  SimplexOptions opt;
  std::shared_ptr<const ModelStructure> structure;
  std::size_t nv = 0;
  std::vector<Cut> cuts;
  std::vector<CpModel::Row> rows;
  std::vector<std::vector<std::pair<int, double>>> cols;  // structural column: (row, coef)
  std::vector<double> lb, ub, cost, x, d;
  std::vector<BasisStatus> status;
  std::vector<int> head;  // basic column at each basis position
  std::vector<int> pos;   // basis position of a column, -1 when nonbasic
  std::vector<double> edge;  // dual steepest-edge weight per basis position
  // B = B0 E_1 .. E_k: LU of the basis at the last refactorisation plus one
  // eta column per pivot since.
  struct Eta {
    int p = 0;
    double pivot = 1.0;
    std::vector<std::pair<int, double>> col;  // entries of B^-1 a_q off position p
  };
  mutable Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  std::vector<Eta> etas;
  bool factored = false;
  std::size_t iterations = 0;

  std::size_t m() const { return rows.size(); }
  std::size_t ncols() const { return nv + rows.size(); }
  bool fixed(std::size_t j) const { return ub[j] - lb[j] <= 0.0; }

  void reset_structure(const CpModel& model) {
    structure = model.shared_structure();
    nv = model.var_count();
    cuts.clear();
    rows.clear();
    cols.assign(nv, {});
    cost.resize(nv);
    for (std::size_t v = 0; v < nv; ++v) cost[v] = -structure->objective[v];
    lb.assign(model.lower().begin(), model.lower().end());
    ub.assign(model.upper().begin(), model.upper().end());
    x.assign(nv, 0.0);
    d.assign(nv, 0.0);
    status.assign(nv, BasisStatus::AtLower);
    pos.assign(nv, -1);
    head.clear();
    edge.clear();
    etas.clear();
    factored = false;
  }

  void rebuild_columns() {
    cols.assign(nv, {});
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (int t = 0; t < rows[i].size; ++t) {
        const auto [v, coef] = rows[i].terms[static_cast<std::size_t>(t)];
        cols[static_cast<std::size_t>(v)].emplace_back(static_cast<int>(i), coef);
      }
    }
  }

  // New rows enter with their logical basic.
  void append_rows(const CpModel& model, std::size_t from) {
    const auto mc = model.cuts();
    if (from == mc.size()) return;
    factored = false;
    for (std::size_t k = from; k < mc.size(); ++k) {
      const std::size_t i = m();
      const CpModel::Row row = model.row(mc[k]);
      cuts.push_back(mc[k]);
      rows.push_back(row);
      for (int t = 0; t < row.size; ++t) {
        const auto [v, coef] = row.terms[static_cast<std::size_t>(t)];
        cols[static_cast<std::size_t>(v)].emplace_back(static_cast<int>(i), coef);
      }
      lb.push_back(row.lo);
      ub.push_back(row.hi);
      cost.push_back(0.0);
      x.push_back(0.0);
      d.push_back(0.0);
      status.push_back(BasisStatus::Basic);
      pos.push_back(static_cast<int>(head.size()));
      head.push_back(static_cast<int>(nv + i));
      edge.push_back(1.0);
    }
  }

  // Drops rows whose logicals are basic, together with their basis positions.
  void remove_rows(const std::vector<char>& drop) {
    const std::size_t m0 = m();
    std::vector<int> new_row(m0, -1);
    std::vector<Cut> kept_cuts;
    std::vector<CpModel::Row> kept_rows;
    for (std::size_t i = 0; i < m0; ++i) {
      if (drop[i]) continue;
      new_row[i] = static_cast<int>(kept_rows.size());
      kept_cuts.push_back(cuts[i]);
      kept_rows.push_back(rows[i]);
    }
    const std::size_t m1 = kept_rows.size();
    std::vector<int> new_head;
    std::vector<double> new_edge;
    for (std::size_t p = 0; p < m0; ++p) {
      const auto j = static_cast<std::size_t>(head[p]);
      if (j >= nv && drop[j - nv]) continue;
      new_edge.push_back(edge[p]);
      new_head.push_back(j < nv ? static_cast<int>(j) : static_cast<int>(nv) + new_row[j - nv]);
    }
    factored = false;
    const auto compact = [&](auto& v) {
      std::size_t out = nv;
      for (std::size_t i = 0; i < m0; ++i) {
        if (!drop[i]) v[out++] = v[nv + i];
      }
      v.resize(nv + m1);
    };
    compact(lb);
    compact(ub);
    compact(cost);
    compact(x);
    compact(d);
    compact(status);
    cuts = std::move(kept_cuts);
    rows = std::move(kept_rows);
    head = std::move(new_head);
    edge = std::move(new_edge);
    pos.assign(ncols(), -1);
    for (std::size_t p = 0; p < head.size(); ++p) pos[static_cast<std::size_t>(head[p])] = static_cast<int>(p);
    rebuild_columns();
  }

  void set_nonbasic_values() {
    for (std::size_t j = 0; j < ncols(); ++j) {
      if (status[j] == BasisStatus::AtLower) x[j] = lb[j];
      else if (status[j] == BasisStatus::AtUpper) x[j] = ub[j];
    }
  }

  void load_bounds(const CpModel& model) {
    std::copy(model.lower().begin(), model.lower().end(), lb.begin());
    std::copy(model.upper().begin(), model.upper().end(), ub.begin());
  }

  void cold_start(const CpModel& model) {
    reset_structure(model);
    append_rows(model, 0);
    set_nonbasic_values();
  }

  bool warm_start(const CpModel& model, const Basis& basis) {
    if (basis.structural.size() != model.var_count()) return false;
    reset_structure(model);
    append_rows(model, 0);
    status.assign(basis.structural.begin(), basis.structural.end());
    std::unordered_map<Cut, BasisStatus, CutHash> row_status(basis.rows.begin(), basis.rows.end());
    for (std::size_t i = 0; i < m(); ++i) {
      const auto it = row_status.find(cuts[i]);
      status.push_back(it == row_status.end() ? BasisStatus::Basic : it->second);
    }
    head.clear();
    pos.assign(ncols(), -1);
    for (std::size_t j = 0; j < ncols(); ++j) {
      if (status[j] != BasisStatus::Basic) continue;
      pos[j] = static_cast<int>(head.size());
      head.push_back(static_cast<int>(j));
    }
    edge.assign(head.size(), 1.0);
    if (head.size() != m() || !reinvert()) return false;
    set_nonbasic_values();
    return true;
  }

  bool try_incremental(const CpModel& model) {
    if (structure != model.shared_structure() || nv != model.var_count()) return false;
    const auto mc = model.cuts();
    std::vector<char> drop(m(), 0);
    std::size_t k = 0;
    bool any = false;
    for (std::size_t i = 0; i < m(); ++i) {
      if (k < mc.size() && cuts[i] == mc[k]) {
        ++k;
      } else {
        if (status[nv + i] != BasisStatus::Basic) return false;
        drop[i] = 1;
        any = true;
      }
    }
    if (any) remove_rows(drop);
    append_rows(model, k);
    load_bounds(model);
    set_nonbasic_values();
    return true;
  }

  bool reinvert() {
    etas.clear();
    factored = false;
    const auto mm = static_cast<Eigen::Index>(m());
    if (mm == 0) {
      factored = true;
      return true;
    }
    std::vector<Eigen::Triplet<double>> entries;
    for (std::size_t p = 0; p < m(); ++p) {
      const auto j = static_cast<std::size_t>(head[p]);
      const auto c = static_cast<int>(p);
      if (j < nv) {
        for (const auto& [i, coef] : cols[j]) entries.emplace_back(i, c, coef);
      } else {
        entries.emplace_back(static_cast<int>(j - nv), c, -1.0);
      }
    }
    SparseMatrix B(mm, mm);
    B.setFromTriplets(entries.begin(), entries.end());
    lu.analyzePattern(B);
    lu.factorize(B);
    if (lu.info() != Eigen::Success) return false;
    // Near-singular factors show up as a poor solve of a known system.
    const Vector probe = Vector::Ones(mm);
    const Vector back = B * lu.solve(probe);
    if (!back.allFinite() || (back - probe).lpNorm<Eigen::Infinity>() > 1e-7) return false;
    factored = true;
    return true;
  }

  // B^-1 v in place.
  void ftran(Vector& v) const {
    if (m() == 0) return;
    v = lu.solve(v);
    for (const Eta& e : etas) {
      const double vp = v[e.p] / e.pivot;
      v[e.p] = vp;
      if (vp == 0.0) continue;
      for (const auto& [r, a] : e.col) v[r] -= a * vp;
    }
  }

  // B^-T u in place.
  void btran(Vector& u) const {
    if (m() == 0) return;
    for (auto it = etas.rbegin(); it != etas.rend(); ++it) {
      double sp = u[it->p];
      for (const auto& [r, a] : it->col) sp -= a * u[r];
      u[it->p] = sp / it->pivot;
    }
    u = lu.transpose().solve(u);
  }

  double residual() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < m(); ++i) {
      double act = -x[nv + i];
      for (int t = 0; t < rows[i].size; ++t) {
        const auto [v, coef] = rows[i].terms[static_cast<std::size_t>(t)];
        act += coef * x[static_cast<std::size_t>(v)];
      }
      worst = std::max(worst, std::abs(act));
    }
    return worst;
  }

  void recompute_primal() {
    Vector r = Vector::Zero(static_cast<Eigen::Index>(m()));
    for (std::size_t j = 0; j < ncols(); ++j) {
      if (status[j] == BasisStatus::Basic || x[j] == 0.0) continue;
      if (j < nv) {
        for (const auto& [i, coef] : cols[j]) r[i] -= coef * x[j];
      } else {
        r[static_cast<Eigen::Index>(j - nv)] += x[j];
      }
    }
    Vector xb = std::move(r);
    ftran(xb);
    for (std::size_t p = 0; p < m(); ++p) x[static_cast<std::size_t>(head[p])] = xb[static_cast<Eigen::Index>(p)];
  }

  void recompute_duals() {
    Vector cb(static_cast<Eigen::Index>(m()));
    for (std::size_t p = 0; p < m(); ++p) cb[static_cast<Eigen::Index>(p)] = cost[static_cast<std::size_t>(head[p])];
    Vector y = std::move(cb);
    btran(y);
    for (std::size_t j = 0; j < ncols(); ++j) {
      if (status[j] == BasisStatus::Basic) {
        d[j] = 0.0;
      } else if (j < nv) {
        double dj = cost[j];
        for (const auto& [i, coef] : cols[j]) dj -= coef * y[i];
        d[j] = dj;
      } else {
        d[j] = y[static_cast<Eigen::Index>(j - nv)];
      }
    }
  }

  // Bound flips restoring dual feasibility; the primal shift is
  // accumulated into `shift` (row space).
  bool flip_wrong_signs(Vector* shift) {
    const double tol = opt.tolerances.optimality;
    bool any = false;
    for (std::size_t j = 0; j < ncols(); ++j) {
      if (status[j] == BasisStatus::Basic || fixed(j)) continue;
      double target;
      if (status[j] == BasisStatus::AtLower && d[j] < -tol) {
        status[j] = BasisStatus::AtUpper;
        target = ub[j];
      } else if (status[j] == BasisStatus::AtUpper && d[j] > tol) {
        status[j] = BasisStatus::AtLower;
        target = lb[j];
      } else {
        continue;
      }
      const double delta = target - x[j];
      x[j] = target;
      any = true;
      if (!shift) continue;
      if (j < nv) {
        for (const auto& [i, coef] : cols[j]) (*shift)[i] += coef * delta;
      } else {
        (*shift)[static_cast<Eigen::Index>(j - nv)] -= delta;
      }
    }
    return any;
  }

  void refresh(bool force_reinvert) {
    if (force_reinvert || !factored || !etas.empty()) {
      if (!reinvert()) throw InternalError("simplex basis became singular");
    }
    recompute_primal();
    if (residual() > kResidualLimit) throw InternalError("simplex residual too large after refactorisation");
    recompute_duals();
    if (flip_wrong_signs(nullptr)) recompute_primal();
  }

  LpStatus run() {
    const LpTolerances& tol = opt.tolerances;
    std::vector<double> alpha(ncols(), 0.0);
    std::size_t degenerate = 0;
    std::size_t since_refresh = 0;
    int unstable = 0;
    bool fresh = true;
    refresh(false);
    for (;;) {
      if (iterations >= opt.iteration_limit) return LpStatus::IterationLimit;
      if (since_refresh >= kRefreshEvery) {
        refresh(false);
        since_refresh = 0;
        fresh = true;
      }
      const bool bland = degenerate >= opt.bland_after;

      // Leaving row: dual steepest edge (Bland: lowest column index).
      int p = -1;
      double worst = 0.0;
      for (std::size_t q = 0; q < m(); ++q) {
        const auto j = static_cast<std::size_t>(head[q]);
        const double inf = x[j] < lb[j] - tol.primal_feasibility   ? lb[j] - x[j]
                           : x[j] > ub[j] + tol.primal_feasibility ? x[j] - ub[j]
                                                                   : 0.0;
        if (inf <= 0.0) continue;
        const double score = inf * inf / edge[q];
        if (bland ? (p < 0 || head[q] < head[static_cast<std::size_t>(p)]) : score > worst) {
          p = static_cast<int>(q);
          worst = score;
        }
      }
      if (p < 0) {
        if (fresh) return LpStatus::Optimal;
        refresh(false);
        since_refresh = 0;
        fresh = true;
        continue;
      }
      const auto leave = static_cast<std::size_t>(head[static_cast<std::size_t>(p)]);
      const bool below = x[leave] < lb[leave];
      const double target = below ? lb[leave] : ub[leave];
      const double s = below ? -1.0 : 1.0;

      // Pivot row alpha_j = (B^-1 a_j)_p over all columns.
      Vector rho = Vector::Zero(static_cast<Eigen::Index>(m()));
      rho[p] = 1.0;
      btran(rho);
      std::fill(alpha.begin(), alpha.begin() + static_cast<std::ptrdiff_t>(nv), 0.0);
      for (std::size_t i = 0; i < m(); ++i) {
        const double ri = rho[static_cast<Eigen::Index>(i)];
        alpha[nv + i] = -ri;
        if (std::abs(ri) <= kTiny) continue;
        for (int t = 0; t < rows[i].size; ++t) {
          const auto [v, coef] = rows[i].terms[static_cast<std::size_t>(t)];
          alpha[static_cast<std::size_t>(v)] += ri * coef;
        }
      }

      // Two-pass Harris ratio test (plain minimum ratio under Bland).
      const auto eligible = [&](std::size_t j, double& slack) {
        if (status[j] == BasisStatus::Basic || fixed(j) || std::abs(alpha[j]) <= tol.pivot) return false;
        if (status[j] == BasisStatus::AtLower) {
          if (s * alpha[j] <= 0.0) return false;
          slack = std::max(d[j], 0.0);
        } else {
          if (s * alpha[j] >= 0.0) return false;
          slack = std::max(-d[j], 0.0);
        }
        return true;
      };
      int entering = -1;
      if (bland) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < ncols(); ++j) {
          double slack;
          if (!eligible(j, slack)) continue;
          const double ratio = slack / std::abs(alpha[j]);
          if (ratio < best) {
            best = ratio;
            entering = static_cast<int>(j);
          }
        }
      } else {
        double bound = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < ncols(); ++j) {
          double slack;
          if (eligible(j, slack)) bound = std::min(bound, (slack + tol.optimality) / std::abs(alpha[j]));
        }
        double best_pivot = 0.0;
        for (std::size_t j = 0; j < ncols(); ++j) {
          double slack;
          if (!eligible(j, slack) || slack / std::abs(alpha[j]) > bound) continue;
          if (std::abs(alpha[j]) > best_pivot) {
            best_pivot = std::abs(alpha[j]);
            entering = static_cast<int>(j);
          }
        }
      }
      if (entering < 0) {
        if (fresh) return LpStatus::Infeasible;
        refresh(true);
        since_refresh = 0;
        fresh = true;
        continue;
      }
      const auto q = static_cast<std::size_t>(entering);

      // Entering column.
      Vector aq = Vector::Zero(static_cast<Eigen::Index>(m()));
      if (q < nv) {
        for (const auto& [i, coef] : cols[q]) aq[i] = coef;
      } else {
        aq[static_cast<Eigen::Index>(q - nv)] = -1.0;
      }
      ftran(aq);
      const double apq = aq[p];
      if (std::abs(apq - alpha[q]) > 1e-7 * (1.0 + std::abs(apq)) || std::abs(apq) <= tol.pivot) {
        if (++unstable > 5) return LpStatus::IterationLimit;
        refresh(true);
        since_refresh = 0;
        fresh = true;
        continue;
      }
      unstable = 0;

      const double theta_d = d[q] / alpha[q];
      for (std::size_t j = 0; j < ncols(); ++j) {
        if (status[j] != BasisStatus::Basic) d[j] -= theta_d * alpha[j];
      }
      d[q] = 0.0;
      d[leave] = -theta_d;

      const double theta_p = (x[leave] - target) / apq;
      for (std::size_t r = 0; r < m(); ++r) x[static_cast<std::size_t>(head[r])] -= theta_p * aq[static_cast<Eigen::Index>(r)];
      x[q] += theta_p;
      x[leave] = target;

      status[leave] = below ? BasisStatus::AtLower : BasisStatus::AtUpper;
      status[q] = BasisStatus::Basic;
      pos[leave] = -1;
      pos[q] = p;
      head[static_cast<std::size_t>(p)] = static_cast<int>(q);

      // Steepest-edge weights of the new basis, with tau = B^-1 rho.
      Vector tau = rho;
      ftran(tau);
      const double wp = std::max(rho.squaredNorm(), 1e-12);
      for (std::size_t r = 0; r < m(); ++r) {
        const double ratio = aq[static_cast<Eigen::Index>(r)] / apq;
        if (static_cast<int>(r) == p || ratio == 0.0) continue;
        edge[r] = std::max(edge[r] + ratio * (ratio * wp - 2.0 * tau[static_cast<Eigen::Index>(r)]), 1e-8);
      }
      edge[static_cast<std::size_t>(p)] = std::max(wp / (apq * apq), 1e-8);

      Eta eta;
      eta.p = p;
      eta.pivot = apq;
      for (std::size_t r = 0; r < m(); ++r) {
        const double ar = aq[static_cast<Eigen::Index>(r)];
        if (static_cast<int>(r) != p && std::abs(ar) > kTiny) eta.col.emplace_back(static_cast<int>(r), ar);
      }
      etas.push_back(std::move(eta));

      Vector shift = Vector::Zero(static_cast<Eigen::Index>(m()));
      if (flip_wrong_signs(&shift)) {
        Vector dx = std::move(shift);
        ftran(dx);
        for (std::size_t r = 0; r < m(); ++r) x[static_cast<std::size_t>(head[r])] -= dx[static_cast<Eigen::Index>(r)];
      }

      degenerate = std::abs(theta_d) <= 1e-12 ? degenerate + 1 : 0;
      ++iterations;
      ++since_refresh;
      fresh = false;
    }
  }

  LpSolution extract(const CpModel& model, LpStatus st) const {
    LpSolution sol;
    sol.status = st;
    sol.iterations = iterations;
    sol.primal.resize(nv);
    sol.reduced_costs.resize(nv);
    for (std::size_t v = 0; v < nv; ++v) {
      sol.primal[v] = std::clamp(x[v], lb[v], ub[v]);
      sol.reduced_costs[v] = status[v] == BasisStatus::Basic ? 0.0 : -d[v];
    }
    // Basic solution of a dual feasible basis: its value is an upper bound
    // even before primal feasibility is reached.
    double z = model.structure().constant;
    for (std::size_t v = 0; v < nv; ++v) z += model.structure().objective[v] * x[v];
    sol.objective = z;
    sol.basis.structural.assign(status.begin(), status.begin() + static_cast<std::ptrdiff_t>(nv));
    sol.basis.rows.reserve(m());
    for (std::size_t i = 0; i < m(); ++i) sol.basis.rows.emplace_back(cuts[i], status[nv + i]);
    return sol;
  }
};

DualSimplexBackend::DualSimplexBackend(SimplexOptions options) : impl_(std::make_unique<Impl>()) {
  impl_->opt = options;
}
DualSimplexBackend::~DualSimplexBackend() = default;
DualSimplexBackend::DualSimplexBackend(DualSimplexBackend&&) noexcept = default;
DualSimplexBackend& DualSimplexBackend::operator=(DualSimplexBackend&&) noexcept = default;

LpSolution DualSimplexBackend::solve(const CpModel& model, const Basis* warm_start) {
  Impl& s = *impl_;
  s.iterations = 0;
  const bool loaded = (warm_start && s.warm_start(model, *warm_start)) || (!warm_start && s.try_incremental(model));
  if (!loaded) s.cold_start(model);
  return s.extract(model, s.run());
}

LpSolution solve_lp(const CpModel& model, const Basis* warm_start) {
  DualSimplexBackend backend;
  return backend.solve(model, warm_start);
}

RelaxationResult solve_relaxation(CpModel& model, LpBackend& backend, const SeparationOptions& options,
                                  const Basis* warm_start) {
  RelaxationResult res;
  const Basis* start = warm_start;
  for (;;) {
    res.lp = backend.solve(model, start);
    start = nullptr;
    if (res.lp.status != LpStatus::Optimal) break;
    const auto found = separate_violations(model, res.lp.primal, options.cuts_per_round);
    if (found.empty()) {
      res.fixpoint = true;
      break;
    }
    if (res.rounds >= options.max_rounds) break;

    if (model.cuts().size() + found.size() > options.purge_above) {
      // Only slack pool rows with a basic logical go; branch rows stay.
      std::vector<Cut> kept;
      const auto cuts = model.cuts();
      for (std::size_t i = 0; i < cuts.size(); ++i) {
        const bool removable = cuts[i].kind == Cut::Kind::Transitivity &&
                               res.lp.basis.rows[i].second == BasisStatus::Basic &&
                               model.slack(cuts[i], res.lp.primal) > 1e-6;
        if (!removable) kept.push_back(cuts[i]);
      }
      model.set_cuts(std::move(kept));
    }
    for (const auto& vc : found) model.add_cut(vc.cut);
    res.cuts_added += found.size();
    ++res.rounds;
  }
  return res;
}

double lp_upper_bound(const WeightedGraph& graph, const SeparationOptions& options) {
  CpModel model = build_model(graph);
  DualSimplexBackend backend;
  const RelaxationResult res = solve_relaxation(model, backend, options);
  if (res.lp.status == LpStatus::Infeasible) throw InternalError("root relaxation reported infeasible");
  return res.lp.objective;
}

}  // namespace troika
