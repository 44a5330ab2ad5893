#include "troika/engine.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "troika/bounds.hpp"
#include "troika/oracle.hpp"
#include "troika/preprocess.hpp"

namespace troika {

double compute_gap(double bound, double incumbent) {
  constexpr double kDenominator = 1e-12;
  constexpr double kAbsolute = 1e-9;
  if (bound < incumbent - 1e-6 * std::max(1.0, std::abs(bound))) {
    throw InternalError("best bound " + std::to_string(bound) + " below incumbent " + std::to_string(incumbent));
  }
  if (bound > kDenominator) return std::max(0.0, (bound - incumbent) / bound);
  return bound - incumbent <= kAbsolute ? 0.0 : 1.0;
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::GapReached: return "gap-reached";
    case SolveStatus::TimeLimit: return "time-limit";
    case SolveStatus::Exhausted: return "exhausted";
  }
  return "?";
}

namespace {

using Clock = std::chrono::steady_clock;

constexpr double kFathomSlack = 1e-9;
constexpr double kFractional = 1e-6;

struct Tree {
  std::size_t index = 0;
  Component component;
  ReducedGraph reduced;
  CpModel base;
  std::vector<double> degree;
  double delta = 0.0;
  double incumbent = 0.0;
  Partition best;
  double bound = 0.0;
  std::vector<SearchNode> level;

  const WeightedGraph& graph() const { return reduced.graph; }
  bool open() const { return !level.empty(); }
};

struct Evaluation {
  SearchNode node;
  std::vector<SearchNode> children;
  double value = -std::numeric_limits<double>::infinity();
  Partition partition;
  double judged_against = 0.0;
  std::size_t lp_solves = 0;
  std::size_t cuts = 0;
  std::size_t fixed = 0;
};

void offer(Evaluation& ev, const WeightedGraph& g, Partition p) {
  const double w = partition_weight(g, p);
  if (w > ev.value) {
    ev.value = w;
    ev.partition = std::move(p);
  }
}

bool in_history(const SearchNode& node, const Triple& t) {
  return std::any_of(node.history.begin(), node.history.end(), [&](const BranchStep& s) { return s.t == t; });
}

bool decided(const SearchNode& node, const Triple& t) {
  return node.fixed.contains(make_pair_key(t.i, t.j)) && node.fixed.contains(make_pair_key(t.i, t.k)) &&
         node.fixed.contains(make_pair_key(t.j, t.k));
}

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class Engine {
 public:
  Engine(const WeightedGraph& graph, const SolveConfig& cfg) : graph_(graph), cfg_(cfg), start_(Clock::now()) {
    if (!(cfg.gap_tolerance > 0.0)) throw InputError("gap tolerance must be positive");
    if (cfg.workers < 1) throw InputError("workers must be at least 1");
  }

  SolveReport run() {
    setup();
    SolveReport report;
    report.status = SolveStatus::Exhausted;
    for (;;) {
      record(report);
      Tree* next = nullptr;
      for (Tree& t : trees_) {
        if (!t.open()) continue;
        if (!next || t.bound - t.incumbent > next->bound - next->incumbent) next = &t;
      }
      if (!next) {
        report.status = SolveStatus::Exhausted;
        break;
      }
      if (compute_gap(total_bound(), total_incumbent()) <= cfg_.gap_tolerance) {
        report.status = SolveStatus::GapReached;
        break;
      }
      if (out_of_time()) {
        report.status = SolveStatus::TimeLimit;
        break;
      }
      step(*next);
      ++stats_.levels;
    }
    finish(report);
    return report;
  }

 private:
  bool out_of_time() const {
    if (!cfg_.time_limit_seconds) return false;
    return std::chrono::duration<double>(Clock::now() - start_).count() >= *cfg_.time_limit_seconds;
  }

  double total_bound() const {
    double b = 0.0;
    for (const Tree& t : trees_) b += t.bound;
    return b;
  }
  double total_incumbent() const {
    double i = 0.0;
    for (const Tree& t : trees_) i += t.incumbent;
    return i;
  }

  void record(SolveReport& report) const { report.trace.push_back({total_incumbent(), total_bound()}); }

  void setup() {
    auto components = decompose_components(graph_);
    stats_.components = components.size();
    for (std::size_t c = 0; c < components.size(); ++c) {
      Tree t;
      t.index = c;
      t.component = std::move(components[c]);
      t.reduced = cfg_.pendant_reduction ? reduce_pendants(t.component.graph) : identity_reduction(t.component.graph);
      const WeightedGraph& g = t.graph();
      const NodeId n = g.node_count();
      if (n < 3) {
        const OracleResult exact = brute_force_optimum(g);
        t.best = exact.partition;
        t.incumbent = t.bound = exact.weight;
        trees_.push_back(std::move(t));
        continue;
      }
      t.base = build_model(g);
      t.degree.resize(static_cast<std::size_t>(n));
      for (NodeId i = 0; i < n; ++i) t.degree[static_cast<std::size_t>(i)] = degree(g, i);
      t.delta = cfg_.delta.value_or(median_delta(t.component.graph));
      t.best = Partition::singletons(n);
      t.incumbent = partition_weight(g, t.best);
      t.bound = std::max(upper_bound_subnetwork(g), t.incumbent);
      SearchNode root;
      root.serial = mix(cfg_.seed ^ (0x5bd1e995ULL * (c + 1)));
      root.parent_bound = t.bound;
      t.level.push_back(std::move(root));
      trees_.push_back(std::move(t));
    }
    // Root level of every nontrivial component: heuristic, combinatorial
    // bound and root relaxation.
    for (Tree& t : trees_) {
      if (t.open()) step(t);
    }
  }

  Evaluation evaluate(const Tree& tree, SearchNode node, double incumbent, LpBackend& backend) const {
    Evaluation ev;
    const WeightedGraph& g = tree.graph();
    const NodeId n = g.node_count();
    ev.judged_against = incumbent;

    if (cfg_.logical_propagation && node.depth > 0) {
      const PropagationCounts pc = propagate_logical(node, n, cfg_.implied_cuts);
      ev.fixed += pc.fixings;
      ev.cuts += pc.cuts;
    }
    if (node.conflict) {
      node.status = NodeStatus::InfeasibleLp;
      ev.node = std::move(node);
      return ev;
    }

    HeuristicConfig hc = cfg_.heuristic;
    hc.seed = node.serial;
    Partition h;
    if (node.history.empty()) {
      h = heuristic_partition(g, hc);
    } else if (node.history.back().side == BranchSide::Left) {
      const auto sets = merged_sets(node, n);
      h = heuristic_left_branch(g, sets, hc);
    } else {
      Triple t = node.history.back().t;
      if (t.k < 0) t.k = t.j;
      h = heuristic_right_branch(g, t, tree.delta, hc);
    }
    node.heuristic_value = partition_weight(g, h);
    node.heuristic_partition = h;
    offer(ev, g, std::move(h));

    CpModel model = node_model(tree.base, node);
    const Basis* warm = node.warm_start.structural.empty() ? nullptr : &node.warm_start;
    const RelaxationResult rr = solve_relaxation(model, backend, cfg_.separation, warm);
    ev.lp_solves += static_cast<std::size_t>(rr.rounds) + 1;
    ev.cuts += rr.cuts_added;
    node.warm_start = {};
    if (rr.lp.status == LpStatus::Infeasible) {
      node.status = NodeStatus::InfeasibleLp;
      ev.node = std::move(node);
      return ev;
    }
    const double bound = std::min(node.parent_bound, rr.lp.objective);
    node.lp_bound = bound;

    Partition pp = pp_postprocess(model, rr.lp.primal);
    const double pp_value = partition_weight(g, pp);
    offer(ev, g, std::move(pp));
    const double local = std::max(incumbent, ev.value);
    ev.judged_against = local;

    const bool optimal = rr.lp.status == LpStatus::Optimal;
    const bool integral = optimal && is_integral(rr.lp.primal);
    if (integral && pp_value >= rr.lp.objective - kFathomSlack) {
      node.status = NodeStatus::IntegralLp;
      ev.node = std::move(node);
      return ev;
    }
    if (bound < local + kFathomSlack) {
      node.status = NodeStatus::BoundDominated;
      ev.node = std::move(node);
      return ev;
    }
    if (cfg_.reduced_cost_fixing && optimal) ev.fixed += fix_by_reduced_cost(node, model, rr.lp, local);

    // Children inherit the binding pool rows only; slack ones are
    // separated again if a child violates them.
    node.pool.clear();
    const auto cuts = model.cuts();
    for (std::size_t i = 0; i < cuts.size(); ++i) {
      if (cuts[i].kind != Cut::Kind::Transitivity) continue;
      if (rr.lp.basis.rows[i].second != BasisStatus::Basic || model.slack(cuts[i], rr.lp.primal) <= kFathomSlack) {
        node.pool.push_back(cuts[i]);
      }
    }
    std::pair<SearchNode, SearchNode> kids;
    if (!choose_branch(tree, node, model, rr.lp.primal, kids)) {
      // Integral, non-transitive through pairs outside the variable scope,
      // and nothing left to split: keep the primal value.
      node.status = NodeStatus::IntegralLp;
      ev.node = std::move(node);
      return ev;
    }
    for (SearchNode* child : {&kids.first, &kids.second}) {
      child->parent_bound = bound;
      child->warm_start = rr.lp.basis;
      child->pool = node.pool;
      ev.children.push_back(std::move(*child));
    }
    node.pool.clear();
    ev.node = std::move(node);
    return ev;
  }

  bool choose_branch(const Tree& tree, const SearchNode& node, const CpModel& model, std::span<const double> x,
                     std::pair<SearchNode, SearchNode>& out) const {
    std::vector<Triple> candidates;
    for (const Triple& t : violated_branch_triples(model, x)) {
      if (!in_history(node, t) && !decided(node, t)) candidates.push_back(t);
    }
    if (!candidates.empty()) {
      std::mt19937_64 rng(mix(cfg_.seed) ^ node.serial);
      out = branch(node, select_triple(node, candidates, model, tree.degree, rng));
      return true;
    }
    // No triple splits the relaxation: most fractional free variable.
    int best = -1;
    double best_frac = kFractional;
    const auto& pairs = model.structure().pair_of_var;
    for (std::size_t v = 0; v < pairs.size(); ++v) {
      const double frac = std::min(x[v], 1.0 - x[v]);
      if (frac > best_frac && !node.fixed.contains(make_pair_key(pairs[v].first, pairs[v].second))) {
        best_frac = frac;
        best = static_cast<int>(v);
      }
    }
    if (best >= 0) {
      const auto [i, j] = pairs[static_cast<std::size_t>(best)];
      out = branch_pair(node, i, j);
      return true;
    }
    // Integral but pp lost value: any triple that is not transitive.
    const NodeId n = model.node_count();
    for (NodeId i = 0; i < n; ++i) {
      for (NodeId j = i + 1; j < n; ++j) {
        for (NodeId k = j + 1; k < n; ++k) {
          const Triple t{i, j, k};
          const double sum = model.pair_value(x, i, j) + model.pair_value(x, i, k) + model.pair_value(x, j, k);
          if (sum > 0.5 && sum < 1.5 && !in_history(node, t) && !decided(node, t)) {
            out = branch(node, t);
            return true;
          }
        }
      }
    }
    return false;
  }

  std::vector<Evaluation> evaluate_level(Tree& tree, std::size_t& evaluated) {
    const double snapshot = tree.incumbent;
    std::vector<Evaluation> out(tree.level.size());
    std::vector<char> done(tree.level.size(), 0);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const auto work = [&] {
      DualSimplexBackend backend;
      for (;;) {
        const std::size_t k = next.fetch_add(1);
        if (k >= tree.level.size()) return;
        // The root level always runs so every component has a bound.
        if (tree.level[k].depth > 0 && out_of_time()) continue;
        try {
          out[k] = evaluate(tree, std::move(tree.level[k]), snapshot, backend);
          done[k] = 1;
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    };
    const std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(cfg_.workers), tree.level.size());
    if (threads <= 1) {
      work();
    } else {
      std::vector<std::thread> pool;
      for (std::size_t w = 0; w < threads; ++w) pool.emplace_back(work);
      for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);
    // Nodes skipped for time stay open with their inherited bound.
    std::vector<SearchNode> carried;
    std::vector<Evaluation> evaluations;
    for (std::size_t k = 0; k < out.size(); ++k) {
      if (done[k]) {
        evaluations.push_back(std::move(out[k]));
        ++evaluated;
      } else {
        carried.push_back(std::move(tree.level[k]));
      }
    }
    tree.level = std::move(carried);
    return evaluations;
  }

  void step(Tree& tree) {
    std::size_t evaluated = 0;
    std::vector<Evaluation> evaluations = evaluate_level(tree, evaluated);
    stats_.nodes += evaluated;
    std::vector<SearchNode> next = std::move(tree.level);
    for (Evaluation& ev : evaluations) {
      stats_.lp_solves += ev.lp_solves;
      stats_.cuts_added += ev.cuts;
      stats_.variables_fixed += ev.fixed;
      if (ev.value > tree.incumbent) {
        tree.incumbent = ev.value;
        tree.best = std::move(ev.partition);
      }
      if (cfg_.observer) cfg_.observer(NodeEvent{tree.index, &tree.graph(), &ev.node, ev.judged_against});
      for (SearchNode& child : ev.children) next.push_back(std::move(child));
    }
    std::erase_if(next, [&](const SearchNode& s) { return s.parent_bound < tree.incumbent + kFathomSlack; });
    tree.level = std::move(next);
    double bound = tree.incumbent;
    for (const SearchNode& s : tree.level) bound = std::max(bound, s.parent_bound);
    tree.bound = std::max(std::min(tree.bound, bound), tree.incumbent);
    if (tree.bound - tree.incumbent <= kFathomSlack) tree.level.clear();
  }

  void finish(SolveReport& report) {
    std::vector<int> assignment(static_cast<std::size_t>(graph_.node_count()), -1);
    int offset = 0;
    for (const Tree& t : trees_) {
      const Partition local = lift_partition(t.reduced.log, t.best);
      for (NodeId k = 0; k < local.size(); ++k) {
        assignment[static_cast<std::size_t>(t.component.id_map[static_cast<std::size_t>(k)])] = offset + local.cluster_of(k);
      }
      offset += local.cluster_count();
    }
    report.best_partition = Partition(std::move(assignment));
    report.incumbent = partition_weight(graph_, report.best_partition);
    const double tracked = total_incumbent();
    if (std::abs(report.incumbent - tracked) > 1e-6 * std::max(1.0, std::abs(tracked))) {
      throw InternalError("lifted partition weighs " + std::to_string(report.incumbent) + ", search tracked " +
                          std::to_string(tracked));
    }
    report.best_bound = std::max(total_bound(), report.incumbent);
    report.gap = compute_gap(report.best_bound, report.incumbent);
    stats_.wall_seconds = std::chrono::duration<double>(Clock::now() - start_).count();
    report.stats = stats_;
  }

  const WeightedGraph& graph_;
  const SolveConfig& cfg_;
  Clock::time_point start_;
  std::vector<Tree> trees_;
  SolveStats stats_;
};

}  // namespace

SolveReport solve(const WeightedGraph& graph, const SolveConfig& cfg) { return Engine(graph, cfg).run(); }

}  // namespace troika
