#include <doctest.h>

#include "support.hpp"
#include "troika/engine.hpp"
#include "troika/oracle.hpp"

using namespace troika;

namespace {

WeightedGraph complete(NodeId n, double w) {
  GraphBuilder b(n);
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) b.add_edge(i, j, w);
  }
  return b.build();
}

// Does p respect the branching decisions of the node?
bool follows_history(const SearchNode& node, const Partition& p) {
  for (const BranchStep& s : node.history) {
    const Triple t = s.t;
    if (s.is_pair()) {
      if (p.same_cluster(t.i, t.j) != (s.side == BranchSide::Left)) return false;
      continue;
    }
    const int together = p.same_cluster(t.i, t.j) + p.same_cluster(t.i, t.k) + p.same_cluster(t.j, t.k);
    if (s.side == BranchSide::Left && together != 3) return false;
    if (s.side == BranchSide::Right && together > 1) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("gap") {
  CHECK(compute_gap(100.0, 95.0) == doctest::Approx(0.05));
  CHECK(compute_gap(7.0, 7.0) == 0.0);
  CHECK(compute_gap(0.0, 0.0) == 0.0);
  CHECK(compute_gap(1e-13, -1.0) == 1.0);
  CHECK_THROWS_AS(compute_gap(10.0, 11.0), InternalError);
}

TEST_CASE("sign-uniform graphs finish at the root") {
  const SolveReport neg = solve(complete(9, -2.0));
  CHECK(neg.incumbent == 0.0);
  CHECK(neg.best_partition == Partition::singletons(9));
  CHECK(neg.gap == 0.0);
  CHECK(neg.stats.nodes <= 1);

  const SolveReport pos = solve(complete(9, 1.0));
  CHECK(pos.incumbent == 36.0);
  CHECK(pos.best_partition == Partition::together(9));
  CHECK(pos.best_bound == doctest::Approx(36.0));
  CHECK(pos.stats.nodes <= 1);
}

TEST_CASE("trivial inputs") {
  CHECK(solve(GraphBuilder(0).build()).incumbent == 0.0);
  GraphBuilder b(3);
  b.add_edge(1, 1, -2.0);
  b.add_edge(0, 2, 3.0);
  const SolveReport r = solve(b.build());
  CHECK(r.incumbent == 1.0);
  CHECK(r.best_partition == Partition({0, 1, 0}));
  CHECK(std::string(to_string(SolveStatus::GapReached)) == "gap-reached");
}

TEST_CASE("exact optimum on small graphs") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const NodeId n = 4 + static_cast<NodeId>(seed % 6);
    const WeightedGraph g = testing::random_signed_graph(n, 0.5, -5, 5, 2000 + seed);
    SolveConfig cfg;
    cfg.seed = seed;
    const SolveReport r = solve(g, cfg);
    const double opt = brute_force_optimum(g).weight;
    CHECK(r.incumbent == doctest::Approx(opt));
    CHECK(partition_weight(g, r.best_partition) == doctest::Approx(r.incumbent));
    CHECK(r.best_bound >= opt - 1e-9);
    CHECK(r.status != SolveStatus::TimeLimit);
    REQUIRE_FALSE(r.trace.empty());
    for (std::size_t k = 1; k < r.trace.size(); ++k) {
      CHECK(r.trace[k].incumbent >= r.trace[k - 1].incumbent - 1e-9);
      CHECK(r.trace[k].best_bound <= r.trace[k - 1].best_bound + 1e-9);
    }
  }
}

TEST_CASE("gap tolerance is honoured") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const WeightedGraph g = testing::random_signed_graph(11, 0.5, -5, 5, 3000 + seed);
    SolveConfig cfg;
    cfg.gap_tolerance = 0.05;
    const SolveReport r = solve(g, cfg);
    const double opt = brute_force_optimum(g).weight;
    if (r.status == SolveStatus::GapReached) CHECK(r.gap <= 0.05);
    CHECK(r.gap == doctest::Approx(compute_gap(r.best_bound, r.incumbent)));
    CHECK(r.incumbent <= opt + 1e-9);
    CHECK(r.best_bound >= opt - 1e-9);
  }
}

TEST_CASE("fathomed nodes hold nothing better than their incumbent") {
  std::size_t fathomed = 0, branched = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const WeightedGraph g = testing::random_signed_graph(8, 0.7, -5, 5, 4000 + seed);
    SolveConfig cfg;
    cfg.gap_tolerance = 1e-9;
    cfg.observer = [&](const NodeEvent& ev) {
      const SearchNode& node = *ev.node;
      if (node.status == NodeStatus::Open) {
        ++branched;
        return;
      }
      ++fathomed;
      double best = -INFINITY;
      for_each_partition(ev.graph->node_count(), [&](std::span<const int> a) {
        const Partition p(std::vector<int>(a.begin(), a.end()));
        if (follows_history(node, p)) best = std::max(best, partition_weight(*ev.graph, p));
      });
      CHECK(best <= ev.incumbent + 1e-9);
    };
    solve(g, cfg);
  }
  CHECK(fathomed > 0);
  CHECK(branched > 0);
}

TEST_CASE("feature toggles do not change the optimum") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    GraphBuilder b(9);
    const WeightedGraph core = testing::random_signed_graph(7, 0.6, -5, 5, 5000 + seed);
    for (const Edge& e : core.edges()) b.add_edge(e.u, e.v, e.w);
    b.add_edge(0, 7, 2.0);
    b.add_edge(1, 8, -1.0);
    const WeightedGraph g = b.build();
    const double opt = brute_force_optimum(g).weight;
    for (int mask = 0; mask < 16; ++mask) {
      SolveConfig cfg;
      cfg.pendant_reduction = mask & 1;
      cfg.reduced_cost_fixing = mask & 2;
      cfg.logical_propagation = mask & 4;
      cfg.implied_cuts = mask & 8;
      const SolveReport r = solve(g, cfg);
      CHECK(r.incumbent == doctest::Approx(opt));
      CHECK(partition_weight(g, r.best_partition) == doctest::Approx(opt));
    }
  }
}

TEST_CASE("results do not depend on the worker count") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const WeightedGraph g = testing::random_signed_graph(14, 0.5, -5, 5, 6000 + seed);
    SolveConfig one;
    one.seed = 3;
    SolveConfig four = one;
    four.workers = 4;
    const SolveReport a = solve(g, one), b = solve(g, four);
    CHECK(a.best_partition == b.best_partition);
    CHECK(a.incumbent == b.incumbent);
    CHECK(a.best_bound == b.best_bound);
    CHECK(a.stats.nodes == b.stats.nodes);
    REQUIRE(a.trace.size() == b.trace.size());
    for (std::size_t k = 0; k < a.trace.size(); ++k) {
      CHECK(a.trace[k].incumbent == b.trace[k].incumbent);
      CHECK(a.trace[k].best_bound == b.trace[k].best_bound);
    }
  }
}

TEST_CASE("components are solved separately") {
  GraphBuilder b(8);
  b.add_edge(0, 1, 2.0);
  b.add_edge(1, 2, 2.0);
  b.add_edge(0, 2, -1.0);
  b.add_edge(4, 5, 3.0);
  b.add_edge(5, 6, -2.0);
  b.add_edge(6, 7, 3.0);
  b.add_edge(4, 7, 1.0);
  const WeightedGraph g = b.build();
  const SolveReport r = solve(g);
  CHECK(r.stats.components >= 2);
  CHECK(r.incumbent == doctest::Approx(brute_force_optimum(g).weight));
}

TEST_CASE("time limit keeps a valid incumbent") {
  const WeightedGraph g = testing::random_signed_graph(30, 0.5, -5, 5, 7);
  SolveConfig cfg;
  cfg.time_limit_seconds = 0.0;
  const SolveReport r = solve(g, cfg);
  CHECK(r.best_partition.size() == 30);
  CHECK(partition_weight(g, r.best_partition) == doctest::Approx(r.incumbent));
  CHECK(r.best_bound >= r.incumbent);
  if (r.status == SolveStatus::TimeLimit) CHECK(r.gap > cfg.gap_tolerance);
}

TEST_CASE("configuration errors") {
  const WeightedGraph g = complete(4, 1.0);
  SolveConfig bad_gap;
  bad_gap.gap_tolerance = 0.0;
  CHECK_THROWS_AS(solve(g, bad_gap), InputError);
  SolveConfig bad_workers;
  bad_workers.workers = 0;
  CHECK_THROWS_AS(solve(g, bad_workers), InputError);
}
