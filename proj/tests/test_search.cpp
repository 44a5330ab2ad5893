#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "troika/oracle.hpp"
#include "troika/search.hpp"

using namespace troika;

namespace {

WeightedGraph complete(NodeId n, double w) {
  GraphBuilder b(n);
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) b.add_edge(i, j, w);
  }
  return b.build();
}

}  // namespace

TEST_CASE("node score terms") {
  SearchNode node;
  CHECK(node_score(node, 0, 5, 0.0) == 0.0);
  CHECK(node_score(node, 0, 5, -8.0) == 2.0);
  node.fixed[{0, 1}] = 0;
  node.fixed[{0, 2}] = 1;
  CHECK(node_score(node, 0, 5, 0.0) == doctest::Approx(1.0 - std::exp(-2.0)));
  CHECK(node_score(node, 1, 5, 0.0) == doctest::Approx(1.0 - std::exp(-1.0)));
  node.history.push_back({{1, 3, 4}, BranchSide::Right});
  CHECK(node_score(node, 3, 5, 0.0) == 1.0);
  CHECK(node_score(node, 1, 5, 4.0) == doctest::Approx(3.0 - std::exp(-1.0)));
  // Many fixings saturate the first term.
  for (NodeId j = 1; j < 40; ++j) node.fixed[{0, j}] = 1;
  CHECK(node_score(node, 0, 41, 0.0) == doctest::Approx(1.0));
}

TEST_CASE("triple selection prefers the highest stratum") {
  GraphBuilder b(6);
  b.add_edge(0, 1, 1.0);
  b.add_edge(0, 2, 1.0);
  b.add_edge(1, 2, 1.0);
  b.add_edge(3, 4, 1.0);
  b.add_edge(3, 5, -1.0);
  b.add_edge(4, 5, 1.0);
  const CpModel m = build_model(b.build());
  const std::vector<double> degree(6, 0.0);
  std::mt19937_64 rng(1);
  SearchNode node;
  const std::vector<Triple> cands{{3, 4, 5}, {0, 1, 2}, {0, 3, 4}};
  for (int k = 0; k < 20; ++k) CHECK(select_triple(node, cands, m, degree, rng) == Triple{0, 1, 2});
  CHECK(select_triple(node, std::vector<Triple>{{0, 3, 4}, {3, 4, 5}}, m, degree, rng) == Triple{3, 4, 5});
  // Zero scores fall back to a uniform choice.
  const std::vector<Triple> two{{0, 1, 2}, {0, 1, 3}};
  const CpModel pos = build_model(complete(6, 1.0));
  int first = 0;
  for (int k = 0; k < 2000; ++k) first += select_triple(node, two, pos, degree, rng) == Triple{0, 1, 2};
  CHECK(first > 800);
  CHECK(first < 1200);
  CHECK_THROWS(select_triple(node, std::vector<Triple>{}, m, degree, rng));
}

TEST_CASE("roulette follows the scores") {
  const CpModel m = build_model(complete(6, 1.0));
  // Scores: node 5 has |d|/(n-1) = 3, every other node 0.
  std::vector<double> degree(6, 0.0);
  degree[5] = 15.0;
  SearchNode node;
  node.history.push_back({{0, 1, 2}, BranchSide::Left});
  // Triple scores: (0,1,2) -> 3, (3,4,5) -> 3, (0,3,5) -> 4.
  const std::vector<Triple> cands{{0, 1, 2}, {3, 4, 5}, {0, 3, 5}};
  std::mt19937_64 rng(5);
  std::array<int, 3> hits{};
  const int draws = 30000;
  for (int k = 0; k < draws; ++k) {
    const Triple t = select_triple(node, cands, m, degree, rng);
    for (std::size_t c = 0; c < 3; ++c) hits[c] += t == cands[c];
  }
  CHECK(hits[0] / double(draws) == doctest::Approx(0.3).epsilon(0.05));
  CHECK(hits[1] / double(draws) == doctest::Approx(0.3).epsilon(0.05));
  CHECK(hits[2] / double(draws) == doctest::Approx(0.4).epsilon(0.05));
}

TEST_CASE("propagation examples") {
  SUBCASE("together and apart close a triangle") {
    SearchNode node;
    node.fixed[{0, 1}] = 0;
    node.fixed[{1, 2}] = 1;
    const auto c = propagate_logical(node, 3);
    CHECK_FALSE(c.conflict);
    CHECK(c.fixings == 1);
    CHECK(node.fixed.at({0, 2}) == 1);
  }
  SUBCASE("left triple separates its class from an outside node") {
    const auto [left, right] = branch(SearchNode{}, {0, 1, 2});
    SearchNode node = left;
    node.fixed[{0, 3}] = 1;
    propagate_logical(node, 4);
    CHECK(node.fixed.at({1, 3}) == 1);
    CHECK(node.fixed.at({2, 3}) == 1);
    CHECK(node.status == NodeStatus::Open);
  }
  SUBCASE("contradiction") {
    SearchNode node;
    node.fixed[{0, 1}] = 0;
    node.fixed[{1, 2}] = 0;
    node.fixed[{0, 2}] = 1;
    CHECK(propagate_logical(node, 3).conflict);
    CHECK(node.conflict);
    CHECK(node.status == NodeStatus::InfeasibleLp);
  }
  SUBCASE("right row with two members together") {
    SearchNode node;
    node.fixed[{0, 1}] = 0;
    node.local_cuts.push_back({0, 1, 2});
    propagate_logical(node, 3);
    CHECK(node.fixed.at({0, 2}) == 1);
    CHECK(node.fixed.at({1, 2}) == 1);
  }
  SUBCASE("right row inside one class") {
    SearchNode node;
    node.fixed[{0, 1}] = 0;
    node.fixed[{1, 2}] = 0;
    node.local_cuts.push_back({0, 1, 2});
    CHECK(propagate_logical(node, 3).conflict);
  }
  SUBCASE("implied cuts from right branches") {
    const auto [left, right] = branch(SearchNode{}, {0, 1, 2});
    SearchNode node = right;
    node.fixed[{0, 3}] = 0;
    SearchNode plain = node;
    const auto c = propagate_logical(node, 5);
    CHECK(c.cuts == 1);
    CHECK(node.local_cuts == std::vector<Triple>{{0, 1, 2}, {1, 2, 3}});
    CHECK(propagate_logical(plain, 5, false).cuts == 0);
    CHECK(plain.local_cuts.size() == 1);
  }
}

TEST_CASE("propagation never removes an optimal partition consistent with the fixings") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const NodeId n = 6;
    SearchNode node;
    for (int f = 0; f < 4; ++f) {
      const auto a = static_cast<NodeId>(rng() % n), b = static_cast<NodeId>(rng() % n);
      if (a != b) node.fixed.emplace(make_pair_key(a, b), static_cast<int>(rng() % 2));
    }
    if (rng() % 2) node.local_cuts.push_back(make_triple(0, 1 + static_cast<NodeId>(rng() % 2), 3 + static_cast<NodeId>(rng() % 3)));
    const auto before = node;
    const auto consistent = [&](const SearchNode& s, const Partition& p) {
      for (const auto& [pair, v] : s.fixed) {
        if (p.same_cluster(pair.first, pair.second) != (v == 0)) return false;
      }
      for (const Triple& t : s.local_cuts) {
        if (p.same_cluster(t.i, t.j) + p.same_cluster(t.i, t.k) + p.same_cluster(t.j, t.k) > 1) return false;
      }
      return true;
    };
    const auto c = propagate_logical(node, n, false);
    int kept = 0, total = 0;
    for_each_partition(n, [&](std::span<const int> a) {
      const Partition p(std::vector<int>(a.begin(), a.end()));
      if (!consistent(before, p)) return;
      ++total;
      kept += consistent(node, p);
    });
    CHECK(kept == total);
    CHECK(c.conflict == (total == 0));
  }
}

TEST_CASE("merged sets coalesce left decisions") {
  SearchNode node;
  node.history = {{{0, 1, 2}, BranchSide::Left},
                  {{7, 8, 9}, BranchSide::Right},
                  {{2, 3, 4}, BranchSide::Left},
                  {{5, 6, -1}, BranchSide::Left},
                  {{8, 9, -1}, BranchSide::Right}};
  CHECK(merged_sets(node, 10) == std::vector<std::vector<NodeId>>{{0, 1, 2, 3, 4}, {5, 6}});
  CHECK(merged_sets(SearchNode{}, 4).empty());
}

TEST_CASE("branching") {
  SearchNode root;
  const auto [left, right] = branch(root, {1, 2, 3});
  CHECK(left.depth == 1);
  CHECK(left.fixed.size() == 3);
  CHECK(left.fixed.at({2, 3}) == 0);
  CHECK(right.fixed.empty());
  CHECK(right.local_cuts == std::vector<Triple>{{1, 2, 3}});
  CHECK(left.serial != right.serial);
  CHECK_THROWS_AS(branch(left, {1, 2, 3}), std::invalid_argument);

  const auto [pl, pr] = branch_pair(root, 4, 2);
  CHECK(pl.fixed.at({2, 4}) == 0);
  CHECK(pr.fixed.at({2, 4}) == 1);
  CHECK(pl.history.back().is_pair());
  CHECK_THROWS_AS(branch_pair(pl, 2, 4), std::invalid_argument);
}

TEST_CASE("reduced-cost fixing examples") {
  const CpModel m = build_model(complete(3, 1.0));
  LpSolution lp;
  lp.status = LpStatus::Optimal;
  lp.objective = 10.0;
  lp.primal = {0.0, 1.0, 0.5};
  lp.reduced_costs = {-3.0, 2.0, 0.0};
  SearchNode a;
  CHECK(fix_by_reduced_cost(a, m, lp, 8.0) == 1);
  CHECK(a.fixed.at({0, 1}) == 0);
  SearchNode b;
  CHECK(fix_by_reduced_cost(b, m, lp, 8.5) == 2);
  CHECK(b.fixed.at({0, 2}) == 1);
  SearchNode c;
  c.fixed[{0, 1}] = 1;
  CHECK(fix_by_reduced_cost(c, m, lp, 8.5) == 1);
  CHECK(c.fixed.at({0, 1}) == 1);
  lp.status = LpStatus::Infeasible;
  SearchNode d;
  CHECK(fix_by_reduced_cost(d, m, lp, 100.0) == 0);
}

TEST_CASE("reduced-cost fixing keeps every optimal partition") {
  int fixed_total = 0;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const WeightedGraph g = testing::random_signed_graph(8, 0.6, -5, 5, 600 + seed);
    CpModel m = build_model(g);
    DualSimplexBackend backend;
    const LpSolution lp = solve_relaxation(m, backend).lp;
    const double opt = brute_force_optimum(g).weight;
    SearchNode node;
    // Weights are integers, so any partition beating opt - 0.5 is optimal.
    fixed_total += static_cast<int>(fix_by_reduced_cost(node, m, lp, opt - 0.5));
    for_each_partition(8, [&](std::span<const int> a) {
      const Partition p(std::vector<int>(a.begin(), a.end()));
      if (partition_weight(g, p) < opt - 1e-9) return;
      for (const auto& [pair, v] : node.fixed) CHECK(p.same_cluster(pair.first, pair.second) == (v == 0));
    });
  }
  CHECK(fixed_total > 0);
}

TEST_CASE("node model installs fixings and rows once") {
  const CpModel base = build_model(complete(4, 1.0));
  SearchNode node;
  node.fixed[{0, 1}] = 0;
  node.fixed[{2, 3}] = 1;
  node.local_cuts = {{0, 2, 3}, {0, 2, 3}};
  node.pool = {Cut::transitivity({0, 1, 2}, Apex::I), Cut::transitivity({0, 1, 2}, Apex::I),
               Cut::at_least_two({1, 2, 3})};
  const CpModel m = node_model(base, node);
  REQUIRE(m.cuts().size() == 2);
  CHECK(m.cuts()[0] == Cut::at_least_two({0, 2, 3}));
  CHECK(m.cuts()[1] == Cut::transitivity({0, 1, 2}, Apex::I));
  const auto v01 = static_cast<std::size_t>(m.var(0, 1)), v23 = static_cast<std::size_t>(m.var(2, 3));
  CHECK(m.upper()[v01] == 0.0);
  CHECK(m.lower()[v23] == 1.0);
  CHECK(m.lower()[static_cast<std::size_t>(m.var(0, 2))] == 0.0);
  CHECK(m.upper()[static_cast<std::size_t>(m.var(0, 2))] == 1.0);
  CHECK(std::string(to_string(NodeStatus::BoundDominated)) == "bound-dominated");
}
