#include "troika/bounds.hpp"

#include <algorithm>
#include <tuple>
#include <unordered_set>

namespace troika {

namespace {

double triangle_optimum(double ab, double ac, double bc) {
  return std::max({0.0, ab, ac, bc, ab + ac + bc});
}

std::uint64_t edge_key(NodeId a, NodeId b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

}  // namespace

double upper_bound_subnetwork(const WeightedGraph& graph) {
  struct Tri {
    double saving;
    double opt;
    NodeId a, b, c;
  };
  std::vector<Tri> tris;
  const NodeId n = graph.node_count();
  for (NodeId a = 0; a < n; ++a) {
    const auto na = graph.neighbors(a);
    for (std::size_t x = 0; x < na.size(); ++x) {
      const NodeId b = na[x].node;
      if (b <= a) continue;
      for (std::size_t y = x + 1; y < na.size(); ++y) {
        const NodeId c = na[y].node;
        const double bc = graph.weight(b, c);
        if (bc == 0.0) continue;
        const double ab = na[x].w, ac = na[y].w;
        const int pos = int(ab > 0) + int(ac > 0) + int(bc > 0);
        if (pos == 0 || pos == 3) continue;
        const double opt = triangle_optimum(ab, ac, bc);
        const double positive = std::max(ab, 0.0) + std::max(ac, 0.0) + std::max(bc, 0.0);
        if (positive - opt > 0.0) tris.push_back({positive - opt, opt, a, b, c});
      }
    }
  }
  std::stable_sort(tris.begin(), tris.end(), [](const Tri& l, const Tri& r) {
    return std::tie(r.saving, l.a, l.b, l.c) < std::tie(l.saving, r.a, r.b, r.c);
  });

  std::unordered_set<std::uint64_t> used;
  double bound = 0.0;
  for (const Tri& t : tris) {
    const auto e1 = edge_key(t.a, t.b), e2 = edge_key(t.a, t.c), e3 = edge_key(t.b, t.c);
    if (used.contains(e1) || used.contains(e2) || used.contains(e3)) continue;
    used.insert(e1);
    used.insert(e2);
    used.insert(e3);
    bound += t.opt;
  }
  for (const Edge& e : graph.edges()) {
    if (e.u == e.v) bound += e.w;
    else if (!used.contains(edge_key(e.u, e.v))) bound += std::max(e.w, 0.0);
  }
  return bound;
}

RootBounds root_bounds(const WeightedGraph& graph, const HeuristicConfig& heuristic,
                       const SeparationOptions& separation) {
  RootBounds r;
  HeuristicResult h = heuristic_search(graph, heuristic);
  r.partition = std::move(h.partition);
  r.lower = h.weight;
  r.subnetwork = upper_bound_subnetwork(graph);
  r.lp = graph.node_count() >= 2 ? lp_upper_bound(graph, separation) : graph.total_self_loops();
  r.upper = std::max(std::min(r.subnetwork, r.lp), r.lower);
  return r;
}

}  // namespace troika
