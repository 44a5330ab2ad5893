#include "troika/preprocess.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>

namespace troika {

std::vector<Component> decompose_components(const WeightedGraph& graph) {
  std::vector<Component> out;
  for (auto& nodes : connected_components(graph)) {
    Component c;
    c.graph = induced_subgraph(graph, nodes);
    c.id_map = std::move(nodes);
    out.push_back(std::move(c));
  }
  return out;
}

namespace {

// Mutable working copy; ids stay those of the input graph.
class Workspace {
 public:
  explicit Workspace(const WeightedGraph& g)
      : adj_(static_cast<std::size_t>(g.node_count())),
        loops_(static_cast<std::size_t>(g.node_count()), 0.0),
        alive_(static_cast<std::size_t>(g.node_count()), true) {
    for (const Edge& e : g.edges()) {
      if (e.u == e.v) {
        loops_[idx(e.u)] = e.w;
      } else {
        adj_[idx(e.u)][e.v] = e.w;
        adj_[idx(e.v)][e.u] = e.w;
      }
    }
  }

  NodeId size() const { return static_cast<NodeId>(alive_.size()); }
  bool alive(NodeId i) const { return alive_[idx(i)]; }
  const std::map<NodeId, double>& nbrs(NodeId i) const { return adj_[idx(i)]; }

  void remove(NodeId i, NodeId heir) {
    loops_[idx(heir)] += loops_[idx(i)];
    loops_[idx(i)] = 0.0;
    for (const auto& [j, w] : adj_[idx(i)]) adj_[idx(j)].erase(i);
    adj_[idx(i)].clear();
    alive_[idx(i)] = false;
  }

  void add_loop(NodeId i, double w) { loops_[idx(i)] += w; }

  ReducedGraph finish(std::vector<ReductionStep> steps) const {
    ReducedGraph out;
    out.log.original_count = size();
    out.log.steps = std::move(steps);
    std::vector<NodeId> local(alive_.size(), -1);
    for (NodeId i = 0; i < size(); ++i) {
      if (!alive(i)) continue;
      local[idx(i)] = static_cast<NodeId>(out.log.id_map.size());
      out.log.id_map.push_back(i);
    }
    GraphBuilder builder(static_cast<NodeId>(out.log.id_map.size()));
    for (NodeId i = 0; i < size(); ++i) {
      if (!alive(i)) continue;
      if (loops_[idx(i)] != 0.0) builder.add_edge(local[idx(i)], local[idx(i)], loops_[idx(i)]);
      for (const auto& [j, w] : adj_[idx(i)]) {
        if (i < j) builder.add_edge(local[idx(i)], local[idx(j)], w);
      }
    }
    out.graph = builder.build();
    return out;
  }

 private:
  static std::size_t idx(NodeId i) { return static_cast<std::size_t>(i); }

  std::vector<std::map<NodeId, double>> adj_;
  std::vector<double> loops_;
  std::vector<bool> alive_;
};

bool reduce_pendant_nodes(Workspace& ws, std::vector<ReductionStep>& steps) {
  bool any = false;
  bool changed = true;
  while (changed) {
    changed = false;
    for (NodeId i = 0; i < ws.size(); ++i) {
      if (!ws.alive(i) || ws.nbrs(i).size() != 1) continue;
      const auto [u, w] = *ws.nbrs(i).begin();
      const bool separate = w < 0.0;
      if (!separate) ws.add_loop(u, w);
      ws.remove(i, u);
      steps.emplace_back(PendantNode{i, u, w, separate});
      changed = any = true;
    }
  }
  return any;
}

// Smallest pendant clique of size >= 3, if any.
std::optional<PendantClique> find_pendant_clique(const Workspace& ws) {
  std::optional<PendantClique> best;
  for (NodeId v = 0; v < ws.size(); ++v) {
    if (!ws.alive(v)) continue;
    const auto& nv = ws.nbrs(v);
    const std::size_t s = nv.size() + 1;
    if (s < 3 || (best && best->members.size() + 1 <= s)) continue;
    if (!std::all_of(nv.begin(), nv.end(), [](const auto& kv) { return kv.second > 0.0; })) continue;

    std::vector<NodeId> clique{v};
    for (const auto& kv : nv) clique.push_back(kv.first);
    std::sort(clique.begin(), clique.end());

    std::optional<NodeId> connector;
    bool ok = true;
    double internal = 0.0;
    for (NodeId a : clique) {
      const auto& na = ws.nbrs(a);
      // Members see only the clique; the connector has one extra edge.
      if (na.size() == s && !connector) {
        connector = a;
      } else if (na.size() != s - 1) {
        ok = false;
        break;
      }
      for (NodeId b : clique) {
        if (b <= a) continue;
        const auto it = na.find(b);
        if (it == na.end() || it->second <= 0.0) {
          ok = false;
          break;
        }
        internal += it->second;
      }
      if (!ok) break;
    }
    if (!ok || !connector) continue;

    PendantClique pc;
    pc.connector = *connector;
    pc.internal_weight = internal;
    for (NodeId a : clique) {
      if (a != *connector) pc.members.push_back(a);
    }
    best = std::move(pc);
  }
  return best;
}

}  // namespace

ReducedGraph reduce_pendants(const WeightedGraph& graph) {
  Workspace ws(graph);
  std::vector<ReductionStep> steps;
  for (;;) {
    reduce_pendant_nodes(ws, steps);
    auto clique = find_pendant_clique(ws);
    if (!clique) break;
    ws.add_loop(clique->connector, clique->internal_weight);
    for (NodeId a : clique->members) ws.remove(a, clique->connector);
    steps.emplace_back(std::move(*clique));
  }
  return ws.finish(std::move(steps));
}

ReducedGraph identity_reduction(const WeightedGraph& graph) {
  ReducedGraph out;
  out.graph = graph;
  out.log.original_count = graph.node_count();
  out.log.id_map.resize(static_cast<std::size_t>(graph.node_count()));
  std::iota(out.log.id_map.begin(), out.log.id_map.end(), 0);
  return out;
}

Partition lift_partition(const ReductionLog& log, const Partition& reduced) {
  if (reduced.size() != static_cast<NodeId>(log.id_map.size())) {
    throw std::invalid_argument("partition covers " + std::to_string(reduced.size()) +
                                " nodes but the reduction kept " + std::to_string(log.id_map.size()));
  }
  std::vector<int> full(static_cast<std::size_t>(log.original_count), -1);
  int next = reduced.cluster_count();
  for (std::size_t k = 0; k < log.id_map.size(); ++k) {
    full[static_cast<std::size_t>(log.id_map[k])] = reduced.cluster_of(static_cast<NodeId>(k));
  }
  for (auto it = log.steps.rbegin(); it != log.steps.rend(); ++it) {
    if (const auto* p = std::get_if<PendantNode>(&*it)) {
      full[static_cast<std::size_t>(p->pendant)] = p->kept_separate ? next++ : full[static_cast<std::size_t>(p->neighbor)];
    } else {
      const auto& c = std::get<PendantClique>(*it);
      for (NodeId a : c.members) full[static_cast<std::size_t>(a)] = full[static_cast<std::size_t>(c.connector)];
    }
  }
  if (std::any_of(full.begin(), full.end(), [](int c) { return c < 0; })) {
    throw std::invalid_argument("reduction log does not cover every node");
  }
  return Partition(std::move(full));
}

}  // namespace troika
