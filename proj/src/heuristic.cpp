#include "troika/heuristic.hpp"

#include <algorithm>
#include <numeric>

namespace troika {

namespace {

constexpr double kGainEps = 1e-12;

struct Chain {
  double gain = 0.0;
  std::vector<NodeId> moved;  // best prefix
};

struct Move {
  int src = 0;
  int dst = 0;
  Chain chain;
};

class Search {
 public:
  Search(const WeightedGraph& g, const HeuristicConfig& cfg) : g_(g), n_(g.node_count()) {
    depth_ = cfg.shift_chain_depth > 0 ? cfg.shift_chain_depth : n_;
    if (cfg.start == HeuristicConfig::Start::Together) {
      cluster_.assign(static_cast<std::size_t>(n_), 0);
      count_ = n_ > 0 ? 1 : 0;
    } else {
      cluster_.resize(static_cast<std::size_t>(n_));
      std::iota(cluster_.begin(), cluster_.end(), 0);
      count_ = n_;
    }
  }

  HeuristicResult run(int max_rounds) {
    HeuristicResult res;
    double value = partition_weight(g_, Partition(cluster_));
    res.trace.push_back(value);
    for (int round = 0; round < max_rounds; ++round) {
      compact();
      rebuild_links();
      // Destination count_ stands for a fresh empty cluster.
      std::vector<Move> moves;
      for (int src = 0; src < count_; ++src) {
        for (int dst = 0; dst <= count_; ++dst) {
          if (src == dst) continue;
          Chain c = chain(src, dst);
          if (c.gain > kGainEps) moves.push_back({src, dst, std::move(c)});
        }
      }
      if (moves.empty()) break;
      std::stable_sort(moves.begin(), moves.end(), [](const Move& a, const Move& b) { return a.chain.gain > b.chain.gain; });
      // Recombinations on disjoint cluster pairs do not change each other's
      // gains, so a greedy disjoint set is applied at once.
      std::vector<char> touched(static_cast<std::size_t>(count_) + 1, 0);
      int fresh = count_;
      for (const Move& m : moves) {
        const bool to_new = m.dst == count_;
        if (touched[static_cast<std::size_t>(m.src)] || (!to_new && touched[static_cast<std::size_t>(m.dst)])) continue;
        touched[static_cast<std::size_t>(m.src)] = 1;
        const int target = to_new ? fresh++ : m.dst;
        if (!to_new) touched[static_cast<std::size_t>(m.dst)] = 1;
        for (NodeId v : m.chain.moved) cluster_[static_cast<std::size_t>(v)] = target;
      }
      count_ = fresh;
      value = partition_weight(g_, Partition(cluster_));
      res.trace.push_back(value);
    }
    res.partition = Partition(cluster_);
    res.weight = value;
    return res;
  }

 private:
  // Renumbers clusters to 0..count_-1 dropping empty ones.
  void compact() {
    std::vector<int> remap(static_cast<std::size_t>(count_) + 1, -1);
    int next = 0;
    for (int& c : cluster_) {
      if (remap[static_cast<std::size_t>(c)] < 0) remap[static_cast<std::size_t>(c)] = next++;
      c = remap[static_cast<std::size_t>(c)];
    }
    count_ = next;
  }

  // link_[v * count_ + c]: summed weight from v to cluster c (loops excluded).
  void rebuild_links() {
    link_.assign(static_cast<std::size_t>(n_) * static_cast<std::size_t>(count_ + 1), 0.0);
    for (NodeId v = 0; v < n_; ++v) {
      for (const Neighbor& nb : g_.neighbors(v)) link(v, cluster_[static_cast<std::size_t>(nb.node)]) += nb.w;
    }
  }

  double& link(NodeId v, int c) {
    return link_[static_cast<std::size_t>(v) * static_cast<std::size_t>(count_ + 1) + static_cast<std::size_t>(c)];
  }

  Chain chain(int src, int dst) {
    std::vector<NodeId> members;
    std::vector<double> gain;
    for (NodeId v = 0; v < n_; ++v) {
      if (cluster_[static_cast<std::size_t>(v)] != src) continue;
      members.push_back(v);
      gain.push_back(link(v, dst) - link(v, src));
    }
    if (dst == count_ && members.size() < 2) return {};  // moving a singleton to a new cluster is a no-op

    Chain best;
    std::vector<NodeId> moved;
    std::vector<char> used(members.size(), 0);
    double total = 0.0;
    const std::size_t steps = std::min(members.size(), static_cast<std::size_t>(depth_));
    for (std::size_t step = 0; step < steps; ++step) {
      std::size_t pick = members.size();
      for (std::size_t a = 0; a < members.size(); ++a) {
        if (used[a]) continue;
        if (pick == members.size() || gain[a] > gain[pick] + kGainEps ||
            (gain[a] >= gain[pick] - kGainEps && members[a] < members[pick])) {
          pick = a;
        }
      }
      used[pick] = 1;
      total += gain[pick];
      const NodeId u = members[pick];
      moved.push_back(u);
      if (total > best.gain + kGainEps) {
        best.gain = total;
        best.moved = moved;
      }
      // u now sits in dst: every remaining member gains 2 w_uv.
      for (std::size_t a = 0; a < members.size(); ++a) {
        if (!used[a]) gain[a] += 2.0 * g_.weight(u, members[a]);
      }
    }
    return best;
  }

  const WeightedGraph& g_;
  NodeId n_;
  int depth_ = 0;
  std::vector<int> cluster_;
  int count_ = 0;
  std::vector<double> link_;
};

}  // namespace

HeuristicResult heuristic_search(const WeightedGraph& graph, const HeuristicConfig& cfg) {
  HeuristicResult res = Search(graph, cfg).run(cfg.max_rounds);
  // Never worse than the two trivial partitions.
  for (const Partition& p : {Partition::singletons(graph.node_count()), Partition::together(graph.node_count())}) {
    const double w = partition_weight(graph, p);
    if (w > res.weight + kGainEps) {
      res.partition = p;
      res.weight = w;
      res.trace.push_back(w);
    }
  }
  return res;
}

Partition heuristic_partition(const WeightedGraph& graph, const HeuristicConfig& cfg) {
  return heuristic_search(graph, cfg).partition;
}

Partition heuristic_right_branch(const WeightedGraph& graph, Triple t, double delta, const HeuristicConfig& cfg) {
  if (delta < 0.0) throw std::invalid_argument("delta must be nonnegative");
  if (delta == 0.0) return heuristic_partition(graph, cfg);
  GraphBuilder b(graph.node_count());
  const auto touches = [&](NodeId v) { return v == t.i || v == t.j || v == t.k; };
  for (const Edge& e : graph.edges()) {
    const bool hit = e.u != e.v && (touches(e.u) || touches(e.v));
    b.add_weight(e.u, e.v, hit ? e.w - delta : e.w);
  }
  return heuristic_partition(b.build(), cfg);
}

Contraction contract(const WeightedGraph& graph, std::span<const std::vector<NodeId>> sets) {
  const NodeId n = graph.node_count();
  Contraction c;
  c.super_of.assign(static_cast<std::size_t>(n), -1);
  NodeId next = 0;
  for (const auto& set : sets) {
    if (set.empty()) continue;
    for (NodeId v : set) {
      if (v < 0 || v >= n) throw std::invalid_argument("merged set node out of range");
      if (c.super_of[static_cast<std::size_t>(v)] >= 0) throw std::invalid_argument("merged sets overlap");
      c.super_of[static_cast<std::size_t>(v)] = next;
    }
    ++next;
  }
  for (NodeId v = 0; v < n; ++v) {
    if (c.super_of[static_cast<std::size_t>(v)] < 0) c.super_of[static_cast<std::size_t>(v)] = next++;
  }
  GraphBuilder b(next);
  for (const Edge& e : graph.edges()) {
    b.add_weight(c.super_of[static_cast<std::size_t>(e.u)], c.super_of[static_cast<std::size_t>(e.v)], e.w);
  }
  c.graph = b.build();
  return c;
}

Partition expand(const Contraction& c, const Partition& contracted) {
  std::vector<int> a(c.super_of.size());
  for (std::size_t v = 0; v < a.size(); ++v) a[v] = contracted.cluster_of(c.super_of[v]);
  return Partition(std::move(a));
}

Partition heuristic_left_branch(const WeightedGraph& graph, std::span<const std::vector<NodeId>> merged_sets,
                                const HeuristicConfig& cfg) {
  const Contraction c = contract(graph, merged_sets);
  return expand(c, heuristic_partition(c.graph, cfg));
}

double median_delta(const WeightedGraph& graph) {
  std::vector<double> w;
  for (const Edge& e : graph.edges()) {
    if (e.u != e.v) w.push_back(e.w);
  }
  if (w.empty()) return 0.0;
  std::sort(w.begin(), w.end());
  const std::size_t h = w.size() / 2;
  const double med = w.size() % 2 ? w[h] : 0.5 * (w[h - 1] + w[h]);
  return std::abs(med);
}

}  // namespace troika
