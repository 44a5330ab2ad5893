#include "troika/graph.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace troika {

namespace {

void check_node(NodeId i, NodeId n) {
  if (i < 0 || i >= n) {
    std::ostringstream msg;
    msg << "node id " << i << " out of range [0, " << n << ")";
    throw std::out_of_range(msg.str());
  }
}

}  // namespace

WeightedGraph WeightedGraph::from_edges(NodeId n, std::span<const Edge> edges) {
  GraphBuilder builder(n);
  for (const Edge& e : edges) builder.add_edge(e.u, e.v, e.w);
  return builder.build();
}

std::span<const Neighbor> WeightedGraph::neighbors(NodeId i) const {
  check_node(i, n_);
  const auto k = static_cast<std::size_t>(i);
  return std::span<const Neighbor>(adjacency_).subspan(offsets_[k], offsets_[k + 1] - offsets_[k]);
}

std::size_t WeightedGraph::neighbor_count(NodeId i) const { return neighbors(i).size(); }

double WeightedGraph::weight(NodeId i, NodeId j) const {
  check_node(i, n_);
  check_node(j, n_);
  if (i == j) return loops_[static_cast<std::size_t>(i)];
  const auto nbrs = neighbors(i);
  const auto it = std::lower_bound(nbrs.begin(), nbrs.end(), j,
                                   [](const Neighbor& a, NodeId id) { return a.node < id; });
  return (it != nbrs.end() && it->node == j) ? it->w : 0.0;
}

double WeightedGraph::total_self_loops() const {
  return std::accumulate(loops_.begin(), loops_.end(), 0.0);
}

double WeightedGraph::degree(NodeId i) const {
  double d = self_loop(i);
  for (const Neighbor& nb : neighbors(i)) d += nb.w;
  return d;
}

std::vector<double> WeightedGraph::dense_weights() const {
  const auto n = static_cast<std::size_t>(n_);
  std::vector<double> w(n * n, 0.0);
  for (const Edge& e : edges_) {
    w[static_cast<std::size_t>(e.u) * n + static_cast<std::size_t>(e.v)] = e.w;
    w[static_cast<std::size_t>(e.v) * n + static_cast<std::size_t>(e.u)] = e.w;
  }
  return w;
}

namespace {

std::uint64_t pair_key(NodeId u, NodeId v) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(u)) << 32) | static_cast<std::uint32_t>(v);
}

}  // namespace

GraphBuilder::GraphBuilder(NodeId n) : n_(n) {
  if (n < 0) throw std::invalid_argument("negative node count");
}

std::size_t GraphBuilder::find(NodeId u, NodeId v) const {
  const auto it = index_.find(pair_key(u, v));
  return it == index_.end() ? edges_.size() : it->second;
}

void GraphBuilder::add_edge(NodeId u, NodeId v, double w) {
  check_node(u, n_);
  check_node(v, n_);
  if (w == 0.0) throw InputError("zero-weight edge (" + std::to_string(u) + ", " + std::to_string(v) + ")");
  if (u > v) std::swap(u, v);
  if (find(u, v) != edges_.size()) {
    throw InputError("duplicate edge (" + std::to_string(u) + ", " + std::to_string(v) + ")");
  }
  index_.emplace(pair_key(u, v), edges_.size());
  edges_.push_back({u, v, w});
}

void GraphBuilder::add_weight(NodeId u, NodeId v, double w) {
  check_node(u, n_);
  check_node(v, n_);
  if (u > v) std::swap(u, v);
  const std::size_t idx = find(u, v);
  if (idx == edges_.size()) {
    index_.emplace(pair_key(u, v), edges_.size());
    edges_.push_back({u, v, w});
  } else {
    edges_[idx].w += w;
  }
}

WeightedGraph GraphBuilder::build() const {
  WeightedGraph g;
  g.n_ = n_;
  const auto n = static_cast<std::size_t>(n_);
  g.loops_.assign(n, 0.0);
  for (const Edge& e : edges_) {
    if (e.w != 0.0) g.edges_.push_back(e);
  }
  std::sort(g.edges_.begin(), g.edges_.end(),
            [](const Edge& a, const Edge& b) { return a.u != b.u ? a.u < b.u : a.v < b.v; });

  std::vector<std::size_t> counts(n, 0);
  for (const Edge& e : g.edges_) {
    if (e.u == e.v) {
      g.loops_[static_cast<std::size_t>(e.u)] = e.w;
    } else {
      ++counts[static_cast<std::size_t>(e.u)];
      ++counts[static_cast<std::size_t>(e.v)];
    }
  }
  g.offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) g.offsets_[i + 1] = g.offsets_[i] + counts[i];
  g.adjacency_.resize(g.offsets_[n]);
  std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  for (const Edge& e : g.edges_) {
    if (e.u == e.v) continue;
    g.adjacency_[cursor[static_cast<std::size_t>(e.u)]++] = {e.v, e.w};
    g.adjacency_[cursor[static_cast<std::size_t>(e.v)]++] = {e.u, e.w};
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::sort(g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i]),
              g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i + 1]),
              [](const Neighbor& a, const Neighbor& b) { return a.node < b.node; });
  }
  return g;
}

Partition::Partition(std::vector<int> assignment) : assignment_(std::move(assignment)) {
  std::vector<int> relabel;
  for (int& c : assignment_) {
    if (c < 0) throw std::invalid_argument("negative cluster id");
    const auto key = static_cast<std::size_t>(c);
    if (key >= relabel.size()) relabel.resize(key + 1, -1);
    if (relabel[key] < 0) relabel[key] = cluster_count_++;
    c = relabel[key];
  }
}

Partition Partition::singletons(NodeId n) {
  std::vector<int> a(static_cast<std::size_t>(n));
  std::iota(a.begin(), a.end(), 0);
  return Partition(std::move(a));
}

Partition Partition::together(NodeId n) { return Partition(std::vector<int>(static_cast<std::size_t>(n), 0)); }

std::vector<std::vector<NodeId>> Partition::clusters() const {
  std::vector<std::vector<NodeId>> out(static_cast<std::size_t>(cluster_count_));
  for (NodeId i = 0; i < size(); ++i) out[static_cast<std::size_t>(cluster_of(i))].push_back(i);
  return out;
}

double partition_weight(const WeightedGraph& graph, const Partition& partition) {
  if (partition.size() != graph.node_count()) {
    throw std::invalid_argument("partition length " + std::to_string(partition.size()) +
                                " does not match node count " + std::to_string(graph.node_count()));
  }
  double total = 0.0;
  for (const Edge& e : graph.edges()) {
    if (partition.same_cluster(e.u, e.v)) total += e.w;
  }
  return total;
}

double degree(const WeightedGraph& graph, NodeId i) { return graph.degree(i); }

std::vector<std::vector<NodeId>> connected_components(const WeightedGraph& graph) {
  const NodeId n = graph.node_count();
  std::vector<int> comp(static_cast<std::size_t>(n), -1);
  std::vector<std::vector<NodeId>> out;
  std::vector<NodeId> stack;
  for (NodeId s = 0; s < n; ++s) {
    if (comp[static_cast<std::size_t>(s)] >= 0) continue;
    const int id = static_cast<int>(out.size());
    out.emplace_back();
    comp[static_cast<std::size_t>(s)] = id;
    stack.push_back(s);
    while (!stack.empty()) {
      const NodeId v = stack.back();
      stack.pop_back();
      out.back().push_back(v);
      for (const Neighbor& nb : graph.neighbors(v)) {
        if (comp[static_cast<std::size_t>(nb.node)] < 0) {
          comp[static_cast<std::size_t>(nb.node)] = id;
          stack.push_back(nb.node);
        }
      }
    }
    std::sort(out.back().begin(), out.back().end());
  }
  return out;
}

WeightedGraph induced_subgraph(const WeightedGraph& graph, std::span<const NodeId> nodes) {
  std::vector<NodeId> local(static_cast<std::size_t>(graph.node_count()), -1);
  for (std::size_t k = 0; k < nodes.size(); ++k) local[static_cast<std::size_t>(nodes[k])] = static_cast<NodeId>(k);
  GraphBuilder builder(static_cast<NodeId>(nodes.size()));
  for (const Edge& e : graph.edges()) {
    const NodeId a = local[static_cast<std::size_t>(e.u)];
    const NodeId b = local[static_cast<std::size_t>(e.v)];
    if (a >= 0 && b >= 0) builder.add_edge(a, b, e.w);
  }
  return builder.build();
}

double sum_positive_weights(const WeightedGraph& graph) {
  double s = 0.0;
  for (const Edge& e : graph.edges()) {
    if (e.u != e.v && e.w > 0.0) s += e.w;
  }
  return s;
}

}  // namespace troika
