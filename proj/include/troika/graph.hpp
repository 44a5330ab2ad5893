#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace troika {

using NodeId = std::int32_t;

/// Malformed or unsupported user input (files, arguments).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Broken internal invariant, e.g. a bound below an incumbent.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Undirected weighted edge with u <= v; u == v is a self-loop.
struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  double w = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct Neighbor {
  NodeId node = 0;
  double w = 0.0;
};

/**
 * Undirected real-weighted graph with optional self-loops.
 *
 * Stored weights are nonzero and there is at most one edge per unordered
 * pair. Immutable once built; construct through GraphBuilder or from_edges.
 */
class WeightedGraph {
 public:
  WeightedGraph() = default;

  /// Validating constructor: rejects zero weights, duplicate pairs and
  /// out-of-range ids.
  static WeightedGraph from_edges(NodeId n, std::span<const Edge> edges);

  NodeId node_count() const { return n_; }
  /// Number of stored edges, self-loops included.
  std::size_t edge_count() const { return edges_.size(); }
  std::span<const Edge> edges() const { return edges_; }

  /// Non-loop neighbors of i sorted by id.
  std::span<const Neighbor> neighbors(NodeId i) const;
  std::size_t neighbor_count(NodeId i) const;

  /// w_ij, or 0 when (i, j) is not an edge. weight(i, i) is the self-loop.
  double weight(NodeId i, NodeId j) const;
  double self_loop(NodeId i) const { return loops_[static_cast<std::size_t>(i)]; }
  double total_self_loops() const;

  /// Sum of incident weights, self-loop counted once.
  double degree(NodeId i) const;

  /// n x n symmetric matrix (row-major) with self-loops on the diagonal.
  std::vector<double> dense_weights() const;

 private:
  friend class GraphBuilder;

  NodeId n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_;
  std::vector<Neighbor> adjacency_;
  std::vector<double> loops_;
};

/// Incremental construction; add_edge enforces the one-edge-per-pair rule,
/// add_weight accumulates (used by contractions).
class GraphBuilder {
 public:
  explicit GraphBuilder(NodeId n);

  void add_edge(NodeId u, NodeId v, double w);
  void add_weight(NodeId u, NodeId v, double w);
  WeightedGraph build() const;

 private:
  NodeId n_;
  std::vector<Edge> edges_;
  std::unordered_map<std::uint64_t, std::size_t> index_;
  std::size_t find(NodeId u, NodeId v) const;
};

/**
 * Assignment of nodes to disjoint clusters.
 *
 * Always kept in canonical form: cluster ids are 0..k-1 in order of first
 * appearance, so two partitions are equal iff they group nodes identically.
 */
class Partition {
 public:
  Partition() = default;
  explicit Partition(std::vector<int> assignment);

  static Partition singletons(NodeId n);
  static Partition together(NodeId n);

  NodeId size() const { return static_cast<NodeId>(assignment_.size()); }
  int cluster_count() const { return cluster_count_; }
  int cluster_of(NodeId i) const { return assignment_[static_cast<std::size_t>(i)]; }
  bool same_cluster(NodeId i, NodeId j) const { return cluster_of(i) == cluster_of(j); }
  std::span<const int> assignment() const { return assignment_; }
  std::vector<std::vector<NodeId>> clusters() const;

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  std::vector<int> assignment_;
  int cluster_count_ = 0;
};

/// Sum of within-cluster edge weights; self-loops always count.
double partition_weight(const WeightedGraph& graph, const Partition& partition);

double degree(const WeightedGraph& graph, NodeId i);

/// Components of the unsigned structure, each sorted, ordered by smallest id.
std::vector<std::vector<NodeId>> connected_components(const WeightedGraph& graph);

/// Subgraph induced by `nodes`; node k of the result is nodes[k].
WeightedGraph induced_subgraph(const WeightedGraph& graph, std::span<const NodeId> nodes);

double sum_positive_weights(const WeightedGraph& graph);

}  // namespace troika
