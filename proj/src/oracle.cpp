#include "troika/oracle.hpp"

#include <vector>

namespace troika {

namespace {

struct Enumerator {
  NodeId n;
  const std::vector<double>& w;
  std::vector<int> a;
  std::vector<int> best;
  double best_weight = 0.0;
  bool have = false;
  std::uint64_t visited = 0;

  void go(NodeId v, int k, double acc) {
    if (v == n) {
      ++visited;
      if (!have || acc > best_weight) {
        best = a;
        best_weight = acc;
        have = true;
      }
      return;
    }
    std::vector<double> gain(static_cast<std::size_t>(k) + 1, 0.0);
    const std::size_t row = static_cast<std::size_t>(v) * static_cast<std::size_t>(n);
    for (NodeId u = 0; u < v; ++u) gain[static_cast<std::size_t>(a[static_cast<std::size_t>(u)])] += w[row + static_cast<std::size_t>(u)];
    for (int c = 0; c <= k; ++c) {
      a[static_cast<std::size_t>(v)] = c;
      go(v + 1, c == k ? k + 1 : k, acc + gain[static_cast<std::size_t>(c)]);
    }
  }
};

void enumerate(std::vector<int>& a, NodeId v, int k, const std::function<void(std::span<const int>)>& fn) {
  if (v == static_cast<NodeId>(a.size())) {
    fn(a);
    return;
  }
  for (int c = 0; c <= k; ++c) {
    a[static_cast<std::size_t>(v)] = c;
    enumerate(a, v + 1, c == k ? k + 1 : k, fn);
  }
}

}  // namespace

OracleResult brute_force_optimum(const WeightedGraph& graph) {
  const NodeId n = graph.node_count();
  if (n > kOracleMaxNodes) {
    throw InputError("oracle supports at most " + std::to_string(kOracleMaxNodes) + " nodes, got " + std::to_string(n));
  }
  const std::vector<double> w = graph.dense_weights();
  Enumerator e{n, w, std::vector<int>(static_cast<std::size_t>(n), 0), {}, 0.0, false, 0};
  e.go(0, 0, graph.total_self_loops());
  OracleResult r;
  r.partition = Partition(std::move(e.best));
  r.weight = e.best_weight;
  r.visited = e.visited;
  return r;
}

void for_each_partition(NodeId n, const std::function<void(std::span<const int>)>& fn) {
  std::vector<int> a(static_cast<std::size_t>(n), 0);
  enumerate(a, 0, 0, fn);
}

std::uint64_t bell_number(int n) {
  // Bell triangle.
  std::vector<std::uint64_t> row{1};
  for (int i = 0; i < n; ++i) {
    std::vector<std::uint64_t> next{row.back()};
    for (std::uint64_t x : row) next.push_back(next.back() + x);
    row = std::move(next);
  }
  return row.front();
}

}  // namespace troika
