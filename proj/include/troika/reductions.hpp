#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "troika/graph.hpp"

namespace troika {

/// Modularity matrix b_ij = A_ij - gamma d_i d_j / sum_w over ordered pairs,
/// with A_ii = 2 * self-loop, so sum_w = 2 * (edges + self-loops).
std::vector<double> modularity_matrix(const WeightedGraph& graph, double gamma = 1.0);

/// CP instance whose partition weight equals modularity * sum_w: edge
/// 2 b_ij for i < j, self-loop b_ii. Needs nonnegative weights and a
/// positive total weight.
WeightedGraph modularity_to_cp(const WeightedGraph& graph, double gamma = 1.0);

double modularity(const WeightedGraph& graph, const Partition& partition, double gamma = 1.0);

/// Sum of A_ij over ordered pairs, self-loops counted twice.
double modularity_total_weight(const WeightedGraph& graph);

/// Objects x categorical attributes; nullopt is a missing cell.
struct AttributeMatrix {
  std::vector<std::vector<std::optional<std::string>>> cells;

  std::size_t objects() const { return cells.size(); }
  std::size_t attributes() const { return cells.empty() ? 0 : cells.front().size(); }
};

/// Comma-separated tokens, one object per line; "?" or an empty cell is missing.
AttributeMatrix read_attribute_matrix(std::istream& in, bool header = false);
AttributeMatrix load_attribute_matrix(const std::string& path, bool header = false);

/// w_ij = 2 * (attributes on which i and j agree) - q; zero pairs omitted.
WeightedGraph abr_to_cp(const AttributeMatrix& a);

struct ReturnsMatrix {
  std::vector<std::string> assets;
  std::vector<std::string> periods;
  /// values[t][a]: return of asset a in period t.
  std::vector<std::vector<double>> values;
};

/// Header row of asset ids (first cell labels the period column), then one
/// row per period.
ReturnsMatrix read_returns_matrix(std::istream& in);
ReturnsMatrix load_returns_matrix(const std::string& path);

double pearson(std::span<const double> x, std::span<const double> y);

/// atanh(1 - 1e-12): the transform of a correlation of +-1.
double fisher_cap();
double fisher_z(double r);

struct PortfolioGraph {
  WeightedGraph graph;
  /// id_map[k]: column index of node k in the returns matrix.
  std::vector<NodeId> id_map;
  std::vector<std::string> labels;
  double mean_z = 0.0;
  double sd_z = 0.0;
};

/// Edge (i, j) with weight r_ij whenever the Fisher value of r_ij lies more
/// than two standard deviations from the mean over all pairs; isolated
/// assets are dropped.
PortfolioGraph fisher_portfolio_graph(const ReturnsMatrix& r);

struct BaConfig {
  NodeId min_nodes = 100;
  NodeId max_nodes = 150;
  int min_attach = 3;
  int max_attach = 6;
  int min_weight = -10;
  int max_weight = 10;
};

/// Preferential attachment grown from a clique, integer weights uniform on
/// [min_weight, max_weight] without 0.
WeightedGraph gen_ba_weighted(std::uint64_t seed, const BaConfig& cfg = {});

/// Complete graph of Pearson correlations between the columns of a uniform
/// random rows x cols matrix.
WeightedGraph gen_correlation_instance(NodeId cols, int rows, std::uint64_t seed);

/// Complete graph with weight -1 on each edge with probability
/// neg_fraction, +1 otherwise.
WeightedGraph gen_clusedit_instance(NodeId n, double neg_fraction, std::uint64_t seed);

}  // namespace troika
