#include "troika/reductions.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <unordered_set>

namespace troika {

namespace {

void require_modularity_input(const WeightedGraph& g) {
  for (const Edge& e : g.edges()) {
    if (e.w < 0.0) throw InputError("modularity needs nonnegative weights");
  }
  if (!(modularity_total_weight(g) > 0.0)) throw InputError("modularity needs a positive total weight");
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool blank(const std::string& line) { return line.find_first_not_of(" \t\r") == std::string::npos; }

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  return in;
}

}  // namespace

double modularity_total_weight(const WeightedGraph& graph) {
  double total = 0.0;
  for (const Edge& e : graph.edges()) total += 2.0 * e.w;
  return total;
}

std::vector<double> modularity_matrix(const WeightedGraph& graph, double gamma) {
  require_modularity_input(graph);
  const auto n = static_cast<std::size_t>(graph.node_count());
  std::vector<double> a = graph.dense_weights();
  for (std::size_t i = 0; i < n; ++i) a[i * n + i] *= 2.0;
  std::vector<double> d(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) d[i] += a[i * n + j];
  }
  const double total = modularity_total_weight(graph);
  std::vector<double> b(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) b[i * n + j] = a[i * n + j] - gamma * d[i] * d[j] / total;
  }
  return b;
}

WeightedGraph modularity_to_cp(const WeightedGraph& graph, double gamma) {
  const std::vector<double> b = modularity_matrix(graph, gamma);
  const NodeId n = graph.node_count();
  const auto nn = static_cast<std::size_t>(n);
  GraphBuilder builder(n);
  for (NodeId i = 0; i < n; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    if (b[ii * nn + ii] != 0.0) builder.add_edge(i, i, b[ii * nn + ii]);
    for (NodeId j = i + 1; j < n; ++j) {
      const double w = 2.0 * b[ii * nn + static_cast<std::size_t>(j)];
      if (w != 0.0) builder.add_edge(i, j, w);
    }
  }
  return builder.build();
}

double modularity(const WeightedGraph& graph, const Partition& partition, double gamma) {
  if (partition.size() != graph.node_count()) throw std::invalid_argument("partition size does not match graph");
  const std::vector<double> b = modularity_matrix(graph, gamma);
  const auto n = static_cast<std::size_t>(graph.node_count());
  double q = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (partition.same_cluster(static_cast<NodeId>(i), static_cast<NodeId>(j))) q += b[i * n + j];
    }
  }
  return q / modularity_total_weight(graph);
}

AttributeMatrix read_attribute_matrix(std::istream& in, bool header) {
  AttributeMatrix a;
  std::string line;
  std::size_t lineno = 0;
  bool skipped = !header;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line) || line[0] == '#') continue;
    if (!skipped) {
      skipped = true;
      continue;
    }
    std::vector<std::optional<std::string>> row;
    for (std::string& cell : split_csv(line)) {
      if (cell.empty() || cell == "?") row.emplace_back(std::nullopt);
      else row.emplace_back(std::move(cell));
    }
    if (!a.cells.empty() && row.size() != a.attributes()) {
      throw InputError("line " + std::to_string(lineno) + ": expected " + std::to_string(a.attributes()) +
                       " attributes, got " + std::to_string(row.size()));
    }
    a.cells.push_back(std::move(row));
  }
  return a;
}

AttributeMatrix load_attribute_matrix(const std::string& path, bool header) {
  auto in = open_or_throw(path);
  return read_attribute_matrix(in, header);
}

WeightedGraph abr_to_cp(const AttributeMatrix& a) {
  const std::size_t z = a.objects(), q = a.attributes();
  if (z < 2) throw InputError("attribute matrix needs at least 2 objects");
  if (q < 1) throw InputError("attribute matrix needs at least 1 attribute");
  for (std::size_t i = 0; i < z; ++i) {
    for (std::size_t v = 0; v < q; ++v) {
      if (!a.cells[i][v]) {
        throw InputError("missing value at object " + std::to_string(i) + ", attribute " + std::to_string(v) +
                         " is not supported");
      }
    }
  }
  GraphBuilder b(static_cast<NodeId>(z));
  for (std::size_t i = 0; i < z; ++i) {
    for (std::size_t j = i + 1; j < z; ++j) {
      long agree = 0;
      for (std::size_t v = 0; v < q; ++v) agree += *a.cells[i][v] == *a.cells[j][v];
      const long w = 2 * agree - static_cast<long>(q);
      if (w != 0) b.add_edge(static_cast<NodeId>(i), static_cast<NodeId>(j), static_cast<double>(w));
    }
  }
  return b.build();
}

ReturnsMatrix read_returns_matrix(std::istream& in) {
  ReturnsMatrix r;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    auto cells = split_csv(line);
    if (!have_header) {
      if (cells.size() < 2) throw InputError("line " + std::to_string(lineno) + ": header needs asset columns");
      r.assets.assign(cells.begin() + 1, cells.end());
      std::unordered_set<std::string> seen;
      for (const auto& id : r.assets) {
        if (!seen.insert(id).second) throw InputError("duplicate asset id " + id);
      }
      have_header = true;
      continue;
    }
    if (cells.size() != r.assets.size() + 1) {
      throw InputError("line " + std::to_string(lineno) + ": expected " + std::to_string(r.assets.size() + 1) +
                       " cells, got " + std::to_string(cells.size()));
    }
    r.periods.push_back(cells[0]);
    std::vector<double> row;
    for (std::size_t c = 1; c < cells.size(); ++c) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cells[c], &used));
        if (used != cells[c].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw InputError("line " + std::to_string(lineno) + ": bad return '" + cells[c] + "'");
      }
    }
    r.values.push_back(std::move(row));
  }
  if (!have_header) throw InputError("empty returns matrix");
  return r;
}

ReturnsMatrix load_returns_matrix(const std::string& path) {
  auto in = open_or_throw(path);
  return read_returns_matrix(in);
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("pearson needs two equal series of length >= 2");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t) {
    mx += x[t];
    my += y[t];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t) {
    sxy += (x[t] - mx) * (y[t] - my);
    sxx += (x[t] - mx) * (x[t] - mx);
    syy += (y[t] - my) * (y[t] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) throw InputError("zero-variance series");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double fisher_cap() { return std::atanh(1.0 - 1e-12); }

double fisher_z(double r) {
  if (r >= 1.0) return fisher_cap();
  if (r <= -1.0) return -fisher_cap();
  return std::clamp(0.5 * std::log((1.0 + r) / (1.0 - r)), -fisher_cap(), fisher_cap());
}

PortfolioGraph fisher_portfolio_graph(const ReturnsMatrix& r) {
  const std::size_t periods = r.values.size(), assets = r.assets.size();
  if (periods < 3) throw InputError("returns matrix needs at least 3 periods");
  if (assets < 2) throw InputError("returns matrix needs at least 2 assets");
  std::vector<std::vector<double>> cols(assets, std::vector<double>(periods));
  for (std::size_t t = 0; t < periods; ++t) {
    for (std::size_t a = 0; a < assets; ++a) cols[a][t] = r.values[t][a];
  }
  for (std::size_t a = 0; a < assets; ++a) {
    const auto [lo, hi] = std::minmax_element(cols[a].begin(), cols[a].end());
    if (*lo == *hi) throw InputError("asset " + r.assets[a] + " has zero variance");
  }
  struct PairZ {
    NodeId i, j;
    double r, z;
  };
  std::vector<PairZ> pairs;
  for (std::size_t i = 0; i < assets; ++i) {
    for (std::size_t j = i + 1; j < assets; ++j) {
      const double c = pearson(cols[i], cols[j]);
      pairs.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j), c, fisher_z(c)});
    }
  }
  double mean = 0.0;
  for (const auto& p : pairs) mean += p.z;
  mean /= static_cast<double>(pairs.size());
  double var = 0.0;
  for (const auto& p : pairs) var += (p.z - mean) * (p.z - mean);
  const double sd = std::sqrt(var / static_cast<double>(pairs.size()));

  std::vector<PairZ> kept;
  std::vector<char> used(assets, 0);
  for (const auto& p : pairs) {
    if (std::abs(p.z - mean) > 2.0 * sd && p.r != 0.0) {
      kept.push_back(p);
      used[static_cast<std::size_t>(p.i)] = used[static_cast<std::size_t>(p.j)] = 1;
    }
  }
  PortfolioGraph out;
  out.mean_z = mean;
  out.sd_z = sd;
  std::vector<NodeId> local(assets, -1);
  for (std::size_t a = 0; a < assets; ++a) {
    if (!used[a]) continue;
    local[a] = static_cast<NodeId>(out.id_map.size());
    out.id_map.push_back(static_cast<NodeId>(a));
    out.labels.push_back(r.assets[a]);
  }
  GraphBuilder b(static_cast<NodeId>(out.id_map.size()));
  for (const auto& p : kept) b.add_edge(local[static_cast<std::size_t>(p.i)], local[static_cast<std::size_t>(p.j)], p.r);
  out.graph = b.build();
  return out;
}

WeightedGraph gen_ba_weighted(std::uint64_t seed, const BaConfig& cfg) {
  if (cfg.min_nodes < 2 || cfg.max_nodes < cfg.min_nodes || cfg.min_attach < 1 || cfg.max_attach < cfg.min_attach ||
      cfg.min_weight > cfg.max_weight || (cfg.min_weight == 0 && cfg.max_weight == 0)) {
    throw InputError("invalid preferential attachment parameters");
  }
  std::mt19937_64 rng(seed);
  const NodeId n = std::uniform_int_distribution<NodeId>(cfg.min_nodes, cfg.max_nodes)(rng);
  const int attach = std::min<int>(std::uniform_int_distribution<int>(cfg.min_attach, cfg.max_attach)(rng), n - 1);
  std::uniform_int_distribution<int> weight(cfg.min_weight, cfg.max_weight);
  const auto draw = [&] {
    int w = 0;
    while (w == 0) w = weight(rng);
    return static_cast<double>(w);
  };
  GraphBuilder b(n);
  // Endpoint list: a node appears once per incident edge.
  std::vector<NodeId> ends;
  const NodeId core = static_cast<NodeId>(attach + 1);
  for (NodeId i = 0; i < core; ++i) {
    for (NodeId j = i + 1; j < core; ++j) {
      b.add_edge(i, j, draw());
      ends.push_back(i);
      ends.push_back(j);
    }
  }
  for (NodeId v = core; v < n; ++v) {
    std::vector<NodeId> targets;
    while (static_cast<int>(targets.size()) < attach) {
      const NodeId t = ends[std::uniform_int_distribution<std::size_t>(0, ends.size() - 1)(rng)];
      if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
    }
    for (NodeId t : targets) {
      b.add_edge(t, v, draw());
      ends.push_back(t);
      ends.push_back(v);
    }
  }
  return b.build();
}

WeightedGraph gen_correlation_instance(NodeId cols, int rows, std::uint64_t seed) {
  if (rows < 3) throw InputError("correlation instance needs at least 3 rows");
  if (cols < 1) throw InputError("correlation instance needs at least 1 column");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::vector<double>> m(static_cast<std::size_t>(cols), std::vector<double>(static_cast<std::size_t>(rows)));
  for (int r = 0; r < rows; ++r) {
    for (auto& col : m) col[static_cast<std::size_t>(r)] = unit(rng);
  }
  GraphBuilder b(cols);
  for (NodeId i = 0; i < cols; ++i) {
    for (NodeId j = i + 1; j < cols; ++j) {
      const double w = pearson(m[static_cast<std::size_t>(i)], m[static_cast<std::size_t>(j)]);
      if (w != 0.0) b.add_edge(i, j, w);
    }
  }
  return b.build();
}

WeightedGraph gen_clusedit_instance(NodeId n, double neg_fraction, std::uint64_t seed) {
  if (!(neg_fraction > 0.0 && neg_fraction < 1.0)) throw InputError("negative fraction must lie in (0, 1)");
  if (n < 1) throw InputError("clusedit instance needs at least 1 node");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution negative(neg_fraction);
  GraphBuilder b(n);
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) b.add_edge(i, j, negative(rng) ? -1.0 : 1.0);
  }
  return b.build();
}

}  // namespace troika
