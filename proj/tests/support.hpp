#pragma once

// Shared helpers for the test binaries: seeded instance builders and small
// reference implementations that do not go through the library code paths.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "troika/graph.hpp"

namespace troika::testing {

/// G(n, p) with integer weights uniform on [lo, hi] \ {0}.
inline WeightedGraph random_signed_graph(NodeId n, double p, int lo, int hi, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution edge(p);
  std::uniform_int_distribution<int> weight(lo, hi);
  GraphBuilder b(n);
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      if (!edge(rng)) continue;
      int w = 0;
      while (w == 0) w = weight(rng);
      b.add_edge(i, j, w);
    }
  }
  return b.build();
}

/// Weight of a labelling computed straight from the edge list.
inline double labelling_weight(const WeightedGraph& g, const std::vector<int>& label) {
  double total = 0.0;
  for (const Edge& e : g.edges()) {
    if (label[static_cast<std::size_t>(e.u)] == label[static_cast<std::size_t>(e.v)]) total += e.w;
  }
  return total;
}

/// Optimum over all n^n labellings (n <= 7). Slow but shares nothing with
/// the restricted-growth enumerator.
inline double naive_optimum(const WeightedGraph& g) {
  const auto n = static_cast<std::size_t>(g.node_count());
  std::vector<int> label(n, 0);
  double best = -INFINITY;
  for (;;) {
    best = std::max(best, labelling_weight(g, label));
    std::size_t k = 0;
    while (k < n && ++label[k] == static_cast<int>(n)) label[k++] = 0;
    if (k == n) break;
  }
  return n == 0 ? 0.0 : best;
}

/// Calls fn with every labelling in n^n order.
inline void for_each_labelling(std::size_t n, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> label(n, 0);
  for (;;) {
    fn(label);
    std::size_t k = 0;
    while (k < n && ++label[k] == static_cast<int>(n)) label[k++] = 0;
    if (k == n) return;
  }
}

/**
 * Textbook two-phase tableau simplex with Bland's rule:
 * max c x subject to A x <= b, x >= 0. Returns nullopt when infeasible;
 * assumes a bounded problem.
 */
inline std::optional<double> textbook_lp_max(const std::vector<double>& c, const std::vector<std::vector<double>>& A,
                                             const std::vector<double>& b) {
  const std::size_t m = A.size(), n = c.size();
  // Columns: x (n), slacks (m), artificials (m), rhs.
  const std::size_t cols = n + 2 * m + 1, rhs = cols - 1;
  std::vector<std::vector<double>> t(m, std::vector<double>(cols, 0.0));
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double s = b[i] < 0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < n; ++j) t[i][j] = s * A[i][j];
    t[i][n + i] = s;
    t[i][rhs] = s * b[i];
    if (b[i] < 0) {
      t[i][n + m + i] = 1.0;
      basis[i] = n + m + i;
    } else {
      basis[i] = n + i;
    }
  }
  const double eps = 1e-10;
  const auto run = [&](const std::vector<double>& cost, std::size_t allowed) {
    for (;;) {
      // Reduced costs of a maximisation: cost_j - c_B B^-1 a_j.
      std::size_t enter = cols;
      for (std::size_t j = 0; j < allowed && enter == cols; ++j) {
        if (std::find(basis.begin(), basis.end(), j) != basis.end()) continue;
        double rc = cost[j];
        for (std::size_t i = 0; i < m; ++i) rc -= cost[basis[i]] * t[i][j];
        if (rc > eps) enter = j;
      }
      if (enter == cols) return;
      std::size_t leave = m;
      double best = INFINITY;
      for (std::size_t i = 0; i < m; ++i) {
        if (t[i][enter] <= eps) continue;
        const double r = t[i][rhs] / t[i][enter];
        if (r < best - eps || (r < best + eps && leave < m && basis[i] < basis[leave])) {
          best = r;
          leave = i;
        }
      }
      if (leave == m) return;  // unbounded; not expected here
      const double piv = t[leave][enter];
      for (double& v : t[leave]) v /= piv;
      for (std::size_t i = 0; i < m; ++i) {
        if (i == leave || t[i][enter] == 0.0) continue;
        const double f = t[i][enter];
        for (std::size_t j = 0; j < cols; ++j) t[i][j] -= f * t[leave][j];
      }
      basis[leave] = enter;
    }
  };
  std::vector<double> phase1(cols, 0.0);
  for (std::size_t i = 0; i < m; ++i) phase1[n + m + i] = -1.0;
  run(phase1, n + 2 * m);
  double infeas = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] >= n + m) infeas += t[i][rhs];
  }
  if (infeas > 1e-7) return std::nullopt;
  // Drive zero-level artificials out where possible.
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < n + m) continue;
    for (std::size_t j = 0; j < n + m; ++j) {
      if (std::abs(t[i][j]) > 1e-9 && std::find(basis.begin(), basis.end(), j) == basis.end()) {
        const double piv = t[i][j];
        for (double& v : t[i]) v /= piv;
        for (std::size_t r = 0; r < m; ++r) {
          if (r == i || t[r][j] == 0.0) continue;
          const double f = t[r][j];
          for (std::size_t k = 0; k < cols; ++k) t[r][k] -= f * t[i][k];
        }
        basis[i] = j;
        break;
      }
    }
  }
  std::vector<double> phase2(cols, 0.0);
  for (std::size_t j = 0; j < n; ++j) phase2[j] = c[j];
  run(phase2, n + m);
  double z = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < n) z += c[basis[i]] * t[i][rhs];
  }
  return z;
}

/// Bound of the classic triangle relaxation over all pairs, by the
/// textbook simplex: max sum_{i<j} w_ij (1 - x_ij) + loops.
inline double classic_triangle_lp(const WeightedGraph& g) {
  const auto n = static_cast<std::size_t>(g.node_count());
  std::vector<std::vector<int>> id(n, std::vector<int>(n, -1));
  int nv = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) id[i][j] = id[j][i] = nv++;
  }
  const std::vector<double> w = g.dense_weights();
  std::vector<double> c(static_cast<std::size_t>(nv));
  double constant = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    constant += w[i * n + i];
    for (std::size_t j = i + 1; j < n; ++j) {
      c[static_cast<std::size_t>(id[i][j])] = -w[i * n + j];
      constant += w[i * n + j];
    }
  }
  std::vector<std::vector<double>> A;
  std::vector<double> b;
  for (int v = 0; v < nv; ++v) {
    std::vector<double> row(static_cast<std::size_t>(nv), 0.0);
    row[static_cast<std::size_t>(v)] = 1.0;
    A.push_back(row);
    b.push_back(1.0);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k) {
        const int ij = id[i][j], ik = id[i][k], jk = id[j][k];
        for (const auto [lhs1, lhs2, r] : {std::array{ij, ik, jk}, std::array{ij, jk, ik}, std::array{ik, jk, ij}}) {
          std::vector<double> row(static_cast<std::size_t>(nv), 0.0);
          row[static_cast<std::size_t>(lhs1)] = -1.0;
          row[static_cast<std::size_t>(lhs2)] = -1.0;
          row[static_cast<std::size_t>(r)] = 1.0;
          A.push_back(row);
          b.push_back(0.0);
        }
      }
    }
  }
  return constant + *textbook_lp_max(c, A, b);
}

}  // namespace troika::testing
