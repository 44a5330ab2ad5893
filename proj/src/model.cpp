#include "troika/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <ostream>
#include <unordered_set>

namespace troika {

Triple make_triple(NodeId a, NodeId b, NodeId c) {
  std::array<NodeId, 3> v{a, b, c};
  std::sort(v.begin(), v.end());
  if (v[0] == v[1] || v[1] == v[2]) throw std::invalid_argument("triple needs three distinct nodes");
  return {v[0], v[1], v[2]};
}

std::size_t CutHash::operator()(const Cut& c) const noexcept {
  std::size_t h = static_cast<std::size_t>(c.t.i);
  h = h * 1000003u + static_cast<std::size_t>(c.t.j);
  h = h * 1000003u + static_cast<std::size_t>(c.t.k);
  h = h * 8u + static_cast<std::size_t>(c.apex) * 2u + static_cast<std::size_t>(c.kind);
  return h;
}

int positive_pair_count(const WeightedGraph& graph, Triple t) {
  return int(graph.weight(t.i, t.j) > 0.0) + int(graph.weight(t.i, t.k) > 0.0) + int(graph.weight(t.j, t.k) > 0.0);
}

TripleSets stratify_triples(const WeightedGraph& graph) {
  const NodeId n = graph.node_count();
  const std::vector<double> w = graph.dense_weights();
  const auto at = [&](NodeId a, NodeId b) {
    return w[static_cast<std::size_t>(a) * static_cast<std::size_t>(n) + static_cast<std::size_t>(b)];
  };
  TripleSets sets;
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      for (NodeId k = j + 1; k < n; ++k) {
        const int pos = int(at(i, j) > 0.0) + int(at(i, k) > 0.0) + int(at(j, k) > 0.0);
        if (pos == 3) sets.t3.push_back({i, j, k});
        else if (pos == 2) sets.t2.push_back({i, j, k});
        else if (pos == 1) sets.t1.push_back({i, j, k});
      }
    }
  }
  return sets;
}

std::int64_t classic_constraint_count(std::int64_t n) {
  if (n < 3) return 0;
  return 3 * (n * (n - 1) * (n - 2) / 6);
}

CpModel::CpModel(std::shared_ptr<const ModelStructure> structure)
    : s_(std::move(structure)), lo_(s_->pair_of_var.size(), 0.0), hi_(s_->pair_of_var.size(), 1.0) {}

int CpModel::var(NodeId i, NodeId j) const {
  if (i == j) return -1;
  return s_->var_of_pair[pair_index(s_->n, i, j)];
}

namespace {

// The pairs (ab, ac) meeting at the apex and the opposite pair bc.
struct ApexPairs {
  NodeId a, b, c;
};

ApexPairs apex_pairs(Triple t, Apex apex) {
  switch (apex) {
    case Apex::I: return {t.i, t.j, t.k};
    case Apex::J: return {t.j, t.i, t.k};
    case Apex::K: return {t.k, t.i, t.j};
  }
  return {t.i, t.j, t.k};
}

}  // namespace

bool CpModel::in_pool(Triple t, Apex apex) const {
  const auto [a, b, c] = apex_pairs(t, apex);
  return weight(a, b) > 0.0 || weight(a, c) > 0.0;
}

bool CpModel::in_triple_set(Triple t) const {
  return weight(t.i, t.j) > 0.0 || weight(t.i, t.k) > 0.0 || weight(t.j, t.k) > 0.0;
}

void CpModel::set_bounds(std::size_t v, double lo, double hi) {
  if (lo > hi) throw std::invalid_argument("empty variable bounds");
  lo_.at(v) = lo;
  hi_.at(v) = hi;
}

CpModel::Row CpModel::row(const Cut& cut) const {
  Row r;
  std::array<std::pair<std::pair<NodeId, NodeId>, double>, 3> terms;
  if (cut.kind == Cut::Kind::Transitivity) {
    const auto [a, b, c] = apex_pairs(cut.t, cut.apex);
    terms = {{{{a, b}, 1.0}, {{a, c}, 1.0}, {{b, c}, -1.0}}};
    r.lo = 0.0;
  } else {
    terms = {{{{cut.t.i, cut.t.j}, 1.0}, {{cut.t.i, cut.t.k}, 1.0}, {{cut.t.j, cut.t.k}, 1.0}}};
    r.lo = 2.0;
  }
  double max_activity = 0.0;
  for (const auto& [p, coef] : terms) {
    const int v = var(p.first, p.second);
    if (v < 0) {
      r.lo -= coef;  // out-of-scope pair is the constant 1
    } else {
      r.terms[static_cast<std::size_t>(r.size++)] = {v, coef};
      if (coef > 0.0) max_activity += coef;
    }
  }
  r.hi = std::max(max_activity, r.lo);
  return r;
}

double CpModel::pair_value(std::span<const double> x, NodeId i, NodeId j) const {
  const int v = var(i, j);
  return v < 0 ? 1.0 : x[static_cast<std::size_t>(v)];
}

double CpModel::slack(const Cut& cut, std::span<const double> x) const {
  const Row r = row(cut);
  double act = 0.0;
  for (int t = 0; t < r.size; ++t) act += r.terms[static_cast<std::size_t>(t)].second * x[static_cast<std::size_t>(r.terms[static_cast<std::size_t>(t)].first)];
  return act - r.lo;
}

double CpModel::objective_value(std::span<const double> x) const {
  double z = s_->constant;
  for (std::size_t v = 0; v < s_->objective.size(); ++v) z += s_->objective[v] * x[v];
  return z;
}

CpModel build_model(const WeightedGraph& graph) {
  auto s = std::make_shared<ModelStructure>();
  s->graph = graph;
  s->n = graph.node_count();
  s->weights = graph.dense_weights();
  const NodeId n = s->n;
  const auto nn = static_cast<std::size_t>(n);

  std::vector<int> positive(nn, 0);
  for (const Edge& e : graph.edges()) {
    if (e.u != e.v && e.w > 0.0) {
      ++positive[static_cast<std::size_t>(e.u)];
      ++positive[static_cast<std::size_t>(e.v)];
    }
  }
  s->var_of_pair.assign(n > 1 ? nn * (nn - 1) / 2 : 0, -1);
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      const double w = s->weights[static_cast<std::size_t>(i) * nn + static_cast<std::size_t>(j)];
      const int own = w > 0.0 ? 1 : 0;
      // {i, j} sits in a reduced triple iff some pair of some (i, j, k) is positive.
      const bool in_triple = n >= 3 && (own > 0 || positive[static_cast<std::size_t>(i)] - own > 0 ||
                                        positive[static_cast<std::size_t>(j)] - own > 0);
      if (w != 0.0 || in_triple) {
        s->var_of_pair[pair_index(n, i, j)] = static_cast<int>(s->pair_of_var.size());
        s->pair_of_var.emplace_back(i, j);
        s->objective.push_back(-w);
      }
    }
  }
  s->constant = 0.0;
  for (const Edge& e : graph.edges()) s->constant += e.w;
  return CpModel(std::move(s));
}

std::vector<ViolatedCut> separate_violations(const CpModel& model, std::span<const double> x, std::size_t cap,
                                             double tolerance) {
  std::vector<ViolatedCut> found;
  if (cap == 0) return found;
  std::unordered_set<Cut, CutHash> active(model.cuts().begin(), model.cuts().end());
  const NodeId n = model.node_count();
  const auto& s = model.structure();
  const auto nn = static_cast<std::size_t>(n);
  const auto w = [&](NodeId a, NodeId b) { return s.weights[static_cast<std::size_t>(a) * nn + static_cast<std::size_t>(b)]; };
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      const int vij = model.var(i, j);
      for (NodeId k = j + 1; k < n; ++k) {
        const bool pij = w(i, j) > 0.0, pik = w(i, k) > 0.0, pjk = w(j, k) > 0.0;
        if (!(pij || pik || pjk)) continue;
        const double xij = x[static_cast<std::size_t>(vij)];
        const double xik = x[static_cast<std::size_t>(model.var(i, k))];
        const double xjk = x[static_cast<std::size_t>(model.var(j, k))];
        const Triple t{i, j, k};
        const auto consider = [&](Apex apex, double viol) {
          if (viol <= tolerance) return;
          const Cut c = Cut::transitivity(t, apex);
          if (!active.contains(c)) found.push_back({c, viol});
        };
        if (pij || pik) consider(Apex::I, xjk - xij - xik);
        if (pij || pjk) consider(Apex::J, xik - xij - xjk);
        if (pik || pjk) consider(Apex::K, xij - xik - xjk);
      }
    }
  }
  const auto order = [](const ViolatedCut& a, const ViolatedCut& b) {
    if (a.violation != b.violation) return a.violation > b.violation;
    return a.cut < b.cut;
  };
  if (found.size() > cap) {
    std::partial_sort(found.begin(), found.begin() + static_cast<std::ptrdiff_t>(cap), found.end(), order);
    found.resize(cap);
  } else {
    std::sort(found.begin(), found.end(), order);
  }
  return found;
}

Partition pp_postprocess(const CpModel& model, std::span<const double> x) {
  const NodeId n = model.node_count();
  std::vector<NodeId> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  const auto find = [&](NodeId a) {
    while (parent[static_cast<std::size_t>(a)] != a) {
      parent[static_cast<std::size_t>(a)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
      a = parent[static_cast<std::size_t>(a)];
    }
    return a;
  };
  const auto& pairs = model.structure().pair_of_var;
  for (std::size_t v = 0; v < pairs.size(); ++v) {
    if (x[v] < 0.5) {
      const NodeId a = find(pairs[v].first), b = find(pairs[v].second);
      if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
    }
  }
  std::vector<int> assignment(static_cast<std::size_t>(n));
  for (NodeId i = 0; i < n; ++i) assignment[static_cast<std::size_t>(i)] = find(i);
  return Partition(std::move(assignment));
}

std::vector<Triple> violated_branch_triples(const CpModel& model, std::span<const double> x, double tolerance) {
  std::vector<Triple> out;
  const NodeId n = model.node_count();
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      for (NodeId k = j + 1; k < n; ++k) {
        const Triple t{i, j, k};
        if (!model.in_triple_set(t)) continue;
        const double sum = model.pair_value(x, i, j) + model.pair_value(x, i, k) + model.pair_value(x, j, k);
        if (sum > tolerance && sum < 2.0 - tolerance) out.push_back(t);
      }
    }
  }
  return out;
}

bool is_integral(std::span<const double> x, double tolerance) {
  return std::all_of(x.begin(), x.end(), [&](double v) { return std::abs(v - std::round(v)) <= tolerance; });
}

void write_lp(std::ostream& out, const CpModel& model) {
  const auto& s = model.structure();
  const auto name = [&](std::size_t v) {
    return "x_" + std::to_string(s.pair_of_var[v].first) + "_" + std::to_string(s.pair_of_var[v].second);
  };
  out << "\\ clique partitioning relaxation, constant " << s.constant << "\nMaximize\n obj:";
  bool any = false;
  for (std::size_t v = 0; v < s.objective.size(); ++v) {
    if (s.objective[v] == 0.0) continue;
    out << (s.objective[v] < 0 ? " - " : " + ") << std::abs(s.objective[v]) << ' ' << name(v);
    any = true;
  }
  if (!any) out << " 0 " << (s.objective.empty() ? std::string("x_dummy") : name(0));
  out << "\nSubject To\n";
  std::size_t r = 0;
  for (const Cut& cut : model.cuts()) {
    const CpModel::Row row = model.row(cut);
    out << " c" << r++ << ':';
    if (row.size == 0) out << " 0 " << name(0);
    for (int t = 0; t < row.size; ++t) {
      const auto& [v, coef] = row.terms[static_cast<std::size_t>(t)];
      out << (coef < 0 ? " - " : " + ") << name(static_cast<std::size_t>(v));
    }
    out << " >= " << row.lo << '\n';
  }
  out << "Bounds\n";
  for (std::size_t v = 0; v < model.var_count(); ++v) {
    out << ' ' << model.lower()[v] << " <= " << name(v) << " <= " << model.upper()[v] << '\n';
  }
  out << "End\n";
}

}  // namespace troika
