#include "troika/search.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_set>

namespace troika {

const char* to_string(NodeStatus s) {
  switch (s) {
    case NodeStatus::Open: return "open";
    case NodeStatus::IntegralLp: return "integral-lp";
    case NodeStatus::InfeasibleLp: return "infeasible-lp";
    case NodeStatus::BoundDominated: return "bound-dominated";
  }
  return "?";
}

namespace {

class UnionFind {
 public:
  explicit UnionFind(NodeId n) : parent_(static_cast<std::size_t>(n)) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  NodeId find(NodeId a) {
    while (parent_[static_cast<std::size_t>(a)] != a) {
      parent_[static_cast<std::size_t>(a)] = parent_[static_cast<std::size_t>(parent_[static_cast<std::size_t>(a)])];
      a = parent_[static_cast<std::size_t>(a)];
    }
    return a;
  }
  void unite(NodeId a, NodeId b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
  }

 private:
  std::vector<NodeId> parent_;
};

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

SearchNode child_of(const SearchNode& node, BranchStep step, std::uint64_t salt) {
  SearchNode c;
  c.depth = node.depth + 1;
  c.serial = splitmix(node.serial * 2 + salt);
  c.history = node.history;
  c.history.push_back(step);
  c.fixed = node.fixed;
  c.local_cuts = node.local_cuts;
  c.conflict = node.conflict;
  return c;
}

void fix_pair(SearchNode& node, NodeId a, NodeId b, int value) {
  const auto [it, inserted] = node.fixed.emplace(make_pair_key(a, b), value);
  if (!inserted && it->second != value) node.conflict = true;
}

}  // namespace

std::vector<std::vector<NodeId>> merged_sets(const SearchNode& node, NodeId n) {
  UnionFind uf(n);
  std::vector<char> touched(static_cast<std::size_t>(n), 0);
  for (const BranchStep& s : node.history) {
    if (s.side != BranchSide::Left) continue;
    uf.unite(s.t.i, s.t.j);
    touched[static_cast<std::size_t>(s.t.i)] = touched[static_cast<std::size_t>(s.t.j)] = 1;
    if (!s.is_pair()) {
      uf.unite(s.t.i, s.t.k);
      touched[static_cast<std::size_t>(s.t.k)] = 1;
    }
  }
  std::map<NodeId, std::vector<NodeId>> groups;
  for (NodeId v = 0; v < n; ++v) {
    if (touched[static_cast<std::size_t>(v)]) groups[uf.find(v)].push_back(v);
  }
  std::vector<std::vector<NodeId>> out;
  for (auto& [root, members] : groups) out.push_back(std::move(members));
  return out;
}

PropagationCounts propagate_logical(SearchNode& node, NodeId n, bool implied_cuts) {
  PropagationCounts counts;
  UnionFind uf(n);
  for (const auto& [p, v] : node.fixed) {
    if (v == 0) uf.unite(p.first, p.second);
  }
  std::set<PairKey> apart;
  bool conflict = node.conflict;
  for (const auto& [p, v] : node.fixed) {
    if (v != 1) continue;
    const NodeId a = uf.find(p.first), b = uf.find(p.second);
    if (a == b) conflict = true;
    else apart.insert(make_pair_key(a, b));
  }
  // A >= 2 row with two members in one class: the third is apart from it.
  for (const Triple& t : node.local_cuts) {
    const NodeId a = uf.find(t.i), b = uf.find(t.j), c = uf.find(t.k);
    if (a == b && b == c) conflict = true;
    else if (a == b) apart.insert(make_pair_key(a, c));
    else if (a == c) apart.insert(make_pair_key(a, b));
    else if (b == c) apart.insert(make_pair_key(a, b));
  }
  if (!conflict) {
    for (NodeId a = 0; a < n && !conflict; ++a) {
      for (NodeId b = a + 1; b < n; ++b) {
        const NodeId ra = uf.find(a), rb = uf.find(b);
        int value;
        if (ra == rb) value = 0;
        else if (apart.contains(make_pair_key(ra, rb))) value = 1;
        else continue;
        const auto [it, inserted] = node.fixed.emplace(PairKey{a, b}, value);
        if (inserted) {
          ++counts.fixings;
        } else if (it->second != value) {
          conflict = true;
          break;
        }
      }
    }
  }
  if (!conflict && implied_cuts) {
    std::vector<std::vector<NodeId>> members(static_cast<std::size_t>(n));
    for (NodeId v = 0; v < n; ++v) members[static_cast<std::size_t>(uf.find(v))].push_back(v);
    std::set<Triple> have(node.local_cuts.begin(), node.local_cuts.end());
    for (const BranchStep& s : node.history) {
      if (s.side != BranchSide::Right || s.is_pair()) continue;
      const std::array<NodeId, 3> tri{s.t.i, s.t.j, s.t.k};
      for (int x = 0; x < 3; ++x) {
        const NodeId y = tri[static_cast<std::size_t>((x + 1) % 3)], z = tri[static_cast<std::size_t>((x + 2) % 3)];
        for (NodeId p : members[static_cast<std::size_t>(uf.find(tri[static_cast<std::size_t>(x)]))]) {
          if (p == s.t.i || p == s.t.j || p == s.t.k) continue;
          const Triple implied = make_triple(y, z, p);
          if (have.insert(implied).second) {
            node.local_cuts.push_back(implied);
            ++counts.cuts;
          }
        }
      }
    }
  }
  if (conflict) {
    node.conflict = true;
    node.status = NodeStatus::InfeasibleLp;
  }
  counts.conflict = conflict;
  return counts;
}

std::size_t fix_by_reduced_cost(SearchNode& node, const CpModel& model, const LpSolution& lp, double incumbent) {
  if (lp.status != LpStatus::Optimal) return 0;
  constexpr double kSlack = 1e-9;
  std::size_t added = 0;
  const auto& pairs = model.structure().pair_of_var;
  for (std::size_t v = 0; v < pairs.size(); ++v) {
    const PairKey key = make_pair_key(pairs[v].first, pairs[v].second);
    if (node.fixed.contains(key)) continue;
    const double x = lp.primal[v], rc = lp.reduced_costs[v];
    int value = -1;
    if (x <= kSlack && rc < 0.0 && lp.objective + rc <= incumbent - kSlack) value = 0;
    else if (x >= 1.0 - kSlack && rc > 0.0 && lp.objective - rc <= incumbent - kSlack) value = 1;
    if (value < 0) continue;
    node.fixed.emplace(key, value);
    ++added;
  }
  return added;
}

double node_score(const SearchNode& node, NodeId i, NodeId n, double degree) {
  int f = 0;
  for (const auto& [p, v] : node.fixed) f += int(p.first == i || p.second == i);
  double beta = 0.0;
  for (const BranchStep& s : node.history) {
    if (s.t.i == i || s.t.j == i || s.t.k == i) {
      beta = 1.0;
      break;
    }
  }
  const double spread = n > 1 ? std::abs(degree) / static_cast<double>(n - 1) : 0.0;
  return 1.0 - std::exp(-static_cast<double>(f)) + beta + spread;
}

Triple select_triple(const SearchNode& node, std::span<const Triple> candidates, const CpModel& model,
                     std::span<const double> degree, std::mt19937_64& rng) {
  if (candidates.empty()) throw std::invalid_argument("no candidate triple");
  std::array<std::vector<Triple>, 4> strata;
  for (const Triple& t : candidates) {
    const int pos = int(model.weight(t.i, t.j) > 0.0) + int(model.weight(t.i, t.k) > 0.0) + int(model.weight(t.j, t.k) > 0.0);
    strata[static_cast<std::size_t>(pos)].push_back(t);
  }
  const std::vector<Triple>* pool = &strata[0];
  for (int s = 3; s >= 0; --s) {
    if (!strata[static_cast<std::size_t>(s)].empty()) {
      pool = &strata[static_cast<std::size_t>(s)];
      break;
    }
  }
  if (pool->size() == 1) return pool->front();

  const NodeId n = model.node_count();
  std::map<NodeId, double> s;
  const auto score = [&](NodeId i) {
    auto it = s.find(i);
    if (it == s.end()) it = s.emplace(i, node_score(node, i, n, degree[static_cast<std::size_t>(i)])).first;
    return it->second;
  };
  std::vector<double> cumulative;
  cumulative.reserve(pool->size());
  double total = 0.0;
  for (const Triple& t : *pool) {
    total += score(t.i) + score(t.j) + score(t.k);
    cumulative.push_back(total);
  }
  if (total <= 0.0) return (*pool)[rng() % pool->size()];
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53 * total;
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  return (*pool)[std::min(static_cast<std::size_t>(it - cumulative.begin()), pool->size() - 1)];
}

std::pair<SearchNode, SearchNode> branch(const SearchNode& node, Triple t) {
  const bool decided = node.fixed.contains(make_pair_key(t.i, t.j)) && node.fixed.contains(make_pair_key(t.i, t.k)) &&
                       node.fixed.contains(make_pair_key(t.j, t.k));
  if (decided) throw std::invalid_argument("triple already decided by the node's fixings");
  SearchNode left = child_of(node, {t, BranchSide::Left}, 1);
  fix_pair(left, t.i, t.j, 0);
  fix_pair(left, t.i, t.k, 0);
  fix_pair(left, t.j, t.k, 0);
  SearchNode right = child_of(node, {t, BranchSide::Right}, 2);
  if (std::find(right.local_cuts.begin(), right.local_cuts.end(), t) == right.local_cuts.end()) right.local_cuts.push_back(t);
  return {std::move(left), std::move(right)};
}

std::pair<SearchNode, SearchNode> branch_pair(const SearchNode& node, NodeId i, NodeId j) {
  if (node.fixed.contains(make_pair_key(i, j))) throw std::invalid_argument("pair already fixed");
  const PairKey p = make_pair_key(i, j);
  const Triple t{p.first, p.second, -1};
  SearchNode left = child_of(node, {t, BranchSide::Left}, 1);
  fix_pair(left, i, j, 0);
  SearchNode right = child_of(node, {t, BranchSide::Right}, 2);
  fix_pair(right, i, j, 1);
  return {std::move(left), std::move(right)};
}

CpModel node_model(const CpModel& base, const SearchNode& node) {
  CpModel m(base.shared_structure());
  std::vector<Cut> cuts;
  cuts.reserve(node.pool.size() + node.local_cuts.size());
  std::unordered_set<Cut, CutHash> seen;
  for (const Triple& t : node.local_cuts) {
    const Cut c = Cut::at_least_two(t);
    if (seen.insert(c).second) cuts.push_back(c);
  }
  for (const Cut& c : node.pool) {
    if (c.kind == Cut::Kind::Transitivity && seen.insert(c).second) cuts.push_back(c);
  }
  m.set_cuts(std::move(cuts));
  for (const auto& [p, v] : node.fixed) {
    const int var = m.var(p.first, p.second);
    if (var >= 0) m.fix(static_cast<std::size_t>(var), v);
  }
  return m;
}

}  // namespace troika
