#include "troika/graph_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>
#include <unordered_map>

namespace troika {

namespace {

struct Line {
  std::size_t number;
  std::vector<std::string> tokens;
};

std::vector<Line> tokenize(std::istream& in) {
  std::vector<Line> lines;
  std::string text;
  std::size_t number = 0;
  while (std::getline(in, text)) {
    ++number;
    const auto first = text.find_first_not_of(" \t\r");
    if (first == std::string::npos || text[first] == '#' || text[first] == '%') continue;
    std::istringstream ss(text);
    Line line{number, {}};
    std::string tok;
    while (ss >> tok) line.tokens.push_back(tok);
    lines.push_back(std::move(line));
  }
  return lines;
}

std::optional<long long> to_integer(const std::string& s) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

double to_real(const std::string& s, std::size_t line) {
  double v = 0.0;
  const char* begin = s.data();
  if (!s.empty() && s.front() == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ParseError(line, "invalid number '" + s + "'");
  return v;
}

long long header_count(const Line& line, std::size_t idx, const char* what) {
  const auto v = to_integer(line.tokens[idx]);
  if (!v || *v < 0) throw ParseError(line.number, std::string("invalid ") + what + " '" + line.tokens[idx] + "'");
  return *v;
}

LoadedGraph read_edge_list(const std::vector<Line>& lines) {
  const Line& header = lines.front();
  if (header.tokens.size() != 2) throw ParseError(header.number, "edge-list header must be 'n m'");
  const long long n = header_count(header, 0, "node count");
  const long long m = header_count(header, 1, "edge count");
  if (n < 1) throw ParseError(header.number, "node count must be at least 1");
  if (static_cast<long long>(lines.size()) - 1 != m) {
    const std::size_t at = lines.size() > static_cast<std::size_t>(m) + 1 ? lines[static_cast<std::size_t>(m) + 1].number
                                                                           : lines.back().number;
    throw ParseError(at, "header declares " + std::to_string(m) + " edges but file has " +
                             std::to_string(lines.size() - 1));
  }

  struct RawEdge {
    std::string a, b;
    double w;
    std::size_t line;
  };
  std::vector<RawEdge> raw;
  raw.reserve(static_cast<std::size_t>(m));
  std::vector<std::string> order;
  std::unordered_map<std::string, std::size_t> seen;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const Line& line = lines[k];
    if (line.tokens.size() != 3) throw ParseError(line.number, "expected 'i j w'");
    raw.push_back({line.tokens[0], line.tokens[1], to_real(line.tokens[2], line.number), line.number});
    for (const std::string* t : {&line.tokens[0], &line.tokens[1]}) {
      if (seen.emplace(*t, order.size()).second) order.push_back(*t);
    }
  }
  if (static_cast<long long>(order.size()) > n) {
    throw ParseError(header.number, "file references " + std::to_string(order.size()) +
                                        " distinct nodes but header declares " + std::to_string(n));
  }

  LoadedGraph out;
  std::unordered_map<std::string, NodeId> id;
  std::vector<long long> ints;
  bool all_int = true;
  for (const auto& label : order) {
    const auto v = to_integer(label);
    if (!v) {
      all_int = false;
      break;
    }
    ints.push_back(*v);
  }
  const auto in_range = [&](long long lo, long long hi) {
    return std::all_of(ints.begin(), ints.end(), [&](long long v) { return v >= lo && v < hi; });
  };
  out.labels.resize(static_cast<std::size_t>(n));
  if (all_int && in_range(0, n)) {
    for (long long v = 0; v < n; ++v) out.labels[static_cast<std::size_t>(v)] = std::to_string(v);
    for (std::size_t k = 0; k < order.size(); ++k) id[order[k]] = static_cast<NodeId>(ints[k]);
  } else if (all_int && in_range(1, n + 1)) {
    out.warnings.push_back("node ids are 1-based; remapped to 0-based");
    for (long long v = 0; v < n; ++v) out.labels[static_cast<std::size_t>(v)] = std::to_string(v + 1);
    for (std::size_t k = 0; k < order.size(); ++k) id[order[k]] = static_cast<NodeId>(ints[k] - 1);
  } else {
    std::vector<std::size_t> perm(order.size());
    for (std::size_t k = 0; k < perm.size(); ++k) perm[k] = k;
    if (all_int) std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) { return ints[a] < ints[b]; });
    out.warnings.push_back("node ids are not contiguous; remapped to 0.." + std::to_string(n - 1));
    for (std::size_t k = 0; k < perm.size(); ++k) {
      id[order[perm[k]]] = static_cast<NodeId>(k);
      out.labels[k] = order[perm[k]];
    }
    for (std::size_t k = perm.size(); k < out.labels.size(); ++k) out.labels[k] = "_" + std::to_string(k);
  }

  GraphBuilder builder(static_cast<NodeId>(n));
  for (const RawEdge& e : raw) {
    try {
      builder.add_edge(id.at(e.a), id.at(e.b), e.w);
    } catch (const InputError& err) {
      throw ParseError(e.line, err.what());
    }
  }
  out.graph = builder.build();
  return out;
}

LoadedGraph read_lower_triangle(const std::vector<Line>& lines) {
  const Line& header = lines.front();
  if (header.tokens.size() != 1) throw ParseError(header.number, "lower-triangle header must be 'n'");
  const long long n = header_count(header, 0, "node count");
  if (n < 1) throw ParseError(header.number, "node count must be at least 1");
  if (static_cast<long long>(lines.size()) != n) {
    throw ParseError(lines.back().number, "expected " + std::to_string(n - 1) + " matrix rows, found " +
                                              std::to_string(lines.size() - 1));
  }
  GraphBuilder builder(static_cast<NodeId>(n));
  for (long long r = 1; r < n; ++r) {
    const Line& line = lines[static_cast<std::size_t>(r)];
    if (static_cast<long long>(line.tokens.size()) != r) {
      throw ParseError(line.number, "row " + std::to_string(r) + " must hold " + std::to_string(r) + " entries");
    }
    for (long long c = 0; c < r; ++c) {
      const double w = to_real(line.tokens[static_cast<std::size_t>(c)], line.number);
      if (w != 0.0) builder.add_edge(static_cast<NodeId>(c), static_cast<NodeId>(r), w);
    }
  }
  LoadedGraph out;
  out.graph = builder.build();
  for (long long v = 0; v < n; ++v) out.labels.push_back(std::to_string(v));
  return out;
}

}  // namespace

ParseError::ParseError(std::size_t line, const std::string& what)
    : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}

GraphFormat parse_format(const std::string& tag) {
  if (tag == "auto") return GraphFormat::Auto;
  if (tag == "edgelist" || tag == "edge-list") return GraphFormat::EdgeList;
  if (tag == "lower" || tag == "lower-triangle") return GraphFormat::LowerTriangle;
  throw InputError("unknown graph format '" + tag + "'");
}

LoadedGraph read_graph(std::istream& in, GraphFormat format) {
  const std::vector<Line> lines = tokenize(in);
  if (lines.empty()) throw ParseError(0, "empty graph file");
  if (format == GraphFormat::Auto) {
    format = lines.front().tokens.size() == 1 ? GraphFormat::LowerTriangle : GraphFormat::EdgeList;
  }
  return format == GraphFormat::EdgeList ? read_edge_list(lines) : read_lower_triangle(lines);
}

LoadedGraph load_graph(const std::filesystem::path& path, GraphFormat format) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open graph file " + path.string());
  return read_graph(in, format);
}

void write_edge_list(std::ostream& out, const WeightedGraph& graph) {
  out << graph.node_count() << ' ' << graph.edge_count() << '\n';
  char buf[64];
  for (const Edge& e : graph.edges()) {
    const auto res = std::to_chars(buf, buf + sizeof buf, e.w);
    out << e.u << ' ' << e.v << ' ' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)) << '\n';
  }
}

void save_edge_list(const std::filesystem::path& path, const WeightedGraph& graph) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  write_edge_list(out, graph);
}

}  // namespace troika
