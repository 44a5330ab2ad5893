#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "troika/graph.hpp"

namespace troika {

enum class GraphFormat { Auto, EdgeList, LowerTriangle };

GraphFormat parse_format(const std::string& tag);

/// A line-numbered failure while reading a graph file.
class ParseError : public InputError {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct LoadedGraph {
  WeightedGraph graph;
  /// labels[k] is the file's id for node k.
  std::vector<std::string> labels;
  /// Non-fatal notes, e.g. that ids were remapped.
  std::vector<std::string> warnings;
};

/**
 * Reads a graph in one of two text formats.
 *
 * Edge list: a header "n m" followed by m lines "i j w". Lower triangle: a
 * header "n" followed by n-1 lines, line r holding w_r0 .. w_r(r-1); zero
 * cells mean no edge. Auto picks the format from the header token count.
 */
LoadedGraph read_graph(std::istream& in, GraphFormat format = GraphFormat::Auto);
LoadedGraph load_graph(const std::filesystem::path& path, GraphFormat format = GraphFormat::Auto);

/// Writes the edge-list format with 0-based ids and round-trippable weights.
void write_edge_list(std::ostream& out, const WeightedGraph& graph);
void save_edge_list(const std::filesystem::path& path, const WeightedGraph& graph);

}  // namespace troika
