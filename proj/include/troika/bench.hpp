#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "troika/engine.hpp"
#include "troika/graph_io.hpp"

namespace troika {

/// 1 - objective / optimum; nullopt when optimum <= 0.
std::optional<double> eos(double objective, double optimum);

/// Modularity workflow: a partition with modularity <= 0 scores 1.
double modularity_eos(double achieved, double optimum);

struct ManifestEntry {
  std::filesystem::path path;
  GraphFormat format = GraphFormat::Auto;
  std::optional<double> optimum;
};

/// JSON list of {"path", "format"?, "optimum"?}; relative paths are taken
/// from `base`.
std::vector<ManifestEntry> parse_manifest(const std::string& json_text, const std::filesystem::path& base = {});
std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path);

enum class BenchMethod { BranchAndCut, Heuristic };

const char* to_string(BenchMethod m);

struct BenchConfig {
  SolveConfig solve;
  BenchMethod method = BenchMethod::BranchAndCut;
  int runs = 3;
  /// Instances solved concurrently.
  int parallel_instances = 1;
};

struct BenchRecord {
  std::string name;
  NodeId n = 0;
  std::size_t m = 0;
  std::string method;
  int run = 0;
  std::uint64_t seed = 0;
  double objective = 0.0;
  std::optional<double> optimum;
  std::optional<double> eos;
  double wall_seconds = 0.0;
  std::optional<double> gap;
  /// Solver status, "Heuristic", or "Failed".
  std::string status;
  std::string error;

  bool operator==(const BenchRecord&) const = default;
};

struct BenchSummary {
  std::string name;
  std::string method;
  int runs = 0;
  double objective_mean = 0.0;
  double objective_sd = 0.0;
  double time_mean = 0.0;
  double time_sd = 0.0;
};

/// Run r of an instance uses seed cfg.solve.seed + r. Unreadable instances
/// yield one Failed record and the run continues.
std::vector<BenchRecord> run_benchmark(const std::vector<ManifestEntry>& manifest, const BenchConfig& cfg);

/// Sample mean and standard deviation per (name, method) over non-failed
/// records, in first-seen order.
std::vector<BenchSummary> summarize(const std::vector<BenchRecord>& records);

void write_records_csv(std::ostream& out, const std::vector<BenchRecord>& records);
std::vector<BenchRecord> read_records_csv(std::istream& in);
std::string records_json(const std::vector<BenchRecord>& records);

}  // namespace troika
