// Command-line front end: solve, oracle, instance generators, reductions and
// benchmark runs.

#include <charconv>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "troika/bench.hpp"
#include "troika/engine.hpp"
#include "troika/graph_io.hpp"
#include "troika/heuristic.hpp"
#include "troika/oracle.hpp"
#include "troika/reductions.hpp"

using namespace troika;
using json = nlohmann::json;

namespace {

constexpr int kInputErrorExit = 2;
constexpr int kInternalErrorExit = 3;

json label_value(const std::string& label) {
  long long v = 0;
  const auto res = std::from_chars(label.data(), label.data() + label.size(), v);
  if (res.ec == std::errc() && res.ptr == label.data() + label.size()) return v;
  return label;
}

json clusters_json(const Partition& p, const std::vector<std::string>& labels) {
  json out = json::array();
  for (const auto& c : p.clusters()) {
    json ids = json::array();
    for (NodeId v : c) ids.push_back(label_value(labels[static_cast<std::size_t>(v)]));
    out.push_back(ids);
  }
  return out;
}

json number_or_null(std::optional<double> v) { return v ? json(*v) : json(nullptr); }

void emit_partition(std::ostream& out, const std::string& mode, double objective, std::optional<double> bound,
                    std::optional<double> gap, const std::string& status, const Partition& p,
                    const std::vector<std::string>& labels) {
  if (mode == "csv") {
    out << "node,cluster\n";
    for (NodeId v = 0; v < p.size(); ++v) out << labels[static_cast<std::size_t>(v)] << ',' << p.cluster_of(v) << '\n';
    return;
  }
  json doc{{"objective", objective},
           {"bound", number_or_null(bound)},
           {"gap", number_or_null(gap)},
           {"status", status},
           {"clusters", clusters_json(p, labels)}};
  out << doc.dump(2) << '\n';
}

// Writes to `path`, or stdout when it is empty or "-".
template <class Fn>
void with_output(const std::string& path, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  fn(out);
}

struct SolveArgs {
  std::string input;
  std::string format = "auto";
  double gap = 1e-6;
  std::optional<double> time_limit;
  std::uint64_t seed = 0;
  int workers = 1;
  bool heuristic_only = false;
  std::string output = "json";
  std::string out_path;
};

void run_solve(const SolveArgs& a) {
  const LoadedGraph lg = load_graph(a.input, parse_format(a.format));
  for (const auto& w : lg.warnings) std::cerr << "warning: " << w << '\n';
  if (a.heuristic_only) {
    HeuristicConfig h;
    h.seed = a.seed;
    const HeuristicResult r = heuristic_search(lg.graph, h);
    with_output(a.out_path, [&](std::ostream& out) {
      emit_partition(out, a.output, r.weight, std::nullopt, std::nullopt, "Heuristic", r.partition, lg.labels);
    });
    return;
  }
  SolveConfig cfg;
  cfg.gap_tolerance = a.gap;
  cfg.time_limit_seconds = a.time_limit;
  cfg.seed = a.seed;
  cfg.workers = a.workers;
  const SolveReport rep = solve(lg.graph, cfg);
  std::cerr << "nodes " << rep.stats.nodes << ", lp solves " << rep.stats.lp_solves << ", cuts " << rep.stats.cuts_added
            << ", " << rep.stats.wall_seconds << " s\n";
  with_output(a.out_path, [&](std::ostream& out) {
    emit_partition(out, a.output, rep.incumbent, rep.best_bound, rep.gap, to_string(rep.status), rep.best_partition,
                   lg.labels);
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Branch-and-cut solver for clique partitioning"};
  app.require_subcommand(1);

  SolveArgs sa;
  auto* solve_cmd = app.add_subcommand("solve", "Solve one instance");
  solve_cmd->add_option("input", sa.input, "Graph file")->required()->check(CLI::ExistingFile);
  solve_cmd->add_option("--format", sa.format, "auto, edgelist or lower")->capture_default_str();
  solve_cmd->add_option("--gap-tol", sa.gap, "Relative gap at which to stop")->capture_default_str();
  solve_cmd->add_option("--time-limit", sa.time_limit, "Seconds");
  solve_cmd->add_option("--seed", sa.seed)->capture_default_str();
  solve_cmd->add_option("--workers", sa.workers)->capture_default_str()->check(CLI::PositiveNumber);
  solve_cmd->add_flag("--heuristic-only", sa.heuristic_only, "Run the local search only");
  solve_cmd->add_option("--output", sa.output)->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  solve_cmd->add_option("-o,--out", sa.out_path, "Output file (default stdout)");

  std::string oracle_input, oracle_format = "auto", oracle_output = "json", oracle_out;
  auto* oracle_cmd = app.add_subcommand("oracle", "Exact optimum by enumeration (n <= 12)");
  oracle_cmd->add_option("input", oracle_input)->required()->check(CLI::ExistingFile);
  oracle_cmd->add_option("--format", oracle_format)->capture_default_str();
  oracle_cmd->add_option("--output", oracle_output)->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  oracle_cmd->add_option("-o,--out", oracle_out);

  auto* gen_cmd = app.add_subcommand("gen", "Generate an instance");
  gen_cmd->require_subcommand(1);
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  BaConfig ba;
  auto* gen_ba = gen_cmd->add_subcommand("ba", "Weighted preferential attachment graph");
  gen_ba->add_option("--min-nodes", ba.min_nodes)->capture_default_str();
  gen_ba->add_option("--max-nodes", ba.max_nodes)->capture_default_str();
  gen_ba->add_option("--min-attach", ba.min_attach)->capture_default_str();
  gen_ba->add_option("--max-attach", ba.max_attach)->capture_default_str();
  NodeId corr_cols = 50;
  int corr_rows = 100;
  auto* gen_corr = gen_cmd->add_subcommand("correlation", "Pearson correlations of a uniform random matrix");
  gen_corr->add_option("--cols", corr_cols)->capture_default_str();
  gen_corr->add_option("--rows", corr_rows)->capture_default_str();
  NodeId ce_n = 30;
  double ce_neg = 0.5;
  auto* gen_ce = gen_cmd->add_subcommand("clusedit", "Complete +-1 graph");
  gen_ce->add_option("-n,--nodes", ce_n)->capture_default_str();
  gen_ce->add_option("--neg-fraction", ce_neg)->capture_default_str();
  for (auto* c : {gen_ba, gen_corr, gen_ce}) {
    c->add_option("--seed", gen_seed)->capture_default_str();
    c->add_option("-o,--out", gen_out);
  }

  auto* reduce_cmd = app.add_subcommand("reduce", "Build a CP instance from another problem");
  reduce_cmd->require_subcommand(1);
  std::string red_input, red_out, red_format = "auto", map_out;
  double gamma = 1.0;
  bool abr_header = false;
  auto* red_mod = reduce_cmd->add_subcommand("modularity", "Modularity maximization");
  red_mod->add_option("--format", red_format)->capture_default_str();
  red_mod->add_option("--gamma", gamma)->capture_default_str();
  auto* red_abr = reduce_cmd->add_subcommand("abr", "Aggregation of binary relations from a categorical CSV");
  red_abr->add_flag("--header", abr_header, "First line holds attribute names");
  auto* red_pf = reduce_cmd->add_subcommand("portfolio", "Fisher-screened correlation graph from a returns CSV");
  red_pf->add_option("--map", map_out, "Write the asset id map as JSON");
  for (auto* c : {red_mod, red_abr, red_pf}) {
    c->add_option("input", red_input)->required()->check(CLI::ExistingFile);
    c->add_option("-o,--out", red_out);
  }

  std::string manifest, csv_out, json_out;
  BenchConfig bc;
  bool bench_heur = false;
  auto* bench_cmd = app.add_subcommand("bench", "Run a benchmark manifest");
  bench_cmd->add_option("manifest", manifest)->required()->check(CLI::ExistingFile);
  bench_cmd->add_option("--runs", bc.runs)->capture_default_str()->check(CLI::PositiveNumber);
  bench_cmd->add_option("--gap-tol", bc.solve.gap_tolerance)->capture_default_str();
  bench_cmd->add_option("--time-limit", bc.solve.time_limit_seconds, "Seconds per run");
  bench_cmd->add_option("--seed", bc.solve.seed)->capture_default_str();
  bench_cmd->add_option("--workers", bc.solve.workers)->capture_default_str()->check(CLI::PositiveNumber);
  bench_cmd->add_option("--parallel-instances", bc.parallel_instances)->capture_default_str()->check(CLI::PositiveNumber);
  bench_cmd->add_flag("--heuristic-only", bench_heur);
  bench_cmd->add_option("--csv", csv_out, "CSV output (default stdout)");
  bench_cmd->add_option("--json", json_out, "JSON output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInputErrorExit;
  }

  try {
    if (*solve_cmd) {
      run_solve(sa);
    } else if (*oracle_cmd) {
      const LoadedGraph lg = load_graph(oracle_input, parse_format(oracle_format));
      const OracleResult r = brute_force_optimum(lg.graph);
      with_output(oracle_out, [&](std::ostream& out) {
        emit_partition(out, oracle_output, r.weight, r.weight, 0.0, "Exhausted", r.partition, lg.labels);
      });
    } else if (*gen_cmd) {
      WeightedGraph g;
      if (*gen_ba) g = gen_ba_weighted(gen_seed, ba);
      else if (*gen_corr) g = gen_correlation_instance(corr_cols, corr_rows, gen_seed);
      else g = gen_clusedit_instance(ce_n, ce_neg, gen_seed);
      with_output(gen_out, [&](std::ostream& out) { write_edge_list(out, g); });
    } else if (*reduce_cmd) {
      if (*red_mod) {
        const WeightedGraph g = modularity_to_cp(load_graph(red_input, parse_format(red_format)).graph, gamma);
        with_output(red_out, [&](std::ostream& out) { write_edge_list(out, g); });
      } else if (*red_abr) {
        const WeightedGraph g = abr_to_cp(load_attribute_matrix(red_input, abr_header));
        with_output(red_out, [&](std::ostream& out) { write_edge_list(out, g); });
      } else {
        const PortfolioGraph pg = fisher_portfolio_graph(load_returns_matrix(red_input));
        with_output(red_out, [&](std::ostream& out) { write_edge_list(out, pg.graph); });
        if (!map_out.empty()) {
          json m = json::array();
          for (std::size_t k = 0; k < pg.id_map.size(); ++k) m.push_back({{"node", k}, {"column", pg.id_map[k]}, {"asset", pg.labels[k]}});
          with_output(map_out, [&](std::ostream& out) { out << m.dump(2) << '\n'; });
        }
      }
    } else if (*bench_cmd) {
      bc.method = bench_heur ? BenchMethod::Heuristic : BenchMethod::BranchAndCut;
      const auto records = run_benchmark(load_manifest(manifest), bc);
      with_output(csv_out, [&](std::ostream& out) { write_records_csv(out, records); });
      if (!json_out.empty()) with_output(json_out, [&](std::ostream& out) { out << records_json(records) << '\n'; });
    }
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInputErrorExit;
  } catch (const InternalError& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternalErrorExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInternalErrorExit;
  }
  return 0;
}
