#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "support.hpp"
#include "troika/bench.hpp"
#include "troika/oracle.hpp"

using namespace troika;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "troika_bench_test";
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("error of solution") {
  CHECK(*eos(95.0, 100.0) == doctest::Approx(0.05));
  CHECK(*eos(100.0, 100.0) == 0.0);
  CHECK_FALSE(eos(5.0, 0.0).has_value());
  CHECK_FALSE(eos(-1.0, -2.0).has_value());
  CHECK(modularity_eos(0.3, 0.4) == doctest::Approx(0.25));
  CHECK(modularity_eos(-0.1, 0.4) == 1.0);
  CHECK(modularity_eos(0.0, 0.4) == 1.0);
}

TEST_CASE("manifest parsing") {
  const auto m = parse_manifest(R"([{"path": "a.txt", "format": "lower", "optimum": 12},
                                    {"path": "/abs/b.txt"}])",
                                "/data");
  REQUIRE(m.size() == 2);
  CHECK(m[0].path == fs::path("/data/a.txt"));
  CHECK(m[0].format == GraphFormat::LowerTriangle);
  CHECK(*m[0].optimum == 12.0);
  CHECK(m[1].path == fs::path("/abs/b.txt"));
  CHECK(m[1].format == GraphFormat::Auto);
  CHECK_FALSE(m[1].optimum);
  CHECK(parse_manifest("[]").empty());
  CHECK_THROWS_AS(parse_manifest("{}"), InputError);
  CHECK_THROWS_AS(parse_manifest("[{\"format\": \"auto\"}]"), InputError);
  CHECK_THROWS_AS(parse_manifest("[{\"path\": \"x\", \"optimum\": \"high\"}]"), InputError);
  CHECK_THROWS_AS(parse_manifest("[{"), InputError);
  CHECK_THROWS_AS(load_manifest("/nonexistent/manifest.json"), InputError);
}

TEST_CASE("benchmark runs") {
  const fs::path dir = scratch_dir();
  const WeightedGraph g = testing::random_signed_graph(8, 0.6, -5, 5, 1);
  save_edge_list(dir / "small.txt", g);
  const double opt = brute_force_optimum(g).weight;
  {
    std::ofstream out(dir / "manifest.json");
    out << R"([{"path": "small.txt", "optimum": )" << opt << R"(}, {"path": "missing.txt"}])";
  }
  const auto manifest = load_manifest(dir / "manifest.json");
  BenchConfig cfg;
  cfg.runs = 2;
  cfg.solve.seed = 10;
  const auto records = run_benchmark(manifest, cfg);
  REQUIRE(records.size() == 3);
  CHECK(records[0].name == "small");
  CHECK(records[0].n == 8);
  CHECK(records[0].m == g.edge_count());
  CHECK(records[0].method == "branch-and-cut");
  CHECK(records[0].seed == 10);
  CHECK(records[1].seed == 11);
  CHECK(records[1].run == 1);
  CHECK(records[0].objective == opt);
  CHECK(*records[0].eos == 0.0);
  CHECK(records[0].gap.has_value());
  CHECK(records[0].status != "Failed");
  CHECK(records[2].name == "missing");
  CHECK(records[2].status == "Failed");
  CHECK_FALSE(records[2].error.empty());

  BenchConfig heur = cfg;
  heur.method = BenchMethod::Heuristic;
  heur.parallel_instances = 2;
  const auto hr = run_benchmark(manifest, heur);
  REQUIRE(hr.size() == 3);
  CHECK(hr[0].status == "Heuristic");
  CHECK(hr[0].method == "heuristic");
  CHECK(hr[0].objective <= opt);
  CHECK_FALSE(hr[0].gap.has_value());

  const auto summary = summarize(records);
  REQUIRE(summary.size() == 1);
  CHECK(summary[0].runs == 2);
  CHECK(summary[0].objective_mean == opt);
  CHECK(summary[0].objective_sd == 0.0);

  CHECK(run_benchmark({}, cfg).empty());
  BenchConfig bad = cfg;
  bad.runs = 0;
  CHECK_THROWS_AS(run_benchmark(manifest, bad), InputError);
}

TEST_CASE("parallel instances keep manifest order") {
  const fs::path dir = scratch_dir();
  std::vector<ManifestEntry> manifest;
  for (int k = 0; k < 4; ++k) {
    const fs::path p = dir / ("inst" + std::to_string(k) + ".txt");
    save_edge_list(p, testing::random_signed_graph(7, 0.6, -5, 5, 20 + k));
    manifest.push_back({p, GraphFormat::EdgeList, std::nullopt});
  }
  BenchConfig seq;
  seq.runs = 1;
  BenchConfig par = seq;
  par.parallel_instances = 3;
  const auto a = run_benchmark(manifest, seq), b = run_benchmark(manifest, par);
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].name == "inst" + std::to_string(k));
    CHECK(b[k].name == a[k].name);
    CHECK(b[k].objective == a[k].objective);
  }
}

TEST_CASE("tiny time limit still reports an incumbent") {
  const fs::path dir = scratch_dir();
  const WeightedGraph g = testing::random_signed_graph(25, 0.5, -5, 5, 3);
  save_edge_list(dir / "mid.txt", g);
  BenchConfig cfg;
  cfg.runs = 1;
  cfg.solve.time_limit_seconds = 1e-6;
  const auto records = run_benchmark({{dir / "mid.txt", GraphFormat::Auto, std::nullopt}}, cfg);
  REQUIRE(records.size() == 1);
  CHECK(records[0].status != "Failed");
  CHECK(records[0].objective >= 0.0);
}

TEST_CASE("CSV round trip and JSON mirror") {
  BenchRecord a;
  a.name = "odd, \"name\"";
  a.n = 12;
  a.m = 30;
  a.method = "branch-and-cut";
  a.run = 2;
  a.seed = 18446744073709551615ull;
  a.objective = 1.0 / 3.0;
  a.optimum = 0.1;
  a.eos = 1e-17;
  a.wall_seconds = 0.125;
  a.gap = 0.0;
  a.status = "gap-reached";
  BenchRecord b;
  b.name = "plain";
  b.method = "heuristic";
  b.status = "Failed";
  b.error = "line 3: bad\nvalue";
  const std::vector<BenchRecord> records{a, b};

  std::stringstream ss;
  write_records_csv(ss, records);
  const std::string text = ss.str();
  CHECK(text.rfind("name,n,m,method,run,seed,objective,optimum,eos,wall_seconds,gap,status,error\n", 0) == 0);
  CHECK(read_records_csv(ss) == records);

  const auto doc = nlohmann::json::parse(records_json(records));
  REQUIRE(doc["records"].size() == 2);
  CHECK(doc["records"][0]["name"] == a.name);
  CHECK(doc["records"][0]["objective"].get<double>() == a.objective);
  CHECK(doc["records"][1]["optimum"].is_null());
  CHECK(doc["summary"].size() == 1);

  std::istringstream bad("name,n\nx,1\n");
  CHECK_THROWS_AS(read_records_csv(bad), InputError);
}
