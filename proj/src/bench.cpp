#include "troika/bench.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "troika/heuristic.hpp"

namespace troika {

namespace {

using json = nlohmann::json;

std::string fmt_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw InputError("bad number '" + s + "' in CSV");
  return v;
}

template <class Int>
Int parse_int(const std::string& s) {
  Int v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw InputError("bad integer '" + s + "' in CSV");
  return v;
}

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string opt(const std::optional<double>& v) { return v ? fmt_double(*v) : std::string(); }

std::optional<double> parse_opt(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return parse_double(s);
}

// Splits one logical CSV record; quoted cells may hold commas, quotes and newlines.
bool read_csv_record(std::istream& in, std::vector<std::string>& cells) {
  cells.clear();
  std::string cell;
  bool quoted = false, any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get();
          cell += '"';
        } else {
          quoted = false;
        }
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else if (c == '\n') {
      break;
    } else if (c != '\r') {
      cell += c;
    }
  }
  if (!any) return false;
  cells.push_back(std::move(cell));
  return true;
}

constexpr const char* kColumns[] = {"name", "n",            "m",   "method", "run",    "seed", "objective",
                                    "optimum", "eos", "wall_seconds", "gap", "status", "error"};
constexpr std::size_t kColumnCount = std::size(kColumns);

BenchRecord failed_record(const ManifestEntry& e, const BenchConfig& cfg, const std::string& why) {
  BenchRecord r;
  r.name = e.path.stem().string();
  r.method = to_string(cfg.method);
  r.seed = cfg.solve.seed;
  r.optimum = e.optimum;
  r.status = "Failed";
  r.error = why;
  return r;
}

std::vector<BenchRecord> run_instance(const ManifestEntry& e, const BenchConfig& cfg) {
  LoadedGraph loaded;
  try {
    loaded = load_graph(e.path, e.format);
  } catch (const std::exception& ex) {
    return {failed_record(e, cfg, ex.what())};
  }
  const WeightedGraph& g = loaded.graph;
  std::vector<BenchRecord> out;
  for (int run = 0; run < cfg.runs; ++run) {
    BenchRecord r;
    r.name = e.path.stem().string();
    r.n = g.node_count();
    r.m = g.edge_count();
    r.method = to_string(cfg.method);
    r.run = run;
    r.seed = cfg.solve.seed + static_cast<std::uint64_t>(run);
    r.optimum = e.optimum;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      if (cfg.method == BenchMethod::Heuristic) {
        HeuristicConfig h = cfg.solve.heuristic;
        h.seed = r.seed;
        r.objective = heuristic_search(g, h).weight;
        r.status = "Heuristic";
      } else {
        SolveConfig sc = cfg.solve;
        sc.seed = r.seed;
        sc.observer = nullptr;
        const SolveReport rep = solve(g, sc);
        r.objective = rep.incumbent;
        r.gap = rep.gap;
        r.status = to_string(rep.status);
      }
    } catch (const std::exception& ex) {
      r.status = "Failed";
      r.error = ex.what();
    }
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (r.optimum && r.status != "Failed") r.eos = eos(r.objective, *r.optimum);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

std::optional<double> eos(double objective, double optimum) {
  if (!(optimum > 0.0)) return std::nullopt;
  return 1.0 - objective / optimum;
}

double modularity_eos(double achieved, double optimum) {
  if (achieved <= 0.0 || !(optimum > 0.0)) return 1.0;
  return 1.0 - achieved / optimum;
}

std::vector<ManifestEntry> parse_manifest(const std::string& json_text, const std::filesystem::path& base) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& ex) {
    throw InputError(std::string("manifest: ") + ex.what());
  }
  if (!doc.is_array()) throw InputError("manifest must be a JSON list");
  std::vector<ManifestEntry> out;
  for (const auto& item : doc) {
    if (!item.is_object() || !item.contains("path") || !item["path"].is_string()) {
      throw InputError("manifest entry needs a string \"path\"");
    }
    ManifestEntry e;
    e.path = item["path"].get<std::string>();
    if (e.path.is_relative() && !base.empty()) e.path = base / e.path;
    if (item.contains("format")) {
      if (!item["format"].is_string()) throw InputError("manifest \"format\" must be a string");
      e.format = parse_format(item["format"].get<std::string>());
    }
    if (item.contains("optimum") && !item["optimum"].is_null()) {
      if (!item["optimum"].is_number()) throw InputError("manifest \"optimum\" must be a number");
      e.optimum = item["optimum"].get<double>();
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open manifest " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_manifest(ss.str(), path.parent_path());
}

const char* to_string(BenchMethod m) { return m == BenchMethod::Heuristic ? "heuristic" : "branch-and-cut"; }

std::vector<BenchRecord> run_benchmark(const std::vector<ManifestEntry>& manifest, const BenchConfig& cfg) {
  if (cfg.runs < 1) throw InputError("runs must be at least 1");
  if (cfg.parallel_instances < 1) throw InputError("parallel instances must be at least 1");
  std::vector<std::vector<BenchRecord>> per(manifest.size());
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next++; i < manifest.size(); i = next++) per[i] = run_instance(manifest[i], cfg);
  };
  const auto threads = std::min<std::size_t>(static_cast<std::size_t>(cfg.parallel_instances), manifest.size());
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
  }
  std::vector<BenchRecord> out;
  for (auto& v : per) {
    for (auto& r : v) out.push_back(std::move(r));
  }
  return out;
}

std::vector<BenchSummary> summarize(const std::vector<BenchRecord>& records) {
  std::vector<BenchSummary> out;
  std::map<std::pair<std::string, std::string>, std::vector<const BenchRecord*>> groups;
  for (const auto& r : records) {
    if (r.status == "Failed") continue;
    auto& g = groups[{r.name, r.method}];
    if (g.empty()) out.push_back({r.name, r.method});
    g.push_back(&r);
  }
  const auto stats = [](const std::vector<double>& v, double& mean, double& sd) {
    mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
  };
  for (auto& s : out) {
    const auto& g = groups[{s.name, s.method}];
    std::vector<double> obj, time;
    for (const auto* r : g) {
      obj.push_back(r->objective);
      time.push_back(r->wall_seconds);
    }
    s.runs = static_cast<int>(g.size());
    stats(obj, s.objective_mean, s.objective_sd);
    stats(time, s.time_mean, s.time_sd);
  }
  return out;
}

void write_records_csv(std::ostream& out, const std::vector<BenchRecord>& records) {
  for (std::size_t c = 0; c < kColumnCount; ++c) out << (c ? "," : "") << kColumns[c];
  out << '\n';
  for (const auto& r : records) {
    out << quote(r.name) << ',' << r.n << ',' << r.m << ',' << quote(r.method) << ',' << r.run << ',' << r.seed << ','
        << fmt_double(r.objective) << ',' << opt(r.optimum) << ',' << opt(r.eos) << ',' << fmt_double(r.wall_seconds)
        << ',' << opt(r.gap) << ',' << quote(r.status) << ',' << quote(r.error) << '\n';
  }
}

std::vector<BenchRecord> read_records_csv(std::istream& in) {
  std::vector<std::string> cells;
  if (!read_csv_record(in, cells)) throw InputError("empty records CSV");
  if (cells.size() != kColumnCount) throw InputError("records CSV header has the wrong column count");
  for (std::size_t c = 0; c < kColumnCount; ++c) {
    if (cells[c] != kColumns[c]) throw InputError("unexpected CSV column '" + cells[c] + "'");
  }
  std::vector<BenchRecord> out;
  while (read_csv_record(in, cells)) {
    if (cells.size() == 1 && cells[0].empty()) continue;
    if (cells.size() != kColumnCount) throw InputError("records CSV row has the wrong column count");
    BenchRecord r;
    r.name = cells[0];
    r.n = parse_int<NodeId>(cells[1]);
    r.m = parse_int<std::size_t>(cells[2]);
    r.method = cells[3];
    r.run = parse_int<int>(cells[4]);
    r.seed = parse_int<std::uint64_t>(cells[5]);
    r.objective = parse_double(cells[6]);
    r.optimum = parse_opt(cells[7]);
    r.eos = parse_opt(cells[8]);
    r.wall_seconds = parse_double(cells[9]);
    r.gap = parse_opt(cells[10]);
    r.status = cells[11];
    r.error = cells[12];
    out.push_back(std::move(r));
  }
  return out;
}

std::string records_json(const std::vector<BenchRecord>& records) {
  const auto jopt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json doc;
  doc["records"] = json::array();
  for (const auto& r : records) {
    doc["records"].push_back({{"name", r.name},
                              {"n", r.n},
                              {"m", r.m},
                              {"method", r.method},
                              {"run", r.run},
                              {"seed", r.seed},
                              {"objective", r.objective},
                              {"optimum", jopt(r.optimum)},
                              {"eos", jopt(r.eos)},
                              {"wall_seconds", r.wall_seconds},
                              {"gap", jopt(r.gap)},
                              {"status", r.status},
                              {"error", r.error}});
  }
  doc["summary"] = json::array();
  for (const auto& s : summarize(records)) {
    doc["summary"].push_back({{"name", s.name},
                              {"method", s.method},
                              {"runs", s.runs},
                              {"objective_mean", s.objective_mean},
                              {"objective_sd", s.objective_sd},
                              {"time_mean", s.time_mean},
                              {"time_sd", s.time_sd}});
  }
  return doc.dump(2);
}

}  // namespace troika
