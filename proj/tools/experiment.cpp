#include "experiment.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "netdecomp/covers_mst.hpp"
#include "netdecomp/mis.hpp"
#include "netdecomp/netdecomp_det.hpp"
#include "netdecomp/netdecomp_rand.hpp"

namespace netdecomp::tools {
namespace {

using nlohmann::json;

const std::set<std::string> kAlgos{"netdecomp", "carve", "ballgrow", "mis-fast", "mis-slow", "cover", "mst", "verify"};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

GraphFormat format_of(const std::string& path) {
  return path.size() >= 5 && path.substr(path.size() - 5) == ".json" ? GraphFormat::kJson : GraphFormat::kEdgeList;
}

json stats_json(const RoundStats& s) { return json::parse(s.to_json()); }

json failures_json(const std::vector<std::string>& f) { return json(f); }

struct Outcome {
  bool valid = true;
  json run;
};

SimConfig sim_of(const ExperimentConfig& cfg, std::uint64_t seed) {
  SimConfig sim;
  sim.msg_bits = cfg.msg_bits;
  sim.strict = cfg.strict;
  sim.threads = cfg.threads;
  sim.seed = seed;
  return sim;
}

bool budget_clean(const RoundStats& s) { return s.budget_violations.empty(); }

Outcome run_netdecomp(const ExperimentConfig& cfg, const Graph& g, std::uint64_t seed) {
  Outcome o;
  const auto det = decompose(g, {cfg.k, cfg.fast, sim_of(cfg, seed)});
  const auto rep = validate_decomposition(g, det.dec);
  o.valid = rep.valid && det.invariant_a() && det.invariant_c() && budget_clean(det.stats);
  o.run["output"] = {{"colors", rep.colors},
                     {"clusters", det.dec.clusters.size()},
                     {"max_weak_diameter", rep.max_weak_diameter},
                     {"max_edge_overlap", rep.max_edge_overlap},
                     {"invariants", json::parse(det.invariants_json())}};
  if (cfg.include_output) o.run["output"]["decomposition"] = json::parse(decomposition_to_json(g, det.dec));
  o.run["failures"] = failures_json(rep.failures);
  o.run["stats"] = stats_json(det.stats);
  return o;
}

Outcome run_refine(const ExperimentConfig& cfg, const Graph& g, std::uint64_t seed, bool carve) {
  Outcome o;
  const SimConfig sim = sim_of(cfg, seed);
  const std::uint32_t sep = carve ? carve_separation(g, cfg.literal) : ball_grow_separation(g);
  const auto inter = decompose(g, {sep, cfg.fast, sim});
  Decomposition dec;
  RoundStats stats = inter.stats;
  json out;
  out["separation"] = sep;
  out["intermediate_colors"] = inter.dec.colors_used();
  std::uint64_t cap = 0;
  if (carve) {
    CarveOptions co;
    co.seed = seed;
    co.literal_params = cfg.literal;
    co.sim = sim;
    const auto cr = carve_decompose(g, inter.dec, co);
    dec = cr.dec;
    stats.append(cr.stats);
    std::size_t ok = 0;
    for (const auto& r : cr.runs) ok += r.success;
    for (const auto& p : cr.params) cap = std::max(cap, p.cap_d);
    out["phases"] = cr.phases;
    out["steps"] = cr.steps;
    out["retries"] = cr.retries;
    out["runs"] = cr.runs.size();
    out["successful_runs"] = ok;
    out["cap_d"] = cap;
    o.valid = dec.colors_used() <= cr.phases;
  } else {
    const auto bg = ball_grow_refine(g, inter.dec);
    dec = bg.dec;
    stats.append(bg.stats);
    out["phases"] = bg.phases;
    out["remaining"] = bg.remaining;
    out["max_growth_steps"] = bg.max_growth_steps;
    o.valid = dec.colors_used() <= bg.phases;
  }
  DecompositionChecks checks;
  checks.strong = true;
  const auto rep = validate_decomposition(g, dec, DistanceBackend::kBfs, checks);
  std::uint32_t diam = 0;
  for (const auto& c : dec.clusters) diam = std::max(diam, tree_diameter(g, c.tree_edges, c.center));
  out["colors"] = rep.colors;
  out["clusters"] = dec.clusters.size();
  out["max_tree_diameter"] = diam;
  if (carve && diam > 2 * cap) o.valid = false;
  if (cfg.include_output) out["decomposition"] = json::parse(decomposition_to_json(g, dec));
  o.valid = o.valid && rep.valid && budget_clean(stats);
  o.run["output"] = out;
  o.run["failures"] = failures_json(rep.failures);
  o.run["stats"] = stats_json(stats);
  return o;
}

Outcome run_mis(const ExperimentConfig& cfg, const Graph& g, std::uint64_t seed, MisVariant variant) {
  Outcome o;
  MisOptions opt;
  opt.variant = variant;
  opt.seed = seed;
  opt.c1 = cfg.c1;
  opt.preshatter_rounds = cfg.preshatter;
  opt.fast = cfg.fast;
  opt.sim = sim_of(cfg, seed);
  const auto r = mis_full(g, opt);
  const auto verdict = validate_mis(g, r.mis);
  o.valid = verdict.ok && budget_clean(r.stats);
  json out = json::parse(r.to_json(g));
  if (!cfg.include_output) {
    out.erase("mis");
    out.erase("mis_idents");
  }
  o.run["output"] = out;
  o.run["failures"] = verdict.ok ? json::array() : json::array({verdict.violation});
  o.run["stats"] = stats_json(r.stats);
  return o;
}

Outcome run_cover(const ExperimentConfig& cfg, const Graph& g, std::uint64_t seed) {
  Outcome o;
  const auto det = decompose(g, {2 * cfg.k, cfg.fast, sim_of(cfg, seed)});
  const auto cover = cover_from_decomposition(g, cfg.k, det.dec);
  const auto rep = validate_cover(g, cover);
  o.valid = rep.valid && rep.sparsity <= det.dec.colors_used() && budget_clean(det.stats);
  o.run["output"] = {{"k", cover.k},
                     {"s", cover.s},
                     {"d", cover.d},
                     {"clusters", cover.clusters.size()},
                     {"sparsity", rep.sparsity},
                     {"diameter", rep.diameter},
                     {"input_colors", det.dec.colors_used()}};
  if (cfg.include_output) o.run["output"]["cover"] = json::parse(cover_to_json(g, cover));
  o.run["failures"] = failures_json(rep.failures);
  o.run["stats"] = stats_json(det.stats);
  return o;
}

Outcome run_mst(const ExperimentConfig& cfg, const Graph& g, std::uint64_t seed) {
  Outcome o;
  const auto radius = mst_radius(g, static_cast<std::uint32_t>(g.size()) + 1);
  const std::uint32_t mu = cfg.mu.value_or(radius.value_or(0));
  MstOptions mo;
  mo.fast = cfg.fast;
  mo.sim = sim_of(cfg, seed);
  const auto r = cover_mst(g, mu, mo);
  o.valid = r.matches_oracle && r.sound && budget_clean(r.stats);
  json out = json::parse(r.to_json(g));
  out["mst_radius"] = radius ? json(*radius) : json(nullptr);
  if (!cfg.include_output) out.erase("tree_edges");
  o.run["output"] = out;
  o.run["failures"] = o.valid ? json::array() : json::array({"cover MST differs from Kruskal"});
  o.run["stats"] = stats_json(r.stats);
  return o;
}

// Verdict on a stored decomposition, cover or MIS file.
Outcome run_verify_file(const Graph& g, const std::string& path, const std::string& kind_hint) {
  Outcome o;
  const std::string text = read_file(path);
  const json j = json::parse(text);
  std::string kind = kind_hint;
  if (kind.empty()) kind = j.contains("mis") ? "mis" : (j.contains("s") && j.contains("d")) ? "cover" : "decomposition";
  o.run["kind"] = kind;
  if (kind == "mis") {
    const auto v = validate_mis(g, j.at("mis").get<std::vector<Vertex>>());
    o.valid = v.ok;
    o.run["failures"] = v.ok ? json::array() : json::array({v.violation});
  } else if (kind == "cover") {
    const auto rep = validate_cover(g, cover_from_json(g, text));
    o.valid = rep.valid;
    o.run["output"] = {{"sparsity", rep.sparsity}, {"diameter", rep.diameter}};
    o.run["failures"] = failures_json(rep.failures);
  } else {
    const auto rep = validate_decomposition(g, decomposition_from_json(g, text));
    o.valid = rep.valid;
    o.run["output"] = {{"colors", rep.colors},
                       {"max_weak_diameter", rep.max_weak_diameter},
                       {"min_same_color_gap", rep.min_same_color_gap}};
    o.run["failures"] = failures_json(rep.failures);
  }
  return o;
}

Graph make_graph(const ExperimentConfig& cfg, std::uint64_t seed) {
  if (!cfg.graph_path.empty()) return load_graph(cfg.graph_path, format_of(cfg.graph_path));
  GenParams gp = cfg.gen;
  if (cfg.algo == "mst") gp.weighted = true;
  return generate_graph(parse_model(cfg.gen_model), gp, seed);
}

Outcome run_one(const ExperimentConfig& cfg, std::uint64_t seed) {
  const Graph g = make_graph(cfg, seed);
  Outcome o;
  if (cfg.algo == "netdecomp") o = run_netdecomp(cfg, g, seed);
  else if (cfg.algo == "carve") o = run_refine(cfg, g, seed, true);
  else if (cfg.algo == "ballgrow") o = run_refine(cfg, g, seed, false);
  else if (cfg.algo == "mis-fast") o = run_mis(cfg, g, seed, MisVariant::kFast);
  else if (cfg.algo == "mis-slow") o = run_mis(cfg, g, seed, MisVariant::kSlow);
  else if (cfg.algo == "cover") o = run_cover(cfg, g, seed);
  else if (cfg.algo == "mst") o = run_mst(cfg, g, seed);
  else {
    const std::string& path = !cfg.decomposition_path.empty() ? cfg.decomposition_path
                              : !cfg.cover_path.empty()       ? cfg.cover_path
                                                              : cfg.mis_path;
    const std::string kind = !cfg.decomposition_path.empty() ? "decomposition"
                             : !cfg.cover_path.empty()       ? "cover"
                                                             : "mis";
    o = run_verify_file(g, path, kind);
  }
  o.run["seed"] = seed;
  o.run["graph"] = {{"n", g.size()},
                    {"m", g.edge_count()},
                    {"max_degree", g.max_degree()},
                    {"id_bits", g.id_bits()},
                    {"weighted", g.weighted()}};
  o.run["valid"] = o.valid;
  return o;
}

}  // namespace

void check_config(const ExperimentConfig& cfg) {
  if (!kAlgos.count(cfg.algo)) throw std::invalid_argument("unknown algorithm '" + cfg.algo + "'");
  if (cfg.graph_path.empty() == cfg.gen_model.empty())
    throw std::invalid_argument("give exactly one of --graph and --gen");
  if (cfg.k == 0) throw std::invalid_argument("--k must be positive");
  if (cfg.seeds.empty()) throw std::invalid_argument("no seeds");
  if (cfg.algo == "verify") {
    const int given = !cfg.decomposition_path.empty() + !cfg.cover_path.empty() + !cfg.mis_path.empty();
    if (given != 1) throw std::invalid_argument("verify needs exactly one of --decomposition, --cover, --mis");
    if (cfg.graph_path.empty()) throw std::invalid_argument("verify needs --graph");
  }
  if (!cfg.gen_model.empty()) parse_model(cfg.gen_model);
}

std::string run_experiment(const ExperimentConfig& cfg, bool& all_valid) {
  check_config(cfg);
  std::vector<Outcome> outcomes(cfg.seeds.size());
  const unsigned jobs = std::max(1u, cfg.jobs);
  for (std::size_t start = 0; start < cfg.seeds.size(); start += jobs) {
    std::vector<std::future<Outcome>> batch;
    const std::size_t end = std::min(cfg.seeds.size(), start + jobs);
    for (std::size_t i = start; i < end; ++i)
      batch.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred,
                                 [&cfg, seed = cfg.seeds[i]] { return run_one(cfg, seed); }));
    for (std::size_t i = start; i < end; ++i) outcomes[i] = batch[i - start].get();
  }

  json report;
  report["schema"] = "netdecomp-report";
  report["version"] = kReportVersion;
  json c;
  c["algo"] = cfg.algo;
  if (!cfg.graph_path.empty()) c["graph"] = cfg.graph_path;
  else
    c["gen"] = {{"model", cfg.gen_model},
                {"n", cfg.gen.n},
                {"p", cfg.gen.p},
                {"rows", cfg.gen.rows},
                {"cols", cfg.gen.cols},
                {"largest_component", cfg.gen.largest_component}};
  c["k"] = cfg.k;
  c["seeds"] = cfg.seeds;
  c["msg_bits"] = cfg.msg_bits;
  c["strict"] = cfg.strict;
  c["fast"] = cfg.fast;
  if (cfg.mu) c["mu"] = *cfg.mu;
  if (cfg.algo == "mis-fast" || cfg.algo == "mis-slow") {
    c["c1"] = cfg.c1;
    if (cfg.preshatter) c["preshatter"] = *cfg.preshatter;
  }
  if (cfg.algo == "carve") c["literal"] = cfg.literal;
  report["config"] = c;
  report["runs"] = json::array();
  std::size_t valid = 0;
  for (auto& o : outcomes) {
    valid += o.valid;
    report["runs"].push_back(std::move(o.run));
  }
  all_valid = valid == outcomes.size();
  report["summary"] = {{"runs", outcomes.size()}, {"valid", valid}, {"failed", outcomes.size() - valid}};
  return report.dump(2) + "\n";
}

bool run_fixture_suite(const std::string& dir, std::ostream& log) {
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  bool all = true;
  std::size_t count = 0;
  for (const auto& f : files) {
    const std::string name = f.stem().string();
    const bool want_invalid = name.find("_invalid") != std::string::npos;
    if (!want_invalid && name.find("_valid") == std::string::npos) continue;
    const fs::path graph = fs::path(dir) / (name.substr(0, name.find('_')) + ".txt");
    ++count;
    bool got = false;
    std::string note;
    try {
      const Graph g = load_graph(graph.string(), GraphFormat::kEdgeList);
      got = run_verify_file(g, f.string(), "").valid;
    } catch (const std::exception& e) {
      note = std::string(" (") + e.what() + ")";
    }
    const bool ok = got != want_invalid;
    all = all && ok;
    log << (ok ? "ok   " : "FAIL ") << name << ": expected " << (want_invalid ? "invalid" : "valid") << ", got "
        << (got ? "valid" : "invalid") << note << "\n";
  }
  if (count == 0) {
    log << "no fixtures in " << dir << "\n";
    return false;
  }
  return all;
}

}  // namespace netdecomp::tools
