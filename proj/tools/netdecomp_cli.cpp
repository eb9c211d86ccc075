// Batch driver: build or load a graph, run one algorithm per seed, validate,
// and write a JSON report. Exit 1 iff a validator rejects an output, 2 on
// configuration or runtime errors.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "experiment.hpp"

namespace {

std::vector<std::uint64_t> parse_seeds(const std::string& spec) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto dash = item.find('-');
    if (dash == std::string::npos) {
      out.push_back(std::stoull(item));
      continue;
    }
    const auto lo = std::stoull(item.substr(0, dash));
    const auto hi = std::stoull(item.substr(dash + 1));
    if (hi < lo) throw std::invalid_argument("bad seed range " + item);
    for (auto s = lo; s <= hi; ++s) out.push_back(s);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  using netdecomp::tools::ExperimentConfig;
  CLI::App app{"Network decomposition experiments"};
  ExperimentConfig cfg;
  std::string seeds = "0";
  std::string out_path;
  std::string suite;
  std::uint32_t mu = 0;
  std::uint32_t preshatter = 0;

  app.add_option("--graph", cfg.graph_path, "Graph file (edge list, or .json)");
  app.add_option("--gen", cfg.gen_model, "Generator: gnp, grid, path, tree, clique");
  app.add_option("--n", cfg.gen.n, "Generator node count");
  app.add_option("--p", cfg.gen.p, "Edge probability for gnp");
  app.add_option("--rows", cfg.gen.rows, "Grid rows");
  app.add_option("--cols", cfg.gen.cols, "Grid columns");
  app.add_flag("--largest-component", cfg.gen.largest_component, "Keep the largest component of gnp");
  app.add_flag("--weighted", cfg.gen.weighted, "Generate distinct edge weights");
  app.add_option("--algo", cfg.algo, "netdecomp, carve, ballgrow, mis-fast, mis-slow, cover, mst, verify");
  app.add_option("--k", cfg.k, "Separation (decompositions) or radius (covers)");
  app.add_option("--seeds", seeds, "Seeds: comma list with ranges, e.g. 0-9,42");
  app.add_option("--msg-bits", cfg.msg_bits, "Per-edge bit budget (0: default)");
  auto* mu_opt = app.add_option("--mu", mu, "MST radius given to every node (default: computed)");
  app.add_option("--out", out_path, "Report path (default stdout)");
  app.add_flag("--strict,!--no-strict", cfg.strict, "Abort on budget violations (default on)");
  app.add_flag("--fast", cfg.fast, "Centralized evaluation where available");
  app.add_option("--threads", cfg.threads, "Engine worker threads");
  app.add_option("--jobs", cfg.jobs, "Seeds run concurrently");
  app.add_flag("--include-output", cfg.include_output, "Embed full outputs in the report");
  app.add_flag("--literal", cfg.literal, "Carving with the unadjusted parameter s");
  app.add_option("--c1", cfg.c1, "Shattering constant for the MIS pipeline");
  auto* pre_opt = app.add_option("--preshatter", preshatter, "Force the number of shattering iterations");
  app.add_option("--decomposition", cfg.decomposition_path, "Decomposition JSON to verify");
  app.add_option("--cover", cfg.cover_path, "Cover JSON to verify");
  app.add_option("--mis", cfg.mis_path, "MIS JSON to verify");
  app.add_option("--fixture-suite", suite, "Run every fixture in this directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (!suite.empty()) {
    try {
      return netdecomp::tools::run_fixture_suite(suite, std::cout) ? 0 : 1;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    }
  }

  try {
    cfg.seeds = parse_seeds(seeds);
    if (*mu_opt) cfg.mu = mu;
    if (*pre_opt) cfg.preshatter = preshatter;
    bool ok = true;
    const std::string report = netdecomp::tools::run_experiment(cfg, ok);
    if (out_path.empty()) {
      std::cout << report;
    } else {
      std::ofstream f(out_path);
      if (!f) throw std::runtime_error("cannot write " + out_path);
      f << report;
    }
    if (!ok) std::cerr << "validation failed\n";
    return ok ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
