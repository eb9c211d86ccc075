#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "netdecomp/graph.hpp"

namespace netdecomp::tools {

inline constexpr int kReportVersion = 1;

struct ExperimentConfig {
  /// Exactly one of graph_path / gen_model is set.
  std::string graph_path;
  std::string gen_model;
  GenParams gen;
  std::string algo;
  std::uint32_t k = 1;
  std::vector<std::uint64_t> seeds{0};
  std::uint32_t msg_bits = 0;
  std::optional<std::uint32_t> mu;
  bool strict = true;
  /// Centralized evaluation where an algorithm offers it.
  bool fast = false;
  unsigned threads = 1;
  /// Seeds evaluated concurrently.
  unsigned jobs = 1;
  bool include_output = false;
  bool literal = false;
  double c1 = 20;
  std::optional<std::uint32_t> preshatter;
  std::string decomposition_path;
  std::string cover_path;
  std::string mis_path;
};

/// Throws std::invalid_argument on an inconsistent configuration.
void check_config(const ExperimentConfig& cfg);

/// Deterministic report (no timestamps); sets all_valid to false if any
/// validator rejected an output.
std::string run_experiment(const ExperimentConfig& cfg, bool& all_valid);

/// Runs every "<graph>_..._valid.json" / "_invalid.json" fixture in dir
/// against "<graph>.txt"; returns true iff every verdict matches its name.
bool run_fixture_suite(const std::string& dir, std::ostream& log);

}  // namespace netdecomp::tools
