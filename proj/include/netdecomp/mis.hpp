#pragma once

// Full MIS pipeline: shatter with desire levels, cluster the leftover
// nodes around a ruling set, decompose the cluster graph, then solve each
// color class with parallel runs and keep one locally valid run per cluster.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "netdecomp/clustering.hpp"
#include "netdecomp/congest.hpp"
#include "netdecomp/desire_mis.hpp"
#include "netdecomp/netdecomp_rand.hpp"

namespace netdecomp {

struct ShatterReport {
  std::vector<Vertex> undecided;
  /// Component sizes of G[B], descending.
  std::vector<std::size_t> component_sizes;
  std::size_t max_component = 0;
  /// log_Delta(n) * Delta^4.
  double bound = 0;
  /// max_component / bound.
  double fitted_c = 0;
  /// Largest greedy set found inside one component with pairwise distance
  /// >= 5 that stays connected under distance <= 9. A lower bound only.
  std::size_t p1_witness = 0;

  std::string to_json() const;
};

ShatterReport shatter_check(const Graph& g, std::span<const Vertex> undecided, std::size_t delta);

/// Deterministic (k, (k-1) * id_bits) ruling set of `base` with distances in
/// g: for each identifier bit from the top, nodes with the bit set drop out
/// if a node with the bit clear is within k - 1 hops.
RulingSetResult ruling_set(const Graph& g, std::span<const Vertex> base, std::uint32_t k, bool fast = false,
                           const SimConfig& cfg = {}, RoundStats* stats = nullptr);

/// Every base node joins its closest chosen node (ties to the smaller
/// identifier), found with a one-item flood over G[base].
MetaGraph build_meta_graph(const Graph& g, std::span<const Vertex> base, std::span<const Vertex> chosen,
                           bool fast = false, const SimConfig& cfg = {}, RoundStats* stats = nullptr);

enum class MisVariant { kFast, kSlow };

struct MisOptions {
  MisVariant variant = MisVariant::kFast;
  std::uint64_t seed = 0;
  /// Shattering iterations: ceil(c1 * (log2 Delta + 1)) unless set.
  double c1 = 20;
  std::optional<std::uint32_t> preshatter_rounds;
  /// Parallel runs per color: ceil(c2 * log2 n), at most 64.
  double c2 = 2;
  std::uint32_t ruling_k = 5;
  std::uint32_t max_retries = 5;
  /// Centralized evaluation of every stage.
  bool fast = false;
  SimConfig sim;
};

struct ColorLog {
  std::uint64_t color = 0;
  std::size_t super_clusters = 0;
  std::size_t participants = 0;
  std::uint32_t lanes = 0;
  std::uint32_t iterations = 0;
  std::uint32_t retries = 0;
  std::uint64_t rounds = 0;
};

struct MisResult {
  std::vector<Vertex> mis;
  std::uint32_t preshatter_iterations = 0;
  ShatterReport shatter;
  RulingSetResult ruling;
  std::size_t meta_nodes = 0;
  std::uint32_t meta_radius = 0;
  std::size_t intermediate_colors = 0;
  std::size_t colors = 0;
  std::uint32_t refine_phases = 0;
  std::vector<ColorLog> per_color;
  std::uint64_t invariant_checks = 0;
  RoundStats preshatter_stats;
  RoundStats ruling_stats;
  RoundStats decomposition_stats;
  RoundStats percolor_stats;
  RoundStats stats;

  std::string to_json(const Graph& g) const;
};

std::uint32_t preshatter_iterations(const Graph& g, double c1);

MisResult mis_full(const Graph& g, const MisOptions& opt);

}  // namespace netdecomp
