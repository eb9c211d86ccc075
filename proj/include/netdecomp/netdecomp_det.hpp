#pragma once

// Deterministic network decomposition of G^k. Clusters grow in phases: each
// phase learns a bounded-in-degree virtual graph H among the live clusters,
// marks clusters of huge out-degree, picks a maximal 2-independent set C* of
// the high-degree ones, merges around C* and the marked clusters, and colors
// whatever is left with a fresh palette.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "netdecomp/clustering.hpp"
#include "netdecomp/congest.hpp"
#include "netdecomp/linial.hpp"
#include "netdecomp/primitives.hpp"

namespace netdecomp {

/// Message passing backend for one decomposition run. In fast mode every
/// primitive is replaced by its centralized recomputation and nothing is
/// simulated; outcomes must coincide.
struct CommContext {
  const Graph* g = nullptr;
  SimConfig cfg;
  bool fast = false;
  RoundStats stats;

  FloodResult flood(std::span<const FloodSource> sources, std::uint32_t hops, std::uint32_t fanin,
                    std::uint32_t payload_bits = 0);
  SetConvergecastResult gather(std::span<const Cluster> clusters,
                               const std::vector<std::vector<std::vector<Ident>>>& items, std::uint32_t cap,
                               std::uint32_t overlap_cap);
  void route(std::span<const Packet> packets);
  void broadcast(std::span<const Cluster> clusters, std::span<const Payload> payloads, std::uint32_t bits,
                 std::uint32_t overlap_cap);
};

/// Centralized version of cluster_convergecast_union, provenance included.
SetConvergecastResult gather_oracle(const Graph& g, std::span<const Cluster> clusters,
                                    const std::vector<std::vector<std::vector<Ident>>>& items,
                                    std::uint32_t cap);

using Route = std::vector<Vertex>;

/// Virtual graph over live clusters (indexed as given, sorted by id).
struct VirtualGraph {
  /// Clusters whose id reached this center, ascending.
  std::vector<std::vector<std::uint32_t>> in;
  /// Center-to-center route for each in-edge, starting at this center.
  std::vector<std::vector<Route>> in_routes;
  /// Clusters that received this id. Filled by mark_high_outdegree.
  std::vector<std::vector<std::uint32_t>> out;
  /// At least 2d neighboring clusters.
  std::vector<bool> high;
  std::vector<bool> marked;
  /// Undirected view over unmarked clusters, with a route per neighbor.
  std::vector<std::vector<std::uint32_t>> undirected;
  std::vector<std::vector<Route>> undirected_routes;
  /// Max number of H-edges whose route crosses one G-edge.
  std::uint32_t max_edge_load = 0;
};

/// Every cluster learns up to 2d clusters within G-distance k of it.
VirtualGraph learn_neighbors(CommContext& ctx, std::span<const Cluster> live, std::uint32_t k, std::uint64_t d,
                             std::uint32_t overlap_cap);

/// Reverses the H-edges, marks clusters that reached more than 4d^2 centers,
/// and builds the undirected unmarked view.
void mark_high_outdegree(CommContext& ctx, std::span<const Cluster> live, VirtualGraph& h, std::uint64_t d);

/// Greedy over the colors of a proper coloring of the square of the view
/// (ascending, ties impossible): a high-degree unmarked cluster joins C*
/// unless a C* cluster is within two hops. Throws std::logic_error if the
/// coloring is not proper on the square among candidates.
std::vector<std::uint32_t> maximal_2_independent(const std::vector<std::vector<std::uint32_t>>& view,
                                                 const std::vector<bool>& candidate,
                                                 const std::vector<Color>& colors);

/// Smallest s >= 0 with 2^(s*s) >= n: the phase count; d = 2^s.
std::uint32_t det_phase_count(std::uint64_t n);

struct PhaseLog {
  std::uint32_t phase = 0;
  std::size_t clusters_start = 0;
  std::size_t clusters_end = 0;
  std::size_t high_degree = 0;
  std::size_t marked = 0;
  std::size_t c_star = 0;
  std::size_t merged_into_marked = 0;
  std::size_t colored = 0;
  std::uint64_t palette = 0;
  std::uint32_t max_radius_gk = 0;
  std::uint32_t max_overlap = 0;
  std::uint64_t overlap_bound = 0;
  std::uint32_t max_h_edge_load = 0;
  std::uint64_t rounds = 0;
};

struct DetResult {
  Decomposition dec;
  std::uint64_t n_clusters = 0;
  std::uint64_t d = 1;
  std::uint32_t phases_planned = 0;
  /// Max number of initial trees sharing an edge.
  std::uint32_t initial_overlap = 0;
  std::vector<PhaseLog> log;
  RoundStats stats;
  /// Sum of the per-phase palettes (upper bound on distinct colors).
  std::uint64_t total_palette = 0;
  /// Measured growth constant: max over phases of max_radius_gk^(1/i).
  double radius_growth = 1.0;
  /// Index into dec.clusters for every vertex.
  std::vector<std::uint32_t> cluster_of;

  /// cluster_count * d^i <= N for every phase.
  bool invariant_a() const;
  /// max overlap <= i*13d^3 (+ initial overlap) for every phase.
  bool invariant_c() const;
  std::string invariants_json() const;
};

struct DetOptions {
  std::uint32_t k = 1;
  bool fast = false;
  SimConfig sim;
};

/// Decomposition of G^k. With `init`, starts from those vertex-disjoint
/// clusters (covering V) instead of singletons, and never splits them.
DetResult decompose(const Graph& g, const DetOptions& opt, const std::vector<Cluster>* init = nullptr);

}  // namespace netdecomp
