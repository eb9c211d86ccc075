#pragma once

// Neighborhood covers from decompositions, and an MST built from the
// per-cluster MSTs of a cover.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "netdecomp/clustering.hpp"
#include "netdecomp/congest.hpp"

namespace netdecomp {

/// Expands every cluster of a decomposition of G^(2k) by its k-neighborhood.
/// The result is a k-neighborhood cover with sparsity = number of colors and
/// tree diameter at most (max input tree diameter) + 2k. Throws
/// std::invalid_argument if dec.k < 2k.
NeighborhoodCover cover_from_decomposition(const Graph& g, std::uint32_t k, const Decomposition& dec);

/// Max over non-MST edges e = {u, v} of 1 + d(u, v) in the subgraph of edges
/// lighter than e; 0 for a forest. nullopt once some edge exceeds cycle_cap.
/// Throws std::invalid_argument on an unweighted or disconnected graph.
std::optional<std::uint32_t> mst_radius(const Graph& g, std::uint32_t cycle_cap);

/// Minimum spanning forest (sorted edge ids).
std::vector<EdgeId> kruskal_oracle(const Graph& g);

enum class EdgeRule : std::uint8_t { kExcluded, kIncluded };

struct MstOptions {
  bool fast = false;
  SimConfig sim;
};

struct MstResult {
  std::vector<EdgeId> tree_edges;
  /// Per edge id.
  std::vector<EdgeRule> rule;
  std::uint32_t mu = 0;
  NeighborhoodCover cover;
  /// MST of each cover cluster, as G edge ids.
  std::vector<std::vector<EdgeId>> cluster_mst;
  /// Every non-MST edge was excluded by some cluster and every MST edge is
  /// in the MST of every cluster containing it.
  bool sound = false;
  bool matches_oracle = false;
  /// Measured rounds of the decomposition and expansion.
  RoundStats stats;
  /// Estimated rounds of the per-cluster MSTs: per color, the max over its
  /// clusters of tree diameter + ceil(sqrt(size)) * log*(size). Not simulated.
  std::uint64_t modeled_cluster_mst_rounds = 0;

  std::string to_json(const Graph& g) const;
};

/// k = max(mu, 1): decomposition of G^(2k), expansion to a k-neighborhood
/// cover, per-cluster MSTs, then an edge is excluded if some cluster's MST
/// drops it and included otherwise. Throws std::runtime_error if an edge
/// lies in no cluster.
MstResult cover_mst(const Graph& g, std::uint32_t mu, const MstOptions& opt = {});

}  // namespace netdecomp
