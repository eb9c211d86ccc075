#pragma once

// Clusters, decompositions and covers, plus the centralized validators that
// certify them.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "netdecomp/graph.hpp"

namespace netdecomp {

struct Cluster {
  /// Identifier of the center node.
  Ident id = 0;
  Vertex center = 0;
  /// Sorted.
  std::vector<Vertex> members;
  /// Sorted edge ids; the tree may pass through non-members.
  std::vector<EdgeId> tree_edges;
  /// Max tree-path hops from the center to a member.
  std::uint32_t radius_g = 0;
  /// max over members of ceil(d_G(center, v) / k).
  std::uint32_t radius_gk = 0;
  std::optional<std::uint64_t> color;
};

/// Tree of a cluster rooted at its center, in BFS order.
struct RootedTree {
  Vertex root = 0;
  std::vector<Vertex> nodes;
  std::vector<Vertex> parent;
  std::vector<std::uint32_t> depth;
  /// Port at nodes[i] leading to parent[i]; unused for the root.
  std::vector<std::uint32_t> parent_port;
};

/// Throws GraphError unless the tree edges form a tree that contains the
/// center and every member.
RootedTree root_tree(const Graph& g, const Cluster& c);

/// Recomputes radius_g and radius_gk (k >= 1).
void measure_radii(const Graph& g, Cluster& c, std::uint32_t k);

struct Decomposition {
  std::uint32_t k = 1;
  std::vector<Cluster> clusters;

  std::size_t colors_used() const;
};

struct NeighborhoodCover {
  std::uint32_t k = 1;
  std::uint32_t s = 0;
  std::uint32_t d = 0;
  std::vector<Cluster> clusters;
};

struct RulingSetResult {
  std::vector<Vertex> base;
  std::vector<Vertex> chosen;
  std::uint32_t alpha = 1;
  std::uint32_t beta = 0;
};

enum class DistanceBackend { kBfs, kAllPairs };

struct DecompositionReport {
  bool valid = true;
  std::size_t colors = 0;
  std::uint32_t max_weak_diameter = 0;
  /// kUnreached when no two clusters share a color (or they are disconnected).
  std::uint32_t min_same_color_gap = kUnreached;
  std::uint32_t max_edge_overlap = 0;
  std::vector<std::string> failures;
};

struct DecompositionChecks {
  /// Require every tree vertex to lie within floor(k/2) hops of a member of
  /// its cluster.
  bool tree_locality = true;
  /// Require tree_edges inside G[members] (strong clusters).
  bool strong = false;
};

DecompositionReport validate_decomposition(const Graph& g, const Decomposition& dec,
                                           DistanceBackend backend = DistanceBackend::kBfs,
                                           DecompositionChecks checks = {});

struct CoverReport {
  bool valid = true;
  std::uint32_t sparsity = 0;
  /// Max tree diameter (hops) over clusters.
  std::uint32_t diameter = 0;
  std::vector<Vertex> uncovered_balls;
  std::vector<std::string> failures;
};

CoverReport validate_cover(const Graph& g, const NeighborhoodCover& cover,
                           DistanceBackend backend = DistanceBackend::kBfs);

struct Verdict {
  bool ok = true;
  std::string violation;
};

Verdict validate_mis(const Graph& g, const std::vector<Vertex>& s);
Verdict validate_ruling_set(const Graph& g, const RulingSetResult& r,
                            DistanceBackend backend = DistanceBackend::kBfs);

/// All-pairs hop distances (Floyd-Warshall). Only for small graphs.
std::vector<std::vector<std::uint32_t>> all_pairs_distances(const Graph& g);

/// Diameter of a tree given by edge ids (hops).
std::uint32_t tree_diameter(const Graph& g, const std::vector<EdgeId>& tree_edges, Vertex any);

// JSON interchange: {k, clusters: [{id, center, color?, members, tree_edges}]}
// with tree edges written as [u, v] pairs.
std::string decomposition_to_json(const Graph& g, const Decomposition& dec);
Decomposition decomposition_from_json(const Graph& g, const std::string& text);
std::string cover_to_json(const Graph& g, const NeighborhoodCover& cover);
NeighborhoodCover cover_from_json(const Graph& g, const std::string& text);

}  // namespace netdecomp
