#pragma once

// Cluster communication building blocks, each a single simulator run.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "netdecomp/clustering.hpp"
#include "netdecomp/congest.hpp"

namespace netdecomp {

inline constexpr std::uint32_t kNoPort = 0xFFFFFFFFu;

struct FloodSource {
  Vertex node = 0;
  Ident origin = 0;
  std::uint64_t payload = 0;
};

struct FloodItem {
  Ident origin = 0;
  std::uint32_t dist = 0;
  /// Lowest port over which the item arrived at its final distance; kNoPort
  /// at the source itself.
  std::uint32_t parent_port = kNoPort;
  std::uint64_t payload = 0;
};

struct FloodResult {
  /// Per node, at most fanin items sorted by (dist, origin).
  std::vector<std::vector<FloodItem>> held;
  RoundStats stats;
};

/// Pipelined k-source detection: for fanin*hops rounds every node forwards
/// the smallest not-yet-forwarded item of its current top-fanin list.
/// At the end each node holds the fanin closest origins within `hops`
/// (ties by smaller origin).
FloodResult bounded_flood(const Graph& g, std::span<const FloodSource> sources, std::uint32_t hops,
                          std::uint32_t fanin, const SimConfig& cfg, std::uint32_t payload_bits = 0);

/// Centralized recomputation of what bounded_flood delivers.
std::vector<std::vector<FloodItem>> flood_oracle(const Graph& g, std::span<const FloodSource> sources,
                                                 std::uint32_t hops, std::uint32_t fanin);

/// Fixed-size payload carried through cluster trees.
struct Payload {
  std::array<std::uint64_t, 4> w{};
  friend bool operator==(const Payload&, const Payload&) = default;
};

struct BroadcastResult {
  /// received[i][j]: what members[j] of cluster i received.
  std::vector<std::vector<Payload>> received;
  RoundStats stats;
};

/// Every center pushes its payload down its tree; shared edges serve
/// clusters in ascending id order. Throws if more than overlap_cap trees use
/// one edge.
BroadcastResult cluster_broadcast(const Graph& g, std::span<const Cluster> clusters,
                                  std::span<const Payload> payloads, std::uint32_t payload_bits,
                                  std::uint32_t overlap_cap, const SimConfig& cfg);

enum class Combine { kSum, kMin, kMax, kAnd, kOr };

struct ScalarConvergecastResult {
  std::vector<std::uint64_t> at_center;
  RoundStats stats;
};

/// values[i][j] belongs to members[j] of cluster i. Non-member tree nodes
/// contribute the identity of the combine.
ScalarConvergecastResult cluster_convergecast(const Graph& g, std::span<const Cluster> clusters,
                                              const std::vector<std::vector<std::uint64_t>>& values,
                                              Combine combine, std::uint32_t value_bits,
                                              std::uint32_t overlap_cap, const SimConfig& cfg);

struct SetConvergecastResult {
  /// Per cluster: the item_cap smallest items of the union, ascending.
  std::vector<std::vector<Ident>> at_center;
  /// Per cluster, per item of at_center: tree path from the center to the
  /// member that contributed it, following the pointers each tree node kept
  /// (own item first, else the lowest child port that delivered it).
  std::vector<std::vector<std::vector<Vertex>>> provenance;
  RoundStats stats;
};

/// Pipelined ascending merge of member item sets up the trees.
SetConvergecastResult cluster_convergecast_union(const Graph& g, std::span<const Cluster> clusters,
                                                 const std::vector<std::vector<std::vector<Ident>>>& items,
                                                 std::uint32_t item_cap, std::uint32_t overlap_cap,
                                                 const SimConfig& cfg);

struct Packet {
  /// Consecutive vertices must be adjacent; path.front() is the origin.
  std::vector<Vertex> path;
  std::uint32_t bits = 0;
  /// Lower goes first on a contended edge; ties by packet index.
  std::uint64_t priority = 0;
};

struct RouteResult {
  /// Round in which each packet reached the end of its path.
  std::vector<std::uint64_t> arrival;
  RoundStats stats;
};

/// Store-and-forward routing with one packet per directed edge per round.
RouteResult route_packets(const Graph& g, std::span<const Packet> packets, const SimConfig& cfg);

}  // namespace netdecomp
