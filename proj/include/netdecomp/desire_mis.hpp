#pragma once

// MIS with desire levels, run as bit-packed parallel lanes. Every message
// carries exactly one bit per lane: a node learns its neighbors' desires only
// from their halve/double bits.

#include <cstdint>
#include <functional>
#include <vector>

#include "netdecomp/congest.hpp"
#include "netdecomp/graph.hpp"

namespace netdecomp {

enum class MisStatus : std::uint8_t { kUndecided, kInMis, kRemoved };

/// Desire 2^-e is kept as e in [1, kMaxDesireExp].
inline constexpr std::uint8_t kMaxDesireExp = 48;

/// Next desire exponent: halve if the effective degree (fixed point, 48
/// fractional bits) is at least 2, else double up to 1/2.
std::uint8_t next_desire_exp(std::uint8_t e, std::uint64_t effective_degree);

struct LaneRunConfig {
  /// Parallel runs, at most 64.
  std::uint32_t lanes = 1;
  std::uint64_t seed = 0;
  /// Lane l draws from Stream(seed, v, run_base + l).
  std::uint64_t run_base = 0;
  std::uint32_t iterations = 1;
  /// Nodes taking part; empty means all.
  std::vector<bool> participants;
  /// Centralized evaluation of the same rules instead of message passing.
  bool fast = false;
  /// Check independence and domination after every iteration.
  bool check_invariants = true;
  SimConfig sim;
};

struct LaneRunResult {
  std::uint32_t lanes = 1;
  std::uint32_t iterations = 0;
  /// Indexed v * lanes + l.
  std::vector<MisStatus> status;
  std::vector<std::uint8_t> desire_exp;
  /// Undecided participating (node, lane) pairs after each iteration.
  std::vector<std::uint64_t> undecided_after;
  std::uint64_t invariant_checks = 0;
  RoundStats stats;

  MisStatus at(Vertex v, std::uint32_t l) const { return status[static_cast<std::size_t>(v) * lanes + l]; }
};

/// Thrown when a mid-run independence or domination check fails.
class MisInvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

LaneRunResult run_lanes(const Graph& g, const LaneRunConfig& cfg);

struct MisState {
  std::vector<MisStatus> status;
  std::vector<std::uint8_t> desire_exp;
  std::uint64_t round = 0;

  static MisState initial(std::size_t n);
  double desire(Vertex v) const;
};

/// One iteration on the undecided part, centrally evaluated.
MisState desire_round(const Graph& g, const MisState& state, std::uint64_t seed);

struct DesireResult {
  std::vector<Vertex> mis;
  std::vector<Vertex> undecided;
  MisState state;
  std::vector<std::uint64_t> undecided_after;
  RoundStats stats;
};

/// Single-lane run for `rounds` iterations from the initial state.
DesireResult run_desire_levels(const Graph& g, std::uint32_t rounds, std::uint64_t seed, bool fast = true,
                            const SimConfig& sim = {});

}  // namespace netdecomp
