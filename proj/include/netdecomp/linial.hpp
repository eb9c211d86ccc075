#pragma once

// Linial's color reduction with polynomial set systems over GF(q).

#include <cstdint>
#include <span>
#include <vector>

#include "netdecomp/congest.hpp"
#include "netdecomp/graph.hpp"

namespace netdecomp {

using Color = unsigned __int128;

/// One reduction: colors below palette_in map to colors below palette_out = q*q.
struct LinialPlan {
  std::uint64_t q = 0;
  std::uint32_t t = 0;
  Color palette_in = 0;
  Color palette_out = 0;
};

/// Reductions to apply, computed from globally known bounds only. Stops once
/// a further step would not shrink the palette. Empty when max_degree is 0.
std::vector<LinialPlan> linial_schedule(Color initial_palette, std::uint64_t max_degree);

/// New color of a node with color `own` whose neighbors hold `neighbors`
/// (all distinct from own, all below plan.palette_in).
Color linial_step(const LinialPlan& plan, Color own, std::span<const Color> neighbors);

struct ColoringResult {
  std::vector<Color> colors;
  std::uint32_t iterations = 0;
  /// Final palette size (colors are below it).
  Color palette = 1;
  RoundStats stats;
};

/// Colors `view` starting from distinct initial colors below initial_palette.
/// degree_bound must be >= the max degree of view. Each iteration is one
/// exchange of current colors between neighbors.
ColoringResult linial_color(const Graph& view, std::span<const Color> initial, Color initial_palette,
                            std::uint64_t degree_bound);

/// Same algorithm on the communication graph itself, one CONGEST round per
/// iteration, starting from node identifiers.
ColoringResult linial_color_congest(const Graph& g, const SimConfig& cfg);

}  // namespace netdecomp
