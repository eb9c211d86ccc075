#pragma once

// Randomized refinement over a meta-node graph H: exponential-shift ball
// carving with parallel runs, and deterministic ball growing. Both turn a
// decomposition of H^K into one of H with few colors.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "netdecomp/clustering.hpp"
#include "netdecomp/congest.hpp"
#include "netdecomp/rng.hpp"

namespace netdecomp {

/// Vertex-disjoint clusters of G-vertices and the graph between them.
struct MetaGraph {
  /// One vertex per meta-node; identifier is the leader's G identifier.
  Graph h;
  std::vector<std::vector<Vertex>> members;
  std::vector<Vertex> leader;
  /// Meta-node of every G-vertex, kUnreached if uncovered.
  std::vector<std::uint32_t> meta_of;
  /// Max G-distance from a leader to its members inside the meta-node.
  std::uint32_t radius = 0;

  std::size_t size() const { return members.size(); }

  /// meta_of[v] names the meta-node of v (or kUnreached); leaders[i] lies in meta-node i.
  static MetaGraph from_assignment(const Graph& g, std::vector<std::uint32_t> meta_of,
                                   std::vector<Vertex> leaders);
  /// Every vertex its own meta-node: H is G.
  static MetaGraph singletons(const Graph& g);
};

/// Shifts are fixed point with 16 fractional bits.
using Fixed = std::int64_t;
inline constexpr int kFracBits = 16;
inline constexpr Fixed kFixedOne = Fixed{1} << kFracBits;
Fixed to_fixed(double x);
double from_fixed(Fixed x);

/// -ln(U) / beta with U uniform on (0, 1] from the stream.
double sample_exp(double beta, Stream& stream);

struct CarveParams {
  std::uint32_t s = 1;
  /// 2^(-s-2)
  double beta = 0.125;
  /// 2^(2s)
  std::uint64_t cap_d = 4;

  /// s = ceil(sqrt(log2 N)). Unless `literal`, s is raised to
  /// ceil(2 + log2 ln(4N)) so that a shift above cap_d has probability at
  /// most 1/(4N) at this N, which the asymptotic choice only gives for huge N.
  static CarveParams for_count(std::uint64_t n, bool literal = false);
  /// A run clusters enough: clustered * 2^s >= reached.
  bool fraction_ok(std::uint64_t clustered, std::uint64_t reached) const {
    return (clustered << s) >= reached;
  }
};

struct CarveStep {
  /// Source meta-node each node joined, kUnreached if not clustered.
  std::vector<std::uint32_t> center_of;
  /// Received any value.
  std::vector<bool> reached;
  /// Source behind the best value a node received, kUnreached if none.
  std::vector<std::uint32_t> top_source;
  std::vector<Vertex> sources;
  std::vector<Fixed> shifts;
  Fixed max_shift = 0;
  RoundStats stats;
};

/// Width of one (value, source) pair on the wire.
std::uint32_t carve_pair_bits(const Graph& h, std::uint64_t cap_d);

/// One carving step with given shifts. Only active nodes take part. A source
/// whose shift exceeds cap_d stays silent. Each node keeps and forwards its two
/// best (value, source) pairs with values down to -1; it joins the best source
/// if that value is >= 0 and beats the runner-up by more than 1.
CarveStep carve_with_shifts(const Graph& h, const std::vector<bool>& active, std::span<const Vertex> sources,
                            std::span<const Fixed> shifts, std::uint64_t cap_d, const SimConfig& cfg);

/// Draws the shifts from Stream(seed, source, run) and carves.
CarveStep carve_step(const Graph& h, const std::vector<bool>& active, std::span<const Vertex> sources,
                     const CarveParams& params, std::uint64_t seed, std::uint64_t run, const SimConfig& cfg);

/// Per-run outcome for one group of sources.
struct CarveRun {
  std::uint64_t run = 0;
  double max_shift = 0;
  std::uint64_t reached = 0;
  std::uint64_t clustered = 0;
  bool success = false;

  std::string to_json() const;
};

/// Success of a step restricted to the nodes whose best value came from
/// `sources`: max shift <= cap_d and the clustered fraction is large enough.
CarveRun evaluate_run(const CarveStep& step, std::span<const Vertex> sources, const CarveParams& params,
                      std::uint64_t run);

struct GapEstimate {
  double probability = 0;
  double sigma = 0;
  std::uint64_t trials = 0;
};

/// Monte Carlo estimate of Pr[top two of (delta_j - d_j) are within 1] for
/// independent delta_j ~ Exp(beta).
GapEstimate gap_probability_check(std::span<const double> ds, double beta, std::uint64_t trials,
                                  std::uint64_t seed);

struct CarveOptions {
  /// 0: max(32, ceil(log2 n)) with n = H's size.
  std::uint32_t runs_per_step = 0;
  std::uint64_t seed = 0;
  /// Fresh batches of runs tried before giving up on a group.
  std::uint32_t max_retries = 8;
  bool literal_params = false;
  SimConfig sim;
};

struct CarveResult {
  /// Decomposition of H (k = 1), one color per phase.
  Decomposition dec;
  std::uint32_t phases = 0;
  /// Parameters per H component.
  std::vector<CarveParams> params;
  std::vector<std::uint32_t> component;
  /// Every run evaluated, per group, in order.
  std::vector<CarveRun> runs;
  std::uint64_t steps = 0;
  std::uint64_t retries = 0;
  /// Rounds on H; runs of one step are multiplexed over the budget.
  RoundStats stats;
};

/// Minimum separation of the intermediate decomposition for carving.
std::uint32_t carve_separation(const Graph& h, bool literal = false);

/// Refines a decomposition of H^K (K >= carve_separation) into a strong
/// decomposition of H. Throws std::invalid_argument on a too-small K and
/// std::runtime_error if a group fails every run of every retry.
CarveResult carve_decompose(const Graph& h, const Decomposition& intermediate, const CarveOptions& opt);

struct BallGrowResult {
  Decomposition dec;
  std::uint32_t phases = 0;
  /// Remaining meta-nodes at the start of each phase, plus 0 at the end.
  std::vector<std::uint64_t> remaining;
  std::uint32_t max_growth_steps = 0;
  RoundStats stats;
};

/// Minimum separation of the intermediate decomposition for ball growing.
std::uint32_t ball_grow_separation(const Graph& h);

/// Per phase and per intermediate color, grows a ball from each cluster's
/// remaining active meta-nodes until its outer layer is smaller than the
/// ball, deactivates that layer and emits the ball's components with the
/// phase's color.
BallGrowResult ball_grow_refine(const Graph& h, const Decomposition& intermediate);

}  // namespace netdecomp
