#include <algorithm>
#include <cmath>
#include <map>

#include "doctest.h"
#include "netdecomp/netdecomp_det.hpp"
#include "netdecomp/netdecomp_rand.hpp"

using namespace netdecomp;

namespace {

struct OracleOut {
  std::vector<std::uint32_t> center_of;
  std::vector<bool> reached;
  std::vector<std::uint32_t> top_source;
};

// Every source with shift <= cap reaches active nodes within floor(r) + 1
// hops of H[active]; each node sorts all values it gets and decides.
OracleOut carve_oracle(const Graph& h, const std::vector<bool>& active, const std::vector<Vertex>& sources,
                       const std::vector<Fixed>& shifts, std::uint64_t cap) {
  const std::size_t n = h.size();
  std::vector<std::vector<std::pair<Fixed, Vertex>>> got(n);
  for (std::size_t i = 0; i < sources.size(); ++i) {
    if (shifts[i] > static_cast<Fixed>(cap) * kFixedOne) continue;
    std::vector<std::uint32_t> dist(n, kUnreached);
    std::vector<Vertex> q{sources[i]};
    dist[sources[i]] = 0;
    for (std::size_t j = 0; j < q.size(); ++j) {
      for (Vertex u : h.neighbors(q[j])) {
        if (active[u] && dist[u] == kUnreached) {
          dist[u] = dist[q[j]] + 1;
          q.push_back(u);
        }
      }
    }
    for (Vertex v = 0; v < n; ++v) {
      if (dist[v] == kUnreached) continue;
      const Fixed m = shifts[i] - static_cast<Fixed>(dist[v]) * kFixedOne;
      if (m >= -kFixedOne) got[v].push_back({m, sources[i]});
    }
  }
  OracleOut out{std::vector<std::uint32_t>(n, kUnreached), std::vector<bool>(n, false),
                std::vector<std::uint32_t>(n, kUnreached)};
  for (Vertex v = 0; v < n; ++v) {
    auto& l = got[v];
    if (l.empty()) continue;
    std::sort(l.begin(), l.end(), [&](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : h.ident(a.second) < h.ident(b.second);
    });
    out.reached[v] = true;
    out.top_source[v] = l[0].second;
    if (l[0].first >= 0 && (l.size() == 1 || l[0].first - l[1].first > kFixedOne)) out.center_of[v] = l[0].second;
  }
  return out;
}

std::vector<Vertex> all_of(const Graph& h) {
  std::vector<Vertex> v(h.size());
  for (Vertex i = 0; i < h.size(); ++i) v[i] = i;
  return v;
}

Decomposition intermediate_for(const Graph& h, std::uint32_t k) { return decompose(h, {.k = k, .fast = true}).dec; }

void check_strong_on_h(const Graph& h, const Decomposition& dec, std::uint64_t diam_cap) {
  const auto rep = validate_decomposition(h, dec, DistanceBackend::kBfs, {.tree_locality = true, .strong = true});
  CHECK_MESSAGE(rep.valid, (rep.failures.empty() ? std::string() : rep.failures.front()));
  CHECK(rep.max_weak_diameter <= diam_cap);
}

}  // namespace

TEST_CASE("exponential samples") {
  Stream st(1, 2, 3);
  double sum = 0;
  const int n = 100000;
  const double beta = 0.25;
  const std::uint32_t d = 8;
  int tail = 0;
  for (int i = 0; i < n; ++i) {
    const double x = sample_exp(beta, st);
    CHECK(x >= 0);
    sum += x;
    tail += x >= d + 1;
  }
  CHECK(std::abs(sum / n - 4.0) < 0.05);
  const double p = std::exp(-beta * (d + 1));
  const double sigma = std::sqrt(p * (1 - p) / n);
  CHECK(std::abs(static_cast<double>(tail) / n - p) <= 3 * sigma);
  CHECK_THROWS(sample_exp(0, st));
  CHECK(to_fixed(1.5) == 3 * kFixedOne / 2);
  CHECK(from_fixed(kFixedOne) == 1.0);
}

TEST_CASE("carving parameters") {
  const auto lit = CarveParams::for_count(64, true);
  CHECK(lit.s == 3);
  CHECK(lit.beta == 1.0 / 32);
  CHECK(lit.cap_d == 64);
  const auto adj = CarveParams::for_count(64);
  CHECK(adj.s == 5);
  CHECK(adj.cap_d == 1024);
  // Tail bound the adjusted choice guarantees: N * e^{-beta (d+1)} <= 1/4.
  for (std::uint64_t n : {1ull, 2ull, 64ull, 256ull, 5000ull}) {
    const auto p = CarveParams::for_count(n);
    CHECK(static_cast<double>(n) * std::exp(-p.beta * static_cast<double>(p.cap_d + 1)) <= 0.25);
    CHECK(p.s >= CarveParams::for_count(n, true).s);
  }
  CHECK(adj.fraction_ok(1, 32));
  CHECK_FALSE(adj.fraction_ok(1, 33));
  CHECK_FALSE(adj.fraction_ok(0, 1));
}

TEST_CASE("carving fixtures") {
  const Graph one = Graph::from_edges(1, {});
  const std::vector<Vertex> src0{0};
  const auto s1 = carve_with_shifts(one, {true}, src0, std::vector<Fixed>{to_fixed(0.3)}, 4, {});
  CHECK(s1.center_of[0] == 0);

  // P3 with sources at both ends: r = 3.0 and r = 0.5.
  const Graph p3 = generate_graph(GraphModel::kPath, {.n = 3}, 0);
  const std::vector<Vertex> ends{0, 2};
  const std::vector<Fixed> sh{to_fixed(3.0), to_fixed(0.5)};
  const auto s3 = carve_with_shifts(p3, {true, true, true}, ends, sh, 8, {});
  CHECK(s3.center_of[0] == 0);
  CHECK(s3.center_of[1] == 0);  // m1 = 2.0, m2 = -0.5
  CHECK(s3.reached[2]);
  CHECK(s3.center_of[2] == kUnreached);  // m1 = 1.0, m2 = 0.5

  // Gap of exactly 1 deactivates.
  const Graph p2 = generate_graph(GraphModel::kPath, {.n = 2}, 0);
  const std::vector<Vertex> both{0, 1};
  const auto s2 = carve_with_shifts(p2, {true, true}, both, std::vector<Fixed>{to_fixed(2.0), to_fixed(2.0)}, 8, {});
  CHECK(s2.center_of[0] == kUnreached);
  CHECK(s2.center_of[1] == kUnreached);
  CHECK(s2.reached[0]);

  // A shift above the cap silences its source.
  const auto silent = carve_with_shifts(p2, {true, true}, src0, std::vector<Fixed>{to_fixed(9.0)}, 8, {});
  CHECK_FALSE(silent.reached[0]);
  CHECK_FALSE(silent.reached[1]);

  // Inactive nodes neither relay nor get clustered.
  const auto cut = carve_with_shifts(p3, {true, false, true}, src0, std::vector<Fixed>{to_fixed(5.0)}, 8, {});
  CHECK(cut.center_of[0] == 0);
  CHECK_FALSE(cut.reached[1]);
  CHECK_FALSE(cut.reached[2]);
  CHECK_THROWS_AS(carve_with_shifts(p3, {false, true, true}, src0, std::vector<Fixed>{0}, 8, {}),
                  std::invalid_argument);
}

TEST_CASE("simulated carving equals the centralized evaluation") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const std::size_t n = 40 + 10 * (seed % 7);
    const Graph h = generate_graph(GraphModel::kGnp, {.n = n, .p = 2.5 / static_cast<double>(n)}, seed);
    Stream rng(seed, 11, 11);
    std::vector<bool> active(n);
    std::vector<Vertex> sources;
    for (Vertex v = 0; v < n; ++v) {
      active[v] = rng.below(8) != 0;
      if (active[v] && rng.below(3) == 0) sources.push_back(v);
    }
    const double beta = seed % 2 ? 0.2 : 0.5;
    const std::uint64_t cap = seed % 3 == 0 ? 3 : 40;
    const auto step = carve_step(h, active, sources, {.s = 2, .beta = beta, .cap_d = cap}, seed, 7, {});
    const auto orc = carve_oracle(h, active, step.sources, step.shifts, cap);
    CHECK(step.center_of == orc.center_of);
    CHECK(step.reached == orc.reached);
    CHECK(step.top_source == orc.top_source);
    CHECK(step.stats.budget_violations.empty());
    CHECK(step.stats.max_bits_per_edge_round <= 2 * carve_pair_bits(h, cap));

    // Clusters: contain their center, strong radius <= floor(r), pairwise
    // non-adjacent; every active neighbor of a clustered node was reached.
    std::map<Vertex, Fixed> shift_of;
    for (std::size_t i = 0; i < step.sources.size(); ++i) shift_of[step.sources[i]] = step.shifts[i];
    for (Vertex v = 0; v < n; ++v) {
      const auto c = step.center_of[v];
      if (c == kUnreached) continue;
      CHECK(step.center_of[c] == c);
      std::vector<std::uint32_t> dist(n, kUnreached);
      std::vector<Vertex> q{c};
      dist[c] = 0;
      for (std::size_t j = 0; j < q.size(); ++j)
        for (Vertex u : h.neighbors(q[j]))
          if (step.center_of[u] == c && dist[u] == kUnreached) {
            dist[u] = dist[q[j]] + 1;
            q.push_back(u);
          }
      REQUIRE(dist[v] != kUnreached);
      CHECK(static_cast<Fixed>(dist[v]) * kFixedOne <= shift_of[c]);
      for (Vertex u : h.neighbors(v)) {
        if (!active[u]) continue;
        CHECK(step.reached[u]);
        CHECK((step.center_of[u] == kUnreached || step.center_of[u] == c));
      }
    }
  }
}

TEST_CASE("gap probability of exponential shifts") {
  const std::vector<double> single{0};
  CHECK(gap_probability_check(single, 0.1, 10000, 1).probability == 0);
  const std::vector<double> zeros(10, 0.0);
  const std::vector<double> spread{0, 0.5, 1, 3, 7};
  for (double beta : {0.1, 0.5}) {
    for (const auto* ds : {&zeros, &spread}) {
      const auto est = gap_probability_check(*ds, beta, 20000, 3);
      CHECK(est.probability <= beta + 3 * est.sigma);
    }
  }
  // Two sources at equal distance: the exact probability is 1 - e^{-beta}.
  const std::vector<double> two{0, 0};
  const auto est = gap_probability_check(two, 0.3, 50000, 9);
  CHECK(std::abs(est.probability - (1 - std::exp(-0.3))) <= 4 * est.sigma);
}

TEST_CASE("single carving runs succeed often on small meta-graphs") {
  for (std::size_t n : {64u, 256u}) {
    int ok = 0;
    const int seeds = 40;
    for (int seed = 0; seed < seeds; ++seed) {
      const Graph h = generate_graph(GraphModel::kGnp, {.n = n, .p = 3.0 / static_cast<double>(n)}, seed);
      const auto params = CarveParams::for_count(n);
      const auto srcs = all_of(h);
      const auto step = carve_step(h, std::vector<bool>(n, true), srcs, params, seed, 0, {});
      const auto run = evaluate_run(step, srcs, params, 0);
      CHECK(run.reached == n);
      ok += run.success;
    }
    CHECK(ok >= 0.35 * seeds);
  }
}

TEST_CASE("carve_decompose") {
  SUBCASE("single meta-node") {
    const Graph one = Graph::from_edges(1, {});
    const auto r = carve_decompose(one, intermediate_for(one, carve_separation(one)), {});
    REQUIRE(r.dec.clusters.size() == 1);
    CHECK(r.dec.colors_used() == 1);
    CHECK(r.phases == 1);
  }
  SUBCASE("meta-path of 64") {
    const Graph h = generate_graph(GraphModel::kPath, {.n = 64}, 0);
    const auto inter = intermediate_for(h, carve_separation(h));
    const auto r = carve_decompose(h, inter, {.seed = 5});
    check_strong_on_h(h, r.dec, 2 * r.params[0].cap_d);
    CHECK(r.dec.colors_used() <= r.phases);
    CHECK(r.phases <= 3 + 2);
  }
  SUBCASE("random meta-graphs, literal parameters are rejected only when too far from success") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
      const Graph h = generate_graph(GraphModel::kGnp, {.n = 120, .p = 0.03}, seed);
      const auto inter = intermediate_for(h, carve_separation(h));
      const auto r = carve_decompose(h, inter, {.seed = seed});
      std::uint64_t cap = 0;
      for (const auto& p : r.params) cap = std::max(cap, p.cap_d);
      check_strong_on_h(h, r.dec, 2 * cap);
      CHECK(r.dec.colors_used() <= r.phases);
      const auto again = carve_decompose(h, inter, {.seed = seed, .sim = {.threads = 3}});
      CHECK(decomposition_to_json(h, r.dec) == decomposition_to_json(h, again.dec));
      CHECK(r.stats.rounds == again.stats.rounds);
    }
  }
  SUBCASE("separation precondition") {
    const Graph h = generate_graph(GraphModel::kPath, {.n = 10}, 0);
    CHECK_THROWS_AS(carve_decompose(h, intermediate_for(h, 3), {}), std::invalid_argument);
  }
}

TEST_CASE("carving outcome of a cluster ignores far-away parts of H") {
  // H = A alone versus A plus a disjoint copy B; A's clusters must coincide.
  const Graph a = generate_graph(GraphModel::kGnp, {.n = 60, .p = 0.06}, 2);
  const Graph b = generate_graph(GraphModel::kTree, {.n = 40}, 1);
  std::vector<Edge> edges = a.edges();
  for (const auto& e : b.edges()) edges.push_back({e.u + 60, e.v + 60});
  const Graph ab = Graph::from_edges(100, edges);
  const std::uint32_t sep = carve_separation(ab);
  const auto ia = intermediate_for(a, sep);
  Decomposition iab = ia;
  iab.k = sep;
  std::uint64_t c0 = *ia.clusters.front().color;
  const auto ib = intermediate_for(b, sep);
  for (auto c : ib.clusters) {
    for (auto& v : c.members) v += 60;
    c.center += 60;
    c.id = ab.ident(c.center);
    c.tree_edges.clear();
    c.color = c0;
    iab.clusters.push_back(c);
  }
  // B's intermediate cluster count must be 1 for it to share a single color.
  REQUIRE(ib.clusters.size() == 1);
  const CarveOptions opt{.runs_per_step = 32, .seed = 4};
  const auto ra = carve_decompose(a, ia, opt);
  const auto rab = carve_decompose(ab, iab, opt);
  std::vector<std::vector<Vertex>> ca, cab;
  for (const auto& c : ra.dec.clusters) ca.push_back(c.members);
  for (const auto& c : rab.dec.clusters)
    if (c.center < 60) cab.push_back(c.members);
  std::sort(ca.begin(), ca.end());
  std::sort(cab.begin(), cab.end());
  CHECK(ca == cab);
}

TEST_CASE("ball growing") {
  SUBCASE("isolated meta-node is good at once") {
    const Graph one = Graph::from_edges(1, {});
    const auto r = ball_grow_refine(one, intermediate_for(one, ball_grow_separation(one)));
    REQUIRE(r.dec.clusters.size() == 1);
    CHECK(r.max_growth_steps == 0);
  }
  SUBCASE("a star leaf grows once") {
    std::vector<Edge> star;
    for (Vertex v = 1; v <= 4; ++v) star.push_back({0, v});
    const Graph s = Graph::from_edges(5, star);
    Decomposition inter{ball_grow_separation(s), {}};
    Cluster c;
    c.id = s.ident(1);
    c.center = 1;
    c.members = {1};
    c.color = 0;
    inter.clusters.push_back(c);
    Cluster rest;
    rest.id = s.ident(0);
    rest.center = 0;
    rest.members = {0, 2, 3, 4};
    rest.tree_edges = {0, 1, 2, 3};
    rest.tree_edges.erase(rest.tree_edges.begin());
    rest.color = 1;
    inter.clusters.push_back(rest);
    const auto r = ball_grow_refine(s, inter);
    // {1} has outer layer {0} of equal size: grow to {0,1}, whose layer {2,3,4}
    // is larger again, then the whole star.
    CHECK(r.max_growth_steps == 2);
    REQUIRE(r.dec.clusters.size() == 1);
    CHECK(r.dec.clusters[0].members.size() == 5);
  }
  SUBCASE("meta-grid 8x8") {
    const Graph h = generate_graph(GraphModel::kGrid, {.rows = 8, .cols = 8}, 0);
    const auto inter = intermediate_for(h, ball_grow_separation(h));
    const auto r = ball_grow_refine(h, inter);
    check_strong_on_h(h, r.dec, 2 * (ceil_log2(64) + 1) + 2 * 14);
    CHECK(r.dec.colors_used() <= 7);
    CHECK(r.max_growth_steps <= 6);
  }
  SUBCASE("remaining meta-nodes at least halve every phase") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const Graph h = generate_graph(GraphModel::kGnp, {.n = 150, .p = 0.025}, seed);
      const auto inter = intermediate_for(h, ball_grow_separation(h));
      const auto r = ball_grow_refine(h, inter);
      check_strong_on_h(h, r.dec, 1000);
      CHECK(r.dec.colors_used() <= r.phases);
      CHECK(r.phases <= ceil_log2(150) + 1);
      for (std::size_t i = 0; i + 1 < r.remaining.size(); ++i) CHECK(2 * r.remaining[i + 1] <= r.remaining[i]);
    }
  }
  SUBCASE("separation precondition") {
    const Graph h = generate_graph(GraphModel::kPath, {.n = 10}, 0);
    CHECK_THROWS_AS(ball_grow_refine(h, intermediate_for(h, 2)), std::invalid_argument);
  }
}

TEST_CASE("meta-graph construction") {
  const Graph p5 = generate_graph(GraphModel::kPath, {.n = 5}, 0);
  const auto mg = MetaGraph::from_assignment(p5, {0, 0, 1, 1, kUnreached}, {0, 3});
  CHECK(mg.size() == 2);
  CHECK(mg.h.edge_count() == 1);
  CHECK(mg.members[1] == std::vector<Vertex>{2, 3});
  CHECK(mg.radius == 1);
  CHECK(mg.h.ident(1) == p5.ident(3));
  CHECK_THROWS(MetaGraph::from_assignment(p5, {0, 1, 0, 1, 1}, {0, 1}));
  const auto same = MetaGraph::singletons(p5);
  CHECK(same.h.edges() == p5.edges());
  CHECK(same.radius == 0);
}
