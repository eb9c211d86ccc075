#include <algorithm>
#include <map>
#include <set>

#include "doctest.h"
#include "netdecomp/netdecomp_det.hpp"
#include "netdecomp/rng.hpp"

using namespace netdecomp;

namespace {

void check_run(const Graph& g, const DetResult& r, std::uint32_t k) {
  const auto rep = validate_decomposition(g, r.dec);
  CHECK_MESSAGE(rep.valid, (rep.failures.empty() ? std::string() : rep.failures.front()));
  CHECK(r.invariant_a());
  CHECK(r.invariant_c());
  CHECK(r.dec.k == k);
  CHECK(r.stats.budget_violations.empty());
  CHECK(r.log.size() <= r.phases_planned);
}

std::vector<Cluster> singletons(const Graph& g, std::span<const Vertex> vs) {
  std::vector<Cluster> out;
  for (Vertex v : vs) out.push_back(Cluster{g.ident(v), v, {v}, {}, 0, 0, {}});
  std::sort(out.begin(), out.end(), [](const Cluster& a, const Cluster& b) { return a.id < b.id; });
  return out;
}

}  // namespace

TEST_CASE("phase count and growth parameter") {
  CHECK(det_phase_count(1) == 0);
  CHECK(det_phase_count(2) == 1);
  CHECK(det_phase_count(16) == 2);
  CHECK(det_phase_count(17) == 3);
  CHECK(det_phase_count(512) == 3);
  CHECK(det_phase_count(2000) == 4);
}

TEST_CASE("small fixtures") {
  const Graph one = Graph::from_edges(1, {});
  for (std::uint32_t k : {1u, 3u}) {
    const auto r = decompose(one, {.k = k});
    REQUIRE(r.dec.clusters.size() == 1);
    CHECK(r.dec.colors_used() == 1);
    check_run(one, r, k);
  }

  const Graph k4 = generate_graph(GraphModel::kClique, {.n = 4}, 0);
  const auto r4 = decompose(k4, {.k = 1});
  check_run(k4, r4, 1);
  // Exhaustive: same-colored clusters are never adjacent, so in K4 each color
  // holds exactly one cluster.
  std::map<std::uint64_t, int> per_color;
  for (const auto& c : r4.dec.clusters) ++per_color[*c.color];
  for (const auto& [col, cnt] : per_color) CHECK(cnt == 1);

  const Graph p8 = generate_graph(GraphModel::kPath, {.n = 8}, 0);
  const auto r8 = decompose(p8, {.k = 2});
  check_run(p8, r8, 2);
  CHECK(r8.dec.colors_used() <= r8.total_palette);
  CHECK(r8.total_palette <= 16 * 4 * r8.d * r8.d * std::max<std::uint32_t>(1, r8.phases_planned));
}

TEST_CASE("clusters within k see each other, clusters beyond k do not") {
  const Graph p6 = generate_graph(GraphModel::kPath, {.n = 6}, 0);
  const Vertex ends[] = {0, 3};
  CommContext ctx{&p6, {}, false, {}};
  const auto two = singletons(p6, ends);
  const auto h3 = learn_neighbors(ctx, two, 3, 2, 1);
  CHECK(h3.in[0] == std::vector<std::uint32_t>{1});
  CHECK(h3.in[1] == std::vector<std::uint32_t>{0});
  REQUIRE(h3.in_routes[0].size() == 1);
  CHECK(h3.in_routes[0][0] == Route{0, 1, 2, 3});
  const auto h2 = learn_neighbors(ctx, two, 2, 2, 1);
  CHECK(h2.in[0].empty());
  CHECK(h2.in[1].empty());
}

TEST_CASE("dense neighborhoods: each center keeps the 2d smallest in-neighbors") {
  // 3d singletons pairwise within k: a clique with d = 2 and k = 1.
  const std::uint64_t d = 2;
  const Graph g = generate_graph(GraphModel::kClique, {.n = 3 * d}, 0).with_identifiers({60, 10, 50, 20, 40, 30});
  std::vector<Vertex> all(g.size());
  for (Vertex v = 0; v < g.size(); ++v) all[v] = v;
  const auto live = singletons(g, all);
  for (bool fast : {false, true}) {
    CommContext ctx{&g, {}, fast, {}};
    auto h = learn_neighbors(ctx, live, 1, d, 1);
    for (std::uint32_t c = 0; c < live.size(); ++c) {
      // Oracle: the smallest 2d identifiers other than its own.
      std::vector<std::uint32_t> expect;
      for (std::uint32_t x = 0; x < live.size() && expect.size() < 2 * d; ++x) {
        if (x != c) expect.push_back(x);
      }
      CHECK(h.in[c] == expect);
      CHECK(h.high[c]);
    }
    mark_high_outdegree(ctx, live, h, d);
    for (std::uint32_t c = 0; c < live.size(); ++c) CHECK_FALSE(h.marked[c]);
  }
}

TEST_CASE("hub with out-degree above 4d^2 is marked") {
  // d = 1: threshold 4. A star with 5 leaves at k = 2: every leaf hears the
  // hub first among the 3 items it keeps (own, hub, smallest other leaf).
  std::vector<Edge> star;
  for (Vertex v = 1; v <= 5; ++v) star.push_back({0, v});
  const Graph g = Graph::from_edges(6, star).with_identifiers({1, 10, 11, 12, 13, 14});
  std::vector<Vertex> all{0, 1, 2, 3, 4, 5};
  const auto live = singletons(g, all);
  CommContext ctx{&g, {}, false, {}};
  auto h = learn_neighbors(ctx, live, 2, 1, 1);
  mark_high_outdegree(ctx, live, h, 1);
  // Direct count oracle.
  std::vector<std::size_t> outdeg(live.size(), 0);
  for (const auto& in : h.in)
    for (auto x : in) ++outdeg[x];
  for (std::size_t c = 0; c < live.size(); ++c) CHECK(h.marked[c] == (outdeg[c] > 4));
  CHECK(h.marked[0]);
  for (std::size_t c = 0; c < live.size(); ++c) {
    if (h.marked[c]) CHECK(h.undirected[c].empty());
    for (auto y : h.undirected[c]) CHECK_FALSE(h.marked[y]);
  }
}

TEST_CASE("maximal 2-independent set") {
  const std::vector<std::vector<std::uint32_t>> none = {{1}, {0}};
  CHECK(maximal_2_independent(none, {false, false}, {0, 1}).empty());
  CHECK(maximal_2_independent(none, {true, false}, {0, 1}) == std::vector<std::uint32_t>{0});

  // Path of 5, all candidates, colors proper on the square.
  const std::vector<std::vector<std::uint32_t>> p5 = {{1}, {0, 2}, {1, 3}, {2, 4}, {3}};
  const std::vector<bool> all(5, true);
  for (const std::vector<Color>& colors : {std::vector<Color>{0, 1, 2, 0, 1}, std::vector<Color>{2, 1, 0, 2, 1},
                                           std::vector<Color>{1, 2, 0, 1, 2}}) {
    const auto cs = maximal_2_independent(p5, all, colors);
    // Brute force: pairwise distance >= 3 and every node within 2 of a chosen one.
    for (std::size_t i = 0; i < cs.size(); ++i)
      for (std::size_t j = i + 1; j < cs.size(); ++j) CHECK(cs[j] - cs[i] >= 3);
    for (std::uint32_t v = 0; v < 5; ++v) {
      bool dom = false;
      for (auto c : cs) dom |= (c > v ? c - v : v - c) <= 2;
      CHECK(dom);
    }
  }
  CHECK_THROWS_AS(maximal_2_independent(p5, all, {0, 1, 0, 1, 0}), std::logic_error);
}

TEST_CASE("gather oracle agrees with the simulated union convergecast") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Graph g = generate_graph(GraphModel::kGnp, {.n = 120, .p = 0.04}, seed);
    const auto r = decompose(g, {.k = 2, .fast = true});
    std::vector<Cluster> cs = r.dec.clusters;
    std::sort(cs.begin(), cs.end(), [](const Cluster& a, const Cluster& b) { return a.id < b.id; });
    Stream rng(seed, 5, 5);
    std::vector<std::vector<std::vector<Ident>>> items(cs.size());
    for (std::size_t i = 0; i < cs.size(); ++i) {
      for (std::size_t j = 0; j < cs[i].members.size(); ++j) {
        std::vector<Ident> own;
        for (int t = 0; t < 3; ++t) own.push_back(rng.below(40));
        items[i].push_back(own);
      }
    }
    const auto sim = cluster_convergecast_union(g, cs, items, 3, 1000, {});
    const auto orc = gather_oracle(g, cs, items, 3);
    CHECK(sim.at_center == orc.at_center);
    CHECK(sim.provenance == orc.provenance);
  }
}

TEST_CASE("random graphs: validity, invariants, fast mode equals simulation") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const std::uint32_t k = 1 + seed % 3;
    const Graph g = generate_graph(GraphModel::kGnp, {.n = 150, .p = 0.03}, seed);
    const auto sim = decompose(g, {.k = k});
    const auto fast = decompose(g, {.k = k, .fast = true});
    check_run(g, sim, k);
    REQUIRE(sim.dec.clusters.size() == fast.dec.clusters.size());
    for (std::size_t i = 0; i < sim.dec.clusters.size(); ++i) {
      CHECK(sim.dec.clusters[i].id == fast.dec.clusters[i].id);
      CHECK(sim.dec.clusters[i].members == fast.dec.clusters[i].members);
      CHECK(sim.dec.clusters[i].tree_edges == fast.dec.clusters[i].tree_edges);
      CHECK(sim.dec.clusters[i].color == fast.dec.clusters[i].color);
    }
    CHECK(sim.invariants_json() != "");
    CHECK(fast.stats.rounds == 0);
    CHECK(sim.stats.rounds > 0);
  }
}

TEST_CASE("grids and paths at larger separation") {
  const Graph grid = generate_graph(GraphModel::kGrid, {.rows = 12, .cols = 12}, 0);
  const Graph path = generate_graph(GraphModel::kPath, {.n = 100}, 0);
  for (std::uint32_t k : {1u, 2u, 4u}) {
    check_run(grid, decompose(grid, {.k = k}), k);
    check_run(path, decompose(path, {.k = k}), k);
  }
}

TEST_CASE("initial clusters are never split") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const Graph g = generate_graph(GraphModel::kGrid, {.rows = 10, .cols = 10}, 0);
    // Initial clusters: 2x2 blocks with a path tree inside.
    std::vector<Cluster> init;
    for (Vertex r = 0; r < 10; r += 2) {
      for (Vertex c = 0; c < 10; c += 2) {
        Cluster cl;
        const Vertex a = r * 10 + c;
        const Vertex b = a + 1, x = a + 10, y = a + 11;
        cl.center = a;
        cl.members = {a, b, x, y};
        cl.tree_edges = {*g.find_edge(a, b), *g.find_edge(a, x), *g.find_edge(x, y)};
        init.push_back(cl);
      }
    }
    const std::uint32_t k = 1 + static_cast<std::uint32_t>(seed % 3);
    const auto r = decompose(g, {.k = k}, &init);
    check_run(g, r, k);
    CHECK(r.n_clusters == 25);
    for (const auto& c : init) {
      for (Vertex v : c.members) CHECK(r.cluster_of[v] == r.cluster_of[c.center]);
    }
  }
}

TEST_CASE("determinism across runs and thread counts") {
  const Graph g = generate_graph(GraphModel::kGnp, {.n = 300, .p = 0.02}, 4);
  const auto a = decompose(g, {.k = 2});
  const auto b = decompose(g, {.k = 2});
  const auto c = decompose(g, {.k = 2, .sim = {.threads = 4}});
  CHECK(decomposition_to_json(g, a.dec) == decomposition_to_json(g, b.dec));
  CHECK(decomposition_to_json(g, a.dec) == decomposition_to_json(g, c.dec));
  CHECK(a.stats.to_json() == c.stats.to_json());
  CHECK(a.invariants_json() == c.invariants_json());
}
