#include <algorithm>
#include <set>

#include "doctest.h"
#include "netdecomp/clustering.hpp"
#include "netdecomp/rng.hpp"

using namespace netdecomp;

namespace {

// Cluster whose tree is a BFS tree of G[members] from center.
Cluster induced_cluster(const Graph& g, Vertex center, std::vector<Vertex> members, std::uint64_t color) {
  std::sort(members.begin(), members.end());
  Cluster c;
  c.id = g.ident(center);
  c.center = center;
  c.members = members;
  c.color = color;
  std::set<Vertex> in(members.begin(), members.end());
  std::set<Vertex> seen{center};
  std::vector<Vertex> q{center};
  for (std::size_t i = 0; i < q.size(); ++i) {
    for (Vertex u : g.neighbors(q[i])) {
      if (in.count(u) && seen.insert(u).second) {
        q.push_back(u);
        c.tree_edges.push_back(*g.find_edge(q[i], u));
      }
    }
  }
  std::sort(c.tree_edges.begin(), c.tree_edges.end());
  return c;
}

// Random partition of a graph into connected pieces by multi-source BFS
// from random centers, colored at random.
Decomposition random_partition(const Graph& g, std::uint64_t seed, std::uint32_t k, std::uint64_t colors) {
  Stream rng(seed, 3, 4);
  std::vector<Vertex> owner(g.size(), kUnreached);
  std::vector<Vertex> q;
  for (Vertex v = 0; v < g.size(); ++v) {
    if (rng.below(6) == 0) {
      owner[v] = v;
      q.push_back(v);
    }
  }
  for (std::size_t i = 0; i < q.size(); ++i) {
    for (Vertex u : g.neighbors(q[i])) {
      if (owner[u] == kUnreached) {
        owner[u] = owner[q[i]];
        q.push_back(u);
      }
    }
  }
  for (Vertex v = 0; v < g.size(); ++v) {
    if (owner[v] == kUnreached) {
      owner[v] = v;
      q.push_back(v);
      for (std::size_t i = q.size() - 1; i < q.size(); ++i) {
        for (Vertex u : g.neighbors(q[i])) {
          if (owner[u] == kUnreached) {
            owner[u] = v;
            q.push_back(u);
          }
        }
      }
    }
  }
  Decomposition dec;
  dec.k = k;
  for (Vertex c = 0; c < g.size(); ++c) {
    if (owner[c] != c) continue;
    std::vector<Vertex> mem;
    for (Vertex v = 0; v < g.size(); ++v)
      if (owner[v] == c) mem.push_back(v);
    dec.clusters.push_back(induced_cluster(g, c, mem, rng.below(colors)));
  }
  return dec;
}

}  // namespace

TEST_CASE("decomposition validator fixtures") {
  const Graph single = Graph::from_edges(1, {});
  Decomposition one{1, {induced_cluster(single, 0, {0}, 0)}};
  const auto r1 = validate_decomposition(single, one);
  CHECK(r1.valid);
  CHECK(r1.max_weak_diameter == 0);
  CHECK(r1.colors == 1);

  const Graph p3 = generate_graph(GraphModel::kPath, {.n = 3}, 0);
  Decomposition bad{2, {induced_cluster(p3, 0, {0}, 0), induced_cluster(p3, 1, {1}, 1), induced_cluster(p3, 2, {2}, 0)}};
  const auto r2 = validate_decomposition(p3, bad);
  CHECK_FALSE(r2.valid);
  CHECK(r2.min_same_color_gap == 2);
  Decomposition good = bad;
  good.clusters[2].color = 2;
  CHECK(validate_decomposition(p3, good).valid);
  good.k = 1;
  good.clusters[2].color = 0;
  CHECK(validate_decomposition(p3, good).valid);

  // A node left out, and a node in two clusters.
  Decomposition missing{1, {induced_cluster(p3, 0, {0, 1}, 0)}};
  CHECK_FALSE(validate_decomposition(p3, missing).valid);
  Decomposition twice{1, {induced_cluster(p3, 0, {0, 1}, 0), induced_cluster(p3, 2, {1, 2}, 1)}};
  CHECK_FALSE(validate_decomposition(p3, twice).valid);

  // Cluster id must be the center's identifier.
  Decomposition wrong_id = good;
  wrong_id.clusters[0].id = 99;
  CHECK_FALSE(validate_decomposition(p3, wrong_id).valid);
}

TEST_CASE("weak clusters may route through non-members, one tree per edge per color") {
  const Graph p5 = generate_graph(GraphModel::kPath, {.n = 5}, 0);
  // {0,2} joined through 1, and {1} alone; {3,4}.
  Cluster a = induced_cluster(p5, 0, {0, 1, 2}, 0);
  a.members = {0, 2};
  Cluster b = induced_cluster(p5, 1, {1}, 1);
  Cluster c = induced_cluster(p5, 4, {3, 4}, 2);
  Decomposition dec{2, {a, b, c}};
  auto r = validate_decomposition(p5, dec);
  CHECK(r.valid);
  CHECK(r.max_weak_diameter == 2);
  CHECK_FALSE(validate_decomposition(p5, dec, DistanceBackend::kBfs, {.tree_locality = true, .strong = true}).valid);
  // At k = 1 a detour through a non-member is too long.
  dec.k = 1;
  CHECK_FALSE(validate_decomposition(p5, dec).valid);
  CHECK(validate_decomposition(p5, dec, DistanceBackend::kBfs, {.tree_locality = false}).valid);

  // Two same-colored trees on one edge.
  Cluster x = induced_cluster(p5, 0, {0, 1, 2}, 0);
  x.members = {0};
  Cluster y = induced_cluster(p5, 2, {0, 1, 2}, 0);
  y.members = {2};
  Cluster z = induced_cluster(p5, 1, {1}, 1);
  Cluster w = induced_cluster(p5, 4, {3, 4}, 1);
  Decomposition shared{1, {x, y, z, w}};
  const auto rs = validate_decomposition(p5, shared);
  CHECK(rs.max_edge_overlap == 2);
  CHECK_FALSE(rs.valid);
}

TEST_CASE("distance backends agree on random partitions") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const std::size_t n = 20 + seed * 4;
    const Graph g = generate_graph(GraphModel::kGnp, {.n = n, .p = 3.0 / static_cast<double>(n)}, seed);
    const std::uint32_t k = 1 + seed % 3;
    const auto dec = random_partition(g, seed, k, 2 + seed % 5);
    const auto a = validate_decomposition(g, dec, DistanceBackend::kBfs);
    const auto b = validate_decomposition(g, dec, DistanceBackend::kAllPairs);
    CHECK(a.valid == b.valid);
    CHECK(a.max_weak_diameter == b.max_weak_diameter);
    CHECK(a.min_same_color_gap == b.min_same_color_gap);
    CHECK(a.max_edge_overlap == b.max_edge_overlap);

    // Brute-force the same-color gap.
    const auto apsp = all_pairs_distances(g);
    std::uint32_t gap = kUnreached;
    for (std::size_t i = 0; i < dec.clusters.size(); ++i) {
      for (std::size_t j = i + 1; j < dec.clusters.size(); ++j) {
        if (dec.clusters[i].color != dec.clusters[j].color) continue;
        for (Vertex u : dec.clusters[i].members)
          for (Vertex v : dec.clusters[j].members) gap = std::min(gap, apsp[u][v]);
      }
    }
    CHECK(a.min_same_color_gap == gap);
    CHECK(a.valid == (gap == kUnreached || gap >= k + 1));
  }
}

TEST_CASE("cover validator fixtures") {
  std::vector<Edge> star;
  for (Vertex v = 1; v <= 5; ++v) star.push_back({0, v});
  const Graph s = Graph::from_edges(6, star);
  NeighborhoodCover all{1, 1, 2, {induced_cluster(s, 0, {0, 1, 2, 3, 4, 5}, 0)}};
  const auto r = validate_cover(s, all);
  CHECK(r.valid);
  CHECK(r.sparsity == 1);
  CHECK(r.diameter == 2);

  const Graph p5 = generate_graph(GraphModel::kPath, {.n = 5}, 0);
  // Three-node halves sharing the middle: the middle node's 1-ball fits neither.
  NeighborhoodCover halves{1, 2, 2, {induced_cluster(p5, 1, {0, 1, 2}, 0), induced_cluster(p5, 3, {2, 3, 4}, 0)}};
  const auto rh = validate_cover(p5, halves);
  CHECK_FALSE(rh.valid);
  CHECK(rh.sparsity == 2);
  CHECK(rh.uncovered_balls == std::vector<Vertex>{2});

  NeighborhoodCover two{1, 2, 3, {induced_cluster(p5, 1, {0, 1, 2, 3}, 0), induced_cluster(p5, 3, {1, 2, 3, 4}, 0)}};
  const auto r2 = validate_cover(p5, two);
  CHECK(r2.valid);
  CHECK(r2.sparsity == 2);
  CHECK(r2.uncovered_balls.empty());
  two.k = 2;
  const auto r3 = validate_cover(p5, two);
  CHECK_FALSE(r3.valid);
  CHECK(std::find(r3.uncovered_balls.begin(), r3.uncovered_balls.end(), Vertex{2}) != r3.uncovered_balls.end());
  CHECK(validate_cover(p5, two, DistanceBackend::kAllPairs).uncovered_balls == r3.uncovered_balls);

  // A tree leaving the member set is not a strong cover cluster.
  NeighborhoodCover weak = two;
  weak.k = 1;
  weak.clusters[0].members = {0, 1, 3};
  CHECK_FALSE(validate_cover(p5, weak).valid);
}

TEST_CASE("mis and ruling set validators") {
  const Graph k3 = generate_graph(GraphModel::kClique, {.n = 3}, 0);
  CHECK(validate_mis(k3, {1}).ok);
  CHECK_FALSE(validate_mis(k3, {}).ok);
  const Graph p4 = generate_graph(GraphModel::kPath, {.n = 4}, 0);
  const auto adj = validate_mis(p4, {1, 2});
  CHECK_FALSE(adj.ok);
  CHECK_FALSE(adj.violation.empty());
  CHECK(validate_mis(p4, {0, 2}).ok);

  const Graph p5 = generate_graph(GraphModel::kPath, {.n = 5}, 0);
  RulingSetResult good{{0, 1, 2, 3, 4}, {0, 2, 4}, 2, 1};
  CHECK(validate_ruling_set(p5, good).ok);
  RulingSetResult far{{0, 1, 2, 3, 4}, {0}, 2, 1};
  CHECK_FALSE(validate_ruling_set(p5, far).ok);
  RulingSetResult close{{0, 1, 2, 3, 4}, {0, 1, 3}, 2, 1};
  CHECK_FALSE(validate_ruling_set(p5, close).ok);
  CHECK_FALSE(validate_ruling_set(p5, close, DistanceBackend::kAllPairs).ok);
}

TEST_CASE("json round trip") {
  const Graph g = generate_graph(GraphModel::kGrid, {.rows = 4, .cols = 4}, 0).with_identifiers(
      {5, 9, 13, 100, 7, 8, 1, 2, 3, 4, 6, 10, 11, 12, 14, (Ident{1} << 100)});
  const auto dec = random_partition(g, 1, 2, 3);
  const auto back = decomposition_from_json(g, decomposition_to_json(g, dec));
  REQUIRE(back.clusters.size() == dec.clusters.size());
  CHECK(back.k == dec.k);
  for (std::size_t i = 0; i < dec.clusters.size(); ++i) {
    CHECK(back.clusters[i].id == dec.clusters[i].id);
    CHECK(back.clusters[i].members == dec.clusters[i].members);
    CHECK(back.clusters[i].tree_edges == dec.clusters[i].tree_edges);
    CHECK(back.clusters[i].color == dec.clusters[i].color);
  }
}

TEST_CASE("radii") {
  const Graph p6 = generate_graph(GraphModel::kPath, {.n = 6}, 0);
  Cluster c = induced_cluster(p6, 1, {0, 1, 2, 3, 4, 5}, 0);
  measure_radii(p6, c, 2);
  CHECK(c.radius_g == 4);
  CHECK(c.radius_gk == 2);
  CHECK(tree_diameter(p6, c.tree_edges, 3) == 5);
}
