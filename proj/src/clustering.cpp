#include "netdecomp/clustering.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

#include "json.hpp"

namespace netdecomp {

namespace {

using nlohmann::json;

std::string cluster_name(const Cluster& c) { return "cluster " + ident_to_string(c.id); }

}  // namespace

RootedTree root_tree(const Graph& g, const Cluster& c) {
  if (c.center >= g.size()) throw GraphError(cluster_name(c) + ": center out of range");
  std::unordered_map<Vertex, std::vector<std::pair<Vertex, EdgeId>>> adj;
  for (EdgeId e : c.tree_edges) {
    if (e >= g.edge_count()) throw GraphError(cluster_name(c) + ": tree edge out of range");
    const auto& ed = g.edge(e);
    adj[ed.u].push_back({ed.v, e});
    adj[ed.v].push_back({ed.u, e});
  }
  RootedTree t;
  t.root = c.center;
  std::unordered_map<Vertex, std::size_t> index;
  index[c.center] = 0;
  t.nodes.push_back(c.center);
  t.parent.push_back(c.center);
  t.depth.push_back(0);
  t.parent_port.push_back(0);
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    const Vertex v = t.nodes[i];
    auto it = adj.find(v);
    if (it == adj.end()) continue;
    std::sort(it->second.begin(), it->second.end());
    for (const auto& [u, e] : it->second) {
      if (u == t.parent[i] && i != 0) continue;
      if (index.count(u)) throw GraphError(cluster_name(c) + ": tree edges contain a cycle");
      index[u] = t.nodes.size();
      t.nodes.push_back(u);
      t.parent.push_back(v);
      t.depth.push_back(t.depth[i] + 1);
      t.parent_port.push_back(*g.port_of(u, v));
    }
  }
  if (t.nodes.size() != c.tree_edges.size() + 1) {
    throw GraphError(cluster_name(c) + ": tree edges are not connected to the center");
  }
  for (Vertex m : c.members) {
    if (!index.count(m)) throw GraphError(cluster_name(c) + ": member " + std::to_string(m) + " not on tree");
  }
  return t;
}

void measure_radii(const Graph& g, Cluster& c, std::uint32_t k) {
  const RootedTree t = root_tree(g, c);
  std::unordered_map<Vertex, std::uint32_t> depth;
  for (std::size_t i = 0; i < t.nodes.size(); ++i) depth[t.nodes[i]] = t.depth[i];
  const auto dm = bfs_distances(g, c.center);
  c.radius_g = 0;
  c.radius_gk = 0;
  for (Vertex m : c.members) {
    c.radius_g = std::max(c.radius_g, depth[m]);
    c.radius_gk = std::max(c.radius_gk, (dm.at(m) + k - 1) / k);
  }
}

std::size_t Decomposition::colors_used() const {
  std::set<std::uint64_t> colors;
  for (const auto& c : clusters) {
    if (c.color) colors.insert(*c.color);
  }
  return colors.size();
}

std::vector<std::vector<std::uint32_t>> all_pairs_distances(const Graph& g) {
  const std::size_t n = g.size();
  std::vector<std::vector<std::uint32_t>> d(n, std::vector<std::uint32_t>(n, kUnreached));
  for (Vertex v = 0; v < n; ++v) {
    d[v][v] = 0;
    for (Vertex u : g.neighbors(v)) d[v][u] = 1;
  }
  for (std::size_t m = 0; m < n; ++m) {
    for (std::size_t i = 0; i < n; ++i) {
      if (d[i][m] == kUnreached) continue;
      const std::uint32_t dim = d[i][m];
      auto& row = d[i];
      const auto& mrow = d[m];
      for (std::size_t j = 0; j < n; ++j) {
        if (mrow[j] == kUnreached) continue;
        row[j] = std::min(row[j], dim + mrow[j]);
      }
    }
  }
  return d;
}

std::uint32_t tree_diameter(const Graph& g, const std::vector<EdgeId>& tree_edges, Vertex any) {
  if (tree_edges.empty()) return 0;
  std::unordered_map<Vertex, std::vector<Vertex>> adj;
  for (EdgeId e : tree_edges) {
    adj[g.edge(e).u].push_back(g.edge(e).v);
    adj[g.edge(e).v].push_back(g.edge(e).u);
  }
  auto farthest = [&](Vertex s) {
    std::unordered_map<Vertex, std::uint32_t> dist{{s, 0}};
    std::vector<Vertex> queue{s};
    std::pair<std::uint32_t, Vertex> best{0, s};
    for (std::size_t i = 0; i < queue.size(); ++i) {
      const Vertex v = queue[i];
      best = std::max(best, {dist[v], v});
      for (Vertex u : adj[v]) {
        if (dist.emplace(u, dist[v] + 1).second) queue.push_back(u);
      }
    }
    return best;
  };
  const Vertex start = adj.count(any) ? any : g.edge(tree_edges.front()).u;
  return farthest(farthest(start).second).first;
}

DecompositionReport validate_decomposition(const Graph& g, const Decomposition& dec,
                                           DistanceBackend backend, DecompositionChecks checks) {
  DecompositionReport rep;
  auto fail = [&](std::string msg) {
    rep.valid = false;
    if (rep.failures.size() < 50) rep.failures.push_back(std::move(msg));
  };
  const std::size_t n = g.size();
  if (dec.k < 1) fail("separation parameter k must be >= 1");
  std::vector<std::uint32_t> owner(n, kUnreached);
  for (std::uint32_t ci = 0; ci < dec.clusters.size(); ++ci) {
    const auto& c = dec.clusters[ci];
    if (c.members.empty()) {
      fail(cluster_name(c) + ": no members");
      continue;
    }
    for (Vertex v : c.members) {
      if (v >= n) {
        fail(cluster_name(c) + ": member out of range");
        continue;
      }
      if (owner[v] != kUnreached) fail("node " + std::to_string(v) + " is in two clusters");
      owner[v] = ci;
    }
    if (c.center >= n || !std::binary_search(c.members.begin(), c.members.end(), c.center)) {
      fail(cluster_name(c) + ": center is not a member");
    } else if (c.id != g.ident(c.center)) {
      fail(cluster_name(c) + ": id differs from the center's identifier");
    }
    if (!c.color) fail(cluster_name(c) + ": no color");
  }
  for (Vertex v = 0; v < n; ++v) {
    if (owner[v] == kUnreached) fail("node " + std::to_string(v) + " is in no cluster");
  }
  if (!rep.valid) return rep;
  rep.colors = dec.colors_used();

  std::vector<std::vector<std::uint32_t>> apsp;
  if (backend == DistanceBackend::kAllPairs) apsp = all_pairs_distances(g);

  // Trees and per-color edge usage.
  std::map<std::uint64_t, std::vector<std::uint32_t>> by_color;
  for (std::uint32_t ci = 0; ci < dec.clusters.size(); ++ci) by_color[*dec.clusters[ci].color].push_back(ci);
  std::vector<std::uint32_t> usage(g.edge_count(), 0);
  for (const auto& [color, ids] : by_color) {
    std::vector<EdgeId> touched;
    for (auto ci : ids) {
      const auto& c = dec.clusters[ci];
      RootedTree t;
      try {
        t = root_tree(g, c);
      } catch (const GraphError& e) {
        fail(e.what());
        continue;
      }
      if (checks.strong) {
        for (Vertex x : t.nodes) {
          if (owner[x] != ci) fail(cluster_name(c) + ": tree leaves the cluster at node " + std::to_string(x));
        }
      }
      if (checks.tree_locality) {
        const std::uint32_t reach = dec.k / 2;
        if (backend == DistanceBackend::kBfs) {
          const auto near = multi_bfs(g, c.members, reach);
          for (Vertex x : t.nodes) {
            if (near[x] == kUnreached) {
              fail(cluster_name(c) + ": tree node " + std::to_string(x) + " farther than floor(k/2) from members");
            }
          }
        } else {
          for (Vertex x : t.nodes) {
            bool ok = false;
            for (Vertex m : c.members) ok = ok || apsp[x][m] <= reach;
            if (!ok) {
              fail(cluster_name(c) + ": tree node " + std::to_string(x) + " farther than floor(k/2) from members");
            }
          }
        }
      }
      for (EdgeId e : c.tree_edges) {
        if (usage[e]++ == 0) touched.push_back(e);
        rep.max_edge_overlap = std::max(rep.max_edge_overlap, usage[e]);
      }
    }
    for (EdgeId e : touched) usage[e] = 0;
  }
  if (rep.max_edge_overlap > 1) {
    fail("an edge is used by " + std::to_string(rep.max_edge_overlap) + " trees of one color");
  }

  // Weak diameters.
  for (const auto& c : dec.clusters) {
    std::uint32_t diam = 0;
    if (backend == DistanceBackend::kAllPairs) {
      for (Vertex a : c.members)
        for (Vertex b : c.members) diam = std::max(diam, apsp[a][b]);
    } else if (c.members.size() > 1) {
      for (Vertex a : c.members) {
        const auto dm = bfs_distances(g, a);
        for (Vertex b : c.members) diam = std::max(diam, dm.at(b));
      }
    }
    if (diam == kUnreached) fail(cluster_name(c) + ": members are disconnected in G");
    rep.max_weak_diameter = std::max(rep.max_weak_diameter, diam);
  }

  // Same-color separation.
  for (const auto& [color, ids] : by_color) {
    if (ids.size() < 2) continue;
    std::uint32_t gap = kUnreached;
    if (backend == DistanceBackend::kAllPairs) {
      for (std::size_t i = 0; i < ids.size(); ++i)
        for (std::size_t j = i + 1; j < ids.size(); ++j)
          for (Vertex a : dec.clusters[ids[i]].members)
            for (Vertex b : dec.clusters[ids[j]].members) gap = std::min(gap, apsp[a][b]);
    } else {
      // Labelled multi-source BFS: the closest pair of distinct clusters meets
      // across some edge whose endpoints carry different labels.
      std::vector<std::uint32_t> dist(n, kUnreached);
      std::vector<std::uint32_t> label(n, kUnreached);
      std::vector<Vertex> queue;
      for (auto ci : ids) {
        for (Vertex v : dec.clusters[ci].members) {
          dist[v] = 0;
          label[v] = ci;
          queue.push_back(v);
        }
      }
      for (std::size_t i = 0; i < queue.size(); ++i) {
        const Vertex v = queue[i];
        for (Vertex u : g.neighbors(v)) {
          if (dist[u] == kUnreached) {
            dist[u] = dist[v] + 1;
            label[u] = label[v];
            queue.push_back(u);
          }
        }
      }
      for (const auto& e : g.edges()) {
        if (label[e.u] == kUnreached || label[e.u] == label[e.v]) continue;
        gap = std::min(gap, dist[e.u] + dist[e.v] + 1);
      }
    }
    rep.min_same_color_gap = std::min(rep.min_same_color_gap, gap);
    if (gap != kUnreached && gap < dec.k + 1) {
      fail("color " + std::to_string(color) + ": clusters at distance " + std::to_string(gap) + " < k+1 = " +
           std::to_string(dec.k + 1));
    }
  }
  return rep;
}

CoverReport validate_cover(const Graph& g, const NeighborhoodCover& cover, DistanceBackend backend) {
  CoverReport rep;
  auto fail = [&](std::string msg) {
    rep.valid = false;
    if (rep.failures.size() < 50) rep.failures.push_back(std::move(msg));
  };
  const std::size_t n = g.size();
  std::vector<std::vector<std::uint32_t>> containing(n);
  for (std::uint32_t ci = 0; ci < cover.clusters.size(); ++ci) {
    const auto& c = cover.clusters[ci];
    bool ok = true;
    for (Vertex v : c.members) {
      if (v >= n) {
        fail(cluster_name(c) + ": member out of range");
        ok = false;
      }
    }
    if (!ok) continue;
    for (Vertex v : c.members) containing[v].push_back(ci);
    if (!std::binary_search(c.members.begin(), c.members.end(), c.center)) {
      fail(cluster_name(c) + ": center is not a member");
      continue;
    }
    try {
      const RootedTree t = root_tree(g, c);
      if (t.nodes.size() != c.members.size()) fail(cluster_name(c) + ": tree is not inside G[C] or misses members");
    } catch (const GraphError& e) {
      fail(e.what());
      continue;
    }
    const std::uint32_t diam = tree_diameter(g, c.tree_edges, c.center);
    rep.diameter = std::max(rep.diameter, diam);
    if (diam > cover.d) {
      fail(cluster_name(c) + ": tree diameter " + std::to_string(diam) + " > d = " + std::to_string(cover.d));
    }
  }
  for (Vertex v = 0; v < n; ++v) {
    rep.sparsity = std::max(rep.sparsity, static_cast<std::uint32_t>(containing[v].size()));
  }
  if (rep.sparsity > cover.s) {
    fail("a node lies in " + std::to_string(rep.sparsity) + " clusters > s = " + std::to_string(cover.s));
  }

  std::vector<std::vector<std::uint32_t>> apsp;
  if (backend == DistanceBackend::kAllPairs) apsp = all_pairs_distances(g);
  std::vector<std::uint32_t> stamp(n, kUnreached);
  for (Vertex v = 0; v < n; ++v) {
    std::vector<Vertex> ball;
    if (backend == DistanceBackend::kBfs) {
      const auto dm = bfs_distances(g, v, cover.k);
      for (Vertex u = 0; u < n; ++u)
        if (dm.reached(u)) ball.push_back(u);
    } else {
      for (Vertex u = 0; u < n; ++u)
        if (apsp[v][u] <= cover.k) ball.push_back(u);
    }
    bool covered = false;
    for (auto ci : containing[v]) {
      const auto& mem = cover.clusters[ci].members;
      covered = std::all_of(ball.begin(), ball.end(),
                            [&](Vertex u) { return std::binary_search(mem.begin(), mem.end(), u); });
      if (covered) break;
    }
    if (!covered) rep.uncovered_balls.push_back(v);
  }
  if (!rep.uncovered_balls.empty()) {
    fail(std::to_string(rep.uncovered_balls.size()) + " k-balls fit in no cluster (first: node " +
         std::to_string(rep.uncovered_balls.front()) + ")");
  }
  return rep;
}

Verdict validate_mis(const Graph& g, const std::vector<Vertex>& s) {
  std::vector<char> in(g.size(), 0);
  for (Vertex v : s) {
    if (v >= g.size()) return {false, "node " + std::to_string(v) + " out of range"};
    in[v] = 1;
  }
  for (const auto& e : g.edges()) {
    if (in[e.u] && in[e.v]) {
      return {false, "adjacent nodes " + std::to_string(e.u) + " and " + std::to_string(e.v) + " both in the set"};
    }
  }
  for (Vertex v = 0; v < g.size(); ++v) {
    if (in[v]) continue;
    bool dominated = false;
    for (Vertex u : g.neighbors(v)) dominated = dominated || in[u];
    if (!dominated) return {false, "node " + std::to_string(v) + " has no neighbor in the set (not maximal)"};
  }
  return {};
}

Verdict validate_ruling_set(const Graph& g, const RulingSetResult& r, DistanceBackend backend) {
  std::vector<char> in_base(g.size(), 0);
  for (Vertex v : r.base) in_base[v] = 1;
  for (Vertex v : r.chosen) {
    if (v >= g.size() || !in_base[v]) return {false, "chosen node " + std::to_string(v) + " not in base"};
  }
  std::vector<std::vector<std::uint32_t>> apsp;
  if (backend == DistanceBackend::kAllPairs) apsp = all_pairs_distances(g);
  auto dist_from = [&](Vertex v, std::optional<std::uint32_t> cap) {
    if (backend == DistanceBackend::kAllPairs) return apsp[v];
    return bfs_distances(g, v, cap).dist;
  };
  for (Vertex v : r.chosen) {
    const auto d = dist_from(v, r.alpha > 0 ? std::optional<std::uint32_t>(r.alpha - 1) : std::nullopt);
    for (Vertex u : r.chosen) {
      if (u != v && d[u] < r.alpha) {
        return {false, "chosen nodes " + std::to_string(v) + " and " + std::to_string(u) + " at distance " +
                           std::to_string(d[u]) + " < alpha"};
      }
    }
  }
  std::vector<std::uint32_t> near;
  if (backend == DistanceBackend::kBfs) {
    near = multi_bfs(g, r.chosen, r.beta);
  } else {
    near.assign(g.size(), kUnreached);
    for (Vertex u = 0; u < g.size(); ++u)
      for (Vertex v : r.chosen) near[u] = std::min(near[u], apsp[v][u]);
  }
  for (Vertex b : r.base) {
    if (near[b] == kUnreached || near[b] > r.beta) {
      return {false, "base node " + std::to_string(b) + " farther than beta from every chosen node"};
    }
  }
  return {};
}

// ---------------------------------------------------------------------------

namespace {

json cluster_to_json(const Graph& g, const Cluster& c) {
  json j;
  j["id"] = ident_to_string(c.id);
  j["center"] = c.center;
  if (c.color) j["color"] = *c.color;
  j["members"] = c.members;
  json edges = json::array();
  for (EdgeId e : c.tree_edges) edges.push_back({g.edge(e).u, g.edge(e).v});
  j["tree_edges"] = std::move(edges);
  j["radius_g"] = c.radius_g;
  j["radius_gk"] = c.radius_gk;
  return j;
}

Cluster cluster_from_json(const Graph& g, const json& j) {
  Cluster c;
  c.center = j.at("center").get<Vertex>();
  if (c.center >= g.size()) throw GraphError("cluster center out of range");
  if (j.contains("id")) {
    const auto& id = j.at("id");
    c.id = id.is_string() ? ident_from_string(id.get<std::string>()) : Ident{id.get<std::uint64_t>()};
  } else {
    c.id = g.ident(c.center);
  }
  if (j.contains("color") && !j.at("color").is_null()) c.color = j.at("color").get<std::uint64_t>();
  c.members = j.at("members").get<std::vector<Vertex>>();
  std::sort(c.members.begin(), c.members.end());
  for (const auto& e : j.at("tree_edges")) {
    const auto u = e.at(0).get<Vertex>();
    const auto v = e.at(1).get<Vertex>();
    const auto id = g.find_edge(u, v);
    if (!id) throw GraphError("tree edge " + std::to_string(u) + " " + std::to_string(v) + " is not in the graph");
    c.tree_edges.push_back(*id);
  }
  std::sort(c.tree_edges.begin(), c.tree_edges.end());
  if (j.contains("radius_g")) c.radius_g = j.at("radius_g").get<std::uint32_t>();
  if (j.contains("radius_gk")) c.radius_gk = j.at("radius_gk").get<std::uint32_t>();
  return c;
}

}  // namespace

std::string decomposition_to_json(const Graph& g, const Decomposition& dec) {
  json j;
  j["k"] = dec.k;
  j["clusters"] = json::array();
  for (const auto& c : dec.clusters) j["clusters"].push_back(cluster_to_json(g, c));
  return j.dump();
}

Decomposition decomposition_from_json(const Graph& g, const std::string& text) {
  try {
    const json j = json::parse(text);
    Decomposition dec;
    dec.k = j.at("k").get<std::uint32_t>();
    for (const auto& c : j.at("clusters")) dec.clusters.push_back(cluster_from_json(g, c));
    return dec;
  } catch (const json::exception& e) {
    throw GraphError(std::string("decomposition json: ") + e.what());
  }
}

std::string cover_to_json(const Graph& g, const NeighborhoodCover& cover) {
  json j;
  j["k"] = cover.k;
  j["s"] = cover.s;
  j["d"] = cover.d;
  j["clusters"] = json::array();
  for (const auto& c : cover.clusters) j["clusters"].push_back(cluster_to_json(g, c));
  return j.dump();
}

NeighborhoodCover cover_from_json(const Graph& g, const std::string& text) {
  try {
    const json j = json::parse(text);
    NeighborhoodCover cover;
    cover.k = j.at("k").get<std::uint32_t>();
    cover.s = j.at("s").get<std::uint32_t>();
    cover.d = j.at("d").get<std::uint32_t>();
    for (const auto& c : j.at("clusters")) cover.clusters.push_back(cluster_from_json(g, c));
    return cover;
  } catch (const json::exception& e) {
    throw GraphError(std::string("cover json: ") + e.what());
  }
}

}  // namespace netdecomp
