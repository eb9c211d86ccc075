#include "netdecomp/netdecomp_det.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <unordered_map>

#include "json.hpp"

namespace netdecomp {

FloodResult CommContext::flood(std::span<const FloodSource> sources, std::uint32_t hops, std::uint32_t fanin,
                               std::uint32_t payload_bits) {
  if (fast) {
    FloodResult r;
    r.held = flood_oracle(*g, sources, hops, fanin);
    return r;
  }
  auto r = bounded_flood(*g, sources, hops, fanin, cfg, payload_bits);
  stats.append(r.stats);
  return r;
}

SetConvergecastResult CommContext::gather(std::span<const Cluster> clusters,
                                          const std::vector<std::vector<std::vector<Ident>>>& items,
                                          std::uint32_t cap, std::uint32_t overlap_cap) {
  if (fast) return gather_oracle(*g, clusters, items, cap);
  auto r = cluster_convergecast_union(*g, clusters, items, cap, overlap_cap, cfg);
  stats.append(r.stats);
  return r;
}

void CommContext::route(std::span<const Packet> packets) {
  if (fast || packets.empty()) return;
  stats.append(route_packets(*g, packets, cfg).stats);
}

void CommContext::broadcast(std::span<const Cluster> clusters, std::span<const Payload> payloads, std::uint32_t bits,
                            std::uint32_t overlap_cap) {
  if (fast || clusters.empty()) return;
  stats.append(cluster_broadcast(*g, clusters, payloads, bits, overlap_cap, cfg).stats);
}

SetConvergecastResult gather_oracle(const Graph& g, std::span<const Cluster> clusters,
                                    const std::vector<std::vector<std::vector<Ident>>>& items, std::uint32_t cap) {
  SetConvergecastResult res;
  res.at_center.resize(clusters.size());
  res.provenance.resize(clusters.size());
  for (std::size_t ci = 0; ci < clusters.size(); ++ci) {
    const Cluster& c = clusters[ci];
    std::vector<Ident> all;
    for (const auto& own : items[ci]) all.insert(all.end(), own.begin(), own.end());
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    if (all.size() > cap) all.resize(cap);
    res.at_center[ci] = all;
    if (all.empty()) continue;

    const RootedTree t = root_tree(g, c);
    std::unordered_map<Vertex, std::uint32_t> pos;
    for (std::uint32_t i = 0; i < t.nodes.size(); ++i) pos[t.nodes[i]] = i;
    std::vector<std::vector<std::uint32_t>> children(t.nodes.size());
    for (std::uint32_t i = 1; i < t.nodes.size(); ++i) children[pos[t.parent[i]]].push_back(i);
    for (auto& ch : children) {
      std::sort(ch.begin(), ch.end(), [&](std::uint32_t a, std::uint32_t b) {
        return *g.port_of(t.parent[a], t.nodes[a]) < *g.port_of(t.parent[b], t.nodes[b]);
      });
    }
    auto owns = [&](Vertex v, Ident x) {
      const auto it = std::lower_bound(c.members.begin(), c.members.end(), v);
      if (it == c.members.end() || *it != v) return false;
      const auto& own = items[ci][it - c.members.begin()];
      return std::find(own.begin(), own.end(), x) != own.end();
    };
    for (Ident x : all) {
      std::vector<char> has(t.nodes.size(), 0);
      for (std::size_t j = 0; j < c.members.size(); ++j) {
        const auto& own = items[ci][j];
        if (std::find(own.begin(), own.end(), x) == own.end()) continue;
        for (std::uint32_t i = pos[c.members[j]]; !has[i]; i = pos[t.parent[i]]) {
          has[i] = 1;
          if (i == 0) break;
        }
      }
      std::vector<Vertex> path{c.center};
      std::uint32_t at = 0;
      while (!owns(t.nodes[at], x)) {
        std::uint32_t next = at;
        for (std::uint32_t ch : children[at]) {
          if (has[ch]) {
            next = ch;
            break;
          }
        }
        if (next == at) throw std::logic_error("gather oracle: item lost in tree");
        at = next;
        path.push_back(t.nodes[at]);
      }
      res.provenance[ci].push_back(std::move(path));
    }
  }
  return res;
}

namespace {

constexpr std::uint32_t kNone = 0xFFFFFFFFu;

// Removes cycles from a walk, keeping its endpoints.
void loop_erase(Route& r) {
  Route out;
  std::unordered_map<Vertex, std::size_t> at;
  for (Vertex v : r) {
    const auto it = at.find(v);
    if (it != at.end()) {
      for (std::size_t i = it->second + 1; i < out.size(); ++i) at.erase(out[i]);
      out.resize(it->second + 1);
    } else {
      at[v] = out.size();
      out.push_back(v);
    }
  }
  r.swap(out);
}

Route reversed(const Route& r) { return Route(r.rbegin(), r.rend()); }

std::uint32_t index_of(std::span<const Cluster> live, Ident id) {
  const auto it = std::lower_bound(live.begin(), live.end(), id, [](const Cluster& c, Ident x) { return c.id < x; });
  if (it == live.end() || it->id != id) throw std::logic_error("unknown cluster id");
  return static_cast<std::uint32_t>(it - live.begin());
}

// Parent pointers of each cluster tree, for climbing to the center.
struct Climber {
  std::vector<std::vector<std::pair<Vertex, Vertex>>> up;

  Climber(const Graph& g, std::span<const Cluster> live) : up(live.size()) {
    for (std::size_t c = 0; c < live.size(); ++c) {
      const RootedTree t = root_tree(g, live[c]);
      for (std::size_t i = 0; i < t.nodes.size(); ++i) up[c].push_back({t.nodes[i], t.parent[i]});
      std::sort(up[c].begin(), up[c].end());
    }
  }
  void climb(std::uint32_t c, Vertex center, Route& r) const {
    Vertex v = r.back();
    while (v != center) {
      const auto it = std::lower_bound(up[c].begin(), up[c].end(), std::pair<Vertex, Vertex>{v, 0});
      if (it == up[c].end() || it->first != v) throw std::logic_error("route left the cluster tree");
      v = it->second;
      r.push_back(v);
    }
  }
};

// Extends a route ending at a flood holder back to the origin cluster's node.
void follow_flood(const Graph& g, const FloodResult& fl, Ident origin, Route& r) {
  Vertex v = r.back();
  for (;;) {
    const auto& held = fl.held[v];
    const auto it = std::find_if(held.begin(), held.end(), [&](const FloodItem& f) { return f.origin == origin; });
    if (it == held.end()) throw std::logic_error("flood chain broken");
    if (it->dist == 0) return;
    v = g.neighbors(v)[it->parent_port];
    r.push_back(v);
  }
}

std::uint32_t color_bits(Color palette) { return bit_length(palette > 1 ? palette - 1 : 0); }

std::uint32_t max_overlap(const Graph& g, std::span<const Cluster> cs) {
  std::vector<std::uint32_t> use(g.edge_count(), 0);
  std::uint32_t best = 0;
  for (const auto& c : cs) {
    for (EdgeId e : c.tree_edges) best = std::max(best, ++use[e]);
  }
  return best;
}

// Linial's algorithm on a virtual graph of clusters, one exchange per
// iteration routed over G. With two_hop, every cluster also relays the
// colors it hears to its other neighbors so that the result is proper on the
// square of the view.
struct VirtualColoring {
  std::vector<Color> colors;
  Color palette = 1;
};

VirtualColoring virtual_linial(CommContext& ctx, std::span<const Cluster> live, const std::vector<bool>& in_view,
                               const std::vector<std::vector<std::uint32_t>>& adj,
                               const std::vector<std::vector<Route>>& routes, bool two_hop,
                               std::uint64_t degree_bound) {
  const Graph& g = *ctx.g;
  const std::size_t L = live.size();
  VirtualColoring res;
  res.colors.assign(L, 0);
  for (std::size_t c = 0; c < L; ++c) res.colors[c] = live[c].id;
  res.palette = g.id_bits() >= 128 ? ~Color{0} : (Color{1} << g.id_bits());
  const auto plan = linial_schedule(res.palette, degree_bound);
  std::vector<Color> next(L);
  std::vector<Color> nb;
  for (const auto& p : plan) {
    const std::uint32_t bits = color_bits(p.palette_in) + 2;
    std::vector<Packet> direct;
    for (std::size_t a = 0; a < L; ++a) {
      if (!in_view[a]) continue;
      for (const auto& r : routes[a]) direct.push_back({r, bits, 0});
    }
    ctx.route(direct);
    if (two_hop) {
      std::vector<Packet> relay;
      for (std::size_t x = 0; x < L; ++x) {
        std::size_t heard = 0;
        for (std::uint32_t y : adj[x]) heard += in_view[y];
        for (std::size_t j = 0; j < adj[x].size(); ++j) {
          if (!in_view[adj[x][j]]) continue;
          for (std::size_t t = 1; t < heard; ++t) relay.push_back({routes[x][j], bits, 0});
        }
      }
      ctx.route(relay);
    }
    for (std::size_t a = 0; a < L; ++a) {
      if (!in_view[a]) continue;
      nb.clear();
      for (std::uint32_t x : adj[a]) {
        if (in_view[x]) nb.push_back(res.colors[x]);
        if (!two_hop) continue;
        for (std::uint32_t y : adj[x]) {
          if (y != a && in_view[y]) nb.push_back(res.colors[y]);
        }
      }
      std::sort(nb.begin(), nb.end());
      nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
      next[a] = linial_step(p, res.colors[a], nb);
    }
    for (std::size_t a = 0; a < L; ++a) {
      if (in_view[a]) res.colors[a] = next[a];
    }
    res.palette = p.palette_out;
  }
  return res;
}

// BFS tree from center over the union of the given edges, pruned to members.
Cluster build_cluster(const Graph& g, Vertex center, std::vector<Vertex> members, std::vector<EdgeId> edges) {
  std::sort(members.begin(), members.end());
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  std::vector<std::pair<Vertex, Vertex>> adj;
  for (EdgeId e : edges) {
    adj.push_back({g.edge(e).u, g.edge(e).v});
    adj.push_back({g.edge(e).v, g.edge(e).u});
  }
  std::sort(adj.begin(), adj.end());
  std::unordered_map<Vertex, Vertex> parent{{center, center}};
  std::vector<Vertex> order{center};
  for (std::size_t i = 0; i < order.size(); ++i) {
    const Vertex x = order[i];
    auto it = std::lower_bound(adj.begin(), adj.end(), std::pair<Vertex, Vertex>{x, 0});
    for (; it != adj.end() && it->first == x; ++it) {
      if (parent.emplace(it->second, x).second) order.push_back(it->second);
    }
  }
  std::unordered_map<Vertex, bool> keep;
  for (Vertex v : order) keep[v] = false;
  for (Vertex v : members) {
    if (!keep.count(v)) throw std::logic_error("merged cluster is not connected by its routes");
    keep[v] = true;
  }
  Cluster c;
  c.id = g.ident(center);
  c.center = center;
  c.members = std::move(members);
  for (std::size_t i = order.size(); i-- > 1;) {
    const Vertex v = order[i];
    if (!keep[v]) continue;
    keep[parent[v]] = true;
    c.tree_edges.push_back(*g.find_edge(v, parent[v]));
  }
  std::sort(c.tree_edges.begin(), c.tree_edges.end());
  return c;
}

void add_route_edges(const Graph& g, const Route& r, std::vector<EdgeId>& edges) {
  for (std::size_t i = 1; i < r.size(); ++i) edges.push_back(*g.find_edge(r[i - 1], r[i]));
}

const Route& route_to(const VirtualGraph& h, std::uint32_t from, std::uint32_t to) {
  const auto& nb = h.undirected[from];
  const auto it = std::lower_bound(nb.begin(), nb.end(), to);
  if (it == nb.end() || *it != to) throw std::logic_error("no route between clusters");
  return h.undirected_routes[from][it - nb.begin()];
}

bool mul_le(std::uint64_t count, std::uint64_t d, std::uint32_t i, std::uint64_t n) {
  unsigned __int128 x = count;
  for (std::uint32_t t = 0; t < i; ++t) {
    x *= d;
    if (x > n) return false;
  }
  return x <= n;
}

}  // namespace

VirtualGraph learn_neighbors(CommContext& ctx, std::span<const Cluster> live, std::uint32_t k, std::uint64_t d,
                             std::uint32_t overlap_cap) {
  const Graph& g = *ctx.g;
  const std::size_t L = live.size();
  const auto cap = static_cast<std::uint32_t>(2 * d);
  std::vector<FloodSource> sources;
  for (const auto& c : live) {
    for (Vertex v : c.members) sources.push_back({v, c.id, 0});
  }
  const FloodResult fl = ctx.flood(sources, k, cap + 1);

  std::vector<std::vector<std::vector<Ident>>> items(L);
  for (std::size_t c = 0; c < L; ++c) {
    for (Vertex v : live[c].members) {
      std::vector<Ident> own;
      for (const auto& it : fl.held[v]) {
        if (it.origin != live[c].id) own.push_back(it.origin);
      }
      items[c].push_back(std::move(own));
    }
  }
  auto got = ctx.gather(live, items, cap, overlap_cap);

  const Climber climber(g, live);
  VirtualGraph h;
  h.in.resize(L);
  h.in_routes.resize(L);
  h.high.assign(L, false);
  h.marked.assign(L, false);
  std::vector<std::uint32_t> load(g.edge_count(), 0);
  std::vector<EdgeId> es;
  for (std::size_t c = 0; c < L; ++c) {
    for (std::size_t t = 0; t < got.at_center[c].size(); ++t) {
      const std::uint32_t x = index_of(live, got.at_center[c][t]);
      Route r = std::move(got.provenance[c][t]);
      follow_flood(g, fl, live[x].id, r);
      climber.climb(x, live[x].center, r);
      loop_erase(r);
      es.clear();
      add_route_edges(g, r, es);
      std::sort(es.begin(), es.end());
      es.erase(std::unique(es.begin(), es.end()), es.end());
      for (EdgeId e : es) h.max_edge_load = std::max(h.max_edge_load, ++load[e]);
      h.in[c].push_back(x);
      h.in_routes[c].push_back(std::move(r));
    }
    h.high[c] = h.in[c].size() >= cap;
  }
  return h;
}

void mark_high_outdegree(CommContext& ctx, std::span<const Cluster> live, VirtualGraph& h, std::uint64_t d) {
  const Graph& g = *ctx.g;
  const std::size_t L = live.size();
  // Each receiving center answers the cluster it heard from.
  std::vector<Packet> back;
  for (std::size_t c = 0; c < L; ++c) {
    for (const auto& r : h.in_routes[c]) back.push_back({r, g.id_bits() + 2, 0});
  }
  ctx.route(back);
  h.out.assign(L, {});
  for (std::uint32_t c = 0; c < L; ++c) {
    for (std::uint32_t x : h.in[c]) h.out[x].push_back(c);
  }
  for (std::size_t x = 0; x < L; ++x) h.marked[x] = h.out[x].size() > 4 * d * d;

  // Both ends of every H-edge learn whether the other end is marked.
  std::vector<Packet> ack;
  for (std::size_t c = 0; c < L; ++c) {
    for (const auto& r : h.in_routes[c]) {
      ack.push_back({r, 2, 0});
      ack.push_back({reversed(r), 2, 0});
    }
  }
  ctx.route(ack);

  h.undirected.assign(L, {});
  h.undirected_routes.assign(L, {});
  for (std::uint32_t c = 0; c < L; ++c) {
    if (h.marked[c]) continue;
    std::vector<std::pair<std::uint32_t, Route>> nb;
    for (std::size_t j = 0; j < h.in[c].size(); ++j) {
      if (!h.marked[h.in[c][j]]) nb.push_back({h.in[c][j], h.in_routes[c][j]});
    }
    for (std::uint32_t y : h.out[c]) {
      if (h.marked[y] || std::binary_search(h.in[c].begin(), h.in[c].end(), y)) continue;
      const auto pos = std::lower_bound(h.in[y].begin(), h.in[y].end(), c) - h.in[y].begin();
      nb.push_back({y, reversed(h.in_routes[y][pos])});
    }
    std::sort(nb.begin(), nb.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& [y, r] : nb) {
      h.undirected[c].push_back(y);
      h.undirected_routes[c].push_back(std::move(r));
    }
  }
}

std::vector<std::uint32_t> maximal_2_independent(const std::vector<std::vector<std::uint32_t>>& view,
                                                 const std::vector<bool>& candidate,
                                                 const std::vector<Color>& colors) {
  const std::size_t L = view.size();
  std::vector<std::uint32_t> order;
  for (std::uint32_t a = 0; a < L; ++a) {
    if (!candidate[a]) continue;
    order.push_back(a);
    for (std::uint32_t x : view[a]) {
      if (candidate[x] && colors[x] == colors[a]) throw std::logic_error("coloring not proper on the square");
      for (std::uint32_t y : view[x]) {
        if (y != a && candidate[y] && colors[y] == colors[a]) throw std::logic_error("coloring not proper on the square");
      }
    }
  }
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) { return colors[a] < colors[b]; });
  std::vector<char> blocked(L, 0);
  std::vector<std::uint32_t> chosen;
  for (std::uint32_t a : order) {
    if (blocked[a]) continue;
    chosen.push_back(a);
    blocked[a] = 1;
    for (std::uint32_t x : view[a]) {
      blocked[x] = 1;
      for (std::uint32_t y : view[x]) blocked[y] = 1;
    }
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

std::uint32_t det_phase_count(std::uint64_t n) {
  std::uint32_t s = 0;
  while (s * s < 64 && (std::uint64_t{1} << (s * s)) < n) ++s;
  return s;
}

bool DetResult::invariant_a() const {
  for (const auto& p : log) {
    if (!mul_le(p.clusters_end, d, p.phase, n_clusters)) return false;
  }
  return true;
}

bool DetResult::invariant_c() const {
  for (const auto& p : log) {
    if (p.max_overlap > p.overlap_bound) return false;
  }
  return true;
}

std::string DetResult::invariants_json() const {
  nlohmann::json j;
  j["n_clusters"] = n_clusters;
  j["d"] = d;
  j["phases_planned"] = phases_planned;
  j["initial_overlap"] = initial_overlap;
  j["total_palette"] = total_palette;
  j["radius_growth"] = radius_growth;
  j["invariant_a"] = invariant_a();
  j["invariant_c"] = invariant_c();
  j["phases"] = nlohmann::json::array();
  for (const auto& p : log) {
    j["phases"].push_back({{"phase", p.phase},
                           {"clusters_start", p.clusters_start},
                           {"clusters_end", p.clusters_end},
                           {"high_degree", p.high_degree},
                           {"marked", p.marked},
                           {"c_star", p.c_star},
                           {"merged_into_marked", p.merged_into_marked},
                           {"colored", p.colored},
                           {"palette", p.palette},
                           {"max_radius_gk", p.max_radius_gk},
                           {"max_overlap", p.max_overlap},
                           {"overlap_bound", p.overlap_bound},
                           {"max_h_edge_load", p.max_h_edge_load},
                           {"rounds", p.rounds}});
  }
  return j.dump();
}

DetResult decompose(const Graph& g, const DetOptions& opt, const std::vector<Cluster>* init) {
  if (opt.k == 0) throw std::invalid_argument("separation k must be at least 1");
  const std::uint32_t k = opt.k;
  CommContext ctx{&g, opt.sim, opt.fast, {}};
  const std::uint32_t S = g.id_bits();

  std::vector<Cluster> live;
  if (init) {
    std::vector<char> seen(g.size(), 0);
    for (Cluster c : *init) {
      std::sort(c.members.begin(), c.members.end());
      std::sort(c.tree_edges.begin(), c.tree_edges.end());
      c.id = g.ident(c.center);
      c.color.reset();
      root_tree(g, c);
      for (Vertex v : c.members) {
        if (v >= g.size() || seen[v]) throw std::invalid_argument("initial clusters must be vertex-disjoint");
        seen[v] = 1;
      }
      live.push_back(std::move(c));
    }
    if (std::count(seen.begin(), seen.end(), 1) != static_cast<std::ptrdiff_t>(g.size())) {
      throw std::invalid_argument("initial clusters must cover every vertex");
    }
  } else {
    for (Vertex v = 0; v < g.size(); ++v) live.push_back(Cluster{g.ident(v), v, {v}, {}, 0, 0, {}});
  }
  std::sort(live.begin(), live.end(), [](const Cluster& a, const Cluster& b) { return a.id < b.id; });

  DetResult res;
  res.n_clusters = live.size();
  const std::uint32_t phases = det_phase_count(res.n_clusters);
  const std::uint64_t d = std::uint64_t{1} << phases;
  res.d = d;
  res.phases_planned = phases;
  res.initial_overlap = max_overlap(g, live);
  const std::uint64_t per_phase = 13 * d * d * d;
  auto overlap_bound = [&](std::uint32_t i) { return i * per_phase + res.initial_overlap; };
  auto cap32 = [](std::uint64_t x) { return static_cast<std::uint32_t>(std::min<std::uint64_t>(x, 0xFFFFFFFFu)); };

  std::uint64_t offset = 0;
  auto emit = [&](Cluster c, std::uint64_t color) {
    c.color = color;
    measure_radii(g, c, k);
    res.dec.clusters.push_back(std::move(c));
  };

  for (std::uint32_t i = 1; i <= phases && !live.empty(); ++i) {
    const std::size_t L = live.size();
    const std::uint64_t rounds_before = ctx.stats.rounds;
    PhaseLog lg;
    lg.phase = i;
    lg.clusters_start = L;
    const std::uint32_t cap_now = cap32(std::max<std::uint64_t>(1, overlap_bound(i - 1)));

    VirtualGraph h = learn_neighbors(ctx, live, k, d, cap_now);
    mark_high_outdegree(ctx, live, h, d);
    lg.max_h_edge_load = h.max_edge_load;

    std::vector<bool> candidate(L, false);
    std::vector<bool> unmarked(L, false);
    for (std::size_t c = 0; c < L; ++c) {
      candidate[c] = h.high[c] && !h.marked[c];
      unmarked[c] = !h.marked[c];
      lg.high_degree += h.high[c];
      lg.marked += h.marked[c];
    }

    // Maximal 2-independent set among the high-degree unmarked clusters.
    std::vector<std::uint32_t> cstar;
    if (lg.high_degree > lg.marked) {
      const std::uint64_t du = 4 * d * d + 2 * d;
      const auto sq = virtual_linial(ctx, live, candidate, h.undirected, h.undirected_routes, true, du * du);
      cstar = maximal_2_independent(h.undirected, candidate, sq.colors);
      if (!ctx.fast) {
        // Replay the color-by-color greedy to account for its notifications.
        std::vector<std::uint32_t> by_color = cstar;
        std::stable_sort(by_color.begin(), by_color.end(),
                         [&](std::uint32_t a, std::uint32_t b) { return sq.colors[a] < sq.colors[b]; });
        std::vector<char> near(L, 0);
        for (std::size_t s = 0; s < by_color.size();) {
          std::size_t e = s;
          while (e < by_color.size() && sq.colors[by_color[e]] == sq.colors[by_color[s]]) ++e;
          std::vector<Packet> first;
          std::vector<Packet> second;
          for (std::size_t t = s; t < e; ++t) {
            const std::uint32_t a = by_color[t];
            for (std::size_t j = 0; j < h.undirected[a].size(); ++j) {
              first.push_back({h.undirected_routes[a][j], 2, 0});
              const std::uint32_t x = h.undirected[a][j];
              if (near[x]) continue;
              near[x] = 1;
              for (const auto& r : h.undirected_routes[x]) second.push_back({r, 2, 0});
            }
          }
          ctx.route(first);
          ctx.route(second);
          s = e;
        }
      }
    }
    lg.c_star = cstar.size();

    // Join targets: one hop from C* joins directly, two hops through the
    // smallest-id neighbor whose target has the smallest id.
    std::vector<std::uint32_t> target(L, kNone);
    std::vector<std::uint32_t> via(L, kNone);
    std::vector<char> in_cstar(L, 0);
    for (std::uint32_t c : cstar) {
      in_cstar[c] = 1;
      target[c] = c;
    }
    for (std::uint32_t c : cstar) {
      for (std::uint32_t x : h.undirected[c]) {
        if (target[x] != kNone) throw std::logic_error("C* is not 2-independent");
        target[x] = c;
      }
    }
    std::vector<Packet> tell;
    for (std::uint32_t c : cstar) {
      for (const auto& r : h.undirected_routes[c]) tell.push_back({r, S + 2, 0});
    }
    ctx.route(tell);
    tell.clear();
    for (std::uint32_t x = 0; x < L; ++x) {
      if (target[x] == kNone || in_cstar[x]) continue;
      for (const auto& r : h.undirected_routes[x]) tell.push_back({r, S + 2, 0});
    }
    ctx.route(tell);
    for (std::uint32_t x = 0; x < L; ++x) {
      if (!unmarked[x] || target[x] != kNone) continue;
      for (std::uint32_t y : h.undirected[x]) {
        if (in_cstar[y] || target[y] == kNone || !in_cstar[target[y]]) continue;
        if (via[x] == kNone || live[target[y]].id < live[target[via[x]]].id ||
            (target[y] == target[via[x]] && y < via[x])) {
          via[x] = y;
        }
      }
    }
    for (std::uint32_t x = 0; x < L; ++x) {
      if (via[x] != kNone) target[x] = target[via[x]];
    }
    for (std::uint32_t c = 0; c < L; ++c) {
      if (candidate[c] && target[c] == kNone) throw std::logic_error("high-degree cluster left unassigned");
    }

    // C* clusters with a marked cluster within k hop over to it.
    std::vector<std::uint32_t> to_marked(L, kNone);
    std::vector<Route> to_marked_route(L);
    if (lg.marked > 0 && !cstar.empty()) {
      std::vector<FloodSource> src;
      for (std::size_t c = 0; c < L; ++c) {
        if (!h.marked[c]) continue;
        for (Vertex v : live[c].members) src.push_back({v, live[c].id, 0});
      }
      const FloodResult fl = ctx.flood(src, k, 1);
      std::vector<Cluster> cs;
      std::vector<std::vector<std::vector<Ident>>> items;
      for (std::uint32_t c : cstar) {
        cs.push_back(live[c]);
        std::vector<std::vector<Ident>> own;
        for (Vertex v : live[c].members) {
          own.push_back(fl.held[v].empty() ? std::vector<Ident>{} : std::vector<Ident>{fl.held[v][0].origin});
        }
        items.push_back(std::move(own));
      }
      auto got = ctx.gather(cs, items, 1, cap_now);
      const Climber climber(g, live);
      for (std::size_t t = 0; t < cstar.size(); ++t) {
        if (got.at_center[t].empty()) continue;
        const std::uint32_t m = index_of(live, got.at_center[t][0]);
        Route r = std::move(got.provenance[t][0]);
        follow_flood(g, fl, live[m].id, r);
        climber.climb(m, live[m].center, r);
        loop_erase(r);
        to_marked[cstar[t]] = m;
        to_marked_route[cstar[t]] = std::move(r);
        ++lg.merged_into_marked;
      }
    }

    // New clusters: every C* group and every marked cluster.
    std::vector<std::uint32_t> head(L, kNone);
    for (std::uint32_t c = 0; c < L; ++c) {
      if (h.marked[c]) head[c] = c;
    }
    for (std::uint32_t c : cstar) head[c] = to_marked[c] != kNone ? to_marked[c] : c;
    for (std::uint32_t c = 0; c < L; ++c) {
      if (target[c] != kNone && !in_cstar[c]) head[c] = head[target[c]];
    }
    std::map<std::uint32_t, std::pair<std::vector<Vertex>, std::vector<EdgeId>>> groups;
    for (std::uint32_t c = 0; c < L; ++c) {
      if (head[c] == kNone) continue;
      auto& [mem, edges] = groups[head[c]];
      mem.insert(mem.end(), live[c].members.begin(), live[c].members.end());
      edges.insert(edges.end(), live[c].tree_edges.begin(), live[c].tree_edges.end());
      if (in_cstar[c]) {
        if (to_marked[c] != kNone) add_route_edges(g, to_marked_route[c], edges);
      } else if (target[c] != kNone) {
        add_route_edges(g, route_to(h, c, via[c] != kNone ? via[c] : target[c]), edges);
      }
    }
    std::vector<Cluster> next;
    for (auto& [z, ge] : groups) {
      next.push_back(build_cluster(g, live[z].center, std::move(ge.first), std::move(ge.second)));
    }

    // Whatever is left has fewer than 2d neighbors: color it.
    std::vector<bool> residual(L, false);
    std::size_t residual_count = 0;
    for (std::size_t c = 0; c < L; ++c) {
      residual[c] = head[c] == kNone;
      if (residual[c] && h.high[c]) throw std::logic_error("high-degree cluster left for coloring");
      residual_count += residual[c];
    }
    if (residual_count > 0) {
      const auto col = virtual_linial(ctx, live, residual, h.in, h.in_routes, false, 2 * d - 1);
      if (col.palette >= (Color{1} << 62)) throw std::logic_error("residual palette too large");
      lg.palette = static_cast<std::uint64_t>(col.palette);
      for (std::size_t c = 0; c < L; ++c) {
        if (!residual[c]) continue;
        emit(live[c], offset + static_cast<std::uint64_t>(col.colors[c]));
        ++lg.colored;
      }
      offset += lg.palette;
      res.total_palette += lg.palette;
    }

    std::sort(next.begin(), next.end(), [](const Cluster& a, const Cluster& b) { return a.id < b.id; });
    for (auto& c : next) measure_radii(g, c, k);
    lg.overlap_bound = overlap_bound(i);
    lg.max_overlap = max_overlap(g, next);
    std::vector<Payload> pays;
    for (const auto& c : next) {
      Payload p;
      p.w[0] = static_cast<std::uint64_t>(c.id);
      p.w[1] = static_cast<std::uint64_t>(c.id >> 64);
      pays.push_back(p);
    }
    ctx.broadcast(next, pays, S, cap32(std::max<std::uint64_t>(1, lg.overlap_bound)));

    live = std::move(next);
    lg.clusters_end = live.size();
    for (const auto& c : live) lg.max_radius_gk = std::max(lg.max_radius_gk, c.radius_gk);
    lg.rounds = ctx.stats.rounds - rounds_before;
    res.log.push_back(lg);
    if (lg.max_radius_gk > 1) {
      res.radius_growth = std::max(res.radius_growth, std::pow(static_cast<double>(lg.max_radius_gk), 1.0 / i));
    }
    if (!mul_le(lg.clusters_end, d, i, res.n_clusters) || lg.max_overlap > lg.overlap_bound) {
      throw std::logic_error("decomposition invariant violated: " + res.invariants_json());
    }
  }
  if (live.size() > 1) throw std::logic_error("more than one cluster left after the last phase: " + res.invariants_json());
  if (live.size() == 1) {
    emit(std::move(live[0]), offset);
    res.total_palette += 1;
  }

  res.dec.k = k;
  res.stats = ctx.stats;
  res.cluster_of.assign(g.size(), 0);
  for (std::uint32_t i = 0; i < res.dec.clusters.size(); ++i) {
    for (Vertex v : res.dec.clusters[i].members) res.cluster_of[v] = i;
  }
  return res;
}

}  // namespace netdecomp
