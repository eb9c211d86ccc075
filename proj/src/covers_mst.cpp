#include "netdecomp/covers_mst.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "json.hpp"
#include "netdecomp/netdecomp_det.hpp"
#include "netdecomp/primitives.hpp"

namespace netdecomp {
namespace {

using nlohmann::json;

struct UnionFind {
  std::vector<std::uint32_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0u); }
  std::uint32_t find(std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
};

std::vector<EdgeId> by_weight(const Graph& g) {
  std::vector<EdgeId> order(g.edge_count());
  std::iota(order.begin(), order.end(), EdgeId{0});
  std::sort(order.begin(), order.end(), [&](EdgeId a, EdgeId b) { return g.weight(a) < g.weight(b); });
  return order;
}

void require_weighted(const Graph& g) {
  if (!g.weighted()) throw std::invalid_argument("graph has no edge weights");
}

}  // namespace

NeighborhoodCover cover_from_decomposition(const Graph& g, std::uint32_t k, const Decomposition& dec) {
  if (k == 0) throw std::invalid_argument("cover radius must be positive");
  if (dec.k < 2 * k)
    throw std::invalid_argument("decomposition separation " + std::to_string(dec.k) + " is below 2k = " +
                                std::to_string(2 * k));
  const std::size_t n = g.size();
  NeighborhoodCover cover;
  cover.k = k;
  std::map<std::uint64_t, std::vector<std::uint32_t>> by_color;
  std::uint32_t din = 0;
  for (std::uint32_t i = 0; i < dec.clusters.size(); ++i) {
    const auto& c = dec.clusters[i];
    by_color[c.color.value_or(0)].push_back(i);
    din = std::max(din, tree_diameter(g, c.tree_edges, c.center));
  }
  cover.s = static_cast<std::uint32_t>(by_color.size());
  cover.d = din + 2 * k;

  std::vector<std::uint32_t> dist(n), owner(n), seen(n, kUnreached);
  std::vector<EdgeId> via(n);
  std::uint32_t stamp = 0;
  for (const auto& [color, idx] : by_color) {
    // Multi-source BFS from every cluster of this color, k hops.
    ++stamp;
    std::vector<Vertex> q;
    for (auto i : idx) {
      for (Vertex v : dec.clusters[i].members) {
        if (seen[v] == stamp) throw std::invalid_argument("same-color clusters overlap");
        seen[v] = stamp;
        dist[v] = 0;
        owner[v] = i;
        q.push_back(v);
      }
    }
    for (std::size_t j = 0; j < q.size(); ++j) {
      const Vertex v = q[j];
      if (dist[v] == k) continue;
      const auto nb = g.neighbors(v);
      for (std::size_t p = 0; p < nb.size(); ++p) {
        const Vertex u = nb[p];
        if (seen[u] == stamp) {
          if (owner[u] != owner[v])
            throw std::invalid_argument("same-color clusters closer than 2k + 1 = " + std::to_string(2 * k + 1));
          continue;
        }
        seen[u] = stamp;
        dist[u] = dist[v] + 1;
        owner[u] = owner[v];
        via[u] = g.port_edge(v, p);
        q.push_back(u);
      }
    }
    std::vector<std::vector<Vertex>> grown(idx.size());
    std::map<std::uint32_t, std::size_t> slot;
    for (std::size_t s = 0; s < idx.size(); ++s) slot[idx[s]] = s;
    for (Vertex v : q) grown[slot[owner[v]]].push_back(v);

    for (std::size_t s = 0; s < idx.size(); ++s) {
      const Cluster& c = dec.clusters[idx[s]];
      Cluster out;
      out.id = c.id;
      out.center = c.center;
      out.color = color;
      out.tree_edges = c.tree_edges;
      std::vector<Vertex> tree_nodes;
      for (EdgeId e : c.tree_edges) {
        tree_nodes.push_back(g.edge(e).u);
        tree_nodes.push_back(g.edge(e).v);
      }
      std::sort(tree_nodes.begin(), tree_nodes.end());
      for (Vertex v : grown[s]) {
        if (dist[v] > 0 && !std::binary_search(tree_nodes.begin(), tree_nodes.end(), v))
          out.tree_edges.push_back(via[v]);
      }
      out.members = std::move(grown[s]);
      out.members.insert(out.members.end(), tree_nodes.begin(), tree_nodes.end());
      std::sort(out.members.begin(), out.members.end());
      out.members.erase(std::unique(out.members.begin(), out.members.end()), out.members.end());
      std::sort(out.tree_edges.begin(), out.tree_edges.end());
      cover.clusters.push_back(std::move(out));
    }
  }
  return cover;
}

std::vector<EdgeId> kruskal_oracle(const Graph& g) {
  require_weighted(g);
  UnionFind uf(g.size());
  std::vector<EdgeId> out;
  for (EdgeId e : by_weight(g))
    if (uf.unite(g.edge(e).u, g.edge(e).v)) out.push_back(e);
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<std::uint32_t> mst_radius(const Graph& g, std::uint32_t cycle_cap) {
  require_weighted(g);
  std::uint32_t comps = 0;
  connected_components(g, &comps);
  if (g.size() > 0 && comps != 1) throw std::invalid_argument("graph is disconnected");
  const auto mst = kruskal_oracle(g);
  std::vector<bool> in_mst(g.edge_count(), false);
  for (EdgeId e : mst) in_mst[e] = true;
  std::uint32_t mu = 0;
  std::vector<std::uint32_t> dist(g.size(), kUnreached);
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    if (in_mst[e]) continue;
    const auto& w = g.weight(e);
    const Vertex s = g.edge(e).u, t = g.edge(e).v;
    std::fill(dist.begin(), dist.end(), kUnreached);
    std::vector<Vertex> q{s};
    dist[s] = 0;
    for (std::size_t j = 0; j < q.size() && dist[t] == kUnreached; ++j) {
      const Vertex v = q[j];
      const auto nb = g.neighbors(v);
      for (std::size_t p = 0; p < nb.size(); ++p) {
        if (dist[nb[p]] != kUnreached || !(g.weight(g.port_edge(v, p)) < w)) continue;
        dist[nb[p]] = dist[v] + 1;
        q.push_back(nb[p]);
      }
    }
    const std::uint32_t len = dist[t] + 1;
    if (len > cycle_cap) return std::nullopt;
    mu = std::max(mu, len);
  }
  return mu;
}

MstResult cover_mst(const Graph& g, std::uint32_t mu, const MstOptions& opt) {
  require_weighted(g);
  MstResult res;
  res.mu = mu;
  const std::uint32_t k = std::max<std::uint32_t>(mu, 1);
  DetOptions dopt;
  dopt.k = 2 * k;
  dopt.fast = opt.fast;
  dopt.sim = opt.sim;
  const auto det = decompose(g, dopt);
  res.stats = det.stats;
  res.cover = cover_from_decomposition(g, k, det.dec);
  // Expansion: k rounds of cluster-id flooding per color.
  RoundStats grow;
  grow.rounds = static_cast<std::uint64_t>(k) * res.cover.s;
  grow.max_bits_per_edge_round = g.id_bits();
  res.stats.append(grow);

  const std::size_t m = g.edge_count();
  std::vector<std::uint8_t> covered(m, 0), excluded(m, 0);
  std::map<std::uint64_t, std::uint64_t> color_cost;
  for (const auto& c : res.cover.clusters) {
    const Graph sub = g.induced(c.members);
    std::vector<EdgeId> local = sub.edge_count() ? kruskal_oracle(sub) : std::vector<EdgeId>{};
    std::vector<bool> in_local(sub.edge_count(), false);
    for (EdgeId e : local) in_local[e] = true;
    std::vector<EdgeId> mapped;
    for (EdgeId e = 0; e < sub.edge_count(); ++e) {
      const auto& se = sub.edge(e);
      const EdgeId ge = *g.find_edge(c.members[se.u], c.members[se.v]);
      covered[ge] = 1;
      if (in_local[e]) mapped.push_back(ge);
      else excluded[ge] = 1;
    }
    std::sort(mapped.begin(), mapped.end());
    res.cluster_mst.push_back(std::move(mapped));
    const auto size = static_cast<std::uint64_t>(c.members.size());
    const std::uint64_t cost = tree_diameter(g, c.tree_edges, c.center) +
                               static_cast<std::uint64_t>(std::ceil(std::sqrt(static_cast<double>(size)))) *
                                   std::max<std::uint32_t>(log_star(size), 1);
    auto& slot = color_cost[c.color.value_or(0)];
    slot = std::max(slot, cost);
  }
  for (const auto& [color, cost] : color_cost) res.modeled_cluster_mst_rounds += cost;

  res.rule.resize(m);
  for (EdgeId e = 0; e < m; ++e) {
    if (!covered[e]) throw std::runtime_error("edge " + std::to_string(e) + " lies in no cover cluster");
    res.rule[e] = excluded[e] ? EdgeRule::kExcluded : EdgeRule::kIncluded;
    if (!excluded[e]) res.tree_edges.push_back(e);
  }

  const auto truth = kruskal_oracle(g);
  res.matches_oracle = truth == res.tree_edges;
  std::vector<bool> in_truth(m, false);
  for (EdgeId e : truth) in_truth[e] = true;
  res.sound = true;
  for (EdgeId e = 0; e < m; ++e) {
    // Non-MST edges must be dropped somewhere; MST edges nowhere.
    if (in_truth[e] == static_cast<bool>(excluded[e])) res.sound = false;
  }
  return res;
}

std::string MstResult::to_json(const Graph& g) const {
  json j;
  j["mu"] = mu;
  j["k"] = cover.k;
  j["tree_edges"] = json::array();
  for (EdgeId e : tree_edges) j["tree_edges"].push_back({g.edge(e).u, g.edge(e).v});
  std::size_t excluded = 0;
  for (auto r : rule) excluded += r == EdgeRule::kExcluded;
  j["rule_a_excluded"] = excluded;
  j["rule_b_included"] = rule.size() - excluded;
  j["cover"] = {{"clusters", cover.clusters.size()}, {"s", cover.s}, {"d", cover.d}};
  j["sound"] = sound;
  j["matches_oracle"] = matches_oracle;
  j["stats"] = json::parse(stats.to_json());
  j["modeled_cluster_mst_rounds"] = modeled_cluster_mst_rounds;
  return j.dump();
}

}  // namespace netdecomp
