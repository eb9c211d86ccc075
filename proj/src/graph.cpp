#include "netdecomp/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <set>

#include "netdecomp/rng.hpp"

namespace netdecomp {

std::string ident_to_string(Ident x) {
  if (x == 0) return "0";
  std::string s;
  while (x > 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(x % 10)));
    x /= 10;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

Ident ident_from_string(const std::string& s) {
  if (s.empty()) throw GraphError("empty identifier");
  Ident x = 0;
  const Ident max = ~Ident{0};
  for (char c : s) {
    if (c < '0' || c > '9') throw GraphError("identifier is not a decimal integer: " + s);
    const auto digit = static_cast<unsigned>(c - '0');
    if (x > (max - digit) / 10) throw GraphError("identifier exceeds 128 bits: " + s);
    x = x * 10 + digit;
  }
  return x;
}

unsigned bit_length(Ident x) {
  unsigned bits = 0;
  while (x > 0) {
    ++bits;
    x >>= 1;
  }
  return std::max(bits, 1u);
}

std::string Rational::to_string() const {
  if (den == 1) return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(den);
}

Graph Graph::from_edges(std::size_t n, std::vector<Edge> edges,
                        std::optional<std::vector<Rational>> weights,
                        std::vector<Ident> idents) {
  if (weights && weights->size() != edges.size()) {
    throw GraphError("weight count does not match edge count");
  }
  if (!idents.empty() && idents.size() != n) throw GraphError("identifier count does not match n");

  std::vector<std::size_t> order(edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    auto& e = edges[i];
    if (e.u >= n || e.v >= n) {
      throw GraphError("edge endpoint out of range: " + std::to_string(e.u) + " " + std::to_string(e.v));
    }
    if (e.u == e.v) throw GraphError("self-loop at node " + std::to_string(e.u));
    if (e.u > e.v) std::swap(e.u, e.v);
    order[i] = i;
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return edges[a] < edges[b]; });
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (edges[order[i]] == edges[order[i - 1]]) {
      const auto& e = edges[order[i]];
      throw GraphError("duplicate edge " + std::to_string(e.u) + " " + std::to_string(e.v));
    }
  }

  Graph g;
  g.edges_.reserve(edges.size());
  for (auto i : order) g.edges_.push_back(edges[i]);
  if (weights) {
    g.weights_.reserve(edges.size());
    for (auto i : order) {
      const Rational& w = (*weights)[i];
      if (w.den <= 0 || w.num <= 0) throw GraphError("weights must be strictly positive: " + w.to_string());
      g.weights_.push_back(w);
    }
    std::vector<std::size_t> by_weight(g.weights_.size());
    std::iota(by_weight.begin(), by_weight.end(), 0);
    std::sort(by_weight.begin(), by_weight.end(),
              [&](std::size_t a, std::size_t b) { return g.weights_[a] < g.weights_[b]; });
    for (std::size_t i = 1; i < by_weight.size(); ++i) {
      if (g.weights_[by_weight[i]] == g.weights_[by_weight[i - 1]]) {
        throw GraphError("duplicate weight " + g.weights_[by_weight[i]].to_string());
      }
    }
  }

  std::vector<std::size_t> deg(n, 0);
  for (const auto& e : g.edges_) {
    ++deg[e.u];
    ++deg[e.v];
  }
  g.offsets_.assign(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) g.offsets_[v + 1] = g.offsets_[v] + deg[v];
  g.adj_.resize(g.offsets_[n]);
  g.adj_edge_.resize(g.offsets_[n]);
  g.rev_port_.resize(g.offsets_[n]);
  std::vector<std::size_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
  // Edges are sorted by (u, v) so each adjacency list comes out sorted once
  // both directions are inserted in two passes.
  for (EdgeId id = 0; id < g.edges_.size(); ++id) {
    const auto& e = g.edges_[id];
    g.adj_[fill[e.v]] = e.u;
    g.adj_edge_[fill[e.v]++] = id;
  }
  for (EdgeId id = 0; id < g.edges_.size(); ++id) {
    const auto& e = g.edges_[id];
    g.adj_[fill[e.u]] = e.v;
    g.adj_edge_[fill[e.u]++] = id;
  }
  for (std::size_t v = 0; v < n; ++v) {
    // Lower neighbors were inserted first, in increasing order, then higher ones.
    g.max_degree_ = std::max(g.max_degree_, deg[v]);
  }
  for (Vertex v = 0; v < n; ++v) {
    for (std::size_t p = 0; p < g.degree(v); ++p) {
      const Vertex u = g.adj_[g.offsets_[v] + p];
      g.rev_port_[g.offsets_[v] + p] = *g.port_of(u, v);
    }
  }

  g.idents_ = std::move(idents);
  Ident max_id = n == 0 ? 0 : static_cast<Ident>(n - 1);
  if (!g.idents_.empty()) {
    std::vector<Ident> sorted = g.idents_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw GraphError("identifiers must be distinct");
    }
    max_id = sorted.empty() ? 0 : sorted.back();
  }
  g.id_bits_ = bit_length(max_id);
  return g;
}

std::optional<std::uint32_t> Graph::port_of(Vertex v, Vertex to) const {
  const auto nb = neighbors(v);
  const auto it = std::lower_bound(nb.begin(), nb.end(), to);
  if (it == nb.end() || *it != to) return std::nullopt;
  return static_cast<std::uint32_t>(it - nb.begin());
}

std::optional<EdgeId> Graph::find_edge(Vertex u, Vertex v) const {
  if (u >= size() || v >= size()) return std::nullopt;
  const auto p = port_of(u, v);
  if (!p) return std::nullopt;
  return port_edge(u, *p);
}

Graph Graph::with_identifiers(std::vector<Ident> idents) const {
  std::optional<std::vector<Rational>> w;
  if (weighted()) w = weights_;
  return from_edges(size(), edges_, std::move(w), std::move(idents));
}

Graph Graph::induced(std::span<const Vertex> keep) const {
  std::vector<std::uint32_t> index(size(), kUnreached);
  for (std::size_t i = 0; i < keep.size(); ++i) index[keep[i]] = static_cast<std::uint32_t>(i);
  std::vector<Edge> edges;
  std::vector<Rational> w;
  for (EdgeId id = 0; id < edges_.size(); ++id) {
    const auto& e = edges_[id];
    if (index[e.u] == kUnreached || index[e.v] == kUnreached) continue;
    edges.push_back({index[e.u], index[e.v]});
    if (weighted()) w.push_back(weights_[id]);
  }
  std::vector<Ident> ids(keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i) ids[i] = ident(keep[i]);
  std::optional<std::vector<Rational>> wopt;
  if (weighted()) wopt = std::move(w);
  return from_edges(keep.size(), std::move(edges), std::move(wopt), std::move(ids));
}

// ---------------------------------------------------------------------------

namespace {

Graph relabel_largest_component(const Graph& g) {
  std::uint32_t count = 0;
  const auto comp = connected_components(g, &count);
  if (count <= 1) return g;
  std::vector<std::size_t> sizes(count, 0);
  for (auto c : comp) ++sizes[c];
  const auto best = static_cast<std::uint32_t>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
  std::vector<Vertex> keep;
  for (Vertex v = 0; v < g.size(); ++v) {
    if (comp[v] == best) keep.push_back(v);
  }
  // Drop custom identifiers: the kept component is renumbered 0..n'-1.
  const Graph sub = g.induced(keep);
  std::optional<std::vector<Rational>> w;
  if (sub.weighted()) w = sub.weights();
  return Graph::from_edges(sub.size(), sub.edges(), std::move(w));
}

std::vector<Rational> distinct_weights(std::size_t m, Stream& rng) {
  std::vector<std::int64_t> perm(m);
  std::iota(perm.begin(), perm.end(), 1);
  for (std::size_t i = m; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
  std::vector<Rational> w(m);
  for (std::size_t i = 0; i < m; ++i) w[i] = Rational{perm[i], 1};
  return w;
}

}  // namespace

GraphModel parse_model(const std::string& name) {
  if (name == "gnp") return GraphModel::kGnp;
  if (name == "grid") return GraphModel::kGrid;
  if (name == "path") return GraphModel::kPath;
  if (name == "tree") return GraphModel::kTree;
  if (name == "clique") return GraphModel::kClique;
  throw GraphError("unknown graph model: " + name);
}

Graph generate_graph(GraphModel model, const GenParams& params, std::uint64_t seed) {
  Stream rng(seed, 0x67656e, 0);
  std::vector<Edge> edges;
  std::size_t n = params.n;
  switch (model) {
    case GraphModel::kGnp: {
      if (n < 1) throw GraphError("gnp needs n >= 1");
      if (!(params.p >= 0.0 && params.p <= 1.0)) throw GraphError("gnp needs p in [0,1]");
      if (params.p >= 1.0) {
        for (Vertex u = 0; u < n; ++u)
          for (Vertex v = u + 1; v < n; ++v) edges.push_back({u, v});
        break;
      }
      if (params.p <= 0.0) break;
      // Geometric skipping over the upper triangle (Batagelj-Brandes).
      const double log_q = std::log1p(-params.p);
      std::int64_t v = 1;
      std::int64_t w = -1;
      const auto nn = static_cast<std::int64_t>(n);
      while (v < nn) {
        const double r = rng.uniform_open0();
        w += 1 + static_cast<std::int64_t>(std::floor(std::log(r) / log_q));
        while (w >= v && v < nn) {
          w -= v;
          ++v;
        }
        if (v < nn) edges.push_back({static_cast<Vertex>(w), static_cast<Vertex>(v)});
      }
      break;
    }
    case GraphModel::kGrid: {
      if (params.rows < 1 || params.cols < 1) throw GraphError("grid needs rows, cols >= 1");
      n = params.rows * params.cols;
      for (std::size_t r = 0; r < params.rows; ++r) {
        for (std::size_t c = 0; c < params.cols; ++c) {
          const auto v = static_cast<Vertex>(r * params.cols + c);
          if (c + 1 < params.cols) edges.push_back({v, v + 1});
          if (r + 1 < params.rows) edges.push_back({v, static_cast<Vertex>(v + params.cols)});
        }
      }
      break;
    }
    case GraphModel::kPath:
      if (n < 1) throw GraphError("path needs n >= 1");
      for (Vertex v = 0; v + 1 < n; ++v) edges.push_back({v, v + 1});
      break;
    case GraphModel::kTree:
      if (n < 1) throw GraphError("tree needs n >= 1");
      for (Vertex v = 1; v < n; ++v) edges.push_back({static_cast<Vertex>(rng.below(v)), v});
      break;
    case GraphModel::kClique:
      if (n < 1) throw GraphError("clique needs n >= 1");
      for (Vertex u = 0; u < n; ++u)
        for (Vertex v = u + 1; v < n; ++v) edges.push_back({u, v});
      break;
  }
  std::optional<std::vector<Rational>> weights;
  if (params.weighted) weights = distinct_weights(edges.size(), rng);
  Graph g = Graph::from_edges(n, std::move(edges), std::move(weights));
  if (model == GraphModel::kGnp && params.largest_component) g = relabel_largest_component(g);
  return g;
}

// ---------------------------------------------------------------------------

DistanceMap bfs_distances(const Graph& g, Vertex source, std::optional<std::uint32_t> cap) {
  if (source >= g.size()) throw GraphError("unknown source " + std::to_string(source));
  DistanceMap out;
  out.source = source;
  out.cap = cap;
  const Vertex src[1] = {source};
  out.dist = multi_bfs(g, src, cap);
  return out;
}

std::vector<std::uint32_t> multi_bfs(const Graph& g, std::span<const Vertex> sources,
                                     std::optional<std::uint32_t> cap) {
  std::vector<std::uint32_t> dist(g.size(), kUnreached);
  std::vector<Vertex> frontier;
  for (auto s : sources) {
    if (dist[s] != 0) {
      dist[s] = 0;
      frontier.push_back(s);
    }
  }
  std::vector<Vertex> next;
  std::uint32_t level = 0;
  while (!frontier.empty()) {
    if (cap && level >= *cap) break;
    next.clear();
    for (auto v : frontier) {
      for (auto u : g.neighbors(v)) {
        if (dist[u] == kUnreached) {
          dist[u] = level + 1;
          next.push_back(u);
        }
      }
    }
    ++level;
    frontier.swap(next);
  }
  return dist;
}

Graph power_graph(const Graph& g, std::uint32_t k) {
  if (k < 1) throw GraphError("power_graph needs k >= 1");
  if (k == 1) return g;
  std::vector<Edge> edges;
  for (Vertex s = 0; s < g.size(); ++s) {
    const auto dm = bfs_distances(g, s, k);
    for (Vertex v = s + 1; v < g.size(); ++v) {
      if (dm.reached(v)) edges.push_back({s, v});
    }
  }
  std::vector<Ident> ids;
  if (g.has_custom_idents()) {
    for (Vertex v = 0; v < g.size(); ++v) ids.push_back(g.ident(v));
  }
  return Graph::from_edges(g.size(), std::move(edges), std::nullopt, std::move(ids));
}

std::uint32_t log_star(Ident x) {
  std::uint32_t count = 0;
  // Iterate ceil(log2) until the value drops to <= 1; exact on integers.
  while (x > 1) {
    unsigned b = 0;
    Ident y = x - 1;
    while (y > 0) {
      ++b;
      y >>= 1;
    }
    x = b;
    ++count;
  }
  return count;
}

unsigned ceil_log2(std::uint64_t x) {
  unsigned b = 0;
  std::uint64_t y = x > 0 ? x - 1 : 0;
  while (y > 0) {
    ++b;
    y >>= 1;
  }
  return b;
}

std::vector<std::uint32_t> connected_components(const Graph& g, std::uint32_t* count) {
  std::vector<std::uint32_t> comp(g.size(), kUnreached);
  std::uint32_t c = 0;
  std::vector<Vertex> stack;
  for (Vertex s = 0; s < g.size(); ++s) {
    if (comp[s] != kUnreached) continue;
    comp[s] = c;
    stack.push_back(s);
    while (!stack.empty()) {
      const Vertex v = stack.back();
      stack.pop_back();
      for (auto u : g.neighbors(v)) {
        if (comp[u] == kUnreached) {
          comp[u] = c;
          stack.push_back(u);
        }
      }
    }
    ++c;
  }
  if (count) *count = c;
  return comp;
}

}  // namespace netdecomp
