#pragma once

// Immutable communication network plus the centralized distance oracles that
// every validator in the library is built on.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace netdecomp {

using Vertex = std::uint32_t;
using EdgeId = std::uint32_t;
/// Node identifiers may use up to 128 bits.
using Ident = unsigned __int128;

inline constexpr std::uint32_t kUnreached = std::numeric_limits<std::uint32_t>::max();

std::string ident_to_string(Ident x);
Ident ident_from_string(const std::string& s);
/// Number of bits needed to write x (0 -> 1).
unsigned bit_length(Ident x);

/// Exact positive rational weight. Ordering is by value.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  friend bool operator==(const Rational& a, const Rational& b) {
    return static_cast<__int128>(a.num) * b.den == static_cast<__int128>(b.num) * a.den;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const __int128 l = static_cast<__int128>(a.num) * b.den;
    const __int128 r = static_cast<__int128>(b.num) * a.den;
    if (l < r) return std::strong_ordering::less;
    if (l > r) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }
  std::string to_string() const;
};

struct Edge {
  Vertex u = 0;
  Vertex v = 0;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Graph {
 public:
  Graph() = default;

  /// Builds a graph; rejects self-loops, duplicates, out-of-range endpoints,
  /// non-positive or repeated weights. Edges are stored with u < v.
  static Graph from_edges(std::size_t n, std::vector<Edge> edges,
                          std::optional<std::vector<Rational>> weights = std::nullopt,
                          std::vector<Ident> idents = {});

  std::size_t size() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t edge_count() const { return edges_.size(); }
  std::size_t degree(Vertex v) const { return offsets_[v + 1] - offsets_[v]; }
  std::size_t max_degree() const { return max_degree_; }

  std::span<const Vertex> neighbors(Vertex v) const {
    return {adj_.data() + offsets_[v], degree(v)};
  }
  /// Edge id behind port `port` of v.
  EdgeId port_edge(Vertex v, std::size_t port) const { return adj_edge_[offsets_[v] + port]; }
  /// Port on the far side that leads back to v.
  std::uint32_t reverse_port(Vertex v, std::size_t port) const { return rev_port_[offsets_[v] + port]; }
  std::size_t port_base(Vertex v) const { return offsets_[v]; }
  std::optional<std::uint32_t> port_of(Vertex v, Vertex to) const;
  std::optional<EdgeId> find_edge(Vertex u, Vertex v) const;

  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(EdgeId e) const { return edges_[e]; }

  bool weighted() const { return !weights_.empty(); }
  const Rational& weight(EdgeId e) const { return weights_.at(e); }
  const std::vector<Rational>& weights() const { return weights_; }

  Ident ident(Vertex v) const { return idents_.empty() ? Ident{v} : idents_[v]; }
  unsigned id_bits() const { return id_bits_; }
  bool has_custom_idents() const { return !idents_.empty(); }

  /// Same topology, new identifiers (must be distinct).
  Graph with_identifiers(std::vector<Ident> idents) const;
  /// Induced subgraph on `keep` (any order); vertex i of the result is keep[i].
  Graph induced(std::span<const Vertex> keep) const;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<Vertex> adj_;
  std::vector<EdgeId> adj_edge_;
  std::vector<std::uint32_t> rev_port_;
  std::vector<Edge> edges_;
  std::vector<Rational> weights_;
  std::vector<Ident> idents_;
  std::size_t max_degree_ = 0;
  unsigned id_bits_ = 1;
};

// ---------------------------------------------------------------------------
// Ingestion and generation

enum class GraphFormat { kEdgeList, kJson };

Graph load_graph(const std::string& path, GraphFormat format);
Graph parse_edge_list(const std::string& text);
Graph parse_graph_json(const std::string& text);
std::string graph_to_json(const Graph& g);
std::string graph_to_edge_list(const Graph& g);

enum class GraphModel { kGnp, kGrid, kPath, kTree, kClique };

struct GenParams {
  std::size_t n = 0;
  double p = 0.0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  bool largest_component = false;
  bool weighted = false;
};

Graph generate_graph(GraphModel model, const GenParams& params, std::uint64_t seed);
GraphModel parse_model(const std::string& name);

// ---------------------------------------------------------------------------
// Oracles

struct DistanceMap {
  Vertex source = 0;
  std::optional<std::uint32_t> cap;
  /// kUnreached for vertices farther than cap or disconnected.
  std::vector<std::uint32_t> dist;

  std::uint32_t at(Vertex v) const { return dist[v]; }
  bool reached(Vertex v) const { return dist[v] != kUnreached; }
};

DistanceMap bfs_distances(const Graph& g, Vertex source,
                          std::optional<std::uint32_t> cap = std::nullopt);

/// Multi-source BFS; dist to the nearest source.
std::vector<std::uint32_t> multi_bfs(const Graph& g, std::span<const Vertex> sources,
                                     std::optional<std::uint32_t> cap = std::nullopt);

Graph power_graph(const Graph& g, std::uint32_t k);

std::uint32_t log_star(Ident x);
/// ceil(log2 x) for x >= 1.
unsigned ceil_log2(std::uint64_t x);

/// Connected components: label per vertex, labels 0..c-1 in order of first vertex.
std::vector<std::uint32_t> connected_components(const Graph& g, std::uint32_t* count = nullptr);

}  // namespace netdecomp
