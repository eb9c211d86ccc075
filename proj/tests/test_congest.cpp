#include "doctest.h"
#include "netdecomp/congest.hpp"
#include "netdecomp/rng.hpp"

using namespace netdecomp;

namespace {

// Sends its identifier once, echoes the first identifier it hears, then stops.
class Handshake : public NodeProgram {
 public:
  explicit Handshake(std::size_t n) : heard(n, 0), echoes(n, 0) {}
  void init(Vertex, const LocalView& view, Outbox& out) override {
    Message m;
    m.tag = 0;
    m.bits = view.id_bits + 1;
    m.words[0] = static_cast<std::uint64_t>(view.id);
    out.broadcast(m);
  }
  void step(Vertex v, const LocalView& view, std::uint64_t, std::span<const Incoming> inbox, Outbox& out) override {
    for (const auto& in : inbox) {
      if (in.msg.tag == 0) {
        heard[v] = in.msg.words[0];
        Message m;
        m.tag = 1;
        m.bits = view.id_bits + 1;
        m.words[0] = in.msg.words[0];
        out.send(in.port, m);
      } else {
        ++echoes[v];
      }
    }
  }
  std::vector<std::uint64_t> heard;
  std::vector<std::uint64_t> echoes;
};

// Propagates the maximum of per-node random draws for r rounds.
class MaxFlood : public NodeProgram {
 public:
  MaxFlood(std::size_t n, std::uint64_t seed, std::uint64_t r, std::uint32_t bits)
      : value(n), r_(r), bits_(bits) {
    for (Vertex v = 0; v < n; ++v) value[v] = Stream(seed, v, 0).next();
  }
  void init(Vertex v, const LocalView&, Outbox& out) override {
    if (r_ > 0) send(v, out);
  }
  void step(Vertex v, const LocalView&, std::uint64_t round, std::span<const Incoming> inbox, Outbox& out) override {
    for (const auto& in : inbox) value[v] = std::max(value[v], in.msg.words[0]);
    if (round < r_) send(v, out);
  }
  std::vector<std::uint64_t> value;

 private:
  void send(Vertex v, Outbox& out) {
    Message m;
    m.bits = bits_;
    m.words[0] = value[v];
    out.broadcast(m);
  }
  std::uint64_t r_;
  std::uint32_t bits_;
};

// Sends a variable-size message so the true maximum can be recounted.
class VariableWidth : public NodeProgram {
 public:
  explicit VariableWidth(std::uint64_t seed) : seed_(seed) {}
  void init(Vertex v, const LocalView& view, Outbox& out) override { emit(v, view, 0, out); }
  void step(Vertex v, const LocalView& view, std::uint64_t round, std::span<const Incoming>, Outbox& out) override {
    if (round < 5) emit(v, view, round, out);
  }
  std::uint32_t true_max = 0;
  std::uint64_t sent = 0;

 private:
  void emit(Vertex v, const LocalView& view, std::uint64_t round, Outbox& out) {
    Stream s(seed_, v, round);
    for (std::uint32_t p = 0; p < view.degree; ++p) {
      Message m;
      m.bits = 1 + static_cast<std::uint32_t>(s.below(200));
      true_max = std::max(true_max, m.bits);
      ++sent;
      out.send(p, m);
    }
  }
  std::uint64_t seed_;
};

}  // namespace

TEST_CASE("two-node handshake") {
  const Graph p2 = generate_graph(GraphModel::kPath, {.n = 2}, 0);
  Handshake h(2);
  const auto stats = run_program(p2, h, {});
  CHECK(stats.rounds == 2);
  CHECK(stats.max_bits_per_edge_round == p2.id_bits() + 1);
  CHECK(stats.total_messages == 4);
  CHECK(h.heard[0] == 1);
  CHECK(h.heard[1] == 0);
  CHECK(h.echoes[0] == 1);
}

TEST_CASE("clique sends one message per directed edge") {
  const Graph k4 = generate_graph(GraphModel::kClique, {.n = 4}, 0);
  Handshake h(4);
  std::uint64_t first_round = 0;
  RoundStats stats;
  Engine e(k4, {});
  // Round 1 carries the identifiers only; the observer runs after the
  // nodes consume round 1.
  std::uint64_t echoes_after_round1 = 0;
  stats = e.run(h, [&](std::uint64_t r) {
    if (r == 1) {
      for (auto x : h.echoes) echoes_after_round1 += x;
      first_round = r;
    }
  });
  CHECK(first_round == 1);
  CHECK(echoes_after_round1 == 0);
  CHECK(stats.total_messages == 12 + 4 * 3);

  class SendOnce : public NodeProgram {
   public:
    void init(Vertex, const LocalView& view, Outbox& out) override {
      Message m;
      m.bits = view.id_bits;
      out.broadcast(m);
    }
    void step(Vertex, const LocalView&, std::uint64_t, std::span<const Incoming>, Outbox&) override {}
  };
  SendOnce once;
  const auto s1 = run_program(k4, once, {});
  CHECK(s1.rounds == 1);
  CHECK(s1.total_messages == 12);
}

TEST_CASE("budget enforcement") {
  const Graph p2 = generate_graph(GraphModel::kPath, {.n = 2}, 0).with_identifiers({1000, 2000});
  class TwoIds : public NodeProgram {
   public:
    void init(Vertex, const LocalView& view, Outbox& out) override {
      Message m;
      m.bits = 2 * view.id_bits + 1;
      out.broadcast(m);
    }
    void step(Vertex, const LocalView&, std::uint64_t, std::span<const Incoming>, Outbox&) override {}
  };
  TwoIds prog;
  SimConfig strict{.msg_bits = p2.id_bits() + 8, .strict = true};
  CHECK_THROWS_AS(run_program(p2, prog, strict), BudgetError);
  SimConfig lax = strict;
  lax.strict = false;
  const auto stats = run_program(p2, prog, lax);
  REQUIRE(stats.budget_violations.size() == 2);
  CHECK(stats.budget_violations[0].round == 1);
  CHECK_THROWS_AS(Engine(p2, SimConfig{.msg_bits = 3}), std::invalid_argument);
  CHECK(default_msg_bits(10) == 62);
  CHECK(default_msg_bits(128) == 512);
}

TEST_CASE("round limit and double sends are errors") {
  const Graph p2 = generate_graph(GraphModel::kPath, {.n = 2}, 0);
  class Forever : public NodeProgram {
   public:
    void init(Vertex, const LocalView&, Outbox& out) override { out.wake(); }
    void step(Vertex, const LocalView&, std::uint64_t, std::span<const Incoming>, Outbox& out) override {
      out.wake();
    }
  };
  Forever f;
  CHECK_THROWS_AS(run_program(p2, f, SimConfig{.max_rounds = 10}), RoundLimitError);

  class Twice : public NodeProgram {
   public:
    void init(Vertex, const LocalView&, Outbox& out) override {
      Message m;
      m.bits = 1;
      out.send(0, m);
      out.send(0, m);
    }
    void step(Vertex, const LocalView&, std::uint64_t, std::span<const Incoming>, Outbox&) override {}
  };
  Twice t;
  CHECK_THROWS_AS(run_program(p2, t, {}), std::logic_error);
}

TEST_CASE("determinism over seeds and thread counts") {
  const Graph g = generate_graph(GraphModel::kGnp, {.n = 3000, .p = 0.002}, 5);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    MaxFlood a(g.size(), seed, 4, 64);
    MaxFlood b(g.size(), seed, 4, 64);
    MaxFlood c(g.size(), seed, 4, 64);
    const auto sa = run_program(g, a, {.msg_bits = 64});
    const auto sb = run_program(g, b, {.msg_bits = 64});
    const auto sc = run_program(g, c, {.msg_bits = 64, .threads = 4});
    CHECK(a.value == b.value);
    CHECK(a.value == c.value);
    CHECK(sa.to_json() == sb.to_json());
    CHECK(sa.to_json() == sc.to_json());
  }
}

TEST_CASE("locality: edits outside the r-ball do not change a node's output") {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const Graph g = generate_graph(GraphModel::kGnp, {.n = 150, .p = 0.03}, seed);
    const std::uint64_t r = 1 + seed % 3;
    const Vertex target = static_cast<Vertex>(seed * 7 % g.size());
    const auto dist = bfs_distances(g, target).dist;
    // Delete every edge with both endpoints at distance >= r, and add a few
    // new edges among such nodes.
    std::vector<Edge> edges;
    std::vector<Vertex> far;
    for (const auto& e : g.edges()) {
      if (dist[e.u] >= r && dist[e.v] >= r && (e.u + e.v) % 2 == 0) continue;
      edges.push_back(e);
    }
    for (Vertex v = 0; v < g.size(); ++v)
      if (dist[v] >= r) far.push_back(v);
    for (std::size_t i = 0; i + 1 < far.size(); i += 5) edges.push_back({far[i], far[i + 1]});
    std::sort(edges.begin(), edges.end());
    for (auto& e : edges)
      if (e.u > e.v) std::swap(e.u, e.v);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    const Graph h = Graph::from_edges(g.size(), edges);

    MaxFlood a(g.size(), seed, r, 64);
    MaxFlood b(h.size(), seed, r, 64);
    run_program(g, a, {.msg_bits = 64});
    run_program(h, b, {.msg_bits = 64});
    CHECK(a.value[target] == b.value[target]);
  }
}

TEST_CASE("recorded maximum equals a recount") {
  const Graph g = generate_graph(GraphModel::kGnp, {.n = 200, .p = 0.05}, 2);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    VariableWidth prog(seed);
    const auto stats = run_program(g, prog, {.msg_bits = 100, .strict = false});
    CHECK(stats.max_bits_per_edge_round == prog.true_max);
    CHECK(stats.total_messages == prog.sent);
    CHECK_FALSE(stats.budget_violations.empty());
  }
}
