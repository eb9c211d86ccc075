#include "netdecomp/desire_mis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "netdecomp/kernels/lane_degree.hpp"
#include "netdecomp/rng.hpp"

namespace netdecomp {

namespace {

constexpr std::uint64_t kTwo = std::uint64_t{2} << kMaxDesireExp;

bool marks(std::uint64_t seed, Vertex v, std::uint64_t run, std::uint64_t t, std::uint8_t e) {
  return (Stream(seed, v, run).at(t) >> (64 - e)) == 0;
}

bool bit(std::uint64_t mask, std::uint32_t l) { return (mask >> l) & 1u; }

struct Arrays {
  std::uint32_t lanes;
  std::vector<MisStatus> status;
  std::vector<std::uint8_t> exp;
};

void check_invariants(const Graph& g, const std::vector<bool>& part, const Arrays& a, std::uint64_t t) {
  const std::uint32_t L = a.lanes;
  for (const auto& e : g.edges()) {
    if (!part[e.u] || !part[e.v]) continue;
    for (std::uint32_t l = 0; l < L; ++l) {
      if (a.status[e.u * L + l] == MisStatus::kInMis && a.status[e.v * L + l] == MisStatus::kInMis)
        throw MisInvariantError("iteration " + std::to_string(t) + ": adjacent MIS nodes " + std::to_string(e.u) +
                                ", " + std::to_string(e.v) + " in lane " + std::to_string(l));
    }
  }
  for (Vertex v = 0; v < g.size(); ++v) {
    if (!part[v]) continue;
    for (std::uint32_t l = 0; l < L; ++l) {
      if (a.status[v * L + l] != MisStatus::kRemoved) continue;
      bool dom = false;
      for (Vertex u : g.neighbors(v)) dom |= part[u] && a.status[u * L + l] == MisStatus::kInMis;
      if (!dom)
        throw MisInvariantError("iteration " + std::to_string(t) + ": removed node " + std::to_string(v) +
                                " has no MIS neighbor in lane " + std::to_string(l));
    }
  }
}

std::uint64_t count_undecided(const std::vector<bool>& part, const Arrays& a) {
  std::uint64_t c = 0;
  for (std::size_t v = 0; v < part.size(); ++v) {
    if (!part[v]) continue;
    for (std::uint32_t l = 0; l < a.lanes; ++l) c += a.status[v * a.lanes + l] == MisStatus::kUndecided;
  }
  return c;
}

// Centralized iteration t over all lanes.
void central_iteration(const Graph& g, const std::vector<bool>& part, std::uint64_t seed, std::uint64_t run_base,
                       std::uint64_t t, Arrays& a) {
  const std::uint32_t L = a.lanes;
  const std::size_t n = g.size();
  auto undecided = [&](Vertex v, std::uint32_t l) { return part[v] && a.status[v * L + l] == MisStatus::kUndecided; };
  std::vector<std::uint64_t> deg(n * L, 0);
  std::vector<std::uint64_t> marked(n, 0), joined(n, 0);
  for (Vertex v = 0; v < n; ++v) {
    if (!part[v]) continue;
    for (std::uint32_t l = 0; l < L; ++l) {
      if (!undecided(v, l)) continue;
      std::uint64_t d = 0;
      for (Vertex u : g.neighbors(v))
        if (undecided(u, l)) d += std::uint64_t{1} << (kMaxDesireExp - a.exp[u * L + l]);
      deg[v * L + l] = d;
      if (marks(seed, v, run_base + l, t, a.exp[v * L + l])) marked[v] |= std::uint64_t{1} << l;
    }
  }
  for (Vertex v = 0; v < n; ++v) {
    if (!marked[v]) continue;
    std::uint64_t other = 0;
    for (Vertex u : g.neighbors(v))
      if (part[u]) other |= marked[u];
    joined[v] = marked[v] & ~other;
  }
  for (Vertex v = 0; v < n; ++v) {
    if (!part[v]) continue;
    std::uint64_t near = 0;
    for (Vertex u : g.neighbors(v))
      if (part[u]) near |= joined[u];
    for (std::uint32_t l = 0; l < L; ++l) {
      auto& s = a.status[v * L + l];
      if (s != MisStatus::kUndecided) continue;
      if (bit(joined[v], l)) {
        s = MisStatus::kInMis;
      } else if (bit(near, l)) {
        s = MisStatus::kRemoved;
      } else {
        a.exp[v * L + l] = next_desire_exp(a.exp[v * L + l], deg[v * L + l]);
      }
    }
  }
}

// Four rounds per iteration, each carrying one bit per lane:
//   0: apply neighbors' desire bits (or presence at t = 0), send marks
//   1: decide joins, send join bits
//   2: learn joins, become removed, send removal bits
//   3: learn removals, update desire, send halve bits
class LaneProgram : public NodeProgram {
 public:
  LaneProgram(const Graph& g, const LaneRunConfig& cfg, const std::vector<bool>& part)
      : g_(g), cfg_(cfg), part_(part), L_(cfg.lanes) {
    a_.lanes = L_;
    a_.status.assign(g.size() * L_, MisStatus::kUndecided);
    a_.exp.assign(g.size() * L_, 1);
    shift_.assign(g.port_base(static_cast<Vertex>(g.size())) * L_, kernels::kGone);
    deg_.assign(g.size() * L_, 0);
    alive_at_start_.assign(g.size(), 0);
    mark_.assign(g.size(), 0);
    all_ = L_ == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << L_) - 1;
  }

  void init(Vertex v, const LocalView&, Outbox& out) override {
    if (!part_[v] || cfg_.iterations == 0) return;
    send(out, all_);
    out.wake();
  }

  void step(Vertex v, const LocalView&, std::uint64_t round, std::span<const Incoming> inbox, Outbox& out) override {
    if (!part_[v]) return;
    const std::uint64_t t = (round - 1) / 4;
    const unsigned phase = static_cast<unsigned>((round - 1) % 4);
    if (t >= cfg_.iterations) return;
    const std::uint64_t undecided = undecided_mask(v);
    std::uint8_t* sh = shift_.data() + g_.port_base(v) * L_;
    switch (phase) {
      case 0: {
        for (const auto& in : inbox) {
          std::uint8_t* row = sh + static_cast<std::size_t>(in.port) * L_;
          for (std::uint32_t l = 0; l < L_; ++l) {
            if (t == 0) {
              if (bit(in.msg.words[0], l)) row[l] = kMaxDesireExp - 1;
            } else if (row[l] < kernels::kGone) {
              if (bit(in.msg.words[0], l)) row[l] = row[l] == 0 ? 0 : row[l] - 1;
              else row[l] = row[l] + 1 > kMaxDesireExp - 1 ? kMaxDesireExp - 1 : row[l] + 1;
            }
          }
        }
        if (!undecided) return;
        kernels::lane_degree(sh, g_.degree(v), L_, deg_.data() + static_cast<std::size_t>(v) * L_);
        std::uint64_t m = 0;
        for (std::uint32_t l = 0; l < L_; ++l) {
          if (bit(undecided, l) && marks(cfg_.seed, v, cfg_.run_base + l, t, a_.exp[v * L_ + l]))
            m |= std::uint64_t{1} << l;
        }
        mark_[v] = m;
        send(out, m);
        out.wake();
        break;
      }
      case 1: {
        if (!undecided) {
          alive_at_start_[v] = 0;
          return;
        }
        std::uint64_t other = 0;
        for (const auto& in : inbox) other |= in.msg.words[0];
        const std::uint64_t join = mark_[v] & ~other & undecided;
        for (std::uint32_t l = 0; l < L_; ++l)
          if (bit(join, l)) a_.status[v * L_ + l] = MisStatus::kInMis;
        alive_at_start_[v] = undecided | join;
        send(out, join);
        out.wake();
        break;
      }
      case 2: {
        if (!alive_at_start_[v]) return;
        std::uint64_t near = 0;
        for (const auto& in : inbox) {
          std::uint8_t* row = sh + static_cast<std::size_t>(in.port) * L_;
          for (std::uint32_t l = 0; l < L_; ++l)
            if (bit(in.msg.words[0], l)) row[l] = kernels::kGone;
          near |= in.msg.words[0];
        }
        const std::uint64_t removed = near & undecided;
        for (std::uint32_t l = 0; l < L_; ++l)
          if (bit(removed, l)) a_.status[v * L_ + l] = MisStatus::kRemoved;
        send(out, removed);
        if (undecided & ~removed) out.wake();
        break;
      }
      case 3: {
        for (const auto& in : inbox) {
          std::uint8_t* row = sh + static_cast<std::size_t>(in.port) * L_;
          for (std::uint32_t l = 0; l < L_; ++l)
            if (bit(in.msg.words[0], l)) row[l] = kernels::kGone;
        }
        if (!undecided) return;
        std::uint64_t halve = 0;
        for (std::uint32_t l = 0; l < L_; ++l) {
          if (!bit(undecided, l)) continue;
          auto& e = a_.exp[v * L_ + l];
          const std::uint8_t ne = next_desire_exp(e, deg_[v * L_ + l]);
          if (ne > e || (ne == e && e == kMaxDesireExp)) halve |= std::uint64_t{1} << l;
          e = ne;
        }
        if (t + 1 < cfg_.iterations) {
          send(out, halve);
          out.wake();
        }
        break;
      }
    }
  }

  const Arrays& arrays() const { return a_; }

 private:
  std::uint64_t undecided_mask(Vertex v) const {
    std::uint64_t m = 0;
    for (std::uint32_t l = 0; l < L_; ++l)
      if (a_.status[v * L_ + l] == MisStatus::kUndecided) m |= std::uint64_t{1} << l;
    return m;
  }
  void send(Outbox& out, std::uint64_t mask) {
    Message m;
    m.bits = L_;
    m.words[0] = mask;
    out.broadcast(m);
  }

  const Graph& g_;
  const LaneRunConfig& cfg_;
  const std::vector<bool>& part_;
  std::uint32_t L_;
  std::uint64_t all_ = 0;
  Arrays a_;
  std::vector<std::uint8_t> shift_;
  std::vector<std::uint64_t> deg_;
  std::vector<std::uint64_t> mark_;
  std::vector<std::uint64_t> alive_at_start_;
};

}  // namespace

std::uint8_t next_desire_exp(std::uint8_t e, std::uint64_t effective_degree) {
  if (effective_degree >= kTwo) return e < kMaxDesireExp ? e + 1 : e;
  return e > 1 ? e - 1 : 1;
}

LaneRunResult run_lanes(const Graph& g, const LaneRunConfig& cfg) {
  if (cfg.lanes == 0 || cfg.lanes > 64) throw std::invalid_argument("lanes must be in [1, 64]");
  const std::size_t n = g.size();
  std::vector<bool> part = cfg.participants.empty() ? std::vector<bool>(n, true) : cfg.participants;
  if (part.size() != n) throw std::invalid_argument("participants size mismatch");
  LaneRunResult res;
  res.lanes = cfg.lanes;
  res.iterations = cfg.iterations;

  if (cfg.fast) {
    Arrays a{cfg.lanes, std::vector<MisStatus>(n * cfg.lanes, MisStatus::kUndecided),
             std::vector<std::uint8_t>(n * cfg.lanes, 1)};
    for (std::uint64_t t = 0; t < cfg.iterations; ++t) {
      central_iteration(g, part, cfg.seed, cfg.run_base, t, a);
      if (cfg.check_invariants) {
        check_invariants(g, part, a, t);
        ++res.invariant_checks;
      }
      res.undecided_after.push_back(count_undecided(part, a));
    }
    res.status = std::move(a.status);
    res.desire_exp = std::move(a.exp);
    // Nominal cost of the message-passing schedule.
    res.stats.rounds = 4ull * cfg.iterations;
    res.stats.max_bits_per_edge_round = cfg.iterations > 0 ? cfg.lanes : 0;
    return res;
  }

  LaneProgram prog(g, cfg, part);
  SimConfig sc = cfg.sim;
  if (sc.msg_bits == 0) sc.msg_bits = std::max<std::uint32_t>(cfg.lanes, default_msg_bits(g.id_bits()));
  res.stats = run_program(g, prog, sc, [&](std::uint64_t round) {
    if (round == 0 || round % 4 != 3) return;
    // End of phase 2 of iteration (round - 3) / 4: statuses are final for it.
    const std::uint64_t t = (round - 3) / 4;
    if (t >= cfg.iterations) return;
    if (cfg.check_invariants) {
      check_invariants(g, part, prog.arrays(), t);
      ++res.invariant_checks;
    }
    res.undecided_after.push_back(count_undecided(part, prog.arrays()));
  });
  res.status = prog.arrays().status;
  res.desire_exp = prog.arrays().exp;
  // Iterations whose nodes were all decided early produce no rounds.
  while (res.undecided_after.size() < cfg.iterations)
    res.undecided_after.push_back(res.undecided_after.empty() ? count_undecided(part, prog.arrays())
                                                              : res.undecided_after.back());
  return res;
}

MisState MisState::initial(std::size_t n) {
  return {std::vector<MisStatus>(n, MisStatus::kUndecided), std::vector<std::uint8_t>(n, 1), 0};
}

double MisState::desire(Vertex v) const { return std::ldexp(1.0, -static_cast<int>(desire_exp[v])); }

MisState desire_round(const Graph& g, const MisState& state, std::uint64_t seed) {
  Arrays a{1, state.status, state.desire_exp};
  central_iteration(g, std::vector<bool>(g.size(), true), seed, 0, state.round, a);
  return {std::move(a.status), std::move(a.exp), state.round + 1};
}

DesireResult run_desire_levels(const Graph& g, std::uint32_t rounds, std::uint64_t seed, bool fast, const SimConfig& sim) {
  LaneRunConfig cfg;
  cfg.seed = seed;
  cfg.iterations = rounds;
  cfg.fast = fast;
  cfg.sim = sim;
  auto r = run_lanes(g, cfg);
  DesireResult out;
  for (Vertex v = 0; v < g.size(); ++v) {
    if (r.status[v] == MisStatus::kInMis) out.mis.push_back(v);
    if (r.status[v] == MisStatus::kUndecided) out.undecided.push_back(v);
  }
  out.state = {std::move(r.status), std::move(r.desire_exp), rounds};
  out.undecided_after = std::move(r.undecided_after);
  out.stats = std::move(r.stats);
  return out;
}

}  // namespace netdecomp
