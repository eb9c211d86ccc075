#include "netdecomp/congest.hpp"

#include <algorithm>
#include <thread>

#include "json.hpp"

namespace netdecomp {

std::uint32_t default_msg_bits(unsigned id_bits) {
  return std::max(4 * id_bits, 3 * id_bits + 32);
}

std::uint32_t resolve_budget(const SimConfig& cfg, const Graph& g) {
  const std::uint32_t b = cfg.msg_bits == 0 ? default_msg_bits(g.id_bits()) : cfg.msg_bits;
  if (b < g.id_bits() + 8) {
    throw std::invalid_argument("msg_bits " + std::to_string(b) + " below id_bits + 8 = " +
                                std::to_string(g.id_bits() + 8));
  }
  return b;
}

void RoundStats::append(const RoundStats& later) {
  rounds += later.rounds;
  max_bits_per_edge_round = std::max(max_bits_per_edge_round, later.max_bits_per_edge_round);
  total_messages += later.total_messages;
  budget_violations.insert(budget_violations.end(), later.budget_violations.begin(),
                           later.budget_violations.end());
}

std::string RoundStats::to_json() const {
  nlohmann::json j;
  j["rounds"] = rounds;
  j["max_bits_per_edge_round"] = max_bits_per_edge_round;
  j["total_messages"] = total_messages;
  auto v = nlohmann::json::array();
  for (const auto& b : budget_violations) {
    v.push_back({{"round", b.round}, {"edge", b.edge}, {"from", b.from}, {"bits", b.bits}});
  }
  j["budget_violations"] = std::move(v);
  return j.dump();
}

BudgetError::BudgetError(const BudgetViolation& v, std::uint32_t budget)
    : std::runtime_error("message budget exceeded in round " + std::to_string(v.round) + " on edge " +
                         std::to_string(v.edge) + " from node " + std::to_string(v.from) + ": " +
                         std::to_string(v.bits) + " bits > " + std::to_string(budget)),
      violation(v) {}

void Outbox::send(std::uint32_t port, const Message& m) {
  if (port >= degree_) throw std::logic_error("send on nonexistent port " + std::to_string(port));
  for (std::size_t i = sent_mark_begin_; i < pending_.size(); ++i) {
    if (pending_[i].port == port) {
      throw std::logic_error("node " + std::to_string(node_) + " sent twice on port " + std::to_string(port));
    }
  }
  pending_.push_back({node_, port, m});
}

void Outbox::broadcast(const Message& m) {
  if (pending_.size() != sent_mark_begin_) {
    for (std::uint32_t p = 0; p < degree_; ++p) send(p, m);
    return;
  }
  for (std::uint32_t p = 0; p < degree_; ++p) pending_.push_back({node_, p, m});
}

Engine::Engine(const Graph& g, SimConfig cfg) : g_(g), cfg_(cfg), budget_(resolve_budget(cfg, g)) {}

namespace {

struct Work {
  Vertex v;
  std::size_t lo;
  std::size_t hi;
};

}  // namespace

RoundStats Engine::run(NodeProgram& program, const RoundObserver& observer) {
  const std::size_t n = g_.size();
  const unsigned threads = std::max(1u, cfg_.threads);
  std::vector<LocalView> views(n);
  for (Vertex v = 0; v < n; ++v) {
    views[v] = {g_.ident(v), static_cast<std::uint32_t>(g_.degree(v)), g_.id_bits()};
  }

  std::vector<Outbox> boxes(threads);
  std::vector<std::pair<Vertex, Incoming>> deliveries;
  std::vector<Incoming> inbox;
  auto step_range = [&](Outbox& box, std::span<const Work> work, std::uint64_t round) {
    for (const auto& w : work) {
      box.reset(w.v, views[w.v].degree);
      if (round == 0) {
        program.init(w.v, views[w.v], box);
      } else {
        program.step(w.v, views[w.v], round, std::span<const Incoming>(inbox.data() + w.lo, w.hi - w.lo), box);
      }
      if (box.wake_) box.wakes_.push_back(w.v);
    }
  };

  std::vector<Work> active(n);
  for (Vertex v = 0; v < n; ++v) active[v] = {v, 0, 0};
  std::vector<Outbox::Pending> pending;
  std::vector<Vertex> wakes;
  RoundStats stats;

  for (std::uint64_t round = 0;; ++round) {
    // Evaluate the active nodes, splitting into contiguous chunks so that the
    // merged outbox order equals sequential evaluation.
    const std::size_t chunks = active.size() >= 1024 * threads ? threads : 1;
    for (std::size_t t = 0; t < chunks; ++t) {
      boxes[t].pending_.clear();
      boxes[t].wakes_.clear();
    }
    if (chunks == 1) {
      step_range(boxes[0], active, round);
    } else {
      std::vector<std::thread> pool;
      const std::size_t per = (active.size() + chunks - 1) / chunks;
      for (std::size_t t = 0; t < chunks; ++t) {
        const std::size_t lo = std::min(active.size(), t * per);
        const std::size_t hi = std::min(active.size(), lo + per);
        pool.emplace_back([&, t, lo, hi] {
          step_range(boxes[t], std::span<const Work>(active.data() + lo, hi - lo), round);
        });
      }
      for (auto& th : pool) th.join();
    }
    pending.clear();
    wakes.clear();
    for (std::size_t t = 0; t < chunks; ++t) {
      pending.insert(pending.end(), boxes[t].pending_.begin(), boxes[t].pending_.end());
      wakes.insert(wakes.end(), boxes[t].wakes_.begin(), boxes[t].wakes_.end());
    }
    if (round > 0 && observer) observer(round);
    if (pending.empty() && wakes.empty()) break;
    if (round + 1 > cfg_.max_rounds) {
      throw RoundLimitError("round limit " + std::to_string(cfg_.max_rounds) + " reached with nodes still active");
    }

    const std::uint64_t next = round + 1;
    for (const auto& p : pending) {
      if (p.msg.bits > budget_) {
        const BudgetViolation v{next, g_.port_edge(p.from, p.port), p.from, p.msg.bits};
        if (cfg_.strict) throw BudgetError(v, budget_);
        stats.budget_violations.push_back(v);
      }
      stats.max_bits_per_edge_round = std::max(stats.max_bits_per_edge_round, p.msg.bits);
    }
    stats.total_messages += pending.size();
    if (!pending.empty()) stats.rounds = next;

    // Deliver. Senders appear in ascending vertex order and ports are sorted
    // by neighbor, so a stable sort on the receiver yields inboxes in port order.
    deliveries.clear();
    deliveries.reserve(pending.size());
    for (const auto& p : pending) {
      deliveries.push_back({g_.neighbors(p.from)[p.port], Incoming{g_.reverse_port(p.from, p.port), p.msg}});
    }
    std::stable_sort(deliveries.begin(), deliveries.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    inbox.resize(deliveries.size());
    for (std::size_t i = 0; i < deliveries.size(); ++i) inbox[i] = deliveries[i].second;
    std::sort(wakes.begin(), wakes.end());
    active.clear();
    std::size_t wi = 0;
    for (std::size_t i = 0; i < deliveries.size();) {
      const Vertex v = deliveries[i].first;
      for (; wi < wakes.size() && wakes[wi] < v; ++wi) {
        if (active.empty() || active.back().v != wakes[wi]) active.push_back({wakes[wi], 0, 0});
      }
      std::size_t j = i;
      while (j < deliveries.size() && deliveries[j].first == v) ++j;
      active.push_back({v, i, j});
      i = j;
    }
    for (; wi < wakes.size(); ++wi) {
      if (active.empty() || active.back().v != wakes[wi]) active.push_back({wakes[wi], 0, 0});
    }
  }
  return stats;
}

RoundStats run_program(const Graph& g, NodeProgram& program, const SimConfig& cfg,
                       const RoundObserver& observer) {
  Engine e(g, cfg);
  return e.run(program, observer);
}

}  // namespace netdecomp
