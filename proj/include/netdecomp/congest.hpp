#pragma once

// Round-synchronous CONGEST engine. Nodes only see their own identifier, their
// degree and their ports; every message declares its size in bits and the
// engine checks it against the per-edge, per-direction, per-round budget.

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "netdecomp/graph.hpp"

namespace netdecomp {

struct SimConfig {
  /// Per-edge per-direction per-round budget. 0 selects the default for the graph.
  std::uint32_t msg_bits = 0;
  std::uint64_t max_rounds = 50'000'000;
  std::uint64_t seed = 0;
  bool strict = true;
  /// Worker threads used to evaluate node steps inside one round.
  unsigned threads = 1;
};

/// Budget used when msg_bits is 0: room for a (source, target, value) triple of
/// identifiers plus a tag.
std::uint32_t default_msg_bits(unsigned id_bits);
/// Resolves cfg.msg_bits against g and validates it.
std::uint32_t resolve_budget(const SimConfig& cfg, const Graph& g);

struct BudgetViolation {
  std::uint64_t round = 0;
  EdgeId edge = 0;
  Vertex from = 0;
  std::uint32_t bits = 0;
};

struct RoundStats {
  std::uint64_t rounds = 0;
  std::uint32_t max_bits_per_edge_round = 0;
  std::uint64_t total_messages = 0;
  std::vector<BudgetViolation> budget_violations;

  /// Sequential composition: rounds add, maxima combine.
  void append(const RoundStats& later);
  std::string to_json() const;
};

class BudgetError : public std::runtime_error {
 public:
  BudgetError(const BudgetViolation& v, std::uint32_t budget);
  BudgetViolation violation;
};

class RoundLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Message {
  std::uint32_t tag = 0;
  /// Declared size: tag bits plus the sum of field widths.
  std::uint32_t bits = 0;
  std::array<std::uint64_t, 6> words{};
};

/// Width helpers for declaring message sizes.
inline std::uint32_t width_of(std::uint64_t max_value) {
  std::uint32_t b = 1;
  while (b < 64 && (max_value >> b) != 0) ++b;
  return b;
}

struct Incoming {
  std::uint32_t port = 0;
  Message msg;
};

/// What a node knows about itself.
struct LocalView {
  Ident id = 0;
  std::uint32_t degree = 0;
  unsigned id_bits = 1;
};

class Outbox {
 public:
  void send(std::uint32_t port, const Message& m);
  void broadcast(const Message& m);
  /// Step this node next round even if nothing arrives.
  void wake() { wake_ = true; }

 private:
  friend class Engine;
  struct Pending {
    Vertex from;
    std::uint32_t port;
    Message msg;
  };
  void reset(Vertex v, std::uint32_t degree) {
    node_ = v;
    degree_ = degree;
    sent_mark_begin_ = pending_.size();
    wake_ = false;
  }
  Vertex node_ = 0;
  std::uint32_t degree_ = 0;
  std::size_t sent_mark_begin_ = 0;
  bool wake_ = false;
  std::vector<Pending> pending_;
  std::vector<Vertex> wakes_;
};

/// Per-node state machine. Implementations keep per-node state indexed by the
/// vertex argument and must only touch that node's slot inside init/step.
class NodeProgram {
 public:
  virtual ~NodeProgram() = default;
  virtual void init(Vertex v, const LocalView& view, Outbox& out) = 0;
  virtual void step(Vertex v, const LocalView& view, std::uint64_t round,
                    std::span<const Incoming> inbox, Outbox& out) = 0;
};

/// Called after every round with the round number, before the next deliveries.
using RoundObserver = std::function<void(std::uint64_t round)>;

class Engine {
 public:
  Engine(const Graph& g, SimConfig cfg);

  /// Runs until no message is in flight and no node asked to be woken.
  RoundStats run(NodeProgram& program, const RoundObserver& observer = {});

  const Graph& graph() const { return g_; }
  std::uint32_t budget() const { return budget_; }
  const SimConfig& config() const { return cfg_; }

 private:
  const Graph& g_;
  SimConfig cfg_;
  std::uint32_t budget_;
};

/// Convenience wrapper.
RoundStats run_program(const Graph& g, NodeProgram& program, const SimConfig& cfg,
                       const RoundObserver& observer = {});

}  // namespace netdecomp
