#include "netdecomp/primitives.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <unordered_map>

namespace netdecomp {

namespace {

void put_ident(Message& m, std::size_t at, Ident x) {
  m.words[at] = static_cast<std::uint64_t>(x);
  m.words[at + 1] = static_cast<std::uint64_t>(x >> 64);
}

Ident get_ident(const Message& m, std::size_t at) {
  return (static_cast<Ident>(m.words[at + 1]) << 64) | m.words[at];
}

// ---------------------------------------------------------------------------
// Bounded flooding

class FloodProgram : public NodeProgram {
 public:
  struct Entry {
    Ident origin;
    std::uint32_t dist;
    std::uint32_t parent;
    std::uint64_t payload;
    bool sent;
  };

  FloodProgram(std::size_t n, std::uint32_t hops, std::uint32_t fanin, std::uint64_t schedule,
               std::uint32_t bits)
      : hops_(hops), fanin_(fanin), schedule_(schedule), bits_(bits), lists_(n) {}

  void seed(Vertex v, Ident origin, std::uint64_t payload) {
    auto& l = lists_[v];
    for (auto& e : l) {
      if (e.origin == origin) return;
    }
    l.push_back({origin, 0, kNoPort, payload, false});
  }

  void init(Vertex v, const LocalView&, Outbox& out) override {
    normalize(lists_[v]);
    try_send(v, 0, out);
  }

  void step(Vertex v, const LocalView&, std::uint64_t round, std::span<const Incoming> inbox,
            Outbox& out) override {
    auto& l = lists_[v];
    for (const auto& in : inbox) {
      const Ident origin = get_ident(in.msg, 0);
      const auto dist = static_cast<std::uint32_t>(in.msg.words[2]) + 1;
      auto it = std::find_if(l.begin(), l.end(), [&](const Entry& e) { return e.origin == origin; });
      if (it == l.end()) {
        l.push_back({origin, dist, in.port, in.msg.words[3], false});
      } else if (dist < it->dist) {
        *it = {origin, dist, in.port, in.msg.words[3], false};
      } else if (dist == it->dist) {
        it->parent = std::min(it->parent, in.port);
      }
    }
    normalize(l);
    try_send(v, round, out);
  }

  std::vector<std::vector<Entry>>& lists() { return lists_; }

 private:
  void normalize(std::vector<Entry>& l) const {
    std::sort(l.begin(), l.end(), [](const Entry& a, const Entry& b) {
      return a.dist != b.dist ? a.dist < b.dist : a.origin < b.origin;
    });
    if (l.size() > fanin_) l.resize(fanin_);
  }

  void try_send(Vertex v, std::uint64_t round, Outbox& out) {
    if (round + 1 > schedule_) return;
    auto& l = lists_[v];
    bool sent_now = false;
    for (auto& e : l) {
      if (e.sent || e.dist >= hops_) continue;
      if (sent_now) {
        if (round + 2 <= schedule_) out.wake();
        return;
      }
      Message m;
      m.bits = bits_;
      put_ident(m, 0, e.origin);
      m.words[2] = e.dist;
      m.words[3] = e.payload;
      out.broadcast(m);
      e.sent = true;
      sent_now = true;
    }
  }

  std::uint32_t hops_;
  std::uint32_t fanin_;
  std::uint64_t schedule_;
  std::uint32_t bits_;
  std::vector<std::vector<Entry>> lists_;
};

// ---------------------------------------------------------------------------
// Per-node view of the cluster trees passing through it.

struct TreeSlot {
  Ident id;
  std::uint32_t cluster;
  std::uint32_t parent_port;  // kNoPort at the center
  std::vector<std::uint32_t> child_ports;
  std::int64_t member_slot;  // index into members, -1 for relay nodes
};

struct TreeLayout {
  std::vector<std::vector<TreeSlot>> at;  // per node, sorted by id
  std::vector<RootedTree> trees;

  const TreeSlot* find(Vertex v, Ident id) const {
    const auto& s = at[v];
    auto it = std::lower_bound(s.begin(), s.end(), id, [](const TreeSlot& a, Ident b) { return a.id < b; });
    return it != s.end() && it->id == id ? &*it : nullptr;
  }
};

TreeLayout layout_trees(const Graph& g, std::span<const Cluster> clusters, std::uint32_t overlap_cap,
                        const SimConfig& cfg) {
  TreeLayout lay;
  lay.at.resize(g.size());
  std::vector<std::uint32_t> usage(g.edge_count(), 0);
  for (std::uint32_t ci = 0; ci < clusters.size(); ++ci) {
    const auto& c = clusters[ci];
    for (EdgeId e : c.tree_edges) {
      if (++usage[e] > overlap_cap && cfg.strict) {
        throw std::runtime_error("edge " + std::to_string(e) + " carries more than " + std::to_string(overlap_cap) +
                                 " cluster trees");
      }
    }
    RootedTree t = root_tree(g, c);
    std::unordered_map<Vertex, std::size_t> slot_of;
    for (std::size_t i = 0; i < t.nodes.size(); ++i) {
      const Vertex x = t.nodes[i];
      const auto mit = std::lower_bound(c.members.begin(), c.members.end(), x);
      const std::int64_t ms = (mit != c.members.end() && *mit == x) ? mit - c.members.begin() : -1;
      slot_of[x] = lay.at[x].size();
      lay.at[x].push_back({c.id, ci, i == 0 ? kNoPort : t.parent_port[i], {}, ms});
    }
    for (std::size_t i = 1; i < t.nodes.size(); ++i) {
      const Vertex p = t.parent[i];
      lay.at[p][slot_of[p]].child_ports.push_back(*g.port_of(p, t.nodes[i]));
    }
    lay.trees.push_back(std::move(t));
  }
  for (auto& s : lay.at) {
    std::sort(s.begin(), s.end(), [](const TreeSlot& a, const TreeSlot& b) { return a.id < b.id; });
    for (auto& slot : s) std::sort(slot.child_ports.begin(), slot.child_ports.end());
  }
  return lay;
}

// ---------------------------------------------------------------------------

class BroadcastProgram : public NodeProgram {
 public:
  BroadcastProgram(const TreeLayout& lay, std::span<const Cluster> clusters, std::span<const Payload> payloads,
                   std::uint32_t bits)
      : lay_(lay), clusters_(clusters), payloads_(payloads), bits_(bits), queue_(lay.at.size()),
        received_(clusters.size()) {
    for (std::size_t i = 0; i < clusters.size(); ++i) received_[i].resize(clusters[i].members.size());
  }

  void init(Vertex v, const LocalView&, Outbox& out) override {
    for (const auto& slot : lay_.at[v]) {
      if (slot.parent_port != kNoPort) continue;
      deliver(v, slot, payloads_[slot.cluster]);
    }
    flush(v, out);
  }

  void step(Vertex v, const LocalView&, std::uint64_t, std::span<const Incoming> inbox, Outbox& out) override {
    for (const auto& in : inbox) {
      const TreeSlot* slot = lay_.find(v, get_ident(in.msg, 0));
      Payload p;
      for (std::size_t i = 0; i < 4; ++i) p.w[i] = in.msg.words[2 + i];
      deliver(v, *slot, p);
    }
    flush(v, out);
  }

  std::vector<std::vector<Payload>>& received() { return received_; }

 private:
  struct Pending {
    Ident id;
    std::uint32_t port;
    Payload p;
  };

  void deliver(Vertex v, const TreeSlot& slot, const Payload& p) {
    if (slot.member_slot >= 0) received_[slot.cluster][slot.member_slot] = p;
    for (auto port : slot.child_ports) queue_[v].push_back({slot.id, port, p});
  }

  void flush(Vertex v, Outbox& out) {
    auto& q = queue_[v];
    if (q.empty()) return;
    std::sort(q.begin(), q.end(), [](const Pending& a, const Pending& b) {
      return a.port != b.port ? a.port < b.port : a.id < b.id;
    });
    std::vector<Pending> rest;
    for (std::size_t i = 0; i < q.size(); ++i) {
      if (i > 0 && q[i].port == q[i - 1].port) {
        rest.push_back(q[i]);
        continue;
      }
      Message m;
      m.bits = bits_;
      put_ident(m, 0, q[i].id);
      for (std::size_t j = 0; j < 4; ++j) m.words[2 + j] = q[i].p.w[j];
      out.send(q[i].port, m);
    }
    q = std::move(rest);
    if (!q.empty()) out.wake();
  }

  const TreeLayout& lay_;
  std::span<const Cluster> clusters_;
  std::span<const Payload> payloads_;
  std::uint32_t bits_;
  std::vector<std::vector<Pending>> queue_;
  std::vector<std::vector<Payload>> received_;
};

// ---------------------------------------------------------------------------

std::uint64_t identity_of(Combine c) {
  switch (c) {
    case Combine::kSum:
    case Combine::kMax:
    case Combine::kOr:
      return 0;
    case Combine::kMin:
    case Combine::kAnd:
      return ~std::uint64_t{0};
  }
  return 0;
}

std::uint64_t apply(Combine c, std::uint64_t a, std::uint64_t b) {
  switch (c) {
    case Combine::kSum:
      return a + b;
    case Combine::kMin:
      return std::min(a, b);
    case Combine::kMax:
      return std::max(a, b);
    case Combine::kAnd:
      return a & b;
    case Combine::kOr:
      return a | b;
  }
  return a;
}

class ScalarConvergecastProgram : public NodeProgram {
 public:
  ScalarConvergecastProgram(const TreeLayout& lay, const std::vector<std::vector<std::uint64_t>>& values,
                            Combine combine, std::uint32_t bits, std::size_t clusters)
      : lay_(lay), values_(values), combine_(combine), bits_(bits), state_(lay.at.size()), result_(clusters) {}

  void init(Vertex v, const LocalView&, Outbox& out) override {
    auto& st = state_[v];
    for (const auto& slot : lay_.at[v]) {
      const std::uint64_t own = slot.member_slot >= 0 ? values_[slot.cluster][slot.member_slot] : identity_of(combine_);
      st.push_back({own, static_cast<std::uint32_t>(slot.child_ports.size()), false});
    }
    progress(v, out);
  }

  void step(Vertex v, const LocalView&, std::uint64_t, std::span<const Incoming> inbox, Outbox& out) override {
    const auto& slots = lay_.at[v];
    for (const auto& in : inbox) {
      const Ident id = get_ident(in.msg, 0);
      const auto it = std::lower_bound(slots.begin(), slots.end(), id,
                                       [](const TreeSlot& a, Ident b) { return a.id < b; });
      auto& st = state_[v][it - slots.begin()];
      st.acc = apply(combine_, st.acc, in.msg.words[2]);
      --st.waiting;
    }
    progress(v, out);
  }

  std::vector<std::uint64_t>& result() { return result_; }

 private:
  struct State {
    std::uint64_t acc;
    std::uint32_t waiting;
    bool done;
  };

  void progress(Vertex v, Outbox& out) {
    const auto& slots = lay_.at[v];
    auto& st = state_[v];
    std::vector<std::uint32_t> used;
    bool blocked = false;
    for (std::size_t i = 0; i < slots.size(); ++i) {
      if (st[i].done || st[i].waiting > 0) continue;
      if (slots[i].parent_port == kNoPort) {
        result_[slots[i].cluster] = st[i].acc;
        st[i].done = true;
        continue;
      }
      if (std::find(used.begin(), used.end(), slots[i].parent_port) != used.end()) {
        blocked = true;
        continue;
      }
      Message m;
      m.bits = bits_;
      put_ident(m, 0, slots[i].id);
      m.words[2] = st[i].acc;
      out.send(slots[i].parent_port, m);
      used.push_back(slots[i].parent_port);
      st[i].done = true;
    }
    if (blocked) out.wake();
  }

  const TreeLayout& lay_;
  const std::vector<std::vector<std::uint64_t>>& values_;
  Combine combine_;
  std::uint32_t bits_;
  std::vector<std::vector<State>> state_;
  std::vector<std::uint64_t> result_;
};

// ---------------------------------------------------------------------------

class UnionConvergecastProgram : public NodeProgram {
 public:
  struct ChildStream {
    std::uint32_t port;
    std::deque<Ident> items;
    bool done = false;
  };
  struct State {
    std::deque<Ident> own;
    std::vector<ChildStream> children;
    std::deque<Ident> out;
    bool end_queued = false;
    bool end_sent = false;
    std::uint32_t produced = 0;
    std::vector<std::pair<Ident, std::uint32_t>> prov;  // item -> port (kNoPort = own)
  };

  UnionConvergecastProgram(const TreeLayout& lay, const std::vector<std::vector<std::vector<Ident>>>& items,
                           std::uint32_t cap, std::uint32_t bits, std::size_t clusters)
      : lay_(lay), items_(items), cap_(cap), bits_(bits), state_(lay.at.size()), result_(clusters) {}

  void init(Vertex v, const LocalView&, Outbox& out) override {
    auto& sts = state_[v];
    for (const auto& slot : lay_.at[v]) {
      State st;
      if (slot.member_slot >= 0) {
        auto own = items_[slot.cluster][slot.member_slot];
        std::sort(own.begin(), own.end());
        own.erase(std::unique(own.begin(), own.end()), own.end());
        if (own.size() > cap_) own.resize(cap_);
        st.own.assign(own.begin(), own.end());
      }
      for (auto p : slot.child_ports) st.children.push_back({p, {}, false});
      sts.push_back(std::move(st));
    }
    progress(v, out);
  }

  void step(Vertex v, const LocalView&, std::uint64_t, std::span<const Incoming> inbox, Outbox& out) override {
    const auto& slots = lay_.at[v];
    for (const auto& in : inbox) {
      const Ident id = get_ident(in.msg, 0);
      const auto it = std::lower_bound(slots.begin(), slots.end(), id,
                                       [](const TreeSlot& a, Ident b) { return a.id < b; });
      auto& st = state_[v][it - slots.begin()];
      for (auto& ch : st.children) {
        if (ch.port != in.port) continue;
        if (in.msg.tag == 1) {
          ch.done = true;
        } else {
          ch.items.push_back(get_ident(in.msg, 2));
        }
      }
    }
    progress(v, out);
  }

  std::vector<std::vector<Ident>>& result() { return result_; }
  const State& state(Vertex v, std::size_t slot) const { return state_[v][slot]; }

 private:
  // Moves every item whose position in the merged order is already certain
  // into the output queue.
  void merge(State& st) {
    while (!st.end_queued) {
      if (st.produced == cap_) {
        st.end_queued = true;
        break;
      }
      bool certain = true;
      bool any = !st.own.empty();
      Ident best = any ? st.own.front() : 0;
      for (const auto& ch : st.children) {
        if (ch.items.empty()) {
          if (!ch.done) certain = false;
          continue;
        }
        if (!any || ch.items.front() < best) best = ch.items.front();
        any = true;
      }
      if (!certain) break;
      if (!any) {
        st.end_queued = true;
        break;
      }
      const bool own_has = !st.own.empty() && st.own.front() == best;
      if (own_has) st.own.pop_front();
      std::uint32_t child = kNoPort;
      for (auto& ch : st.children) {
        if (!ch.items.empty() && ch.items.front() == best) {
          child = std::min(child, ch.port);
          ch.items.pop_front();
        }
      }
      const std::uint32_t from = own_has ? kNoPort : child;
      st.prov.push_back({best, from});
      st.out.push_back(best);
      ++st.produced;
    }
  }

  void progress(Vertex v, Outbox& out) {
    const auto& slots = lay_.at[v];
    auto& sts = state_[v];
    std::vector<std::uint32_t> used;
    bool pending = false;
    for (std::size_t i = 0; i < slots.size(); ++i) {
      auto& st = sts[i];
      merge(st);
      if (slots[i].parent_port == kNoPort) {
        while (!st.out.empty()) {
          result_[slots[i].cluster].push_back(st.out.front());
          st.out.pop_front();
        }
        continue;
      }
      if (st.end_sent) continue;
      if (st.out.empty() && !st.end_queued) continue;
      if (std::find(used.begin(), used.end(), slots[i].parent_port) != used.end()) {
        pending = true;
        continue;
      }
      Message m;
      m.bits = bits_;
      put_ident(m, 0, slots[i].id);
      if (!st.out.empty()) {
        put_ident(m, 2, st.out.front());
        st.out.pop_front();
      } else {
        m.tag = 1;
        st.end_sent = true;
      }
      out.send(slots[i].parent_port, m);
      used.push_back(slots[i].parent_port);
      if (!st.out.empty() || (st.end_queued && !st.end_sent)) pending = true;
    }
    if (pending) out.wake();
  }

  const TreeLayout& lay_;
  const std::vector<std::vector<std::vector<Ident>>>& items_;
  std::uint32_t cap_;
  std::uint32_t bits_;
  std::vector<std::vector<State>> state_;
  std::vector<std::vector<Ident>> result_;
};

// ---------------------------------------------------------------------------

class RouteProgram : public NodeProgram {
 public:
  struct Queued {
    std::uint32_t port;
    std::uint64_t priority;
    std::uint32_t index;
  };

  RouteProgram(const Graph& g, std::span<const Packet> packets)
      : g_(g), packets_(packets), pos_(packets.size(), 0), arrival_(packets.size(), 0), queue_(g.size()) {
    for (std::uint32_t i = 0; i < packets.size(); ++i) {
      const auto& p = packets[i].path;
      if (p.empty()) throw std::invalid_argument("packet with empty path");
      for (std::size_t j = 0; j + 1 < p.size(); ++j) {
        if (!g.find_edge(p[j], p[j + 1])) throw std::invalid_argument("packet path uses a non-edge");
      }
      if (p.size() > 1) start_.push_back(i);
    }
  }

  void init(Vertex v, const LocalView&, Outbox& out) override {
    for (auto i : origin_bucket(v)) enqueue(v, i);
    flush(v, out);
  }

  void step(Vertex v, const LocalView&, std::uint64_t round, std::span<const Incoming> inbox, Outbox& out) override {
    for (const auto& in : inbox) {
      const auto i = static_cast<std::uint32_t>(in.msg.words[0]);
      ++pos_[i];
      if (pos_[i] + 1 == packets_[i].path.size()) {
        arrival_[i] = round;
      } else {
        enqueue(v, i);
      }
    }
    flush(v, out);
  }

  std::vector<std::uint64_t>& arrival() { return arrival_; }

  void prepare() {
    by_origin_.assign(g_.size() + 1, 0);
    for (auto i : start_) ++by_origin_[packets_[i].path.front() + 1];
    for (std::size_t v = 0; v < g_.size(); ++v) by_origin_[v + 1] += by_origin_[v];
    first_.resize(start_.size());
    std::vector<std::size_t> fill(by_origin_.begin(), by_origin_.end() - 1);
    for (auto i : start_) first_[fill[packets_[i].path.front()]++] = i;
  }

 private:
  std::span<const std::uint32_t> origin_bucket(Vertex v) const {
    return {first_.data() + by_origin_[v], by_origin_[v + 1] - by_origin_[v]};
  }

  void enqueue(Vertex v, std::uint32_t i) {
    const Vertex next = packets_[i].path[pos_[i] + 1];
    queue_[v].push_back({*g_.port_of(v, next), packets_[i].priority, i});
  }

  void flush(Vertex v, Outbox& out) {
    auto& q = queue_[v];
    if (q.empty()) return;
    std::sort(q.begin(), q.end(), [](const Queued& a, const Queued& b) {
      if (a.port != b.port) return a.port < b.port;
      if (a.priority != b.priority) return a.priority < b.priority;
      return a.index < b.index;
    });
    std::vector<Queued> rest;
    for (std::size_t j = 0; j < q.size(); ++j) {
      if (j > 0 && q[j].port == q[j - 1].port) {
        rest.push_back(q[j]);
        continue;
      }
      Message m;
      m.bits = packets_[q[j].index].bits;
      m.words[0] = q[j].index;
      out.send(q[j].port, m);
    }
    q = std::move(rest);
    if (!q.empty()) out.wake();
  }

  const Graph& g_;
  std::span<const Packet> packets_;
  std::vector<std::uint32_t> pos_;
  std::vector<std::uint64_t> arrival_;
  std::vector<std::vector<Queued>> queue_;
  std::vector<std::uint32_t> start_;
  std::vector<std::size_t> by_origin_;
  std::vector<std::uint32_t> first_;
};

}  // namespace

// ---------------------------------------------------------------------------

FloodResult bounded_flood(const Graph& g, std::span<const FloodSource> sources, std::uint32_t hops,
                          std::uint32_t fanin, const SimConfig& cfg, std::uint32_t payload_bits) {
  if (fanin < 1) throw std::invalid_argument("bounded_flood needs fanin >= 1");
  const std::uint64_t schedule = static_cast<std::uint64_t>(fanin) * hops;
  const std::uint32_t bits = g.id_bits() + width_of(hops) + payload_bits;
  FloodProgram prog(g.size(), hops, fanin, schedule, bits);
  for (const auto& s : sources) {
    if (s.node >= g.size()) throw std::invalid_argument("flood source out of range");
    prog.seed(s.node, s.origin, s.payload);
  }
  FloodResult res;
  res.stats = run_program(g, prog, cfg);
  res.stats.rounds = schedule;
  res.held.resize(g.size());
  for (Vertex v = 0; v < g.size(); ++v) {
    for (const auto& e : prog.lists()[v]) res.held[v].push_back({e.origin, e.dist, e.parent, e.payload});
  }
  return res;
}

std::vector<std::vector<FloodItem>> flood_oracle(const Graph& g, std::span<const FloodSource> sources,
                                                 std::uint32_t hops, std::uint32_t fanin) {
  std::map<Ident, std::vector<Vertex>> by_origin;
  std::map<Ident, std::uint64_t> payload;
  for (const auto& s : sources) {
    by_origin[s.origin].push_back(s.node);
    payload.emplace(s.origin, s.payload);
  }
  std::vector<std::vector<FloodItem>> all(g.size());
  std::vector<std::pair<Ident, std::vector<std::uint32_t>>> dist;
  for (const auto& [origin, nodes] : by_origin) {
    auto d = multi_bfs(g, nodes, hops);
    for (Vertex v = 0; v < g.size(); ++v) {
      if (d[v] != kUnreached) all[v].push_back({origin, d[v], kNoPort, payload[origin]});
    }
    dist.emplace_back(origin, std::move(d));
  }
  auto order = [](const FloodItem& a, const FloodItem& b) {
    return a.dist != b.dist ? a.dist < b.dist : a.origin < b.origin;
  };
  for (auto& l : all) {
    std::sort(l.begin(), l.end(), order);
    if (l.size() > fanin) l.resize(fanin);
  }
  // Parent: lowest port towards a neighbor one step closer to the origin.
  std::map<Ident, std::size_t> idx;
  for (std::size_t i = 0; i < dist.size(); ++i) idx[dist[i].first] = i;
  for (Vertex v = 0; v < g.size(); ++v) {
    for (auto& it : all[v]) {
      if (it.dist == 0) continue;
      const auto& d = dist[idx[it.origin]].second;
      const auto nb = g.neighbors(v);
      for (std::uint32_t p = 0; p < nb.size(); ++p) {
        if (d[nb[p]] == it.dist - 1) {
          it.parent_port = p;
          break;
        }
      }
    }
  }
  return all;
}

BroadcastResult cluster_broadcast(const Graph& g, std::span<const Cluster> clusters,
                                  std::span<const Payload> payloads, std::uint32_t payload_bits,
                                  std::uint32_t overlap_cap, const SimConfig& cfg) {
  if (payloads.size() != clusters.size()) throw std::invalid_argument("one payload per cluster required");
  const TreeLayout lay = layout_trees(g, clusters, overlap_cap, cfg);
  BroadcastProgram prog(lay, clusters, payloads, g.id_bits() + payload_bits);
  BroadcastResult res;
  res.stats = run_program(g, prog, cfg);
  res.received = std::move(prog.received());
  return res;
}

ScalarConvergecastResult cluster_convergecast(const Graph& g, std::span<const Cluster> clusters,
                                              const std::vector<std::vector<std::uint64_t>>& values,
                                              Combine combine, std::uint32_t value_bits,
                                              std::uint32_t overlap_cap, const SimConfig& cfg) {
  if (values.size() != clusters.size()) throw std::invalid_argument("one value list per cluster required");
  const TreeLayout lay = layout_trees(g, clusters, overlap_cap, cfg);
  ScalarConvergecastProgram prog(lay, values, combine, g.id_bits() + value_bits, clusters.size());
  ScalarConvergecastResult res;
  res.stats = run_program(g, prog, cfg);
  res.at_center = std::move(prog.result());
  return res;
}

SetConvergecastResult cluster_convergecast_union(const Graph& g, std::span<const Cluster> clusters,
                                                 const std::vector<std::vector<std::vector<Ident>>>& items,
                                                 std::uint32_t item_cap, std::uint32_t overlap_cap,
                                                 const SimConfig& cfg) {
  if (items.size() != clusters.size()) throw std::invalid_argument("one item list per cluster required");
  const TreeLayout lay = layout_trees(g, clusters, overlap_cap, cfg);
  UnionConvergecastProgram prog(lay, items, item_cap, 2 * g.id_bits() + 1, clusters.size());
  SetConvergecastResult res;
  res.stats = run_program(g, prog, cfg);
  res.at_center = std::move(prog.result());
  res.provenance.resize(clusters.size());
  for (std::uint32_t ci = 0; ci < clusters.size(); ++ci) {
    for (Ident item : res.at_center[ci]) {
      std::vector<Vertex> path{clusters[ci].center};
      for (;;) {
        const Vertex x = path.back();
        const auto& slots = lay.at[x];
        const auto it = std::lower_bound(slots.begin(), slots.end(), clusters[ci].id,
                                         [](const TreeSlot& a, Ident b) { return a.id < b; });
        const auto& st = prog.state(x, it - slots.begin());
        std::uint32_t port = kNoPort;
        for (const auto& [val, p] : st.prov) {
          if (val == item) {
            port = p;
            break;
          }
        }
        if (port == kNoPort) break;
        path.push_back(g.neighbors(x)[port]);
      }
      res.provenance[ci].push_back(std::move(path));
    }
  }
  return res;
}

RouteResult route_packets(const Graph& g, std::span<const Packet> packets, const SimConfig& cfg) {
  RouteProgram prog(g, packets);
  prog.prepare();
  RouteResult res;
  res.stats = run_program(g, prog, cfg);
  res.arrival = std::move(prog.arrival());
  return res;
}

}  // namespace netdecomp
