#include "netdecomp/mis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "json.hpp"
#include "netdecomp/netdecomp_det.hpp"
#include "netdecomp/primitives.hpp"
#include "netdecomp/rng.hpp"

namespace netdecomp {
namespace {

using nlohmann::json;

bool ident_bit(Ident x, unsigned b) { return ((x >> b) & 1) != 0; }

std::uint64_t lane_mask(std::uint32_t lanes) { return lanes >= 64 ? ~0ull : (1ull << lanes) - 1; }

// BFS trees of vertex-disjoint groups, each inside its own group.
std::vector<Cluster> tree_clusters(const Graph& g, const std::vector<std::vector<Vertex>>& groups,
                                   const std::vector<Vertex>& centers) {
  std::vector<std::uint32_t> owner(g.size(), kUnreached);
  for (std::uint32_t i = 0; i < groups.size(); ++i)
    for (Vertex v : groups[i]) owner[v] = i;
  std::vector<std::uint32_t> depth(g.size(), kUnreached);
  std::vector<Cluster> out(groups.size());
  for (std::uint32_t i = 0; i < groups.size(); ++i) {
    Cluster& c = out[i];
    c.center = centers[i];
    c.id = g.ident(c.center);
    c.members = groups[i];
    std::sort(c.members.begin(), c.members.end());
    std::vector<Vertex> q{c.center};
    depth[c.center] = 0;
    for (std::size_t j = 0; j < q.size(); ++j) {
      const Vertex v = q[j];
      const auto nb = g.neighbors(v);
      for (std::size_t p = 0; p < nb.size(); ++p) {
        const Vertex u = nb[p];
        if (owner[u] != i || depth[u] != kUnreached) continue;
        depth[u] = depth[v] + 1;
        c.radius_g = std::max(c.radius_g, depth[u]);
        c.tree_edges.push_back(g.port_edge(v, p));
        q.push_back(u);
      }
    }
    if (q.size() != c.members.size()) throw std::logic_error("cluster is not connected");
    std::sort(c.tree_edges.begin(), c.tree_edges.end());
  }
  return out;
}

// Every participant tells its neighbors which lanes it joined in; a lane is
// valid at v if v is in the set with no participating neighbor in it, or out
// of it with one.
class ValidityProgram : public NodeProgram {
 public:
  ValidityProgram(const std::vector<bool>& part, const std::vector<std::uint64_t>& in, std::uint32_t lanes)
      : part_(part), in_(in), lanes_(lanes), valid_(in) {}

  void init(Vertex v, const LocalView&, Outbox& out) override {
    if (!part_[v]) return;
    Message m;
    m.bits = lanes_;
    m.words[0] = in_[v];
    out.broadcast(m);
  }

  void step(Vertex v, const LocalView&, std::uint64_t, std::span<const Incoming> inbox, Outbox&) override {
    if (!part_[v]) return;
    std::uint64_t any = 0;
    for (const auto& in : inbox) any |= in.msg.words[0];
    valid_[v] = ((in_[v] & ~any) | (~in_[v] & any)) & lane_mask(lanes_);
  }

  std::vector<std::uint64_t> take() { return std::move(valid_); }

 private:
  const std::vector<bool>& part_;
  const std::vector<std::uint64_t>& in_;
  std::uint32_t lanes_;
  std::vector<std::uint64_t> valid_;
};

json stats_json(const RoundStats& s) { return json::parse(s.to_json()); }

}  // namespace

std::string ShatterReport::to_json() const {
  json j;
  j["undecided"] = undecided.size();
  j["components"] = component_sizes.size();
  j["max_component"] = max_component;
  j["bound"] = bound;
  j["fitted_c"] = fitted_c;
  j["p1_witness"] = p1_witness;
  const std::size_t shown = std::min<std::size_t>(component_sizes.size(), 20);
  j["largest_sizes"] = std::vector<std::size_t>(component_sizes.begin(), component_sizes.begin() + shown);
  return j.dump();
}

ShatterReport shatter_check(const Graph& g, std::span<const Vertex> undecided, std::size_t delta) {
  ShatterReport r;
  r.undecided.assign(undecided.begin(), undecided.end());
  std::sort(r.undecided.begin(), r.undecided.end());
  r.undecided.erase(std::unique(r.undecided.begin(), r.undecided.end()), r.undecided.end());
  const double d = static_cast<double>(std::max<std::size_t>(delta, 2));
  const double n = static_cast<double>(std::max<std::size_t>(g.size(), 2));
  r.bound = std::log(n) / std::log(d) * std::pow(d, 4);
  if (r.undecided.empty()) return r;

  const Graph gb = g.induced(r.undecided);
  std::uint32_t count = 0;
  const auto comp = connected_components(gb, &count);
  std::vector<std::size_t> size(count, 0);
  for (auto c : comp) ++size[c];
  const auto big = static_cast<std::uint32_t>(std::max_element(size.begin(), size.end()) - size.begin());
  r.component_sizes = size;
  std::sort(r.component_sizes.begin(), r.component_sizes.end(), std::greater<>());
  r.max_component = r.component_sizes.front();
  r.fitted_c = static_cast<double>(r.max_component) / r.bound;

  // Greedy witness in the largest component.
  std::vector<Vertex> members;
  for (Vertex i = 0; i < gb.size(); ++i)
    if (comp[i] == big) members.push_back(r.undecided[i]);
  std::vector<std::uint32_t> near(g.size(), kUnreached);
  std::vector<bool> taken(g.size(), false);
  auto absorb = [&](Vertex s) {
    taken[s] = true;
    std::vector<Vertex> q{s};
    std::vector<std::uint32_t> dist{0};
    std::map<Vertex, std::uint32_t> seen{{s, 0}};
    for (std::size_t j = 0; j < q.size(); ++j) {
      near[q[j]] = std::min(near[q[j]], dist[j]);
      if (dist[j] == 9) continue;
      for (Vertex u : g.neighbors(q[j])) {
        if (seen.count(u)) continue;
        seen[u] = dist[j] + 1;
        q.push_back(u);
        dist.push_back(dist[j] + 1);
      }
    }
  };
  absorb(members.front());
  std::size_t picked = 1;
  for (bool grew = true; grew;) {
    grew = false;
    for (Vertex v : members) {
      if (taken[v] || near[v] < 5 || near[v] > 9) continue;
      absorb(v);
      ++picked;
      grew = true;
    }
  }
  r.p1_witness = picked;
  return r;
}

RulingSetResult ruling_set(const Graph& g, std::span<const Vertex> base, std::uint32_t k, bool fast,
                           const SimConfig& cfg, RoundStats* stats) {
  if (k < 2) throw std::invalid_argument("ruling set needs k >= 2");
  RulingSetResult r;
  r.base.assign(base.begin(), base.end());
  std::sort(r.base.begin(), r.base.end());
  r.base.erase(std::unique(r.base.begin(), r.base.end()), r.base.end());
  r.alpha = k;
  r.beta = (k - 1) * g.id_bits();
  std::vector<bool> cand(g.size(), false);
  for (Vertex v : r.base) cand[v] = true;
  RoundStats st;
  for (int b = static_cast<int>(g.id_bits()) - 1; b >= 0; --b) {
    std::vector<FloodSource> src;
    bool any_one = false;
    for (Vertex v : r.base) {
      if (!cand[v]) continue;
      if (ident_bit(g.ident(v), b)) any_one = true;
      else src.push_back({v, g.ident(v), 0});
    }
    RoundStats step;
    if (!src.empty() && any_one) {
      std::vector<std::vector<FloodItem>> held;
      if (fast) {
        held = flood_oracle(g, src, k - 1, 1);
      } else {
        auto fr = bounded_flood(g, src, k - 1, 1, cfg);
        held = std::move(fr.held);
        step = std::move(fr.stats);
      }
      for (Vertex v : r.base)
        if (cand[v] && ident_bit(g.ident(v), b) && !held[v].empty()) cand[v] = false;
    }
    // Every bit takes k - 1 rounds on the fixed schedule.
    step.rounds = k - 1;
    st.append(step);
  }
  for (Vertex v : r.base)
    if (cand[v]) r.chosen.push_back(v);
  if (stats) stats->append(st);
  return r;
}

MetaGraph build_meta_graph(const Graph& g, std::span<const Vertex> base, std::span<const Vertex> chosen, bool fast,
                           const SimConfig& cfg, RoundStats* stats) {
  std::vector<Vertex> b(base.begin(), base.end());
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  std::vector<Vertex> leaders(chosen.begin(), chosen.end());
  std::sort(leaders.begin(), leaders.end());
  std::vector<std::uint32_t> local(g.size(), kUnreached);
  for (std::uint32_t i = 0; i < b.size(); ++i) local[b[i]] = i;
  const Graph gb = g.induced(b);

  std::vector<FloodSource> src;
  std::map<Ident, std::uint32_t> index_of;
  for (std::uint32_t i = 0; i < leaders.size(); ++i) {
    if (local[leaders[i]] == kUnreached) throw std::invalid_argument("chosen node outside the base");
    src.push_back({local[leaders[i]], g.ident(leaders[i]), 0});
    index_of[g.ident(leaders[i])] = i;
  }
  const auto hops = static_cast<std::uint32_t>(std::max<std::size_t>(gb.size(), 1));
  std::vector<std::vector<FloodItem>> held;
  if (fast) {
    held = flood_oracle(gb, src, hops, 1);
  } else {
    auto fr = bounded_flood(gb, src, hops, 1, cfg);
    held = std::move(fr.held);
    if (stats) stats->append(fr.stats);
  }
  std::vector<std::uint32_t> meta_of(g.size(), kUnreached);
  for (std::uint32_t i = 0; i < b.size(); ++i) {
    if (held[i].empty()) throw std::logic_error("base node not reached by any chosen node");
    meta_of[b[i]] = index_of.at(held[i].front().origin);
  }
  return MetaGraph::from_assignment(g, std::move(meta_of), std::move(leaders));
}

std::uint32_t preshatter_iterations(const Graph& g, double c1) {
  const double d = static_cast<double>(std::max<std::size_t>(g.max_degree(), 1));
  return static_cast<std::uint32_t>(std::ceil(c1 * (std::log2(d) + 1)));
}

MisResult mis_full(const Graph& g, const MisOptions& opt) {
  const std::size_t n = g.size();
  MisResult res;
  if (n == 0) return res;
  std::vector<MisStatus> st(n, MisStatus::kUndecided);

  // Shattering.
  LaneRunConfig pc;
  pc.seed = opt.seed;
  pc.iterations = opt.preshatter_rounds.value_or(preshatter_iterations(g, opt.c1));
  pc.fast = opt.fast;
  pc.sim = opt.sim;
  res.preshatter_iterations = pc.iterations;
  {
    auto pre = run_lanes(g, pc);
    st = std::move(pre.status);
    res.preshatter_stats = std::move(pre.stats);
    res.invariant_checks += pre.invariant_checks;
  }
  std::vector<Vertex> b;
  for (Vertex v = 0; v < n; ++v)
    if (st[v] == MisStatus::kUndecided) b.push_back(v);
  res.shatter = shatter_check(g, b, g.max_degree());

  if (!b.empty()) {
    const Graph gb = g.induced(b);
    std::vector<Vertex> all(gb.size());
    std::iota(all.begin(), all.end(), Vertex{0});

    // Clustering around a ruling set of G[B].
    auto rs = ruling_set(gb, all, opt.ruling_k, opt.fast, opt.sim, &res.ruling_stats);
    const MetaGraph mg = build_meta_graph(gb, all, rs.chosen, opt.fast, opt.sim, &res.ruling_stats);
    res.ruling = rs;
    res.ruling.base = b;
    for (auto& c : res.ruling.chosen) c = b[c];
    res.meta_nodes = mg.size();
    res.meta_radius = mg.radius;
    const Graph& h = mg.h;

    // Decomposition of H^K computed on G[B], then refined on H.
    const bool slow = opt.variant == MisVariant::kSlow;
    const std::uint32_t sep = slow ? ball_grow_separation(h) : carve_separation(h);
    const std::uint32_t stretch = 2 * mg.radius + 1;
    DetOptions dopt;
    dopt.k = (sep + 1) * stretch;
    dopt.fast = opt.fast;
    dopt.sim = opt.sim;
    const auto init = tree_clusters(gb, mg.members, mg.leader);
    const auto det = decompose(gb, dopt, &init);
    res.decomposition_stats = det.stats;
    Decomposition inter;
    inter.k = sep;
    for (const auto& c : det.dec.clusters) {
      Cluster hc;
      hc.center = mg.meta_of[c.center];
      hc.id = h.ident(hc.center);
      for (Vertex v : c.members) hc.members.push_back(mg.meta_of[v]);
      std::sort(hc.members.begin(), hc.members.end());
      hc.members.erase(std::unique(hc.members.begin(), hc.members.end()), hc.members.end());
      hc.color = c.color;
      inter.clusters.push_back(std::move(hc));
    }
    res.intermediate_colors = inter.colors_used();

    Decomposition fin;
    RoundStats refine;
    if (slow) {
      auto bg = ball_grow_refine(h, inter);
      fin = std::move(bg.dec);
      res.refine_phases = bg.phases;
      refine = std::move(bg.stats);
    } else {
      CarveOptions co;
      co.seed = opt.seed;
      co.sim = opt.sim;
      auto cr = carve_decompose(h, inter, co);
      fin = std::move(cr.dec);
      res.refine_phases = cr.phases;
      refine = std::move(cr.stats);
    }
    // One H round costs one crossing of a meta-node and an edge.
    refine.rounds *= stretch;
    res.decomposition_stats.append(refine);
    res.colors = fin.colors_used();

    // Parallel runs per color class.
    const double logn = std::log2(static_cast<double>(std::max<std::size_t>(n, 2)));
    const auto lanes = static_cast<std::uint32_t>(std::clamp(std::ceil(opt.c2 * logn), 1.0, 64.0));
    const double d = static_cast<double>(std::max<std::size_t>(g.max_degree(), 1));
    const auto iters = static_cast<std::uint32_t>(
        std::max(1.0, std::ceil(opt.c1 * (std::log2(d) + std::log2(std::max(logn, 1.0))))));
    std::map<std::uint64_t, std::vector<std::uint32_t>> by_color;
    for (std::uint32_t i = 0; i < fin.clusters.size(); ++i) by_color[fin.clusters[i].color.value_or(0)].push_back(i);

    for (const auto& [color, idx] : by_color) {
      std::vector<std::vector<Vertex>> groups;
      std::vector<Vertex> centers;
      for (auto i : idx) {
        std::vector<Vertex> verts;
        for (Vertex m : fin.clusters[i].members)
          for (Vertex v : mg.members[m]) verts.push_back(b[v]);
        groups.push_back(std::move(verts));
        centers.push_back(b[mg.leader[fin.clusters[i].center]]);
      }
      const auto supers = tree_clusters(g, groups, centers);
      ColorLog log;
      log.color = color;
      log.super_clusters = supers.size();
      log.lanes = lanes;
      log.iterations = iters;
      RoundStats cstats;
      std::vector<std::uint32_t> pending(supers.size());
      std::iota(pending.begin(), pending.end(), 0u);
      for (std::uint32_t attempt = 0; !pending.empty(); ++attempt) {
        if (attempt > opt.max_retries) throw std::runtime_error("no valid run for a cluster after every retry");
        std::vector<bool> part(n, false);
        std::size_t count = 0;
        for (auto i : pending)
          for (Vertex v : supers[i].members)
            if (st[v] == MisStatus::kUndecided) part[v] = true, ++count;
        if (attempt == 0) log.participants = count;
        if (count == 0) break;

        LaneRunConfig lc;
        lc.lanes = lanes;
        lc.seed = opt.seed;
        lc.run_base = (mix64(mix64(color + 1) + attempt) | 1ull) << 6;
        lc.iterations = iters;
        lc.participants = part;
        lc.fast = opt.fast;
        lc.sim = opt.sim;
        const auto lr = run_lanes(g, lc);
        res.invariant_checks += lr.invariant_checks;
        cstats.append(lr.stats);

        std::vector<std::uint64_t> in(n, 0);
        for (Vertex v = 0; v < n; ++v) {
          if (!part[v]) continue;
          for (std::uint32_t l = 0; l < lanes; ++l)
            if (lr.at(v, l) == MisStatus::kInMis) in[v] |= 1ull << l;
        }
        ValidityProgram vp(part, in, lanes);
        SimConfig vs = opt.sim;
        if (vs.msg_bits == 0) vs.msg_bits = std::max<std::uint32_t>(lanes, default_msg_bits(g.id_bits()));
        cstats.append(run_program(g, vp, vs));
        const auto valid = vp.take();

        std::vector<Cluster> pc_clusters;
        std::vector<std::vector<std::uint64_t>> values;
        for (auto i : pending) {
          pc_clusters.push_back(supers[i]);
          std::vector<std::uint64_t> vals;
          for (Vertex v : supers[i].members) vals.push_back(part[v] ? valid[v] : lane_mask(lanes));
          values.push_back(std::move(vals));
        }
        auto cc = cluster_convergecast(g, pc_clusters, values, Combine::kAnd, lanes, 1, opt.sim);
        cstats.append(cc.stats);
        std::vector<Payload> payloads(pending.size());
        for (std::size_t j = 0; j < pending.size(); ++j) {
          const std::uint64_t ok = cc.at_center[j] & lane_mask(lanes);
          payloads[j].w[0] = ok ? static_cast<std::uint64_t>(std::countr_zero(ok)) + 1 : 0;
        }
        auto bc = cluster_broadcast(g, pc_clusters, payloads, width_of(64), 1, opt.sim);
        cstats.append(bc.stats);

        std::vector<std::uint32_t> failed;
        std::vector<Vertex> joined;
        for (std::size_t j = 0; j < pending.size(); ++j) {
          const auto& c = supers[pending[j]];
          for (std::size_t m = 0; m < c.members.size(); ++m) {
            const Vertex v = c.members[m];
            const std::uint64_t choice = bc.received[j][m].w[0];
            if (choice == 0) continue;
            if (!part[v]) continue;
            if (lr.at(v, static_cast<std::uint32_t>(choice - 1)) == MisStatus::kInMis) {
              st[v] = MisStatus::kInMis;
              joined.push_back(v);
            } else {
              st[v] = MisStatus::kRemoved;
            }
          }
          if (payloads[j].w[0] == 0) failed.push_back(pending[j]);
        }
        // New members tell their neighbors to drop out: one bit, one round.
        RoundStats notify;
        if (!joined.empty()) {
          notify.rounds = 1;
          notify.max_bits_per_edge_round = 1;
        }
        for (Vertex v : joined)
          for (Vertex u : g.neighbors(v)) {
            if (st[u] == MisStatus::kUndecided) st[u] = MisStatus::kRemoved;
            notify.total_messages++;
          }
        cstats.append(notify);
        log.retries = attempt;
        pending = std::move(failed);
      }
      log.rounds = cstats.rounds;
      res.percolor_stats.append(cstats);
      res.per_color.push_back(log);
    }
  }

  for (Vertex v = 0; v < n; ++v)
    if (st[v] == MisStatus::kInMis) res.mis.push_back(v);
  const auto verdict = validate_mis(g, res.mis);
  if (!verdict.ok) throw std::logic_error("pipeline produced an invalid MIS: " + verdict.violation);
  res.stats = res.preshatter_stats;
  res.stats.append(res.ruling_stats);
  res.stats.append(res.decomposition_stats);
  res.stats.append(res.percolor_stats);
  return res;
}

std::string MisResult::to_json(const Graph& g) const {
  json j;
  std::vector<std::string> ids;
  for (Vertex v : mis) ids.push_back(ident_to_string(g.ident(v)));
  j["mis"] = mis;
  j["mis_idents"] = ids;
  j["size"] = mis.size();
  j["rounds"] = stats.rounds;
  j["stats"] = stats_json(stats);
  j["invariant_checks"] = invariant_checks;
  json pre;
  pre["iterations"] = preshatter_iterations;
  pre["stats"] = stats_json(preshatter_stats);
  pre["shatter"] = json::parse(shatter.to_json());
  json rs;
  rs["alpha"] = ruling.alpha;
  rs["beta"] = ruling.beta;
  rs["base"] = ruling.base.size();
  rs["chosen"] = ruling.chosen.size();
  rs["meta_nodes"] = meta_nodes;
  rs["meta_radius"] = meta_radius;
  rs["stats"] = stats_json(ruling_stats);
  json dec;
  dec["intermediate_colors"] = intermediate_colors;
  dec["colors"] = colors;
  dec["refine_phases"] = refine_phases;
  dec["stats"] = stats_json(decomposition_stats);
  json pcol = json::array();
  for (const auto& c : per_color)
    pcol.push_back({{"color", c.color},
                    {"super_clusters", c.super_clusters},
                    {"participants", c.participants},
                    {"lanes", c.lanes},
                    {"iterations", c.iterations},
                    {"retries", c.retries},
                    {"rounds", c.rounds}});
  json per;
  per["colors"] = pcol;
  per["stats"] = stats_json(percolor_stats);
  j["phases"] = {{"preshatter", pre}, {"rulingset", rs}, {"decomposition", dec}, {"percolor", per}};
  return j.dump();
}

}  // namespace netdecomp
