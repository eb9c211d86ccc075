#include "netdecomp/netdecomp_rand.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

#include "netdecomp/netdecomp_det.hpp"

namespace netdecomp {

namespace {

// Strong cluster on H: BFS tree of H[members] from the center.
Cluster strong_cluster(const Graph& h, Vertex center, std::vector<Vertex> members, std::uint64_t color,
                       std::vector<std::uint32_t>& mark, std::uint32_t stamp) {
  std::sort(members.begin(), members.end());
  for (Vertex v : members) mark[v] = stamp;
  Cluster c;
  c.id = h.ident(center);
  c.center = center;
  c.color = color;
  std::vector<Vertex> q{center};
  std::vector<std::uint32_t> dist(1, 0);
  mark[center] = stamp + 1;
  for (std::size_t i = 0; i < q.size(); ++i) {
    for (std::size_t p = 0; p < h.degree(q[i]); ++p) {
      const Vertex u = h.neighbors(q[i])[p];
      if (mark[u] != stamp) continue;
      mark[u] = stamp + 1;
      q.push_back(u);
      dist.push_back(dist[i] + 1);
      c.tree_edges.push_back(h.port_edge(q[i], p));
    }
  }
  if (q.size() != members.size()) throw std::logic_error("cluster is not connected in H");
  std::sort(c.tree_edges.begin(), c.tree_edges.end());
  c.members = std::move(members);
  c.radius_g = dist.back();
  c.radius_gk = c.radius_g;
  return c;
}

// Connected pieces of `set` in H.
std::vector<std::vector<Vertex>> pieces(const Graph& h, const std::vector<Vertex>& set,
                                        std::vector<std::uint32_t>& mark, std::uint32_t stamp) {
  for (Vertex v : set) mark[v] = stamp;
  std::vector<std::vector<Vertex>> out;
  for (Vertex s : set) {
    if (mark[s] != stamp) continue;
    mark[s] = stamp + 1;
    std::vector<Vertex> comp{s};
    for (std::size_t i = 0; i < comp.size(); ++i) {
      for (Vertex u : h.neighbors(comp[i])) {
        if (mark[u] == stamp) {
          mark[u] = stamp + 1;
          comp.push_back(u);
        }
      }
    }
    out.push_back(std::move(comp));
  }
  return out;
}

struct Pair {
  Fixed m = 0;
  Ident src = 0;
};

// Higher value first, smaller source on ties.
bool better(const Pair& a, const Pair& b) { return a.m != b.m ? a.m > b.m : a.src < b.src; }

struct TopTwo {
  Pair p[2];
  std::uint8_t n = 0;

  bool merge(const Pair& e) {
    for (std::uint8_t i = 0; i < n; ++i) {
      if (p[i].src == e.src) {
        if (e.m <= p[i].m) return false;
        p[i].m = e.m;
        if (i == 1 && better(p[1], p[0])) std::swap(p[0], p[1]);
        return true;
      }
    }
    if (n < 2) {
      p[n++] = e;
      if (n == 2 && better(p[1], p[0])) std::swap(p[0], p[1]);
      return true;
    }
    if (!better(e, p[1])) return false;
    p[1] = e;
    if (better(p[1], p[0])) std::swap(p[0], p[1]);
    return true;
  }
};

class CarveProgram : public NodeProgram {
 public:
  CarveProgram(const std::vector<bool>& active, std::vector<Fixed> own, std::uint32_t pair_bits)
      : active_(active), own_(std::move(own)), pair_bits_(pair_bits), top_(active.size()) {}

  void init(Vertex v, const LocalView& view, Outbox& out) override {
    if (!active_[v] || own_[v] < 0) return;
    top_[v].merge({own_[v], view.id});
    send(v, out);
  }

  void step(Vertex v, const LocalView&, std::uint64_t, std::span<const Incoming> inbox, Outbox& out) override {
    if (!active_[v]) return;
    bool changed = false;
    for (const auto& in : inbox) {
      for (std::uint32_t i = 0; i < in.msg.tag; ++i) {
        const Fixed m = static_cast<Fixed>(in.msg.words[3 * i]) - kFixedOne - kFixedOne;
        if (m < -kFixedOne) continue;
        const Ident src = (static_cast<Ident>(in.msg.words[3 * i + 2]) << 64) | in.msg.words[3 * i + 1];
        changed |= top_[v].merge({m, src});
      }
    }
    if (changed) send(v, out);
  }

  const std::vector<TopTwo>& top() const { return top_; }

 private:
  void send(Vertex v, Outbox& out) {
    Message msg;
    const TopTwo& t = top_[v];
    for (std::uint8_t i = 0; i < t.n; ++i) {
      if (t.p[i].m < 0) continue;
      msg.words[3 * msg.tag] = static_cast<std::uint64_t>(t.p[i].m + kFixedOne);
      msg.words[3 * msg.tag + 1] = static_cast<std::uint64_t>(t.p[i].src);
      msg.words[3 * msg.tag + 2] = static_cast<std::uint64_t>(t.p[i].src >> 64);
      ++msg.tag;
    }
    if (msg.tag == 0) return;
    msg.bits = msg.tag * pair_bits_;
    out.broadcast(msg);
  }

  const std::vector<bool>& active_;
  std::vector<Fixed> own_;
  std::uint32_t pair_bits_;
  std::vector<TopTwo> top_;
};

CarveStep carve_impl(const Graph& h, const std::vector<bool>& active, std::span<const Vertex> sources,
                     std::vector<Fixed> shifts, const std::vector<std::uint64_t>& caps, const SimConfig& cfg) {
  if (active.size() != h.size()) throw std::invalid_argument("active mask size mismatch");
  std::vector<Fixed> own(h.size(), -1);
  std::uint64_t max_cap = 1;
  std::vector<std::pair<Ident, Vertex>> by_id;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    const Vertex v = sources[i];
    if (v >= h.size() || !active[v]) throw std::invalid_argument("carving source must be active");
    if (shifts[i] < 0) throw std::invalid_argument("negative shift");
    max_cap = std::max(max_cap, caps[i]);
    if (shifts[i] <= static_cast<Fixed>(caps[i]) * kFixedOne) own[v] = shifts[i];
    by_id.push_back({h.ident(v), v});
  }
  std::sort(by_id.begin(), by_id.end());
  const std::uint32_t pair_bits = carve_pair_bits(h, max_cap);
  SimConfig sc = cfg;
  sc.msg_bits = 2 * pair_bits;
  CarveProgram prog(active, std::move(own), pair_bits);

  CarveStep res;
  res.stats = run_program(h, prog, sc);
  res.sources.assign(sources.begin(), sources.end());
  res.shifts = std::move(shifts);
  for (Fixed s : res.shifts) res.max_shift = std::max(res.max_shift, s);
  res.center_of.assign(h.size(), kUnreached);
  res.reached.assign(h.size(), false);
  res.top_source.assign(h.size(), kUnreached);
  auto vertex_of = [&](Ident id) {
    const auto it = std::lower_bound(by_id.begin(), by_id.end(), std::pair<Ident, Vertex>{id, 0});
    return it->second;
  };
  for (Vertex v = 0; v < h.size(); ++v) {
    const TopTwo& t = prog.top()[v];
    if (t.n == 0) continue;
    res.reached[v] = true;
    res.top_source[v] = vertex_of(t.p[0].src);
    if (t.p[0].m >= 0 && (t.n == 1 || t.p[0].m - t.p[1].m > kFixedOne)) res.center_of[v] = res.top_source[v];
  }
  return res;
}

struct GroupCount {
  Fixed max_shift = 0;
  std::uint64_t reached = 0;
  std::uint64_t clustered = 0;
};

// Counts per group, attributing each reached node to the group of the source
// behind its best value.
std::vector<GroupCount> count_groups(const CarveStep& step, std::span<const Vertex> sources,
                                     const std::vector<std::uint32_t>& group_of, std::size_t groups) {
  std::vector<GroupCount> out(groups);
  for (std::size_t i = 0; i < sources.size(); ++i) {
    auto& gc = out[group_of[sources[i]]];
    gc.max_shift = std::max(gc.max_shift, step.shifts[i]);
  }
  for (Vertex v = 0; v < step.reached.size(); ++v) {
    if (!step.reached[v]) continue;
    auto& gc = out[group_of[step.top_source[v]]];
    ++gc.reached;
    if (step.center_of[v] != kUnreached) ++gc.clustered;
  }
  return out;
}

std::uint32_t smallest_s_with_tail(std::uint64_t n) {
  const double need = std::log(4.0 * static_cast<double>(std::max<std::uint64_t>(n, 1)));
  std::uint32_t s = 1;
  while (std::ldexp(1.0, static_cast<int>(s) - 2) < need) ++s;
  return s;
}

}  // namespace

MetaGraph MetaGraph::from_assignment(const Graph& g, std::vector<std::uint32_t> meta_of, std::vector<Vertex> leaders) {
  if (meta_of.size() != g.size()) throw std::invalid_argument("meta_of size mismatch");
  MetaGraph mg;
  const std::size_t n = leaders.size();
  mg.members.resize(n);
  for (Vertex v = 0; v < g.size(); ++v) {
    if (meta_of[v] == kUnreached) continue;
    if (meta_of[v] >= n) throw std::invalid_argument("meta-node index out of range");
    mg.members[meta_of[v]].push_back(v);
  }
  std::vector<Ident> ids(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (meta_of[leaders[i]] != i) throw std::invalid_argument("leader outside its meta-node");
    ids[i] = g.ident(leaders[i]);
  }
  std::vector<Edge> edges;
  for (const auto& e : g.edges()) {
    const auto a = meta_of[e.u], b = meta_of[e.v];
    if (a == kUnreached || b == kUnreached || a == b) continue;
    edges.push_back({std::min(a, b), std::max(a, b)});
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  mg.h = Graph::from_edges(n, std::move(edges), std::nullopt, std::move(ids));

  // Radius inside each meta-node.
  std::vector<std::uint32_t> dist(g.size(), kUnreached);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Vertex> q{leaders[i]};
    dist[leaders[i]] = 0;
    for (std::size_t j = 0; j < q.size(); ++j) {
      for (Vertex u : g.neighbors(q[j])) {
        if (meta_of[u] == i && dist[u] == kUnreached) {
          dist[u] = dist[q[j]] + 1;
          q.push_back(u);
        }
      }
    }
    if (q.size() != mg.members[i].size()) throw std::invalid_argument("meta-node is not connected");
    mg.radius = std::max(mg.radius, dist[q.back()]);
  }
  mg.meta_of = std::move(meta_of);
  mg.leader = std::move(leaders);
  return mg;
}

MetaGraph MetaGraph::singletons(const Graph& g) {
  std::vector<std::uint32_t> meta(g.size());
  std::vector<Vertex> leaders(g.size());
  for (Vertex v = 0; v < g.size(); ++v) meta[v] = leaders[v] = v;
  return from_assignment(g, std::move(meta), std::move(leaders));
}

Fixed to_fixed(double x) { return static_cast<Fixed>(std::floor(std::ldexp(x, kFracBits))); }
double from_fixed(Fixed x) { return std::ldexp(static_cast<double>(x), -kFracBits); }

double sample_exp(double beta, Stream& stream) {
  if (!(beta > 0)) throw std::invalid_argument("rate must be positive");
  return -std::log(stream.uniform_open0()) / beta;
}

CarveParams CarveParams::for_count(std::uint64_t n, bool literal) {
  CarveParams p;
  p.s = std::max<std::uint32_t>(1, det_phase_count(n));
  if (!literal) p.s = std::max(p.s, smallest_s_with_tail(n));
  p.beta = std::ldexp(1.0, -static_cast<int>(p.s) - 2);
  p.cap_d = std::uint64_t{1} << (2 * p.s);
  return p;
}

std::uint32_t carve_pair_bits(const Graph& h, std::uint64_t cap_d) {
  return width_of((cap_d + 1) << kFracBits) + h.id_bits();
}

CarveStep carve_with_shifts(const Graph& h, const std::vector<bool>& active, std::span<const Vertex> sources,
                            std::span<const Fixed> shifts, std::uint64_t cap_d, const SimConfig& cfg) {
  if (shifts.size() != sources.size()) throw std::invalid_argument("one shift per source");
  return carve_impl(h, active, sources, {shifts.begin(), shifts.end()},
                    std::vector<std::uint64_t>(sources.size(), cap_d), cfg);
}

CarveStep carve_step(const Graph& h, const std::vector<bool>& active, std::span<const Vertex> sources,
                     const CarveParams& params, std::uint64_t seed, std::uint64_t run, const SimConfig& cfg) {
  std::vector<Fixed> shifts;
  for (Vertex v : sources) {
    Stream st(seed, v, run);
    shifts.push_back(to_fixed(sample_exp(params.beta, st)));
  }
  return carve_impl(h, active, sources, std::move(shifts), std::vector<std::uint64_t>(sources.size(), params.cap_d),
                    cfg);
}

CarveRun evaluate_run(const CarveStep& step, std::span<const Vertex> sources, const CarveParams& params,
                      std::uint64_t run) {
  std::vector<bool> mine(step.reached.size(), false);
  for (Vertex v : sources) mine[v] = true;
  CarveRun r;
  r.run = run;
  Fixed max_shift = 0;
  for (std::size_t i = 0; i < step.sources.size(); ++i) {
    if (mine[step.sources[i]]) max_shift = std::max(max_shift, step.shifts[i]);
  }
  for (Vertex v = 0; v < step.reached.size(); ++v) {
    if (!step.reached[v] || !mine[step.top_source[v]]) continue;
    ++r.reached;
    if (step.center_of[v] != kUnreached) ++r.clustered;
  }
  r.max_shift = from_fixed(max_shift);
  r.success = max_shift <= static_cast<Fixed>(params.cap_d) * kFixedOne && params.fraction_ok(r.clustered, r.reached);
  return r;
}

std::string CarveRun::to_json() const {
  return nlohmann::json{{"run", run}, {"max_shift", max_shift}, {"reached", reached}, {"clustered", clustered},
                        {"success", success}}
      .dump();
}

GapEstimate gap_probability_check(std::span<const double> ds, double beta, std::uint64_t trials, std::uint64_t seed) {
  GapEstimate est;
  est.trials = trials;
  if (ds.size() < 2 || trials == 0) return est;
  std::uint64_t hits = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    double m1 = -INFINITY, m2 = -INFINITY;
    for (std::size_t j = 0; j < ds.size(); ++j) {
      Stream st(seed, j, t);
      const double x = sample_exp(beta, st) - ds[j];
      if (x > m1) {
        m2 = m1;
        m1 = x;
      } else if (x > m2) {
        m2 = x;
      }
    }
    if (m1 - m2 <= 1.0) ++hits;
  }
  est.probability = static_cast<double>(hits) / static_cast<double>(trials);
  est.sigma = std::sqrt(est.probability * (1 - est.probability) / static_cast<double>(trials));
  return est;
}

std::uint32_t carve_separation(const Graph& h, bool literal) {
  std::uint32_t count = 0;
  const auto comp = connected_components(h, &count);
  std::vector<std::uint64_t> size(count, 0);
  for (auto c : comp) ++size[c];
  std::uint64_t cap = 1;
  for (auto s : size) cap = std::max(cap, CarveParams::for_count(s, literal).cap_d);
  return static_cast<std::uint32_t>(2 * cap + 1);
}

CarveResult carve_decompose(const Graph& h, const Decomposition& intermediate, const CarveOptions& opt) {
  const std::size_t n = h.size();
  CarveResult res;
  res.dec.k = 1;
  if (n == 0) return res;
  if (intermediate.k < carve_separation(h, opt.literal_params))
    throw std::invalid_argument("intermediate decomposition is not separated enough for carving");

  std::uint32_t ncomp = 0;
  res.component = connected_components(h, &ncomp);
  std::vector<std::uint64_t> comp_size(ncomp, 0);
  for (auto c : res.component) ++comp_size[c];
  for (auto s : comp_size) res.params.push_back(CarveParams::for_count(s, opt.literal_params));

  std::vector<std::uint32_t> cluster_of(n, kUnreached);
  std::vector<std::uint64_t> colors;
  for (std::uint32_t i = 0; i < intermediate.clusters.size(); ++i) {
    const auto& c = intermediate.clusters[i];
    if (!c.color) throw std::invalid_argument("intermediate cluster without a color");
    colors.push_back(*c.color);
    for (Vertex v : c.members) {
      if (v >= n || cluster_of[v] != kUnreached) throw std::invalid_argument("intermediate is not a partition");
      cluster_of[v] = i;
    }
  }
  if (std::count(cluster_of.begin(), cluster_of.end(), kUnreached) != 0)
    throw std::invalid_argument("intermediate is not a partition");
  std::sort(colors.begin(), colors.end());
  colors.erase(std::unique(colors.begin(), colors.end()), colors.end());

  const std::uint32_t runs = opt.runs_per_step ? opt.runs_per_step : std::max<std::uint32_t>(32, ceil_log2(n));
  std::uint64_t max_cap = 1;
  for (const auto& p : res.params) max_cap = std::max(max_cap, p.cap_d);
  const std::uint32_t budget = resolve_budget(opt.sim, h);
  const std::uint64_t lane_bits = 2ull * carve_pair_bits(h, max_cap);
  const std::uint64_t multiplex = (runs * lane_bits + budget - 1) / budget;

  std::vector<bool> remaining(n, true);
  std::size_t left = n;
  std::vector<std::uint32_t> mark(n, 0);
  std::uint32_t stamp = 1;
  while (left > 0) {
    const std::uint64_t color_t = res.phases++;
    std::vector<bool> active = remaining;
    for (std::uint64_t col : colors) {
      // Groups: clusters of this color with active members.
      std::vector<std::uint32_t> group_of(n, kUnreached);
      std::vector<Vertex> sources;
      std::vector<std::uint32_t> group_cluster;
      std::vector<std::uint64_t> src_cap;
      for (std::uint32_t i = 0; i < intermediate.clusters.size(); ++i) {
        const auto& c = intermediate.clusters[i];
        if (*c.color != col) continue;
        bool any = false;
        for (Vertex v : c.members) {
          if (!active[v]) continue;
          if (!any) group_cluster.push_back(i);
          any = true;
          group_of[v] = static_cast<std::uint32_t>(group_cluster.size() - 1);
          sources.push_back(v);
        }
      }
      if (sources.empty()) continue;
      const std::size_t groups = group_cluster.size();
      std::vector<double> beta(sources.size());
      for (std::size_t i = 0; i < sources.size(); ++i) {
        const auto& p = res.params[res.component[sources[i]]];
        beta[i] = p.beta;
        src_cap.push_back(p.cap_d);
      }

      std::vector<bool> adopted(groups, false);
      std::size_t pending = groups;
      std::vector<std::uint32_t> joined(n, kUnreached);
      std::vector<bool> touched(n, false);
      for (std::uint32_t batch = 0; pending > 0; ++batch) {
        if (batch > opt.max_retries) throw std::runtime_error("every carving run failed for some cluster");
        if (batch > 0) ++res.retries;
        std::uint64_t batch_rounds = 0;
        for (std::uint32_t r = 0; r < runs && pending > 0; ++r) {
          // Keyed by (phase, color, lane) only, so a cluster's outcome does not
          // depend on far-away parts of H.
          const std::uint64_t run_id = mix64(mix64(color_t) ^ col) + std::uint64_t{batch} * runs + r;
          std::vector<Fixed> shifts(sources.size());
          for (std::size_t i = 0; i < sources.size(); ++i) {
            Stream st(opt.seed, sources[i], run_id);
            shifts[i] = to_fixed(sample_exp(beta[i], st));
          }
          const CarveStep step = carve_impl(h, active, sources, std::move(shifts), src_cap, opt.sim);
          batch_rounds = std::max(batch_rounds, step.stats.rounds);
          res.stats.max_bits_per_edge_round =
              std::max(res.stats.max_bits_per_edge_round, step.stats.max_bits_per_edge_round);
          res.stats.total_messages += step.stats.total_messages;
          const auto counts = count_groups(step, sources, group_of, groups);
          for (std::size_t gi = 0; gi < groups; ++gi) {
            if (adopted[gi]) continue;
            const auto& p = res.params[res.component[intermediate.clusters[group_cluster[gi]].members.front()]];
            CarveRun cr{run_id, from_fixed(counts[gi].max_shift), counts[gi].reached, counts[gi].clustered, false};
            cr.success = counts[gi].max_shift <= static_cast<Fixed>(p.cap_d) * kFixedOne &&
                         p.fraction_ok(cr.clustered, cr.reached);
            res.runs.push_back(cr);
            if (!cr.success) continue;
            adopted[gi] = true;
            --pending;
            for (Vertex v = 0; v < n; ++v) {
              if (!step.reached[v] || group_of[step.top_source[v]] != gi) continue;
              touched[v] = true;
              joined[v] = step.center_of[v];
            }
          }
        }
        // Runs are lanes of one execution; success is aggregated at each
        // cluster center and the choice announced.
        res.stats.rounds += batch_rounds * multiplex + 2 * (max_cap + 1);
      }
      ++res.steps;

      std::vector<std::vector<Vertex>> by_center(n);
      for (Vertex v = 0; v < n; ++v) {
        if (!touched[v]) continue;
        active[v] = false;
        if (joined[v] != kUnreached) {
          by_center[joined[v]].push_back(v);
          remaining[v] = false;
          --left;
        }
      }
      for (Vertex c = 0; c < n; ++c) {
        if (by_center[c].empty()) continue;
        res.dec.clusters.push_back(strong_cluster(h, c, std::move(by_center[c]), color_t, mark, stamp));
        stamp += 2;
      }
    }
  }
  return res;
}

std::uint32_t ball_grow_separation(const Graph& h) { return 2 * ceil_log2(std::max<std::size_t>(h.size(), 1)) + 2; }

BallGrowResult ball_grow_refine(const Graph& h, const Decomposition& intermediate) {
  const std::size_t n = h.size();
  BallGrowResult res;
  res.dec.k = 1;
  if (n == 0) return res;
  if (intermediate.k < ball_grow_separation(h))
    throw std::invalid_argument("intermediate decomposition is not separated enough for ball growing");
  std::vector<std::uint64_t> colors;
  std::vector<bool> seen(n, false);
  for (const auto& c : intermediate.clusters) {
    if (!c.color) throw std::invalid_argument("intermediate cluster without a color");
    colors.push_back(*c.color);
    for (Vertex v : c.members) {
      if (v >= n || seen[v]) throw std::invalid_argument("intermediate is not a partition");
      seen[v] = true;
    }
  }
  if (std::count(seen.begin(), seen.end(), false) != 0) throw std::invalid_argument("intermediate is not a partition");
  std::sort(colors.begin(), colors.end());
  colors.erase(std::unique(colors.begin(), colors.end()), colors.end());

  const std::uint32_t max_steps = ceil_log2(n);
  std::vector<bool> remaining(n, true);
  std::size_t left = n;
  std::vector<std::uint32_t> mark(n, 0);
  std::uint32_t stamp = 1;
  std::vector<std::uint32_t> in_ball(n, 0);
  std::uint32_t ball_stamp = 0;
  while (left > 0) {
    res.remaining.push_back(left);
    const std::uint64_t color_t = res.phases++;
    std::vector<bool> active = remaining;
    for (std::uint64_t col : colors) {
      std::uint64_t step_rounds = 0;
      for (const auto& c : intermediate.clusters) {
        if (*c.color != col) continue;
        std::vector<Vertex> ball;
        ++ball_stamp;
        for (Vertex v : c.members) {
          if (active[v]) {
            ball.push_back(v);
            in_ball[v] = ball_stamp;
          }
        }
        if (ball.empty()) continue;
        std::uint32_t steps = 0;
        std::vector<Vertex> layer;
        for (;;) {
          layer.clear();
          for (Vertex v : ball) {
            for (Vertex u : h.neighbors(v)) {
              if (active[u] && in_ball[u] != ball_stamp) {
                in_ball[u] = ball_stamp;
                layer.push_back(u);
              }
            }
          }
          if (layer.size() < ball.size()) break;
          if (steps == max_steps) throw std::logic_error("ball kept growing past log2 N steps");
          ++steps;
          ball.insert(ball.end(), layer.begin(), layer.end());
        }
        // Counts travel to the center and the verdict back, once per check.
        step_rounds = std::max<std::uint64_t>(step_rounds, std::uint64_t{steps + 1} * (steps + 1 + c.radius_gk) * 2);
        res.max_growth_steps = std::max(res.max_growth_steps, steps);
        for (Vertex u : layer) active[u] = false;
        for (Vertex v : ball) {
          active[v] = false;
          remaining[v] = false;
        }
        left -= ball.size();
        for (auto& piece : pieces(h, ball, mark, stamp)) {
          stamp += 2;
          const Vertex center = *std::min_element(piece.begin(), piece.end(), [&](Vertex a, Vertex b) {
            return h.ident(a) < h.ident(b);
          });
          res.dec.clusters.push_back(strong_cluster(h, center, std::move(piece), color_t, mark, stamp));
          stamp += 2;
        }
      }
      res.stats.rounds += step_rounds;
    }
  }
  res.remaining.push_back(0);
  return res;
}

}  // namespace netdecomp
