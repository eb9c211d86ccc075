#include "netdecomp/linial.hpp"

#include <algorithm>
#include <stdexcept>

namespace netdecomp {

namespace {

bool is_prime(std::uint64_t x) {
  if (x < 2) return false;
  for (std::uint64_t d = 2; d * d <= x; ++d) {
    if (x % d == 0) return false;
  }
  return true;
}

std::uint64_t next_prime(std::uint64_t x) {
  while (!is_prime(x)) ++x;
  return x;
}

// Smallest r with r^(e) >= m.
std::uint64_t int_root_ceil(Color m, std::uint32_t e) {
  auto pow_ge = [&](std::uint64_t r) {
    Color acc = 1;
    for (std::uint32_t i = 0; i < e; ++i) {
      if (acc > m / r) return true;
      acc *= r;
      if (acc >= m) return true;
    }
    return acc >= m;
  };
  std::uint64_t lo = 1;
  std::uint64_t hi = 1;
  while (!pow_ge(hi)) {
    // Callers only use roots below 2^31.
    if (hi >= (std::uint64_t{1} << 32)) return hi;
    hi *= 2;
  }
  while (lo < hi) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (pow_ge(mid)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

// Coefficients of the polynomial of color x: its base-q digits.
void digits(Color x, std::uint64_t q, std::uint32_t t, std::vector<std::uint64_t>& out) {
  out.assign(t + 1, 0);
  for (std::uint32_t i = 0; i <= t; ++i) {
    out[i] = static_cast<std::uint64_t>(x % q);
    x /= q;
  }
}

std::uint64_t eval(const std::vector<std::uint64_t>& c, std::uint64_t a, std::uint64_t q) {
  std::uint64_t acc = 0;
  for (std::size_t i = c.size(); i-- > 0;) acc = static_cast<std::uint64_t>((static_cast<Color>(acc) * a + c[i]) % q);
  return acc;
}

}  // namespace

std::vector<LinialPlan> linial_schedule(Color initial_palette, std::uint64_t max_degree) {
  std::vector<LinialPlan> plan;
  if (max_degree == 0) return plan;
  Color m = initial_palette;
  for (;;) {
    LinialPlan best;
    for (std::uint32_t t = 1; t <= 128; ++t) {
      const Color need_deg = static_cast<Color>(t) * max_degree + 1;
      if (need_deg >= (Color{1} << 62)) break;
      const std::uint64_t lower = std::max(static_cast<std::uint64_t>(need_deg), int_root_ceil(m, t + 1));
      if (lower >= (std::uint64_t{1} << 31)) continue;
      const std::uint64_t q = next_prime(std::max<std::uint64_t>(lower, 2));
      if (best.q == 0 || q < best.q) best = {q, t, m, static_cast<Color>(q) * q};
    }
    if (best.q == 0) throw std::runtime_error("linial: degree bound too large for a field below 2^31");
    if (best.palette_out >= m) break;
    plan.push_back(best);
    m = best.palette_out;
  }
  return plan;
}

Color linial_step(const LinialPlan& plan, Color own, std::span<const Color> neighbors) {
  std::vector<std::uint64_t> mine;
  digits(own, plan.q, plan.t, mine);
  std::vector<std::vector<std::uint64_t>> theirs(neighbors.size());
  for (std::size_t i = 0; i < neighbors.size(); ++i) digits(neighbors[i], plan.q, plan.t, theirs[i]);
  for (std::uint64_t a = 0; a < plan.q; ++a) {
    const std::uint64_t v = eval(mine, a, plan.q);
    bool clash = false;
    for (const auto& c : theirs) {
      if (eval(c, a, plan.q) == v) {
        clash = true;
        break;
      }
    }
    if (!clash) return static_cast<Color>(a) * plan.q + v;
  }
  throw std::logic_error("linial: degree bound violated (no free evaluation point)");
}

ColoringResult linial_color(const Graph& view, std::span<const Color> initial, Color initial_palette,
                            std::uint64_t degree_bound) {
  if (initial.size() != view.size()) throw std::invalid_argument("one initial color per node required");
  if (view.max_degree() > degree_bound) throw std::invalid_argument("degree bound below the view's max degree");
  ColoringResult res;
  res.colors.assign(initial.begin(), initial.end());
  const auto plan = linial_schedule(initial_palette, degree_bound);
  if (degree_bound == 0) {
    std::fill(res.colors.begin(), res.colors.end(), 0);
    res.palette = 1;
    return res;
  }
  std::vector<Color> next(view.size());
  std::vector<Color> nb;
  for (const auto& p : plan) {
    for (Vertex v = 0; v < view.size(); ++v) {
      nb.clear();
      for (Vertex u : view.neighbors(v)) nb.push_back(res.colors[u]);
      next[v] = linial_step(p, res.colors[v], nb);
    }
    res.colors.swap(next);
    ++res.iterations;
  }
  res.palette = plan.empty() ? initial_palette : plan.back().palette_out;
  return res;
}

namespace {

class LinialProgram : public NodeProgram {
 public:
  LinialProgram(const Graph& g, std::vector<LinialPlan> plan, unsigned color_bits)
      : plan_(std::move(plan)), colors_(g.size()), bits_(color_bits) {}

  void init(Vertex v, const LocalView& view, Outbox& out) override {
    colors_[v] = view.id;
    if (!plan_.empty()) {
      send(v, out);
      out.wake();
    }
  }

  void step(Vertex v, const LocalView&, std::uint64_t round, std::span<const Incoming> inbox, Outbox& out) override {
    std::vector<Color> nb;
    for (const auto& in : inbox) nb.push_back((static_cast<Color>(in.msg.words[1]) << 64) | in.msg.words[0]);
    colors_[v] = linial_step(plan_[round - 1], colors_[v], nb);
    if (round < plan_.size()) {
      send(v, out);
      out.wake();
    }
  }

  std::vector<Color>& colors() { return colors_; }

 private:
  void send(Vertex v, Outbox& out) {
    Message m;
    m.bits = bits_;
    m.words[0] = static_cast<std::uint64_t>(colors_[v]);
    m.words[1] = static_cast<std::uint64_t>(colors_[v] >> 64);
    out.broadcast(m);
  }

  std::vector<LinialPlan> plan_;
  std::vector<Color> colors_;
  unsigned bits_;
};

}  // namespace

ColoringResult linial_color_congest(const Graph& g, const SimConfig& cfg) {
  const Color palette = g.id_bits() >= 128 ? ~Color{0} : (Color{1} << g.id_bits());
  const auto plan = linial_schedule(palette, g.max_degree());
  ColoringResult res;
  if (g.max_degree() == 0) {
    res.colors.assign(g.size(), 0);
    return res;
  }
  LinialProgram prog(g, plan, g.id_bits());
  res.stats = run_program(g, prog, cfg);
  res.colors = std::move(prog.colors());
  res.iterations = static_cast<std::uint32_t>(plan.size());
  res.palette = plan.empty() ? palette : plan.back().palette_out;
  return res;
}

}  // namespace netdecomp
