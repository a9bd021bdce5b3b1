#include "tqmc/discrepancy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <queue>
#include <stdexcept>

namespace tqmc {

namespace {

double mod1(double v) {
  v -= std::floor(v);
  return v >= 1.0 ? 0.0 : v;
}

// Closed periodic interval [x, x + s] (mod 1) membership; same rule as Window.
bool in_periodic(double t, double x, double s) {
  double d = t - x;
  if (d < 0) d += 1.0;
  return d <= s;
}

struct Scored {
  double value;
  std::uint64_t index;
};

// Better = larger value, then smaller index.
struct WorseFirst {
  bool operator()(const Scored& a, const Scored& b) const {
    if (a.value != b.value) return a.value > b.value;
    return a.index < b.index;
  }
};

class Evaluator {
 public:
  Evaluator(const WeightedPoints& pts, const ConvexBody& body) : pts_(pts), body_(body) {}

  double signed_at(const Window& w) {
    ++evaluations;
    return local_discrepancy(pts_, body_, w);
  }

  double area(const Window& w) {
    ++evaluations;
    return clip_area(body_, w);
  }
  const WeightedPoints& points() const { return pts_; }

  long evaluations = 0;

 private:
  const WeightedPoints& pts_;
  const ConvexBody& body_;
};

struct Candidate {
  Window w;
  double signed_value;
};

// Shrink onto included points when the count is in excess; grow up to the
// next excluded points when it is in deficit.
Candidate snap(const WeightedPoints& pts, Evaluator& eval, const Candidate& c) {
  constexpr double kNudge = 1e-12;
  Candidate best = c;
  const Window& w = c.w;
  if (c.signed_value > 0) {
    double lo[2] = {1, 1}, hi[2] = {0, 0};
    bool any = false;
    for (std::size_t i = 0; i < pts.coords.size(); ++i) {
      if (!w.contains(pts.coords[i])) continue;
      any = true;
      for (int k = 0; k < 2; ++k) {
        double d = pts.coords[i][k] - w.x[k];
        if (d < 0) d += 1.0;
        lo[k] = std::min(lo[k], d);
        hi[k] = std::max(hi[k], d);
      }
    }
    if (!any) return best;
    Window t = Window::make({hi[0] - lo[0], hi[1] - lo[1]}, {w.x[0] + lo[0], w.x[1] + lo[1]});
    double v = eval.signed_at(t);
    if (std::abs(v) > std::abs(best.signed_value)) best = {t, v};
    return best;
  }
  if (c.signed_value < 0) {
    Window t = w;
    for (int k = 0; k < 2; ++k) {
      const int o = 1 - k;
      // Grow the far edge along axis k.
      double next = 1.0;
      for (const auto& p : pts.coords) {
        if (!in_periodic(p[o], t.x[o], t.s[o])) continue;
        double d = p[k] - t.x[k];
        if (d < 0) d += 1.0;
        if (d > t.s[k]) next = std::min(next, d);
      }
      t.s[k] = std::clamp(next - kNudge, t.s[k], 1.0 - Window::kMinSide);
      // Grow the near edge backwards along axis k.
      double back = 1.0;
      for (const auto& p : pts.coords) {
        if (!in_periodic(p[o], t.x[o], t.s[o])) continue;
        double e = t.x[k] - p[k];
        if (e <= 0) e += 1.0;
        if (e > 0 && !in_periodic(p[k], t.x[k], t.s[k])) back = std::min(back, e);
      }
      double room = 1.0 - Window::kMinSide - t.s[k];
      double step = std::clamp(back - kNudge, 0.0, room);
      t.x[k] = mod1(t.x[k] - step);
      t.s[k] += step;
    }
    t = Window::make(t.s, t.x);
    double v = eval.signed_at(t);
    if (std::abs(v) > std::abs(best.signed_value)) best = {t, v};
  }
  return best;
}

// Exact 1D optimisation of one edge: the far edge (low = false) or the near
// edge (low = true) along axis k, over critical positions within `span` of
// the current one.
Candidate sweep_edge(Evaluator& eval, const Candidate& c, int k, bool low, double span) {
  constexpr double kNudge = 1e-12;
  const WeightedPoints& pts = eval.points();
  const int o = 1 - k;
  const double end = c.w.x[k] + c.w.s[k];  // fixed when the near edge moves
  std::vector<std::pair<double, int>> offs;
  for (std::size_t i = 0; i < pts.coords.size(); ++i) {
    const Vec2& p = pts.coords[i];
    if (!in_periodic(p[o], c.w.x[o], c.w.s[o])) continue;
    double d = low ? mod1(end - p[k]) : mod1(p[k] - c.w.x[k]);
    offs.emplace_back(d, pts.weight[i]);
  }
  std::sort(offs.begin(), offs.end());
  std::vector<long> cum(offs.size() + 1, 0);
  for (std::size_t i = 0; i < offs.size(); ++i) cum[i + 1] = cum[i] + offs[i].second;
  const double n = static_cast<double>(pts.total);
  auto window_for = [&](double side) {
    Vec2 s = c.w.s, x = c.w.x;
    s[k] = side;
    if (low) x[k] = end - side;
    return Window::make(s, x);
  };
  Candidate best = c;
  double best_abs = std::abs(c.signed_value);
  double lo = std::max(Window::kMinSide, c.w.s[k] - span), hi = std::min(1.0 - Window::kMinSide, c.w.s[k] + span);
  for (std::size_t i = 0; i < offs.size(); ++i) {
    for (double side : {offs[i].first, offs[i].first - kNudge}) {
      if (side < lo || side > hi) continue;
      Window w = window_for(side);
      // Points with offset <= side; side itself is one of the sorted offsets or just below.
      auto idx = static_cast<std::size_t>(
          std::upper_bound(offs.begin(), offs.end(), std::make_pair(side, std::numeric_limits<int>::max())) -
          offs.begin());
      double v = static_cast<double>(cum[idx]) / n - eval.area(w);
      if (std::abs(v) > best_abs) {
        best_abs = std::abs(v);
        best = {w, v};
      }
    }
  }
  if (best_abs > std::abs(c.signed_value)) best.signed_value = eval.signed_at(best.w);
  return std::abs(best.signed_value) > std::abs(c.signed_value) ? best : c;
}

Candidate coordinate_ascent(Evaluator& eval, Candidate c, double span) {
  for (int round = 0; round < 8; ++round) {
    const double before = std::abs(c.signed_value);
    for (int k = 0; k < 2; ++k)
      for (bool low : {false, true}) c = sweep_edge(eval, c, k, low, span);
    if (!(std::abs(c.signed_value) > before)) break;
  }
  return c;
}

Candidate refine(Evaluator& eval, Candidate c, double step, int depth) {
  for (int round = 0; round < depth; ++round) {
    Candidate best = c;
    for (int code = 0; code < 81; ++code) {
      if (code == 40) continue;  // the center itself
      int q = code;
      double d[4];
      for (double& di : d) {
        di = (q % 3 - 1) * step;
        q /= 3;
      }
      Window t = Window::make({c.w.s[0] + d[0], c.w.s[1] + d[1]}, {c.w.x[0] + d[2], c.w.x[1] + d[3]});
      double v = eval.signed_at(t);
      if (std::abs(v) > std::abs(best.signed_value)) best = {t, v};
    }
    c = best;
    step *= 0.5;
  }
  return c;
}

// Screens all G^4 grid windows and returns the best `top` of them.
std::vector<Candidate> screen(const WeightedPoints& pts, const ConvexBody& body, int G, int top) {
  const std::size_t g = static_cast<std::size_t>(G);
  std::vector<double> cell_count(g * g, 0.0), cell_area(g * g, 0.0);
  for (std::size_t i = 0; i < pts.coords.size(); ++i) {
    auto a = std::min(g - 1, static_cast<std::size_t>(pts.coords[i].x() * G));
    auto b = std::min(g - 1, static_cast<std::size_t>(pts.coords[i].y() * G));
    cell_count[a * g + b] += pts.weight[i];
  }
  const double inv = 1.0 / G;
  for (std::size_t a = 0; a < g; ++a)
    for (std::size_t b = 0; b < g; ++b)
      cell_area[a * g + b] = clip_area(body, Window::make({inv, inv}, {a * inv, b * inv}));
  // Prefix sums over the doubled (periodic) grid.
  const std::size_t m = 2 * g + 1;
  std::vector<double> pc(m * m, 0.0), pa(m * m, 0.0);
  for (std::size_t i = 1; i < m; ++i)
    for (std::size_t j = 1; j < m; ++j) {
      std::size_t cell = ((i - 1) % g) * g + (j - 1) % g;
      pc[i * m + j] = cell_count[cell] + pc[(i - 1) * m + j] + pc[i * m + j - 1] - pc[(i - 1) * m + j - 1];
      pa[i * m + j] = cell_area[cell] + pa[(i - 1) * m + j] + pa[i * m + j - 1] - pa[(i - 1) * m + j - 1];
    }
  auto box = [m](const std::vector<double>& p, std::size_t a, std::size_t b, std::size_t k, std::size_t l) {
    return p[(a + k) * m + b + l] - p[a * m + b + l] - p[(a + k) * m + b] + p[a * m + b];
  };
  const double n = static_cast<double>(pts.total);
  std::priority_queue<Scored, std::vector<Scored>, WorseFirst> heap;
  for (std::size_t a = 0; a < g; ++a)
    for (std::size_t b = 0; b < g; ++b)
      for (std::size_t k = 1; k <= g; ++k)
        for (std::size_t l = 1; l <= g; ++l) {
          double v = std::abs(box(pc, a, b, k, l) / n - box(pa, a, b, k, l));
          std::uint64_t idx = ((a * g + b) * g + (k - 1)) * g + (l - 1);
          Scored s{v, idx};
          if (heap.size() < static_cast<std::size_t>(top)) {
            heap.push(s);
          } else if (WorseFirst{}(s, heap.top())) {
            heap.pop();
            heap.push(s);
          }
        }
  std::vector<Scored> best;
  while (!heap.empty()) {
    best.push_back(heap.top());
    heap.pop();
  }
  std::reverse(best.begin(), best.end());
  std::vector<Candidate> out;
  for (const auto& s : best) {
    std::uint64_t idx = s.index;
    std::size_t l = idx % g + 1;
    idx /= g;
    std::size_t k = idx % g + 1;
    idx /= g;
    std::size_t b = idx % g;
    std::size_t a = idx / g;
    out.push_back({Window::make({k * inv, l * inv}, {a * inv, b * inv}), 0.0});
  }
  return out;
}

}  // namespace

WeightedPoints::WeightedPoints(const PointSet& points, const ConvexBody& body) {
  total = static_cast<long>(points.size());
  for (Eigen::Index j = 0; j < points.coords.cols(); ++j) {
    Vec2 p = points.coords.col(j);
    int w = translate_multiplicity(body, p);
    if (w > 0) {
      coords.push_back(p);
      weight.push_back(w);
      weight_sum += w;
    }
  }
}

const char* to_string(DiscMethod m) { return m == DiscMethod::grid_refine ? "grid_refine" : "critical_enum"; }

long window_count(const WeightedPoints& points, const Window& w) {
  long count = 0;
  for (std::size_t i = 0; i < points.coords.size(); ++i)
    if (w.contains(points.coords[i])) count += points.weight[i];
  return count;
}

double local_discrepancy(const WeightedPoints& points, const ConvexBody& body, const Window& w) {
  return static_cast<double>(window_count(points, w)) / static_cast<double>(points.total) - clip_area(body, w);
}

double local_discrepancy(const PointSet& points, const ConvexBody& body, const Window& w) {
  return local_discrepancy(WeightedPoints(points, body), body, w);
}

DiscrepancyEstimate sup_search(const PointSet& points, const ConvexBody& body, int G, int depth, int top) {
  if (G < 8 || (G & (G - 1)) != 0) throw std::invalid_argument("sup_search: G must be a power of two >= 8");
  if (depth < 0) throw std::invalid_argument("sup_search: depth must be nonnegative");
  if (top < 1) throw std::invalid_argument("sup_search: need at least one refined candidate");
  WeightedPoints pts(points, body);
  Evaluator eval(pts, body);
  DiscrepancyEstimate out;
  out.method = DiscMethod::grid_refine;
  out.grid_size = G;
  out.depth = depth;
  out.value = -1.0;
  for (int level = 8; level <= G; level *= 2) {
    for (Candidate c : screen(pts, body, level, top)) {
      c.signed_value = eval.signed_at(c.w);
      c = refine(eval, c, 0.5 / level, depth);
      c = snap(pts, eval, c);
      c = coordinate_ascent(eval, c, 2.0 / level);
      if (std::abs(c.signed_value) > out.value) {
        out.value = std::abs(c.signed_value);
        out.signed_value = c.signed_value;
        out.arg_window = c.w;
      }
    }
  }
  out.evaluations = eval.evaluations;
  return out;
}

DiscrepancyEstimate sup_oracle_smallN(const PointSet& points, const ConvexBody& body, int grid, double nudge) {
  if (points.size() > 128) throw std::invalid_argument("sup_oracle_smallN: N must be at most 128");
  if (grid < 1) throw std::invalid_argument("sup_oracle_smallN: grid must be positive");
  WeightedPoints pts(points, body);
  const double n = static_cast<double>(pts.total);

  auto candidates = [&](int axis, double sign) {
    std::vector<double> c;
    for (const auto& p : pts.coords) {
      c.push_back(p[axis]);
      c.push_back(mod1(p[axis] + sign * nudge));
    }
    for (int k = 0; k < grid; ++k) c.push_back(static_cast<double>(k) / grid);
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    return c;
  };
  const auto x_lo = candidates(0, +1), x_hi = candidates(0, -1);
  const auto y_lo = candidates(1, +1), y_hi = candidates(1, -1);
  std::vector<double> y_all(y_lo);
  y_all.insert(y_all.end(), y_hi.begin(), y_hi.end());
  std::sort(y_all.begin(), y_all.end());
  y_all.erase(std::unique(y_all.begin(), y_all.end()), y_all.end());

  // Events of the y sweep: lower edges (type 0) before upper edges (type 1) at equal y.
  struct Event {
    double y;
    int type;
    std::size_t slot;  // index into y_all
  };
  std::vector<Event> events;
  for (double y : y_lo)
    events.push_back({y, 0, static_cast<std::size_t>(std::lower_bound(y_all.begin(), y_all.end(), y) - y_all.begin())});
  for (double y : y_hi)
    events.push_back({y, 1, static_cast<std::size_t>(std::lower_bound(y_all.begin(), y_all.end(), y) - y_all.begin())});
  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    return a.y != b.y ? a.y < b.y : a.type < b.type;
  });

  DiscrepancyEstimate out;
  out.method = DiscMethod::critical_enum;
  out.grid_size = grid;
  out.value = -1.0;
  double best = -1.0;
  double best_l = 0, best_s1 = Window::kMinSide, best_a = 0, best_s2 = Window::kMinSide;

  std::vector<double> F(y_all.size());
  std::vector<std::pair<double, int>> strip;
  std::vector<double> lower_area(y_all.size()), upper_area(y_all.size());
  for (double l : x_lo) {
    for (double r : x_hi) {
      double s1 = std::max(mod1(r - l), Window::kMinSide);
      if (s1 > 1.0 - Window::kMinSide) continue;
      strip.clear();
      for (std::size_t i = 0; i < pts.coords.size(); ++i)
        if (in_periodic(pts.coords[i].x(), l, s1)) strip.emplace_back(pts.coords[i].y(), pts.weight[i]);
      std::sort(strip.begin(), strip.end());
      std::vector<double> ys(strip.size());
      std::vector<long> cum(strip.size() + 1, 0);
      for (std::size_t i = 0; i < strip.size(); ++i) {
        ys[i] = strip[i].first;
        cum[i + 1] = cum[i] + strip[i].second;
      }
      const long ctot = cum.back();
      for (std::size_t i = 0; i < y_all.size(); ++i)
        F[i] = y_all[i] <= 0.0 ? 0.0 : clip_area(body, Window::make({s1, y_all[i]}, {l, 0.0}));
      const double f_one = clip_area(body, Window::make({s1, 1.0}, {l, 0.0}));
      out.evaluations += static_cast<long>(y_all.size()) + 1;
      auto c_lt = [&](double a) { return cum[static_cast<std::size_t>(std::lower_bound(ys.begin(), ys.end(), a) - ys.begin())]; };
      auto c_le = [&](double b) { return cum[static_cast<std::size_t>(std::upper_bound(ys.begin(), ys.end(), b) - ys.begin())]; };
      auto La = [&](const Event& e) { return c_lt(e.y) / n - F[e.slot]; };
      auto Hb = [&](const Event& e) { return c_le(e.y) / n - F[e.slot]; };
      auto consider = [&](double v, double a, double b) {
        if (std::abs(v) > best) {
          best = std::abs(v);
          best_l = l;
          best_s1 = s1;
          best_a = a;
          best_s2 = std::max(mod1(b - a), Window::kMinSide);
        }
      };
      // Intervals [a, b] with a <= b.
      {
        double mn = 0, mx = 0, a_mn = 0, a_mx = 0;
        bool seen = false;
        for (const auto& e : events) {
          if (e.type == 0) {
            double v = La(e);
            if (!seen || v < mn) mn = v, a_mn = e.y;
            if (!seen || v > mx) mx = v, a_mx = e.y;
            seen = true;
          } else if (seen) {
            double h = Hb(e);
            if (e.y - a_mn <= 1.0 - Window::kMinSide) consider(h - mn, a_mn, e.y);
            if (e.y - a_mx <= 1.0 - Window::kMinSide) consider(h - mx, a_mx, e.y);
          }
        }
      }
      // Wrapping intervals [a, 1) ∪ [0, b] with a > b.
      {
        const double t = static_cast<double>(ctot) / n - f_one;
        double mn = 0, mx = 0, a_mn = 0, a_mx = 0;
        bool seen = false;
        for (auto it = events.rbegin(); it != events.rend(); ++it) {
          const Event& e = *it;
          if (e.type == 0) {
            double v = La(e);
            if (!seen || v < mn) mn = v, a_mn = e.y;
            if (!seen || v > mx) mx = v, a_mx = e.y;
            seen = true;
          } else if (seen) {
            double h = Hb(e);
            consider(t + h - mn, a_mn, e.y);
            consider(t + h - mx, a_mx, e.y);
          }
        }
      }
    }
  }
  out.arg_window = Window::make({best_s1, best_s2}, {best_l, best_a});
  out.signed_value = local_discrepancy(pts, body, out.arg_window);
  out.value = std::abs(out.signed_value);
  out.slack = (4.0 + body.perimeter()) * (nudge + 1.0 / grid);
  return out;
}

std::vector<EtBound> et_structural_bound(const KroneckerSpec& spec, const ConvexBody& body, const Window& w,
                                         const EtKernelConfig& cfg, const std::vector<long>& Ns) {
  cfg.validate();
  if (!(cfg.R >= 1)) throw std::invalid_argument("et_structural_bound: R must be at least 1");
  for (long N : Ns)
    if (N < 1) throw std::invalid_argument("et_structural_bound: N must be at least 1");
  PhaseTable phases(spec);
  std::vector<Region> regions = decompose_intersection(body, w);
  std::vector<EtBound> out(Ns.size());
  for (auto& b : out) b.pieces = static_cast<int>(regions.size());
  const long bound = static_cast<long>(std::ceil(cfg.R));
  const double R2 = cfg.R * cfg.R;
  for (const auto& k : regions) {
    LevelSetTransform kernel(k, cfg);
    FourierSample h0 = kernel.at(Vec2::Zero());
    for (auto& b : out) {
      b.h_zero += std::abs(h0.value);
      b.value += std::abs(h0.value);
      b.est_abs_error += h0.est_abs_error;
    }
    for (long n1 = -bound; n1 <= bound; ++n1)
      for (long n2 = -bound; n2 <= bound; ++n2) {
        double q = static_cast<double>(n1 * n1 + n2 * n2);
        if (q == 0.0 || !(q < R2)) continue;
        Vec2 n(static_cast<double>(n1), static_cast<double>(n2));
        FourierSample chi = chi_hat(k.boundary, n);
        FourierSample h = kernel.at(n);
        for (std::size_t i = 0; i < Ns.size(); ++i) {
          double e = exp_sum_abs(phases.theta_bits(n1, n2), Ns[i]);
          out[i].value += (std::abs(chi.value) + std::abs(h.value)) * e;
          out[i].est_abs_error += (chi.est_abs_error + h.est_abs_error) * e;
          ++out[i].frequencies;
        }
      }
  }
  return out;
}

EtBound et_structural_bound(const KroneckerSpec& spec, const ConvexBody& body, const Window& w,
                            const EtKernelConfig& cfg, long N) {
  return et_structural_bound(spec, body, w, cfg, std::vector<long>{N}).front();
}

void write_csv_header(std::ostream& out) { out << "N,value,arg_s1,arg_s2,arg_x1,arg_x2,method\n"; }

void write_csv_row(std::ostream& out, long N, double value, const Window& w, const std::string& method) {
  auto old = out.precision(17);
  out << N << ',' << value << ',' << w.s[0] << ',' << w.s[1] << ',' << w.x[0] << ',' << w.x[1] << ',' << method
      << '\n';
  out.precision(old);
}

void write_csv_row(std::ostream& out, long N, const DiscrepancyEstimate& e) {
  write_csv_row(out, N, e.value, e.arg_window, to_string(e.method));
}

}  // namespace tqmc
