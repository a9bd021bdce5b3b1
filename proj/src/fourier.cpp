#include "tqmc/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <stdexcept>

#include <boost/math/special_functions/bessel.hpp>

#include "tqmc/quadrature.hpp"

namespace tqmc {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
const Complex kI(0.0, 1.0);

Complex phase(double t) { return {std::cos(t), -std::sin(t)}; }  // e^{-i t}

bool is_full_disk(const Boundary& b) {
  if (b.size() != 1) return false;
  const auto* arc = std::get_if<BodyArc>(&b.front());
  return arc && arc->body.kind() == ConvexBody::Kind::disk && arc->theta1 - arc->theta0 >= kTwoPi - 1e-12;
}

// int over an arc piece of weight(nu) e^{-2 pi i x.xi} ds.
template <class W>
FourierSample arc_integral(const BoundaryPiece& piece, const Vec2& xi, W&& weight, double tol) {
  const double freq = xi.norm();
  auto run = [&](auto&& f, double a, double b, double length) {
    int panels = std::max(2, static_cast<int>(std::ceil(freq * length)));
    auto r = gauss_adaptive(f, a, b, panels, tol);
    return FourierSample{r.value, FourierMethod::boundary_quadrature, r.est_abs_error};
  };
  if (const auto* arc = std::get_if<BodyArc>(&piece)) {
    const ConvexBody& body = arc->body;
    auto f = [&](double t) -> Complex {
      Vec2 nu = normal_at(t);
      return weight(nu) * phase(kTwoPi * body.point(t).dot(xi)) * body.curvature_radius(t);
    };
    return run(f, arc->theta0, arc->theta1, (arc->theta1 - arc->theta0) / body.kappa_min());
  }
  if (const auto* arc = std::get_if<CornerArc>(&piece)) {
    auto f = [&](double t) -> Complex {
      Vec2 nu = normal_at(t);
      return weight(nu) * phase(kTwoPi * (arc->center + arc->radius * nu).dot(xi)) * arc->radius;
    };
    return run(f, arc->phi0, arc->phi1, arc->radius * (arc->phi1 - arc->phi0));
  }
  throw std::invalid_argument("arc_integral: segment given");
}

Vec2 outward(const Segment& s) {
  Vec2 d = (s.b - s.a).normalized();
  return {d.y(), -d.x()};
}

// Nodes and weights of the 20-point rule on geometric panels of [0, a],
// optionally split once more.
std::vector<std::pair<double, double>> radial_nodes(double a, double h0, std::vector<double> kinks, bool split) {
  std::vector<double> edges{0.0};
  for (double e = h0; e < a; e *= 2) edges.push_back(e);
  edges.push_back(a);
  for (double k : kinks)
    if (k > 0 && k < a) edges.push_back(k);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end(), [](double x, double y) { return y - x < 1e-15; }), edges.end());
  const auto& gl = GaussLegendre20::get();
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    int parts = split ? 2 : 1;
    double w = (edges[i + 1] - edges[i]) / parts;
    for (int p = 0; p < parts; ++p) {
      double mid = edges[i] + (p + 0.5) * w;
      for (int k = 0; k < GaussLegendre20::kPoints; ++k)
        out.emplace_back(mid + 0.5 * w * gl.nodes[k], 0.5 * w * gl.weights[k]);
    }
  }
  return out;
}

}  // namespace

const char* to_string(FourierMethod m) {
  switch (m) {
    case FourierMethod::closed_form: return "closed_form";
    case FourierMethod::boundary_quadrature: return "boundary_quadrature";
    case FourierMethod::coarea_quadrature: return "coarea_quadrature";
  }
  return "unknown";
}

double EtKernelConfig::psi(double u) const { return psi_scale * std::pow(1.0 + u, -psi_power); }

void EtKernelConfig::validate() const {
  if (!(R > 0)) throw std::invalid_argument("kernel cutoff R must be positive");
  if (!(psi_power > 2)) throw std::invalid_argument("psi power must exceed 2 for an integrable tail bound");
  if (!(psi_scale >= 0)) throw std::invalid_argument("psi scale must be nonnegative");
  if (psi_scale > std::exp(kTwoPi)) throw std::invalid_argument("psi(0) must not exceed e^{2 pi}");
}

double EtKernelConfig::u_cutoff() const {
  if (psi_scale <= 0) return 0.0;
  double v = std::pow(psi_scale / 1e-14, 1.0 / psi_power);
  return std::max(0.0, (v - 1.0) / R);
}

double EtKernelConfig::tail_bound(double a) const {
  if (psi_scale <= 0) return 0.0;
  // v = 1 + R u:  (4 s / R) [ v^{1-p}/(p-1) + (2/R)(v^{2-p}/(p-2) - v^{1-p}/(p-1)) ]
  double p = psi_power, v = 1.0 + R * a;
  double t1 = std::pow(v, 1 - p) / (p - 1), t2 = std::pow(v, 2 - p) / (p - 2);
  return 4.0 * psi_scale / R * (t1 + 2.0 / R * (t2 - t1));
}

Complex segment_ft(const Vec2& x, const Vec2& y, const Vec2& xi) {
  double len = (x - y).norm();
  double arg = kPi * (x - y).dot(xi);
  double sinc = arg == 0.0 ? 1.0 : std::sin(arg) / arg;
  return len * sinc * phase(kTwoPi * (0.5 * (x + y)).dot(xi));
}

FourierSample arc_ft(const BoundaryPiece& piece, const Vec2& xi, double tol) {
  if (const auto* s = std::get_if<Segment>(&piece)) return {segment_ft(s->a, s->b, xi), FourierMethod::closed_form, 0.0};
  if (is_full_disk(Boundary{piece})) {
    const auto& arc = std::get<BodyArc>(piece);
    double r = arc.body.radius();
    Complex v = kTwoPi * r * boost::math::cyl_bessel_j(0, kTwoPi * r * xi.norm()) * phase(kTwoPi * arc.body.center().dot(xi));
    return {v, FourierMethod::closed_form, 0.0};
  }
  return arc_integral(piece, xi, [](const Vec2&) { return 1.0; }, tol);
}

FourierSample boundary_ft(const Boundary& boundary, const Vec2& xi, double tol) {
  FourierSample out{{}, FourierMethod::closed_form, 0.0};
  for (const auto& piece : boundary) {
    FourierSample s = arc_ft(piece, xi, tol);
    out.value += s.value;
    out.est_abs_error += s.est_abs_error;
    if (s.method != FourierMethod::closed_form) out.method = s.method;
  }
  return out;
}

Complex disk_chi_hat(const Vec2& center, double radius, const Vec2& n) {
  double k = n.norm();
  if (k == 0.0) return kPi * radius * radius;
  return radius * boost::math::cyl_bessel_j(1, kTwoPi * radius * k) / k * phase(kTwoPi * center.dot(n));
}

FourierSample chi_hat(const Boundary& boundary, const Vec2& n, double tol) {
  double n2 = n.squaredNorm();
  if (n2 == 0.0) throw std::invalid_argument("chi_hat at n = 0: use clip_area for the zero frequency");
  if (is_full_disk(boundary)) {
    const auto& arc = std::get<BodyArc>(boundary.front());
    return {disk_chi_hat(arc.body.center(), arc.body.radius(), n), FourierMethod::closed_form, 0.0};
  }
  FourierSample out{{}, FourierMethod::closed_form, 0.0};
  for (const auto& piece : boundary) {
    if (const auto* s = std::get_if<Segment>(&piece)) {
      out.value += n.dot(outward(*s)) * segment_ft(s->a, s->b, n);
      continue;
    }
    FourierSample a = arc_integral(piece, n, [&](const Vec2& nu) { return n.dot(nu); }, tol);
    out.value += a.value;
    out.est_abs_error += a.est_abs_error;
    out.method = FourierMethod::boundary_quadrature;
  }
  Complex scale = kI / (kTwoPi * n2);
  out.value *= scale;
  out.est_abs_error *= std::abs(scale);
  return out;
}

// ---------------------------------------------------------------------------

LevelSetTransform::LevelSetTransform(const Region& k, const EtKernelConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  if (cfg_.psi_scale == 0.0 || k.boundary.empty()) return;
  const double cut = cfg_.u_cutoff();
  const double h0 = 0.5 / cfg_.R;
  full_disk_ = is_full_disk(k.boundary);
  double a_in, a_out;
  std::vector<double> kinks;
  if (full_disk_) {
    const auto& arc = std::get<BodyArc>(k.boundary.front());
    center_ = arc.body.center();
    radius_ = arc.body.radius();
    a_in = std::min(cut, radius_);
    a_out = cut;
    truncation_error_ = 2 * cfg_.tail_bound(cut);
  } else {
    const double limit = 0.5 / k.body.kappa_max() * (1 - 1e-9);
    const double half_side = 0.5 * std::min(k.rect.x1 - k.rect.x0, k.rect.y1 - k.rect.y0);
    a_out = std::min(cut, limit);
    a_in = std::min({cut, limit, half_side});
    truncation_error_ = cfg_.tail_bound(a_out);
    truncation_error_ += (a_in < std::min(cut, half_side)) ? cfg_.tail_bound(a_in) : cfg_.tail_bound(cut);
    kinks.push_back(half_side);
  }
  for (int pass = 0; pass < 2; ++pass) {
    auto& nodes = pass == 0 ? coarse_ : fine_;
    for (int side : {+1, -1}) {
      double a = side > 0 ? a_in : a_out;
      if (a <= 0) continue;
      for (auto [t, w] : radial_nodes(a, h0, kinks, pass == 1)) {
        double u = side * t;
        Node node{w * cfg_.psi(cfg_.R * t), u, {}};
        if (!full_disk_) node.level = level_boundary(k, u);
        nodes.push_back(std::move(node));
      }
    }
  }
}

FourierSample LevelSetTransform::at(const Vec2& n) const {
  FourierSample out{{}, FourierMethod::coarea_quadrature, truncation_error_};
  if (coarse_.empty()) return out;
  if (full_disk_) {
    const double freq = n.norm();
    auto integrate = [&](const std::vector<Node>& nodes) {
      double sum = 0.0;
      for (const auto& node : nodes) {
        double rho = radius_ - node.u;
        sum += node.weight * kTwoPi * rho * boost::math::cyl_bessel_j(0, kTwoPi * rho * freq);
      }
      return sum;
    };
    std::pair<double, double> radial;
    bool lattice = n.x() == std::round(n.x()) && n.y() == std::round(n.y());
    long key = lattice ? static_cast<long>(n.squaredNorm()) : -1;
    bool cached = false;
    if (lattice) {
      std::lock_guard<std::mutex> lock(mutex_);
      if (auto it = disk_cache_.find(key); it != disk_cache_.end()) {
        radial = it->second;
        cached = true;
      }
    }
    if (!cached) {
      radial = {integrate(coarse_), integrate(fine_)};
      if (lattice) {
        std::lock_guard<std::mutex> lock(mutex_);
        disk_cache_.emplace(key, radial);
      }
    }
    out.value = radial.second * phase(kTwoPi * center_.dot(n));
    out.est_abs_error += std::abs(radial.second - radial.first);
    return out;
  }
  auto integrate = [&](const std::vector<Node>& nodes, double& err) {
    Complex sum{};
    for (const auto& node : nodes) {
      if (node.level.empty() || node.weight == 0.0) continue;
      FourierSample s = boundary_ft(node.level, n, 1e-11);
      sum += node.weight * s.value;
      err += node.weight * s.est_abs_error;
    }
    return sum;
  };
  double err_c = 0.0, err_f = 0.0;
  Complex c = integrate(coarse_, err_c);
  Complex f = integrate(fine_, err_f);
  out.value = f;
  out.est_abs_error += std::abs(f - c) + err_f;
  return out;
}

FourierSample h_hat(const Region& k, const EtKernelConfig& cfg, const Vec2& n) {
  return LevelSetTransform(k, cfg).at(n);
}

double decay_bound(const Vec2& n) {
  return std::pow(n.norm(), -1.5) + 1.0 / ((1.0 + std::abs(n.x())) * (1.0 + std::abs(n.y())));
}

DecayProfile decay_profile(const ConvexBody& body, const Window& w, int n_max, int h_n_max) {
  if (n_max < 1) throw std::invalid_argument("decay_profile: n_max must be positive");
  DecayProfile out;
  std::vector<Region> regions = decompose_intersection(body, w);
  double kmax = body.kappa_max();
  out.R = std::max(4 * kmax * kmax, static_cast<double>(n_max + 1));
  EtKernelConfig cfg;
  cfg.R = out.R;
  std::vector<std::unique_ptr<LevelSetTransform>> kernels;
  if (h_n_max > 0)
    for (const auto& r : regions) kernels.push_back(std::make_unique<LevelSetTransform>(r, cfg));
  out.ring_max.assign(static_cast<std::size_t>(n_max), 0.0);
  for (int n1 = -n_max; n1 <= n_max; ++n1) {
    for (int n2 = -n_max; n2 <= n_max; ++n2) {
      if (n1 == 0 && n2 == 0) continue;
      int r2 = n1 * n1 + n2 * n2;
      if (r2 > n_max * n_max) continue;
      Vec2 n(n1, n2);
      Complex chi{};
      for (const auto& r : regions) chi += chi_hat(r.boundary, n).value;
      DecayRow row{n1, n2, std::abs(chi), std::numeric_limits<double>::quiet_NaN(), decay_bound(n), 0.0};
      row.ratio = row.abs_chi_hat / row.bound;
      if (r2 <= h_n_max * h_n_max) {
        Complex h{};
        for (const auto& k : kernels) h += k->at(n).value;
        row.abs_h_hat = std::abs(h);
        out.max_ratio_h = std::max(out.max_ratio_h, row.abs_h_hat / row.bound);
      }
      out.max_ratio = std::max(out.max_ratio, row.ratio);
      auto ring = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(r2)) - 1e-12)) - 1;
      out.ring_max[ring] = std::max(out.ring_max[ring], row.ratio);
      out.rows.push_back(row);
    }
  }
  return out;
}

void write_csv(std::ostream& out, const DecayProfile& profile) {
  out << "n1,n2,abs_chi_hat,abs_h_hat,bound,ratio\n";
  auto old = out.precision(17);
  for (const auto& r : profile.rows) {
    out << r.n1 << ',' << r.n2 << ',' << r.abs_chi_hat << ',';
    if (!std::isnan(r.abs_h_hat)) out << r.abs_h_hat;
    out << ',' << r.bound << ',' << r.ratio << '\n';
  }
  out.precision(old);
}

}  // namespace tqmc
