#include "tqmc/geometry.hpp"

#include <algorithm>
#include <charconv>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "tqmc/quadrature.hpp"

namespace tqmc {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kPropSamples = 4096;

double wrap_angle(double t) {
  t = std::fmod(t, kTwoPi);
  if (t < 0) t += kTwoPi;
  if (t >= kTwoPi) t = 0.0;
  return t;
}

Vec2 perp(const Vec2& v) { return {-v.y(), v.x()}; }

// Root of a monotone function on [a, b] given a sign change.
template <class F>
double bisect(F&& f, double a, double b) {
  double fa = f(a);
  for (int it = 0; it < 200 && b - a > 1e-16; ++it) {
    double m = 0.5 * (a + b);
    double fm = f(m);
    if (fm == 0.0) return m;
    if ((fm < 0) == (fa < 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

// Golden-section minimum of f on [a, b].
template <class F>
double golden_min(F&& f, double a, double b, int iters = 80) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return std::min(fc, fd);
}

// Min of f over [a, b] by sampling then golden-section refinement.
template <class F>
double sampled_min(F&& f, double a, double b, int samples) {
  double best = std::min(f(a), f(b));
  int arg = -1;
  double step = (b - a) / samples;
  for (int i = 0; i <= samples; ++i) {
    double v = f(a + i * step);
    if (v < best) {
      best = v;
      arg = i;
    }
  }
  if (arg < 0) return best;
  double lo = std::max(a, a + (arg - 1) * step), hi = std::min(b, a + (arg + 1) * step);
  return std::min(best, golden_min(f, lo, hi));
}

// Area of the disk of radius r about the origin within [x0, x1] x [0, h], h >= 0.
double disk_strip(double x0, double x1, double h, double r) {
  x0 = std::clamp(x0, -r, r);
  x1 = std::clamp(x1, -r, r);
  if (x1 <= x0 || h <= 0) return 0.0;
  h = std::min(h, r);
  auto w = [r](double x) {
    double q = std::clamp(x / r, -1.0, 1.0);
    return 0.5 * (x * std::sqrt(std::max(0.0, r * r - x * x)) + r * r * std::asin(q));
  };
  double total = w(x1) - w(x0);
  double a = std::sqrt(std::max(0.0, r * r - h * h));
  double p = std::max(x0, -a), q = std::min(x1, a);
  if (q > p) total += h * (q - p) - (w(q) - w(p));
  return total;
}

double disk_rect_area(const Vec2& c, double r, const Rect& rect) {
  if (r <= 0) return 0.0;
  double x0 = rect.x0 - c.x(), x1 = rect.x1 - c.x();
  auto up_to = [&](double y) { return y >= 0 ? disk_strip(x0, x1, y, r) : -disk_strip(x0, x1, -y, r); };
  return std::max(0.0, up_to(rect.y1 - c.y()) - up_to(rect.y0 - c.y()));
}

double piece_normal_start(const BoundaryPiece& p);
double piece_normal_end(const BoundaryPiece& p);

Vec2 segment_normal(const Segment& s) {
  Vec2 d = (s.b - s.a).normalized();
  return {d.y(), -d.x()};
}

bool angle_in(double phi, double a, double b) {
  // Is phi in the counterclockwise range [a, b] (b - a <= 2 pi)?
  double t = wrap_angle(phi - a);
  return t <= (b - a) + 1e-15;
}

double circle_arc_distance(const Vec2& c, double r, double a, double b, const Vec2& p) {
  Vec2 d = p - c;
  double dist = d.norm();
  if (dist > 0 && angle_in(std::atan2(d.y(), d.x()), a, b)) return std::abs(dist - r);
  Vec2 e0 = c + r * normal_at(a), e1 = c + r * normal_at(b);
  return std::min((p - e0).norm(), (p - e1).norm());
}

double segment_distance(const Segment& s, const Vec2& p) {
  Vec2 d = s.b - s.a;
  double len2 = d.squaredNorm();
  double t = len2 > 0 ? std::clamp((p - s.a).dot(d) / len2, 0.0, 1.0) : 0.0;
  return (s.a + t * d - p).norm();
}

// Chains pieces into a closed curve by nearest start point.
Boundary chain(Boundary pieces) {
  if (pieces.size() <= 1) return pieces;
  Boundary out;
  out.push_back(pieces.front());
  pieces.erase(pieces.begin());
  while (!pieces.empty()) {
    Vec2 end = piece_end(out.back());
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      double d = (piece_start(pieces[i]) - end).norm();
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    out.push_back(pieces[best]);
    pieces.erase(pieces.begin() + static_cast<std::ptrdiff_t>(best));
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// ConvexBody

ConvexBody::ConvexBody(std::shared_ptr<const Data> data) : data_(std::move(data)) { compute_props(); }

ConvexBody ConvexBody::disk(Vec2 center, double radius) {
  if (!(radius > 0)) throw std::invalid_argument("disk radius must be positive");
  auto d = std::make_shared<Data>();
  d->kind = Kind::disk;
  d->center = center;
  d->a = d->b = radius;
  return ConvexBody(d);
}

ConvexBody ConvexBody::ellipse(Vec2 center, double a, double b) {
  if (!(a > 0 && b > 0)) throw std::invalid_argument("ellipse semi-axes must be positive");
  auto d = std::make_shared<Data>();
  d->kind = Kind::ellipse;
  d->center = center;
  d->a = a;
  d->b = b;
  return ConvexBody(d);
}

ConvexBody ConvexBody::support_series(Vec2 center, std::vector<double> cos_coeffs, std::vector<double> sin_coeffs) {
  if (cos_coeffs.empty() || !(cos_coeffs[0] > 0))
    throw std::invalid_argument("support series needs a positive constant term");
  std::size_t n = std::max(cos_coeffs.size(), sin_coeffs.size());
  cos_coeffs.resize(n, 0.0);
  sin_coeffs.resize(n, 0.0);
  auto d = std::make_shared<Data>();
  d->kind = Kind::support_series;
  d->center = center;
  d->cos_c = std::move(cos_coeffs);
  d->sin_c = std::move(sin_coeffs);
  ConvexBody body(d);
  if (!(body.props_.rho_min > 0))
    throw std::invalid_argument("support series is not strictly convex: min(h + h'') = " +
                                std::to_string(body.props_.rho_min));
  return body;
}

ConvexBody ConvexBody::from_config(const config::Value& v) {
  const auto& t = v.as_table("body");
  auto kind = config::require(t, "kind", v.line).as_string("body.kind");
  auto cv = config::as_doubles(config::require(t, "center", v.line), "body.center");
  if (cv.size() != 2) throw config::ParseError(v.line, "field 'body.center': expected [x, y]");
  Vec2 c(cv[0], cv[1]);
  try {
    if (kind == "disk") return disk(c, config::require(t, "radius", v.line).as_double("body.radius"));
    if (kind == "ellipse") {
      auto ab = config::as_doubles(config::require(t, "semi_axes", v.line), "body.semi_axes");
      if (ab.size() != 2) throw config::ParseError(v.line, "field 'body.semi_axes': expected [a, b]");
      return ellipse(c, ab[0], ab[1]);
    }
    if (kind == "support") {
      auto cc = config::as_doubles(config::require(t, "cos", v.line), "body.cos");
      std::vector<double> ss;
      if (auto s = config::find(t, "sin")) ss = config::as_doubles(*s, "body.sin");
      return support_series(c, cc, ss);
    }
  } catch (const std::invalid_argument& e) {
    throw config::ParseError(v.line, std::string("field 'body': ") + e.what());
  }
  throw config::ParseError(v.line, "field 'body.kind': unknown body kind '" + kind + "'");
}

std::string ConvexBody::describe() const {
  // Shortest text that reads back to the same double.
  auto num = [](double v) {
    char buf[32];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
  };
  auto list = [&](const std::vector<double>& v) {
    std::string out;
    for (std::size_t k = 0; k < v.size(); ++k) out += (k ? ", " : "") + num(v[k]);
    return out;
  };
  std::string c = "center = [" + num(center().x()) + ", " + num(center().y()) + "]";
  std::string out = "{ kind = ";
  switch (kind()) {
    case Kind::disk: out += "\"disk\", " + c + ", radius = " + num(radius()); break;
    case Kind::ellipse: out += "\"ellipse\", " + c + ", semi_axes = [" + num(semi_a()) + ", " + num(semi_b()) + "]"; break;
    case Kind::support_series:
      out += "\"support\", " + c + ", cos = [" + list(cos_coeffs()) + "], sin = [" + list(sin_coeffs()) + "]";
      break;
  }
  if (offset_ != 0.0 && kind() != Kind::disk) out += ", offset = " + num(offset_);
  return out + " }";
}

ConvexBody ConvexBody::offset(double u) const {
  ConvexBody out = *this;
  out.offset_ = offset_ + u;
  if (!(out.offset_ < props_.rho_min))
    throw std::domain_error("parallel body offset " + std::to_string(out.offset_) +
                            " reaches the minimal radius of curvature " + std::to_string(props_.rho_min));
  return out;
}

double ConvexBody::h(double theta) const {
  const Data& d = *data_;
  double v = 0.0;
  switch (d.kind) {
    case Kind::disk: v = d.a; break;
    case Kind::ellipse: {
      double c = std::cos(theta), s = std::sin(theta);
      v = std::sqrt(d.a * d.a * c * c + d.b * d.b * s * s);
      break;
    }
    case Kind::support_series:
      for (std::size_t k = 0; k < d.cos_c.size(); ++k)
        v += d.cos_c[k] * std::cos(k * theta) + d.sin_c[k] * std::sin(k * theta);
      break;
  }
  return v - offset_;
}

double ConvexBody::h_prime(double theta) const {
  const Data& d = *data_;
  switch (d.kind) {
    case Kind::disk: return 0.0;
    case Kind::ellipse: {
      double c = std::cos(theta), s = std::sin(theta);
      double h0 = std::sqrt(d.a * d.a * c * c + d.b * d.b * s * s);
      return (d.b * d.b - d.a * d.a) * s * c / h0;
    }
    case Kind::support_series: {
      double v = 0.0;
      for (std::size_t k = 1; k < d.cos_c.size(); ++k)
        v += static_cast<double>(k) * (-d.cos_c[k] * std::sin(k * theta) + d.sin_c[k] * std::cos(k * theta));
      return v;
    }
  }
  return 0.0;
}

double ConvexBody::curvature_radius(double theta) const {
  const Data& d = *data_;
  double v = 0.0;
  switch (d.kind) {
    case Kind::disk: v = d.a; break;
    case Kind::ellipse: {
      double c = std::cos(theta), s = std::sin(theta);
      double h0 = std::sqrt(d.a * d.a * c * c + d.b * d.b * s * s);
      v = d.a * d.a * d.b * d.b / (h0 * h0 * h0);
      break;
    }
    case Kind::support_series:
      for (std::size_t k = 0; k < d.cos_c.size(); ++k) {
        double kk = static_cast<double>(k * k);
        v += (1.0 - kk) * (d.cos_c[k] * std::cos(k * theta) + d.sin_c[k] * std::sin(k * theta));
      }
      break;
  }
  return v - offset_;
}

Vec2 ConvexBody::point(double theta) const {
  Vec2 nu = normal_at(theta);
  return center() + h(theta) * nu + h_prime(theta) * perp(nu);
}

void ConvexBody::compute_props() {
  const Data& d = *data_;
  Props p;
  double saved = offset_;
  offset_ = 0.0;
  p.rho_min = std::numeric_limits<double>::infinity();
  p.rho_max = -p.rho_min;
  p.width_min = p.rho_min;
  for (int i = 0; i < kPropSamples; ++i) {
    double t = kTwoPi * i / kPropSamples;
    double rho = curvature_radius(t);
    double hv = h(t);
    p.rho_min = std::min(p.rho_min, rho);
    p.rho_max = std::max(p.rho_max, rho);
    p.perimeter += rho;
    p.area += 0.5 * hv * rho;
    double width = hv + h(t + kPi);
    p.width_max = std::max(p.width_max, width);
    p.width_min = std::min(p.width_min, width);
  }
  p.perimeter *= kTwoPi / kPropSamples;
  p.area *= kTwoPi / kPropSamples;
  if (d.kind == Kind::disk) {
    p.rho_min = p.rho_max = d.a;
    p.perimeter = kTwoPi * d.a;
    p.area = kPi * d.a * d.a;
    p.width_max = p.width_min = 2 * d.a;
  } else if (d.kind == Kind::ellipse) {
    double lo = std::min(d.a, d.b), hi = std::max(d.a, d.b);
    p.rho_min = lo * lo / hi;
    p.rho_max = hi * hi / lo;
    p.area = kPi * d.a * d.b;
    p.width_max = 2 * hi;
    p.width_min = 2 * lo;
  }
  props_ = p;
  offset_ = saved;
}

double ConvexBody::perimeter() const { return props_.perimeter - kTwoPi * offset_; }

double ConvexBody::area() const {
  return props_.area - props_.perimeter * offset_ + kPi * offset_ * offset_;
}

double ConvexBody::diameter() const { return props_.width_max - 2 * offset_; }

Eigen::Vector4d ConvexBody::bounding_box() const {
  const Vec2& c = center();
  return {c.x() - h(kPi), c.y() - h(1.5 * kPi), c.x() + h(0.0), c.y() + h(0.5 * kPi)};
}

bool ConvexBody::nonempty() const { return props_.rho_min - offset_ > 0 && props_.width_min - 2 * offset_ > 0; }

bool ConvexBody::contains(const Vec2& p) const {
  Vec2 d = p - center();
  if (kind() == Kind::disk) {
    double r = radius();
    return d.squaredNorm() <= r * r;
  }
  if (kind() == Kind::ellipse && offset_ == 0.0) {
    double u = d.x() / semi_a(), v = d.y() / semi_b();
    return u * u + v * v <= 1.0;
  }
  Eigen::Vector4d bb = bounding_box();
  if (p.x() < bb[0] || p.x() > bb[2] || p.y() < bb[1] || p.y() > bb[3]) return false;
  auto gap = [&](double t) { return h(t) - d.dot(normal_at(t)); };
  return sampled_min(gap, 0.0, kTwoPi, 256) >= -1e-14;
}

// ---------------------------------------------------------------------------
// Windows and pieces

Window Window::make(const Vec2& s, const Vec2& x) {
  Window w;
  for (int i = 0; i < 2; ++i) {
    w.s[i] = std::clamp(s[i], kMinSide, 1.0 - kMinSide);
    double r = x[i] - std::floor(x[i]);
    w.x[i] = r >= 1.0 ? 0.0 : r;
  }
  return w;
}

bool Window::contains(const Vec2& t) const {
  for (int i = 0; i < 2; ++i) {
    double d = t[i] - x[i];
    if (d < 0) d += 1.0;
    if (!(d <= s[i])) return false;
  }
  return true;
}

Vec2 piece_start(const BoundaryPiece& p) {
  return std::visit(
      [](const auto& q) -> Vec2 {
        using T = std::decay_t<decltype(q)>;
        if constexpr (std::is_same_v<T, BodyArc>) return q.body.point(q.theta0);
        else if constexpr (std::is_same_v<T, Segment>) return q.a;
        else return q.center + q.radius * normal_at(q.phi0);
      },
      p);
}

Vec2 piece_end(const BoundaryPiece& p) {
  return std::visit(
      [](const auto& q) -> Vec2 {
        using T = std::decay_t<decltype(q)>;
        if constexpr (std::is_same_v<T, BodyArc>) return q.body.point(q.theta1);
        else if constexpr (std::is_same_v<T, Segment>) return q.b;
        else return q.center + q.radius * normal_at(q.phi1);
      },
      p);
}

double piece_length(const BoundaryPiece& p) {
  return std::visit(
      [](const auto& q) -> double {
        using T = std::decay_t<decltype(q)>;
        if constexpr (std::is_same_v<T, BodyArc>) {
          if (q.body.kind() == ConvexBody::Kind::disk) return q.body.radius() * (q.theta1 - q.theta0);
          auto rho = [&](double t) { return q.body.curvature_radius(t); };
          return gauss_adaptive(rho, q.theta0, q.theta1, 4, 1e-14).value;
        } else if constexpr (std::is_same_v<T, Segment>) {
          return (q.b - q.a).norm();
        } else {
          return q.radius * (q.phi1 - q.phi0);
        }
      },
      p);
}

namespace {

double piece_normal_start(const BoundaryPiece& p) {
  return std::visit(
      [](const auto& q) -> double {
        using T = std::decay_t<decltype(q)>;
        if constexpr (std::is_same_v<T, BodyArc>) return q.theta0;
        else if constexpr (std::is_same_v<T, Segment>) {
          Vec2 n = segment_normal(q);
          return std::atan2(n.y(), n.x());
        } else return q.phi0;
      },
      p);
}

double piece_normal_end(const BoundaryPiece& p) {
  return std::visit(
      [](const auto& q) -> double {
        using T = std::decay_t<decltype(q)>;
        if constexpr (std::is_same_v<T, BodyArc>) return q.theta1;
        else if constexpr (std::is_same_v<T, Segment>) {
          Vec2 n = segment_normal(q);
          return std::atan2(n.y(), n.x());
        } else return q.phi1;
      },
      p);
}

// Normal angles where the boundary meets the vertical line x = v.
void vertical_crossings(const ConvexBody& body, double v, std::vector<double>& out) {
  auto f = [&](double t) { return body.point(t).x() - v; };
  // x(theta) decreases on [0, pi] and increases on [pi, 2 pi].
  if (f(0.0) > 0 && f(kPi) < 0) {
    out.push_back(bisect(f, 0.0, kPi));
    out.push_back(bisect(f, kPi, kTwoPi));
  }
}

// Normal angles where the boundary meets the horizontal line y = v.
void horizontal_crossings(const ConvexBody& body, double v, std::vector<double>& out) {
  auto f = [&](double t) { return body.point(t).y() - v; };
  // y(theta) increases on [-pi/2, pi/2] and decreases on [pi/2, 3 pi/2].
  if (f(0.5 * kPi) > 0 && f(-0.5 * kPi) < 0) {
    out.push_back(bisect(f, -0.5 * kPi, 0.5 * kPi));
    out.push_back(bisect(f, 0.5 * kPi, 1.5 * kPi));
  }
}

// The chord of the body on a line, as an interval of the free coordinate.
bool chord(const ConvexBody& body, bool vertical, double v, double& lo, double& hi) {
  std::vector<double> t;
  if (vertical)
    vertical_crossings(body, v, t);
  else
    horizontal_crossings(body, v, t);
  if (t.size() != 2) return false;
  int k = vertical ? 1 : 0;
  lo = body.point(t[0])[k];
  hi = body.point(t[1])[k];
  if (lo > hi) std::swap(lo, hi);
  return hi > lo;
}

}  // namespace

Boundary decompose(const ConvexBody& body, const Rect& rect) {
  if (!rect.valid() || !body.nonempty()) return {};
  Eigen::Vector4d bb = body.bounding_box();
  if (bb[2] < rect.x0 || bb[0] > rect.x1 || bb[3] < rect.y0 || bb[1] > rect.y1) return {};

  std::vector<double> cuts;
  vertical_crossings(body, rect.x0, cuts);
  vertical_crossings(body, rect.x1, cuts);
  horizontal_crossings(body, rect.y0, cuts);
  horizontal_crossings(body, rect.y1, cuts);
  for (double& t : cuts) t = wrap_angle(t);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(), [](double a, double b) { return b - a < 1e-14; }), cuts.end());

  Boundary pieces;
  constexpr double kTol = 1e-12;
  if (cuts.empty()) {
    if (rect.contains(body.point(0.0), kTol)) return {BodyArc{body, 0.0, kTwoPi}};
  } else {
    for (std::size_t i = 0; i < cuts.size(); ++i) {
      double a = cuts[i];
      double b = i + 1 < cuts.size() ? cuts[i + 1] : cuts[0] + kTwoPi;
      if (b - a < 1e-14) continue;
      if (rect.contains(body.point(0.5 * (a + b)), kTol)) pieces.push_back(BodyArc{body, a, b});
    }
  }

  double lo = 0, hi = 0;
  auto add = [&](Vec2 a, Vec2 b) {
    if ((b - a).norm() > 1e-14) pieces.push_back(Segment{a, b, true});
  };
  if (chord(body, false, rect.y0, lo, hi)) {
    double a = std::max(rect.x0, lo), b = std::min(rect.x1, hi);
    if (b > a) add({a, rect.y0}, {b, rect.y0});
  }
  if (chord(body, true, rect.x1, lo, hi)) {
    double a = std::max(rect.y0, lo), b = std::min(rect.y1, hi);
    if (b > a) add({rect.x1, a}, {rect.x1, b});
  }
  if (chord(body, false, rect.y1, lo, hi)) {
    double a = std::max(rect.x0, lo), b = std::min(rect.x1, hi);
    if (b > a) add({b, rect.y1}, {a, rect.y1});
  }
  if (chord(body, true, rect.x0, lo, hi)) {
    double a = std::max(rect.y0, lo), b = std::min(rect.y1, hi);
    if (b > a) add({rect.x0, b}, {rect.x0, a});
  }
  return chain(std::move(pieces));
}

namespace {

template <class F>
void for_each_translate(const ConvexBody& body, const Window& w, F&& f) {
  Eigen::Vector4d bb = body.bounding_box();
  int m1lo = static_cast<int>(std::ceil(bb[0] - w.x.x() - w.s.x()));
  int m1hi = static_cast<int>(std::floor(bb[2] - w.x.x()));
  int m2lo = static_cast<int>(std::ceil(bb[1] - w.x.y() - w.s.y()));
  int m2hi = static_cast<int>(std::floor(bb[3] - w.x.y()));
  for (int m1 = m1lo; m1 <= m1hi; ++m1)
    for (int m2 = m2lo; m2 <= m2hi; ++m2)
      f(Eigen::Vector2i(m1, m2), Rect{w.x.x() + m1, w.x.y() + m2, w.x.x() + m1 + w.s.x(), w.x.y() + m2 + w.s.y()});
}

}  // namespace

std::vector<Region> decompose_intersection(const ConvexBody& body, const Window& w) {
  std::vector<Region> out;
  for_each_translate(body, w, [&](const Eigen::Vector2i& m, const Rect& r) {
    Boundary b = decompose(body, r);
    if (!b.empty()) out.push_back(Region{body, r, m, std::move(b)});
  });
  return out;
}

double enclosed_area(const Boundary& boundary) {
  double total = 0.0;
  for (const auto& piece : boundary) {
    total += std::visit(
        [](const auto& q) -> double {
          using T = std::decay_t<decltype(q)>;
          if constexpr (std::is_same_v<T, Segment>) {
            return 0.5 * q.a.dot(segment_normal(q)) * (q.b - q.a).norm();
          } else if constexpr (std::is_same_v<T, CornerArc>) {
            Vec2 c = q.center;
            double r = q.radius;
            double lin = c.x() * (std::sin(q.phi1) - std::sin(q.phi0)) - c.y() * (std::cos(q.phi1) - std::cos(q.phi0));
            return 0.5 * r * (lin + r * (q.phi1 - q.phi0));
          } else {
            const ConvexBody& b = q.body;
            if (b.kind() == ConvexBody::Kind::disk) {
              Vec2 c = b.center();
              double r = b.radius();
              double lin = c.x() * (std::sin(q.theta1) - std::sin(q.theta0)) -
                           c.y() * (std::cos(q.theta1) - std::cos(q.theta0));
              return 0.5 * r * (lin + r * (q.theta1 - q.theta0));
            }
            auto f = [&](double t) { return 0.5 * (b.center().dot(normal_at(t)) + b.h(t)) * b.curvature_radius(t); };
            return gauss_adaptive(f, q.theta0, q.theta1, 4, 1e-15).value;
          }
        },
        piece);
  }
  return total;
}

double clip_area(const ConvexBody& body, const Rect& rect) {
  if (!rect.valid()) return 0.0;
  switch (body.kind()) {
    case ConvexBody::Kind::disk: return disk_rect_area(body.center(), body.radius(), rect);
    case ConvexBody::Kind::ellipse:
      if (body.offset_amount() == 0.0) {
        // Stretch y by a/b: the ellipse becomes a disk of radius a.
        double k = body.semi_a() / body.semi_b();
        double cy = body.center().y();
        Rect r{rect.x0, cy + (rect.y0 - cy) * k, rect.x1, cy + (rect.y1 - cy) * k};
        return disk_rect_area(body.center(), body.semi_a(), r) / k;
      }
      [[fallthrough]];
    default: return std::max(0.0, enclosed_area(decompose(body, rect)));
  }
}

double clip_area(const ConvexBody& body, const Window& w) {
  double total = 0.0;
  for_each_translate(body, w, [&](const Eigen::Vector2i&, const Rect& r) { total += clip_area(body, r); });
  return total;
}

int translate_multiplicity(const ConvexBody& body, const Vec2& p) {
  Eigen::Vector4d bb = body.bounding_box();
  int count = 0;
  for (int m1 = static_cast<int>(std::ceil(bb[0] - p.x())); m1 <= static_cast<int>(std::floor(bb[2] - p.x())); ++m1)
    for (int m2 = static_cast<int>(std::ceil(bb[1] - p.y())); m2 <= static_cast<int>(std::floor(bb[3] - p.y()));
         ++m2)
      if (body.contains(p + Vec2(m1, m2))) ++count;
  return count;
}

double boundary_distance(const Boundary& boundary, const Vec2& p) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& piece : boundary) {
    double d = std::visit(
        [&](const auto& q) -> double {
          using T = std::decay_t<decltype(q)>;
          if constexpr (std::is_same_v<T, Segment>) {
            return segment_distance(q, p);
          } else if constexpr (std::is_same_v<T, CornerArc>) {
            return circle_arc_distance(q.center, q.radius, q.phi0, q.phi1, p);
          } else {
            if (q.body.kind() == ConvexBody::Kind::disk)
              return circle_arc_distance(q.body.center(), q.body.radius(), q.theta0, q.theta1, p);
            auto f = [&](double t) { return (q.body.point(t) - p).norm(); };
            int samples = std::max(16, static_cast<int>(64 * (q.theta1 - q.theta0)));
            return sampled_min(f, q.theta0, q.theta1, samples);
          }
        },
        piece);
    best = std::min(best, d);
  }
  return best;
}

double signed_distance(const Region& k, const Vec2& p) {
  double d = boundary_distance(k.boundary, p);
  return k.contains(p) ? d : -d;
}

Boundary level_boundary(const Region& k, double u) {
  double limit = 0.5 / k.body.kappa_max();
  if (!(std::abs(u) < limit))
    throw std::domain_error("level offset |u| = " + std::to_string(std::abs(u)) + " must be below 1/(2 kappa_max) = " +
                            std::to_string(limit));
  if (u == 0.0) return k.boundary;
  if (u > 0) {
    Rect inner = k.rect.shrink(u);
    if (!inner.valid()) return {};
    return decompose(k.body.offset(u), inner);
  }
  const double a = -u;
  Boundary out;
  const std::size_t n = k.boundary.size();
  for (std::size_t i = 0; i < n; ++i) {
    const BoundaryPiece& piece = k.boundary[i];
    std::visit(
        [&](const auto& q) {
          using T = std::decay_t<decltype(q)>;
          if constexpr (std::is_same_v<T, BodyArc>) {
            out.push_back(BodyArc{q.body.offset(u), q.theta0, q.theta1});
          } else if constexpr (std::is_same_v<T, Segment>) {
            Vec2 shift = a * segment_normal(q);
            out.push_back(Segment{q.a + shift, q.b + shift, q.axis_parallel});
          } else {
            out.push_back(CornerArc{q.center, q.radius + a, q.phi0, q.phi1});
          }
        },
        piece);
    // Corner arc at the vertex joining this piece to the next one.
    const BoundaryPiece& next = k.boundary[(i + 1) % n];
    double phi0 = piece_normal_end(piece);
    double turn = wrap_angle(piece_normal_start(next) - phi0);
    if (turn > 1e-12 && turn < kTwoPi - 1e-12) out.push_back(CornerArc{piece_end(piece), a, phi0, phi0 + turn});
  }
  return out;
}

}  // namespace tqmc
