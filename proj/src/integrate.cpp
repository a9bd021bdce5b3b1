#include "tqmc/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

#include <boost/math/special_functions/bessel.hpp>
#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "tqmc/fourier.hpp"

namespace tqmc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
using Cd = std::complex<double>;

int to_freq(double v, const std::string& field) {
  if (v != std::round(v)) throw std::invalid_argument(field + ": frequency " + std::to_string(v) + " is not an integer");
  return static_cast<int>(v);
}

Complex body_chi_hat(const ConvexBody& body, const Vec2& n) {
  switch (body.kind()) {
    case ConvexBody::Kind::disk:
      return disk_chi_hat(body.center(), body.radius(), n);
    case ConvexBody::Kind::ellipse: {
      const double a = body.semi_a() - body.offset_amount(), b = body.semi_b() - body.offset_amount();
      if (n.squaredNorm() == 0.0) return std::numbers::pi * a * b;
      if (body.offset_amount() != 0.0) break;
      Vec2 an(a * n.x(), b * n.y());
      double k = an.norm();
      double arg = kTwoPi * body.center().dot(n);
      return a * b * boost::math::cyl_bessel_j(1, kTwoPi * k) / k * Cd(std::cos(arg), -std::sin(arg));
    }
    case ConvexBody::Kind::support_series:
      break;
  }
  if (n.squaredNorm() == 0.0) return body.area();
  Boundary full{BodyArc{body, 0.0, kTwoPi}};
  return chi_hat(full, n, 1e-12).value;
}

}  // namespace

TrigPolynomial TrigPolynomial::from_rows(const std::vector<std::array<double, 4>>& rows) {
  TrigPolynomial p;
  for (const auto& r : rows) p.add(to_freq(r[0], "k1"), to_freq(r[1], "k2"), {r[2], r[3]});
  p.validate();
  return p;
}

TrigPolynomial TrigPolynomial::from_config(const config::Value& v) {
  std::vector<std::array<double, 4>> rows;
  for (const auto& row : v.as_array("integrand")) {
    auto xs = config::as_doubles(row, "integrand row");
    if (xs.size() != 4)
      throw config::ParseError(row.line, "integrand row needs [k1, k2, re, im], got " + std::to_string(xs.size()) +
                                             " entries");
    rows.push_back({xs[0], xs[1], xs[2], xs[3]});
  }
  try {
    return from_rows(rows);
  } catch (const std::invalid_argument& e) {
    throw config::ParseError(v.line, std::string("integrand: ") + e.what());
  }
}

TrigPolynomial TrigPolynomial::constant(double c) {
  TrigPolynomial p;
  p.add(0, 0, c);
  return p;
}

void TrigPolynomial::add(int k1, int k2, std::complex<double> c) { c_[{k1, k2}] += c; }

void TrigPolynomial::validate() const {
  for (const auto& [k, c] : c_) {
    if (std::max(std::abs(k.first), std::abs(k.second)) > kMaxDegree)
      throw std::invalid_argument("frequency (" + std::to_string(k.first) + ", " + std::to_string(k.second) +
                                  ") exceeds degree " + std::to_string(kMaxDegree));
    auto it = c_.find({-k.first, -k.second});
    Cd mirror = it == c_.end() ? Cd{} : it->second;
    if (std::abs(mirror - std::conj(c)) > kSymmetryTol)
      throw std::invalid_argument("coefficient at (" + std::to_string(-k.first) + ", " + std::to_string(-k.second) +
                                  ") must be the conjugate of the one at (" + std::to_string(k.first) + ", " +
                                  std::to_string(k.second) + ")");
  }
}

double TrigPolynomial::operator()(const Vec2& t) const {
  double sum = 0.0;
  for (const auto& [k, c] : c_) {
    double arg = kTwoPi * (k.first * t.x() + k.second * t.y());
    sum += c.real() * std::cos(arg) - c.imag() * std::sin(arg);
  }
  return sum;
}

double TrigPolynomial::mean() const {
  auto it = c_.find({0, 0});
  return it == c_.end() ? 0.0 : it->second.real();
}

int TrigPolynomial::degree() const {
  int d = 0;
  for (const auto& [k, c] : c_) d = std::max({d, std::abs(k.first), std::abs(k.second)});
  return d;
}

TrigPolynomial TrigPolynomial::derivative(int d1, int d2) const {
  TrigPolynomial p;
  for (const auto& [k, c] : c_) {
    Cd f{1.0};
    for (int i = 0; i < d1; ++i) f *= Cd(0.0, kTwoPi * k.first);
    for (int i = 0; i < d2; ++i) f *= Cd(0.0, kTwoPi * k.second);
    Cd v = f * c;
    if (v != Cd{}) p.c_[k] = v;
  }
  return p;
}

TrigPolynomial TrigPolynomial::operator*(double a) const {
  TrigPolynomial p;
  for (const auto& [k, c] : c_) p.c_[k] = a * c;
  return p;
}

TrigPolynomial TrigPolynomial::operator+(const TrigPolynomial& o) const {
  TrigPolynomial p = *this;
  for (const auto& [k, c] : o.c_) p.c_[k] += c;
  return p;
}

double l1_norm(const TrigPolynomial& f, int grid) {
  if (grid < 1) throw std::invalid_argument("l1_norm: grid must be positive");
  if (f.coefficients().empty()) return 0.0;
  std::set<int> k1s, k2s;
  for (const auto& [k, c] : f.coefficients()) {
    k1s.insert(k.first);
    k2s.insert(k.second);
  }
  std::vector<int> k1(k1s.begin(), k1s.end()), k2(k2s.begin(), k2s.end());
  auto index = [](const std::vector<int>& v, int k) {
    return static_cast<Eigen::Index>(std::lower_bound(v.begin(), v.end(), k) - v.begin());
  };
  const Eigen::Index m = grid;
  Eigen::VectorXcd roots(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    double arg = kTwoPi * static_cast<double>(i) / static_cast<double>(m);
    roots[i] = Cd(std::cos(arg), std::sin(arg));
  }
  auto basis = [&](const std::vector<int>& ks) {
    Eigen::MatrixXcd e(m, static_cast<Eigen::Index>(ks.size()));
    for (Eigen::Index c = 0; c < e.cols(); ++c) {
      long k = ks[static_cast<std::size_t>(c)];
      for (Eigen::Index i = 0; i < m; ++i) e(i, c) = roots[((k * i) % m + m) % m];
    }
    return e;
  };
  Eigen::MatrixXcd coef = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(k1.size()), static_cast<Eigen::Index>(k2.size()));
  for (const auto& [k, c] : f.coefficients()) coef(index(k1, k.first), index(k2, k.second)) = c;
  Eigen::MatrixXcd values = basis(k1) * coef * basis(k2).transpose();
  return values.real().cwiseAbs().sum() / (static_cast<double>(m) * static_cast<double>(m));
}

VariationResult variation_detail(const TrigPolynomial& f, int grid) {
  if (grid < 2 || grid % 2 != 0) throw std::invalid_argument("variation: grid must be even");
  f.validate();
  static constexpr std::array<double, 4> kWeights{4.0, 2.0, 2.0, 1.0};
  const std::array<TrigPolynomial, 4> parts{f, f.derivative(1, 0), f.derivative(0, 1), f.derivative(1, 1)};
  VariationResult r;
  for (std::size_t i = 0; i < 4; ++i) {
    double fine = l1_norm(parts[i], grid);
    double coarse = l1_norm(parts[i], grid / 2);
    r.norms[i] = (4.0 * fine - coarse) / 3.0;
    r.value += kWeights[i] * r.norms[i];
    r.est_abs_error += kWeights[i] * std::abs(r.norms[i] - fine);
  }
  return r;
}

double variation(const TrigPolynomial& f) { return variation_detail(f).value; }

double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  std::size_t half = n / 2;
  return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

double qmc_integrate(const TrigPolynomial& f, const ConvexBody& body, const PointSet& points) {
  if (points.size() == 0) throw std::invalid_argument("qmc_integrate: empty point set");
  WeightedPoints pts(points, body);
  std::vector<double> terms(pts.coords.size());
  for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = f(pts.coords[i]) * pts.weight[i];
  return pairwise_sum(terms.data(), terms.size()) / static_cast<double>(pts.total);
}

double reference_integral(const TrigPolynomial& f, const ConvexBody& body) {
  Cd sum{};
  for (const auto& [k, c] : f.coefficients()) sum += c * body_chi_hat(body, Vec2(-k.first, -k.second));
  return sum.real();
}

IntegrationReport kh_certificate(const TrigPolynomial& f, const ConvexBody& body, const PointSet& points,
                                 double d_value, const std::string& d_method) {
  IntegrationReport r;
  r.N = static_cast<long>(points.size());
  r.qmc_value = qmc_integrate(f, body, points);
  r.reference_value = reference_integral(f, body);
  r.abs_error = std::abs(r.qmc_value - r.reference_value);
  r.V_f = variation(f);
  r.D_used = d_value;
  r.D_method = d_method;
  r.kh_product = r.V_f * r.D_used;
  r.violation = r.abs_error > r.kh_product;
  return r;
}

IntegrationReport kh_certificate(const TrigPolynomial& f, const ConvexBody& body, const PointSet& points,
                                 const DiscrepancyEstimate& d) {
  return kh_certificate(f, body, points, d.value, to_string(d.method));
}

void write_json(std::ostream& out, const IntegrationReport& r) {
  nlohmann::ordered_json j;
  j["N"] = r.N;
  j["qmc_value"] = r.qmc_value;
  j["reference_value"] = r.reference_value;
  j["abs_error"] = r.abs_error;
  j["V_f"] = r.V_f;
  j["D_used"] = r.D_used;
  j["D_method"] = r.D_method;
  j["kh_product"] = r.kh_product;
  j["violation"] = r.violation;
  out << j.dump(2) << '\n';
}

void write_integration_csv_header(std::ostream& out) {
  out << "N,qmc,reference,abs_error,V_f,D_used,D_method,kh_product,violation\n";
}

void write_csv_row(std::ostream& out, const IntegrationReport& r) {
  auto old = out.precision(17);
  out << r.N << ',' << r.qmc_value << ',' << r.reference_value << ',' << r.abs_error << ',' << r.V_f << ','
      << r.D_used << ',' << r.D_method << ',' << r.kh_product << ',' << (r.violation ? 1 : 0) << '\n';
  out.precision(old);
}

}  // namespace tqmc
