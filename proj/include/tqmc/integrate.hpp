#pragma once

#include <array>
#include <complex>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "tqmc/config.hpp"
#include "tqmc/discrepancy.hpp"
#include "tqmc/geometry.hpp"
#include "tqmc/sequences.hpp"

namespace tqmc {

/// Real trigonometric polynomial f(t) = sum_k c_k e^{2 pi i k.t} on the
/// torus, stored as a finite map k -> c_k with c_{-k} = conj(c_k).
class TrigPolynomial {
 public:
  using Key = std::pair<int, int>;
  static constexpr int kMaxDegree = 64;
  static constexpr double kSymmetryTol = 1e-12;

  TrigPolynomial() = default;
  /// Rows `[k1, k2, re, im]`. Validates.
  static TrigPolynomial from_rows(const std::vector<std::array<double, 4>>& rows);
  static TrigPolynomial from_config(const config::Value& v);
  static TrigPolynomial constant(double c);

  /// Accumulates into c_k without validation.
  void add(int k1, int k2, std::complex<double> c);
  /// Throws std::invalid_argument on broken symmetry, degree > 64 or
  /// non-integer frequencies.
  void validate() const;

  double operator()(const Vec2& t) const;
  double mean() const;
  int degree() const;
  /// Partial derivative d^{d1+d2} / dt1^d1 dt2^d2, exact on coefficients.
  TrigPolynomial derivative(int d1, int d2) const;
  TrigPolynomial operator*(double a) const;
  TrigPolynomial operator+(const TrigPolynomial& o) const;

  const std::map<Key, std::complex<double>>& coefficients() const { return c_; }

 private:
  std::map<Key, std::complex<double>> c_;
};

struct VariationResult {
  double value = 0.0;
  /// ||f||_1, ||d1 f||_1, ||d2 f||_1, ||d1 d2 f||_1 after extrapolation.
  std::array<double, 4> norms{};
  /// |extrapolated - fine grid| summed with the variation weights.
  double est_abs_error = 0.0;
};

/// L1 norm of f on the torus by the periodic tensor rule on a `grid`^2 grid.
double l1_norm(const TrigPolynomial& f, int grid);

/// V(f) = 4 ||f||_1 + 2 ||d1 f||_1 + 2 ||d2 f||_1 + ||d1 d2 f||_1, each norm on
/// 2048^2 and 1024^2 grids combined by Richardson extrapolation.
VariationResult variation_detail(const TrigPolynomial& f, int grid = 2048);
double variation(const TrigPolynomial& f);

/// (1/N) sum_j f(t_j) #{m : t_j + m in body}, summed pairwise.
double qmc_integrate(const TrigPolynomial& f, const ConvexBody& body, const PointSet& points);
/// Pairwise (tree) summation.
double pairwise_sum(const double* v, std::size_t n);

/// int_body f = sum_k c_k chi_hat_body(-k), with Bessel closed forms for
/// disks and ellipses and boundary quadrature for support-function bodies.
double reference_integral(const TrigPolynomial& f, const ConvexBody& body);

struct IntegrationReport {
  long N = 0;
  double qmc_value = 0.0;
  double reference_value = 0.0;
  double abs_error = 0.0;
  double V_f = 0.0;
  double D_used = 0.0;
  std::string D_method;
  double kh_product = 0.0;
  /// abs_error > kh_product. With a lower-bound D this asks for a finer
  /// search rather than signalling a failure.
  bool violation = false;
};

IntegrationReport kh_certificate(const TrigPolynomial& f, const ConvexBody& body, const PointSet& points,
                                 const DiscrepancyEstimate& d);
IntegrationReport kh_certificate(const TrigPolynomial& f, const ConvexBody& body, const PointSet& points,
                                 double d_value, const std::string& d_method);

void write_json(std::ostream& out, const IntegrationReport& r);
/// `N,qmc,reference,abs_error,V_f,D_used,D_method,kh_product,violation`.
void write_integration_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const IntegrationReport& r);

}  // namespace tqmc
