#pragma once

#include <array>
#include <complex>
#include <optional>
#include <ostream>

#include <Eigen/Core>

#include "tqmc/sequences.hpp"

namespace tqmc {

/// Top 128 fractional bits of alpha and beta. Phases n1 alpha + n2 beta
/// mod 1 are formed with wrapping 128-bit integer arithmetic, so they are
/// exact up to (|n1| + |n2|) 2^-128.
class PhaseTable {
 public:
  explicit PhaseTable(const KroneckerSpec& spec);
  explicit PhaseTable(const SpecValues& values);

  unsigned __int128 theta_bits(long n1, long n2) const;
  /// {n1 alpha + n2 beta} in [0, 1).
  double theta(long n1, long n2) const;
  /// ||n1 alpha + n2 beta||.
  double torus_norm(long n1, long n2) const;

  static double to_unit(unsigned __int128 bits);
  static double nearest_int_dist(unsigned __int128 bits);

 private:
  unsigned __int128 a_ = 0, b_ = 0;
};

/// ||n1 alpha + n2 beta|| in fixed point, tracked error <= (|n1|+|n2|) 2^-P.
FixedReal torus_norm_linear(const KroneckerSpec& spec, long n1, long n2);
FixedReal torus_norm_linear(const SpecValues& values, long n1, long n2);

struct ExpSumResult {
  std::complex<double> direct{};  // (1/N) sum_{j=1}^N e^{2 pi i j theta}
  bool has_direct = false;
  double closed_form_abs = 0.0;  // |sin(pi N theta) / (N sin(pi theta))|
  double bound = 0.0;            // 1 / (N ||theta||)
};

/// Exponential sum for theta given by its 128 fractional bits. The direct
/// sum is formed for N <= 10^5.
ExpSumResult exp_sum_theta(unsigned __int128 theta, long N);
ExpSumResult exp_sum(const PhaseTable& phases, long n1, long n2, long N);
ExpSumResult exp_sum(const KroneckerSpec& spec, long n1, long n2, long N);
/// Closed-form magnitude only.
double exp_sum_abs(unsigned __int128 theta, long N);

struct DiophantineConstants {
  int M = 0;
  double eta = 0.0;
  Eigen::Vector2i eta_argmin{0, 0};
  static constexpr std::array<double, 3> kEps{0.05, 0.1, 0.2};
  std::array<double, 3> gamma{};
  std::array<Eigen::Vector2i, 3> gamma_argmin{};
  /// Set for rationally dependent specs: r0 + r1 alpha + r2 beta = 0.
  std::optional<std::array<std::int64_t, 3>> relation;
  bool degenerate() const { return relation.has_value(); }
};

/// eta = min ||n.(alpha, beta)|| max(|n1|, |n2|)^2 and
/// gamma(eps) = min ||n.(alpha, beta)|| ((1+|n1|)(1+|n2|))^{1+eps}
/// over 0 < max |n_i| <= M.
DiophantineConstants empirical_constants(const KroneckerSpec& spec, int M);
void write_json(std::ostream& out, const DiophantineConstants& c);

struct DyadicReport {
  int i = 0, j = 0;
  long terms = 0;
  double sum = 0.0;  // sum of 1/||n1 alpha + n2 beta|| over the box
  /// Smallest ||d.(alpha, beta)|| over nonzero d with |d1| <= 2^{i+2},
  /// |d2| <= 2^{j+2}; covers all differences and sums of box frequencies.
  double gamma_tilde = 0.0;
  int max_occupancy = 0;   // most values in one interval [(k-1) g, k g)
  int first_interval = 0;  // values in [0, g)
  bool occupancy_ok() const { return max_occupancy <= 2 && first_interval == 0; }
};

/// Box 2^i <= n1 < 2^{i+1}, 2^j <= n2 < 2^{j+1}; requires i + j <= 22.
DyadicReport dyadic_sum(const KroneckerSpec& spec, int i, int j);
DyadicReport dyadic_sum(const PhaseTable& phases, int i, int j);

struct CertificateReport {
  long N = 0;
  double R = 0.0;
  double term_const = 0.0;
  double term_smooth = 0.0;
  double term_product = 0.0;
  double total = 0.0;
};

/// 1/R + sum_{0<|n|<R} (|n|^-3/2 + 1/((1+|n1|)(1+|n2|))) / (N ||n.(alpha, beta)||).
/// Refuses R > 4096 unless `allow_large`.
CertificateReport certificate_sum(const KroneckerSpec& spec, long N, double R, bool allow_large = false);
CertificateReport certificate_sum(const PhaseTable& phases, long N, double R, bool allow_large = false);
/// ceil(N^{2/3}) by exact integer comparison.
long default_cutoff(long N);
void write_json(std::ostream& out, const CertificateReport& r);

}  // namespace tqmc
