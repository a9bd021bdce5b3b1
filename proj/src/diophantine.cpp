#include "tqmc/diophantine.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

namespace tqmc {

namespace {

using U128 = unsigned __int128;
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPow128 = 0x1.0p128;

U128 times(long n, U128 v) { return static_cast<U128>(static_cast<__int128>(n)) * v; }

}  // namespace

PhaseTable::PhaseTable(const KroneckerSpec& spec) : PhaseTable(evaluate(spec)) {}

PhaseTable::PhaseTable(const SpecValues& values)
    : a_(values.alpha.frac_top128()), b_(values.beta.frac_top128()) {}

U128 PhaseTable::theta_bits(long n1, long n2) const { return times(n1, a_) + times(n2, b_); }

double PhaseTable::to_unit(U128 bits) { return static_cast<double>(bits) / kTwoPow128; }

double PhaseTable::nearest_int_dist(U128 bits) {
  U128 other = -bits;
  return to_unit(bits < other ? bits : other);
}

double PhaseTable::theta(long n1, long n2) const {
  double t = to_unit(theta_bits(n1, n2));
  return t >= 1.0 ? 0.0 : t;
}

double PhaseTable::torus_norm(long n1, long n2) const { return nearest_int_dist(theta_bits(n1, n2)); }

FixedReal torus_norm_linear(const SpecValues& values, long n1, long n2) {
  if (n1 == 0 && n2 == 0) throw std::invalid_argument("torus_norm_linear: n must be nonzero");
  return fx_nearest_int_dist(values.alpha * n1 + values.beta * n2);
}

FixedReal torus_norm_linear(const KroneckerSpec& spec, long n1, long n2) {
  return torus_norm_linear(evaluate(spec), n1, n2);
}

double exp_sum_abs(U128 theta, long N) {
  if (N < 1) throw std::invalid_argument("exp_sum: N must be at least 1");
  double s = std::sin(kPi * PhaseTable::to_unit(theta));
  if (s == 0.0) return 1.0;
  double sn = std::sin(kPi * PhaseTable::to_unit(times(N, theta)));
  return std::abs(sn / (static_cast<double>(N) * s));
}

ExpSumResult exp_sum_theta(U128 theta, long N) {
  ExpSumResult r;
  r.closed_form_abs = exp_sum_abs(theta, N);
  double norm = PhaseTable::nearest_int_dist(theta);
  r.bound = norm > 0 ? 1.0 / (static_cast<double>(N) * norm) : std::numeric_limits<double>::infinity();
  if (N <= 100000) {
    std::complex<double> sum{};
    U128 phase = 0;
    for (long j = 1; j <= N; ++j) {
      phase += theta;
      double t = 2 * kPi * PhaseTable::to_unit(phase);
      sum += std::complex<double>(std::cos(t), std::sin(t));
    }
    r.direct = sum / static_cast<double>(N);
    r.has_direct = true;
  }
  return r;
}

ExpSumResult exp_sum(const PhaseTable& phases, long n1, long n2, long N) {
  if (n1 == 0 && n2 == 0) throw std::invalid_argument("exp_sum: n must be nonzero");
  return exp_sum_theta(phases.theta_bits(n1, n2), N);
}

ExpSumResult exp_sum(const KroneckerSpec& spec, long n1, long n2, long N) {
  return exp_sum(PhaseTable(spec), n1, n2, N);
}

DiophantineConstants empirical_constants(const KroneckerSpec& spec, int M) {
  if (M < 1) throw std::invalid_argument("empirical_constants: M must be positive");
  DiophantineConstants c;
  c.M = M;
  c.relation = spec.integer_relation();
  PhaseTable phases(spec);
  c.eta = std::numeric_limits<double>::infinity();
  c.gamma.fill(std::numeric_limits<double>::infinity());
  // ||-theta|| = ||theta||, so half of the frequencies suffice.
  for (int n1 = 0; n1 <= M; ++n1) {
    for (int n2 = -M; n2 <= M; ++n2) {
      if (n1 == 0 && n2 <= 0) continue;
      double norm = phases.torus_norm(n1, n2);
      double m = std::max(std::abs(n1), std::abs(n2));
      double e = norm * m * m;
      if (e < c.eta) {
        c.eta = e;
        c.eta_argmin = {n1, n2};
      }
      double prod = (1.0 + std::abs(n1)) * (1.0 + std::abs(n2));
      for (std::size_t k = 0; k < DiophantineConstants::kEps.size(); ++k) {
        double g = norm * std::pow(prod, 1.0 + DiophantineConstants::kEps[k]);
        if (g < c.gamma[k]) {
          c.gamma[k] = g;
          c.gamma_argmin[k] = {n1, n2};
        }
      }
    }
  }
  return c;
}

void write_json(std::ostream& out, const DiophantineConstants& c) {
  nlohmann::ordered_json j;
  j["M"] = c.M;
  j["eta_emp"] = c.eta;
  j["eta_argmin"] = {c.eta_argmin.x(), c.eta_argmin.y()};
  auto& g = j["gamma_emp"];
  for (std::size_t k = 0; k < c.gamma.size(); ++k)
    g.push_back({{"eps", DiophantineConstants::kEps[k]},
                 {"gamma", c.gamma[k]},
                 {"argmin", {c.gamma_argmin[k].x(), c.gamma_argmin[k].y()}}});
  j["degenerate"] = c.degenerate();
  if (c.relation) j["relation"] = {(*c.relation)[0], (*c.relation)[1], (*c.relation)[2]};
  out << j.dump(2) << '\n';
}

DyadicReport dyadic_sum(const PhaseTable& phases, int i, int j) {
  if (i < 0 || j < 0 || i + j > 22) throw std::invalid_argument("dyadic_sum: need i, j >= 0 and i + j <= 22");
  DyadicReport r;
  r.i = i;
  r.j = j;
  const long a0 = 1L << i, a1 = (1L << (i + 1)) - 1;
  const long b0 = 1L << j, b1 = (1L << (j + 1)) - 1;
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>((a1 - a0 + 1) * (b1 - b0 + 1)));
  for (long n1 = a0; n1 <= a1; ++n1)
    for (long n2 = b0; n2 <= b1; ++n2) {
      double v = phases.torus_norm(n1, n2);
      values.push_back(v);
      r.sum += 1.0 / v;
    }
  r.terms = static_cast<long>(values.size());

  const long d1max = 1L << (i + 2), d2max = 1L << (j + 2);
  double g = std::numeric_limits<double>::infinity();
  for (long d1 = 0; d1 <= d1max; ++d1)
    for (long d2 = -d2max; d2 <= d2max; ++d2) {
      if (d1 == 0 && d2 <= 0) continue;
      g = std::min(g, phases.torus_norm(d1, d2));
    }
  r.gamma_tilde = g;

  std::sort(values.begin(), values.end());
  long current = -1;
  int run = 0;
  for (double v : values) {
    long k = static_cast<long>(std::floor(v / g));
    if (k == 0) ++r.first_interval;
    run = (k == current) ? run + 1 : 1;
    current = k;
    r.max_occupancy = std::max(r.max_occupancy, run);
  }
  return r;
}

DyadicReport dyadic_sum(const KroneckerSpec& spec, int i, int j) { return dyadic_sum(PhaseTable(spec), i, j); }

long default_cutoff(long N) {
  if (N < 1) throw std::invalid_argument("default_cutoff: N must be positive");
  auto n2 = static_cast<__int128>(N) * N;
  long r = std::max(1L, static_cast<long>(std::cbrt(static_cast<double>(N) * static_cast<double>(N))) - 2);
  while (static_cast<__int128>(r) * r * r < n2) ++r;
  return r;
}

CertificateReport certificate_sum(const PhaseTable& phases, long N, double R, bool allow_large) {
  if (N < 1) throw std::invalid_argument("certificate_sum: N must be at least 1");
  if (!(R >= 1)) throw std::invalid_argument("certificate_sum: R must be at least 1");
  if (R > 4096 && !allow_large)
    throw std::invalid_argument("certificate_sum: R = " + std::to_string(R) +
                                " exceeds 4096 (quadratic cost); pass the override to force it");
  CertificateReport r;
  r.N = N;
  r.R = R;
  r.term_const = 1.0 / R;
  const long bound = static_cast<long>(std::ceil(R));
  const double R2 = R * R;
  double smooth = 0.0, product = 0.0;
  // Half plane n1 > 0 or (n1 = 0, n2 > 0), doubled: ||-theta|| = ||theta||.
  for (long n1 = 0; n1 <= bound; ++n1) {
    for (long n2 = -bound; n2 <= bound; ++n2) {
      if (n1 == 0 && n2 <= 0) continue;
      double q = static_cast<double>(n1 * n1 + n2 * n2);
      if (!(q < R2)) continue;
      double inv = 1.0 / phases.torus_norm(n1, n2);
      smooth += std::pow(q, -0.75) * inv;
      product += inv / ((1.0 + static_cast<double>(std::labs(n1))) * (1.0 + static_cast<double>(std::labs(n2))));
    }
  }
  r.term_smooth = 2.0 * smooth / static_cast<double>(N);
  r.term_product = 2.0 * product / static_cast<double>(N);
  r.total = r.term_const + r.term_smooth + r.term_product;
  return r;
}

CertificateReport certificate_sum(const KroneckerSpec& spec, long N, double R, bool allow_large) {
  return certificate_sum(PhaseTable(spec), N, R, allow_large);
}

void write_json(std::ostream& out, const CertificateReport& r) {
  nlohmann::ordered_json j;
  j["N"] = r.N;
  j["R"] = r.R;
  j["term_const"] = r.term_const;
  j["term_smooth"] = r.term_smooth;
  j["term_product"] = r.term_product;
  j["total"] = r.total;
  out << j.dump(2) << '\n';
}

}  // namespace tqmc
