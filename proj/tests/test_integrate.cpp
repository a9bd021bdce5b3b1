#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "oracles.hpp"
#include "tqmc/integrate.hpp"

using namespace tqmc;

namespace {

constexpr double kPi = std::numbers::pi;

TrigPolynomial sin1() { return TrigPolynomial::from_rows({{1, 0, 0, -0.5}, {-1, 0, 0, 0.5}}); }
TrigPolynomial cos1() { return TrigPolynomial::from_rows({{1, 0, 0.5, 0}, {-1, 0, 0.5, 0}}); }
// sin(2 pi t1) sin(2 pi t2) = (cos 2pi(t1-t2) - cos 2pi(t1+t2)) / 2
TrigPolynomial sin_sin() {
  return TrigPolynomial::from_rows({{1, -1, 0.25, 0}, {-1, 1, 0.25, 0}, {1, 1, -0.25, 0}, {-1, -1, -0.25, 0}});
}
// 1 + cos(2 pi t1) cos(2 pi t2)
TrigPolynomial one_plus_cos_cos() {
  return TrigPolynomial::from_rows(
      {{0, 0, 1, 0}, {1, 1, 0.25, 0}, {-1, -1, 0.25, 0}, {1, -1, 0.25, 0}, {-1, 1, 0.25, 0}});
}

TrigPolynomial random_poly(std::mt19937_64& rng, int degree, int terms) {
  std::uniform_int_distribution<int> k(-degree, degree);
  std::normal_distribution<double> c;
  TrigPolynomial f;
  f.add(0, 0, c(rng));
  for (int i = 0; i < terms; ++i) {
    int k1 = k(rng), k2 = k(rng);
    if (!k1 && !k2) continue;
    std::complex<double> z(c(rng), c(rng));
    f.add(k1, k2, z);
    f.add(-k1, -k2, std::conj(z));
  }
  f.validate();
  return f;
}

double direct_eval(const TrigPolynomial& f, double t1, double t2) {
  std::complex<double> s;
  for (const auto& [k, c] : f.coefficients()) s += c * std::polar(1.0, 2 * kPi * (k.first * t1 + k.second * t2));
  return s.real();
}

PointSet single_point(double x, double y) {
  PointSet p;
  p.family = Family::seeded_random;
  p.coords.resize(2, 1);
  p.coords.col(0) = Vec2(x, y);
  p.points.push_back({FixedReal::from_double(x), FixedReal::from_double(y)});
  return p;
}

}  // namespace

TEST_SUITE("integrate") {
  TEST_CASE("trigonometric polynomial basics") {
    auto s = sin1();
    CHECK(s({0.25, 0.7}) == doctest::Approx(1).epsilon(1e-15));
    CHECK(s.mean() == 0.0);
    CHECK(s.degree() == 1);
    auto d = s.derivative(1, 0);
    CHECK(d({0.0, 0.3}) == doctest::Approx(2 * kPi).epsilon(1e-14));
    CHECK(s.derivative(0, 1).coefficients().empty());
    std::mt19937_64 rng(8);
    auto f = random_poly(rng, 6, 10);
    std::uniform_real_distribution<double> u(0, 1);
    for (int t = 0; t < 50; ++t) {
      double a = u(rng), b = u(rng);
      CHECK(std::abs(f({a, b}) - direct_eval(f, a, b)) < 1e-12);
    }
    CHECK(TrigPolynomial::constant(2.5)({0.1, 0.9}) == 2.5);
    CHECK_THROWS_AS(TrigPolynomial::from_rows({{1, 0, 1, 0}}), std::invalid_argument);
    CHECK_THROWS_AS(TrigPolynomial::from_rows({{65, 0, 1, 0}, {-65, 0, 1, 0}}), std::invalid_argument);
    CHECK_THROWS_AS(TrigPolynomial::from_rows({{0.5, 0, 1, 0}, {-0.5, 0, 1, 0}}), std::invalid_argument);
    CHECK_THROWS_AS(TrigPolynomial::from_rows({{0, 0, 1, 0.5}}), std::invalid_argument);
    CHECK_NOTHROW(TrigPolynomial::from_rows({{64, -64, 1, 2}, {-64, 64, 1, -2}}));
  }

  TEST_CASE("variation examples") {
    CHECK(std::abs(variation(TrigPolynomial::constant(1)) - 4) < 1e-6);
    CHECK(std::abs(variation(sin1()) - (8 / kPi + 8)) < 1e-6);
    CHECK(std::abs(variation(sin_sin()) - (16 / (kPi * kPi) + 32 / kPi + 16)) < 1e-6);
    auto r = variation_detail(one_plus_cos_cos());
    CHECK(std::abs(r.value - (20 + 32 / kPi)) < 1e-6);
    CHECK(std::abs(r.norms[0] - 1) < 1e-9);
    CHECK(std::abs(r.norms[3] - 16) < 1e-6);
    CHECK(std::abs(r.value - (20 + 32 / kPi)) <= r.est_abs_error);
    CHECK(variation(TrigPolynomial()) == 0.0);
  }

  TEST_CASE("variation dominates the torus integral") {
    std::mt19937_64 rng(21);
    for (int t = 0; t < 5; ++t) {
      auto f = random_poly(rng, 4, 6);
      CHECK(variation(f) >= 4 * std::abs(f.mean()) - 1e-9);
      double fine = l1_norm(f, 512);
      // Independent midpoint rule for ||f||_1.
      double s = 0;
      for (int i = 0; i < 512; ++i)
        for (int j = 0; j < 512; ++j) s += std::abs(direct_eval(f, (i + 0.5) / 512, (j + 0.5) / 512));
      CHECK(std::abs(fine - s / (512.0 * 512.0)) < 1e-3 * (1 + fine));
    }
  }

  TEST_CASE("QMC sums") {
    auto disk = ConvexBody::disk({0.5, 0.5}, 0.25);
    auto pts = kronecker_block(KroneckerSpec::plastic(), 4096);
    double one = qmc_integrate(TrigPolynomial::constant(1), disk, pts);
    long count = 0;
    for (Eigen::Index j = 0; j < pts.coords.cols(); ++j) {
      double dx = pts.coords(0, j) - 0.5, dy = pts.coords(1, j) - 0.5;
      if (dx * dx + dy * dy <= 0.0625) ++count;
    }
    CHECK(one == static_cast<double>(count) / 4096);
    CHECK(std::abs(one - kPi / 16) < 0.01);

    std::mt19937_64 rng(4);
    auto f = random_poly(rng, 5, 8), g = random_poly(rng, 7, 5);
    auto e = ConvexBody::ellipse({0.4, 0.5}, 0.7, 0.3);
    double a = 1.75, b = -0.3;
    double lhs = qmc_integrate(f * a + g * b, e, pts);
    double rhs = a * qmc_integrate(f, e, pts) + b * qmc_integrate(g, e, pts);
    CHECK(std::abs(lhs - rhs) < 1e-12);

    // Independent count with translates for the ellipse, which leaves the cell.
    double s = 0;
    for (Eigen::Index j = 0; j < pts.coords.cols(); ++j) {
      int m = 0;
      for (int m1 = -2; m1 <= 2; ++m1)
        for (int m2 = -2; m2 <= 2; ++m2) {
          double u = (pts.coords(0, j) + m1 - 0.4) / 0.7, v = (pts.coords(1, j) + m2 - 0.5) / 0.3;
          if (u * u + v * v <= 1) ++m;
        }
      s += m * direct_eval(f, pts.coords(0, j), pts.coords(1, j));
    }
    CHECK(std::abs(qmc_integrate(f, e, pts) - s / 4096) < 1e-11);

    std::vector<double> tenth(1 << 20, 0.1);
    CHECK(std::abs(pairwise_sum(tenth.data(), tenth.size()) - 104857.6) < 1e-9);
    CHECK(pairwise_sum(tenth.data(), 0) == 0.0);
  }

  TEST_CASE("reference integrals") {
    auto disk = ConvexBody::disk({0.5, 0.5}, 0.25);
    CHECK(reference_integral(TrigPolynomial::constant(1), disk) == doctest::Approx(kPi / 16).epsilon(1e-14));
    CHECK(std::abs(reference_integral(sin1(), disk)) < 1e-15);
    double c = reference_integral(cos1(), disk);
    double quad = oracle::disk_integral([](double x, double) { return std::cos(2 * kPi * x); }, 0.5, 0.5, 0.25);
    CHECK(std::abs(c - quad) < 1e-8);
    CHECK(std::abs(c + 0.25 * oracle::bessel_j(1, kPi / 2)) < 1e-12);

    std::mt19937_64 rng(9);
    auto f = random_poly(rng, 3, 5);
    auto eval = [&](double x, double y) { return direct_eval(f, x, y); };
    auto d2 = ConvexBody::disk({0.3, 0.6}, 0.4);
    CHECK(std::abs(reference_integral(f, d2) - oracle::disk_integral(eval, 0.3, 0.6, 0.4)) < 1e-8);
    // Ellipse as a scaled unit disk.
    auto e = ConvexBody::ellipse({0.4, 0.5}, 0.7, 0.3);
    double eq = 0.7 * 0.3 *
                oracle::disk_integral([&](double x, double y) { return eval(0.4 + 0.7 * x, 0.5 + 0.3 * y); }, 0, 0, 1);
    CHECK(std::abs(reference_integral(f, e) - eq) < 1e-8);
  }

  TEST_CASE("reference integral over a support-function body") {
    auto b = ConvexBody::support_series({0.5, 0.45}, {0.3, 0, 0.02, 0.004}, {0, 0, 0, 0.003});
    // Terms with k1 != 0 only, so int e^{2 pi i k.x} dA = closed line integral of
    // e^{2 pi i k.x} / (2 pi i k1) dy along the boundary x(theta).
    auto f = TrigPolynomial::from_rows(
        {{1, 0, 0.5, 0}, {-1, 0, 0.5, 0}, {2, 1, 0.1, -0.2}, {-2, -1, 0.1, 0.2}, {1, -3, 0, 0.3}, {-1, 3, 0, -0.3}});
    const double cx = 0.5, cy = 0.45;
    auto h = [](double t) { return 0.3 + 0.02 * std::cos(2 * t) + 0.004 * std::cos(3 * t) + 0.003 * std::sin(3 * t); };
    auto dh = [](double t) { return -0.04 * std::sin(2 * t) - 0.012 * std::sin(3 * t) + 0.009 * std::cos(3 * t); };
    auto ddh = [](double t) { return -0.08 * std::cos(2 * t) - 0.036 * std::cos(3 * t) - 0.027 * std::sin(3 * t); };
    const int M = 4096;
    std::complex<double> total;
    for (int i = 0; i < M; ++i) {
      double t = 2 * kPi * i / M, ct = std::cos(t), st = std::sin(t);
      double x = cx + h(t) * ct - dh(t) * st, y = cy + h(t) * st + dh(t) * ct;
      double dy = (h(t) + ddh(t)) * ct;
      for (const auto& [k, c] : f.coefficients()) {
        auto e = std::polar(1.0, 2 * kPi * (k.first * x + k.second * y));
        total += c * e / (std::complex<double>(0, 2 * kPi * k.first)) * dy;
      }
    }
    double want = total.real() * 2 * kPi / M;
    CHECK(std::abs(reference_integral(f, b) - want) < 1e-9);
    CHECK(reference_integral(TrigPolynomial::constant(1), b) == doctest::Approx(b.area()).epsilon(1e-12));
  }

  TEST_CASE("Koksma-Hlawka certificates") {
    auto disk = ConvexBody::disk({0.5, 0.5}, 0.25);
    auto one = TrigPolynomial::constant(1);
    auto pts = kronecker_block(KroneckerSpec::plastic(), 128);
    auto r = kh_certificate(one, disk, pts, sup_oracle_smallN(pts, disk));
    CHECK_FALSE(r.violation);
    CHECK(r.abs_error == std::abs(r.qmc_value - r.reference_value));
    CHECK(r.kh_product == r.V_f * r.D_used);
    CHECK(r.D_method == "critical_enum");

    auto p1 = single_point(0.5, 0.5);
    auto r1 = kh_certificate(one, disk, p1, sup_oracle_smallN(p1, disk));
    CHECK(r1.abs_error == doctest::Approx(1 - kPi / 16).epsilon(1e-12));
    CHECK_FALSE(r1.violation);

    auto r0 = kh_certificate(TrigPolynomial(), disk, pts, 0.0, "none");
    CHECK(r0.abs_error == 0.0);
    CHECK(r0.V_f == 0.0);
    CHECK_FALSE(r0.violation);

    auto flagged = kh_certificate(one, disk, p1, 0.01, "grid_refine");
    CHECK(flagged.violation);
  }

  TEST_CASE("error stays under V times the structural bound") {
    auto spec = KroneckerSpec::plastic();
    auto body = ConvexBody::disk({0.5, 0.5}, 0.35);
    auto f = one_plus_cos_cos();
    for (long N : {256L, 1024L}) {
      EtKernelConfig cfg;
      cfg.R = static_cast<double>(default_cutoff(N));
      auto et = et_structural_bound(spec, body, Window::make({1, 1}, {0, 0}), cfg, N);
      auto r = kh_certificate(f, body, kronecker_block(spec, N), et.value, "et");
      CHECK_FALSE(r.violation);
      CHECK(r.abs_error <= r.V_f * et.value);
    }
  }

  TEST_CASE("reports") {
    IntegrationReport r;
    r.N = 64;
    r.D_method = "grid_refine";
    std::ostringstream os;
    write_json(os, r);
    auto j = nlohmann::json::parse(os.str());
    for (const char* k : {"N", "qmc_value", "reference_value", "abs_error", "V_f", "D_used", "D_method", "kh_product", "violation"})
      CHECK(j.contains(k));
    std::ostringstream csv;
    write_integration_csv_header(csv);
    CHECK(csv.str() == "N,qmc,reference,abs_error,V_f,D_used,D_method,kh_product,violation\n");
  }
}
