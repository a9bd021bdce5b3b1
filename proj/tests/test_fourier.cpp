#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "tqmc/fourier.hpp"

using namespace tqmc;

namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI(0, 1);

// int_a^b e^{-2 pi i k x} dx.
Complex interval_ft(double a, double b, double k) {
  if (k == 0) return b - a;
  return (std::exp(-2 * kPi * kI * k * b) - std::exp(-2 * kPi * kI * k * a)) / (-2 * kPi * kI * k);
}

// Composite Simpson for complex integrands.
template <class F>
Complex simpson(F f, double a, double b, int n) {
  if (n % 2) ++n;
  double h = (b - a) / n;
  Complex s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

Region full_region(const ConvexBody& b) {
  auto ks = decompose_intersection(b, Window::make({1, 1}, {0, 0}));
  REQUIRE(ks.size() == 1);
  return ks[0];
}

}  // namespace

TEST_SUITE("fourier") {
  TEST_CASE("segment transform examples") {
    Complex a = segment_ft({0, 0}, {1, 0}, {0, 1});
    CHECK(std::abs(a - Complex(1, 0)) < 1e-15);
    CHECK(std::abs(segment_ft({0, 0}, {1, 0}, {1, 0})) < 1e-15);
    Complex c = segment_ft({0, 0}, {1, 0}, {0.5, 0});
    CHECK(std::abs(c - Complex(0, -2 / kPi)) < 1e-15);
  }

  TEST_CASE("segment transform against 1D quadrature") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int t = 0; t < 100; ++t) {
      Vec2 x(u(rng), u(rng)), y(u(rng), u(rng)), xi(30 * u(rng), 30 * u(rng));
      Complex got = segment_ft(x, y, xi);
      double len = (y - x).norm();
      Complex want = simpson(
          [&](double tau) {
            Vec2 p = x + tau * (y - x);
            return std::exp(-2 * kPi * kI * p.dot(xi)) * len;
          },
          0, 1, 40000);
      CHECK(std::abs(got - want) < 1e-10);
      CHECK(std::abs(segment_ft(x, y, -xi) - std::conj(got)) < 1e-14);
    }
  }

  TEST_CASE("circle transform matches the Bessel oracle") {
    const double r = 0.3;
    // The ellipse path goes through quadrature; the disk path is closed form.
    auto circle_q = ConvexBody::ellipse({0.4, 0.6}, r, r);
    auto circle_c = ConvexBody::disk({0.4, 0.6}, r);
    for (double rho : {0.0, 0.7, 3.0, 25.0, 140.0}) {
      Vec2 xi(rho, 0);
      double want = 2 * kPi * r * std::abs(oracle::bessel_j(0, 2 * kPi * r * rho));
      auto q = arc_ft(BodyArc{circle_q, 0, 2 * kPi}, xi);
      CHECK(std::abs(std::abs(q.value) - want) < 1e-9);
      CHECK(q.est_abs_error <= 1e-9);
      CHECK(std::abs(std::abs(arc_ft(BodyArc{circle_c, 0, 2 * kPi}, xi).value) - want) < 1e-12);
    }
  }

  TEST_CASE("zero frequency gives arclength and arcs split additively") {
    auto d = ConvexBody::disk({0.5, 0.5}, 0.25);
    auto q = arc_ft(BodyArc{d, 0, kPi / 2}, {0, 0});
    CHECK(q.value.real() == doctest::Approx(kPi * 0.25 / 2).epsilon(1e-12));
    auto e = ConvexBody::ellipse({0.5, 0.5}, 0.35, 0.2);
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(-200, 200);
    for (int t = 0; t < 10; ++t) {
      Vec2 xi(u(rng), u(rng));
      auto whole = arc_ft(BodyArc{e, 0.2, 2.9}, xi);
      auto a = arc_ft(BodyArc{e, 0.2, 1.3}, xi), b = arc_ft(BodyArc{e, 1.3, 2.9}, xi);
      CHECK(std::abs(whole.value - a.value - b.value) <=
            2 * (whole.est_abs_error + a.est_abs_error + b.est_abs_error) + 1e-12);
    }
  }

  TEST_CASE("disk indicator transform") {
    for (double r : {0.25, 0.35}) {
      auto d = ConvexBody::disk({0.5, 0.5}, r);
      auto disk_q = ConvexBody::ellipse({0.5, 0.5}, r, r);
      for (Vec2 n : {Vec2(1, 0), Vec2(3, 4), Vec2(-7, 2), Vec2(20, -33)}) {
        double want = r * std::abs(oracle::bessel_j(1, 2 * kPi * r * n.norm())) / n.norm();
        CHECK(std::abs(std::abs(chi_hat(full_region(d).boundary, n).value) - want) < 1e-12);
        auto q = chi_hat(full_region(disk_q).boundary, n);
        CHECK(std::abs(std::abs(q.value) - want) < 1e-9);
        CHECK(q.method == FourierMethod::boundary_quadrature);
        // Sign, not only modulus: centre phase e^{-2 pi i n.c} is +-1 here.
        double phase = std::cos(2 * kPi * n.dot(Vec2(0.5, 0.5)));
        CHECK(std::abs(q.value - Complex(phase * r * oracle::bessel_j(1, 2 * kPi * r * n.norm()) / n.norm())) < 1e-9);
      }
    }
    CHECK_THROWS_AS(chi_hat(full_region(ConvexBody::disk({0.5, 0.5}, 0.2)).boundary, {0, 0}), std::invalid_argument);
  }

  TEST_CASE("rectangle indicator transform is separable") {
    auto big = ConvexBody::disk({0.5, 0.5}, 0.6);
    auto ks = decompose_intersection(big, Window::make({0.3, 0.4}, {0.35, 0.3}));
    REQUIRE(ks.size() == 1);
    for (const auto& p : ks[0].boundary) CHECK(std::holds_alternative<Segment>(p));
    for (Vec2 n : {Vec2(1, 0), Vec2(0, 2), Vec2(3, -5), Vec2(-11, 7)}) {
      Complex want = interval_ft(0.35, 0.65, n.x()) * interval_ft(0.3, 0.7, n.y());
      CHECK(std::abs(chi_hat(ks[0].boundary, n).value - want) < 1e-13);
    }
  }

  TEST_CASE("conjugate symmetry, additivity and Parseval") {
    auto e = ConvexBody::ellipse({0.5, 0.5}, 0.4, 0.3);
    auto ks = decompose_intersection(e, Window::make({0.6, 0.55}, {0.1, 0.2}));
    REQUIRE(ks.size() == 1);
    for (Vec2 n : {Vec2(1, 2), Vec2(-5, 3), Vec2(9, 0)}) {
      auto a = chi_hat(ks[0].boundary, n), b = chi_hat(ks[0].boundary, -n);
      CHECK(std::abs(a.value - std::conj(b.value)) < 1e-9);
    }
    // Two disjoint pieces: the window's regions vs the disk halves.
    auto d = ConvexBody::disk({0.5, 0.5}, 0.3);
    auto left = decompose_intersection(d, Window::make({0.5, 1 - 1e-9}, {0, 0}));
    auto right = decompose_intersection(d, Window::make({0.5, 1 - 1e-9}, {0.5, 0}));
    REQUIRE(left.size() == 1);
    REQUIRE(right.size() == 1);
    for (Vec2 n : {Vec2(1, 0), Vec2(2, 3), Vec2(-4, 1)}) {
      Complex sum = chi_hat(left[0].boundary, n).value + chi_hat(right[0].boundary, n).value;
      CHECK(std::abs(sum - disk_chi_hat({0.5, 0.5}, 0.3, n)) < 1e-9);
    }
    double area = enclosed_area(ks[0].boundary), prev = area * area;
    for (int nmax : {4, 8, 16}) {
      double s = area * area;
      for (int a = -nmax; a <= nmax; ++a)
        for (int b = -nmax; b <= nmax; ++b)
          if ((a || b) && a * a + b * b <= nmax * nmax) s += std::norm(chi_hat(ks[0].boundary, Vec2(a, b)).value);
      CHECK(s >= prev - 1e-12);
      CHECK(s <= area);
      prev = s;
    }
  }

  TEST_CASE("kernel profile") {
    EtKernelConfig cfg;
    CHECK(cfg.psi(0) == 1.0);
    CHECK(cfg.psi(1) == doctest::Approx(std::pow(2.0, -12)));
    CHECK(cfg.psi(cfg.R * cfg.u_cutoff()) <= 1e-14 * 1.0001);
    cfg.psi_scale = 1e4;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.psi_scale = 1;
    cfg.psi_power = 2;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    // Tail bound dominates the integral it bounds.
    EtKernelConfig c2;
    c2.R = 32;
    for (double a : {0.0, 0.01, 0.1}) {
      double direct = simpson([&](double u) { return Complex(c2.psi(c2.R * u) * 4 * (1 + 2 * u)); }, a, a + 5, 200000)
                          .real();
      CHECK(c2.tail_bound(a) >= direct * (1 - 1e-9));
    }
  }

  TEST_CASE("H_R transform of a disk against a radial oracle") {
    const double r = 0.25;
    auto d = ConvexBody::disk({0.5, 0.5}, r);
    EtKernelConfig cfg;
    cfg.R = 256;
    Region k = full_region(d);
    LevelSetTransform h(k, cfg);
    // int psi(R |r - rho|) 2 pi rho J0(2 pi |n| rho) d rho, split at the kink rho = r.
    for (Vec2 n : {Vec2(0, 0), Vec2(8, 0), Vec2(3, 4)}) {
      auto f = [&](double rho) {
        return Complex(cfg.psi(cfg.R * std::abs(r - rho)) * 2 * kPi * rho * oracle::bessel_j(0, 2 * kPi * n.norm() * rho));
      };
      Complex radial = simpson(f, 0, r, 20000) + simpson(f, r, 3 * r, 40000);
      Complex want = radial * std::exp(-2 * kPi * kI * n.dot(Vec2(0.5, 0.5)));
      auto got = h.at(n);
      CHECK(std::abs(got.value - want) < 1e-6);
      CHECK(got.method == FourierMethod::coarea_quadrature);
    }
    EtKernelConfig zero;
    zero.psi_scale = 0;
    CHECK(std::abs(h_hat(k, zero, {3, 1}).value) == 0.0);
    CHECK(std::abs(h_hat(k, zero, {0, 0}).value) == 0.0);
  }

  TEST_CASE("H_R transform of a quarter disk scales like 1/R at zero") {
    auto d = ConvexBody::disk({0.5, 0.5}, 0.35);
    auto ks = decompose_intersection(d, Window::make({0.5, 0.5}, {0.5, 0.5}));
    REQUIRE(ks.size() == 1);
    std::vector<double> scaled;
    for (int e = 4; e <= 10; ++e) {
      EtKernelConfig cfg;
      cfg.R = std::ldexp(1.0, e);
      auto v = h_hat(ks[0], cfg, {0, 0});
      CHECK(v.est_abs_error < 1e-3 * std::abs(v.value));
      scaled.push_back(std::abs(v.value) * cfg.R);
    }
    double lo = *std::min_element(scaled.begin(), scaled.end()), hi = *std::max_element(scaled.begin(), scaled.end());
    CHECK(hi / lo <= 10);
    // The perimeter-weighted limit: R * H_R(0) -> perimeter * 2 int_0^inf psi = perimeter * 2/11 (inner and outer sides).
    double per = 0;
    for (const auto& p : ks[0].boundary) per += piece_length(p);
    CHECK(scaled.back() == doctest::Approx(per * 2.0 / 11.0).epsilon(0.05));
  }

  TEST_CASE("decay profile") {
    auto d = ConvexBody::disk({0.5, 0.5}, 0.35);
    auto full = decay_profile(d, Window::make({1, 1}, {0, 0}), 16);
    CHECK(full.max_ratio < 1.0);
    auto quarter = decay_profile(d, Window::make({0.5, 0.5}, {0.5, 0.5}), 8);
    CHECK(quarter.rows.size() <= 224);
    CHECK(quarter.rows.size() == 196);  // lattice points with 0 < |n| <= 8
    CHECK(quarter.ring_max.size() == 8);
    for (double m : quarter.ring_max) CHECK(std::isfinite(m));
    std::ostringstream os;
    write_csv(os, quarter);
    CHECK(os.str().rfind("n1,n2,abs_chi_hat,abs_h_hat,bound,ratio\n", 0) == 0);
  }
}
