#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "tqmc/discrepancy.hpp"

using namespace tqmc;

namespace {

constexpr double kPi = std::numbers::pi;

PointSet explicit_points(const std::vector<Vec2>& pts) {
  PointSet p;
  p.family = Family::seeded_random;
  p.coords.resize(2, static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    p.points.push_back({FixedReal::from_double(pts[i].x()), FixedReal::from_double(pts[i].y())});
    p.coords.col(static_cast<Eigen::Index>(i)) = pts[i];
  }
  return p;
}

// Count over translates m in [-2,2]^2 with closed periodic window edges.
double oracle_local(const PointSet& p, const std::function<bool(double, double)>& in_body,
                    const std::vector<oracle::P2>& poly, const Window& w) {
  auto in_window = [&](double t, double s, double x) {
    double d = t - x;
    d -= std::floor(d);
    return d <= s;
  };
  long count = 0;
  for (Eigen::Index j = 0; j < p.coords.cols(); ++j)
    for (int m1 = -2; m1 <= 2; ++m1)
      for (int m2 = -2; m2 <= 2; ++m2) {
        double a = p.coords(0, j) + m1, b = p.coords(1, j) + m2;
        if (in_body(a, b) && in_window(a, w.s.x(), w.x.x()) && in_window(b, w.s.y(), w.x.y())) ++count;
      }
  return static_cast<double>(count) / static_cast<double>(p.size()) -
         oracle::window_area(poly, w.s.x(), w.s.y(), w.x.x(), w.x.y());
}

const ConvexBody kDisk = ConvexBody::disk({0.5, 0.5}, 0.25);

}  // namespace

TEST_SUITE("discrepancy") {
  TEST_CASE("local discrepancy examples") {
    auto one = explicit_points({{0.5, 0.5}});
    CHECK(local_discrepancy(one, kDisk, Window::make({1, 1}, {0, 0})) == doctest::Approx(1 - kPi / 16).epsilon(1e-8));
    CHECK(local_discrepancy(one, kDisk, Window::make({1, 1}, {0, 0})) == doctest::Approx(0.80365).epsilon(1e-5));
    double right = local_discrepancy(one, kDisk, Window::make({0.5, 1 - 1e-12}, {0.5, 0}));
    CHECK(right == doctest::Approx(1 - kPi / 32).epsilon(1e-8));
    CHECK(right == doctest::Approx(0.90183).epsilon(1e-5));
    auto corner = ConvexBody::disk({0.2, 0.2}, 0.1);
    auto near = explicit_points({{0.2, 0.2}});
    CHECK(local_discrepancy(near, corner, Window::make({0.1, 0.1}, {0.7, 0.7})) == 0.0);
  }

  TEST_CASE("local discrepancy against a brute-force count") {
    auto e = ConvexBody::ellipse({0.45, 0.55}, 0.6, 0.35);
    auto in_e = [](double a, double b) {
      double u = (a - 0.45) / 0.6, v = (b - 0.55) / 0.35;
      return u * u + v * v <= 1;
    };
    auto poly = oracle::sample_curve([](double t) { return oracle::P2{0.45 + 0.6 * std::cos(t), 0.55 + 0.35 * std::sin(t)}; },
                                     1 << 16);
    auto pts = kronecker_block(KroneckerSpec::plastic(), 100);
    WeightedPoints wp(pts, e);
    CHECK(wp.total == 100);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0, 1);
    for (int t = 0; t < 200; ++t) {
      Window w = Window::make({u(rng), u(rng)}, {u(rng), u(rng)});
      double got = local_discrepancy(pts, e, w);
      CHECK(std::abs(got - oracle_local(pts, in_e, poly, w)) < 1e-6);
      CHECK(local_discrepancy(wp, e, w) == got);
    }
  }

  TEST_CASE("grid search finds the containment window for one point") {
    auto one = explicit_points({{0.5, 0.5}});
    auto r = sup_search(one, kDisk, 16, 3);
    CHECK(r.value >= 0.80);
    CHECK(r.value <= 1.0);
    CHECK(r.method == DiscMethod::grid_refine);
    CHECK(std::abs(local_discrepancy(one, kDisk, r.arg_window)) == r.value);
    CHECK(local_discrepancy(one, kDisk, r.arg_window) == r.signed_value);
    CHECK(r.evaluations > 0);
  }

  TEST_CASE("grid search on the control and random sets") {
    auto body = ConvexBody::disk({0.5, 0.5}, 0.35);
    auto golden = degenerate_golden(256);
    auto g = sup_search(golden, body, 16, 2);
    CHECK(g.value >= 0.05);
    CHECK(std::abs(local_discrepancy(golden, body, g.arg_window)) == g.value);
    auto random = seeded_random(1, 4096);
    auto r = sup_search(random, body, 16, 2);
    CHECK(r.value >= 0.005);
    CHECK(r.value <= 0.1);
    CHECK(std::abs(local_discrepancy(random, body, r.arg_window)) == r.value);
  }

  TEST_CASE("grid search is monotone in G and deterministic") {
    auto body = ConvexBody::disk({0.5, 0.5}, 0.35);
    auto pts = kronecker_block(KroneckerSpec::plastic(), 256);
    auto a = sup_search(pts, body, 16, 2), b = sup_search(pts, body, 32, 2);
    CHECK(b.value >= a.value);
    auto c = sup_search(pts, body, 16, 2);
    CHECK(c.value == a.value);
    CHECK(c.arg_window.s == a.arg_window.s);
    CHECK(c.arg_window.x == a.arg_window.x);
    CHECK(std::abs(local_discrepancy(pts, body, b.arg_window)) == b.value);
    CHECK_THROWS_AS(sup_search(pts, body, 4, 2), std::invalid_argument);
    CHECK_THROWS_AS(sup_search(pts, body, 24, 2), std::invalid_argument);
    CHECK_THROWS_AS(sup_search(pts, body, 16, -1), std::invalid_argument);
  }

  TEST_CASE("small-N oracle") {
    auto one = explicit_points({{0.5, 0.5}});
    auto o = sup_oracle_smallN(one, kDisk);
    CHECK(o.method == DiscMethod::critical_enum);
    // A thin window through the point has count 1 and area near 0, so the
    // sup is 1, above the containment value 1 - pi/16.
    CHECK(o.value >= 0.80365 - 0.02);
    CHECK(o.value >= 1 - 1e-8);
    CHECK(o.value <= 1.0);
    CHECK(o.slack > 0);
    CHECK(std::abs(local_discrepancy(one, kDisk, o.arg_window)) == o.value);

    auto two = explicit_points({{0.3, 0.3}, {0.7, 0.7}});
    auto o2 = sup_oracle_smallN(two, kDisk);
    CHECK(o2.value >= sup_search(two, kDisk, 16, 2).value);

    auto corner = ConvexBody::disk({0.15, 0.15}, 0.1);
    auto far = explicit_points({{0.7, 0.7}, {0.75, 0.72}, {0.8, 0.78}, {0.72, 0.8}});
    auto o3 = sup_oracle_smallN(far, corner);
    CHECK(o3.value <= kPi * 0.01 + 1e-12);
    CHECK(o3.value >= kPi * 0.01 - o3.slack);

    CHECK_THROWS_AS(sup_oracle_smallN(kronecker_block(KroneckerSpec::plastic(), 129), kDisk), std::invalid_argument);
  }

  TEST_CASE("grid search and oracle agree within the slack") {
    auto body = ConvexBody::disk({0.5, 0.5}, 0.35);
    for (std::size_t n : {16, 64}) {
      auto pts = kronecker_block(KroneckerSpec::plastic(), n);
      auto o = sup_oracle_smallN(pts, body);
      auto g = sup_search(pts, body, 32, 3);
      CHECK(g.value <= o.value + o.slack);
      CHECK(o.value >= g.value - 1e-12);
    }
  }

  TEST_CASE("Erdos-Turan structural bound") {
    auto spec = KroneckerSpec::plastic();
    auto body = ConvexBody::disk({0.5, 0.5}, 0.35);
    Window full = Window::make({1, 1}, {0, 0});
    EtKernelConfig one;
    one.R = 1;
    auto r1 = et_structural_bound(spec, body, full, one, 64);
    CHECK(r1.frequencies == 0);
    CHECK(r1.value == r1.h_zero);

    EtKernelConfig cfg;
    cfg.R = 16;
    Window w = Window::make({0.6, 0.7}, {0.3, 0.1});
    std::vector<long> Ns;
    for (int e = 6; e <= 12; ++e) Ns.push_back(1L << e);
    auto trend = et_structural_bound(spec, body, w, cfg, Ns);
    EtKernelConfig small;
    small.R = 3;
    auto pair = et_structural_bound(spec, body, w, small, std::vector<long>{64, 128});
    CHECK(pair[1].value == et_structural_bound(spec, body, w, small, 128).value);
    double prev = INFINITY, h0 = 0;
    for (const auto& r : trend) {
      CHECK(r.value <= prev * (1 + 1e-9));
      CHECK(r.value >= r.h_zero);
      prev = r.value;
      h0 = r.h_zero;
    }
    CHECK(prev - h0 < 1);

    auto pts = kronecker_block(spec, 4096);
    EtKernelConfig big;
    big.R = 256;
    auto et = et_structural_bound(spec, body, full, big, 4096);
    CHECK(et.value >= sup_search(pts, body, 16, 2).value);
  }

  TEST_CASE("CSV rows") {
    std::ostringstream os;
    write_csv_header(os);
    CHECK(os.str() == "N,value,arg_s1,arg_s2,arg_x1,arg_x2,method\n");
    DiscrepancyEstimate e;
    e.value = 0.25;
    e.arg_window = Window::make({0.5, 0.25}, {0.125, 0});
    write_csv_row(os, 8, e);
    CHECK(os.str().find("8,0.25,0.5,0.25,0.125,0,grid_refine") != std::string::npos);
  }
}
