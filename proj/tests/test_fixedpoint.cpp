#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "tqmc/fixedpoint.hpp"

using namespace tqmc;

namespace {

mpz_class top64(const FixedReal& v) { return v.mantissa() >> (v.precision() - 64); }

}  // namespace

TEST_SUITE("fixedpoint") {
  TEST_CASE("cubic roots agree with integer bisection to 64 bits") {
    struct Case {
      CubicGenerator gen;
      long c0, c1, c2, lo, hi;
    };
    for (const auto& c : {Case{CubicGenerator::cube_root_two(), -2, 0, 0, 1, 2},
                          Case{CubicGenerator::plastic(), -1, -1, 0, 1, 2}}) {
      FixedReal r = fx_cubic_root(c.gen);
      mpz_class expect = oracle::cubic_root_bits64(c.c0, c.c1, c.c2, c.lo, c.hi);
      mpz_class diff = top64(r) - expect;
      CHECK(abs(diff) <= 1);
    }
    CHECK(fx_cubic_root(CubicGenerator::cube_root_two()).to_decimal(16).rfind("1.259921049894873", 0) == 0);
    CHECK(fx_cubic_root(CubicGenerator::plastic()).to_decimal(16).rfind("1.324717957244746", 0) == 0);
  }

  TEST_CASE("integer root is exact") {
    CubicGenerator g;
    g.coeffs = {-8, 0, 0};
    g.lo = {1, 1};
    g.hi = {3, 1};
    FixedReal r = fx_cubic_root(g);
    CHECK(r.int_part() == 2);
    CHECK(r.frac_bits() == 0);
    CHECK(g.integer_root() == 2);
    CHECK_FALSE(g.irreducible());
    CHECK(CubicGenerator::plastic().irreducible());
  }

  TEST_CASE("bracket without sign change is rejected") {
    CubicGenerator g = CubicGenerator::plastic();
    g.lo = {3, 2};
    g.hi = {2, 1};
    CHECK_THROWS_AS(fx_cubic_root(g), InvalidBracket);
    g.lo = {2, 1};
    g.hi = {1, 1};
    CHECK_THROWS_AS(g.validate(), InvalidBracket);
  }

  TEST_CASE("root residual is within the precision") {
    for (int p : {64, 128, 192, 256}) {
      CubicGenerator g = CubicGenerator::plastic(p);
      FixedReal r = fx_cubic_root(g);
      // r^3 - r - 1 at r and at r + 2^-p straddle zero.
      mpz_class m = r.mantissa(), one = mpz_class(1) << p;
      auto value = [&](const mpz_class& x) -> mpz_class { return x * x * x - x * one * one - one * one * one; };
      CHECK(sgn(value(m)) <= 0);
      CHECK(sgn(value(m + 1)) > 0);
    }
  }

  TEST_CASE("P=384 truncated to 192 bits matches P=192") {
    FixedReal a = fx_cubic_root(CubicGenerator::plastic(192));
    FixedReal b = fx_cubic_root(CubicGenerator::plastic(384)).with_precision(192);
    mpz_class d = a.mantissa() - b.mantissa();
    CHECK(abs(d) <= 4);  // within 2^-190
  }

  TEST_CASE("frac_mul examples") {
    FixedReal u = fx_cubic_root(CubicGenerator::cube_root_two()).frac();
    CHECK(fx_frac_mul(u, 0).mantissa() == 0);
    FixedReal half = FixedReal::from_ratio(1, 2);
    CHECK(fx_frac_mul(half, 3) == half);
    CHECK(fx_frac_mul(u, 2).to_double() == doctest::Approx(std::fmod(2 * std::cbrt(2.0), 1.0)).epsilon(1e-12));
    CHECK(fx_frac_mul(u, 2).to_decimal(20).rfind("0.5198420997897463295", 0) == 0);
  }

  TEST_CASE("frac_mul is additive mod 1 within the tracked error") {
    FixedReal u = fx_cubic_root(CubicGenerator::plastic()).frac();
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<long> pick(0, 100000);
    const mpz_class one = mpz_class(1) << u.precision();
    for (int t = 0; t < 500; ++t) {
      long a = pick(rng), b = pick(rng);
      FixedReal lhs = fx_frac_mul(u, a + b);
      FixedReal rhs = (fx_frac_mul(u, a) + fx_frac_mul(u, b)).frac();
      mpz_class d = abs(lhs.mantissa() - rhs.mantissa());
      if (d > one / 2) d = one - d;
      double allowed = lhs.error_ulps() + fx_frac_mul(u, a).error_ulps() + fx_frac_mul(u, b).error_ulps() + 2;
      CHECK(d.get_d() <= allowed);
    }
  }

  TEST_CASE("nearest integer distance") {
    FixedReal u = fx_cubic_root(CubicGenerator::cube_root_two()).frac();
    CHECK(fx_nearest_int_dist(u) == u);
    CHECK(fx_nearest_int_dist(FixedReal::from_ratio(3, 4)) == FixedReal::from_ratio(1, 4));
    CHECK(fx_nearest_int_dist(FixedReal::from_int(3)).mantissa() == 0);
    std::mt19937_64 rng(11);
    for (int t = 0; t < 200; ++t) {
      mpz_class m = 0;
      for (int w = 0; w < 3; ++w) m = (m << 64) + mpz_class(std::to_string(rng()));
      m %= mpz_class(1) << 192;
      FixedReal x(m, 192);
      FixedReal y = FixedReal::from_int(1) - x;
      CHECK(fx_nearest_int_dist(x) == fx_nearest_int_dist(y));
      CHECK(fx_nearest_int_dist(x) <= FixedReal::from_ratio(1, 2));
    }
  }

  TEST_CASE("generator text round trip") {
    CubicGenerator g = CubicGenerator::plastic();
    g.lo = {5, 4};
    g.hi = {3, 2};
    CubicGenerator h = CubicGenerator::from_text(g.to_text());
    CHECK(h.coeffs == g.coeffs);
    CHECK(h.lo.num == 5);
    CHECK(h.lo.den == 4);
    CHECK(h.hi.num == 3);
    CHECK(h.precision == g.precision);
    CHECK(parse_rational("-6/4").num == -3);
    CHECK(parse_rational("-6/4").den == 2);
    CHECK_THROWS(parse_rational("1/0"));
  }
}
