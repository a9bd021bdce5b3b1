#include "tqmc/sequences.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tqmc {

namespace {

using Int = __int128;

Int iabs(Int v) { return v < 0 ? -v : v; }

Int gcd128(Int a, Int b) {
  a = iabs(a);
  b = iabs(b);
  while (b != 0) {
    Int t = a % b;
    a = b;
    b = t;
  }
  return a;
}

std::optional<std::array<std::int64_t, 3>> primitive(Int r0, Int r1, Int r2) {
  Int g = gcd128(gcd128(r0, r1), r2);
  if (g == 0) return std::nullopt;
  r0 /= g;
  r1 /= g;
  r2 /= g;
  // Normalize sign so the first nonzero entry is positive.
  Int lead = r0 != 0 ? r0 : (r1 != 0 ? r1 : r2);
  if (lead < 0) {
    r0 = -r0;
    r1 = -r1;
    r2 = -r2;
  }
  return std::array<std::int64_t, 3>{static_cast<std::int64_t>(r0), static_cast<std::int64_t>(r1),
                                     static_cast<std::int64_t>(r2)};
}

// Quadratic factor x^2 + e1 x + e0 of a reducible generator with integer root r.
struct Quadratic {
  std::int64_t e1, e0;
};

Quadratic deflate(const CubicGenerator& g, std::int64_t r) {
  // x^3 + c2 x^2 + c1 x + c0 = (x - r)(x^2 + e1 x + e0)
  std::int64_t e1 = g.coeffs[2] + r;
  std::int64_t e0 = g.coeffs[1] + r * e1;
  return {e1, e0};
}

bool root_is_integer(const CubicGenerator& g, std::int64_t r) {
  // The bracketed root equals r exactly when r lies in the bracket and the
  // quadratic factor has no root there.
  bool inside = static_cast<Int>(g.lo.num) <= static_cast<Int>(r) * g.lo.den &&
                static_cast<Int>(r) * g.hi.den <= static_cast<Int>(g.hi.num);
  if (!inside) return false;
  Quadratic q = deflate(g, r);
  auto sign_q = [&](const Rational& x) {
    Int n = x.num, d = x.den;
    Int v = n * n + static_cast<Int>(q.e1) * n * d + static_cast<Int>(q.e0) * d * d;
    return v > 0 ? 1 : (v < 0 ? -1 : 0);
  };
  return sign_q(g.lo) * sign_q(g.hi) > 0;
}

// Element reduced to 1, xi coordinates using xi^2 = -e1 xi - e0.
FieldElement reduce(const FieldElement& e, const Quadratic& q) {
  return {e.a - e.c * q.e0, e.b - e.c * q.e1, 0, e.d};
}

// Integer relation among 1, u, v where u, v have coordinates in a basis of
// rank `dim` (2 or 3) starting with 1.
std::optional<std::array<std::int64_t, 3>> relation_rank3(const FieldElement& u, const FieldElement& v) {
  Int det = static_cast<Int>(u.b) * v.c - static_cast<Int>(u.c) * v.b;
  if (det != 0) return std::nullopt;
  // Irrational parts are parallel; cancel them.
  if (v.b == 0 && v.c == 0) return primitive(-static_cast<Int>(v.a), 0, v.d);
  if (u.b == 0 && u.c == 0) return primitive(-static_cast<Int>(u.a), u.d, 0);
  Int xv = v.b != 0 ? v.b : v.c;
  Int xu = v.b != 0 ? u.b : u.c;
  Int r1 = xv * u.d;
  Int r2 = -xu * v.d;
  Int r0 = -(xv * u.a - xu * v.a);
  return primitive(r0, r1, r2);
}

std::optional<std::array<std::int64_t, 3>> relation_rank2(const FieldElement& u, const FieldElement& v) {
  // Rows over the common denominator u.d * v.d: constant part and xi part.
  Int x0 = static_cast<Int>(u.d) * v.d, x1 = static_cast<Int>(u.a) * v.d, x2 = static_cast<Int>(v.a) * u.d;
  Int y0 = 0, y1 = static_cast<Int>(u.b) * v.d, y2 = static_cast<Int>(v.b) * u.d;
  return primitive(x1 * y2 - x2 * y1, x2 * y0 - x0 * y2, x0 * y1 - x1 * y0);
}

FixedReal eval_element(const FieldElement& e, const FixedReal& xi, const FixedReal& xi2, int precision) {
  if (e.d <= 0) throw std::invalid_argument("field element denominator must be positive");
  FixedReal v = FixedReal::from_int(e.a, xi.precision()) + xi * e.b + xi2 * e.c;
  return v.div_int(e.d).with_precision(precision);
}

}  // namespace

KroneckerSpec KroneckerSpec::cubic(const CubicGenerator& gen) {
  KroneckerSpec s;
  s.generator = gen;
  return s;
}

KroneckerSpec KroneckerSpec::plastic(int precision) { return cubic(CubicGenerator::plastic(precision)); }

KroneckerSpec KroneckerSpec::cube_root_two(int precision) {
  return cubic(CubicGenerator::cube_root_two(precision));
}

KroneckerSpec KroneckerSpec::golden(int precision) {
  return cubic(CubicGenerator{{1, 0, -2}, {3, 2}, {2, 1}, precision});
}

std::optional<std::array<std::int64_t, 3>> KroneckerSpec::integer_relation() const {
  auto root = generator.integer_root();
  if (!root) return relation_rank3(alpha, beta);
  if (root_is_integer(generator, *root)) {
    // xi is an integer, so alpha is rational.
    FieldElement a{alpha.a + alpha.b * *root + alpha.c * *root * *root, 0, 0, alpha.d};
    return primitive(-static_cast<Int>(a.a), a.d, 0);
  }
  Quadratic q = deflate(generator, *root);
  FieldElement u = reduce(alpha, q), v = reduce(beta, q);
  Int disc = static_cast<Int>(q.e1) * q.e1 - 4 * static_cast<Int>(q.e0);
  auto s = static_cast<Int>(std::sqrt(static_cast<long double>(disc)));
  while (s * s > disc) --s;
  while ((s + 1) * (s + 1) <= disc) ++s;
  if (s * s == disc) {
    // Both roots of the quadratic are rational, so xi and alpha are too.
    // xi = (s - e1) / 2 or (-s - e1) / 2, whichever lies in the bracket.
    Int num = s - q.e1;
    const Rational& lo = generator.lo;
    if (2 * static_cast<Int>(lo.num) > num * lo.den) num = -s - q.e1;
    // alpha = (a + b num/2 + c num^2/4) / d
    Int an = 4 * static_cast<Int>(alpha.a) + 2 * static_cast<Int>(alpha.b) * num + alpha.c * num * num;
    return primitive(-an, 4 * static_cast<Int>(alpha.d), 0);
  }
  return relation_rank2(u, v);
}

SpecValues evaluate(const KroneckerSpec& spec) {
  const int p = spec.generator.precision;
  CubicGenerator work = spec.generator;
  work.precision = p + 64;
  FixedReal xi = fx_cubic_root(work);
  FieldElement a = spec.alpha, b = spec.beta;
  if (auto root = spec.generator.integer_root(); root && !root_is_integer(spec.generator, *root)) {
    Quadratic q = deflate(spec.generator, *root);
    a = reduce(a, q);
    b = reduce(b, q);
  }
  FixedReal xi2 = xi * xi;
  return {xi.with_precision(p), eval_element(a, xi, xi2, p), eval_element(b, xi, xi2, p)};
}

std::string to_string(Family f) {
  switch (f) {
    case Family::cubic_kronecker: return "cubic_kronecker";
    case Family::degenerate_golden: return "degenerate_golden";
    case Family::seeded_random: return "seeded_random";
  }
  return "unknown";
}

Family parse_family(const std::string& name) {
  if (name == "cubic_kronecker" || name == "kronecker") return Family::cubic_kronecker;
  if (name == "degenerate_golden" || name == "golden") return Family::degenerate_golden;
  if (name == "seeded_random" || name == "random") return Family::seeded_random;
  throw std::invalid_argument("unknown point family '" + name + "'");
}

PointSet kronecker_block(const KroneckerSpec& spec, std::size_t n) {
  if (n < 1) throw std::invalid_argument("kronecker_block: N must be at least 1");
  SpecValues v = evaluate(spec);
  const int p = spec.generator.precision;
  const auto bits = static_cast<mp_bitcnt_t>(p);
  const FixedReal a = v.alpha.frac(), b = v.beta.frac();
  PointSet out;
  out.family = Family::cubic_kronecker;
  out.spec = spec;
  out.points.reserve(n);
  out.coords.resize(2, static_cast<Eigen::Index>(n));
  mpz_class x(0), y(0);
  for (std::size_t j = 1; j <= n; ++j) {
    x += a.mantissa();
    y += b.mantissa();
    mpz_fdiv_r_2exp(x.get_mpz_t(), x.get_mpz_t(), bits);
    mpz_fdiv_r_2exp(y.get_mpz_t(), y.get_mpz_t(), bits);
    double ej = static_cast<double>(j);
    TorusPoint t{FixedReal(x, p, a.error_ulps() * ej), FixedReal(y, p, b.error_ulps() * ej)};
    out.coords(0, static_cast<Eigen::Index>(j - 1)) = t.x1.to_double();
    out.coords(1, static_cast<Eigen::Index>(j - 1)) = t.x2.to_double();
    out.points.push_back(std::move(t));
  }
  return out;
}

PointSet degenerate_golden(std::size_t n, int precision) {
  PointSet out = kronecker_block(KroneckerSpec::golden(precision), n);
  out.family = Family::degenerate_golden;
  return out;
}

std::uint64_t SplitMix64::next() {
  state_ += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

PointSet seeded_random(std::uint64_t seed, std::size_t n) {
  if (n < 1) throw std::invalid_argument("seeded_random: N must be at least 1");
  SplitMix64 rng(seed);
  PointSet out;
  out.family = Family::seeded_random;
  out.seed = seed;
  out.points.reserve(n);
  out.coords.resize(2, static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    double u = rng.next_unit();
    double v = rng.next_unit();
    out.coords(0, static_cast<Eigen::Index>(j)) = u;
    out.coords(1, static_cast<Eigen::Index>(j)) = v;
    out.points.push_back({FixedReal::from_double(u), FixedReal::from_double(v)});
  }
  return out;
}

void write_csv(std::ostream& out, const PointSet& points) {
  out << "j,x1,x2\n";
  for (std::size_t j = 0; j < points.size(); ++j)
    out << (j + 1) << ',' << points.points[j].x1.to_decimal(30) << ',' << points.points[j].x2.to_decimal(30)
        << '\n';
}

}  // namespace tqmc
