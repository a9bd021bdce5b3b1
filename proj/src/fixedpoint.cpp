#include "tqmc/fixedpoint.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <sstream>

#include "tqmc/config.hpp"

namespace tqmc {

namespace {

mpz_class pow2(unsigned bits) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), 2, bits);
  return r;
}

mpz_class floor_shift_right(const mpz_class& v, unsigned bits) {
  mpz_class r;
  mpz_fdiv_q_2exp(r.get_mpz_t(), v.get_mpz_t(), bits);
  return r;
}

mpz_class mod_pow2(const mpz_class& v, unsigned bits) {
  mpz_class r;
  mpz_fdiv_r_2exp(r.get_mpz_t(), v.get_mpz_t(), bits);
  return r;
}

mpz_class to_mpz(std::int64_t v) {
  mpz_class r;
  mpz_set_si(r.get_mpz_t(), static_cast<long>(v));
  return r;
}

// Brings two operands to a common precision.
std::pair<FixedReal, FixedReal> align(const FixedReal& a, const FixedReal& b) {
  int p = std::max(a.precision(), b.precision());
  return {a.with_precision(p), b.with_precision(p)};
}

}  // namespace

FixedReal::FixedReal(mpz_class mantissa, int precision, double error_ulps)
    : mantissa_(std::move(mantissa)), precision_(precision), error_ulps_(error_ulps) {
  if (precision < 1) throw std::invalid_argument("FixedReal precision must be positive");
}

FixedReal FixedReal::from_int(long value, int precision) {
  mpz_class m(value);
  m <<= precision;
  return FixedReal(std::move(m), precision);
}

FixedReal FixedReal::from_double(double value, int precision) {
  if (!std::isfinite(value)) throw std::invalid_argument("FixedReal::from_double: non-finite value");
  int exp = 0;
  double frac = std::frexp(value, &exp);  // value = frac * 2^exp, |frac| in [0.5, 1)
  auto significand = static_cast<long long>(std::ldexp(frac, 53));
  mpz_class m;
  mpz_set_si(m.get_mpz_t(), static_cast<long>(significand));
  int shift = exp - 53 + precision;
  if (shift >= 0)
    m <<= shift;
  else
    m = floor_shift_right(m, static_cast<unsigned>(-shift));
  return FixedReal(std::move(m), precision, shift >= 0 ? 0.0 : 1.0);
}

FixedReal FixedReal::from_ratio(const mpz_class& num, const mpz_class& den, int precision) {
  if (den == 0) throw std::invalid_argument("FixedReal::from_ratio: zero denominator");
  mpz_class n = num << precision;
  mpz_class d = den;
  if (d < 0) {
    n = -n;
    d = -d;
  }
  mpz_class q, r;
  mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
  return FixedReal(std::move(q), precision, r == 0 ? 0.0 : 1.0);
}

double FixedReal::error_bound() const { return std::ldexp(error_ulps_, -precision_); }

mpz_class FixedReal::int_part() const {
  mpz_class a = abs(mantissa_);
  return floor_shift_right(a, static_cast<unsigned>(precision_));
}

mpz_class FixedReal::frac_bits() const {
  mpz_class a = abs(mantissa_);
  return mod_pow2(a, static_cast<unsigned>(precision_));
}

FixedReal FixedReal::frac() const {
  return FixedReal(mod_pow2(mantissa_, static_cast<unsigned>(precision_)), precision_, error_ulps_);
}

double FixedReal::to_double() const {
  // Keep 64 significant bits before converting so large precisions do not
  // lose the value to intermediate overflow.
  long exp = 0;
  double d = mpz_get_d_2exp(&exp, mantissa_.get_mpz_t());
  return std::ldexp(d, static_cast<int>(exp) - precision_);
}

std::string FixedReal::to_decimal(int significant) const {
  if (significant < 1) throw std::invalid_argument("to_decimal: need at least one digit");
  if (mantissa_ == 0) return "0";
  mpz_class a = abs(mantissa_);
  double approx = std::fabs(to_double());
  int magnitude = approx > 0 ? static_cast<int>(std::floor(std::log10(approx))) : -precision_;
  int places = std::max(0, significant - 1 - magnitude);
  mpz_class half = pow2(static_cast<unsigned>(precision_ - 1));
  mpz_class digits;
  // The estimate of the magnitude can be off by one near powers of ten.
  for (int attempt = 0; attempt < 3; ++attempt) {
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(places));
    digits = floor_shift_right(a * scale + half, static_cast<unsigned>(precision_));
    std::size_t len = digits.get_str().size();
    if (static_cast<int>(len) < significant && places < precision_ + 20 && digits != 0) {
      places += significant - static_cast<int>(len);
      continue;
    }
    if (static_cast<int>(len) > significant && places > 0) {
      --places;
      continue;
    }
    break;
  }
  std::string s = digits.get_str();
  if (static_cast<int>(s.size()) <= places) s.insert(0, static_cast<std::size_t>(places) - s.size() + 1, '0');
  if (places > 0) s.insert(s.size() - static_cast<std::size_t>(places), ".");
  if (mantissa_ < 0) s.insert(0, "-");
  return s;
}

FixedReal FixedReal::with_precision(int precision) const {
  if (precision == precision_) return *this;
  if (precision > precision_) {
    int shift = precision - precision_;
    return FixedReal(mantissa_ << shift, precision, std::ldexp(error_ulps_, shift));
  }
  int shift = precision_ - precision;
  return FixedReal(floor_shift_right(mantissa_, static_cast<unsigned>(shift)), precision,
                   std::ldexp(error_ulps_, -shift) + 1.0);
}

unsigned __int128 FixedReal::frac_top128() const {
  mpz_class f = mod_pow2(mantissa_, static_cast<unsigned>(precision_));
  if (precision_ >= 128)
    f = floor_shift_right(f, static_cast<unsigned>(precision_ - 128));
  else
    f <<= (128 - precision_);
  unsigned __int128 lo = mpz_getlimbn(f.get_mpz_t(), 0);
  unsigned __int128 hi = mpz_size(f.get_mpz_t()) > 1 ? mpz_getlimbn(f.get_mpz_t(), 1) : 0;
  static_assert(sizeof(mp_limb_t) == 8, "64-bit GMP limbs expected");
  return (hi << 64) | lo;
}

FixedReal FixedReal::operator-() const { return FixedReal(-mantissa_, precision_, error_ulps_); }

FixedReal operator+(const FixedReal& a, const FixedReal& b) {
  auto [x, y] = align(a, b);
  return FixedReal(x.mantissa_ + y.mantissa_, x.precision_, x.error_ulps_ + y.error_ulps_);
}

FixedReal operator-(const FixedReal& a, const FixedReal& b) { return a + (-b); }

FixedReal operator*(const FixedReal& a, const FixedReal& b) {
  auto [x, y] = align(a, b);
  mpz_class prod = x.mantissa_ * y.mantissa_;
  auto p = static_cast<unsigned>(x.precision_);
  double err = std::fabs(x.to_double()) * y.error_ulps_ + std::fabs(y.to_double()) * x.error_ulps_ +
               std::ldexp(x.error_ulps_ * y.error_ulps_, -x.precision_) + 1.0;
  return FixedReal(floor_shift_right(prod, p), x.precision_, err);
}

FixedReal operator*(const FixedReal& a, long j) {
  return FixedReal(a.mantissa_ * j, a.precision_, a.error_ulps_ * std::fabs(static_cast<double>(j)));
}

FixedReal FixedReal::div_int(long d) const {
  if (d <= 0) throw std::invalid_argument("FixedReal::div_int: divisor must be positive");
  mpz_class q;
  mpz_fdiv_q_ui(q.get_mpz_t(), mantissa_.get_mpz_t(), static_cast<unsigned long>(d));
  return FixedReal(std::move(q), precision_, error_ulps_ / static_cast<double>(d) + 1.0);
}

bool operator==(const FixedReal& a, const FixedReal& b) {
  auto [x, y] = align(a, b);
  return x.mantissa_ == y.mantissa_;
}

bool operator<(const FixedReal& a, const FixedReal& b) {
  auto [x, y] = align(a, b);
  return x.mantissa_ < y.mantissa_;
}

FixedReal fx_frac_mul(const FixedReal& u, long j) {
  mpz_class prod = u.mantissa() * j;
  return FixedReal(mod_pow2(prod, static_cast<unsigned>(u.precision())), u.precision(),
                   u.error_ulps() * std::fabs(static_cast<double>(j)));
}

FixedReal fx_nearest_int_dist(const FixedReal& u) {
  auto p = static_cast<unsigned>(u.precision());
  mpz_class f = mod_pow2(u.mantissa(), p);
  mpz_class one = pow2(p);
  mpz_class g = one - f;
  return FixedReal(f <= g ? f : g, u.precision(), u.error_ulps());
}

// ---------------------------------------------------------------------------

Rational parse_rational(const std::string& text) {
  std::string s;
  for (char c : text)
    if (c != ' ' && c != '\t') s += c;
  if (s.empty()) throw std::invalid_argument("empty rational");
  auto parse_int = [&](const std::string& t) -> std::int64_t {
    std::size_t used = 0;
    long long v = std::stoll(t, &used);
    if (used != t.size()) throw std::invalid_argument("bad rational '" + text + "'");
    return v;
  };
  Rational r;
  if (auto slash = s.find('/'); slash != std::string::npos) {
    r.num = parse_int(s.substr(0, slash));
    r.den = parse_int(s.substr(slash + 1));
  } else if (auto dot = s.find('.'); dot != std::string::npos) {
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    std::size_t places = s.size() - dot - 1;
    if (places > 18) throw std::invalid_argument("rational '" + text + "' has too many decimals");
    r.num = parse_int(digits);
    r.den = 1;
    for (std::size_t i = 0; i < places; ++i) r.den *= 10;
  } else {
    r.num = parse_int(s);
  }
  if (r.den == 0) throw std::invalid_argument("rational '" + text + "' has zero denominator");
  if (r.den < 0) {
    r.num = -r.num;
    r.den = -r.den;
  }
  std::int64_t g = std::gcd(r.num < 0 ? -r.num : r.num, r.den);
  if (g > 1) {
    r.num /= g;
    r.den /= g;
  }
  return r;
}

std::string to_string(const Rational& r) {
  return r.den == 1 ? std::to_string(r.num) : std::to_string(r.num) + "/" + std::to_string(r.den);
}

namespace {

// p(num/den) * den^3 exactly.
mpz_class eval_at_ratio(const CubicGenerator& g, const mpz_class& num, const mpz_class& den) {
  mpz_class c0 = to_mpz(g.coeffs[0]), c1 = to_mpz(g.coeffs[1]), c2 = to_mpz(g.coeffs[2]);
  return num * num * num + c2 * num * num * den + c1 * num * den * den + c0 * den * den * den;
}

// p(X / 2^w) * 2^{3w} exactly.
mpz_class eval_scaled(const CubicGenerator& g, const mpz_class& x, unsigned w) {
  return eval_at_ratio(g, x, pow2(w));
}

// p'(X / 2^w) * 2^{2w} exactly.
mpz_class deriv_scaled(const CubicGenerator& g, const mpz_class& x, unsigned w) {
  mpz_class s = pow2(w);
  mpz_class c1 = to_mpz(g.coeffs[1]), c2 = to_mpz(g.coeffs[2]);
  return 3 * x * x + 2 * c2 * x * s + c1 * s * s;
}

int sign_at(const CubicGenerator& g, const Rational& r) {
  return sgn(eval_at_ratio(g, to_mpz(r.num), to_mpz(r.den)));
}

bool less(const Rational& a, const Rational& b) {
  return static_cast<__int128>(a.num) * b.den < static_cast<__int128>(b.num) * a.den;
}

mpz_class floor_ratio_scaled(const Rational& r, unsigned w) {
  mpz_class q;
  mpz_class n = to_mpz(r.num) << w;
  mpz_fdiv_q(q.get_mpz_t(), n.get_mpz_t(), to_mpz(r.den).get_mpz_t());
  return q;
}

mpz_class ceil_ratio_scaled(const Rational& r, unsigned w) {
  mpz_class q;
  mpz_class n = to_mpz(r.num) << w;
  mpz_cdiv_q(q.get_mpz_t(), n.get_mpz_t(), to_mpz(r.den).get_mpz_t());
  return q;
}

}  // namespace

void CubicGenerator::validate() const {
  constexpr std::int64_t kLimit = std::int64_t{1} << 31;
  for (auto c : coeffs)
    if (c <= -kLimit || c >= kLimit) throw InvalidBracket("cubic coefficient out of range (|c| < 2^31)");
  if (lo.den <= 0 || hi.den <= 0) throw InvalidBracket("bracket denominators must be positive");
  if (!less(lo, hi)) throw InvalidBracket("bracket must satisfy lo < hi");
  if (precision < 64) throw InvalidBracket("precision must be at least 64 bits");
  int a = sign_at(*this, lo), b = sign_at(*this, hi);
  if (a * b > 0)
    throw InvalidBracket("no sign change of the cubic on [" + to_string(lo) + ", " + to_string(hi) + "]");
}

std::optional<std::int64_t> CubicGenerator::integer_root() const {
  auto value = [&](__int128 x) {
    return x * x * x + coeffs[2] * x * x + coeffs[1] * x + static_cast<__int128>(coeffs[0]);
  };
  if (coeffs[0] == 0) return 0;
  std::int64_t c0 = coeffs[0] < 0 ? -coeffs[0] : coeffs[0];
  std::optional<std::int64_t> found;
  auto test = [&](std::int64_t d) {
    for (std::int64_t cand : {d, -d})
      if (!found && value(cand) == 0) found = cand;
  };
  for (std::int64_t d = 1; d * d <= c0; ++d) {
    if (c0 % d != 0) continue;
    test(d);
    test(c0 / d);
  }
  return found;
}

CubicGenerator CubicGenerator::plastic(int precision) {
  return CubicGenerator{{-1, -1, 0}, {1, 1}, {2, 1}, precision};
}

CubicGenerator CubicGenerator::cube_root_two(int precision) {
  return CubicGenerator{{-2, 0, 0}, {1, 1}, {2, 1}, precision};
}

std::string CubicGenerator::to_text() const {
  std::ostringstream os;
  os << "poly = [" << coeffs[0] << ", " << coeffs[1] << ", " << coeffs[2] << "]\n";
  os << "bracket = [\"" << to_string(lo) << "\", \"" << to_string(hi) << "\"]\n";
  os << "precision = " << precision << "\n";
  return os.str();
}

CubicGenerator CubicGenerator::from_text(const std::string& text) { return from_table(config::parse(text)); }

CubicGenerator CubicGenerator::from_table(const config::Table& table) {
  CubicGenerator g;
  const auto& poly = config::require(table, "poly");
  auto c = config::as_ints(poly, "poly");
  if (c.size() != 3) throw config::ParseError(poly.line, "field 'poly': expected 3 coefficients [c0, c1, c2]");
  g.coeffs = {c[0], c[1], c[2]};
  const auto& br = config::require(table, "bracket");
  const auto& items = br.as_array("bracket");
  if (items.size() != 2) throw config::ParseError(br.line, "field 'bracket': expected [lo, hi]");
  try {
    g.lo = parse_rational(items[0].raw);
    g.hi = parse_rational(items[1].raw);
  } catch (const std::invalid_argument& e) {
    throw config::ParseError(br.line, std::string("field 'bracket': ") + e.what());
  }
  if (auto p = config::find(table, "precision")) g.precision = static_cast<int>(p->as_int("precision"));
  g.validate();
  return g;
}

FixedReal fx_cubic_root(const CubicGenerator& gen) {
  gen.validate();
  const int P = gen.precision;
  const int s_lo = sign_at(gen, gen.lo);
  const int s_hi = sign_at(gen, gen.hi);
  if (s_lo == 0)
    return FixedReal::from_ratio(to_mpz(gen.lo.num), to_mpz(gen.lo.den), P);
  if (s_hi == 0)
    return FixedReal::from_ratio(to_mpz(gen.hi.num), to_mpz(gen.hi.den), P);

  // Integer bisection on 64-bit scaled values. The widened endpoints must
  // keep the sign pattern of the rational bracket.
  constexpr unsigned kBisectBits = 64;
  mpz_class lo = floor_ratio_scaled(gen.lo, kBisectBits);
  mpz_class hi = ceil_ratio_scaled(gen.hi, kBisectBits);
  if (sgn(eval_scaled(gen, lo, kBisectBits)) != s_lo || sgn(eval_scaled(gen, hi, kBisectBits)) != s_hi)
    throw InvalidBracket("bracket endpoint lies within 2^-64 of another root");
  while (hi - lo > 1) {
    mpz_class mid = (lo + hi) >> 1;
    int s = sgn(eval_scaled(gen, mid, kBisectBits));
    if (s == 0) return FixedReal(mid << (P - static_cast<int>(kBisectBits)), P);
    if (s == s_lo)
      lo = mid;
    else
      hi = mid;
  }

  // Newton with doubling working precision up to P + 16 guard bits.
  const unsigned target = static_cast<unsigned>(P) + 16;
  unsigned w = kBisectBits;
  mpz_class x = lo;
  int extra = 2;
  while (w < target || extra-- > 0) {
    unsigned next = std::min(2 * w, target);
    x <<= (next - w);
    w = next;
    mpz_class num = eval_scaled(gen, x, w);
    mpz_class den = deriv_scaled(gen, x, w);
    if (den == 0) break;
    mpz_class step;
    mpz_fdiv_q(step.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    x -= step;
  }

  // Settle the floor at precision P by exact sign checks.
  auto p = static_cast<unsigned>(P);
  mpz_class cand = floor_shift_right(x, w - p);
  for (int iter = 0; iter < 64; ++iter) {
    int a = sgn(eval_scaled(gen, cand, p));
    if (a == 0) return FixedReal(cand, P);
    int b = sgn(eval_scaled(gen, cand + 1, p));
    if (a == s_lo && b != s_lo) return FixedReal(cand, P, 1.0);
    cand += (a == s_lo) ? 1 : -1;
  }

  // Newton did not land close enough; finish by bisection at full precision.
  mpz_class blo = lo << (p - kBisectBits), bhi = hi << (p - kBisectBits);
  while (bhi - blo > 1) {
    mpz_class mid = (blo + bhi) >> 1;
    int s = sgn(eval_scaled(gen, mid, p));
    if (s == 0) return FixedReal(mid, P);
    if (s == s_lo)
      blo = mid;
    else
      bhi = mid;
  }
  return FixedReal(blo, P, 1.0);
}

}  // namespace tqmc
