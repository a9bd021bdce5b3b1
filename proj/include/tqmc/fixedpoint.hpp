#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include <gmpxx.h>

#include "tqmc/config.hpp"

namespace tqmc {

/// Binary fixed-point real: value = mantissa / 2^precision.
///
/// The mantissa is an unbounded GMP integer, so the integer part is
/// unbounded and the fractional digits are always canonical. Every value
/// carries an upper bound on its absolute error, counted in units of the
/// last place (2^-precision).
class FixedReal {
 public:
  static constexpr int kDefaultPrecision = 192;

  FixedReal() : FixedReal(mpz_class(0), kDefaultPrecision) {}
  FixedReal(mpz_class mantissa, int precision, double error_ulps = 0.0);

  static FixedReal from_int(long value, int precision = kDefaultPrecision);
  /// Exact for every finite double (truncates below 2^-precision).
  static FixedReal from_double(double value, int precision = kDefaultPrecision);
  /// floor(num/den * 2^P) / 2^P.
  static FixedReal from_ratio(const mpz_class& num, const mpz_class& den,
                              int precision = kDefaultPrecision);

  int precision() const { return precision_; }
  const mpz_class& mantissa() const { return mantissa_; }
  double error_ulps() const { return error_ulps_; }
  /// Absolute error bound as a real number.
  double error_bound() const;

  int sign() const { return sgn(mantissa_); }
  /// floor(|value|).
  mpz_class int_part() const;
  /// The P fractional bits of |value| as an integer in [0, 2^P).
  mpz_class frac_bits() const;

  /// value mod 1, in [0, 1).
  FixedReal frac() const;
  double to_double() const;
  /// Rounded decimal rendering with `significant` significant digits,
  /// fixed notation (no exponent).
  std::string to_decimal(int significant) const;

  /// Floor-truncates (or zero-extends) to another precision.
  FixedReal with_precision(int precision) const;
  /// Top `bits` fractional bits of value mod 1, as an unsigned integer.
  unsigned __int128 frac_top128() const;

  FixedReal operator-() const;
  friend FixedReal operator+(const FixedReal& a, const FixedReal& b);
  friend FixedReal operator-(const FixedReal& a, const FixedReal& b);
  friend FixedReal operator*(const FixedReal& a, const FixedReal& b);
  friend FixedReal operator*(const FixedReal& a, long j);
  /// Floor division by a positive integer.
  FixedReal div_int(long d) const;

  friend bool operator==(const FixedReal& a, const FixedReal& b);
  friend bool operator<(const FixedReal& a, const FixedReal& b);
  friend bool operator<=(const FixedReal& a, const FixedReal& b) { return !(b < a); }

 private:
  mpz_class mantissa_;
  int precision_;
  double error_ulps_;
};

/// {j*u}: j*u reduced mod 1 into [0,1). Exact modular arithmetic on the
/// mantissa; the tracked error grows to |j| times the error of u.
FixedReal fx_frac_mul(const FixedReal& u, long j);

/// ||u||: distance from u to the nearest integer, in [0, 1/2].
FixedReal fx_nearest_int_dist(const FixedReal& u);

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;
};

Rational parse_rational(const std::string& text);
std::string to_string(const Rational& r);

class InvalidBracket : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Monic cubic x^3 + c2 x^2 + c1 x + c0 with a rational bracket isolating
/// one real root.
struct CubicGenerator {
  std::array<std::int64_t, 3> coeffs{};  // c0, c1, c2
  Rational lo{1, 1};
  Rational hi{2, 1};
  int precision = FixedReal::kDefaultPrecision;

  /// Throws InvalidBracket unless lo < hi and the polynomial changes sign
  /// (or vanishes) on [lo, hi]. Coefficients must fit in 31 bits.
  void validate() const;
  /// An integer root, if any. A monic integer cubic is reducible over Q
  /// exactly when it has one.
  std::optional<std::int64_t> integer_root() const;
  bool irreducible() const { return !integer_root().has_value(); }

  /// x^3 - x - 1 on [1, 2]: the plastic number.
  static CubicGenerator plastic(int precision = FixedReal::kDefaultPrecision);
  /// x^3 - 2 on [1, 2].
  static CubicGenerator cube_root_two(int precision = FixedReal::kDefaultPrecision);

  /// `poly = [c0, c1, c2]`, `bracket = [lo, hi]`, `precision = P`.
  std::string to_text() const;
  static CubicGenerator from_text(const std::string& text);
  static CubicGenerator from_table(const config::Table& table);
};

/// The bracketed root to `gen.precision` fractional bits, floor-rounded,
/// so |result - root| <= 2^-P. Integer-only bisection to 64 bits, then
/// Newton steps with doubling precision, then an exact sign check.
FixedReal fx_cubic_root(const CubicGenerator& gen);

}  // namespace tqmc
