#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tqmc/fixedpoint.hpp"

namespace tqmc {

/// (a + b*xi + c*xi^2) / d for the generator root xi.
struct FieldElement {
  std::int64_t a = 0, b = 0, c = 0, d = 1;
};

/// Rotation vector (alpha, beta) of a Kronecker sequence, both taken from
/// the cubic field generated by one root of `generator`.
struct KroneckerSpec {
  CubicGenerator generator = CubicGenerator::plastic();
  FieldElement alpha{0, 1, 0, 1};
  FieldElement beta{0, 0, 1, 1};

  /// alpha = xi, beta = xi^2 for the given generator.
  static KroneckerSpec cubic(const CubicGenerator& gen);
  static KroneckerSpec plastic(int precision = FixedReal::kDefaultPrecision);
  static KroneckerSpec cube_root_two(int precision = FixedReal::kDefaultPrecision);
  /// Root of x^3 - 2x^2 + 1 = (x - 1)(x^2 - x - 1) in [3/2, 2]: the golden
  /// ratio phi, with beta = phi^2 = phi + 1. Rationally dependent.
  static KroneckerSpec golden(int precision = FixedReal::kDefaultPrecision);

  /// A primitive integer vector (r0, r1, r2) != 0 with r0 + r1*alpha + r2*beta = 0,
  /// or nothing when 1, alpha, beta are linearly independent over Q.
  std::optional<std::array<std::int64_t, 3>> integer_relation() const;
  bool independent() const { return !integer_relation().has_value(); }
};

/// alpha and beta evaluated to the generator precision.
struct SpecValues {
  FixedReal xi, alpha, beta;
};
SpecValues evaluate(const KroneckerSpec& spec);

struct TorusPoint {
  FixedReal x1, x2;
};

enum class Family { cubic_kronecker, degenerate_golden, seeded_random };
std::string to_string(Family f);
Family parse_family(const std::string& name);

struct PointSet {
  Family family = Family::cubic_kronecker;
  std::vector<TorusPoint> points;
  /// Column j holds point j+1 rounded toward zero to double.
  Eigen::Matrix2Xd coords;
  std::uint64_t seed = 0;
  std::optional<KroneckerSpec> spec;

  std::size_t size() const { return points.size(); }
};

/// ({j alpha}, {j beta}) for j = 1..N.
PointSet kronecker_block(const KroneckerSpec& spec, std::size_t n);
/// ({j phi}, {j phi^2}) for j = 1..N; both coordinates are bit-identical.
PointSet degenerate_golden(std::size_t n, int precision = FixedReal::kDefaultPrecision);
/// N points from SplitMix64 (see SplitMix64); x1 is drawn before x2.
PointSet seeded_random(std::uint64_t seed, std::size_t n);

/// SplitMix64:
///   state += 0x9E3779B97F4A7C15
///   z = state
///   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   return z ^ (z >> 31)
/// A coordinate is (next() >> 11) * 2^-53.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  double next_unit();

 private:
  std::uint64_t state_;
};

/// `j,x1,x2` with 30 significant digits per coordinate.
void write_csv(std::ostream& out, const PointSet& points);

}  // namespace tqmc
