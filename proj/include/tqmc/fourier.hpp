#pragma once

#include <complex>
#include <map>
#include <mutex>
#include <ostream>
#include <vector>

#include "tqmc/geometry.hpp"

namespace tqmc {

using Complex = std::complex<double>;

enum class FourierMethod { closed_form, boundary_quadrature, coarea_quadrature };
const char* to_string(FourierMethod m);

struct FourierSample {
  Complex value{};
  FourierMethod method = FourierMethod::closed_form;
  double est_abs_error = 0.0;
};

/// Smoothing profile psi(u) = scale * (1 + u)^-power and cutoff R for the
/// kernel H_R(x) = psi(R |signed distance(x)|).
struct EtKernelConfig {
  double R = 16.0;
  double psi_power = 12.0;
  double psi_scale = 1.0;

  double psi(double u) const;
  /// Throws unless psi is positive (or identically zero), nonincreasing,
  /// integrable and psi(0) <= e^{2 pi}.
  void validate() const;
  /// Smallest u with psi(R u) <= 1e-14.
  double u_cutoff() const;
  /// Upper bound for int_a^inf psi(R u) 4 (1 + 2u) du.
  double tail_bound(double a) const;
};

/// |x - y| sinc(pi (x - y).xi) exp(-2 pi i (x + y)/2 . xi): the transform of
/// arclength measure on the segment from x to y.
Complex segment_ft(const Vec2& x, const Vec2& y, const Vec2& xi);

/// Transform of arclength measure on one piece: closed form for segments,
/// panel Gauss quadrature (one 20-point panel per wavelength, doubled until
/// two passes agree to `tol`) for arcs.
FourierSample arc_ft(const BoundaryPiece& piece, const Vec2& xi, double tol = 1e-10);
/// Sum of arc_ft over a closed boundary.
FourierSample boundary_ft(const Boundary& boundary, const Vec2& xi, double tol = 1e-10);

/// Transform of the indicator of a disk.
Complex disk_chi_hat(const Vec2& center, double radius, const Vec2& n);
/// Indicator transform of the region enclosed by `boundary`, from the
/// divergence theorem:
///   chi_hat(n) = i / (2 pi |n|^2) * sum over pieces of int (n . nu) e^{-2 pi i n.x} ds.
/// A full disk uses the Bessel closed form. Throws for n = 0.
FourierSample chi_hat(const Boundary& boundary, const Vec2& n, double tol = 1e-10);

/// H_R transform of one region by the coarea formula:
///   H_R^(n) = int psi(R |u|) int_{level set u} e^{-2 pi i x.n} ds du.
/// Level boundaries are built once per node, so evaluating many
/// frequencies is cheap. The u range is cut at the profile cutoff and at
/// 1/(2 kappa_max); the dropped tail is added to the error estimate.
class LevelSetTransform {
 public:
  LevelSetTransform(const Region& k, const EtKernelConfig& cfg);
  FourierSample at(const Vec2& n) const;
  /// Tail bound for the dropped part of the u range.
  double truncation_error() const { return truncation_error_; }

 private:
  struct Node {
    double weight;
    double u;
    Boundary level;
  };
  EtKernelConfig cfg_;
  bool full_disk_ = false;
  Vec2 center_;
  double radius_ = 0.0;
  std::vector<Node> coarse_, fine_;
  double truncation_error_ = 0.0;
  mutable std::mutex mutex_;
  mutable std::map<long, std::pair<double, double>> disk_cache_;
};

FourierSample h_hat(const Region& k, const EtKernelConfig& cfg, const Vec2& n);

struct DecayRow {
  int n1, n2;
  double abs_chi_hat;
  double abs_h_hat;  // NaN when not computed
  double bound;
  double ratio;
};

struct DecayProfile {
  std::vector<DecayRow> rows;
  double max_ratio = 0.0;    // chi_hat ratios
  double max_ratio_h = 0.0;  // H_R ratios over the computed rows
  double R = 0.0;
  /// Max chi_hat ratio on each ring k - 1 < |n| <= k, k = 1..n_max.
  std::vector<double> ring_max;
};

/// Ratios |chi_hat_D(n)| / (|n|^-3/2 + 1/((1+|n1|)(1+|n2|))) for all
/// 0 < |n| <= n_max, D = window ∩ body. H_R ratios are computed for
/// |n| <= h_n_max with R = max(4 kappa_max^2, n_max + 1).
DecayProfile decay_profile(const ConvexBody& body, const Window& w, int n_max, int h_n_max = 0);
/// `n1,n2,abs_chi_hat,abs_h_hat,bound,ratio`.
void write_csv(std::ostream& out, const DecayProfile& profile);

double decay_bound(const Vec2& n);

}  // namespace tqmc
