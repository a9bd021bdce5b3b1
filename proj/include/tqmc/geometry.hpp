#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "tqmc/config.hpp"

namespace tqmc {

using Vec2 = Eigen::Vector2d;

/// Outward unit normal at angle theta.
inline Vec2 normal_at(double theta) { return {std::cos(theta), std::sin(theta)}; }

/// Planar convex body with C^2 boundary of positive curvature, described
/// by its support function h(theta) about a center point. The boundary
/// point with outward normal angle theta is
///   x(theta) = c + h(theta) nu + h'(theta) nu_perp,
/// and the radius of curvature there is h + h''.
///
/// `offset(u)` gives the parallel body with support function h - u: the
/// inner parallel body for u > 0, the outer one for u < 0.
class ConvexBody {
 public:
  enum class Kind { disk, ellipse, support_series };

  static ConvexBody disk(Vec2 center, double radius);
  /// Axis-aligned ellipse with semi-axis `a` along x and `b` along y.
  static ConvexBody ellipse(Vec2 center, double a, double b);
  /// h(theta) = sum_k cos_coeffs[k] cos(k theta) + sin_coeffs[k] sin(k theta).
  /// Throws unless h + h'' > 0 on a fine grid.
  static ConvexBody support_series(Vec2 center, std::vector<double> cos_coeffs,
                                   std::vector<double> sin_coeffs = {});
  /// `{ kind = "disk", center = [x, y], radius = r }`,
  /// `{ kind = "ellipse", center = [x, y], semi_axes = [a, b] }`,
  /// `{ kind = "support", center = [x, y], cos = [...], sin = [...] }`.
  static ConvexBody from_config(const config::Value& v);
  std::string describe() const;

  ConvexBody offset(double u) const;

  Kind kind() const { return data_->kind; }
  const Vec2& center() const { return data_->center; }
  double offset_amount() const { return offset_; }
  /// Disk radius after the offset.
  double radius() const { return data_->a - offset_; }
  double semi_a() const { return data_->a; }
  double semi_b() const { return data_->b; }
  const std::vector<double>& cos_coeffs() const { return data_->cos_c; }
  const std::vector<double>& sin_coeffs() const { return data_->sin_c; }

  double h(double theta) const;
  double h_prime(double theta) const;
  /// h + h'' of the offset body.
  double curvature_radius(double theta) const;
  Vec2 point(double theta) const;

  double kappa_min() const { return 1.0 / (props_.rho_max - offset_); }
  double kappa_max() const { return 1.0 / (props_.rho_min - offset_); }
  double perimeter() const;
  double area() const;
  double diameter() const;
  /// [xmin, ymin, xmax, ymax].
  Eigen::Vector4d bounding_box() const;
  /// Closed membership.
  bool contains(const Vec2& p) const;
  /// True when the offset body is nonempty (radius of curvature positive
  /// somewhere and width positive in every direction).
  bool nonempty() const;

 private:
  struct Data {
    Kind kind;
    Vec2 center;
    double a = 0.0, b = 0.0;  // disk radius in a; ellipse semi-axes
    std::vector<double> cos_c, sin_c;
  };
  struct Props {
    double rho_min = 0.0, rho_max = 0.0;
    double perimeter = 0.0, area = 0.0, width_max = 0.0, width_min = 0.0;
  };
  ConvexBody(std::shared_ptr<const Data> data);
  void compute_props();

  std::shared_ptr<const Data> data_;
  Props props_;
  double offset_ = 0.0;
};

/// Anchored window I(s, x): [0, s1] x [0, s2] + x, periodized over Z^2.
struct Window {
  Vec2 s{0.5, 0.5};
  Vec2 x{0.0, 0.0};

  static constexpr double kMinSide = 1e-9;
  /// Clamps s into [1e-9, 1 - 1e-9] and reduces x mod 1.
  static Window make(const Vec2& s, const Vec2& x);
  /// Closed periodic membership test for one coordinate pair.
  bool contains(const Vec2& t) const;
};

struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;

  bool contains(const Vec2& p, double tol = 0.0) const {
    return p.x() >= x0 - tol && p.x() <= x1 + tol && p.y() >= y0 - tol && p.y() <= y1 + tol;
  }
  Rect shrink(double u) const { return {x0 + u, y0 + u, x1 - u, y1 - u}; }
  bool valid() const { return x1 > x0 && y1 > y0; }
};

/// Boundary arc of a body, counterclockwise over normal angles [theta0, theta1].
struct BodyArc {
  ConvexBody body;
  double theta0, theta1;
};
/// Straight piece traversed from a to b with the region on the left.
struct Segment {
  Vec2 a, b;
  bool axis_parallel = true;
};
/// Circle arc of `radius` about `center`, counterclockwise over [phi0, phi1].
struct CornerArc {
  Vec2 center;
  double radius, phi0, phi1;
};
using BoundaryPiece = std::variant<BodyArc, Segment, CornerArc>;
using Boundary = std::vector<BoundaryPiece>;

Vec2 piece_start(const BoundaryPiece& p);
Vec2 piece_end(const BoundaryPiece& p);
double piece_length(const BoundaryPiece& p);

/// One nonempty K = (rect + m) ∩ body of a periodized window.
struct Region {
  ConvexBody body;
  Rect rect;  // already translated by m
  Eigen::Vector2i translate{0, 0};
  Boundary boundary;

  bool contains(const Vec2& p) const { return rect.contains(p) && body.contains(p); }
};

/// Boundary of body ∩ rect as a closed counterclockwise chain of body arcs
/// and axis-parallel segments. Empty when the intersection is empty.
Boundary decompose(const ConvexBody& body, const Rect& rect);
/// All integer translates m with (window rect + m) ∩ body nonempty.
std::vector<Region> decompose_intersection(const ConvexBody& body, const Window& w);

/// Area of body ∩ rect.
double clip_area(const ConvexBody& body, const Rect& rect);
/// |I(s, x) ∩ body|.
double clip_area(const ConvexBody& body, const Window& w);
/// Area enclosed by a closed boundary, by Green's theorem.
double enclosed_area(const Boundary& boundary);

/// Number of integer vectors m with p + m inside the body.
int translate_multiplicity(const ConvexBody& body, const Vec2& p);

/// Euclidean distance from p to the boundary pieces.
double boundary_distance(const Boundary& boundary, const Vec2& p);
/// +dist(p, boundary) inside the region, -dist outside.
double signed_distance(const Region& k, const Vec2& p);

/// Boundary of the level set {signed distance = u} of a region, valid for
/// |u| < 1/(2 kappa_max). Inner parallel pieces for u > 0 (empty if the
/// inner set is empty); outward offsets joined by corner arcs of radius
/// |u| for u < 0. Throws std::domain_error outside the valid range.
Boundary level_boundary(const Region& k, double u);

}  // namespace tqmc
