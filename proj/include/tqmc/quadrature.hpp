#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tqmc {

/// 20-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendre20 {
  static constexpr int kPoints = 20;
  std::array<double, kPoints> nodes{};
  std::array<double, kPoints> weights{};

  static const GaussLegendre20& get();
};

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <class T>
struct QuadResult {
  T value{};
  double est_abs_error = 0.0;
  int panels = 0;
};

/// Composite 20-point rule with `panels` equal panels on [a, b].
template <class F>
auto gauss_panels(F&& f, double a, double b, int panels) {
  const auto& gl = GaussLegendre20::get();
  using T = decltype(f(a));
  T sum{};
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    T part{};
    for (int k = 0; k < GaussLegendre20::kPoints; ++k) part += gl.weights[k] * f(mid + 0.5 * h * gl.nodes[k]);
    sum += part * (0.5 * h);
  }
  return sum;
}

/// Doubles the panel count from `initial` until two passes agree to `tol`.
template <class F>
auto gauss_adaptive(F&& f, double a, double b, int initial, double tol, int max_panels = 1 << 16) {
  using T = decltype(f(a));
  int panels = initial < 1 ? 1 : initial;
  T coarse = gauss_panels(f, a, b, panels);
  while (true) {
    int fine_panels = 2 * panels;
    T fine = gauss_panels(f, a, b, fine_panels);
    double diff = std::abs(fine - coarse);
    if (diff <= tol) return QuadResult<T>{fine, diff, fine_panels};
    if (fine_panels >= max_panels)
      throw QuadratureError("quadrature did not converge on [" + std::to_string(a) + ", " + std::to_string(b) +
                            "] with " + std::to_string(fine_panels) + " panels; last difference " +
                            std::to_string(diff));
    panels = fine_panels;
    coarse = fine;
  }
}

}  // namespace tqmc
