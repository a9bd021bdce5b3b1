#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "tqmc/diophantine.hpp"
#include "tqmc/fourier.hpp"
#include "tqmc/geometry.hpp"
#include "tqmc/sequences.hpp"

namespace tqmc {

/// Points of a set that land in the body for at least one integer
/// translate, with their translate counts. The count term of the local
/// discrepancy only involves these.
struct WeightedPoints {
  WeightedPoints(const PointSet& points, const ConvexBody& body);

  std::vector<Vec2> coords;
  std::vector<int> weight;
  long total = 0;  // N
  long weight_sum = 0;
};

enum class DiscMethod { grid_refine, critical_enum };
const char* to_string(DiscMethod m);

struct DiscrepancyEstimate {
  double value = 0.0;         // |local discrepancy| at arg_window
  double signed_value = 0.0;  // count/N - area at arg_window
  Window arg_window;
  DiscMethod method = DiscMethod::grid_refine;
  int grid_size = 0;
  int depth = 0;
  long evaluations = 0;
  /// Oracle only: Lipschitz slack (4 + perimeter) (nudge + 1/grid).
  double slack = 0.0;
};

/// (1/N) sum_j sum_m [t_j + m in I(s,x) ∩ body] - |I(s,x) ∩ body|.
double local_discrepancy(const PointSet& points, const ConvexBody& body, const Window& w);
double local_discrepancy(const WeightedPoints& points, const ConvexBody& body, const Window& w);
/// Weighted count of points in the periodized window.
long window_count(const WeightedPoints& points, const Window& w);

/// Lower bound for the sup over windows. Every power-of-two level
/// G, G/2, ..., 8 screens all G^4 grid windows with periodic prefix sums,
/// keeps the best `top` windows, refines each over its 81 neighbours with a
/// halving step for `depth` rounds, then snaps edges onto critical points.
/// Coarser levels are a subset of finer ones, so the result is monotone in G.
DiscrepancyEstimate sup_search(const PointSet& points, const ConvexBody& body, int G, int depth, int top = 32);

/// Exact count over critical windows for N <= 128: edges through point
/// coordinates (and +/- nudge) plus a `grid` x `grid` background lattice.
/// The result is a lower bound; adding `slack` gives an upper bound by the
/// area Lipschitz estimate.
DiscrepancyEstimate sup_oracle_smallN(const PointSet& points, const ConvexBody& body, int grid = 64,
                                      double nudge = 1e-12);

struct EtBound {
  double value = 0.0;
  double est_abs_error = 0.0;
  double h_zero = 0.0;  // sum over pieces of |H_R^(0)|
  long frequencies = 0;
  int pieces = 0;
};

/// Right-hand side of the Erdős–Turán type inequality for D = I(s,x) ∩ body,
/// summed over the pieces K_i:
///   |H_R^(0)| + sum_{0<|n|<R} (|chi_hat_K(n)| + |H_R^(n)|) |(1/N) sum_j e^{2 pi i n.t(j)}|.
/// A diagnostic, not a certified bound: the smoothing profile is a surrogate.
EtBound et_structural_bound(const KroneckerSpec& spec, const ConvexBody& body, const Window& w,
                            const EtKernelConfig& cfg, long N);
/// The same bound for several N at one R; the transforms are computed once.
std::vector<EtBound> et_structural_bound(const KroneckerSpec& spec, const ConvexBody& body, const Window& w,
                                         const EtKernelConfig& cfg, const std::vector<long>& Ns);

/// `N,value,arg_s1,arg_s2,arg_x1,arg_x2,method`.
void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, long N, const DiscrepancyEstimate& e);
void write_csv_row(std::ostream& out, long N, double value, const Window& w, const std::string& method);

}  // namespace tqmc
