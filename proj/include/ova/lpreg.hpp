#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "ova/kernels.hpp"
#include "ova/multipoly.hpp"

namespace ova {

// Normal equations of a kernel-weighted least-squares fit around a query
// point x with bandwidth h, in the rescaled coordinates u = (x_i - x)/h:
//   bhat[s1][s2] = (1/(n h^d)) sum_i u_i^{s1+s2} K(u_i)
//   avec[s]      = (1/(n h^d)) sum_i y_i u_i^s K(u_i)
// Kernel weights below 1e-300 are treated as zero and excluded from
// effective_weight_count.
struct LocalSystem {
  Eigen::MatrixXd bhat;
  Eigen::VectorXd avec;
  double min_eigenvalue = 0.0;
  int effective_weight_count = 0;
};

// Same design matrix shared across several response vectors; used by the
// one-vs-all fit, where only the responses differ between classes.
struct MultiLocalSystem {
  Eigen::MatrixXd bhat;
  std::vector<Eigen::VectorXd> avecs;
  double min_eigenvalue = 0.0;
  int effective_weight_count = 0;
};

struct LPEstimate {
  double raw = 0.0;
  double clipped = 0.0;
  bool degenerate = false;
  bool solve_failed = false;
};

// 0 below the unit interval, 1 above, identity inside.
double clip_unit(double value);

// xs is row-major n*d; n is taken from ys, d from x. All dimensions must
// agree with the basis and the kernel.
LocalSystem build_local_system(std::span<const double> xs,
                               std::span<const double> ys,
                               std::span<const double> x, double h,
                               const PolyBasis& basis,
                               const KernelSpec& kernel);

// views: one response vector per class, all of length n. Accumulation order
// matches build_local_system exactly, so per-class results are identical.
MultiLocalSystem build_local_system_views(
    std::span<const double> xs, std::span<const std::vector<double>> views,
    std::span<const double> x, double h, const PolyBasis& basis,
    const KernelSpec& kernel);

// Degenerate (raw = clipped = 0) when min_eigenvalue <= guard_threshold.
// Otherwise solves bhat theta = avec by pivoted LDLT; raw is the intercept.
// A non-finite solve despite a healthy eigenvalue is reported via
// solve_failed and treated as degenerate.
LPEstimate lp_estimate(const LocalSystem& system, double guard_threshold = 1e-8);

std::vector<LPEstimate> lp_estimate_views(const MultiLocalSystem& system,
                                          double guard_threshold = 1e-8);

}  // namespace ova
