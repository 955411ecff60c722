#pragma once

#include <functional>
#include <span>
#include <string>

namespace ova {

// Smoothing kernel on R^d. lower_bound_c is a constant c > 0 with
// K(u) >= c whenever ||u|| <= c.
struct KernelSpec {
  std::string name;
  int dimension = 0;
  double lower_bound_c = 0.0;
  std::function<double(std::span<const double>)> evaluate;
};

// K(u) = (2 pi)^{-d/2} exp(-||u||^2 / 2). The lower-bound constant is the
// largest value on a 0.01-step grid in (0,1) satisfying the floor condition.
KernelSpec gaussian_kernel(int dimension);

// Checks of the four admissibility conditions used by the regression-kernel
// contract, all at smoothness level beta:
//   (i)   pointwise floor K >= c on the ball ||u|| <= c,
//   (ii)  the kernel integrates to 1,
//   (iii) sup_u (1 + ||u||^{2 beta}) K(u) finite,
//   (iv)  int (1 + ||u||^{4 beta}) K(u)^2 du finite.
// (ii)/(iv) run tensor-product midpoint quadrature on two nested truncation
// boxes and flag divergence when the truncations disagree beyond tol.
// (iii) probes radially out to radius 50 and requires monotone tail decay.
struct KernelValidationReport {
  double tolerance = 0.0;
  bool lower_bound_holds = false;
  double integral_value = 0.0;
  bool integral_converged = false;
  bool integrates_to_one = false;
  double sup_condition_value = 0.0;
  bool sup_condition_finite = false;
  double square_integral_value = 0.0;
  bool square_integral_finite = false;

  bool valid() const {
    return lower_bound_holds && integrates_to_one && sup_condition_finite &&
           square_integral_finite;
  }
};

KernelValidationReport validate_kernel(const KernelSpec& kernel, double beta,
                                       int dimension, double tol);

}  // namespace ova
