#include "ova/kernels.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace ova {

KernelSpec gaussian_kernel(int dimension) {
  if (dimension < 1)
    throw std::invalid_argument("gaussian_kernel: dimension must be >= 1");
  const double norm = std::pow(2.0 * std::numbers::pi, -0.5 * dimension);
  KernelSpec k;
  k.name = "gaussian";
  k.dimension = dimension;
  k.evaluate = [norm](std::span<const double> u) {
    double r2 = 0.0;
    for (double c : u) r2 += c * c;
    return norm * std::exp(-0.5 * r2);
  };
  // radially decreasing, so the minimum over ||u|| <= c sits at radius c
  for (int ci = 99; ci >= 1; --ci) {
    double c = ci / 100.0;
    if (norm * std::exp(-0.5 * c * c) >= c) {
      k.lower_bound_c = c;
      break;
    }
  }
  return k;
}

namespace {

// Probe g(r) = (1 + r^{2 beta}) K(r * dir) on a radial grid. Returns the
// max, its radius, and whether the tail past radius 45 is non-increasing.
struct RadialProbe {
  double sup = 0.0;
  double arg_r = 0.0;
  bool tail_decays = true;
};

RadialProbe probe_direction(const KernelSpec& kernel, double beta,
                            const std::vector<double>& dir) {
  RadialProbe out;
  const int steps = 1000;
  const double r_max = 50.0;
  std::vector<double> u(dir.size());
  double prev = 0.0;
  for (int i = 0; i <= steps; ++i) {
    double r = r_max * i / steps;
    for (std::size_t j = 0; j < dir.size(); ++j) u[j] = r * dir[j];
    double g = (1.0 + std::pow(r * r, beta)) * kernel.evaluate(u);
    if (g > out.sup) {
      out.sup = g;
      out.arg_r = r;
    }
    if (r > 45.0 && g > prev + 1e-12 * (1.0 + prev)) out.tail_decays = false;
    prev = g;
  }
  return out;
}

}  // namespace

KernelValidationReport validate_kernel(const KernelSpec& kernel, double beta,
                                       int dimension, double tol) {
  if (dimension != kernel.dimension)
    throw std::invalid_argument("validate_kernel: dimension mismatch");
  if (beta <= 0.0) throw std::invalid_argument("validate_kernel: beta must be > 0");
  if (tol <= 0.0) throw std::invalid_argument("validate_kernel: tol must be > 0");

  KernelValidationReport rep;
  rep.tolerance = tol;

  // (i) floor on the ball: 9-per-axis tensor grid restricted to ||u|| <= c
  {
    const double c = kernel.lower_bound_c;
    rep.lower_bound_holds = c > 0.0;
    if (rep.lower_bound_holds) {
      const int g = 9;
      std::vector<double> u(dimension);
      std::vector<int> idx(dimension, 0);
      bool done = false;
      while (!done) {
        double r2 = 0.0;
        for (int j = 0; j < dimension; ++j) {
          u[j] = -c + 2.0 * c * idx[j] / (g - 1);
          r2 += u[j] * u[j];
        }
        if (r2 <= c * c * (1.0 + 1e-12) &&
            kernel.evaluate(u) < c * (1.0 - 1e-12)) {
          rep.lower_bound_holds = false;
          break;
        }
        int pos = dimension - 1;
        while (pos >= 0 && idx[pos] == g - 1) idx[pos--] = 0;
        if (pos < 0)
          done = true;
        else
          ++idx[pos];
      }
    }
  }

  // (ii) and (iv): one midpoint pass over the box [-16,16]^d whose node set
  // contains the [-8,8]^d nodes, so both truncations come out of the same
  // sweep. For the gaussian the mass outside ||u||_inf = 8 is below 1e-14,
  // and disagreement between the two boxes flags a diverging integral.
  {
    const int n_small = dimension == 1 ? 4096 : (dimension == 2 ? 512 : 100);
    const int n_big = 2 * n_small;
    const double step = 16.0 / n_small;
    std::vector<double> coord(n_big);
    for (int j = 0; j < n_big; ++j) coord[j] = -16.0 + (j + 0.5) * step;
    const int inner_lo = n_small / 2, inner_hi = 3 * n_small / 2;

    double i_big = 0.0, i_small = 0.0, j_big = 0.0, j_small = 0.0;
    std::vector<double> u(dimension);
    std::vector<int> idx(dimension, 0);
    bool done = false;
    while (!done) {
      double r2 = 0.0;
      bool inner = true;
      for (int j = 0; j < dimension; ++j) {
        u[j] = coord[idx[j]];
        r2 += u[j] * u[j];
        inner = inner && idx[j] >= inner_lo && idx[j] < inner_hi;
      }
      double kv = kernel.evaluate(u);
      double sq = (1.0 + std::pow(r2, 2.0 * beta)) * kv * kv;
      i_big += kv;
      j_big += sq;
      if (inner) {
        i_small += kv;
        j_small += sq;
      }
      int pos = dimension - 1;
      while (pos >= 0 && idx[pos] == n_big - 1) idx[pos--] = 0;
      if (pos < 0)
        done = true;
      else
        ++idx[pos];
    }
    const double cell = std::pow(step, dimension);
    i_big *= cell;
    i_small *= cell;
    j_big *= cell;
    j_small *= cell;

    rep.integral_value = i_big;
    rep.integral_converged = std::abs(i_big - i_small) <= tol;
    rep.integrates_to_one =
        rep.integral_converged && std::abs(i_big - 1.0) <= tol;
    rep.square_integral_value = j_big;
    rep.square_integral_finite =
        std::abs(j_big - j_small) <= tol * std::max(1.0, std::abs(j_big));
  }

  // (iii) radial probe along the first axis and the main diagonal
  {
    std::vector<double> axis(dimension, 0.0);
    axis[0] = 1.0;
    std::vector<double> diag(dimension, 1.0 / std::sqrt(double(dimension)));
    RadialProbe a = probe_direction(kernel, beta, axis);
    RadialProbe b = probe_direction(kernel, beta, diag);
    rep.sup_condition_value = std::max(a.sup, b.sup);
    rep.sup_condition_finite = a.tail_decays && b.tail_decays &&
                               a.arg_r < 45.0 && b.arg_r < 45.0;
  }

  return rep;
}

}  // namespace ova
