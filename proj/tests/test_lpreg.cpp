#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "ova/kernels.hpp"
#include "ova/lpreg.hpp"
#include "ova/multipoly.hpp"

using ova::KernelSpec;
using ova::LocalSystem;
using ova::LPEstimate;
using ova::PolyBasis;

namespace {

struct Sample {
  std::vector<double> xs;  // n*d row-major
  std::vector<double> ys;
  int n = 0;
  int d = 1;
};

Sample random_sample(int n, int d, std::uint64_t seed, bool binary_ys) {
  Sample s;
  s.n = n;
  s.d = d;
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  s.xs.resize(std::size_t(n) * d);
  s.ys.resize(n);
  for (auto& v : s.xs) v = unif(gen);
  for (auto& y : s.ys) y = binary_ys ? double(unif(gen) < 0.4) : unif(gen);
  return s;
}

// Oracle: direct double loop over index pairs, no shared accumulation.
LocalSystem brute_force_system(const Sample& s, const std::vector<double>& x,
                               double h, const PolyBasis& basis,
                               const KernelSpec& kernel) {
  const int m = basis.size();
  const int d = s.d;
  LocalSystem sys;
  sys.bhat = Eigen::MatrixXd::Zero(m, m);
  sys.avec = Eigen::VectorXd::Zero(m);
  const double scale = 1.0 / (s.n * std::pow(h, d));
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      std::vector<int> sum_exp(d);
      for (int j = 0; j < d; ++j)
        sum_exp[j] = basis.indices[a].exponents[j] + basis.indices[b].exponents[j];
      auto sidx = ova::make_multi_index(sum_exp);
      double acc = 0.0;
      for (int i = 0; i < s.n; ++i) {
        std::vector<double> u(d);
        for (int j = 0; j < d; ++j) u[j] = (s.xs[std::size_t(i) * d + j] - x[j]) / h;
        double w = kernel.evaluate(u);
        if (w < 1e-300) continue;
        acc += ova::eval_monomial(u, sidx) * w;
      }
      sys.bhat(a, b) = scale * acc;
    }
    double acc = 0.0;
    for (int i = 0; i < s.n; ++i) {
      std::vector<double> u(d);
      for (int j = 0; j < d; ++j) u[j] = (s.xs[std::size_t(i) * d + j] - x[j]) / h;
      double w = kernel.evaluate(u);
      if (w < 1e-300) continue;
      acc += s.ys[i] * ova::eval_monomial(u, basis.indices[a]) * w;
    }
    sys.avec(a) = scale * acc;
  }
  return sys;
}

// Independent linear solve: Gauss-Jordan with partial pivoting on plain
// arrays, no Eigen.
std::vector<double> gauss_jordan(std::vector<std::vector<double>> a,
                                 std::vector<double> b) {
  const int n = int(b.size());
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    std::swap(a[col], a[piv]);
    std::swap(b[col], b[piv]);
    double diag = a[col][col];
    for (int c = col; c < n; ++c) a[col][c] /= diag;
    b[col] /= diag;
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      double f = a[r][col];
      if (f == 0.0) continue;
      for (int c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  return b;
}

}  // namespace

TEST_CASE("clip_unit three cases") {
  CHECK(ova::clip_unit(-0.2) == 0.0);
  CHECK(ova::clip_unit(0.0) == 0.0);
  CHECK(ova::clip_unit(0.4) == 0.4);
  CHECK(ova::clip_unit(1.0) == 1.0);
  CHECK(ova::clip_unit(1.7) == 1.0);
}

TEST_CASE("system matches brute force, d=1 order 1") {
  Sample s = random_sample(50, 1, 101, false);
  KernelSpec k = ova::gaussian_kernel(1);
  PolyBasis basis = ova::enumerate_basis(1, 1);
  std::vector<double> x{0.45};
  LocalSystem got = ova::build_local_system(s.xs, s.ys, x, 0.2, basis, k);
  LocalSystem want = brute_force_system(s, x, 0.2, basis, k);
  for (int a = 0; a < basis.size(); ++a) {
    CHECK(got.avec(a) ==
          doctest::Approx(want.avec(a)).epsilon(1e-12).scale(1.0));
    for (int b = 0; b < basis.size(); ++b)
      CHECK(got.bhat(a, b) ==
            doctest::Approx(want.bhat(a, b)).epsilon(1e-12).scale(1.0));
  }
  CHECK(got.effective_weight_count == 50);
}

TEST_CASE("system matches brute force, d=2 order 2, binary ys") {
  Sample s = random_sample(80, 2, 202, true);
  KernelSpec k = ova::gaussian_kernel(2);
  PolyBasis basis = ova::enumerate_basis(2, 2);
  std::vector<double> x{0.5, 0.3};
  LocalSystem got = ova::build_local_system(s.xs, s.ys, x, 0.3, basis, k);
  LocalSystem want = brute_force_system(s, x, 0.3, basis, k);
  for (int a = 0; a < basis.size(); ++a) {
    CHECK(got.avec(a) ==
          doctest::Approx(want.avec(a)).epsilon(1e-12).scale(1.0));
    for (int b = 0; b < basis.size(); ++b)
      CHECK(got.bhat(a, b) ==
            doctest::Approx(want.bhat(a, b)).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("bhat is symmetric and positive semidefinite") {
  Sample s = random_sample(60, 2, 303, false);
  KernelSpec k = ova::gaussian_kernel(2);
  PolyBasis basis = ova::enumerate_basis(2, 2);
  std::vector<double> x{0.6, 0.6};
  LocalSystem sys = ova::build_local_system(s.xs, s.ys, x, 0.25, basis, k);
  for (int a = 0; a < basis.size(); ++a)
    for (int b = 0; b < basis.size(); ++b)
      CHECK(sys.bhat(a, b) == sys.bhat(b, a));
  CHECK(sys.min_eigenvalue >= -1e-10);
}

TEST_CASE("estimate solve agrees with an independent elimination") {
  Sample s = random_sample(120, 1, 404, false);
  KernelSpec k = ova::gaussian_kernel(1);
  PolyBasis basis = ova::enumerate_basis(1, 2);
  std::vector<double> x{0.5};
  LocalSystem sys = ova::build_local_system(s.xs, s.ys, x, 0.25, basis, k);
  REQUIRE(sys.min_eigenvalue > 1e-8);
  LPEstimate est = ova::lp_estimate(sys, 1e-8);
  const int m = basis.size();
  std::vector<std::vector<double>> a(m, std::vector<double>(m));
  std::vector<double> b(m);
  for (int i = 0; i < m; ++i) {
    b[i] = sys.avec(i);
    for (int j = 0; j < m; ++j) a[i][j] = sys.bhat(i, j);
  }
  std::vector<double> theta = gauss_jordan(a, b);
  CHECK_FALSE(est.degenerate);
  CHECK(est.raw == doctest::Approx(theta[0]).epsilon(1e-9));
}

TEST_CASE("constant responses give intercept one") {
  Sample s = random_sample(70, 1, 505, false);
  std::fill(s.ys.begin(), s.ys.end(), 1.0);
  KernelSpec k = ova::gaussian_kernel(1);
  PolyBasis basis = ova::enumerate_basis(1, 2);
  std::vector<double> x{0.5};
  LocalSystem sys = ova::build_local_system(s.xs, s.ys, x, 0.3, basis, k);
  LPEstimate est = ova::lp_estimate(sys, 1e-8);
  CHECK_FALSE(est.degenerate);
  CHECK(est.raw == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(est.clipped == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("polynomial reproduction within 1e-8") {
  std::mt19937_64 gen(606);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int d = 1; d <= 2; ++d) {
    for (int order = 1; order <= 2; ++order) {
      PolyBasis basis = ova::enumerate_basis(d, order);
      Sample s = random_sample(200, d, 707 + d * 10 + order, false);
      std::vector<double> coeffs(basis.size());
      for (auto& c : coeffs) c = unif(gen);
      for (int i = 0; i < s.n; ++i) {
        std::span<const double> xi(s.xs.data() + std::size_t(i) * d, d);
        s.ys[i] = ova::eval_poly(coeffs, basis, xi);
      }
      std::vector<double> x(d, 0.45);
      double target = ova::eval_poly(coeffs, basis, x);
      KernelSpec k = ova::gaussian_kernel(d);
      LocalSystem sys = ova::build_local_system(s.xs, s.ys, x, 0.35, basis, k);
      LPEstimate est = ova::lp_estimate(sys, 1e-8);
      REQUIRE_FALSE(est.degenerate);
      CHECK(std::abs(est.raw - target) <= 1e-8);
    }
  }
}

TEST_CASE("order zero equals the kernel-weighted average") {
  for (std::uint64_t seed : {11u, 22u, 33u, 44u}) {
    Sample s = random_sample(90, 1, seed, true);
    KernelSpec k = ova::gaussian_kernel(1);
    PolyBasis basis = ova::enumerate_basis(1, 0);
    std::vector<double> x{0.37};
    LocalSystem sys = ova::build_local_system(s.xs, s.ys, x, 0.15, basis, k);
    LPEstimate est = ova::lp_estimate(sys, 1e-12);
    double num = 0.0, den = 0.0;
    for (int i = 0; i < s.n; ++i) {
      std::vector<double> u{(s.xs[i] - x[0]) / 0.15};
      double w = k.evaluate(u);
      num += s.ys[i] * w;
      den += w;
    }
    CHECK(est.raw == doctest::Approx(num / den).epsilon(1e-12));
  }
}

TEST_CASE("clipped stays in the unit interval") {
  std::mt19937_64 gen(808);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  KernelSpec k = ova::gaussian_kernel(1);
  for (int rep = 0; rep < 30; ++rep) {
    Sample s = random_sample(25, 1, 900 + rep, false);
    for (auto& y : s.ys) y = 4.0 * unif(gen) - 2.0;  // responses outside [0,1]
    PolyBasis basis = ova::enumerate_basis(1, 2);
    std::vector<double> x{unif(gen)};
    LocalSystem sys = ova::build_local_system(s.xs, s.ys, x, 0.08, basis, k);
    LPEstimate est = ova::lp_estimate(sys, 1e-8);
    CHECK(est.clipped >= 0.0);
    CHECK(est.clipped <= 1.0);
  }
}

TEST_CASE("translation and matched rescaling leave the estimate alone") {
  Sample s = random_sample(100, 2, 1001, false);
  KernelSpec k = ova::gaussian_kernel(2);
  PolyBasis basis = ova::enumerate_basis(2, 1);
  std::vector<double> x{0.4, 0.55};
  double h = 0.3;
  LPEstimate base =
      ova::lp_estimate(ova::build_local_system(s.xs, s.ys, x, h, basis, k), 1e-8);

  Sample shifted = s;
  for (std::size_t i = 0; i < shifted.xs.size(); ++i) shifted.xs[i] += 7.25;
  std::vector<double> xsh{x[0] + 7.25, x[1] + 7.25};
  LPEstimate sh = ova::lp_estimate(
      ova::build_local_system(shifted.xs, shifted.ys, xsh, h, basis, k), 1e-8);
  CHECK(sh.raw == doctest::Approx(base.raw).epsilon(1e-10));

  Sample scaled = s;
  for (std::size_t i = 0; i < scaled.xs.size(); ++i) scaled.xs[i] *= 3.5;
  std::vector<double> xsc{x[0] * 3.5, x[1] * 3.5};
  LPEstimate sc = ova::lp_estimate(
      ova::build_local_system(scaled.xs, scaled.ys, xsc, h * 3.5, basis, k), 1e-8);
  CHECK(sc.raw == doctest::Approx(base.raw).epsilon(1e-10));
}

TEST_CASE("all weights underflow to a degenerate system") {
  Sample s = random_sample(40, 1, 1102, true);
  KernelSpec k = ova::gaussian_kernel(1);
  PolyBasis basis = ova::enumerate_basis(1, 1);
  std::vector<double> x{500.0};
  LocalSystem sys = ova::build_local_system(s.xs, s.ys, x, 0.01, basis, k);
  CHECK(sys.effective_weight_count == 0);
  CHECK(sys.min_eigenvalue <= 1e-8);
  LPEstimate est = ova::lp_estimate(sys, 1e-8);
  CHECK(est.degenerate);
  CHECK(est.raw == 0.0);
  CHECK(est.clipped == 0.0);
}

TEST_CASE("guard threshold splits solve and degenerate exactly") {
  LocalSystem sys;
  sys.bhat = Eigen::MatrixXd::Zero(2, 2);
  sys.bhat(0, 0) = 2.0;
  sys.bhat(1, 1) = 1e-6;
  sys.avec = Eigen::VectorXd::Zero(2);
  sys.avec(0) = 1.0;
  sys.avec(1) = 2e-7;
  sys.min_eigenvalue = 1e-6;
  sys.effective_weight_count = 2;

  LPEstimate solved = ova::lp_estimate(sys, 1e-8);
  CHECK_FALSE(solved.degenerate);
  CHECK(solved.raw == doctest::Approx(0.5).epsilon(1e-12));

  LPEstimate guarded = ova::lp_estimate(sys, 1e-5);
  CHECK(guarded.degenerate);
  CHECK(guarded.raw == 0.0);

  // exactly at the threshold counts as degenerate
  LPEstimate at = ova::lp_estimate(sys, 1e-6);
  CHECK(at.degenerate);
}

TEST_CASE("raising the guard never un-degenerates a result") {
  Sample s = random_sample(30, 1, 1203, true);
  KernelSpec k = ova::gaussian_kernel(1);
  PolyBasis basis = ova::enumerate_basis(1, 2);
  std::vector<double> x{0.5};
  LocalSystem sys = ova::build_local_system(s.xs, s.ys, x, 0.2, basis, k);
  double lo = 1e-10;
  for (int step = 0; step < 8; ++step) {
    double hi = lo * 100.0;
    bool deg_lo = ova::lp_estimate(sys, lo).degenerate;
    bool deg_hi = ova::lp_estimate(sys, hi).degenerate;
    if (deg_lo) CHECK(deg_hi);
    lo = hi;
  }
}

TEST_CASE("non-finite solutions are flagged, not returned") {
  LocalSystem sys;
  sys.bhat = Eigen::MatrixXd::Identity(2, 2);
  sys.avec = Eigen::VectorXd::Zero(2);
  sys.avec(0) = std::numeric_limits<double>::quiet_NaN();
  sys.min_eigenvalue = 1.0;
  sys.effective_weight_count = 2;
  LPEstimate est = ova::lp_estimate(sys, 1e-8);
  CHECK(est.degenerate);
  CHECK(est.solve_failed);
  CHECK(est.raw == 0.0);
  CHECK(est.clipped == 0.0);
}

TEST_CASE("bad inputs are rejected") {
  Sample s = random_sample(20, 1, 1304, true);
  KernelSpec k = ova::gaussian_kernel(1);
  PolyBasis basis = ova::enumerate_basis(1, 1);
  std::vector<double> x{0.5};
  std::vector<double> short_ys(s.ys.begin(), s.ys.end() - 1);
  CHECK_THROWS_AS(
      (void)ova::build_local_system(s.xs, short_ys, x, 0.2, basis, k),
      std::invalid_argument);
  CHECK_THROWS_AS((void)ova::build_local_system(s.xs, s.ys, x, 0.0, basis, k),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)ova::build_local_system(s.xs, s.ys, x, -0.1, basis, k),
                  std::invalid_argument);
  std::vector<double> x2{0.5, 0.5};
  CHECK_THROWS_AS((void)ova::build_local_system(s.xs, s.ys, x2, 0.2, basis, k),
                  std::invalid_argument);
  std::vector<double> empty;
  CHECK_THROWS_AS((void)ova::build_local_system(empty, empty, x, 0.2, basis, k),
                  std::invalid_argument);
}
