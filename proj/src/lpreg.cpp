#include "ova/lpreg.hpp"

#include <cmath>
#include <stdexcept>

namespace ova {

double clip_unit(double value) {
  if (value <= 0.0) return 0.0;
  if (value >= 1.0) return 1.0;
  return value;
}

namespace {

constexpr double kWeightFloor = 1e-300;

MultiLocalSystem accumulate(std::span<const double> xs,
                            std::span<const double* const> responses,
                            std::size_t n, std::span<const double> x, double h,
                            const PolyBasis& basis, const KernelSpec& kernel) {
  const int d = static_cast<int>(x.size());
  if (d == 0 || n == 0)
    throw std::invalid_argument("build_local_system: empty input");
  if (basis.dimension != d || kernel.dimension != d)
    throw std::invalid_argument("build_local_system: dimension mismatch");
  if (xs.size() != n * static_cast<std::size_t>(d))
    throw std::invalid_argument("build_local_system: xs size mismatch");
  if (!(h > 0.0) || !std::isfinite(h))
    throw std::invalid_argument("build_local_system: bandwidth must be > 0");

  const int m = basis.size();
  const std::size_t k = responses.size();
  // flat exponent table, one row per basis index
  std::vector<int> expo(static_cast<std::size_t>(m) * d);
  for (int t = 0; t < m; ++t)
    for (int j = 0; j < d; ++j)
      expo[static_cast<std::size_t>(t) * d + j] = basis.indices[t].exponents[j];

  MultiLocalSystem sys;
  sys.bhat = Eigen::MatrixXd::Zero(m, m);
  sys.avecs.assign(k, Eigen::VectorXd::Zero(m));
  std::vector<double> u(d), mono(m);

  for (std::size_t i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) u[j] = (xs[i * d + j] - x[j]) / h;
    const double w = kernel.evaluate(u);
    if (!(w >= kWeightFloor)) continue;
    ++sys.effective_weight_count;
    for (int t = 0; t < m; ++t) {
      double p = 1.0;
      const int* e = expo.data() + static_cast<std::size_t>(t) * d;
      for (int j = 0; j < d; ++j)
        for (int r = 0; r < e[j]; ++r) p *= u[j];
      mono[t] = p;
    }
    for (int a = 0; a < m; ++a) {
      const double wa = w * mono[a];
      for (int b = a; b < m; ++b) sys.bhat(a, b) += wa * mono[b];
    }
    for (std::size_t v = 0; v < k; ++v) {
      const double y = responses[v][i];
      if (y == 0.0) continue;
      const double wy = w * y;
      for (int t = 0; t < m; ++t) sys.avecs[v](t) += wy * mono[t];
    }
  }

  const double scale = 1.0 / (static_cast<double>(n) * std::pow(h, d));
  for (int a = 0; a < m; ++a) {
    for (int b = a; b < m; ++b) {
      sys.bhat(a, b) *= scale;
      sys.bhat(b, a) = sys.bhat(a, b);
    }
  }
  for (auto& av : sys.avecs) av *= scale;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sys.bhat,
                                                    Eigen::EigenvaluesOnly);
  sys.min_eigenvalue = es.eigenvalues()(0);
  return sys;
}

LPEstimate solve_one(const Eigen::LDLT<Eigen::MatrixXd>& ldlt,
                     const Eigen::VectorXd& avec) {
  LPEstimate est;
  Eigen::VectorXd theta = ldlt.solve(avec);
  if (ldlt.info() != Eigen::Success || !std::isfinite(theta(0))) {
    est.degenerate = true;
    est.solve_failed = true;
    return est;
  }
  est.raw = theta(0);
  est.clipped = clip_unit(est.raw);
  return est;
}

}  // namespace

LocalSystem build_local_system(std::span<const double> xs,
                               std::span<const double> ys,
                               std::span<const double> x, double h,
                               const PolyBasis& basis,
                               const KernelSpec& kernel) {
  const double* resp = ys.data();
  MultiLocalSystem multi =
      accumulate(xs, std::span<const double* const>(&resp, 1), ys.size(), x, h,
                 basis, kernel);
  LocalSystem sys;
  sys.bhat = std::move(multi.bhat);
  sys.avec = std::move(multi.avecs[0]);
  sys.min_eigenvalue = multi.min_eigenvalue;
  sys.effective_weight_count = multi.effective_weight_count;
  return sys;
}

MultiLocalSystem build_local_system_views(
    std::span<const double> xs, std::span<const std::vector<double>> views,
    std::span<const double> x, double h, const PolyBasis& basis,
    const KernelSpec& kernel) {
  if (views.empty())
    throw std::invalid_argument("build_local_system_views: no response views");
  const std::size_t n = views[0].size();
  std::vector<const double*> resp(views.size());
  for (std::size_t v = 0; v < views.size(); ++v) {
    if (views[v].size() != n)
      throw std::invalid_argument(
          "build_local_system_views: ragged response views");
    resp[v] = views[v].data();
  }
  return accumulate(xs, resp, n, x, h, basis, kernel);
}

LPEstimate lp_estimate(const LocalSystem& system, double guard_threshold) {
  if (!(system.min_eigenvalue > guard_threshold)) {
    LPEstimate est;
    est.degenerate = true;
    return est;
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(system.bhat);
  return solve_one(ldlt, system.avec);
}

std::vector<LPEstimate> lp_estimate_views(const MultiLocalSystem& system,
                                          double guard_threshold) {
  std::vector<LPEstimate> out(system.avecs.size());
  if (!(system.min_eigenvalue > guard_threshold)) {
    for (auto& e : out) e.degenerate = true;
    return out;
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(system.bhat);
  for (std::size_t v = 0; v < system.avecs.size(); ++v)
    out[v] = solve_one(ldlt, system.avecs[v]);
  return out;
}

}  // namespace ova
