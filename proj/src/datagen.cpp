#include "ova/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "ova/rng.hpp"

namespace ova {
namespace {

// 35 t^4 - 84 t^5 + 70 t^6 - 20 t^7 rises 0 -> 1 on [0,1] with three
// derivatives vanishing at both ends.
double smoothstep_deriv(double tau, int order) {
  if (order > 7) return 0.0;
  double c[8] = {0, 0, 0, 0, 35, -84, 70, -20};
  for (int k = 0; k < order; ++k) {
    for (int i = 0; i + 1 < 8; ++i) c[i] = (i + 1) * c[i + 1];
    c[7] = 0.0;
  }
  double acc = 0.0;
  for (int i = 7; i >= 0; --i) acc = acc * tau + c[i];
  return acc;
}

// p(z) = |z|^q sign(z); on either side of zero
// p^(j)(z) = q(q-1)...(q-j+1) |z|^(q-j) sign(z)^(j+1).
class CrossingProfile final : public Profile1D {
 public:
  CrossingProfile(double q, int sign) : q_(q), sign_(sign) {
    long rounded = std::lround(q);
    q_int_ = std::abs(q - static_cast<double>(rounded)) < 1e-9
                 ? static_cast<int>(rounded)
                 : -1;
  }

  double value(double t) const override { return derivative(t, 0); }

  double derivative(double t, int order) const override {
    if (order < 0) throw std::invalid_argument("derivative order must be >= 0");
    double coeff = 1.0;
    for (int i = 0; i < order; ++i) coeff *= q_ - i;
    double base = order == 0 ? 0.5 : 0.0;
    if (coeff == 0.0) return base;  // integer exponent differentiated away
    double z = 2.0 * t - 1.0;
    double p;
    if (z == 0.0) {
      p = q_int_ == order ? 1.0 : 0.0;
    } else {
      double mag = std::pow(std::abs(z), q_ - order);
      p = order % 2 == 0 ? (z > 0.0 ? mag : -mag) : mag;
    }
    return base + 0.5 * sign_ * std::ldexp(coeff, order) * p;
  }

 private:
  double q_;
  int sign_;
  int q_int_;  // q when (nearly) integer, else -1
};

// Plateau [lo, hi] at height 1 with smoothstep shoulders of width w; a
// clamped side extends the plateau to the domain edge instead.
struct Bump {
  double lo = 0.0;
  double hi = 0.0;
  double w = 0.0;
  bool clamped_left = false;
  bool clamped_right = false;

  double eval(double t, int order) const {
    if (t >= lo && t <= hi) return order == 0 ? 1.0 : 0.0;
    if (t < lo) {
      if (clamped_left) return order == 0 ? 1.0 : 0.0;
      if (t > lo - w) {
        double tau = (t - (lo - w)) / w;
        return smoothstep_deriv(tau, order) / std::pow(w, order);
      }
      return 0.0;
    }
    if (clamped_right) return order == 0 ? 1.0 : 0.0;
    if (t < hi + w) {
      double tau = ((hi + w) - t) / w;
      double flip = order % 2 == 0 ? 1.0 : -1.0;
      return flip * smoothstep_deriv(tau, order) / std::pow(w, order);
    }
    return 0.0;
  }
};

// eta_j = b + g0/m + g0 (psi_j - S/m) with S the sum of all bumps; on island
// j this is b + g0 for class j and b for the rest.
class HardMarginProfile final : public Profile1D {
 public:
  HardMarginProfile(std::vector<Bump> bumps, int index, double b, double g0)
      : bumps_(std::move(bumps)), index_(index), b_(b), g0_(g0) {}

  double value(double t) const override { return derivative(t, 0); }

  double derivative(double t, int order) const override {
    if (order < 0) throw std::invalid_argument("derivative order must be >= 0");
    double total = 0.0;
    for (const Bump& bump : bumps_) total += bump.eval(t, order);
    double m = static_cast<double>(bumps_.size());
    double core = g0_ * (bumps_[index_].eval(t, order) - total / m);
    return order == 0 ? b_ + g0_ / m + core : core;
  }

 private:
  std::vector<Bump> bumps_;
  int index_;
  double b_;
  double g0_;
};

void eta_values(const SyntheticDistribution& dist, double t,
                std::span<double> out) {
  for (int j = 0; j < dist.m; ++j) out[j] = dist.profiles[j]->value(t);
}

// Grid sweep of the Taylor remainder ratio; the margin absorbs what a finite
// grid misses near cusps.
double probe_holder_constant(const SyntheticDistribution& dist) {
  int k = static_cast<int>(std::floor(dist.beta));
  const int grid = 241;
  double worst = 0.0;
  for (const auto& profile : dist.profiles) {
    for (int a = 0; a < grid; ++a) {
      double t = static_cast<double>(a) / (grid - 1);
      double deriv[8] = {0};
      for (int l = 0; l <= k; ++l) deriv[l] = profile->derivative(t, l);
      for (int b = 0; b < grid; ++b) {
        if (a == b) continue;
        double tp = static_cast<double>(b) / (grid - 1);
        double delta = tp - t;
        double taylor = 0.0;
        double term = 1.0;
        for (int l = 0; l <= k; ++l) {
          if (l > 0) term *= delta / l;
          taylor += deriv[l] * term;
        }
        double rem = std::abs(profile->value(tp) - taylor);
        worst = std::max(worst, rem / std::pow(std::abs(delta), dist.beta));
      }
    }
  }
  return 1.25 * worst + 0.01;
}

double sample_x1(const SyntheticDistribution& dist, double u) {
  double total = 0.0;
  for (const auto& [lo, hi] : dist.support_x1) total += hi - lo;
  double v = u * total;
  for (const auto& [lo, hi] : dist.support_x1) {
    double len = hi - lo;
    if (v < len) return lo + v;
    v -= len;
  }
  return dist.support_x1.back().second;
}

int draw_label(std::span<const double> eta, double u) {
  double cum = 0.0;
  for (std::size_t j = 0; j < eta.size(); ++j) {
    cum += eta[j];
    if (u < cum) return static_cast<int>(j) + 1;
  }
  return static_cast<int>(eta.size());
}

void draw_point(const SyntheticDistribution& dist, Rng& rng, double* out) {
  out[0] = sample_x1(dist, rng.uniform01());
  for (int j = 1; j < dist.d; ++j) out[j] = rng.uniform01();
}

void check_sample_args(const SyntheticDistribution& dist, long n) {
  if (dist.m < 2 || dist.profiles.size() != static_cast<std::size_t>(dist.m))
    throw std::invalid_argument("distribution has no usable profiles");
  if (dist.support_x1.empty())
    throw std::invalid_argument("distribution has empty support");
  if (n < 1) throw std::invalid_argument("sample size must be >= 1");
}

void drifted_eta_values(const SyntheticDistribution& dist,
                        const DriftSchedule& schedule, long step, double t,
                        std::span<double> out) {
  if (step < 1) throw std::invalid_argument("drift step index starts at 1");
  eta_values(dist, t, out);
  double factor = schedule.amplitude *
                  std::pow(static_cast<double>(step), -schedule.decay_exponent);
  double bump = drift_bump(t);
  out[0] += factor * bump;
  out[1] -= factor * bump;
}

double ols_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  return sxy / sxx;
}

}  // namespace

SyntheticDistribution make_crossing_distribution(int d, double alpha,
                                                 double beta) {
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  double q = 1.0 / alpha;
  long rounded = std::lround(q);
  bool odd_integer =
      std::abs(q - static_cast<double>(rounded)) < 1e-9 && rounded % 2 == 1;
  if (!(q >= beta - 1e-12) && !odd_integer) {
    throw std::invalid_argument(
        "crossing family needs 1/alpha >= beta or 1/alpha an odd integer; "
        "got 1/alpha = " +
        std::to_string(q) + " with beta = " + std::to_string(beta));
  }
  SyntheticDistribution dist;
  dist.family = Family::crossing;
  dist.d = d;
  dist.m = 2;
  dist.beta = beta;
  dist.alpha = alpha;
  dist.margin_c0 = 1.0;  // P(gap <= t) = t^alpha exactly
  dist.g0 = 0.0;
  dist.profiles = {std::make_shared<CrossingProfile>(q, +1),
                   std::make_shared<CrossingProfile>(q, -1)};
  dist.support_x1 = {{0.0, 1.0}};
  dist.holder_l = probe_holder_constant(dist);
  return dist;
}

SyntheticDistribution make_hard_margin_distribution(int d, int m, double g0,
                                                    double beta) {
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  if (m < 2) throw std::invalid_argument("class count must be >= 2");
  if (!(g0 > 0.0 && g0 < 1.0))
    throw std::invalid_argument("margin floor must lie in (0,1)");
  if (!(beta > 0.0) || beta >= 4.0)
    throw std::invalid_argument(
        "floor family profiles are C^3, so beta must lie in (0,4)");
  double w = 1.0 / (4.0 * m);
  std::vector<Bump> bumps(m);
  std::vector<std::pair<double, double>> islands(m);
  for (int j = 0; j < m; ++j) {
    double lo = static_cast<double>(j) / m + w;
    double hi = static_cast<double>(j + 1) / m - w;
    bumps[j] = Bump{lo, hi, w, j == 0, j == m - 1};
    islands[j] = {lo, hi};
  }
  double b = (1.0 - g0) / m;
  SyntheticDistribution dist;
  dist.family = Family::hard_margin;
  dist.d = d;
  dist.m = m;
  dist.beta = beta;
  dist.alpha = 1.0;
  dist.margin_c0 = 1.0 / g0;  // the gap never drops below g0 on the support
  dist.g0 = g0;
  for (int j = 0; j < m; ++j)
    dist.profiles.push_back(std::make_shared<HardMarginProfile>(bumps, j, b, g0));
  dist.support_x1 = std::move(islands);
  dist.holder_l = probe_holder_constant(dist);
  return dist;
}

std::vector<double> eta_vector(const SyntheticDistribution& dist,
                               std::span<const double> x) {
  if (static_cast<int>(x.size()) != dist.d)
    throw std::invalid_argument("point dimension mismatch");
  for (double v : x)
    if (!(v >= 0.0 && v <= 1.0))
      throw std::invalid_argument("point outside the unit cube");
  std::vector<double> eta(dist.m);
  eta_values(dist, x[0], eta);
  return eta;
}

int bayes_predict(const SyntheticDistribution& dist,
                  std::span<const double> x) {
  auto eta = eta_vector(dist, x);
  int best = 0;
  for (int j = 1; j < dist.m; ++j)
    if (eta[j] > eta[best]) best = j;
  return best + 1;
}

MixingSpec MixingChainSpec::implied() const {
  if (!(rho >= 0.0 && rho < 1.0))
    throw std::invalid_argument("hold probability must lie in [0,1)");
  MixingSpec spec;
  spec.c1 = 1.0;
  if (rho == 0.0) {
    spec.c2 = 1.0;
    spec.c3 = std::numeric_limits<double>::infinity();
  } else {
    spec.c2 = -std::log(rho);
    spec.c3 = 1.0;
  }
  return spec;
}

double drift_bump(double t) {
  if (t <= 0.1 || t >= 0.9) return 0.0;
  double tau = t < 0.5 ? (t - 0.1) / 0.4 : (0.9 - t) / 0.4;
  return smoothstep_deriv(tau, 0);
}

DriftSchedule make_drift_schedule(const SyntheticDistribution& dist,
                                  double amplitude) {
  if (!(amplitude >= 0.0))
    throw std::invalid_argument("drift amplitude must be >= 0");
  if (dist.m < 2) throw std::invalid_argument("drift needs at least 2 classes");
  DriftSchedule schedule;
  schedule.amplitude = amplitude;
  schedule.decay_exponent = (dist.beta + dist.d) / (2.0 * dist.beta + dist.d);
  // the first step is the largest perturbation; scan the whole axis
  const int grid = 2001;
  std::vector<double> eta(dist.m);
  for (int i = 0; i < grid; ++i) {
    double t = static_cast<double>(i) / (grid - 1);
    drifted_eta_values(dist, schedule, 1, t, eta);
    for (int j = 0; j < dist.m; ++j) {
      if (eta[j] < 0.0 || eta[j] > 1.0) {
        throw std::invalid_argument(
            "drift amplitude " + std::to_string(amplitude) +
            " leaves the probability simplex at x1 = " + std::to_string(t));
      }
    }
  }
  return schedule;
}

std::vector<double> drifted_eta(const SyntheticDistribution& dist,
                                const DriftSchedule& schedule, long step,
                                std::span<const double> x) {
  auto eta = eta_vector(dist, x);  // validates the point
  drifted_eta_values(dist, schedule, step, x[0], eta);
  return eta;
}

LabeledSample sample_iid(const SyntheticDistribution& dist, long n,
                         std::uint64_t seed) {
  check_sample_args(dist, n);
  Rng rng(seed);
  std::vector<double> xs(static_cast<std::size_t>(n) * dist.d);
  std::vector<int> labels(n);
  std::vector<double> eta(dist.m);
  for (long i = 0; i < n; ++i) {
    double* x = xs.data() + static_cast<std::size_t>(i) * dist.d;
    draw_point(dist, rng, x);
    eta_values(dist, x[0], eta);
    labels[i] = draw_label(eta, rng.uniform01());
  }
  return make_labeled_sample(std::move(xs), std::move(labels), dist.d, dist.m);
}

LabeledSample sample_mixing(const SyntheticDistribution& dist, long n,
                            const MixingChainSpec& chain, std::uint64_t seed) {
  chain.implied();  // validates rho
  if (chain.rho == 0.0) return sample_iid(dist, n, seed);
  check_sample_args(dist, n);
  Rng rng(seed);
  std::vector<double> xs(static_cast<std::size_t>(n) * dist.d);
  std::vector<int> labels(n);
  std::vector<double> eta(dist.m);
  for (long i = 0; i < n; ++i) {
    double* x = xs.data() + static_cast<std::size_t>(i) * dist.d;
    if (i == 0) {
      draw_point(dist, rng, x);
    } else {
      if (rng.uniform01() < chain.rho) {
        std::copy(x - dist.d, x, x);
      } else {
        draw_point(dist, rng, x);
      }
    }
    eta_values(dist, x[0], eta);
    labels[i] = draw_label(eta, rng.uniform01());
  }
  return make_labeled_sample(std::move(xs), std::move(labels), dist.d, dist.m);
}

LabeledSample sample_drift(const SyntheticDistribution& dist, long n,
                           const DriftSchedule& schedule, std::uint64_t seed) {
  check_sample_args(dist, n);
  if (!(schedule.amplitude >= 0.0) || !(schedule.decay_exponent >= 0.0))
    throw std::invalid_argument("malformed drift schedule");
  Rng rng(seed);
  std::vector<double> xs(static_cast<std::size_t>(n) * dist.d);
  std::vector<int> labels(n);
  std::vector<double> eta(dist.m);
  for (long i = 0; i < n; ++i) {
    double* x = xs.data() + static_cast<std::size_t>(i) * dist.d;
    draw_point(dist, rng, x);
    drifted_eta_values(dist, schedule, i + 1, x[0], eta);
    labels[i] = draw_label(eta, rng.uniform01());
  }
  return make_labeled_sample(std::move(xs), std::move(labels), dist.d, dist.m);
}

MarginReport verify_margin(const SyntheticDistribution& dist, long n_probe,
                           std::span<const double> t_grid,
                           std::uint64_t seed) {
  if (n_probe < 10000)
    throw std::invalid_argument("margin check needs at least 10000 probes");
  if (t_grid.empty())
    throw std::invalid_argument("margin check needs a nonempty threshold grid");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > 0.0) || (i > 0 && !(t_grid[i] > t_grid[i - 1])))
      throw std::invalid_argument(
          "threshold grid must be positive and strictly ascending");
  }
  Rng rng(seed);
  std::vector<double> gaps(n_probe);
  std::vector<double> x(dist.d), eta(dist.m);
  for (long i = 0; i < n_probe; ++i) {
    draw_point(dist, rng, x.data());
    eta_values(dist, x[0], eta);
    double best = -1.0, second = -1.0;
    for (double v : eta) {
      if (v > best) {
        second = best;
        best = v;
      } else if (v > second) {
        second = v;
      }
    }
    gaps[i] = best - second;
  }
  std::sort(gaps.begin(), gaps.end());

  MarginReport report;
  report.n_probe = n_probe;
  report.t_grid.assign(t_grid.begin(), t_grid.end());
  report.all_pass = true;
  std::vector<double> log_t, log_p;
  for (double t : t_grid) {
    auto it = std::upper_bound(gaps.begin(), gaps.end(), t);
    double p_hat =
        static_cast<double>(it - gaps.begin()) / static_cast<double>(n_probe);
    double p0 = std::min(1.0, dist.margin_c0 * std::pow(t, dist.alpha));
    double slack =
        3.0 * std::sqrt(p0 * (1.0 - p0) / static_cast<double>(n_probe)) + 1e-12;
    bool ok = p_hat <= p0 + slack;
    report.p_hat.push_back(p_hat);
    report.bound.push_back(p0 + slack);
    report.pass.push_back(ok);
    report.all_pass = report.all_pass && ok;
    if (p_hat > 0.0) {
      log_t.push_back(std::log(t));
      log_p.push_back(std::log(p_hat));
    }
  }
  report.fitted_slope = log_t.size() >= 2
                            ? ols_slope(log_t, log_p)
                            : std::numeric_limits<double>::quiet_NaN();
  return report;
}

HolderReport verify_holder(const SyntheticDistribution& dist, long n_pairs,
                           std::uint64_t seed) {
  if (n_pairs < 1) throw std::invalid_argument("need at least one pair");
  int k = static_cast<int>(std::floor(dist.beta));
  Rng rng(seed);
  HolderReport report;
  report.n_pairs = n_pairs;
  std::vector<double> x(dist.d), y(dist.d);
  for (long i = 0; i < n_pairs; ++i) {
    draw_point(dist, rng, x.data());
    draw_point(dist, rng, y.data());
    double dist2 = 0.0;
    for (int j = 0; j < dist.d; ++j)
      dist2 += (x[j] - y[j]) * (x[j] - y[j]);
    double norm = std::sqrt(dist2);
    if (norm < 1e-12) continue;
    double denom = std::pow(norm, dist.beta);
    double delta = y[0] - x[0];
    for (const auto& profile : dist.profiles) {
      double taylor = 0.0;
      double term = 1.0;
      for (int l = 0; l <= k; ++l) {
        if (l > 0) term *= delta / l;
        taylor += profile->derivative(x[0], l) * term;
      }
      double rem = std::abs(profile->value(y[0]) - taylor);
      report.max_ratio = std::max(report.max_ratio, rem / denom);
      if (rem > dist.holder_l * denom * (1.0 + 1e-9) + 1e-12)
        ++report.violations;
    }
  }
  report.pass = report.violations == 0;
  return report;
}

void write_sample(const LabeledSample& sample, std::ostream& out) {
  out << sample.d << ' ' << sample.m << ' ' << sample.n << '\n';
  char buf[40];
  for (int i = 0; i < sample.n; ++i) {
    for (int j = 0; j < sample.d; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g",
                    sample.observations[static_cast<std::size_t>(i) * sample.d + j]);
      out << buf << ' ';
    }
    out << sample.labels[i] << '\n';
  }
  if (!out) throw std::runtime_error("sample write failed");
}

LabeledSample read_sample(std::istream& in) {
  int d = 0, m = 0;
  long n = 0;
  if (!(in >> d >> m >> n) || d < 1 || m < 2 || n < 1)
    throw std::runtime_error("malformed sample header");
  std::vector<double> xs(static_cast<std::size_t>(n) * d);
  std::vector<int> labels(n);
  for (long i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) {
      if (!(in >> xs[static_cast<std::size_t>(i) * d + j]))
        throw std::runtime_error("truncated sample at row " + std::to_string(i));
    }
    if (!(in >> labels[i]))
      throw std::runtime_error("truncated sample at row " + std::to_string(i));
  }
  return make_labeled_sample(std::move(xs), std::move(labels), d, m);
}

}  // namespace ova
