#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "ova/classifier.hpp"

namespace ova {

// Class-probability profile along the first coordinate, with exact
// derivatives so smoothness claims can be checked rather than assumed.
class Profile1D {
 public:
  virtual ~Profile1D() = default;
  virtual double value(double t) const = 0;
  // order 0 is the value itself
  virtual double derivative(double t, int order) const = 0;
};

enum class Family { crossing, hard_margin };

// Synthetic law on [0,1]^d x {1..m}. The first coordinate is uniform on the
// listed support intervals, the rest uniform on [0,1]; class probabilities
// depend on the first coordinate only. alpha/margin_c0 certify the low-noise
// bound P(top-two gap <= t) <= margin_c0 * t^alpha and holder_l the
// smoothness of each profile at exponent beta.
struct SyntheticDistribution {
  Family family = Family::crossing;
  int d = 1;
  int m = 2;
  double beta = 1.0;
  double alpha = 1.0;
  double margin_c0 = 1.0;
  double holder_l = 1.0;
  double g0 = 0.0;  // positive only for the floor family
  std::vector<std::shared_ptr<const Profile1D>> profiles;
  std::vector<std::pair<double, double>> support_x1;  // disjoint, ascending
};

// Two classes whose probabilities cross at x1 = 1/2 with gap |2 x1 - 1|^(1/alpha).
// Requires 1/alpha >= beta or 1/alpha an odd integer, else the profile could
// not be smooth at the crossing.
SyntheticDistribution make_crossing_distribution(int d, double alpha, double beta);

// m classes on m separated x1-islands; on island j class j leads every other
// class by exactly g0. Transitions between islands carry no mass. beta < 4.
SyntheticDistribution make_hard_margin_distribution(int d, int m, double g0, double beta);

std::vector<double> eta_vector(const SyntheticDistribution& dist,
                               std::span<const double> x);
int bayes_predict(const SyntheticDistribution& dist, std::span<const double> x);

// Hold-or-refresh chain: each step keeps the previous point with probability
// rho, else redraws it fresh; labels are redrawn every step. Coupling gives
// alpha(k) <= rho^k, hence the implied certificate.
struct MixingChainSpec {
  double rho = 0.0;  // in [0,1)
  MixingSpec implied() const;
};

struct DriftSchedule {
  double amplitude = 0.0;
  double decay_exponent = 0.0;
};

// Smooth bump supported on [0.1, 0.9] with peak exactly 1 at 1/2.
double drift_bump(double t);

// Decay exponent (beta + d) / (2 beta + d); rejects amplitudes that would
// push any class probability outside [0,1] at the first step.
DriftSchedule make_drift_schedule(const SyntheticDistribution& dist, double amplitude);

// Step i target: class 1 gains amplitude * i^(-decay) * bump(x1), class 2
// loses the same. Steps are 1-based.
std::vector<double> drifted_eta(const SyntheticDistribution& dist,
                                const DriftSchedule& schedule, long step,
                                std::span<const double> x);

// All samplers consume, per point, one uniform per coordinate followed by one
// for the label, so equal seeds align streams across them.
LabeledSample sample_iid(const SyntheticDistribution& dist, long n,
                         std::uint64_t seed);
// rho = 0 reproduces sample_iid exactly. For later points one extra uniform
// decides hold vs refresh; a held point consumes no coordinate uniforms.
LabeledSample sample_mixing(const SyntheticDistribution& dist, long n,
                            const MixingChainSpec& chain, std::uint64_t seed);
// Amplitude 0 reproduces sample_iid exactly.
LabeledSample sample_drift(const SyntheticDistribution& dist, long n,
                           const DriftSchedule& schedule, std::uint64_t seed);

struct MarginReport {
  std::vector<double> t_grid;
  std::vector<double> p_hat;
  std::vector<double> bound;  // min(1, c0 t^alpha) plus Monte Carlo slack
  std::vector<bool> pass;
  double fitted_slope = 0.0;  // log-log fit over positive p_hat entries
  long n_probe = 0;
  bool all_pass = false;
};

// Empirical check of the low-noise bound. Needs n_probe >= 10000 and a
// strictly ascending positive threshold grid.
MarginReport verify_margin(const SyntheticDistribution& dist, long n_probe,
                           std::span<const double> t_grid, std::uint64_t seed);

struct HolderReport {
  long n_pairs = 0;
  double max_ratio = 0.0;
  long violations = 0;
  bool pass = false;
};

// Random pairs on the support: Taylor remainder of each profile at order
// floor(beta) against holder_l * distance^beta.
HolderReport verify_holder(const SyntheticDistribution& dist, long n_pairs,
                           std::uint64_t seed);

// Text format: header "d m n", then one row per point with %.17g coordinates
// and the label. Round-trips exactly.
void write_sample(const LabeledSample& sample, std::ostream& out);
LabeledSample read_sample(std::istream& in);

}  // namespace ova
