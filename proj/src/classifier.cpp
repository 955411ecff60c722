#include "ova/classifier.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace ova {

LabeledSample make_labeled_sample(std::vector<double> observations,
                                  std::vector<int> labels, int d, int m) {
  if (d < 1) throw std::invalid_argument("labeled sample: d must be >= 1");
  if (m < 1) throw std::invalid_argument("labeled sample: m must be >= 1");
  if (labels.empty()) throw std::invalid_argument("labeled sample: empty");
  if (observations.size() != labels.size() * static_cast<std::size_t>(d))
    throw std::invalid_argument("labeled sample: observation size mismatch");
  for (int l : labels)
    if (l < 1 || l > m)
      throw std::invalid_argument("labeled sample: label outside 1..m");
  LabeledSample s;
  s.n = static_cast<int>(labels.size());
  s.d = d;
  s.m = m;
  s.observations = std::move(observations);
  s.labels = std::move(labels);
  return s;
}

bool MixingSpec::is_iid() const { return std::isinf(c3); }

PlugInModel fit(LabeledSample sample, double beta, double bandwidth,
                KernelSpec kernel, double guard_threshold) {
  if (sample.m < 2)
    throw std::invalid_argument("fit: need at least two classes");
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth))
    throw std::invalid_argument("fit: bandwidth must be > 0");
  if (!(beta > 0.0))
    throw std::invalid_argument("fit: beta must be > 0");
  if (kernel.dimension != sample.d)
    throw std::invalid_argument("fit: kernel dimension mismatch");

  PlugInModel model;
  model.basis = enumerate_basis(sample.d, static_cast<int>(std::floor(beta)));
  model.binary_views.assign(sample.m, std::vector<double>(sample.n, 0.0));
  for (int i = 0; i < sample.n; ++i)
    model.binary_views[sample.labels[i] - 1][i] = 1.0;
  model.bandwidth = bandwidth;
  model.kernel = std::move(kernel);
  model.guard_threshold = guard_threshold;
  model.sample = std::move(sample);
  return model;
}

std::vector<double> class_scores(const PlugInModel& model,
                                 std::span<const double> x) {
  MultiLocalSystem sys = build_local_system_views(
      model.sample.observations, model.binary_views, x, model.bandwidth,
      model.basis, model.kernel);
  std::vector<LPEstimate> ests = lp_estimate_views(sys, model.guard_threshold);
  std::vector<double> scores(ests.size());
  for (std::size_t j = 0; j < ests.size(); ++j) scores[j] = ests[j].clipped;
  return scores;
}

int predict(const PlugInModel& model, std::span<const double> x) {
  std::vector<double> scores = class_scores(model, x);
  int best = 0;
  for (std::size_t j = 1; j < scores.size(); ++j)
    if (scores[j] > scores[best]) best = static_cast<int>(j);
  return best + 1;
}

long effective_sample_size(long n, const MixingSpec& mix) {
  if (n < 1) throw std::invalid_argument("effective_sample_size: n must be >= 1");
  if (mix.is_iid()) return n;
  if (!(mix.c2 > 0.0) || !(mix.c3 > 0.0))
    throw std::invalid_argument("effective_sample_size: c2, c3 must be > 0");
  const double x = 8.0 * static_cast<double>(n) / mix.c2;
  const double q = mix.c3 + 1.0;
  // smallest integer block with block^q >= x, guarding pow roundoff near
  // exact integer powers
  long block = static_cast<long>(std::floor(std::pow(x, 1.0 / q))) - 2;
  if (block < 1) block = 1;
  while (std::pow(static_cast<double>(block), q) < x * (1.0 - 1e-12)) ++block;
  const long ne = n / block;
  if (ne == 0)
    throw std::invalid_argument(
        "effective_sample_size: dependence blocks longer than the sample; "
        "increase n (n=" + std::to_string(n) + ", block=" +
        std::to_string(block) + ")");
  return ne;
}

double theory_bandwidth(long n, double beta, int d) {
  if (n < 1) throw std::invalid_argument("theory_bandwidth: n must be >= 1");
  if (!(beta > 0.0)) throw std::invalid_argument("theory_bandwidth: beta must be > 0");
  if (d < 1) throw std::invalid_argument("theory_bandwidth: d must be >= 1");
  return std::pow(static_cast<double>(n), -1.0 / (2.0 * beta + d));
}

double theory_bandwidth(long n, double beta, int d, const MixingSpec& mix) {
  return theory_bandwidth(effective_sample_size(n, mix), beta, d);
}

}  // namespace ova
