#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ova/kernels.hpp"
#include "ova/lpreg.hpp"
#include "ova/multipoly.hpp"

namespace ova {

// n observations in [0,1]^d (row-major) with labels in 1..m.
struct LabeledSample {
  std::vector<double> observations;
  std::vector<int> labels;
  int n = 0;
  int d = 0;
  int m = 0;

  std::span<const double> observation(int i) const {
    return {observations.data() + static_cast<std::size_t>(i) * d,
            static_cast<std::size_t>(d)};
  }
};

LabeledSample make_labeled_sample(std::vector<double> observations,
                                  std::vector<int> labels, int d, int m);

// Dependence certificate: the strong mixing coefficients of the training
// sequence satisfy alpha(k) <= c1 * exp(-c2 * k^c3). c3 = +infinity encodes
// independent draws.
struct MixingSpec {
  double c1 = 1.0;
  double c2 = 1.0;
  double c3 = 1.0;

  bool is_iid() const;
};

// One-vs-all plug-in classifier: per class j a clipped local polynomial
// estimate of P(Y = j | X = x), prediction by argmax.
struct PlugInModel {
  LabeledSample sample;
  std::vector<std::vector<double>> binary_views;  // m vectors of 0/1
  double bandwidth = 0.0;
  PolyBasis basis;  // order floor(beta)
  KernelSpec kernel;
  double guard_threshold = 1e-8;
};

PlugInModel fit(LabeledSample sample, double beta, double bandwidth,
                KernelSpec kernel, double guard_threshold = 1e-8);

// Per-class clipped estimates at x. Not normalized across classes.
std::vector<double> class_scores(const PlugInModel& model,
                                 std::span<const double> x);

// Argmax over class scores, smallest index on ties; all-degenerate inputs
// fall back to class 1.
int predict(const PlugInModel& model, std::span<const double> x);

// Largest whole count of disjoint dependence blocks: n / ceil((8n/c2)^{1/(c3+1)}),
// and n itself for the independent case. Throws when the result would be 0.
long effective_sample_size(long n, const MixingSpec& mix);

// n^{-1/(2 beta + d)}; the mixing overload substitutes the effective sample
// size for n.
double theory_bandwidth(long n, double beta, int d);
double theory_bandwidth(long n, double beta, int d, const MixingSpec& mix);

}  // namespace ova
