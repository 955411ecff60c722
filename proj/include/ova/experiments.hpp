#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ova/classifier.hpp"
#include "ova/datagen.hpp"

namespace ova {

struct RiskEstimate {
  double oracle_excess = 0.0;    // mean Bayes-vs-predictor gap in eta
  double zero_one_excess = 0.0;  // paired misclassification gap on fresh labels
  long n_test = 0;
  double std_error = 0.0;  // of the zero-one estimate
};

// maps a point in [0,1]^d to a label in 1..m
using Predictor = std::function<int(std::span<const double>)>;

// Monte Carlo excess risk on a fresh independent test draw. The oracle form
// averages eta_best - eta_predicted, which is nonnegative pointwise; the
// zero-one form differences indicator losses against the Bayes choice on the
// same label draw.
RiskEstimate excess_risk_oracle(const SyntheticDistribution& dist,
                                const Predictor& predictor, long n_test,
                                std::uint64_t seed);
RiskEstimate excess_risk_oracle(const SyntheticDistribution& dist,
                                const PlugInModel& model, long n_test,
                                std::uint64_t seed);

enum class TrainRegime { iid, mixing, drift };

struct TrainSpec {
  TrainRegime regime = TrainRegime::iid;
  MixingChainSpec chain;   // mixing only
  DriftSchedule schedule;  // drift only
};

LabeledSample draw_training(const SyntheticDistribution& dist,
                            const TrainSpec& spec, long n, std::uint64_t seed);

// Rate-optimal bandwidth for the regime: raw size for independent and
// drifting draws, effective size for mixing ones.
double pick_bandwidth(const TrainSpec& spec, long n, double beta, int d);

// Fraction of replicate fits whose class estimate at x misses the true
// class probability by more than delta. Replicate r trains on seed ^ r.
double deviation_probability(const SyntheticDistribution& dist,
                             const TrainSpec& train, long n, int class_index,
                             std::span<const double> x, double delta,
                             int replicates, std::uint64_t seed);

enum class ExponentRegime { drift_or_iid, mixing_effective_n, mixing_raw_n };

// beta (1 + alpha) / (2 beta + d), rescaled by c3 / (c3 + 1) when the rate is
// read against the raw size of a mixing sequence.
double theoretical_exponent(double alpha, double beta, int d,
                            ExponentRegime regime, double c3 = 0.0);

enum class RateRegime { super_fast, fast, not_fast };

// Where the excess-risk rate lands relative to 1/n (super_fast), 1/sqrt(n)
// (fast), or neither. All inequalities strict; c3 = +infinity reduces the
// mixing conditions to the independent ones.
RateRegime classify_regime(double alpha, double beta, int d, bool mixing,
                           double c3 = 0.0);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int points_used = 0;
  int points_dropped = 0;  // non-positive risks cannot enter a log fit
};

// Log-log least squares of risk against size. Needs at least 3 positive
// risk values after dropping the rest.
RateFit fit_rate(std::span<const double> ns, std::span<const double> risks);

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  TrainRegime regime = TrainRegime::iid;
  Family family = Family::crossing;
  int d = 1;
  int m = 0;               // hard_margin only
  double alpha = 0.0;      // crossing only
  double beta = 0.0;
  double g0 = 0.0;         // hard_margin only
  double rho = 0.0;        // mixing only
  double amplitude = 0.0;  // drift only
  std::vector<long> n_grid;
  int replicates = 10;
  long n_test = 2000;
  std::uint64_t base_seed = 1;
  std::string output;
};

// key = value lines, '#' comments. Unknown keys, duplicates, missing
// requirements, and options that do not belong to the chosen family or
// regime are all ConfigError.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_file(const std::string& path);

struct ExperimentRow {
  long n = 0;
  long n_e = 0;
  int replicate = 0;
  double oracle_excess = 0.0;
  double zero_one_excess = 0.0;
  std::uint64_t seed = 0;
};

struct ExperimentResult {
  std::vector<ExperimentRow> rows;  // sorted by (n, replicate)
  RateFit fit;                      // mean oracle excess against the regime axis
  std::optional<RateFit> raw_fit;   // mixing only: against the raw size
  double exponent = 0.0;
  std::optional<double> raw_exponent;
  std::string csv_path;
  std::string summary_path;
};

// Trains one model per (size, replicate) pair on seed
// base_seed ^ (grid_index * 10007 + replicate), measures risk on an
// independent draw seeded by train_seed ^ 0x9E3779B97F4A7C15, streams rows to
// the CSV as they finish, and writes fit records to output + ".summary".
ExperimentResult run_experiment(const ExperimentConfig& config);

}  // namespace ova
