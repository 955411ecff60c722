#include "ova/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <sstream>
#include <string>

#include "ova/kernels.hpp"
#include "ova/rng.hpp"

namespace ova {
namespace {

int arg_best(std::span<const double> eta) {
  int best = 0;
  for (int j = 1; j < static_cast<int>(eta.size()); ++j)
    if (eta[j] > eta[best]) best = j;
  return best;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(value, &used);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' has a malformed number: " + value);
  }
  if (used != value.size())
    throw ConfigError("config key '" + key + "' has a malformed number: " + value);
  return out;
}

long parse_long(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  long out = 0;
  try {
    out = std::stol(value, &used);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' has a malformed integer: " + value);
  }
  if (used != value.size())
    throw ConfigError("config key '" + key + "' has a malformed integer: " + value);
  return out;
}

std::string timestamp_utc() {
  std::time_t now = std::time(nullptr);
  char buf[40];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

void write_fit_record(std::ostream& out, const RateFit& fit, double exponent,
                      const std::string& regime, const std::string& axis) {
  char buf[240];
  std::snprintf(buf, sizeof buf,
                "fitted_slope=%.17g intercept=%.17g r_squared=%.17g "
                "theoretical_exponent=%.17g regime=%s x_axis=%s\n",
                fit.slope, fit.intercept, fit.r_squared, exponent,
                regime.c_str(), axis.c_str());
  out << buf;
}

}  // namespace

RiskEstimate excess_risk_oracle(const SyntheticDistribution& dist,
                                const Predictor& predictor, long n_test,
                                std::uint64_t seed) {
  if (n_test < 1) throw std::invalid_argument("test size must be >= 1");
  if (!predictor) throw std::invalid_argument("predictor is empty");
  auto test = sample_iid(dist, n_test, seed);
  double oracle_sum = 0.0;
  double zo_sum = 0.0, zo_sq = 0.0;
  for (int i = 0; i < test.n; ++i) {
    auto x = test.observation(i);
    auto eta = eta_vector(dist, x);
    int jb = arg_best(eta);
    int jp = predictor(x);
    if (jp < 1 || jp > dist.m)
      throw std::invalid_argument("predictor returned a label out of range");
    oracle_sum += eta[jb] - eta[jp - 1];
    double term = static_cast<double>(jp != test.labels[i]) -
                  static_cast<double>(jb + 1 != test.labels[i]);
    zo_sum += term;
    zo_sq += term * term;
  }
  RiskEstimate est;
  est.n_test = n_test;
  double n = static_cast<double>(n_test);
  est.oracle_excess = oracle_sum / n;
  est.zero_one_excess = zo_sum / n;
  double var = (zo_sq - zo_sum * zo_sum / n) / std::max(1.0, n - 1.0);
  est.std_error = std::sqrt(std::max(0.0, var) / n);
  return est;
}

RiskEstimate excess_risk_oracle(const SyntheticDistribution& dist,
                                const PlugInModel& model, long n_test,
                                std::uint64_t seed) {
  Predictor wrapped = [&model](std::span<const double> x) {
    return predict(model, x);
  };
  return excess_risk_oracle(dist, wrapped, n_test, seed);
}

LabeledSample draw_training(const SyntheticDistribution& dist,
                            const TrainSpec& spec, long n,
                            std::uint64_t seed) {
  switch (spec.regime) {
    case TrainRegime::mixing:
      return sample_mixing(dist, n, spec.chain, seed);
    case TrainRegime::drift:
      return sample_drift(dist, n, spec.schedule, seed);
    case TrainRegime::iid:
    default:
      return sample_iid(dist, n, seed);
  }
}

double pick_bandwidth(const TrainSpec& spec, long n, double beta, int d) {
  if (spec.regime == TrainRegime::mixing)
    return theory_bandwidth(n, beta, d, spec.chain.implied());
  return theory_bandwidth(n, beta, d);
}

double deviation_probability(const SyntheticDistribution& dist,
                             const TrainSpec& train, long n, int class_index,
                             std::span<const double> x, double delta,
                             int replicates, std::uint64_t seed) {
  if (class_index < 1 || class_index > dist.m)
    throw std::invalid_argument("class index out of range");
  if (!(delta > 0.0)) throw std::invalid_argument("deviation level must be positive");
  if (replicates < 1) throw std::invalid_argument("need at least one replicate");
  double truth = eta_vector(dist, x)[class_index - 1];
  auto kernel = gaussian_kernel(dist.d);
  int misses = 0;
  for (int r = 0; r < replicates; ++r) {
    auto sample = draw_training(dist, train, n, seed ^ static_cast<std::uint64_t>(r));
    double h = pick_bandwidth(train, n, dist.beta, dist.d);
    auto model = fit(std::move(sample), dist.beta, h, kernel);
    double score = class_scores(model, x)[class_index - 1];
    if (std::abs(score - truth) > delta) ++misses;
  }
  return static_cast<double>(misses) / replicates;
}

double theoretical_exponent(double alpha, double beta, int d,
                            ExponentRegime regime, double c3) {
  if (!(alpha >= 0.0)) throw std::invalid_argument("alpha must be >= 0");
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  double base = beta * (1.0 + alpha) / (2.0 * beta + d);
  if (regime != ExponentRegime::mixing_raw_n) return base;
  if (!(c3 > 0.0))
    throw std::invalid_argument("raw-size mixing exponent needs c3 > 0");
  if (std::isinf(c3)) return base;
  return base * c3 / (c3 + 1.0);
}

RateRegime classify_regime(double alpha, double beta, int d, bool mixing,
                           double c3) {
  if (!(alpha >= 0.0)) throw std::invalid_argument("alpha must be >= 0");
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  double inv = 0.0;
  if (mixing) {
    if (!(c3 > 0.0)) throw std::invalid_argument("mixing classification needs c3 > 0");
    inv = std::isinf(c3) ? 0.0 : 1.0 / c3;
  }
  if ((alpha - 1.0 - 2.0 * inv) * beta > d * (1.0 + inv)) return RateRegime::super_fast;
  if (2.0 * (alpha - inv) * beta > (1.0 + inv) * d) return RateRegime::fast;
  return RateRegime::not_fast;
}

RateFit fit_rate(std::span<const double> ns, std::span<const double> risks) {
  if (ns.size() != risks.size())
    throw std::invalid_argument("size and risk arrays must match");
  std::vector<double> xs, ys;
  int dropped = 0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (!(ns[i] > 0.0)) throw std::invalid_argument("sizes must be positive");
    if (risks[i] > 0.0 && std::isfinite(risks[i])) {
      xs.push_back(std::log(ns[i]));
      ys.push_back(std::log(risks[i]));
    } else {
      ++dropped;
    }
  }
  if (xs.size() < 3)
    throw std::invalid_argument("rate fit needs at least 3 positive risk values");
  double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  RateFit fit;
  fit.points_used = static_cast<int>(xs.size());
  fit.points_dropped = dropped;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (syy > 0.0) {
    double ss_res = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
      ss_res += r * r;
    }
    fit.r_squared = 1.0 - ss_res / syy;
  } else {
    fit.r_squared = 1.0;  // nothing to explain
  }
  return fit;
}

ExperimentConfig parse_config(std::istream& in) {
  static const std::map<std::string, int> known = {
      {"regime", 0},  {"family", 0},     {"d", 0},      {"m", 0},
      {"alpha", 0},   {"beta", 0},       {"g0", 0},     {"rho", 0},
      {"amplitude", 0}, {"n_grid", 0},   {"replicates", 0},
      {"n_test", 0},  {"base_seed", 0},  {"output", 0}};
  std::map<std::string, std::string> seen;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line is not key = value: " + line);
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (known.find(key) == known.end())
      throw ConfigError("unknown config key '" + key + "'");
    if (value.empty()) throw ConfigError("config key '" + key + "' has no value");
    if (!seen.emplace(key, value).second)
      throw ConfigError("config key '" + key + "' appears twice");
  }

  auto has = [&](const std::string& key) { return seen.count(key) > 0; };
  auto require = [&](const std::string& key) -> const std::string& {
    auto it = seen.find(key);
    if (it == seen.end()) throw ConfigError("config key '" + key + "' is required");
    return it->second;
  };
  auto forbid = [&](const std::string& key, const std::string& why) {
    if (has(key)) throw ConfigError("config key '" + key + "' does not apply: " + why);
  };

  ExperimentConfig cfg;
  const std::string& regime = require("regime");
  if (regime == "iid") cfg.regime = TrainRegime::iid;
  else if (regime == "mixing") cfg.regime = TrainRegime::mixing;
  else if (regime == "drift") cfg.regime = TrainRegime::drift;
  else throw ConfigError("regime must be iid, mixing, or drift; got " + regime);

  const std::string& family = require("family");
  if (family == "crossing") cfg.family = Family::crossing;
  else if (family == "hard_margin") cfg.family = Family::hard_margin;
  else throw ConfigError("family must be crossing or hard_margin; got " + family);

  cfg.d = static_cast<int>(parse_long("d", require("d")));
  if (cfg.d < 1) throw ConfigError("config key 'd' must be >= 1");
  cfg.beta = parse_double("beta", require("beta"));
  if (!(cfg.beta > 0.0)) throw ConfigError("config key 'beta' must be positive");

  if (cfg.family == Family::crossing) {
    cfg.alpha = parse_double("alpha", require("alpha"));
    if (!(cfg.alpha > 0.0)) throw ConfigError("config key 'alpha' must be positive");
    forbid("m", "the crossing family fixes two classes");
    forbid("g0", "the crossing family has no margin floor");
  } else {
    cfg.m = static_cast<int>(parse_long("m", require("m")));
    if (cfg.m < 2) throw ConfigError("config key 'm' must be >= 2");
    cfg.g0 = parse_double("g0", require("g0"));
    if (!(cfg.g0 > 0.0 && cfg.g0 < 1.0))
      throw ConfigError("config key 'g0' must lie in (0,1)");
    forbid("alpha", "the floor family pins its own margin exponent");
  }

  if (cfg.regime == TrainRegime::mixing) {
    cfg.rho = parse_double("rho", require("rho"));
    if (!(cfg.rho >= 0.0 && cfg.rho < 1.0))
      throw ConfigError("config key 'rho' must lie in [0,1)");
    forbid("amplitude", "amplitude belongs to the drift regime");
  } else if (cfg.regime == TrainRegime::drift) {
    cfg.amplitude = parse_double("amplitude", require("amplitude"));
    if (!(cfg.amplitude >= 0.0))
      throw ConfigError("config key 'amplitude' must be >= 0");
    forbid("rho", "rho belongs to the mixing regime");
  } else {
    forbid("rho", "rho belongs to the mixing regime");
    forbid("amplitude", "amplitude belongs to the drift regime");
  }

  {
    const std::string& grid = require("n_grid");
    std::stringstream ss(grid);
    std::string piece;
    while (std::getline(ss, piece, ',')) {
      piece = trim(piece);
      if (piece.empty()) throw ConfigError("config key 'n_grid' has an empty entry");
      cfg.n_grid.push_back(parse_long("n_grid", piece));
    }
    if (cfg.n_grid.size() < 3)
      throw ConfigError("config key 'n_grid' needs at least 3 sizes to fit a rate");
    for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) {
      if (cfg.n_grid[i] < 1) throw ConfigError("config key 'n_grid' must be positive");
      if (i > 0 && cfg.n_grid[i] <= cfg.n_grid[i - 1])
        throw ConfigError("config key 'n_grid' must be strictly ascending");
    }
  }

  if (has("replicates")) {
    cfg.replicates = static_cast<int>(parse_long("replicates", seen["replicates"]));
    if (cfg.replicates < 1) throw ConfigError("config key 'replicates' must be >= 1");
  }
  if (has("n_test")) {
    cfg.n_test = parse_long("n_test", seen["n_test"]);
    if (cfg.n_test < 1) throw ConfigError("config key 'n_test' must be >= 1");
  }
  if (has("base_seed")) {
    const std::string& value = seen["base_seed"];
    try {
      std::size_t used = 0;
      cfg.base_seed = std::stoull(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::exception&) {
      throw ConfigError("config key 'base_seed' has a malformed integer: " + value);
    }
  }
  cfg.output = require("output");
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  return parse_config(in);
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  SyntheticDistribution dist;
  TrainSpec train;
  try {
    dist = config.family == Family::crossing
               ? make_crossing_distribution(config.d, config.alpha, config.beta)
               : make_hard_margin_distribution(config.d, config.m, config.g0,
                                               config.beta);
    if (config.regime == TrainRegime::mixing) {
      train.regime = TrainRegime::mixing;
      train.chain = MixingChainSpec{config.rho};
      train.chain.implied();
    } else if (config.regime == TrainRegime::drift) {
      train.regime = TrainRegime::drift;
      train.schedule = make_drift_schedule(dist, config.amplitude);
    }
  } catch (const std::invalid_argument& err) {
    throw ConfigError(err.what());
  }

  std::ofstream csv(config.output);
  if (!csv) throw std::runtime_error("cannot open output file " + config.output);
  csv << "n,n_e,replicate,oracle_excess,zero_one_excess,seed\n";

  ExperimentResult result;
  result.csv_path = config.output;
  result.summary_path = config.output + ".summary";
  bool mixing = config.regime == TrainRegime::mixing;
  MixingSpec mix_spec;
  if (mixing) mix_spec = train.chain.implied();
  auto kernel = gaussian_kernel(config.d);

  try {
    for (std::size_t gi = 0; gi < config.n_grid.size(); ++gi) {
      long n = config.n_grid[gi];
      for (int rep = 0; rep < config.replicates; ++rep) {
        std::uint64_t seed =
            config.base_seed ^ (static_cast<std::uint64_t>(gi) * 10007ull +
                                static_cast<std::uint64_t>(rep));
        auto sample = draw_training(dist, train, n, seed);
        double h = pick_bandwidth(train, n, config.beta, config.d);
        auto model = fit(std::move(sample), config.beta, h, kernel);
        auto risk = excess_risk_oracle(dist, model, config.n_test,
                                       seed ^ 0x9E3779B97F4A7C15ull);
        ExperimentRow row;
        row.n = n;
        row.n_e = mixing ? effective_sample_size(n, mix_spec) : n;
        row.replicate = rep;
        row.oracle_excess = risk.oracle_excess;
        row.zero_one_excess = risk.zero_one_excess;
        row.seed = seed;
        result.rows.push_back(row);
        char buf[200];
        std::snprintf(buf, sizeof buf, "%ld,%ld,%d,%.17g,%.17g,%llu\n", row.n,
                      row.n_e, row.replicate, row.oracle_excess,
                      row.zero_one_excess,
                      static_cast<unsigned long long>(row.seed));
        csv << buf;
        csv.flush();
      }
    }
  } catch (const std::exception& err) {
    csv << "# aborted: " << err.what() << '\n';
    csv.flush();
    throw;
  }

  std::vector<double> axis, raw_axis, means;
  for (std::size_t gi = 0; gi < config.n_grid.size(); ++gi) {
    double mean = 0.0;
    long n_e = 0;
    for (int rep = 0; rep < config.replicates; ++rep) {
      const auto& row = result.rows[gi * config.replicates + rep];
      mean += row.oracle_excess;
      n_e = row.n_e;
    }
    mean /= config.replicates;
    means.push_back(mean);
    axis.push_back(static_cast<double>(mixing ? n_e : config.n_grid[gi]));
    raw_axis.push_back(static_cast<double>(config.n_grid[gi]));
  }
  result.fit = fit_rate(axis, means);
  const char* regime_name = config.regime == TrainRegime::iid      ? "iid"
                            : config.regime == TrainRegime::mixing ? "mixing"
                                                                   : "drift";
  result.exponent = theoretical_exponent(
      dist.alpha, config.beta, config.d,
      mixing ? ExponentRegime::mixing_effective_n : ExponentRegime::drift_or_iid);
  if (mixing) {
    result.raw_fit = fit_rate(raw_axis, means);
    result.raw_exponent = theoretical_exponent(
        dist.alpha, config.beta, config.d, ExponentRegime::mixing_raw_n,
        mix_spec.c3);
  }

  std::ofstream summary(result.summary_path);
  if (!summary)
    throw std::runtime_error("cannot open summary file " + result.summary_path);
  summary << "# written " << timestamp_utc() << '\n';
  write_fit_record(summary, result.fit, result.exponent, regime_name,
                   mixing ? "effective_n" : "n");
  if (result.raw_fit)
    write_fit_record(summary, *result.raw_fit, *result.raw_exponent,
                     regime_name, "raw_n");
  return result;
}

}  // namespace ova
