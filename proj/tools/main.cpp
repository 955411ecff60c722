#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ova/classifier.hpp"
#include "ova/datagen.hpp"
#include "ova/experiments.hpp"
#include "ova/kernels.hpp"

namespace {

struct DistOpts {
  std::string family = "crossing";
  int d = 1;
  double alpha = 1.0;
  double beta = 2.0;
  int m = 3;
  double g0 = 0.3;
};

void add_dist_options(CLI::App* cmd, DistOpts& opts) {
  cmd->add_option("--family", opts.family, "crossing or hard_margin")
      ->check(CLI::IsMember({"crossing", "hard_margin"}));
  cmd->add_option("--d", opts.d, "ambient dimension");
  cmd->add_option("--alpha", opts.alpha, "margin exponent (crossing family)");
  cmd->add_option("--beta", opts.beta, "smoothness exponent");
  cmd->add_option("--m", opts.m, "class count (hard_margin family)");
  cmd->add_option("--g0", opts.g0, "margin floor (hard_margin family)");
}

ova::SyntheticDistribution build_dist(const DistOpts& opts) {
  if (opts.family == "crossing")
    return ova::make_crossing_distribution(opts.d, opts.alpha, opts.beta);
  return ova::make_hard_margin_distribution(opts.d, opts.m, opts.g0, opts.beta);
}

struct TrainOpts {
  std::string regime = "iid";
  double rho = 0.5;
  double amplitude = 0.2;
};

void add_train_options(CLI::App* cmd, TrainOpts& opts) {
  cmd->add_option("--regime", opts.regime, "iid, mixing, or drift")
      ->check(CLI::IsMember({"iid", "mixing", "drift"}));
  cmd->add_option("--rho", opts.rho, "hold probability (mixing regime)");
  cmd->add_option("--amplitude", opts.amplitude, "drift amplitude (drift regime)");
}

ova::TrainSpec build_train(const TrainOpts& opts,
                           const ova::SyntheticDistribution& dist) {
  ova::TrainSpec spec;
  if (opts.regime == "mixing") {
    spec.regime = ova::TrainRegime::mixing;
    spec.chain = ova::MixingChainSpec{opts.rho};
    spec.chain.implied();
  } else if (opts.regime == "drift") {
    spec.regime = ova::TrainRegime::drift;
    spec.schedule = ova::make_drift_schedule(dist, opts.amplitude);
  }
  return spec;
}

constexpr std::uint64_t kTestSeedSalt = 0x9E3779B97F4A7C15ull;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"one-vs-all plug-in classifier harness"};
  app.require_subcommand(1);

  auto* rate = app.add_subcommand("rate", "run a rate experiment from a config file");
  std::string config_path;
  rate->add_option("config", config_path, "experiment config file")->required();
  rate->callback([&] {
    auto config = ova::parse_config_file(config_path);
    auto result = ova::run_experiment(config);
    std::printf("rows=%zu csv=%s summary=%s\n", result.rows.size(),
                result.csv_path.c_str(), result.summary_path.c_str());
    std::printf("fitted_slope=%.6g r_squared=%.6g theoretical_exponent=%.6g\n",
                result.fit.slope, result.fit.r_squared, result.exponent);
    if (result.raw_fit)
      std::printf("raw_fitted_slope=%.6g raw_r_squared=%.6g raw_theoretical_exponent=%.6g\n",
                  result.raw_fit->slope, result.raw_fit->r_squared,
                  *result.raw_exponent);
  });

  auto* risk = app.add_subcommand("risk", "train one model and estimate its excess risk");
  DistOpts risk_dist;
  TrainOpts risk_train;
  long risk_n = 1024;
  long risk_n_test = 2000;
  std::uint64_t risk_seed = 1;
  double risk_bandwidth = 0.0;
  add_dist_options(risk, risk_dist);
  add_train_options(risk, risk_train);
  risk->add_option("--n", risk_n, "training size");
  risk->add_option("--n-test", risk_n_test, "test size");
  risk->add_option("--seed", risk_seed,
                   "training seed; the test draw uses seed xor 9e3779b97f4a7c15");
  risk->add_option("--bandwidth", risk_bandwidth,
                   "bandwidth override; 0 means the rate-optimal policy");
  risk->callback([&] {
    auto dist = build_dist(risk_dist);
    auto train = build_train(risk_train, dist);
    auto sample = ova::draw_training(dist, train, risk_n, risk_seed);
    double h = risk_bandwidth > 0.0
                   ? risk_bandwidth
                   : ova::pick_bandwidth(train, risk_n, dist.beta, dist.d);
    auto model = ova::fit(std::move(sample), dist.beta, h,
                          ova::gaussian_kernel(dist.d));
    auto est = ova::excess_risk_oracle(dist, model, risk_n_test,
                                       risk_seed ^ kTestSeedSalt);
    std::printf("n=%ld bandwidth=%.17g\n", risk_n, h);
    std::printf("oracle_excess=%.17g zero_one_excess=%.17g std_error=%.17g\n",
                est.oracle_excess, est.zero_one_excess, est.std_error);
  });

  auto* deviation = app.add_subcommand(
      "deviation", "probability that the class estimate at a point misses by more than delta");
  DistOpts dev_dist;
  TrainOpts dev_train;
  long dev_n = 1024;
  int dev_class = 1;
  std::vector<double> dev_x = {0.3};
  double dev_delta = 0.1;
  int dev_replicates = 100;
  std::uint64_t dev_seed = 1;
  add_dist_options(deviation, dev_dist);
  add_train_options(deviation, dev_train);
  deviation->add_option("--n", dev_n, "training size");
  deviation->add_option("--class", dev_class, "class index, 1-based");
  deviation->add_option("--x", dev_x, "evaluation point, comma separated")
      ->delimiter(',');
  deviation->add_option("--delta", dev_delta, "deviation level");
  deviation->add_option("--replicates", dev_replicates, "independent refits");
  deviation->add_option("--seed", dev_seed, "base seed; replicate r trains on seed xor r");
  deviation->callback([&] {
    auto dist = build_dist(dev_dist);
    auto train = build_train(dev_train, dist);
    double p = ova::deviation_probability(dist, train, dev_n, dev_class, dev_x,
                                          dev_delta, dev_replicates, dev_seed);
    std::printf("deviation_probability=%.17g n=%ld delta=%.17g replicates=%d\n",
                p, dev_n, dev_delta, dev_replicates);
  });

  auto* vk = app.add_subcommand("validate-kernel",
                                "check the smoothing kernel admissibility conditions");
  int vk_d = 1;
  double vk_beta = 2.0;
  double vk_tol = 1e-3;
  vk->add_option("--d", vk_d, "dimension");
  vk->add_option("--beta", vk_beta, "smoothness exponent");
  vk->add_option("--tolerance", vk_tol, "quadrature agreement tolerance");
  vk->callback([&] {
    auto kernel = ova::gaussian_kernel(vk_d);
    auto report = ova::validate_kernel(kernel, vk_beta, vk_d, vk_tol);
    std::printf("kernel=%s d=%d beta=%.17g\n", kernel.name.c_str(), vk_d, vk_beta);
    std::printf("lower_bound_holds=%d\n", report.lower_bound_holds ? 1 : 0);
    std::printf("integral=%.17g converged=%d integrates_to_one=%d\n",
                report.integral_value, report.integral_converged ? 1 : 0,
                report.integrates_to_one ? 1 : 0);
    std::printf("sup_condition=%.17g finite=%d\n", report.sup_condition_value,
                report.sup_condition_finite ? 1 : 0);
    std::printf("square_integral=%.17g finite=%d\n",
                report.square_integral_value,
                report.square_integral_finite ? 1 : 0);
    std::printf("valid=%s\n", report.valid() ? "yes" : "no");
  });

  auto* vd = app.add_subcommand("verify-dist",
                                "empirical margin and smoothness checks for a family");
  DistOpts vd_dist;
  long vd_probes = 100000;
  long vd_pairs = 2000;
  std::uint64_t vd_seed = 1;
  std::vector<double> vd_grid = {0.02, 0.05, 0.1, 0.2, 0.4};
  add_dist_options(vd, vd_dist);
  vd->add_option("--n-probe", vd_probes, "margin probe draws (>= 10000)");
  vd->add_option("--pairs", vd_pairs, "smoothness check pairs");
  vd->add_option("--seed", vd_seed, "probe seed");
  vd->add_option("--t-grid", vd_grid, "margin thresholds, comma separated")
      ->delimiter(',');
  vd->callback([&] {
    auto dist = build_dist(vd_dist);
    auto margin = ova::verify_margin(dist, vd_probes, vd_grid, vd_seed);
    std::printf("margin: alpha=%.17g c0=%.17g n_probe=%ld\n", dist.alpha,
                dist.margin_c0, margin.n_probe);
    for (std::size_t i = 0; i < margin.t_grid.size(); ++i)
      std::printf("  t=%.6g p_hat=%.6g bound=%.6g %s\n", margin.t_grid[i],
                  margin.p_hat[i], margin.bound[i],
                  margin.pass[i] ? "pass" : "FAIL");
    std::printf("margin_slope=%.6g margin_pass=%s\n", margin.fitted_slope,
                margin.all_pass ? "yes" : "no");
    auto holder = ova::verify_holder(dist, vd_pairs, vd_seed);
    std::printf("holder: constant=%.6g max_ratio=%.6g violations=%ld pass=%s\n",
                dist.holder_l, holder.max_ratio, holder.violations,
                holder.pass ? "yes" : "no");
  });

  auto* regime = app.add_subcommand("regime",
                                    "classify the excess-risk rate regime");
  double rg_alpha = 1.0;
  double rg_beta = 2.0;
  int rg_d = 1;
  bool rg_mixing = false;
  double rg_c3 = 1.0;
  regime->add_option("--alpha", rg_alpha, "margin exponent");
  regime->add_option("--beta", rg_beta, "smoothness exponent");
  regime->add_option("--d", rg_d, "dimension");
  regime->add_flag("--mixing", rg_mixing, "use the dependent-data conditions");
  regime->add_option("--c3", rg_c3, "mixing decay shape; inf reduces to iid");
  regime->callback([&] {
    auto r = ova::classify_regime(rg_alpha, rg_beta, rg_d, rg_mixing, rg_c3);
    const char* name = r == ova::RateRegime::super_fast ? "super_fast"
                       : r == ova::RateRegime::fast     ? "fast"
                                                        : "not_fast";
    double exponent = ova::theoretical_exponent(
        rg_alpha, rg_beta, rg_d, ova::ExponentRegime::drift_or_iid);
    std::printf("regime=%s exponent=%.17g\n", name, exponent);
    if (rg_mixing) {
      double raw = ova::theoretical_exponent(
          rg_alpha, rg_beta, rg_d, ova::ExponentRegime::mixing_raw_n, rg_c3);
      std::printf("raw_exponent=%.17g\n", raw);
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const ova::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
