#ifndef BMR_FIT_HPP
#define BMR_FIT_HPP

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bmr/core/model.hpp"
#include "bmr/eval/metrics.hpp"
#include "bmr/init/initialize.hpp"
#include "bmr/sampler/draw_store.hpp"
#include "bmr/sampler/summary.hpp"
#include "bmr/util/rng.hpp"

namespace bmr {

struct FitOptions {
  ModelConfig model;
  HMCConfig hmc;
  InitMethod init = InitMethod::map;
  double jitter = 0.1;
  double interval_mass = 0.95;
  double rhat_threshold = 1.1;
  unsigned threads = 1;
};

/// Posterior fit of the Bayesian MR model with its headline summaries.
struct BayesFit {
  DrawStore draws;
  QuantitySummary theta;
  std::optional<QuantitySummary> psi_yxw;
  std::optional<QuantitySummary> theta_prime;
  Eigen::VectorXd kappa_mean;  // posterior mean shrinkage weight per instrument
  bool reliable = true;
  std::vector<std::string> problems;
};

inline BayesFit fit_bayes(const MRDataset& data, const FitOptions& opt) {
  MRModel model(data, opt.model);
  opt.hmc.validate();
  auto inits = initial_states(model, opt.init, opt.hmc.chain_count, sub_seed(opt.hmc.seed, {stream::kFit}), opt.jitter);
  BayesFit fit;
  fit.draws = run_chains(model, opt.hmc, inits, opt.threads);

  const DrawStore& d = fit.draws;
  fit.theta = summarize(d, "theta", opt.interval_mass);
  std::vector<QuantitySummary*> watched = {&fit.theta};
  if (d.interaction()) {
    fit.psi_yxw = summarize(d, "psi_yxw", opt.interval_mass);
    fit.theta_prime = summarize(d, "theta_prime", opt.interval_mass);
    watched.push_back(&*fit.psi_yxw);
    watched.push_back(&*fit.theta_prime);
  }
  fit.kappa_mean = posterior_mean_kappa(d);

  for (const auto& c : d.chains()) {
    if (c.aborted) {
      fit.reliable = false;
      fit.problems.push_back("chain aborted: more than 10% divergent transitions");
      break;
    }
  }
  for (const auto* q : watched) {
    if (std::isnan(q->rhat) || q->rhat > opt.rhat_threshold) {
      fit.reliable = false;
      fit.problems.push_back("R-hat for " + q->name + " is " + std::to_string(q->rhat));
    }
  }
  return fit;
}

}  // namespace bmr

#endif  // BMR_FIT_HPP
