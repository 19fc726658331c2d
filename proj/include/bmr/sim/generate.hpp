#ifndef BMR_SIM_GENERATE_HPP
#define BMR_SIM_GENERATE_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <utility>

#include <Eigen/Dense>

#include "bmr/sim/scenario.hpp"
#include "bmr/util/rng.hpp"

namespace bmr {

/// Allele doses under Hardy-Weinberg: individual doses ~ Binomial(2, p_j),
/// instruments independent.
inline Eigen::MatrixXd generate_genotypes(std::size_t n, const Eigen::VectorXd& allele_freq, Rng& rng) {
  const auto j = allele_freq.size();
  Eigen::MatrixXd z(static_cast<Eigen::Index>(n), j);
  for (Eigen::Index k = 0; k < j; ++k) {
    std::binomial_distribution<int> dose(2, allele_freq[k]);
    for (Eigen::Index i = 0; i < z.rows(); ++i) z(i, k) = dose(rng);
  }
  return z;
}

/// Minor-allele frequency p_j ~ Uniform(0.1, 0.5) per instrument, then doses.
inline Eigen::MatrixXd generate_genotypes(std::size_t n, std::size_t j, Rng& rng) {
  std::uniform_real_distribution<double> maf(0.1, 0.5);
  Eigen::VectorXd freq(static_cast<Eigen::Index>(j));
  for (auto& f : freq) f = maf(rng);
  return generate_genotypes(n, freq, rng);
}

inline Eigen::MatrixXd generate_genotypes(std::size_t n, std::size_t j, std::uint64_t seed) {
  Rng rng(seed);
  return generate_genotypes(n, j, rng);
}

/// One replicate of the simulation design. Variances as written:
///   delta_x ~ N(-0.05, 0.0025)    delta_y ~ N(-0.1, 0.0025)
///   omega_y ~ N(-3.7, 0.04)       omega_x = 3.3, sigma_x = sigma_y = 0.1
///   alpha_j ~ N(0.034, 0.0031)
///   beta_j  ~ N(0.012 xi, 0.0025) for the first `pleiotropic_count`, else 0
///   U_i ~ N(0, 1), then X and Y from the structural equations.
/// Every replicate has its own RNG streams, so replicate r does not depend
/// on how many others are generated.
inline std::pair<MRDataset, GroundTruth> generate_replicate(const ScenarioConfig& cfg, std::size_t replicate) {
  cfg.validate();
  Rng geno_rng = make_rng(cfg.seed, {stream::kGenotypes, replicate});
  Rng rng = make_rng(cfg.seed, {stream::kReplicate, replicate});
  std::normal_distribution<double> norm(0.0, 1.0);
  const std::size_t n = cfg.sample_size;
  const std::size_t j = cfg.instrument_count;
  const auto jj = static_cast<Eigen::Index>(j);

  GroundTruth truth;
  ParameterSet& p = truth.params;
  p = ParameterSet::zeros(j, cfg.interaction.has_value());
  p.delta_x = -0.05 + 0.05 * norm(rng);
  p.delta_y = -0.1 + 0.05 * norm(rng);
  p.omega_y = -3.7 + 0.2 * norm(rng);
  p.omega_x = 3.3;
  p.sigma_x = 0.1;
  p.sigma_y = 0.1;
  p.theta = cfg.theta_true;
  const double alpha_sd = std::sqrt(0.0031);
  for (Eigen::Index k = 0; k < jj; ++k) p.alpha[k] = 0.034 + alpha_sd * norm(rng);
  for (std::size_t k = 0; k < cfg.pleiotropic_count; ++k) {
    p.beta[static_cast<Eigen::Index>(k)] = 0.012 * xi(cfg.pleiotropy) + 0.05 * norm(rng);
    truth.pleiotropic.push_back(k);
  }
  if (cfg.interaction) {
    p.interaction = Interaction{cfg.interaction->psi_xw, cfg.interaction->psi_yw, cfg.interaction->psi_yxw};
  }

  MRDataset d;
  d.genotypes = generate_genotypes(n, j, geno_rng);
  const auto nn = static_cast<Eigen::Index>(n);
  d.exposure.resize(nn);
  d.outcome.resize(nn);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(nn);
  if (cfg.interaction) {
    std::bernoulli_distribution coin(cfg.interaction->covariate_rate);
    for (Eigen::Index i = 0; i < nn; ++i) w[i] = coin(rng) ? 1.0 : 0.0;
  }
  const Eigen::VectorXd za = d.genotypes * p.alpha;
  const Eigen::VectorXd zb = d.genotypes * p.beta;
  const Interaction in = p.interaction.value_or(Interaction{});
  for (Eigen::Index i = 0; i < nn; ++i) {
    const double u = norm(rng);
    const double x = p.omega_x + za[i] + in.psi_xw * w[i] + p.delta_x * u + p.sigma_x * norm(rng);
    const double y = p.omega_y + p.theta * x + in.psi_yxw * x * w[i] + zb[i] + in.psi_yw * w[i] + p.delta_y * u +
                     p.sigma_y * norm(rng);
    d.exposure[i] = x;
    d.outcome[i] = y;
  }
  if (cfg.interaction) d.covariate = w;
  return {std::move(d), std::move(truth)};
}

}  // namespace bmr

#endif  // BMR_SIM_GENERATE_HPP
