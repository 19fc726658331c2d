#ifndef BMR_INIT_VARIATIONAL_HPP
#define BMR_INIT_VARIATIONAL_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "bmr/init/map.hpp"
#include "bmr/util/rng.hpp"

namespace bmr {

struct VIOptions {
  unsigned iterations = 2000;
  unsigned mc_samples = 8;
  unsigned patience = 100;  // steps without a new best ELBO before the rate is halved
  double learning_rate = 0.05;
  std::uint64_t seed = 0;
  std::optional<Eigen::VectorXd> start;
};

struct VIResult {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;
  double best_elbo = -std::numeric_limits<double>::infinity();
  std::vector<double> best_elbo_trace;  // running best after each step
  unsigned iterations = 0;
  bool fell_back = false;  // true when the MAP estimate was returned instead
};

/// Mean-field Gaussian approximation q(x) = prod N(mu_k, exp(omega_k)^2)
/// fitted by stochastic ascent (Adam) on the evidence lower bound with
/// reparameterized gradients x = mu + exp(omega) * eps, eps drawn in
/// antithetic pairs.
///
/// Progress is judged on an exponentially smoothed ELBO estimate. Each time
/// `patience` consecutive steps fail to improve the best smoothed ELBO the
/// learning rate is halved; after four halvings the optimization stops and
/// returns the smoothed iterate. If no step ever improves on the starting
/// ELBO, the result falls back to map_estimate.
template <typename LogDensity>
VIResult mean_field_vi(const LogDensity& f, Eigen::Index dim, const VIOptions& opt = {}) {
  Rng rng(sub_seed(opt.seed, {stream::kVariational}));
  std::normal_distribution<double> norm(0.0, 1.0);
  Eigen::VectorXd mu = opt.start ? *opt.start : Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd omega = Eigen::VectorXd::Constant(dim, std::log(0.1));
  Eigen::VectorXd m1 = Eigen::VectorXd::Zero(2 * dim), m2 = Eigen::VectorXd::Zero(2 * dim);
  const double b1 = 0.9, b2 = 0.999;

  VIResult r;
  r.mean = mu;
  r.scale = omega.array().exp();
  double initial_elbo = std::numeric_limits<double>::quiet_NaN();
  const double smooth = 0.98;
  double elbo_avg = 0.0;
  Eigen::VectorXd mu_avg = mu, omega_avg = omega;
  bool improved = false;
  unsigned since_best = 0;
  unsigned halvings = 0;
  double rate = opt.learning_rate;
  Eigen::VectorXd eps(dim), x(dim), g;
  for (unsigned it = 0; it < opt.iterations; ++it) {
    Eigen::VectorXd g_mu = Eigen::VectorXd::Zero(dim), g_omega = Eigen::VectorXd::Zero(dim);
    double elbo = 0.0;
    bool finite = true;
    const Eigen::VectorXd sd = omega.array().exp();
    for (unsigned s = 0; s < opt.mc_samples; ++s) {
      if (s % 2 == 0) {
        for (Eigen::Index k = 0; k < dim; ++k) eps[k] = norm(rng);
      } else {
        eps = -eps;  // antithetic partner
      }
      x = mu + sd.cwiseProduct(eps);
      const double lp = f(x, g);
      if (!std::isfinite(lp)) {
        finite = false;
        break;
      }
      elbo += lp;
      g_mu += g;
      g_omega += g.cwiseProduct(eps).cwiseProduct(sd);
    }
    const double inv_s = 1.0 / opt.mc_samples;
    if (finite) {
      elbo = elbo * inv_s + omega.sum();  // entropy up to a constant
      g_mu *= inv_s;
      g_omega = g_omega * inv_s + Eigen::VectorXd::Ones(dim);
    } else {
      elbo = -std::numeric_limits<double>::infinity();
    }

    if (it == 0 || !std::isfinite(elbo_avg)) {
      elbo_avg = elbo;
      mu_avg = mu;
      omega_avg = omega;
    } else {
      elbo_avg = smooth * elbo_avg + (1 - smooth) * elbo;
      mu_avg = smooth * mu_avg + (1 - smooth) * mu;
      omega_avg = smooth * omega_avg + (1 - smooth) * omega;
    }
    if (it == 0) initial_elbo = elbo;
    if (elbo_avg > r.best_elbo) {
      if (it > 0 && elbo_avg > initial_elbo) improved = true;
      r.best_elbo = elbo_avg;
      r.mean = mu_avg;
      r.scale = omega_avg.array().exp();
      since_best = 0;
    } else if (++since_best >= opt.patience) {
      if (halvings < 4) {
        ++halvings;
        rate *= 0.5;
        since_best = 0;
      } else {
        r.best_elbo_trace.push_back(r.best_elbo);
        r.iterations = it + 1;
        break;
      }
    }
    r.best_elbo_trace.push_back(r.best_elbo);
    r.iterations = it + 1;
    if (!finite) {
      // Pull the scales in and retry from the same mean.
      omega.array() -= 0.5;
      continue;
    }

    Eigen::VectorXd grad(2 * dim);
    grad << g_mu, g_omega;
    m1 = b1 * m1 + (1 - b1) * grad;
    m2 = b2 * m2 + (1 - b2) * grad.cwiseAbs2();
    const double t = static_cast<double>(it + 1);
    const double lr = rate * std::sqrt(1 - std::pow(b2, t)) / (1 - std::pow(b1, t));
    Eigen::VectorXd update = lr * m1.array() / (m2.array().sqrt() + 1e-8);
    mu += update.head(dim);
    omega += update.tail(dim);
  }

  if (improved && std::isfinite(elbo_avg) && mu_avg.allFinite()) {
    r.mean = mu_avg;
    r.scale = omega_avg.array().exp();
  }
  if (!improved || !std::isfinite(r.best_elbo)) {
    MapOptions mo;
    mo.start = opt.start;
    MapResult map = map_estimate(f, dim, mo);
    r.mean = map.state;
    r.scale = Eigen::VectorXd::Zero(dim);
    r.fell_back = true;
  }
  return r;
}

}  // namespace bmr

#endif  // BMR_INIT_VARIATIONAL_HPP
