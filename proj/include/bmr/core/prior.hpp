#ifndef BMR_CORE_PRIOR_HPP
#define BMR_CORE_PRIOR_HPP

#include <cmath>
#include <limits>
#include <numbers>

#include "bmr/core/model_config.hpp"
#include "bmr/core/parameters.hpp"

namespace bmr {

namespace detail {

inline constexpr double kHalfLog2Pi = 0.91893853320467274178;

inline double log_half_cauchy(double x, double scale) {
  const double r = x / scale;
  return std::log(2.0 / (std::numbers::pi * scale)) - std::log1p(r * r);
}

}  // namespace detail

/// True when every flat-prior parameter sits strictly inside its bounds.
inline bool within_prior_support(const ParameterSet& p, const ModelConfig& config) {
  const PriorBounds& b = config.bounds;
  bool ok = b.omega_x.contains(p.omega_x) && b.omega_y.contains(p.omega_y) &&
            b.theta.contains(p.theta) && b.mu_alpha.contains(p.mu_alpha) &&
            b.delta_x.contains(p.delta_x) && b.delta_y.contains(p.delta_y) &&
            b.sigma_x.contains(p.sigma_x) && b.sigma_y.contains(p.sigma_y) &&
            b.sigma_alpha.contains(p.sigma_alpha);
  if (p.interaction) {
    ok = ok && b.psi_xw.contains(p.interaction->psi_xw) && b.psi_yw.contains(p.interaction->psi_yw) &&
         b.psi_yxw.contains(p.interaction->psi_yxw);
  }
  return ok;
}

/// Log prior density:
///
///   beta_j | phi_j ~ N(0, phi_j^2)
///   phi_j | gamma  ~ half-Cauchy(0, gamma)
///   gamma          ~ half-Cauchy(0, 1)        (unless held fixed)
///   alpha_j        ~ N(mu_alpha, sigma_alpha^2)
///
/// plus flat densities (normalizing constants dropped) on all bounded
/// parameters. Returns -inf outside the bounds. When `grad` is non-null the
/// gradient is *added* to it.
inline double log_prior(const ParameterSet& p, const ModelConfig& config, ParameterSet* grad = nullptr) {
  if (!within_prior_support(p, config)) return -std::numeric_limits<double>::infinity();
  if (!(p.gamma > 0.0) || !(p.phi.array() > 0.0).all()) return -std::numeric_limits<double>::infinity();

  const auto j = p.alpha.size();
  const double gamma = p.gamma;
  double lp = 0.0;
  double d_gamma = 0.0;
  for (Eigen::Index k = 0; k < j; ++k) {
    const double phi = p.phi[k];
    const double z = p.beta[k] / phi;
    lp += -detail::kHalfLog2Pi - std::log(phi) - 0.5 * z * z;
    lp += detail::log_half_cauchy(phi, gamma);
    if (grad) {
      const double phi2 = phi * phi;
      const double g2 = gamma * gamma;
      grad->beta[k] += -z / phi;
      grad->phi[k] += -1.0 / phi + z * z / phi - 2.0 * phi / (g2 + phi2);
      d_gamma += -1.0 / gamma + 2.0 * phi2 / (gamma * (g2 + phi2));
    }
  }
  if (!config.global_scale_fixed) {
    lp += detail::log_half_cauchy(gamma, 1.0);
    d_gamma += -2.0 * gamma / (1.0 + gamma * gamma);
  }

  const double sa = p.sigma_alpha;
  const Eigen::ArrayXd dev = p.alpha.array() - p.mu_alpha;
  const double ss = dev.square().sum();
  lp += -static_cast<double>(j) * (detail::kHalfLog2Pi + std::log(sa)) - 0.5 * ss / (sa * sa);

  if (grad) {
    if (!config.global_scale_fixed) grad->gamma += d_gamma;
    grad->alpha.array() += -dev / (sa * sa);
    grad->mu_alpha += dev.sum() / (sa * sa);
    grad->sigma_alpha += -static_cast<double>(j) / sa + ss / (sa * sa * sa);
  }
  return lp;
}

}  // namespace bmr

#endif  // BMR_CORE_PRIOR_HPP
