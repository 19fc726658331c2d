#ifndef BMR_CORE_TRANSFORM_HPP
#define BMR_CORE_TRANSFORM_HPP

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "bmr/core/errors.hpp"
#include "bmr/core/model_config.hpp"
#include "bmr/core/parameters.hpp"

namespace bmr {

/// Point on the unconstrained real space on which HMC operates.
struct UnconstrainedState {
  Eigen::VectorXd values;
};

/// Coordinate map of the unconstrained vector.
///
///   [omega_x, omega_y, theta, mu_alpha, delta_x, delta_y, (psi_xw, psi_yw, psi_yxw)]
///       bounded, x = mid + half * tanh(u / half)  (unit slope at the midpoint)
///   [log sigma_x, log sigma_y, log sigma_alpha, (log gamma)]
///   alpha[J]                 identity
///   raw[J]                   beta_j = raw_j * phi_j          (non-centered)
///   log local[J]             phi_j = gamma * local_j
struct UnconstrainedLayout {
  std::size_t j = 0;
  bool interaction = false;
  bool gamma_free = true;

  static constexpr std::size_t kOmegaX = 0, kOmegaY = 1, kTheta = 2, kMuAlpha = 3,
                               kDeltaX = 4, kDeltaY = 5, kPsiXW = 6, kPsiYW = 7, kPsiYXW = 8;

  UnconstrainedLayout(std::size_t instruments, const ModelConfig& config)
      : j(instruments),
        interaction(config.interaction_enabled),
        gamma_free(!config.global_scale_fixed.has_value()) {}

  std::size_t bounded_count() const { return interaction ? 9 : 6; }
  std::size_t log_sigma_x() const { return bounded_count(); }
  std::size_t log_sigma_y() const { return bounded_count() + 1; }
  std::size_t log_sigma_alpha() const { return bounded_count() + 2; }
  std::size_t log_gamma() const { return bounded_count() + 3; }  // valid iff gamma_free
  std::size_t alpha() const { return bounded_count() + 3 + (gamma_free ? 1 : 0); }
  std::size_t raw() const { return alpha() + j; }
  std::size_t log_local() const { return raw() + j; }
  std::size_t dimension() const { return log_local() + j; }

  std::string name(std::size_t k) const {
    static const char* bounded[] = {"omega_x", "omega_y", "theta",  "mu_alpha", "delta_x",
                                    "delta_y", "psi_xw",  "psi_yw", "psi_yxw"};
    if (k < bounded_count()) return std::string("u_") + bounded[k];
    if (k == log_sigma_x()) return "log_sigma_x";
    if (k == log_sigma_y()) return "log_sigma_y";
    if (k == log_sigma_alpha()) return "log_sigma_alpha";
    if (gamma_free && k == log_gamma()) return "log_gamma";
    if (k < raw()) return "alpha" + std::to_string(k - alpha() + 1);
    if (k < log_local()) return "raw" + std::to_string(k - raw() + 1);
    return "log_local" + std::to_string(k - log_local() + 1);
  }
};

namespace detail {

inline const Bounds& bounded_slot(const PriorBounds& b, std::size_t k) {
  switch (k) {
    case 0: return b.omega_x;
    case 1: return b.omega_y;
    case 2: return b.theta;
    case 3: return b.mu_alpha;
    case 4: return b.delta_x;
    case 5: return b.delta_y;
    case 6: return b.psi_xw;
    case 7: return b.psi_yw;
    default: return b.psi_yxw;
  }
}

inline double* bounded_field(ParameterSet& p, std::size_t k) {
  switch (k) {
    case 0: return &p.omega_x;
    case 1: return &p.omega_y;
    case 2: return &p.theta;
    case 3: return &p.mu_alpha;
    case 4: return &p.delta_x;
    case 5: return &p.delta_y;
    case 6: return &p.interaction->psi_xw;
    case 7: return &p.interaction->psi_yw;
    default: return &p.interaction->psi_yxw;
  }
}

inline double bounded_field(const ParameterSet& p, std::size_t k) {
  return *bounded_field(const_cast<ParameterSet&>(p), k);
}

// log |dx/du| = log(1 - tanh^2(u / half)), written to stay finite for large |u|.
inline double bounded_log_jacobian(double u, const Bounds& b) {
  const double a = 2.0 * std::abs(u) / b.half_width();
  return 2.0 * std::numbers::ln2 - a - 2.0 * std::log1p(std::exp(-a));
}

}  // namespace detail

/// Bounded interval -> real line. Midpoint maps to 0 with unit slope, so
/// unconstrained distances near the middle match constrained ones.
inline double bounded_to_unconstrained(double x, const Bounds& b) {
  return b.half_width() * std::atanh((x - b.mid()) / b.half_width());
}

inline double bounded_to_constrained(double u, const Bounds& b) {
  return b.mid() + b.half_width() * std::tanh(u / b.half_width());
}

struct ConstrainedPoint {
  ParameterSet params;
  double log_jacobian = 0.0;
};

inline UnconstrainedState to_unconstrained(const ParameterSet& p, const ModelConfig& config) {
  const std::size_t j = p.instrument_count();
  if (config.interaction_enabled != p.interaction.has_value()) {
    throw InputError("to_unconstrained: interaction terms do not match configuration");
  }
  if (static_cast<std::size_t>(p.beta.size()) != j || static_cast<std::size_t>(p.phi.size()) != j) {
    throw InputError("to_unconstrained: inconsistent instrument count");
  }
  UnconstrainedLayout lay(j, config);
  Eigen::VectorXd u(static_cast<Eigen::Index>(lay.dimension()));
  for (std::size_t k = 0; k < lay.bounded_count(); ++k) {
    u[k] = bounded_to_unconstrained(detail::bounded_field(p, k), detail::bounded_slot(config.bounds, k));
  }
  u[lay.log_sigma_x()] = std::log(p.sigma_x);
  u[lay.log_sigma_y()] = std::log(p.sigma_y);
  u[lay.log_sigma_alpha()] = std::log(p.sigma_alpha);
  const double gamma = config.global_scale_fixed ? *config.global_scale_fixed : p.gamma;
  if (lay.gamma_free) u[lay.log_gamma()] = std::log(p.gamma);
  const auto jj = static_cast<Eigen::Index>(j);
  u.segment(lay.alpha(), jj) = p.alpha;
  u.segment(lay.raw(), jj) = p.beta.array() / p.phi.array();
  u.segment(lay.log_local(), jj) = (p.phi.array() / gamma).log();
  return {u};
}

inline ConstrainedPoint to_constrained(const UnconstrainedState& state, std::size_t j,
                                       const ModelConfig& config) {
  UnconstrainedLayout lay(j, config);
  const Eigen::VectorXd& u = state.values;
  if (static_cast<std::size_t>(u.size()) != lay.dimension()) {
    throw InputError("to_constrained: state has dimension " + std::to_string(u.size()) +
                     ", expected " + std::to_string(lay.dimension()));
  }
  ConstrainedPoint out;
  ParameterSet& p = out.params;
  if (lay.interaction) p.interaction = Interaction{};
  double log_jac = 0.0;
  for (std::size_t k = 0; k < lay.bounded_count(); ++k) {
    const Bounds& b = detail::bounded_slot(config.bounds, k);
    *detail::bounded_field(p, k) = bounded_to_constrained(u[k], b);
    log_jac += detail::bounded_log_jacobian(u[k], b);
  }
  p.sigma_x = std::exp(u[lay.log_sigma_x()]);
  p.sigma_y = std::exp(u[lay.log_sigma_y()]);
  p.sigma_alpha = std::exp(u[lay.log_sigma_alpha()]);
  log_jac += u[lay.log_sigma_x()] + u[lay.log_sigma_y()] + u[lay.log_sigma_alpha()];
  double log_gamma;
  if (lay.gamma_free) {
    log_gamma = u[lay.log_gamma()];
    log_jac += log_gamma;
  } else {
    log_gamma = std::log(*config.global_scale_fixed);
  }
  p.gamma = std::exp(log_gamma);
  const auto jj = static_cast<Eigen::Index>(j);
  p.alpha = u.segment(lay.alpha(), jj);
  Eigen::ArrayXd log_phi = u.segment(lay.log_local(), jj).array() + log_gamma;
  p.phi = log_phi.exp().matrix();
  p.beta = (u.segment(lay.raw(), jj).array() * p.phi.array()).matrix();
  // beta (w.r.t. raw) and phi (w.r.t. log local) each contribute prod(phi).
  log_jac += 2.0 * log_phi.sum();
  out.log_jacobian = log_jac;
  return out;
}

/// Chain rule: maps a gradient with respect to the constrained parameters
/// onto the unconstrained coordinates and adds the gradient of the log
/// Jacobian.
inline Eigen::VectorXd pull_back_gradient(const UnconstrainedState& state, const ConstrainedPoint& point,
                                          const ParameterSet& grad, const ModelConfig& config) {
  const ParameterSet& p = point.params;
  const std::size_t j = p.instrument_count();
  UnconstrainedLayout lay(j, config);
  const Eigen::VectorXd& u = state.values;
  Eigen::VectorXd g(static_cast<Eigen::Index>(lay.dimension()));
  for (std::size_t k = 0; k < lay.bounded_count(); ++k) {
    const Bounds& b = detail::bounded_slot(config.bounds, k);
    const double t = std::tanh(u[k] / b.half_width());
    g[k] = detail::bounded_field(grad, k) * (1.0 - t * t) - 2.0 * t / b.half_width();
  }
  g[lay.log_sigma_x()] = grad.sigma_x * p.sigma_x + 1.0;
  g[lay.log_sigma_y()] = grad.sigma_y * p.sigma_y + 1.0;
  g[lay.log_sigma_alpha()] = grad.sigma_alpha * p.sigma_alpha + 1.0;
  const auto jj = static_cast<Eigen::Index>(j);
  g.segment(lay.alpha(), jj) = grad.alpha;
  g.segment(lay.raw(), jj) = (grad.beta.array() * p.phi.array()).matrix();
  Eigen::ArrayXd via_local = grad.beta.array() * p.beta.array() + grad.phi.array() * p.phi.array();
  g.segment(lay.log_local(), jj) = (via_local + 2.0).matrix();
  if (lay.gamma_free) {
    g[lay.log_gamma()] = via_local.sum() + grad.gamma * p.gamma + 1.0 + 2.0 * static_cast<double>(j);
  }
  return g;
}

}  // namespace bmr

#endif  // BMR_CORE_TRANSFORM_HPP
