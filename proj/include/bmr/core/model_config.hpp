#ifndef BMR_CORE_MODEL_CONFIG_HPP
#define BMR_CORE_MODEL_CONFIG_HPP

#include <cmath>
#include <optional>
#include <string>

#include "bmr/core/errors.hpp"

namespace bmr {

struct Bounds {
  double lower;
  double upper;

  bool contains(double x) const { return x > lower && x < upper; }
  double mid() const { return 0.5 * (lower + upper); }
  double half_width() const { return 0.5 * (upper - lower); }
};

/// Support of the flat priors. Location parameters are mapped to the real
/// line through a scaled tanh (logit-style) transform; scale parameters go
/// through the log map and are truncated to these bounds.
struct PriorBounds {
  Bounds omega_x{-50.0, 50.0};
  Bounds omega_y{-50.0, 50.0};
  Bounds theta{-50.0, 50.0};
  Bounds mu_alpha{-50.0, 50.0};
  Bounds delta_x{-50.0, 50.0};
  Bounds delta_y{-50.0, 50.0};
  Bounds psi_xw{-50.0, 50.0};
  Bounds psi_yw{-50.0, 50.0};
  Bounds psi_yxw{-50.0, 50.0};
  Bounds sigma_x{1e-6, 50.0};
  Bounds sigma_y{1e-6, 50.0};
  Bounds sigma_alpha{1e-6, 50.0};
};

struct ModelConfig {
  bool interaction_enabled = false;
  PriorBounds bounds;
  /// When set, the global shrinkage scale is held at this value and its
  /// half-Cauchy hyperprior is dropped.
  std::optional<double> global_scale_fixed;

  void validate() const {
    auto check = [](const Bounds& b, const char* name, bool scale) {
      if (!(std::isfinite(b.lower) && std::isfinite(b.upper) && b.lower < b.upper)) {
        throw InputError(std::string("invalid bounds for ") + name);
      }
      if (scale && b.lower < 0.0) {
        throw InputError(std::string("scale bound must be non-negative: ") + name);
      }
    };
    check(bounds.omega_x, "omega_x", false);
    check(bounds.omega_y, "omega_y", false);
    check(bounds.theta, "theta", false);
    check(bounds.mu_alpha, "mu_alpha", false);
    check(bounds.delta_x, "delta_x", false);
    check(bounds.delta_y, "delta_y", false);
    check(bounds.psi_xw, "psi_xw", false);
    check(bounds.psi_yw, "psi_yw", false);
    check(bounds.psi_yxw, "psi_yxw", false);
    check(bounds.sigma_x, "sigma_x", true);
    check(bounds.sigma_y, "sigma_y", true);
    check(bounds.sigma_alpha, "sigma_alpha", true);
    if (global_scale_fixed && !(*global_scale_fixed > 0.0 && std::isfinite(*global_scale_fixed))) {
      throw InputError("global_scale_fixed must be a positive finite number");
    }
  }
};

}  // namespace bmr

#endif  // BMR_CORE_MODEL_CONFIG_HPP
