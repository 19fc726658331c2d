#ifndef BMR_CORE_DERIVED_HPP
#define BMR_CORE_DERIVED_HPP

#include <Eigen/Dense>

#include "bmr/core/errors.hpp"
#include "bmr/core/parameters.hpp"

namespace bmr {

/// kappa_j = 1 / (1 + phi_j^2). Near 1: beta_j shrunk to zero; near 0: left free.
inline Eigen::VectorXd shrinkage_weights(const ParameterSet& p) {
  return (1.0 + p.phi.array().square()).inverse().matrix();
}

/// Causal effect in the W = 1 stratum of the interaction model.
inline double derived_theta_prime(const ParameterSet& p) {
  if (!p.interaction) throw InputError("theta' is only defined for the interaction model");
  return p.theta + p.interaction->psi_yxw;
}

}  // namespace bmr

#endif  // BMR_CORE_DERIVED_HPP
