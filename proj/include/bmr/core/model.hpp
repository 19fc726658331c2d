#ifndef BMR_CORE_MODEL_HPP
#define BMR_CORE_MODEL_HPP

#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>

#include <Eigen/Dense>

#include "bmr/core/dataset.hpp"
#include "bmr/core/derived.hpp"
#include "bmr/core/likelihood.hpp"
#include "bmr/core/model_config.hpp"
#include "bmr/core/parameters.hpp"
#include "bmr/core/prior.hpp"
#include "bmr/core/transform.hpp"

namespace bmr {

/// Log-posterior on the unconstrained space, bound to one dataset.
/// Immutable after construction; safe to evaluate from many threads.
class MRModel {
 public:
  MRModel(const MRDataset& data, ModelConfig config)
      : config_(std::move(config)), stats_((config_.validate(), data), config_.interaction_enabled) {}

  std::size_t instrument_count() const { return stats_.j(); }
  std::size_t dimension() const { return layout().dimension(); }
  UnconstrainedLayout layout() const { return UnconstrainedLayout(stats_.j(), config_); }
  const ModelConfig& config() const { return config_; }
  const SufficientStats& stats() const { return stats_; }

  ConstrainedPoint constrain(const Eigen::VectorXd& u) const {
    return to_constrained(UnconstrainedState{u}, stats_.j(), config_);
  }

  /// log p(D | params) + log p(params) + log |J|, with gradient. Returns -inf
  /// and a zero gradient outside the prior support or where the density is
  /// not finite.
  double log_posterior(const Eigen::VectorXd& u, Eigen::VectorXd& grad) const {
    const double neg_inf = -std::numeric_limits<double>::infinity();
    ConstrainedPoint point = constrain(u);
    const ParameterSet& p = point.params;
    if (!within_prior_support(p, config_)) {
      grad.setZero(u.size());
      return neg_inf;
    }
    ParameterSet g;
    const double ll = log_likelihood(p, stats_, &g);
    const double lp = log_prior(p, config_, &g);
    const double value = ll + lp + point.log_jacobian;
    if (!std::isfinite(value)) {
      grad.setZero(u.size());
      return neg_inf;
    }
    grad = pull_back_gradient(UnconstrainedState{u}, point, g, config_);
    if (!grad.allFinite()) {
      grad.setZero(u.size());
      return neg_inf;
    }
    return value;
  }

  double log_posterior(const Eigen::VectorXd& u) const {
    Eigen::VectorXd g;
    return log_posterior(u, g);
  }

  double operator()(const Eigen::VectorXd& u, Eigen::VectorXd& grad) const { return log_posterior(u, grad); }

 private:
  ModelConfig config_;
  SufficientStats stats_;
};

inline std::pair<double, Eigen::VectorXd> log_posterior_and_gradient(const UnconstrainedState& state,
                                                                     const MRDataset& data,
                                                                     const ModelConfig& config) {
  MRModel model(data, config);
  Eigen::VectorXd grad;
  double value = model.log_posterior(state.values, grad);
  return {value, grad};
}

}  // namespace bmr

#endif  // BMR_CORE_MODEL_HPP
