#ifndef BMR_INIT_INITIALIZE_HPP
#define BMR_INIT_INITIALIZE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "bmr/core/model.hpp"
#include "bmr/init/jitter.hpp"
#include "bmr/init/map.hpp"
#include "bmr/init/variational.hpp"

namespace bmr {

enum class InitMethod { map, variational };

namespace detail {

inline double clamp_inside(double x, const Bounds& b) {
  const double pad = 1e-3 * b.half_width();
  return std::clamp(x, b.lower + pad, b.upper - pad);
}

}  // namespace detail

/// Starting point built from the data: exposure coefficients by least
/// squares on the instruments, residual spread split evenly between the
/// confounder loading and the idiosyncratic noise, no causal effect and no
/// pleiotropy. The loadings start away from zero because delta = 0 is a
/// stationary point of the likelihood.
inline Eigen::VectorXd default_start(const MRModel& model) {
  const SufficientStats& s = model.stats();
  const ModelConfig& cfg = model.config();
  const PriorBounds& b = cfg.bounds;
  const auto j = static_cast<Eigen::Index>(s.j());
  const double n = s.n();
  const Eigen::MatrixXd& g = s.gram();
  const Eigen::VectorXd& m = s.means();
  const Eigen::Index xi = s.x_index(), yi = s.y_index();

  ParameterSet p = ParameterSet::zeros(s.j(), s.interaction());
  const Eigen::MatrixXd gzz = g.block(1, 1, j, j);
  const Eigen::VectorXd gzx = g.block(1, xi, j, 1);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(gzz);
  Eigen::VectorXd alpha = ldlt.solve(gzx);
  if (ldlt.info() != Eigen::Success || !alpha.allFinite()) alpha.setZero();
  const double rx = std::max((g(xi, xi) - alpha.dot(gzx)) / n, 1e-8);
  const double ry = std::max(g(yi, yi) / n, 1e-8);

  p.alpha = alpha;
  p.omega_x = detail::clamp_inside(m[xi] - alpha.dot(m.segment(1, j)), b.omega_x);
  p.omega_y = detail::clamp_inside(m[yi], b.omega_y);
  p.theta = detail::clamp_inside(0.0, b.theta);
  p.mu_alpha = detail::clamp_inside(j > 0 ? alpha.mean() : 0.0, b.mu_alpha);
  const double sd_alpha = j > 1 ? std::sqrt((alpha.array() - alpha.mean()).square().sum() / (j - 1.0)) : 1.0;
  p.sigma_alpha = detail::clamp_inside(std::max(sd_alpha, 1e-3), b.sigma_alpha);
  p.delta_x = detail::clamp_inside(std::sqrt(rx / 2), b.delta_x);
  p.delta_y = detail::clamp_inside(std::sqrt(ry / 2), b.delta_y);
  p.sigma_x = detail::clamp_inside(std::sqrt(rx / 2), b.sigma_x);
  p.sigma_y = detail::clamp_inside(std::sqrt(ry / 2), b.sigma_y);
  p.gamma = cfg.global_scale_fixed.value_or(1.0);
  p.phi = Eigen::VectorXd::Constant(j, p.gamma);
  if (p.interaction) {
    p.interaction->psi_xw = detail::clamp_inside(0.0, b.psi_xw);
    p.interaction->psi_yw = detail::clamp_inside(0.0, b.psi_yw);
    p.interaction->psi_yxw = detail::clamp_inside(0.0, b.psi_yxw);
  }
  return to_unconstrained(p, cfg).values;
}

/// Posterior mode on the unconstrained coordinates, started at
/// default_start unless a start is given.
inline MapResult map_estimate(const MRModel& model, MapOptions opt = {}) {
  if (!opt.start) opt.start = default_start(model);
  return map_estimate(model, static_cast<Eigen::Index>(model.dimension()), opt);
}

/// Mean-field variational fit started from the MAP estimate.
inline VIResult mean_field_vi(const MRModel& model, unsigned iterations, std::uint64_t seed) {
  VIOptions opt;
  opt.iterations = iterations;
  opt.seed = seed;
  opt.start = map_estimate(model).state;
  return mean_field_vi(model, static_cast<Eigen::Index>(model.dimension()), opt);
}

/// Per-chain starting points: a center (MAP, or the variational mean) plus
/// independent jitter of SD jitter_scale, capped per coordinate at the
/// conditional posterior SD at the center.
inline std::vector<UnconstrainedState> initial_states(const MRModel& model, InitMethod method, unsigned chain_count,
                                                      std::uint64_t seed, double jitter_scale = 0.1) {
  Eigen::VectorXd center =
      method == InitMethod::map ? map_estimate(model).state : mean_field_vi(model, 2000, seed).mean;
  std::vector<UnconstrainedState> out;
  for (auto& x : local_jittered_inits(model, center, chain_count, seed, jitter_scale)) out.push_back({std::move(x)});
  return out;
}

}  // namespace bmr

#endif  // BMR_INIT_INITIALIZE_HPP
