#ifndef BMR_INIT_JITTER_HPP
#define BMR_INIT_JITTER_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "bmr/init/map.hpp"
#include "bmr/util/rng.hpp"

namespace bmr {

/// center + N(0, scale_k^2) per coordinate, one point per chain. A point
/// whose log density or gradient is not finite is redrawn, at most 20 times.
template <typename LogDensity>
std::vector<Eigen::VectorXd> jittered_inits(const LogDensity& f, const Eigen::VectorXd& center, unsigned chain_count,
                                            std::uint64_t seed, const Eigen::VectorXd& scale) {
  std::vector<Eigen::VectorXd> out;
  Eigen::VectorXd g;
  for (unsigned c = 0; c < chain_count; ++c) {
    Rng rng(sub_seed(seed, {stream::kJitter, c}));
    std::normal_distribution<double> norm(0.0, 1.0);
    bool ok = false;
    Eigen::VectorXd x(center.size());
    for (int attempt = 0; attempt <= 20 && !ok; ++attempt) {
      for (Eigen::Index k = 0; k < x.size(); ++k) x[k] = center[k] + scale[k] * norm(rng);
      ok = std::isfinite(f(x, g)) && g.allFinite();
    }
    if (!ok) throw InitializationError("could not find a finite starting point near the center");
    out.push_back(x);
  }
  return out;
}

template <typename LogDensity>
std::vector<Eigen::VectorXd> jittered_inits(const LogDensity& f, const Eigen::VectorXd& center, unsigned chain_count,
                                            std::uint64_t seed, double scale = 0.1) {
  return jittered_inits(f, center, chain_count, seed, Eigen::VectorXd::Constant(center.size(), scale));
}

/// Per-coordinate conditional posterior SD at x, 1 / sqrt(-d2 log pi / dx_k^2),
/// from central differences of the gradient. Coordinates where the density
/// is not locally concave get +inf.
template <typename LogDensity>
Eigen::VectorXd conditional_sd(const LogDensity& f, const Eigen::VectorXd& x, double h = 1e-5) {
  Eigen::VectorXd sd(x.size());
  Eigen::VectorXd gp, gm;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    Eigen::VectorXd xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    const double lp = f(xp, gp), lm = f(xm, gm);
    const double curv = (std::isfinite(lp) && std::isfinite(lm)) ? -(gp[k] - gm[k]) / (2.0 * h) : NAN;
    sd[k] = curv > 0.0 ? 1.0 / std::sqrt(curv) : INFINITY;
  }
  return sd;
}

/// Jitter of at most `scale` per coordinate, reduced to one conditional
/// posterior SD where the density is sharper than that.
template <typename LogDensity>
std::vector<Eigen::VectorXd> local_jittered_inits(const LogDensity& f, const Eigen::VectorXd& center,
                                                  unsigned chain_count, std::uint64_t seed, double scale = 0.1) {
  const Eigen::VectorXd sd = conditional_sd(f, center);
  return jittered_inits(f, center, chain_count, seed, sd.cwiseMin(scale));
}

}  // namespace bmr

#endif  // BMR_INIT_JITTER_HPP
