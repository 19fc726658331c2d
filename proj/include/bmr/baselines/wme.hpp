#ifndef BMR_BASELINES_WME_HPP
#define BMR_BASELINES_WME_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "bmr/baselines/per_snp.hpp"
#include "bmr/core/errors.hpp"
#include "bmr/sampler/diagnostics.hpp"
#include "bmr/util/parallel.hpp"
#include "bmr/util/rng.hpp"

namespace bmr {

/// Weighted median with percentile interpolation. Values are sorted with
/// their normalized weights w_k, each is placed at p_k = sum_{i<=k} w_i - w_k/2,
/// and the 0.5 point is interpolated linearly between its neighbours
/// (clamped to the extreme values outside [p_1, p_K]).
inline double weighted_median(const std::vector<double>& values, const std::vector<double>& weights) {
  if (values.empty() || values.size() != weights.size()) {
    throw InputError("weighted_median: values and weights must be non-empty and of equal length");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) throw InputError("weighted_median: weights must be positive and finite");
    total += w;
  }
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  std::vector<double> v(order.size()), p(order.size());
  double cum = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const double w = weights[order[k]] / total;
    cum += w;
    v[k] = values[order[k]];
    p[k] = cum - 0.5 * w;
  }
  if (0.5 <= p.front()) return v.front();
  if (0.5 >= p.back()) return v.back();
  std::size_t below = 0;
  while (p[below + 1] < 0.5) ++below;
  return v[below] + (v[below + 1] - v[below]) * (0.5 - p[below]) / (p[below + 1] - p[below]);
}

struct WMEResult {
  double estimate = 0.0;
  double low = 0.0;
  double high = 0.0;
  std::size_t instruments_used = 0;
  std::vector<std::string> warnings;
};

/// Weighted median of the per-instrument ratio estimates b_y / b_x with
/// first-order inverse-variance weights b_x^2 / se_y^2. The interval comes
/// from a parametric bootstrap: b_x and b_y are redrawn from normals at
/// their estimates and standard errors, the weighted median is recomputed
/// with the weights held fixed, and equal-tailed empirical quantiles are
/// taken. Bootstrap replicate b uses its own sub-seeded stream.
inline WMEResult wme_estimate(const PerSNPStats& stats, unsigned bootstrap_reps = 1000, double confidence_mass = 0.95,
                              std::uint64_t seed = 0, unsigned threads = 1) {
  if (!(confidence_mass > 0.0 && confidence_mass < 1.0)) throw InputError("confidence mass must lie in (0, 1)");
  if (bootstrap_reps < 1) throw InputError("bootstrap_reps must be at least 1");
  WMEResult out;
  std::vector<std::size_t> use;
  for (std::size_t k = 0; k < stats.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    const std::string id = "z" + std::to_string(k + 1);
    if (!stats.usable[k]) {
      out.warnings.push_back(id + " excluded: no genotype variance");
    } else if (!(std::abs(stats.b_x[i]) >= 1e-12)) {
      out.warnings.push_back(id + " excluded: exposure coefficient below 1e-12");
    } else if (!(stats.se_y[i] > 0.0)) {
      out.warnings.push_back(id + " excluded: zero outcome standard error");
    } else {
      use.push_back(k);
    }
  }
  if (use.size() < 3) {
    throw InputError("weighted median estimator needs at least 3 usable instruments, have " +
                     std::to_string(use.size()));
  }
  out.instruments_used = use.size();

  std::vector<double> ratio, weight;
  for (std::size_t k : use) {
    const auto i = static_cast<Eigen::Index>(k);
    ratio.push_back(stats.b_y[i] / stats.b_x[i]);
    weight.push_back(stats.b_x[i] * stats.b_x[i] / (stats.se_y[i] * stats.se_y[i]));
  }
  out.estimate = weighted_median(ratio, weight);

  std::vector<double> boot(bootstrap_reps);
  parallel_for(bootstrap_reps, threads, [&](std::size_t b) {
    Rng rng = make_rng(seed, {stream::kBootstrap, b});
    std::normal_distribution<double> norm(0.0, 1.0);
    std::vector<double> r(use.size());
    for (std::size_t m = 0; m < use.size(); ++m) {
      const auto i = static_cast<Eigen::Index>(use[m]);
      const double by = stats.b_y[i] + stats.se_y[i] * norm(rng);
      const double bx = stats.b_x[i] + stats.se_x[i] * norm(rng);
      r[m] = by / bx;
    }
    boot[b] = weighted_median(r, weight);
  });
  const double tail = 0.5 * (1.0 - confidence_mass);
  out.low = quantile(boot, tail);
  out.high = quantile(boot, 1.0 - tail);
  return out;
}

}  // namespace bmr

#endif  // BMR_BASELINES_WME_HPP
