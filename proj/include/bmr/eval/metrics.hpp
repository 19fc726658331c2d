#ifndef BMR_EVAL_METRICS_HPP
#define BMR_EVAL_METRICS_HPP

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "bmr/core/errors.hpp"
#include "bmr/sampler/draw_store.hpp"

namespace bmr {

/// Point estimate and interval of one method on one replicate.
struct IntervalEstimate {
  double estimate = 0.0;
  double low = 0.0;
  double high = 0.0;
};

/// Fraction of intervals containing `truth`, endpoints included.
inline double coverage(const std::vector<IntervalEstimate>& results, double truth) {
  if (results.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::size_t hit = 0;
  for (const auto& r : results) hit += (r.low <= truth && truth <= r.high) ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(results.size());
}

/// Fraction of intervals lying entirely above zero (lower bound > 0).
inline double power(const std::vector<IntervalEstimate>& results) {
  if (results.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::size_t hit = 0;
  for (const auto& r : results) hit += r.low > 0.0 ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(results.size());
}

inline double bias(const std::vector<IntervalEstimate>& results, double truth) {
  if (results.empty()) return std::numeric_limits<double>::quiet_NaN();
  double sum = 0.0;
  for (const auto& r : results) sum += r.estimate - truth;
  return sum / static_cast<double>(results.size());
}

/// Posterior-mean shrinkage weights of one replicate split by the
/// generating pleiotropy status.
struct ShrinkageGroups {
  Eigen::VectorXd kappa_mean;  // per instrument
  std::vector<bool> pleiotropic;
  double mean_pleiotropic = std::numeric_limits<double>::quiet_NaN();
  double mean_non_pleiotropic = std::numeric_limits<double>::quiet_NaN();

  bool separated() const { return mean_non_pleiotropic > mean_pleiotropic; }
};

inline ShrinkageGroups shrinkage_separation(const Eigen::VectorXd& kappa_mean,
                                            const std::vector<std::size_t>& pleiotropic) {
  ShrinkageGroups g;
  g.kappa_mean = kappa_mean;
  g.pleiotropic.assign(static_cast<std::size_t>(kappa_mean.size()), false);
  for (std::size_t k : pleiotropic) {
    if (k >= g.pleiotropic.size()) throw InputError("pleiotropic index out of range");
    g.pleiotropic[k] = true;
  }
  double sp = 0.0, sn = 0.0;
  std::size_t np = 0, nn = 0;
  for (std::size_t k = 0; k < g.pleiotropic.size(); ++k) {
    const double v = kappa_mean[static_cast<Eigen::Index>(k)];
    if (g.pleiotropic[k]) {
      sp += v;
      ++np;
    } else {
      sn += v;
      ++nn;
    }
  }
  if (np > 0) g.mean_pleiotropic = sp / static_cast<double>(np);
  if (nn > 0) g.mean_non_pleiotropic = sn / static_cast<double>(nn);
  return g;
}

/// Posterior mean of each kappa_j over the chains that completed.
inline Eigen::VectorXd posterior_mean_kappa(const DrawStore& draws) {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(draws.instrument_count()));
  double count = 0.0;
  for (const auto& c : draws.chains()) {
    if (c.aborted) continue;
    sum += c.kappa.colwise().sum().transpose();
    count += static_cast<double>(c.size());
  }
  if (count == 0.0) return Eigen::VectorXd::Constant(sum.size(), std::numeric_limits<double>::quiet_NaN());
  return sum / count;
}

inline ShrinkageGroups shrinkage_separation(const DrawStore& draws, const std::vector<std::size_t>& pleiotropic) {
  return shrinkage_separation(posterior_mean_kappa(draws), pleiotropic);
}

/// Fraction of replicates whose non-pleiotropic group mean exceeds the
/// pleiotropic one.
inline double separation_rate(const std::vector<ShrinkageGroups>& groups) {
  if (groups.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::size_t hit = 0;
  for (const auto& g : groups) hit += g.separated() ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(groups.size());
}

}  // namespace bmr

#endif  // BMR_EVAL_METRICS_HPP
