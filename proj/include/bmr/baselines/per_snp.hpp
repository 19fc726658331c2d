#ifndef BMR_BASELINES_PER_SNP_HPP
#define BMR_BASELINES_PER_SNP_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "bmr/core/dataset.hpp"
#include "bmr/core/errors.hpp"

namespace bmr {

/// Simple least-squares fits of the exposure and of the outcome on each
/// instrument separately.
struct PerSNPStats {
  Eigen::VectorXd b_x, se_x;
  Eigen::VectorXd b_y, se_y;
  std::vector<bool> usable;  // false when the instrument has no variance

  std::size_t size() const { return usable.size(); }
};

namespace detail {

struct SlopeFit {
  double slope;
  double se;
};

// OLS of y on [1, z] given the centered instrument and its sum of squares.
inline SlopeFit simple_slope(const Eigen::VectorXd& zc, double szz, const Eigen::VectorXd& y) {
  const Eigen::VectorXd yc = y.array() - y.mean();
  const double slope = zc.dot(yc) / szz;
  const double rss = std::max(0.0, (yc - slope * zc).squaredNorm());
  const double n = static_cast<double>(y.size());
  return {slope, std::sqrt(rss / (n - 2.0) / szz)};
}

}  // namespace detail

inline PerSNPStats per_snp_regressions(const MRDataset& data) {
  data.validate();
  if (data.n() < 3) throw InputError("per-instrument regressions need at least 3 individuals");
  const auto j = static_cast<Eigen::Index>(data.j());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  PerSNPStats s;
  s.b_x = s.se_x = s.b_y = s.se_y = Eigen::VectorXd::Constant(j, nan);
  s.usable.assign(static_cast<std::size_t>(j), false);
  for (Eigen::Index k = 0; k < j; ++k) {
    const Eigen::VectorXd zc = data.genotypes.col(k).array() - data.genotypes.col(k).mean();
    const double szz = zc.squaredNorm();
    if (!(szz > 0.0)) continue;
    const auto fx = detail::simple_slope(zc, szz, data.exposure);
    const auto fy = detail::simple_slope(zc, szz, data.outcome);
    s.b_x[k] = fx.slope;
    s.se_x[k] = fx.se;
    s.b_y[k] = fy.slope;
    s.se_y[k] = fy.se;
    s.usable[static_cast<std::size_t>(k)] = true;
  }
  return s;
}

}  // namespace bmr

#endif  // BMR_BASELINES_PER_SNP_HPP
