#ifndef BMR_CORE_DATASET_HPP
#define BMR_CORE_DATASET_HPP

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "bmr/core/errors.hpp"

namespace bmr {

/// Individual-level data: N individuals, J instruments (allele doses),
/// a continuous exposure X, a continuous outcome Y and an optional binary
/// covariate W.
struct MRDataset {
  Eigen::MatrixXd genotypes;  // n x j, entries in {0, 1, 2}
  Eigen::VectorXd exposure;   // X
  Eigen::VectorXd outcome;    // Y
  std::optional<Eigen::VectorXd> covariate;  // W in {0, 1}

  std::size_t n() const { return static_cast<std::size_t>(genotypes.rows()); }
  std::size_t j() const { return static_cast<std::size_t>(genotypes.cols()); }
  bool has_covariate() const { return covariate.has_value(); }

  /// Throws InputError naming the first offending row/column (1-based).
  void validate() const {
    if (genotypes.cols() < 1) throw InputError("dataset needs at least one instrument");
    if (genotypes.rows() < 2) throw InputError("dataset needs at least two individuals");
    const auto rows = genotypes.rows();
    if (exposure.size() != rows || outcome.size() != rows) {
      throw InputError("exposure/outcome length does not match genotype rows");
    }
    if (covariate && covariate->size() != rows) {
      throw InputError("covariate length does not match genotype rows");
    }
    for (Eigen::Index i = 0; i < rows; ++i) {
      const std::string where = "row " + std::to_string(i + 1);
      for (Eigen::Index c = 0; c < genotypes.cols(); ++c) {
        double g = genotypes(i, c);
        if (!(g == 0.0 || g == 1.0 || g == 2.0)) {
          throw InputError("genotype not in {0,1,2} at " + where + ", column z" +
                           std::to_string(c + 1));
        }
      }
      if (!std::isfinite(exposure[i])) throw InputError("non-finite exposure at " + where);
      if (!std::isfinite(outcome[i])) throw InputError("non-finite outcome at " + where);
      if (covariate) {
        double w = (*covariate)[i];
        if (!(w == 0.0 || w == 1.0)) throw InputError("covariate not in {0,1} at " + where);
      }
    }
  }
};

}  // namespace bmr

#endif  // BMR_CORE_DATASET_HPP
