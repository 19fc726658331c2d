#ifndef BMR_CORE_LIKELIHOOD_HPP
#define BMR_CORE_LIKELIHOOD_HPP

#include <cmath>
#include <cstddef>
#include <numbers>

#include <Eigen/Dense>

#include "bmr/core/dataset.hpp"
#include "bmr/core/errors.hpp"
#include "bmr/core/model_config.hpp"
#include "bmr/core/parameters.hpp"

namespace bmr {

/// Centered Gram matrix of the per-individual design row
///
///   v_i = [1, Z_i1 .. Z_iJ, X_i, Y_i (, W_i, X_i W_i)]
///
/// Every residual the model needs is linear in v_i, so sums of squared and
/// cross residuals are quadratic forms in this matrix. Columns other than
/// the intercept are centered at their sample means to avoid cancellation.
class SufficientStats {
 public:
  SufficientStats(const MRDataset& data, bool interaction) : j_(data.j()), interaction_(interaction) {
    data.validate();
    if (interaction != data.has_covariate()) {
      throw InputError(interaction ? "interaction model requires a covariate column"
                                   : "covariate supplied but interaction model disabled");
    }
    const auto n = static_cast<Eigen::Index>(data.n());
    const auto d = static_cast<Eigen::Index>(width());
    Eigen::MatrixXd v(n, d);
    v.col(0).setOnes();
    v.middleCols(1, static_cast<Eigen::Index>(j_)) = data.genotypes;
    v.col(x_index()) = data.exposure;
    v.col(y_index()) = data.outcome;
    if (interaction_) {
      v.col(w_index()) = *data.covariate;
      v.col(xw_index()) = data.exposure.cwiseProduct(*data.covariate);
    }
    means_ = v.colwise().mean().transpose();
    means_[0] = 0.0;
    v.rowwise() -= means_.transpose();
    gram_ = v.transpose() * v;
    n_ = static_cast<double>(n);
  }

  std::size_t j() const { return j_; }
  bool interaction() const { return interaction_; }
  double n() const { return n_; }
  std::size_t width() const { return j_ + 3 + (interaction_ ? 2 : 0); }
  Eigen::Index x_index() const { return static_cast<Eigen::Index>(j_) + 1; }
  Eigen::Index y_index() const { return static_cast<Eigen::Index>(j_) + 2; }
  Eigen::Index w_index() const { return static_cast<Eigen::Index>(j_) + 3; }
  Eigen::Index xw_index() const { return static_cast<Eigen::Index>(j_) + 4; }
  const Eigen::MatrixXd& gram() const { return gram_; }
  const Eigen::VectorXd& means() const { return means_; }

 private:
  std::size_t j_;
  bool interaction_;
  double n_ = 0.0;
  Eigen::VectorXd means_;
  Eigen::MatrixXd gram_;
};

namespace detail {

// Coefficients c with a_i = c . v_i (exposure residual) and b_i = c . v_i
// (outcome residual given X).
inline void residual_coefficients(const ParameterSet& p, const SufficientStats& s,
                                  Eigen::VectorXd& ca, Eigen::VectorXd& cb) {
  const auto d = static_cast<Eigen::Index>(s.width());
  const auto j = static_cast<Eigen::Index>(s.j());
  ca.setZero(d);
  cb.setZero(d);
  ca[0] = -p.omega_x;
  ca.segment(1, j) = -p.alpha;
  ca[s.x_index()] = 1.0;
  cb[0] = -p.omega_y;
  cb.segment(1, j) = -p.beta;
  cb[s.x_index()] = -p.theta;
  cb[s.y_index()] = 1.0;
  if (s.interaction()) {
    ca[s.w_index()] = -p.interaction->psi_xw;
    cb[s.w_index()] = -p.interaction->psi_yw;
    cb[s.xw_index()] = -p.interaction->psi_yxw;
  }
}

}  // namespace detail

/// Marginal log-likelihood of (X, Y) given Z (and W) with the confounder
/// integrated out:
///
///   a_i = X_i - omega_x - alpha.Z_i [- psi_xw W_i]
///   b_i = Y_i - omega_y - theta X_i - beta.Z_i [- psi_yw W_i - psi_yxw X_i W_i]
///   (a_i, b_i) ~ N2(0, [[tau_x^2, lambda], [lambda, tau_y^2]])
///
/// The map (X, Y) -> (a, b) is unit triangular, so no Jacobian term enters.
/// If `grad` is non-null it receives d/d(params); fields the likelihood
/// does not depend on are set to zero.
inline double log_likelihood(const ParameterSet& p, const SufficientStats& s, ParameterSet* grad = nullptr) {
  if (p.instrument_count() != s.j() || static_cast<std::size_t>(p.beta.size()) != s.j()) {
    throw InputError("log_likelihood: parameter/instrument count mismatch");
  }
  if (p.interaction.has_value() != s.interaction()) {
    throw InputError("log_likelihood: interaction terms do not match data model");
  }
  Eigen::VectorXd ca, cb;
  detail::residual_coefficients(p, s, ca, cb);
  // Shift intercept coefficients onto the centered design.
  ca[0] += ca.dot(s.means());
  cb[0] += cb.dot(s.means());
  const Eigen::VectorXd gca = s.gram() * ca;
  const Eigen::VectorXd gcb = s.gram() * cb;
  const double saa = ca.dot(gca);
  const double sab = ca.dot(gcb);
  const double sbb = cb.dot(gcb);

  const double tx2 = p.tau_x2();
  const double ty2 = p.tau_y2();
  const double lam = p.lambda();
  const double det = tx2 * ty2 - lam * lam;
  const double n = s.n();
  const double quad = ty2 * saa - 2.0 * lam * sab + tx2 * sbb;
  const double value = -n * std::log(2.0 * std::numbers::pi) - 0.5 * n * std::log(det) - quad / (2.0 * det);

  if (grad) {
    const auto j = static_cast<Eigen::Index>(s.j());
    const double d_saa = -ty2 / (2.0 * det);
    const double d_sbb = -tx2 / (2.0 * det);
    const double d_sab = lam / det;
    Eigen::VectorXd g_ca = 2.0 * d_saa * gca + d_sab * gcb;
    Eigen::VectorXd g_cb = 2.0 * d_sbb * gcb + d_sab * gca;
    // Undo the intercept shift: c'_0 = c_0 + c . m.
    g_ca += s.means() * g_ca[0];
    g_cb += s.means() * g_cb[0];

    const double det2 = det * det;
    const double d_tx2 = -0.5 * n * ty2 / det - sbb / (2.0 * det) + quad * ty2 / (2.0 * det2);
    const double d_ty2 = -0.5 * n * tx2 / det - saa / (2.0 * det) + quad * tx2 / (2.0 * det2);
    const double d_lam = n * lam / det + sab / det - quad * lam / det2;

    ParameterSet& g = *grad;
    g = ParameterSet::zeros(s.j(), s.interaction());
    g.omega_x = -g_ca[0];
    g.alpha = -g_ca.segment(1, j);
    g.omega_y = -g_cb[0];
    g.beta = -g_cb.segment(1, j);
    g.theta = -g_cb[s.x_index()];
    g.delta_x = 2.0 * p.delta_x * d_tx2 + p.delta_y * d_lam;
    g.delta_y = 2.0 * p.delta_y * d_ty2 + p.delta_x * d_lam;
    g.sigma_x = 2.0 * p.sigma_x * d_tx2;
    g.sigma_y = 2.0 * p.sigma_y * d_ty2;
    if (s.interaction()) {
      g.interaction->psi_xw = -g_ca[s.w_index()];
      g.interaction->psi_yw = -g_cb[s.w_index()];
      g.interaction->psi_yxw = -g_cb[s.xw_index()];
    }
  }
  return value;
}

inline double log_likelihood(const ParameterSet& params, const MRDataset& data, const ModelConfig& config) {
  SufficientStats stats(data, config.interaction_enabled);
  return log_likelihood(params, stats);
}

}  // namespace bmr

#endif  // BMR_CORE_LIKELIHOOD_HPP
