#ifndef BMR_CORE_PARAMETERS_HPP
#define BMR_CORE_PARAMETERS_HPP

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace bmr {

/// Covariate main effects and the exposure-by-covariate interaction.
struct Interaction {
  double psi_xw = 0.0;
  double psi_yw = 0.0;
  double psi_yxw = 0.0;
};

/// Full structural + latent parameter state of the model. Also used as the
/// container for gradients with respect to these parameters.
struct ParameterSet {
  double omega_x = 0.0;
  double omega_y = 0.0;
  double theta = 0.0;
  Eigen::VectorXd alpha;
  Eigen::VectorXd beta;
  double delta_x = 0.0;
  double delta_y = 0.0;
  double sigma_x = 1.0;
  double sigma_y = 1.0;
  Eigen::VectorXd phi;
  double gamma = 1.0;
  double mu_alpha = 0.0;
  double sigma_alpha = 1.0;
  std::optional<Interaction> interaction;

  static ParameterSet zeros(std::size_t j, bool with_interaction) {
    ParameterSet p;
    p.alpha = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(j));
    p.beta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(j));
    p.phi = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(j));
    p.sigma_x = p.sigma_y = p.sigma_alpha = p.gamma = 0.0;
    if (with_interaction) p.interaction = Interaction{};
    return p;
  }

  std::size_t instrument_count() const { return static_cast<std::size_t>(alpha.size()); }

  // Structural parametrization: residual variances and covariance of the
  // exposure and outcome equations after integrating out the confounder.
  double tau_x2() const { return delta_x * delta_x + sigma_x * sigma_x; }
  double tau_y2() const { return delta_y * delta_y + sigma_y * sigma_y; }
  double lambda() const { return delta_x * delta_y; }
};

/// Canonical flat ordering used by draw storage and CSV columns.
inline std::vector<std::string> parameter_names(std::size_t j, bool with_interaction) {
  std::vector<std::string> names = {"omega_x", "omega_y", "theta",   "mu_alpha",
                                    "sigma_alpha", "delta_x", "delta_y", "sigma_x",
                                    "sigma_y", "gamma"};
  if (with_interaction) {
    names.insert(names.end(), {"psi_xw", "psi_yw", "psi_yxw"});
  }
  for (const char* block : {"alpha", "beta", "phi"}) {
    for (std::size_t k = 1; k <= j; ++k) names.push_back(std::string(block) + std::to_string(k));
  }
  return names;
}

inline std::vector<double> flatten(const ParameterSet& p) {
  std::vector<double> out = {p.omega_x, p.omega_y, p.theta,   p.mu_alpha, p.sigma_alpha,
                             p.delta_x, p.delta_y, p.sigma_x, p.sigma_y,  p.gamma};
  if (p.interaction) {
    out.insert(out.end(), {p.interaction->psi_xw, p.interaction->psi_yw, p.interaction->psi_yxw});
  }
  for (const auto* v : {&p.alpha, &p.beta, &p.phi}) {
    out.insert(out.end(), v->data(), v->data() + v->size());
  }
  return out;
}

inline ParameterSet unflatten(const std::vector<double>& flat, std::size_t j, bool with_interaction) {
  const std::size_t expected = 10 + (with_interaction ? 3 : 0) + 3 * j;
  if (flat.size() != expected) {
    throw std::invalid_argument("unflatten: expected " + std::to_string(expected) +
                                " values, got " + std::to_string(flat.size()));
  }
  ParameterSet p;
  std::size_t k = 0;
  p.omega_x = flat[k++];
  p.omega_y = flat[k++];
  p.theta = flat[k++];
  p.mu_alpha = flat[k++];
  p.sigma_alpha = flat[k++];
  p.delta_x = flat[k++];
  p.delta_y = flat[k++];
  p.sigma_x = flat[k++];
  p.sigma_y = flat[k++];
  p.gamma = flat[k++];
  if (with_interaction) {
    Interaction in;
    in.psi_xw = flat[k++];
    in.psi_yw = flat[k++];
    in.psi_yxw = flat[k++];
    p.interaction = in;
  }
  const auto jj = static_cast<Eigen::Index>(j);
  p.alpha = Eigen::Map<const Eigen::VectorXd>(flat.data() + k, jj);
  k += j;
  p.beta = Eigen::Map<const Eigen::VectorXd>(flat.data() + k, jj);
  k += j;
  p.phi = Eigen::Map<const Eigen::VectorXd>(flat.data() + k, jj);
  return p;
}

}  // namespace bmr

#endif  // BMR_CORE_PARAMETERS_HPP
