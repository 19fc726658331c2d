#ifndef BMR_INIT_MAP_HPP
#define BMR_INIT_MAP_HPP

#include <cmath>
#include <cstddef>
#include <deque>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace bmr {

class InitializationError : public std::runtime_error {
 public:
  explicit InitializationError(const std::string& what) : std::runtime_error(what) {}
};

struct MapOptions {
  unsigned max_iterations = 500;
  double gradient_tolerance = 1e-4;
  std::optional<Eigen::VectorXd> start;  // defaults to the origin
  std::vector<bool> frozen;              // coordinates held at their start value
  unsigned history = 10;                 // L-BFGS memory
};

struct MapResult {
  Eigen::VectorXd state;
  double log_density = -std::numeric_limits<double>::infinity();
  double gradient_norm = std::numeric_limits<double>::infinity();
  unsigned iterations = 0;
  bool converged = false;
  std::vector<double> trace;  // objective after each accepted step
};

/// Local maximizer of a log density by ascent with Armijo backtracking.
/// Search directions come from a limited-memory BFGS model of the inverse
/// Hessian; when that direction is not an ascent direction the plain
/// gradient is used. Accepted steps never decrease the objective.
template <typename LogDensity>
MapResult map_estimate(const LogDensity& f, Eigen::Index dim, const MapOptions& opt = {}) {
  Eigen::VectorXd x = opt.start ? *opt.start : Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd mask = Eigen::VectorXd::Ones(dim);
  for (std::size_t k = 0; k < opt.frozen.size() && k < static_cast<std::size_t>(dim); ++k) {
    if (opt.frozen[k]) mask[static_cast<Eigen::Index>(k)] = 0.0;
  }
  Eigen::VectorXd g;
  double fx = f(x, g);
  if (!std::isfinite(fx)) throw InitializationError("log density is not finite at the starting point");
  g = g.cwiseProduct(mask);

  MapResult r;
  std::deque<Eigen::VectorXd> s_hist, y_hist;
  for (r.iterations = 0; r.iterations < opt.max_iterations; ++r.iterations) {
    r.gradient_norm = g.norm();
    if (r.gradient_norm < opt.gradient_tolerance) {
      r.converged = true;
      break;
    }
    // Two-loop recursion on the negated objective.
    Eigen::VectorXd q = -g;
    const std::size_t m = s_hist.size();
    std::vector<double> a(m);
    for (std::size_t i = m; i-- > 0;) {
      const double rho = 1.0 / y_hist[i].dot(s_hist[i]);
      a[i] = rho * s_hist[i].dot(q);
      q -= a[i] * y_hist[i];
    }
    if (m > 0) q *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    for (std::size_t i = 0; i < m; ++i) {
      const double rho = 1.0 / y_hist[i].dot(s_hist[i]);
      const double b = rho * y_hist[i].dot(q);
      q += (a[i] - b) * s_hist[i];
    }
    Eigen::VectorXd dir = (-q).cwiseProduct(mask);
    double slope = g.dot(dir);
    if (!(slope > 0.0) || !dir.allFinite()) {
      dir = g;
      slope = g.squaredNorm();
      s_hist.clear();
      y_hist.clear();
    }
    double t = m == 0 ? std::min(1.0, 1.0 / dir.norm()) : 1.0;
    Eigen::VectorXd x_new, g_new;
    double f_new = -std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int halving = 0; halving < 60; ++halving) {
      x_new = x + t * dir;
      f_new = f(x_new, g_new);
      if (std::isfinite(f_new) && f_new >= fx + 1e-4 * t * slope) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      if (s_hist.empty()) break;  // even the gradient step fails: stuck
      s_hist.clear();
      y_hist.clear();
      continue;
    }
    g_new = g_new.cwiseProduct(mask);
    Eigen::VectorXd s = x_new - x;
    Eigen::VectorXd y = g - g_new;  // gradient change of the negated objective
    if (s.dot(y) > 1e-12 * s.norm() * y.norm()) {
      s_hist.push_back(s);
      y_hist.push_back(y);
      if (s_hist.size() > opt.history) {
        s_hist.pop_front();
        y_hist.pop_front();
      }
    }
    x = std::move(x_new);
    g = std::move(g_new);
    fx = f_new;
    r.trace.push_back(fx);
  }
  r.gradient_norm = g.norm();
  if (r.gradient_norm < opt.gradient_tolerance) r.converged = true;
  r.state = x;
  r.log_density = fx;
  return r;
}

}  // namespace bmr

#endif  // BMR_INIT_MAP_HPP
