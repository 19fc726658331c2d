#ifndef BMR_SAMPLER_HMC_HPP
#define BMR_SAMPLER_HMC_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bmr/core/errors.hpp"
#include "bmr/util/parallel.hpp"
#include "bmr/util/rng.hpp"

namespace bmr {

struct HMCConfig {
  unsigned chain_count = 4;
  unsigned warmup_draws = 1000;
  unsigned sampling_draws = 1000;
  double target_accept = 0.8;
  unsigned max_leapfrog_steps = 1024;
  std::uint64_t seed = 0;

  void validate() const {
    if (chain_count < 1 || warmup_draws < 1 || sampling_draws < 1 || max_leapfrog_steps < 1) {
      throw InputError("HMC counts must be at least 1");
    }
    if (!(target_accept > 0.0 && target_accept < 1.0)) {
      throw InputError("target_accept must lie in (0, 1)");
    }
  }
};

/// Energy error above which a transition is declared divergent.
inline constexpr double kDivergenceThreshold = 1000.0;

/// Position, momentum and cached log density / gradient at the position.
struct PhasePoint {
  Eigen::VectorXd q;
  Eigen::VectorXd p;
  Eigen::VectorXd grad;
  double log_density = 0.0;
};

inline double kinetic_energy(const Eigen::VectorXd& p, const Eigen::VectorXd& inv_metric) {
  return 0.5 * p.dot(inv_metric.cwiseProduct(p));
}

inline double hamiltonian(const PhasePoint& z, const Eigen::VectorXd& inv_metric) {
  return -z.log_density + kinetic_energy(z.p, inv_metric);
}

/// One velocity-Verlet step under the diagonal metric diag(1 / inv_metric).
/// `log_density(q, grad)` returns log pi(q) and writes its gradient.
template <typename LogDensity>
void leapfrog(PhasePoint& z, double step, const Eigen::VectorXd& inv_metric, const LogDensity& log_density) {
  z.p.noalias() += 0.5 * step * z.grad;
  z.q.noalias() += step * inv_metric.cwiseProduct(z.p);
  z.log_density = log_density(z.q, z.grad);
  z.p.noalias() += 0.5 * step * z.grad;
}

/// Nesterov dual averaging of log step size towards a target acceptance
/// rate (Hoffman & Gelman 2014).
class StepSizeAdapter {
 public:
  StepSizeAdapter(double initial_step, double target) : target_(target) { restart(initial_step); }

  void restart(double step) {
    mu_ = std::log(10.0 * step);
    log_step_ = std::log(step);
    log_step_bar_ = 0.0;
    h_bar_ = 0.0;
    counter_ = 0;
  }

  double learn(double accept_stat) {
    ++counter_;
    const double t = static_cast<double>(counter_);
    const double eta = 1.0 / (t + t0_);
    h_bar_ = (1.0 - eta) * h_bar_ + eta * (target_ - accept_stat);
    log_step_ = mu_ - std::sqrt(t) / gamma_ * h_bar_;
    const double w = std::pow(t, -kappa_);
    log_step_bar_ = w * log_step_ + (1.0 - w) * log_step_bar_;
    return std::exp(log_step_);
  }

  double current() const { return std::exp(log_step_); }
  double averaged() const { return std::exp(log_step_bar_); }

 private:
  double target_;
  double mu_ = 0.0;
  double log_step_ = 0.0;
  double log_step_bar_ = 0.0;
  double h_bar_ = 0.0;
  long counter_ = 0;
  static constexpr double gamma_ = 0.05;
  static constexpr double t0_ = 10.0;
  static constexpr double kappa_ = 0.75;
};

/// Welford accumulator for the diagonal metric.
class VarianceEstimator {
 public:
  explicit VarianceEstimator(Eigen::Index dim) : mean_(Eigen::VectorXd::Zero(dim)), m2_(Eigen::VectorXd::Zero(dim)) {}

  void add(const Eigen::VectorXd& x) {
    ++count_;
    Eigen::VectorXd delta = x - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta.cwiseProduct(x - mean_);
  }

  std::size_t count() const { return count_; }

  // Shrunk towards 1e-3 as in Stan, so short windows cannot collapse a scale.
  Eigen::VectorXd regularized_variance() const {
    const double n = static_cast<double>(count_);
    Eigen::VectorXd var = m2_ / (n - 1.0);
    return (n / (n + 5.0)) * var.array() + 1e-3 * (5.0 / (n + 5.0));
  }

  void reset() {
    count_ = 0;
    mean_.setZero();
    m2_.setZero();
  }

 private:
  std::size_t count_ = 0;
  Eigen::VectorXd mean_;
  Eigen::VectorXd m2_;
};

/// Warm-up schedule: an initial step-size-only buffer, a sequence of
/// doubling metric windows, and a terminal step-size buffer.
struct WarmupSchedule {
  unsigned init_buffer = 0;
  unsigned term_buffer = 0;
  std::vector<unsigned> window_ends;  // iteration index (exclusive) where each metric window closes

  static WarmupSchedule make(unsigned warmup) {
    WarmupSchedule s;
    if (warmup < 20) {
      return s;  // step size only
    }
    unsigned init = 75, term = 50, base = 25;
    if (warmup < init + term + base) {
      init = static_cast<unsigned>(0.15 * warmup);
      term = static_cast<unsigned>(0.1 * warmup);
      base = warmup - init - term;
    }
    s.init_buffer = init;
    s.term_buffer = term;
    const unsigned slow_end = warmup - term;
    unsigned start = init;
    unsigned size = base;
    while (start < slow_end) {
      unsigned end = start + size;
      // Stretch the last window if the next one would not fit.
      if (end + 2 * size > slow_end) end = slow_end;
      s.window_ends.push_back(end);
      start = end;
      size *= 2;
    }
    return s;
  }
};

/// Draws from a single chain after warm-up, on the sampler's coordinates.
struct ChainSamples {
  Eigen::MatrixXd draws;  // sampling_draws x dim (fewer rows if aborted)
  Eigen::VectorXd log_density;
  Eigen::VectorXd accept_stat;
  std::vector<std::uint8_t> divergent;
  std::vector<unsigned> leapfrog_steps;
  double step_size = 0.0;
  unsigned max_steps = 0;
  Eigen::VectorXd inv_metric;
  std::size_t divergent_count = 0;
  std::size_t warmup_divergent_count = 0;
  bool aborted = false;
};

namespace detail {

struct Transition {
  double accept_stat = 0.0;
  bool divergent = false;
  unsigned steps = 0;
};

template <typename LogDensity>
Transition hmc_transition(PhasePoint& current, double step, unsigned steps, const Eigen::VectorXd& inv_metric,
                          const LogDensity& f, Rng& rng) {
  std::normal_distribution<double> norm(0.0, 1.0);
  for (Eigen::Index k = 0; k < current.q.size(); ++k) current.p[k] = norm(rng) / std::sqrt(inv_metric[k]);
  const double h0 = hamiltonian(current, inv_metric);
  PhasePoint z = current;
  Transition t;
  t.steps = steps;
  for (unsigned s = 0; s < steps; ++s) {
    leapfrog(z, step, inv_metric, f);
    const double h = hamiltonian(z, inv_metric);
    if (!std::isfinite(h) || h - h0 > kDivergenceThreshold) {
      t.divergent = true;
      t.steps = s + 1;
      t.accept_stat = 0.0;
      return t;
    }
  }
  const double h1 = hamiltonian(z, inv_metric);
  const double log_ratio = h0 - h1;
  t.accept_stat = log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  if (unif(rng) < t.accept_stat) current = std::move(z);
  return t;
}

// Heuristic initial step: double or halve until a single step crosses 0.8
// acceptance.
template <typename LogDensity>
double initial_step_size(const PhasePoint& start, double step, const Eigen::VectorXd& inv_metric,
                         const LogDensity& f, Rng& rng) {
  std::normal_distribution<double> norm(0.0, 1.0);
  PhasePoint z0 = start;
  for (Eigen::Index k = 0; k < z0.q.size(); ++k) z0.p[k] = norm(rng) / std::sqrt(inv_metric[k]);
  const double h0 = hamiltonian(z0, inv_metric);
  auto log_accept = [&](double eps) {
    PhasePoint z = z0;
    leapfrog(z, eps, inv_metric, f);
    const double h = hamiltonian(z, inv_metric);
    return std::isfinite(h) ? h0 - h : -INFINITY;
  };
  const double log08 = std::log(0.8);
  const int direction = log_accept(step) > log08 ? 1 : -1;
  for (int i = 0; i < 100; ++i) {
    const double next = direction > 0 ? step * 2.0 : step * 0.5;
    const double la = log_accept(next);
    if (direction > 0 && !(la > log08)) break;
    step = next;
    if (direction < 0 && la > log08) break;
    if (step < 1e-12 || step > 1e6) break;
  }
  return step;
}

inline unsigned steps_for(double step, unsigned cap) {
  const double l = std::ceil(2.0 * std::numbers::pi / step);
  if (!(l >= 1.0)) return 1;
  return static_cast<unsigned>(std::min<double>(l, cap));
}

}  // namespace detail

/// Runs warm-up then sampling for one chain. The number of leapfrog steps
/// per transition is uniform on [1, L_max] with L_max * step ~ 2 pi, capped
/// at `max_leapfrog_steps`.
template <typename LogDensity>
ChainSamples sample_chain(const LogDensity& f, const Eigen::VectorXd& init, const HMCConfig& cfg,
                          std::uint64_t chain_seed) {
  const Eigen::Index dim = init.size();
  Rng rng(chain_seed);
  PhasePoint z;
  z.q = init;
  z.p = Eigen::VectorXd::Zero(dim);
  z.log_density = f(z.q, z.grad);
  if (!std::isfinite(z.log_density)) {
    throw InputError("initial state has non-finite log density");
  }
  Eigen::VectorXd inv_metric = Eigen::VectorXd::Ones(dim);
  double step = detail::initial_step_size(z, 1.0, inv_metric, f, rng);
  StepSizeAdapter adapter(step, cfg.target_accept);
  VarianceEstimator var(dim);
  const WarmupSchedule schedule = WarmupSchedule::make(cfg.warmup_draws);
  std::size_t window = 0;
  ChainSamples out;

  for (unsigned it = 0; it < cfg.warmup_draws; ++it) {
    std::uniform_int_distribution<unsigned> jitter(1, detail::steps_for(step, cfg.max_leapfrog_steps));
    detail::Transition t = detail::hmc_transition(z, step, jitter(rng), inv_metric, f, rng);
    if (t.divergent) ++out.warmup_divergent_count;
    step = adapter.learn(t.accept_stat);
    const bool in_window = window < schedule.window_ends.size() && it >= schedule.init_buffer;
    if (in_window) {
      var.add(z.q);
      if (it + 1 == schedule.window_ends[window]) {
        inv_metric = var.regularized_variance();
        var.reset();
        ++window;
        step = detail::initial_step_size(z, step, inv_metric, f, rng);
        adapter.restart(step);
      }
    }
  }
  step = adapter.averaged();
  const unsigned max_steps = detail::steps_for(step, cfg.max_leapfrog_steps);
  std::uniform_int_distribution<unsigned> jitter(1, max_steps);

  out.draws.resize(cfg.sampling_draws, dim);
  out.log_density.resize(cfg.sampling_draws);
  out.accept_stat.resize(cfg.sampling_draws);
  out.divergent.reserve(cfg.sampling_draws);
  out.leapfrog_steps.reserve(cfg.sampling_draws);
  const auto abort_after = static_cast<std::size_t>(0.1 * cfg.sampling_draws);
  unsigned kept = 0;
  for (unsigned it = 0; it < cfg.sampling_draws; ++it) {
    detail::Transition t = detail::hmc_transition(z, step, jitter(rng), inv_metric, f, rng);
    out.draws.row(kept) = z.q.transpose();
    out.log_density[kept] = z.log_density;
    out.accept_stat[kept] = t.accept_stat;
    out.divergent.push_back(t.divergent ? 1 : 0);
    out.leapfrog_steps.push_back(t.steps);
    ++kept;
    if (t.divergent && ++out.divergent_count > abort_after) {
      out.aborted = true;
      break;
    }
  }
  out.draws.conservativeResize(kept, dim);
  out.log_density.conservativeResize(kept);
  out.accept_stat.conservativeResize(kept);
  out.step_size = step;
  out.max_steps = max_steps;
  out.inv_metric = inv_metric;
  return out;
}

/// Independent chains, each with its own RNG stream derived from cfg.seed.
/// Output is identical for any thread count.
template <typename LogDensity>
std::vector<ChainSamples> sample_chains(const LogDensity& f, const std::vector<Eigen::VectorXd>& inits,
                                        const HMCConfig& cfg, unsigned threads = 1) {
  cfg.validate();
  if (inits.size() != cfg.chain_count) {
    throw InputError("need one initial state per chain (" + std::to_string(cfg.chain_count) + ")");
  }
  std::vector<ChainSamples> chains(cfg.chain_count);
  parallel_for(cfg.chain_count, threads, [&](std::size_t c) {
    chains[c] = sample_chain(f, inits[c], cfg, sub_seed(cfg.seed, {stream::kChain, c}));
  });
  return chains;
}

}  // namespace bmr

#endif  // BMR_SAMPLER_HMC_HPP
