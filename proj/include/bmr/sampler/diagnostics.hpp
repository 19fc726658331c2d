#ifndef BMR_SAMPLER_DIAGNOSTICS_HPP
#define BMR_SAMPLER_DIAGNOSTICS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace bmr {

namespace detail {

inline double mean_of(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

inline double sample_variance(std::span<const double> x) {
  const double m = mean_of(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

inline void check_chains(const std::vector<std::vector<double>>& chains) {
  if (chains.size() < 2) throw std::invalid_argument("diagnostics need at least 2 chains");
  const std::size_t n = chains.front().size();
  if (n < 4) throw std::invalid_argument("diagnostics need at least 4 draws per chain");
  for (const auto& c : chains) {
    if (c.size() != n) throw std::invalid_argument("chains must have equal length");
  }
}

}  // namespace detail

/// Split potential scale reduction factor. Each chain is cut into halves
/// (middle draw dropped for odd lengths), then
///   R = sqrt(((n - 1) / n * W + B / n) / W).
/// Returns +inf when the within-chain variance is zero but chains differ,
/// and NaN when the quantity is constant everywhere (undefined).
inline double split_rhat(const std::vector<std::vector<double>>& chains) {
  detail::check_chains(chains);
  const std::size_t half = chains.front().size() / 2;
  std::vector<std::span<const double>> parts;
  for (const auto& c : chains) {
    parts.emplace_back(c.data(), half);
    parts.emplace_back(c.data() + c.size() - half, half);
  }
  const double n = static_cast<double>(half);
  double w = 0.0;
  std::vector<double> means;
  for (auto p : parts) {
    w += detail::sample_variance(p);
    means.push_back(detail::mean_of(p));
  }
  w /= static_cast<double>(parts.size());
  const double b_over_n = detail::sample_variance(means);
  if (w == 0.0) {
    return b_over_n > 0.0 ? std::numeric_limits<double>::infinity() : std::numeric_limits<double>::quiet_NaN();
  }
  const double var_plus = (n - 1.0) / n * w + b_over_n;
  return std::sqrt(var_plus / w);
}

/// Multi-chain effective sample size. Autocorrelations are combined across
/// chains through the between/within variance estimate, then summed in
/// adjacent pairs (Geyer's initial positive sequence) until the first
/// negative pair; the pair sums are made monotone before summing.
inline double effective_sample_size(const std::vector<std::vector<double>>& chains) {
  detail::check_chains(chains);
  const std::size_t m = chains.size();
  const std::size_t n = chains.front().size();
  std::vector<double> means(m), variances(m);
  for (std::size_t c = 0; c < m; ++c) {
    means[c] = detail::mean_of(chains[c]);
    variances[c] = detail::sample_variance(chains[c]);
  }
  const double w = detail::mean_of(variances);
  const double nd = static_cast<double>(n);
  double var_plus = w * (nd - 1.0) / nd;
  if (m > 1) var_plus += detail::sample_variance(means);
  if (!(var_plus > 0.0)) return std::numeric_limits<double>::quiet_NaN();

  // Mean over chains of the biased lag-t autocovariance.
  auto mean_autocov = [&](std::size_t lag) {
    double total = 0.0;
    for (std::size_t c = 0; c < m; ++c) {
      const auto& x = chains[c];
      double s = 0.0;
      for (std::size_t i = 0; i + lag < n; ++i) s += (x[i] - means[c]) * (x[i + lag] - means[c]);
      total += s / nd;
    }
    return total / static_cast<double>(m);
  };
  auto rho = [&](std::size_t lag) { return 1.0 - (w - mean_autocov(lag)) / var_plus; };

  // rho_0 = 1 by construction of the chain variance; use the exact value.
  double sum_pairs = 0.0;
  double last_pair = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t + 1 < n; t += 2) {
    const double r0 = t == 0 ? 1.0 : rho(t);
    const double pair = r0 + rho(t + 1);
    if (pair < 0.0) break;
    const double monotone = std::min(pair, last_pair);
    sum_pairs += monotone;
    last_pair = monotone;
  }
  const double tau = -1.0 + 2.0 * sum_pairs;
  return static_cast<double>(m * n) / tau;
}

/// Empirical quantile, Hazen rule: position h = n p + 1/2 (1-based),
/// linear interpolation, clamped to the sample range.
inline double quantile(std::vector<double> x, double p) {
  if (x.empty()) throw std::invalid_argument("quantile of empty sample");
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  const double h = std::clamp(n * p + 0.5, 1.0, n);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const double frac = h - static_cast<double>(lo);
  if (lo >= x.size()) return x.back();
  return x[lo - 1] + frac * (x[lo] - x[lo - 1]);
}

/// Equal-tailed interval holding `mass` of the draws.
inline std::pair<double, double> credible_interval(const std::vector<double>& draws, double mass) {
  if (!(mass > 0.0 && mass < 1.0)) throw std::invalid_argument("interval mass must lie in (0, 1)");
  const double tail = 0.5 * (1.0 - mass);
  return {quantile(draws, tail), quantile(draws, 1.0 - tail)};
}

}  // namespace bmr

#endif  // BMR_SAMPLER_DIAGNOSTICS_HPP
