#ifndef BMR_SAMPLER_SUMMARY_HPP
#define BMR_SAMPLER_SUMMARY_HPP

#include <cmath>
#include <string>
#include <vector>

#include "bmr/sampler/diagnostics.hpp"
#include "bmr/sampler/draw_store.hpp"

namespace bmr {

struct QuantitySummary {
  std::string name;
  double mean = 0.0;
  double sd = 0.0;
  double low = 0.0;
  double high = 0.0;
  double rhat = NAN;
  double ess = NAN;
};

inline QuantitySummary summarize(const std::string& name, const std::vector<std::vector<double>>& chains,
                                 double mass = 0.95) {
  QuantitySummary s;
  s.name = name;
  std::vector<double> all;
  for (const auto& c : chains) all.insert(all.end(), c.begin(), c.end());
  if (all.empty()) {
    s.mean = s.sd = s.low = s.high = NAN;
    return s;
  }
  double sum = 0.0;
  for (double v : all) sum += v;
  s.mean = sum / static_cast<double>(all.size());
  double ss = 0.0;
  for (double v : all) ss += (v - s.mean) * (v - s.mean);
  s.sd = all.size() > 1 ? std::sqrt(ss / static_cast<double>(all.size() - 1)) : 0.0;
  std::tie(s.low, s.high) = credible_interval(all, mass);
  if (chains.size() >= 2 && chains.front().size() >= 4) {
    s.rhat = split_rhat(chains);
    s.ess = effective_sample_size(chains);
  }
  return s;
}

inline QuantitySummary summarize(const DrawStore& store, const std::string& name, double mass = 0.95) {
  return summarize(name, store.per_chain(name), mass);
}

}  // namespace bmr

#endif  // BMR_SAMPLER_SUMMARY_HPP
