#ifndef BMR_SIM_RUN_HPP
#define BMR_SIM_RUN_HPP

#include <cstddef>
#include <exception>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "bmr/sim/generate.hpp"
#include "bmr/util/parallel.hpp"

namespace bmr {

template <typename Result>
struct ReplicateOutcome {
  std::size_t replicate = 0;
  GroundTruth truth;
  std::optional<Result> result;
  std::string error;  // set when the fit threw

  bool ok() const { return result.has_value(); }
};

/// Generates every replicate of `cfg` and applies
/// fit(dataset, truth, replicate_index). A fit that throws is recorded as a
/// failed replicate; the others are unaffected. Replicates run on up to
/// `threads` workers, and results are in replicate order regardless.
template <typename FitFn>
auto run_scenario(const ScenarioConfig& cfg, FitFn&& fit, unsigned threads = 1) {
  using Result = std::decay_t<std::invoke_result_t<FitFn&, const MRDataset&, const GroundTruth&, std::size_t>>;
  cfg.validate();
  std::vector<ReplicateOutcome<Result>> out(cfg.replicates);
  parallel_for(cfg.replicates, threads, [&](std::size_t r) {
    auto& slot = out[r];
    slot.replicate = r;
    try {
      auto [data, truth] = generate_replicate(cfg, r);
      slot.truth = truth;
      slot.result = fit(data, slot.truth, r);
    } catch (const std::exception& e) {
      slot.error = e.what();
    } catch (...) {
      slot.error = "unknown error";
    }
  });
  return out;
}

}  // namespace bmr

#endif  // BMR_SIM_RUN_HPP
