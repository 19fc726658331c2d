#ifndef BMR_SIM_SCENARIO_HPP
#define BMR_SIM_SCENARIO_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bmr/core/dataset.hpp"
#include "bmr/core/errors.hpp"
#include "bmr/core/parameters.hpp"

namespace bmr {

enum class Pleiotropy { balanced, negative, positive };

/// Sign multiplier of the mean pleiotropic effect.
inline double xi(Pleiotropy p) {
  switch (p) {
    case Pleiotropy::negative: return -1.0;
    case Pleiotropy::positive: return 1.0;
    default: return 0.0;
  }
}

inline std::string to_string(Pleiotropy p) {
  switch (p) {
    case Pleiotropy::negative: return "negative";
    case Pleiotropy::positive: return "positive";
    default: return "balanced";
  }
}

inline Pleiotropy parse_pleiotropy(const std::string& s) {
  if (s == "balanced") return Pleiotropy::balanced;
  if (s == "negative") return Pleiotropy::negative;
  if (s == "positive") return Pleiotropy::positive;
  throw InputError("unknown pleiotropy type: " + s);
}

/// Generating values for a covariate-by-exposure interaction. Not part of
/// the published simulation design; used to check recovery of the
/// interaction model.
struct InteractionTruth {
  double psi_xw = 0.05;
  double psi_yw = 0.1;
  double psi_yxw = -0.14;
  double covariate_rate = 0.5;  // P(W = 1)
};

struct ScenarioConfig {
  std::string scenario_id = "1";
  Pleiotropy pleiotropy = Pleiotropy::balanced;
  std::size_t sample_size = 520;
  double theta_true = 0.0;
  std::size_t instrument_count = 20;
  std::size_t pleiotropic_count = 10;
  std::size_t replicates = 100;
  std::uint64_t seed = 0;
  std::optional<InteractionTruth> interaction;

  void validate() const {
    if (sample_size < 2) throw InputError("sample_size must be at least 2");
    if (instrument_count < 1) throw InputError("instrument_count must be at least 1");
    if (pleiotropic_count > instrument_count) {
      throw InputError("pleiotropic_count cannot exceed instrument_count");
    }
  }
};

/// Parameter values drawn for one replicate. Only the structural
/// parameters are meaningful; prior scales are left at zero.
struct GroundTruth {
  ParameterSet params;
  std::vector<std::size_t> pleiotropic;  // 0-based instrument indices
};

}  // namespace bmr

#endif  // BMR_SIM_SCENARIO_HPP
