#ifndef BMR_CLI_CONFIG_HPP
#define BMR_CLI_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "bmr/core/errors.hpp"
#include "bmr/core/model_config.hpp"
#include "bmr/fit.hpp"
#include "bmr/sampler/hmc.hpp"
#include "bmr/sim/scenario.hpp"

namespace bmr::cli {

/// One row of a simulation study: a scenario generated under the null
/// (theta = 0) and under the alternative.
struct StudyScenario {
  ScenarioConfig scenario;  // theta_true and seed are set per hypothesis
  double theta_alternative = 0.35;
};

/// Everything a run needs, read from one JSON file.
///
///   {
///     "seed": 1,
///     "model":      {"interaction": false, "global_scale_fixed": null,
///                    "bounds": {"theta": [-50, 50], ...}},
///     "sampler":    {"chain_count": 4, "warmup_draws": 1000, "sampling_draws": 1000,
///                    "target_accept": 0.8, "max_leapfrog_steps": 1024},
///     "init":       {"method": "map", "jitter": 0.1},
///     "inference":  {"interval_mass": 0.95, "rhat_threshold": 1.1},
///     "wme":        {"bootstrap_reps": 1000, "confidence_mass": 0.95},
///     "simulation": {"export_replicates": false, "scenarios": [
///                     {"id": "1", "pleiotropy": "balanced", "sample_size": 520,
///                      "instrument_count": 20, "pleiotropic_count": 10,
///                      "replicates": 100, "theta_alternative": 0.35,
///                      "interaction": {"psi_xw": 0.05, "psi_yw": 0.1,
///                                      "psi_yxw": -0.14, "covariate_rate": 0.5}}]},
///     "paths":      {"dataset": "data.csv", "out": "results"}
///   }
///
/// Every section and key is optional; unknown keys are rejected.
struct RunConfig {
  std::uint64_t seed = 0;
  FitOptions fit;
  unsigned wme_bootstrap_reps = 1000;
  double wme_confidence_mass = 0.95;
  bool export_replicates = false;
  std::vector<StudyScenario> scenarios;
  std::optional<std::string> dataset_path;
  std::optional<std::string> out_path;

  void validate() const {
    fit.model.validate();
    fit.hmc.validate();
    if (fit.hmc.chain_count < 2) throw InputError("chain_count must be at least 2 for convergence diagnostics");
    if (fit.hmc.sampling_draws < 4) throw InputError("sampling_draws must be at least 4");
    if (!(fit.interval_mass > 0.0 && fit.interval_mass < 1.0)) throw InputError("interval_mass must lie in (0, 1)");
    if (!(fit.rhat_threshold > 1.0)) throw InputError("rhat_threshold must exceed 1");
    if (!(fit.jitter >= 0.0)) throw InputError("jitter must be non-negative");
    if (wme_bootstrap_reps < 1) throw InputError("bootstrap_reps must be at least 1");
    if (!(wme_confidence_mass > 0.0 && wme_confidence_mass < 1.0)) {
      throw InputError("confidence_mass must lie in (0, 1)");
    }
    std::set<std::string> ids;
    for (const auto& s : scenarios) {
      s.scenario.validate();
      if (!ids.insert(s.scenario.scenario_id).second) {
        throw InputError("duplicate scenario id '" + s.scenario.scenario_id + "'");
      }
      if (s.scenario.scenario_id.empty() || s.scenario.scenario_id.find_first_of(",\n\r") != std::string::npos) {
        throw InputError("scenario id must be non-empty and free of commas and line breaks");
      }
    }
  }
};

namespace detail {

using Json = nlohmann::json;

inline void only_keys(const Json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw InputError(where + " must be a JSON object");
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw InputError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read(const Json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InputError("invalid value for '" + std::string(key) + "' in " + where);
  }
}

template <typename T>
void read_unsigned(const Json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  const Json& v = obj.at(key);
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0)) {
    throw InputError("'" + std::string(key) + "' in " + where + " must be a non-negative integer");
  }
  out = v.get<T>();
}

inline void read_bounds(const Json& obj, PriorBounds& b) {
  only_keys(obj, "model.bounds",
            {"omega_x", "omega_y", "theta", "mu_alpha", "delta_x", "delta_y", "psi_xw", "psi_yw", "psi_yxw",
             "sigma_x", "sigma_y", "sigma_alpha"});
  auto slot = [&](const char* key, Bounds& out) {
    if (!obj.contains(key)) return;
    const Json& v = obj.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      throw InputError(std::string("model.bounds.") + key + " must be [lower, upper]");
    }
    out = Bounds{v[0].get<double>(), v[1].get<double>()};
  };
  slot("omega_x", b.omega_x);
  slot("omega_y", b.omega_y);
  slot("theta", b.theta);
  slot("mu_alpha", b.mu_alpha);
  slot("delta_x", b.delta_x);
  slot("delta_y", b.delta_y);
  slot("psi_xw", b.psi_xw);
  slot("psi_yw", b.psi_yw);
  slot("psi_yxw", b.psi_yxw);
  slot("sigma_x", b.sigma_x);
  slot("sigma_y", b.sigma_y);
  slot("sigma_alpha", b.sigma_alpha);
}

inline StudyScenario read_scenario(const Json& obj, std::size_t index) {
  const std::string where = "simulation.scenarios[" + std::to_string(index) + "]";
  only_keys(obj, where,
            {"id", "pleiotropy", "sample_size", "instrument_count", "pleiotropic_count", "replicates",
             "theta_alternative", "interaction"});
  StudyScenario s;
  s.scenario.scenario_id = std::to_string(index + 1);
  read(obj, "id", s.scenario.scenario_id, where);
  std::string pleiotropy = "balanced";
  read(obj, "pleiotropy", pleiotropy, where);
  s.scenario.pleiotropy = parse_pleiotropy(pleiotropy);
  read_unsigned(obj, "sample_size", s.scenario.sample_size, where);
  read_unsigned(obj, "instrument_count", s.scenario.instrument_count, where);
  read_unsigned(obj, "pleiotropic_count", s.scenario.pleiotropic_count, where);
  read_unsigned(obj, "replicates", s.scenario.replicates, where);
  read(obj, "theta_alternative", s.theta_alternative, where);
  if (obj.contains("interaction")) {
    const Json& in = obj.at("interaction");
    only_keys(in, where + ".interaction", {"psi_xw", "psi_yw", "psi_yxw", "covariate_rate"});
    InteractionTruth t;
    read(in, "psi_xw", t.psi_xw, where);
    read(in, "psi_yw", t.psi_yw, where);
    read(in, "psi_yxw", t.psi_yxw, where);
    read(in, "covariate_rate", t.covariate_rate, where);
    if (!(t.covariate_rate > 0.0 && t.covariate_rate < 1.0)) {
      throw InputError(where + ".interaction.covariate_rate must lie in (0, 1)");
    }
    s.scenario.interaction = t;
  }
  return s;
}

}  // namespace detail

inline RunConfig parse_run_config(const std::string& text, const std::string& source = "config") {
  using detail::Json;
  Json root;
  try {
    root = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(source + ": malformed JSON: " + e.what());
  }
  RunConfig c;
  detail::only_keys(root, source, {"seed", "model", "sampler", "init", "inference", "wme", "simulation", "paths"});
  detail::read_unsigned(root, "seed", c.seed, source);

  if (root.contains("model")) {
    const Json& m = root.at("model");
    detail::only_keys(m, "model", {"interaction", "global_scale_fixed", "bounds"});
    detail::read(m, "interaction", c.fit.model.interaction_enabled, "model");
    if (m.contains("global_scale_fixed") && !m.at("global_scale_fixed").is_null()) {
      double g = 0.0;
      detail::read(m, "global_scale_fixed", g, "model");
      c.fit.model.global_scale_fixed = g;
    }
    if (m.contains("bounds")) detail::read_bounds(m.at("bounds"), c.fit.model.bounds);
  }
  if (root.contains("sampler")) {
    const Json& s = root.at("sampler");
    detail::only_keys(s, "sampler",
                      {"chain_count", "warmup_draws", "sampling_draws", "target_accept", "max_leapfrog_steps"});
    detail::read_unsigned(s, "chain_count", c.fit.hmc.chain_count, "sampler");
    detail::read_unsigned(s, "warmup_draws", c.fit.hmc.warmup_draws, "sampler");
    detail::read_unsigned(s, "sampling_draws", c.fit.hmc.sampling_draws, "sampler");
    detail::read(s, "target_accept", c.fit.hmc.target_accept, "sampler");
    detail::read_unsigned(s, "max_leapfrog_steps", c.fit.hmc.max_leapfrog_steps, "sampler");
  }
  if (root.contains("init")) {
    const Json& i = root.at("init");
    detail::only_keys(i, "init", {"method", "jitter"});
    std::string method = "map";
    detail::read(i, "method", method, "init");
    if (method == "map") {
      c.fit.init = InitMethod::map;
    } else if (method == "variational") {
      c.fit.init = InitMethod::variational;
    } else {
      throw InputError("init.method must be 'map' or 'variational'");
    }
    detail::read(i, "jitter", c.fit.jitter, "init");
  }
  if (root.contains("inference")) {
    const Json& i = root.at("inference");
    detail::only_keys(i, "inference", {"interval_mass", "rhat_threshold"});
    detail::read(i, "interval_mass", c.fit.interval_mass, "inference");
    detail::read(i, "rhat_threshold", c.fit.rhat_threshold, "inference");
  }
  if (root.contains("wme")) {
    const Json& w = root.at("wme");
    detail::only_keys(w, "wme", {"bootstrap_reps", "confidence_mass"});
    detail::read_unsigned(w, "bootstrap_reps", c.wme_bootstrap_reps, "wme");
    detail::read(w, "confidence_mass", c.wme_confidence_mass, "wme");
  }
  if (root.contains("simulation")) {
    const Json& s = root.at("simulation");
    detail::only_keys(s, "simulation", {"export_replicates", "scenarios"});
    detail::read(s, "export_replicates", c.export_replicates, "simulation");
    if (s.contains("scenarios")) {
      if (!s.at("scenarios").is_array()) throw InputError("simulation.scenarios must be an array");
      std::size_t k = 0;
      for (const auto& item : s.at("scenarios")) c.scenarios.push_back(detail::read_scenario(item, k++));
    }
  }
  if (root.contains("paths")) {
    const Json& p = root.at("paths");
    detail::only_keys(p, "paths", {"dataset", "out"});
    if (p.contains("dataset")) {
      std::string v;
      detail::read(p, "dataset", v, "paths");
      c.dataset_path = v;
    }
    if (p.contains("out")) {
      std::string v;
      detail::read(p, "out", v, "paths");
      c.out_path = v;
    }
  }
  c.validate();
  return c;
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_run_config(text, path);
}

/// Relative paths inside a config file are taken relative to the file.
inline void resolve_relative_paths(RunConfig& c, const std::string& config_path) {
  const auto base = std::filesystem::path(config_path).parent_path();
  auto fix = [&](std::optional<std::string>& p) {
    if (p && std::filesystem::path(*p).is_relative()) p = (base / *p).lexically_normal().string();
  };
  fix(c.dataset_path);
  fix(c.out_path);
}

/// Checks an input file exists and is readable.
inline void require_readable_file(const std::string& path, const std::string& what) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) throw InputError(what + " not found: " + path);
  std::ifstream in(path);
  if (!in) throw InputError(what + " is not readable: " + path);
}

/// Creates an output directory (and parents) or fails with InputError.
inline void prepare_output_dir(const std::string& path) {
  std::error_code ec;
  if (path.empty()) throw InputError("output directory is empty");
  if (std::filesystem::exists(path, ec) && !std::filesystem::is_directory(path, ec)) {
    throw InputError("output path exists and is not a directory: " + path);
  }
  std::filesystem::create_directories(path, ec);
  if (ec) throw InputError("cannot create output directory " + path + ": " + ec.message());
}

}  // namespace bmr::cli

#endif  // BMR_CLI_CONFIG_HPP
