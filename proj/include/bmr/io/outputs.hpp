#ifndef BMR_IO_OUTPUTS_HPP
#define BMR_IO_OUTPUTS_HPP

#include <cmath>
#include <cstddef>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bmr/baselines/per_snp.hpp"
#include "bmr/baselines/wme.hpp"
#include "bmr/fit.hpp"
#include "bmr/io/csv.hpp"
#include "bmr/sim/scenario.hpp"

namespace bmr::io {

using Json = nlohmann::ordered_json;

// ---- draws ----------------------------------------------------------------

/// One row per post-warm-up draw: chain and draw index (1-based), every
/// parameter by name, log posterior, divergence flag, and whether the
/// chain was aborted.
inline void write_draws(std::ostream& out, const DrawStore& store) {
  out << "chain,draw";
  for (const auto& n : store.names()) out << ',' << n;
  out << ",log_posterior,divergent,chain_aborted\n";
  std::size_t chain = 0;
  for (const auto& c : store.chains()) {
    ++chain;
    for (Eigen::Index i = 0; i < c.values.rows(); ++i) {
      out << chain << ',' << (i + 1);
      for (Eigen::Index k = 0; k < c.values.cols(); ++k) out << ',' << format_double(c.values(i, k));
      out << ',' << format_double(c.log_posterior[i]) << ',' << static_cast<int>(c.divergent[static_cast<std::size_t>(i)])
          << ',' << (c.aborted ? 1 : 0) << '\n';
    }
  }
}

inline DrawStore read_draws(std::istream& in, const std::string& source) {
  const Table t = read_table(in, source);
  std::size_t j = 0;
  bool interaction = false;
  for (const auto& h : t.header) {
    if (h.rfind("alpha", 0) == 0) ++j;
    if (h == "psi_yxw") interaction = true;
  }
  DrawStore store(j, interaction);
  std::vector<std::string> expected = {"chain", "draw"};
  expected.insert(expected.end(), store.names().begin(), store.names().end());
  expected.insert(expected.end(), {"log_posterior", "divergent", "chain_aborted"});
  if (t.header != expected) throw InputError(source + ": unexpected draws header");

  const std::size_t width = store.names().size();
  std::map<std::size_t, std::vector<const std::vector<double>*>> by_chain;
  for (const auto& row : t.rows) by_chain[static_cast<std::size_t>(row[0])].push_back(&row);
  for (const auto& [id, rows] : by_chain) {
    ChainDraws c;
    const auto n = static_cast<Eigen::Index>(rows.size());
    c.values.resize(n, static_cast<Eigen::Index>(width));
    c.log_posterior.resize(n);
    c.accept_stat = Eigen::VectorXd::Constant(n, NAN);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& row = *rows[static_cast<std::size_t>(i)];
      for (std::size_t k = 0; k < width; ++k) c.values(i, static_cast<Eigen::Index>(k)) = row[2 + k];
      c.log_posterior[i] = row[2 + width];
      c.divergent.push_back(row[3 + width] != 0.0 ? 1 : 0);
      c.divergent_count += c.divergent.back();
      c.aborted = row[4 + width] != 0.0;
    }
    fill_derived(c, j, interaction);
    store.chains().push_back(std::move(c));
  }
  return store;
}

// ---- summaries -------------------------------------------------------------

inline Json to_json(const QuantitySummary& s) {
  return Json{{"mean", s.mean}, {"sd", s.sd}, {"low", s.low}, {"high", s.high}, {"rhat", s.rhat}, {"ess", s.ess}};
}

inline Json to_json(const HMCConfig& h) {
  return Json{{"chain_count", h.chain_count},
              {"warmup_draws", h.warmup_draws},
              {"sampling_draws", h.sampling_draws},
              {"target_accept", h.target_accept},
              {"max_leapfrog_steps", h.max_leapfrog_steps},
              {"seed", h.seed}};
}

/// Posterior summary of every parameter plus theta' and kappa; headline
/// effects (theta, and psi_yxw and theta' with the interaction model) are
/// repeated under "effects".
inline Json summary_json(const BayesFit& fit, const FitOptions& opt) {
  const DrawStore& d = fit.draws;
  Json j;
  j["reliable"] = fit.reliable;
  j["problems"] = fit.problems;
  j["interval_mass"] = opt.interval_mass;
  j["model"] = Json{{"instruments", d.instrument_count()},
                    {"interaction", d.interaction()},
                    {"global_scale_fixed", opt.model.global_scale_fixed ? Json(*opt.model.global_scale_fixed)
                                                                       : Json(nullptr)}};
  Json chains = Json::array();
  for (const auto& c : d.chains()) {
    chains.push_back(Json{{"draws", c.size()},
                          {"step_size", c.step_size},
                          {"divergent", c.divergent_count},
                          {"aborted", c.aborted}});
  }
  j["sampler"] = to_json(opt.hmc);
  j["sampler"]["chains"] = chains;
  Json effects;
  effects["theta"] = to_json(fit.theta);
  if (fit.psi_yxw) effects["psi_yxw"] = to_json(*fit.psi_yxw);
  if (fit.theta_prime) effects["theta_prime"] = to_json(*fit.theta_prime);
  j["effects"] = effects;
  Json params;
  for (const auto& n : d.names()) params[n] = to_json(summarize(d, n, opt.interval_mass));
  if (d.interaction()) params["theta_prime"] = to_json(summarize(d, "theta_prime", opt.interval_mass));
  for (std::size_t k = 1; k <= d.instrument_count(); ++k) {
    const std::string n = "kappa" + std::to_string(k);
    params[n] = to_json(summarize(d, n, opt.interval_mass));
  }
  j["parameters"] = params;
  return j;
}

/// Per-instrument posterior shrinkage weights.
inline void write_kappa(std::ostream& out, const DrawStore& d, double mass) {
  out << "instrument,kappa_mean,kappa_sd,kappa_low,kappa_high\n";
  for (std::size_t k = 1; k <= d.instrument_count(); ++k) {
    const QuantitySummary s = summarize(d, "kappa" + std::to_string(k), mass);
    out << 'z' << k << ',' << format_double(s.mean) << ',' << format_double(s.sd) << ',' << format_double(s.low)
        << ',' << format_double(s.high) << '\n';
  }
}

// ---- per-instrument regressions ---------------------------------------------

inline void write_per_snp(std::ostream& out, const PerSNPStats& s) {
  out << "instrument,b_x,se_x,b_y,se_y\n";
  for (std::size_t k = 0; k < s.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    out << 'z' << (k + 1) << ',' << format_double(s.b_x[i]) << ',' << format_double(s.se_x[i]) << ','
        << format_double(s.b_y[i]) << ',' << format_double(s.se_y[i]) << '\n';
  }
}

inline PerSNPStats read_per_snp(std::istream& in, const std::string& source) {
  const TextTable t = read_text_table(in, source);
  if (t.header != std::vector<std::string>{"instrument", "b_x", "se_x", "b_y", "se_y"}) {
    throw InputError(source + ": unexpected per-instrument header");
  }
  const auto n = static_cast<Eigen::Index>(t.rows.size());
  PerSNPStats s;
  s.b_x.resize(n);
  s.se_x.resize(n);
  s.b_y.resize(n);
  s.se_y.resize(n);
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto i = static_cast<Eigen::Index>(r);
    s.b_x[i] = cell_number(t, r, 1, source);
    s.se_x[i] = cell_number(t, r, 2, source);
    s.b_y[i] = cell_number(t, r, 3, source);
    s.se_y[i] = cell_number(t, r, 4, source);
    s.usable.push_back(!std::isnan(s.b_x[i]));
  }
  return s;
}

inline Json per_snp_json(const PerSNPStats& s) {
  Json rows = Json::array();
  for (std::size_t k = 0; k < s.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    rows.push_back(Json{{"instrument", "z" + std::to_string(k + 1)},
                        {"b_x", s.b_x[i]},
                        {"se_x", s.se_x[i]},
                        {"b_y", s.b_y[i]},
                        {"se_y", s.se_y[i]},
                        {"usable", static_cast<bool>(s.usable[k])}});
  }
  return rows;
}

inline Json wme_json(const WMEResult& r, const PerSNPStats& s, unsigned reps, double mass, std::uint64_t seed) {
  return Json{{"estimate", r.estimate},
              {"low", r.low},
              {"high", r.high},
              {"confidence_mass", mass},
              {"bootstrap_reps", reps},
              {"seed", seed},
              {"instruments_used", r.instruments_used},
              {"warnings", r.warnings},
              {"instruments", per_snp_json(s)}};
}

// ---- simulation ground truth -------------------------------------------------

inline Json truth_json(const GroundTruth& t) {
  const ParameterSet& p = t.params;
  auto vec = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  Json j{{"omega_x", p.omega_x}, {"omega_y", p.omega_y}, {"theta", p.theta},     {"delta_x", p.delta_x},
         {"delta_y", p.delta_y}, {"sigma_x", p.sigma_x}, {"sigma_y", p.sigma_y}, {"alpha", vec(p.alpha)},
         {"beta", vec(p.beta)}};
  if (p.interaction) {
    j["psi_xw"] = p.interaction->psi_xw;
    j["psi_yw"] = p.interaction->psi_yw;
    j["psi_yxw"] = p.interaction->psi_yxw;
  }
  std::vector<std::size_t> one_based;
  for (std::size_t k : t.pleiotropic) one_based.push_back(k + 1);
  j["pleiotropic_instruments"] = one_based;
  return j;
}

}  // namespace bmr::io

#endif  // BMR_IO_OUTPUTS_HPP
