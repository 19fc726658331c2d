#ifndef BMR_CLI_COMMANDS_HPP
#define BMR_CLI_COMMANDS_HPP

#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "bmr/baselines/per_snp.hpp"
#include "bmr/baselines/wme.hpp"
#include "bmr/cli/config.hpp"
#include "bmr/eval/metrics.hpp"
#include "bmr/eval/report.hpp"
#include "bmr/fit.hpp"
#include "bmr/init/map.hpp"
#include "bmr/io/csv.hpp"
#include "bmr/io/outputs.hpp"
#include "bmr/sim/generate.hpp"
#include "bmr/sim/run.hpp"
#include "bmr/util/parallel.hpp"
#include "bmr/util/rng.hpp"

namespace bmr::cli {

enum ExitCode : int { kOk = 0, kInputError = 2, kUnreliable = 3 };

/// Command-line arguments after parsing. Explicit flags win over the
/// config file.
struct Invocation {
  std::optional<std::string> config_path;
  std::optional<std::string> dataset_path;
  std::optional<std::string> out_path;
  std::optional<std::uint64_t> seed;
  unsigned threads = default_thread_count();
};

namespace detail {

inline RunConfig load(const Invocation& inv) {
  RunConfig c;
  if (inv.config_path) {
    require_readable_file(*inv.config_path, "config");
    c = load_run_config(*inv.config_path);
    resolve_relative_paths(c, *inv.config_path);
  }
  if (inv.dataset_path) c.dataset_path = inv.dataset_path;
  if (inv.out_path) c.out_path = inv.out_path;
  if (inv.seed) c.seed = *inv.seed;
  if (inv.threads < 1) throw InputError("--threads must be at least 1");
  return c;
}

inline std::ofstream open_output(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw InputError("cannot write " + p.string());
  return out;
}

inline void write_json(const std::filesystem::path& p, const io::Json& j) {
  auto out = open_output(p);
  out << j.dump(2) << '\n';
}

/// Maps failures to exit codes: bad input 2, a model that cannot be
/// started or sampled reliably 3.
template <typename Body>
int guarded(std::ostream& log, Body&& body) {
  try {
    return body();
  } catch (const InputError& e) {
    log << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const InitializationError& e) {
    log << "error: " << e.what() << '\n';
    return kUnreliable;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kInputError;
  }
}

}  // namespace detail

/// Fits the Bayesian model to one dataset. Writes draws.csv, summary.json,
/// kappa.csv and per_snp.csv into the output directory. Returns 3 when the
/// sampler diagnostics fail; the outputs are still written and
/// summary.json carries "reliable": false.
inline int cmd_fit(const Invocation& inv, std::ostream& log) {
  return detail::guarded(log, [&] {
    RunConfig cfg = detail::load(inv);
    if (!cfg.dataset_path) throw InputError("no dataset given");
    if (!cfg.out_path) throw InputError("no output directory given (--out)");
    require_readable_file(*cfg.dataset_path, "dataset");
    prepare_output_dir(*cfg.out_path);

    io::DatasetRead in = io::read_dataset(*cfg.dataset_path, cfg.fit.model.interaction_enabled);
    for (const auto& w : in.warnings) log << "warning: " << w << '\n';
    if (cfg.fit.model.interaction_enabled && !in.data.covariate) {
      throw InputError(*cfg.dataset_path + ": interaction model needs a 'w' column");
    }

    FitOptions opt = cfg.fit;
    opt.hmc.seed = cfg.seed;
    opt.threads = inv.threads;
    const BayesFit fit = fit_bayes(in.data, opt);
    const PerSNPStats stats = per_snp_regressions(in.data);

    const std::filesystem::path dir(*cfg.out_path);
    {
      auto out = detail::open_output(dir / "draws.csv");
      io::write_draws(out, fit.draws);
    }
    io::Json summary = io::summary_json(fit, opt);
    summary["warnings"] = in.warnings;
    detail::write_json(dir / "summary.json", summary);
    {
      auto out = detail::open_output(dir / "kappa.csv");
      io::write_kappa(out, fit.draws, opt.interval_mass);
    }
    {
      auto out = detail::open_output(dir / "per_snp.csv");
      io::write_per_snp(out, stats);
    }
    if (!fit.reliable) {
      for (const auto& p : fit.problems) log << "unreliable: " << p << '\n';
      return static_cast<int>(kUnreliable);
    }
    return static_cast<int>(kOk);
  });
}

/// Weighted median estimate with a bootstrap interval, written as JSON to
/// the output file.
inline int cmd_wme(const Invocation& inv, std::ostream& log) {
  return detail::guarded(log, [&] {
    RunConfig cfg = detail::load(inv);
    if (!cfg.dataset_path) throw InputError("no dataset given");
    if (!cfg.out_path) throw InputError("no output file given (--out)");
    require_readable_file(*cfg.dataset_path, "dataset");
    const std::filesystem::path out_file(*cfg.out_path);
    if (out_file.has_parent_path()) prepare_output_dir(out_file.parent_path().string());

    io::DatasetRead in = io::read_dataset(*cfg.dataset_path, false);
    const PerSNPStats stats = per_snp_regressions(in.data);
    const WMEResult r = wme_estimate(stats, cfg.wme_bootstrap_reps, cfg.wme_confidence_mass, cfg.seed, inv.threads);
    for (const auto& w : r.warnings) log << "warning: " << w << '\n';
    detail::write_json(out_file, io::wme_json(r, stats, cfg.wme_bootstrap_reps, cfg.wme_confidence_mass, cfg.seed));
    return static_cast<int>(kOk);
  });
}

/// Both methods on one simulated replicate.
struct ReplicateFits {
  std::optional<IntervalEstimate> bayes;
  bool bayes_reliable = true;
  std::optional<IntervalEstimate> theta_prime;  // interaction scenarios only
  std::optional<ShrinkageGroups> shrinkage;
  std::string bayes_error;
  std::optional<IntervalEstimate> wme;
  std::string wme_error;
};

/// Seed of one (scenario, hypothesis) cell of a study.
inline std::uint64_t scenario_seed(std::uint64_t root, std::size_t scenario_index, std::size_t hypothesis) {
  return sub_seed(root, {stream::kScenario, scenario_index, hypothesis});
}

/// Scenario `s` of a study under the null (h = 0, theta = 0) or the
/// alternative (h = 1), seeded as the simulate command seeds it.
inline ScenarioConfig cell_config(const RunConfig& cfg, std::size_t s, std::size_t h) {
  const StudyScenario& study = cfg.scenarios.at(s);
  ScenarioConfig sc = study.scenario;
  sc.theta_true = h == 0 ? 0.0 : study.theta_alternative;
  sc.seed = scenario_seed(cfg.seed, s, h);
  return sc;
}

/// Runs both methods on every replicate of one scenario cell. Replicates
/// run on `threads` workers; each fit is single-threaded.
inline std::vector<ReplicateOutcome<ReplicateFits>> run_cell(const RunConfig& cfg, const ScenarioConfig& sc,
                                                             unsigned threads) {
  auto fit_both = [&](const MRDataset& data, const GroundTruth& truth, std::size_t r) {
    ReplicateFits out;
    try {
      FitOptions opt = cfg.fit;
      opt.model.interaction_enabled = data.covariate.has_value();
      opt.hmc.seed = sub_seed(sc.seed, {stream::kFit, r});
      opt.threads = 1;
      const BayesFit fit = fit_bayes(data, opt);
      out.bayes = IntervalEstimate{fit.theta.mean, fit.theta.low, fit.theta.high};
      out.bayes_reliable = fit.reliable;
      if (fit.theta_prime) {
        out.theta_prime = IntervalEstimate{fit.theta_prime->mean, fit.theta_prime->low, fit.theta_prime->high};
      }
      out.shrinkage = shrinkage_separation(fit.kappa_mean, truth.pleiotropic);
    } catch (const std::exception& e) {
      out.bayes_error = e.what();
    }
    try {
      const PerSNPStats stats = per_snp_regressions(data);
      const WMEResult w =
          wme_estimate(stats, cfg.wme_bootstrap_reps, cfg.wme_confidence_mass, sub_seed(sc.seed, {stream::kBootstrap, r}));
      out.wme = IntervalEstimate{w.estimate, w.low, w.high};
    } catch (const std::exception& e) {
      out.wme_error = e.what();
    }
    return out;
  };
  return run_scenario(sc, fit_both, threads);
}

/// Simulation study: every configured scenario under the null (theta = 0)
/// and the alternative, analysed with both methods. Writes
///   table.csv       one row per scenario, metrics for both methods
///   replicates.csv  one row per (replicate, method)
///   kappa.csv       posterior-mean kappa per instrument and replicate
/// and, with export_replicates, every dataset and its generating values
/// under replicates/. Failed fits are recorded, not fatal.
inline int cmd_simulate(const Invocation& inv, std::ostream& log) {
  return detail::guarded(log, [&] {
    RunConfig cfg = detail::load(inv);
    if (!inv.config_path) throw InputError("simulate needs a config file");
    if (cfg.scenarios.empty()) throw InputError("config lists no simulation scenarios");
    if (!cfg.out_path) throw InputError("no output directory given (--out)");
    prepare_output_dir(*cfg.out_path);
    const std::filesystem::path dir(*cfg.out_path);
    if (cfg.export_replicates) prepare_output_dir((dir / "replicates").string());

    std::vector<StudyRecord> records;
    std::vector<KappaRecord> kappas;
    std::vector<ScenarioRow> rows;
    for (std::size_t s = 0; s < cfg.scenarios.size(); ++s) {
      const StudyScenario& study = cfg.scenarios[s];
      for (std::size_t h = 0; h < 2; ++h) {
        const std::string hyp = h == 0 ? "null" : "alternative";
        const ScenarioConfig sc = cell_config(cfg, s, h);
        log << "scenario " << sc.scenario_id << " (" << hyp << "): " << sc.replicates << " replicates\n";
        const auto outcomes = run_cell(cfg, sc, inv.threads);

        for (const auto& o : outcomes) {
          const double theta_true = sc.theta_true;
          auto record = [&](const std::string& method, const std::optional<IntervalEstimate>& est, bool reliable,
                            double truth, const std::string& error) {
            StudyRecord r;
            r.scenario = sc.scenario_id;
            r.hypothesis = hyp;
            r.theta_true = truth;
            r.replicate = o.replicate;
            r.method = method;
            r.ok = est.has_value();
            r.reliable = reliable;
            r.interval = est.value_or(IntervalEstimate{NAN, NAN, NAN});
            if (!r.ok) {
              log << "  replicate " << o.replicate << ' ' << method << " failed: " << error << '\n';
            }
            records.push_back(r);
          };
          if (!o.ok()) {
            record("bayes", std::nullopt, false, theta_true, o.error);
            record("wme", std::nullopt, true, theta_true, o.error);
            continue;
          }
          const ReplicateFits& f = *o.result;
          record("bayes", f.bayes, f.bayes_reliable, theta_true, f.bayes_error);
          record("wme", f.wme, true, theta_true, f.wme_error);
          if (sc.interaction && f.bayes) {
            const double truth_prime = theta_true + sc.interaction->psi_yxw;
            record("bayes_theta_prime", f.theta_prime, f.bayes_reliable, truth_prime, f.bayes_error);
          }
          if (f.shrinkage) kappas.push_back(KappaRecord{sc.scenario_id, hyp, o.replicate, *f.shrinkage});
        }

        if (cfg.export_replicates) {
          for (std::size_t r = 0; r < sc.replicates; ++r) {
            const auto [data, truth] = generate_replicate(sc, r);
            const std::string stem = sc.scenario_id + "_" + hyp + "_" + std::to_string(r);
            auto out = detail::open_output(dir / "replicates" / (stem + ".csv"));
            io::write_dataset(out, data);
            detail::write_json(dir / "replicates" / (stem + "_truth.json"), io::truth_json(truth));
          }
        }
      }

      ScenarioRow row;
      row.scenario = study.scenario.scenario_id;
      row.pleiotropy = to_string(study.scenario.pleiotropy);
      row.sample_size = study.scenario.sample_size;
      row.replicates = study.scenario.replicates;
      row.theta_alternative = study.theta_alternative;
      row.bayes = method_metrics(records, row.scenario, "bayes", study.theta_alternative);
      row.wme = method_metrics(records, row.scenario, "wme", study.theta_alternative);
      rows.push_back(row);
    }

    {
      auto out = detail::open_output(dir / "table.csv");
      write_table(out, rows);
    }
    {
      auto out = detail::open_output(dir / "replicates.csv");
      write_records(out, records);
    }
    {
      auto out = detail::open_output(dir / "kappa.csv");
      write_kappa_records(out, kappas);
    }
    return static_cast<int>(kOk);
  });
}

}  // namespace bmr::cli

#endif  // BMR_CLI_COMMANDS_HPP
