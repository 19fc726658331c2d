#ifndef BMR_SAMPLER_DRAW_STORE_HPP
#define BMR_SAMPLER_DRAW_STORE_HPP

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bmr/core/derived.hpp"
#include "bmr/core/model.hpp"
#include "bmr/core/parameters.hpp"
#include "bmr/sampler/diagnostics.hpp"
#include "bmr/sampler/hmc.hpp"

namespace bmr {

/// Post-warm-up draws of one chain on the constrained scale.
struct ChainDraws {
  Eigen::MatrixXd values;  // draws x parameter_names(j, interaction), flatten() order
  Eigen::VectorXd log_posterior;
  Eigen::VectorXd accept_stat;
  std::vector<std::uint8_t> divergent;
  Eigen::MatrixXd kappa;        // draws x j, shrinkage_weights of each draw
  Eigen::VectorXd theta_prime;  // empty unless the interaction model is used
  double step_size = 0.0;
  std::size_t divergent_count = 0;
  bool aborted = false;

  std::size_t size() const { return static_cast<std::size_t>(values.rows()); }
};

/// Ordered posterior draws for all chains plus per-draw derived quantities.
class DrawStore {
 public:
  DrawStore() = default;
  DrawStore(std::size_t j, bool interaction)
      : j_(j), interaction_(interaction), names_(parameter_names(j, interaction)) {}

  std::size_t instrument_count() const { return j_; }
  bool interaction() const { return interaction_; }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<ChainDraws>& chains() const { return chains_; }
  std::vector<ChainDraws>& chains() { return chains_; }

  std::size_t column(const std::string& name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) throw std::out_of_range("no parameter named " + name);
    return static_cast<std::size_t>(it - names_.begin());
  }

  ParameterSet draw(std::size_t chain, std::size_t index) const {
    const Eigen::VectorXd row = chains_.at(chain).values.row(static_cast<Eigen::Index>(index)).transpose();
    return unflatten(std::vector<double>(row.data(), row.data() + row.size()), j_, interaction_);
  }

  bool any_aborted() const {
    return std::any_of(chains_.begin(), chains_.end(), [](const ChainDraws& c) { return c.aborted; });
  }

  std::size_t total_divergent() const {
    std::size_t s = 0;
    for (const auto& c : chains_) s += c.divergent_count;
    return s;
  }

  /// Per-chain sequences of a scalar extracted from each chain's draws;
  /// aborted chains are left out.
  template <typename Extract>
    requires std::invocable<Extract&, const ChainDraws&, Eigen::Index>
  std::vector<std::vector<double>> per_chain(Extract&& extract) const {
    std::vector<std::vector<double>> out;
    for (const auto& c : chains_) {
      if (c.aborted) continue;
      std::vector<double> seq(c.size());
      for (std::size_t i = 0; i < c.size(); ++i) seq[i] = extract(c, static_cast<Eigen::Index>(i));
      out.push_back(std::move(seq));
    }
    return out;
  }

  std::vector<std::vector<double>> per_chain(const std::string& name) const {
    if (name == "theta_prime") {
      return per_chain([](const ChainDraws& c, Eigen::Index i) { return c.theta_prime[i]; });
    }
    if (name.rfind("kappa", 0) == 0) {
      const auto k = static_cast<Eigen::Index>(std::stoul(name.substr(5)) - 1);
      return per_chain([k](const ChainDraws& c, Eigen::Index i) { return c.kappa(i, k); });
    }
    const auto col = static_cast<Eigen::Index>(column(name));
    return per_chain([col](const ChainDraws& c, Eigen::Index i) { return c.values(i, col); });
  }

  std::vector<double> pooled(const std::string& name) const {
    std::vector<double> all;
    for (auto& seq : per_chain(name)) all.insert(all.end(), seq.begin(), seq.end());
    return all;
  }

 private:
  std::size_t j_ = 0;
  bool interaction_ = false;
  std::vector<std::string> names_;
  std::vector<ChainDraws> chains_;
};

/// Recomputes the per-draw derived quantities (kappa, theta') from the
/// stored parameter values.
inline void fill_derived(ChainDraws& c, std::size_t j, bool interaction) {
  const auto rows = c.values.rows();
  c.kappa.resize(rows, static_cast<Eigen::Index>(j));
  c.theta_prime.resize(interaction ? rows : 0);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Eigen::RowVectorXd row = c.values.row(i);
    const ParameterSet p = unflatten(std::vector<double>(row.data(), row.data() + row.size()), j, interaction);
    c.kappa.row(i) = shrinkage_weights(p).transpose();
    if (interaction) c.theta_prime[i] = derived_theta_prime(p);
  }
}

/// Maps sampler output on the unconstrained space to constrained draws with
/// derived quantities.
inline DrawStore make_draw_store(const MRModel& model, const std::vector<ChainSamples>& samples) {
  const std::size_t j = model.instrument_count();
  const bool inter = model.config().interaction_enabled;
  DrawStore store(j, inter);
  for (const auto& s : samples) {
    ChainDraws c;
    const auto rows = s.draws.rows();
    c.values.resize(rows, static_cast<Eigen::Index>(store.names().size()));
    for (Eigen::Index i = 0; i < rows; ++i) {
      const auto flat = flatten(model.constrain(s.draws.row(i).transpose()).params);
      c.values.row(i) = Eigen::Map<const Eigen::RowVectorXd>(flat.data(), static_cast<Eigen::Index>(flat.size()));
    }
    fill_derived(c, j, inter);
    c.log_posterior = s.log_density;
    c.accept_stat = s.accept_stat;
    c.divergent = s.divergent;
    c.step_size = s.step_size;
    c.divergent_count = s.divergent_count;
    c.aborted = s.aborted;
    store.chains().push_back(std::move(c));
  }
  return store;
}

/// Runs HMC on the model posterior from the given unconstrained initial
/// states and returns constrained draws.
inline DrawStore run_chains(const MRModel& model, const HMCConfig& hmc, const std::vector<UnconstrainedState>& inits,
                            unsigned threads = 1) {
  std::vector<Eigen::VectorXd> starts;
  for (const auto& s : inits) starts.push_back(s.values);
  return make_draw_store(model, sample_chains(model, starts, hmc, threads));
}

}  // namespace bmr

#endif  // BMR_SAMPLER_DRAW_STORE_HPP
