#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "bmr/eval/metrics.hpp"
#include "bmr/eval/report.hpp"
#include "bmr/sampler/draw_store.hpp"

using namespace bmr;

namespace {

std::vector<IntervalEstimate> random_intervals(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> centre(0.1, 0.3);
  std::uniform_real_distribution<double> half(0.01, 0.4);
  std::vector<IntervalEstimate> out;
  for (std::size_t i = 0; i < n; ++i) {
    const double c = centre(rng), h = half(rng);
    out.push_back(IntervalEstimate{c, c - h, c + h});
  }
  return out;
}

// Draw store whose every draw has the given phi values; other parameters
// are arbitrary but fixed.
DrawStore constant_phi_store(const std::vector<double>& phi, std::size_t chains, std::size_t draws) {
  const std::size_t j = phi.size();
  ParameterSet p = ParameterSet::zeros(j, false);
  p.sigma_x = p.sigma_y = p.sigma_alpha = p.gamma = 1.0;
  for (std::size_t k = 0; k < j; ++k) p.phi[static_cast<Eigen::Index>(k)] = phi[k];
  const auto flat = flatten(p);
  DrawStore store(j, false);
  for (std::size_t c = 0; c < chains; ++c) {
    ChainDraws cd;
    cd.values.resize(static_cast<Eigen::Index>(draws), static_cast<Eigen::Index>(flat.size()));
    for (std::size_t i = 0; i < draws; ++i) {
      for (std::size_t k = 0; k < flat.size(); ++k) {
        cd.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = flat[k];
      }
    }
    cd.log_posterior = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(draws));
    cd.divergent.assign(draws, 0);
    fill_derived(cd, j, false);
    store.chains().push_back(std::move(cd));
  }
  return store;
}

}  // namespace

TEST(Coverage, AllContainTruth) {
  std::vector<IntervalEstimate> r(10, IntervalEstimate{0.0, -1.0, 1.0});
  EXPECT_EQ(coverage(r, 0.0), 1.0);
}

TEST(Coverage, EndpointCounts) {
  std::vector<IntervalEstimate> r = {{0.5, 0.0, 1.0}, {0.5, -1.0, 0.0}, {0.5, 0.1, 1.0}};
  EXPECT_DOUBLE_EQ(coverage(r, 0.0), 2.0 / 3.0);
}

TEST(Coverage, EmptyIsNaN) {
  EXPECT_TRUE(std::isnan(coverage({}, 0.0)));
  EXPECT_TRUE(std::isnan(power({})));
  EXPECT_TRUE(std::isnan(bias({}, 0.0)));
}

TEST(Coverage, PartitionWithStrictlyBelowAndAbove) {
  std::mt19937_64 rng(11);
  auto r = random_intervals(rng, 500);
  // a few exact endpoint hits
  r[0].low = 0.0;
  r[1].high = 0.0;
  std::size_t below = 0, above = 0;
  for (const auto& x : r) {
    below += x.high < 0.0 ? 1 : 0;
    above += x.low > 0.0 ? 1 : 0;
  }
  const double n = static_cast<double>(r.size());
  EXPECT_NEAR(coverage(r, 0.0) + below / n + above / n, 1.0, 1e-15);
}

TEST(Power, AllPositive) {
  std::vector<IntervalEstimate> r(5, IntervalEstimate{0.3, 0.1, 0.5});
  EXPECT_EQ(power(r), 1.0);
}

TEST(Power, ZeroLowerBoundNotCounted) {
  std::vector<IntervalEstimate> r = {{0.25, 0.0, 0.5}, {0.3, 1e-300, 0.5}};
  EXPECT_EQ(power(r), 0.5);
}

TEST(Bias, ExactEstimatesGiveZero) {
  std::vector<IntervalEstimate> r(7, IntervalEstimate{0.35, 0.0, 1.0});
  EXPECT_EQ(bias(r, 0.35), 0.0);
}

TEST(Bias, SymmetricErrorsCancel) {
  const double t = 0.35;
  std::vector<IntervalEstimate> r = {{t + 0.1, 0.0, 1.0}, {t - 0.1, 0.0, 1.0}};
  EXPECT_NEAR(bias(r, t), 0.0, 1e-15);
}

TEST(Bias, MatchesDirectMean) {
  std::mt19937_64 rng(3);
  const auto r = random_intervals(rng, 200);
  double s = 0.0;
  for (const auto& x : r) s += x.estimate - 0.2;
  EXPECT_NEAR(bias(r, 0.2), s / 200.0, 1e-15);
}

TEST(Metrics, InvariantToOrdering) {
  std::mt19937_64 rng(5);
  auto r = random_intervals(rng, 301);
  const double c = coverage(r, 0.05), p = power(r), b = bias(r, 0.05);
  for (int trial = 0; trial < 5; ++trial) {
    std::shuffle(r.begin(), r.end(), rng);
    EXPECT_EQ(coverage(r, 0.05), c);
    EXPECT_EQ(power(r), p);
    EXPECT_NEAR(bias(r, 0.05), b, 1e-15);
  }
}

TEST(Shrinkage, UnitPhiGivesOneHalf) {
  const DrawStore store = constant_phi_store(std::vector<double>(6, 1.0), 2, 10);
  const ShrinkageGroups g = shrinkage_separation(store, {0, 2, 4});
  for (Eigen::Index k = 0; k < g.kappa_mean.size(); ++k) EXPECT_DOUBLE_EQ(g.kappa_mean[k], 0.5);
  EXPECT_DOUBLE_EQ(g.mean_pleiotropic, 0.5);
  EXPECT_DOUBLE_EQ(g.mean_non_pleiotropic, 0.5);
  EXPECT_FALSE(g.separated());
}

TEST(Shrinkage, GroupsFollowGroundTruth) {
  Eigen::VectorXd kappa(5);
  kappa << 0.1, 0.9, 0.2, 0.8, 0.7;
  const ShrinkageGroups g = shrinkage_separation(kappa, {2, 0});
  EXPECT_EQ(g.pleiotropic, (std::vector<bool>{true, false, true, false, false}));
  EXPECT_DOUBLE_EQ(g.mean_pleiotropic, (0.1 + 0.2) / 2.0);
  EXPECT_DOUBLE_EQ(g.mean_non_pleiotropic, (0.9 + 0.8 + 0.7) / 3.0);
  EXPECT_TRUE(g.separated());
}

TEST(Shrinkage, EmptyGroupIsNaN) {
  Eigen::VectorXd kappa = Eigen::VectorXd::Constant(3, 0.4);
  const ShrinkageGroups g = shrinkage_separation(kappa, {});
  EXPECT_TRUE(std::isnan(g.mean_pleiotropic));
  EXPECT_DOUBLE_EQ(g.mean_non_pleiotropic, 0.4);
  EXPECT_THROW(shrinkage_separation(kappa, {3}), InputError);
}

TEST(Shrinkage, PosteriorMeanMatchesHandComputation) {
  // kappa = 1 / (1 + phi^2) per draw; two chains with different phi.
  DrawStore a = constant_phi_store({0.5, 3.0}, 1, 4);
  const DrawStore b = constant_phi_store({2.0, 0.0}, 1, 4);
  a.chains().push_back(b.chains()[0]);
  const Eigen::VectorXd m = posterior_mean_kappa(a);
  EXPECT_NEAR(m[0], 0.5 * (1.0 / 1.25 + 1.0 / 5.0), 1e-15);
  EXPECT_NEAR(m[1], 0.5 * (1.0 / 10.0 + 1.0), 1e-15);
}

TEST(Shrinkage, AbortedChainsIgnored) {
  DrawStore a = constant_phi_store({0.5}, 1, 4);
  DrawStore b = constant_phi_store({2.0}, 1, 4);
  b.chains()[0].aborted = true;
  a.chains().push_back(b.chains()[0]);
  EXPECT_NEAR(posterior_mean_kappa(a)[0], 1.0 / 1.25, 1e-15);
  a.chains()[0].aborted = true;
  EXPECT_TRUE(std::isnan(posterior_mean_kappa(a)[0]));
}

TEST(Shrinkage, SeparationRate) {
  Eigen::VectorXd up(2), down(2);
  up << 0.1, 0.9;
  down << 0.9, 0.1;
  std::vector<ShrinkageGroups> g = {shrinkage_separation(up, {0}), shrinkage_separation(up, {0}),
                                    shrinkage_separation(down, {0})};
  EXPECT_DOUBLE_EQ(separation_rate(g), 2.0 / 3.0);
  EXPECT_TRUE(std::isnan(separation_rate({})));
}

namespace {

std::vector<StudyRecord> random_records(std::mt19937_64& rng) {
  std::vector<StudyRecord> out;
  for (const char* scenario : {"1", "2"}) {
    for (const char* hyp : {"null", "alternative"}) {
      const double truth = std::string(hyp) == "null" ? 0.0 : 0.35;
      const auto iv = random_intervals(rng, 25);
      for (std::size_t r = 0; r < iv.size(); ++r) {
        for (const char* method : {"bayes", "wme"}) {
          StudyRecord rec;
          rec.scenario = scenario;
          rec.hypothesis = hyp;
          rec.theta_true = truth;
          rec.replicate = r;
          rec.method = method;
          rec.ok = r % 11 != 3;
          rec.reliable = r % 7 != 2;
          rec.interval = rec.ok ? iv[r] : IntervalEstimate{NAN, NAN, NAN};
          out.push_back(rec);
        }
      }
    }
  }
  return out;
}

void expect_same_metrics(const MethodMetrics& a, const MethodMetrics& b) {
  EXPECT_EQ(a.coverage_null, b.coverage_null);
  EXPECT_EQ(a.coverage_alternative, b.coverage_alternative);
  EXPECT_EQ(a.power, b.power);
  EXPECT_EQ(a.bias_null, b.bias_null);
  EXPECT_EQ(a.bias_alternative, b.bias_alternative);
  EXPECT_EQ(a.failed, b.failed);
  EXPECT_EQ(a.unreliable, b.unreliable);
}

}  // namespace

TEST(Report, MethodMetricsSelectByScenarioAndMethod) {
  std::mt19937_64 rng(8);
  const auto records = random_records(rng);
  const MethodMetrics m = method_metrics(records, "2", "wme", 0.35);
  std::vector<IntervalEstimate> null_runs, alt_runs;
  std::size_t failed = 0, unreliable = 0;
  for (const auto& r : records) {
    if (r.scenario != "2" || r.method != "wme") continue;
    if (!r.ok) {
      ++failed;
      continue;
    }
    if (!r.reliable) ++unreliable;
    (r.hypothesis == "null" ? null_runs : alt_runs).push_back(r.interval);
  }
  EXPECT_EQ(m.coverage_null, coverage(null_runs, 0.0));
  EXPECT_EQ(m.coverage_alternative, coverage(alt_runs, 0.35));
  EXPECT_EQ(m.power, power(alt_runs));
  EXPECT_EQ(m.bias_null, bias(null_runs, 0.0));
  EXPECT_EQ(m.failed, failed);
  EXPECT_EQ(m.unreliable, unreliable);
  EXPECT_EQ(null_runs.size() + alt_runs.size() + failed, 50u);
}

TEST(Report, RecordsRoundTripExactly) {
  std::mt19937_64 rng(13);
  const auto records = random_records(rng);
  std::stringstream buf;
  write_records(buf, records);
  const auto back = read_records(buf, "records");
  ASSERT_EQ(back.size(), records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    EXPECT_EQ(back[i].scenario, records[i].scenario);
    EXPECT_EQ(back[i].hypothesis, records[i].hypothesis);
    EXPECT_EQ(back[i].theta_true, records[i].theta_true);
    EXPECT_EQ(back[i].replicate, records[i].replicate);
    EXPECT_EQ(back[i].method, records[i].method);
    EXPECT_EQ(back[i].ok, records[i].ok);
    EXPECT_EQ(back[i].reliable, records[i].reliable);
    if (records[i].ok) {
      EXPECT_EQ(back[i].interval.estimate, records[i].interval.estimate);
      EXPECT_EQ(back[i].interval.low, records[i].interval.low);
      EXPECT_EQ(back[i].interval.high, records[i].interval.high);
    }
  }
  for (const char* s : {"1", "2"}) {
    for (const char* m : {"bayes", "wme"}) {
      expect_same_metrics(method_metrics(records, s, m, 0.35), method_metrics(back, s, m, 0.35));
    }
  }
}

TEST(Report, TableHasBothMethodColumns) {
  ScenarioRow row;
  row.scenario = "1";
  row.pleiotropy = "balanced";
  row.sample_size = 520;
  row.replicates = 100;
  row.theta_alternative = 0.35;
  std::stringstream buf;
  write_table(buf, {row, row});
  std::string header, line;
  std::getline(buf, header);
  EXPECT_NE(header.find("bayes_coverage_null"), std::string::npos);
  EXPECT_NE(header.find("wme_coverage_null"), std::string::npos);
  EXPECT_NE(header.find("wme_power"), std::string::npos);
  int rows = 0;
  while (std::getline(buf, line)) ++rows;
  EXPECT_EQ(rows, 2);
}

TEST(Report, KappaRecordsOneRowPerInstrument) {
  Eigen::VectorXd kappa(3);
  kappa << 0.25, 0.5, 0.75;
  std::stringstream buf;
  write_kappa_records(buf, {KappaRecord{"3", "null", 4, shrinkage_separation(kappa, {1})}});
  EXPECT_EQ(buf.str(),
            "scenario,hypothesis,replicate,instrument,pleiotropic,kappa_mean\n"
            "3,null,4,z1,0,0.25\n"
            "3,null,4,z2,1,0.5\n"
            "3,null,4,z3,0,0.75\n");
}
