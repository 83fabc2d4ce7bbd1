#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "iflearn/grouplearner.hpp"
#include "iflearn/simulate.hpp"

using namespace iflearn;

namespace {

Dataset heterogeneous(std::size_t n, std::uint64_t seed) {
  Stream rng(seed);
  std::vector<double> x(n), y(n);
  std::vector<int> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = rng.uniform(-1.0, 1.0);
    w[i] = rng.bernoulli(0.5) ? 1 : 0;
    y[i] = x[i] + w[i] * 2.0 * x[i] + rng.normal(0.0, 0.3);
  }
  return Dataset(1, x, y, w);
}

GroupConfig fast_config(std::size_t groups, std::uint64_t seed) {
  GroupConfig c;
  c.groups = groups;
  c.learner.crossfit.outcome = LearnerSpec::make_kernel(0.2);
  c.learner.crossfit.propensity = LearnerSpec::make_kernel(0.5);
  c.learner.second_stage = LearnerSpec::make_kernel(0.2);
  c.seed = seed;
  return c;
}

}  // namespace

TEST(GroupEstimate, HandValues) {
  const std::vector<double> a{1.0, 2.0, 3.0};
  const auto s = group_efficient_estimate(a);
  EXPECT_DOUBLE_EQ(s.psi_hat, 2.0);
  EXPECT_DOUBLE_EQ(s.var_hat, 1.0 / 3.0);

  const std::vector<double> b{0.0, 1.0};
  const auto t = group_efficient_estimate(b);
  EXPECT_DOUBLE_EQ(t.psi_hat, 0.5);
  EXPECT_DOUBLE_EQ(t.var_hat, 0.25);

  const std::vector<double> c{4.2, 4.2, 4.2};
  const auto u = group_efficient_estimate(c);
  EXPECT_DOUBLE_EQ(u.psi_hat, 4.2);
  EXPECT_EQ(u.var_hat, 0.0);
}

TEST(GroupEstimate, SingleRowIsUndefined) {
  const std::vector<double> one{1.0};
  try {
    group_efficient_estimate(one);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::variance_undefined);
  }
}

TEST(GroupEstimate, NormalIntervalForOneTwoThree) {
  const double z = critical_value(0.95, CriticalValue::normal, 3);
  EXPECT_NEAR(z, 1.959963984540054, 1e-12);
  const double t = critical_value(0.95, CriticalValue::student_t, 3);
  EXPECT_NEAR(t, 4.302652729911275, 1e-9);
}

TEST(GroupHT, HandValues) {
  const std::vector<double> y{1.0, 1.0};
  const auto a = group_ht_estimate(y, std::vector<int>{1, 1}, std::vector<double>{0.5, 0.5});
  EXPECT_DOUBLE_EQ(a.psi_hat, 2.0);
  EXPECT_EQ(a.var_hat, 0.0);
  const auto b = group_ht_estimate(y, std::vector<int>{1, 0}, std::vector<double>{0.25, 0.25});
  EXPECT_DOUBLE_EQ(b.psi_hat, 4.0 / 3.0);
}

TEST(GroupHT, MatchesEfficientWithZeroRegressions) {
  const std::vector<double> y{0.3, -1.2, 2.5, 0.9, 1.1};
  const std::vector<int> w{1, 0, 1, 0, 1};
  const std::vector<double> pi{0.4, 0.6, 0.2, 0.5, 0.7};
  std::vector<double> d(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) d[i] = aipw_pseudo(y[i], w[i], pi[i], 0.0, 0.0);
  const auto ht = group_ht_estimate(y, w, pi);
  const auto eif = group_efficient_estimate(d);
  EXPECT_NEAR(ht.psi_hat, eif.psi_hat, 1e-14);
  EXPECT_NEAR(ht.var_hat, eif.var_hat, 1e-14);
}

TEST(Grouping, MedianSplitOfFour) {
  const std::vector<double> scores{0.7, -0.2, 1.5, 0.1};
  const auto cuts = quantile_cutpoints(scores, 2);
  ASSERT_EQ(cuts.size(), 1u);
  std::vector<int> sizes(2, 0);
  for (const double s : scores) ++sizes[group_of(s, cuts)];
  EXPECT_EQ(sizes[0], 2);
  EXPECT_EQ(sizes[1], 2);
}

TEST(Grouping, TiesGoToLowerGroup) {
  const std::vector<double> cuts{1.0, 2.0};
  EXPECT_EQ(group_of(1.0, cuts), 0u);
  EXPECT_EQ(group_of(1.0000001, cuts), 1u);
  EXPECT_EQ(group_of(2.0, cuts), 1u);
  EXPECT_EQ(group_of(5.0, cuts), 2u);
}

TEST(Grouping, EmpiricalQuantile) {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  EXPECT_DOUBLE_EQ(empirical_quantile(v, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(empirical_quantile(v, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(empirical_quantile(v, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(empirical_quantile(v, 0.25), 1.75);
}

TEST(GroupLearner, PartitionAndMonotone) {
  const auto d = heterogeneous(600, 1);
  const auto fit = fit_group_learner_detailed(d, fast_config(5, 2));
  const auto& est = fit.model.estimates();
  EXPECT_EQ(fit.auxiliary_rows.size() + fit.estimation_rows.size(), d.size());
  std::vector<int> seen(d.size(), 0);
  for (const auto r : fit.auxiliary_rows) ++seen[r];
  for (const auto r : fit.estimation_rows) ++seen[r];
  for (const int c : seen) EXPECT_EQ(c, 1);

  std::size_t total = 0;
  for (const auto ng : est.n_g) total += ng;
  EXPECT_EQ(total, fit.estimation_rows.size());
  EXPECT_TRUE(std::is_sorted(est.cutpoints.begin(), est.cutpoints.end()));

  std::vector<std::pair<double, std::size_t>> by_score;
  for (std::size_t i = 0; i < fit.estimation_rows.size(); ++i) {
    by_score.emplace_back(fit.model.first_stage(d.x(fit.estimation_rows[i])), fit.group_of_row[i]);
  }
  std::sort(by_score.begin(), by_score.end());
  for (std::size_t i = 1; i < by_score.size(); ++i) EXPECT_LE(by_score[i - 1].second, by_score[i].second);

  // The first stage ranks a strong linear effect well.
  for (std::size_t g = 1; g < est.groups(); ++g) EXPECT_GT(est.psi_hat[g], est.psi_hat[g - 1]);
}

TEST(GroupLearner, AggregationIdentity) {
  const auto d = heterogeneous(500, 3);
  for (const auto estimator : {GroupEstimator::eif, GroupEstimator::ht}) {
    auto cfg = fast_config(4, 4);
    cfg.second_stage_estimator = estimator;
    const auto fit = fit_group_learner_detailed(d, cfg);
    const auto& est = fit.model.estimates();
    double mean = 0.0;
    for (const double v : fit.pseudo_outcomes) mean += v;
    const double n = static_cast<double>(fit.pseudo_outcomes.size());
    mean /= n;
    double weighted = 0.0;
    for (std::size_t g = 0; g < est.groups(); ++g) weighted += static_cast<double>(est.n_g[g]) / n * est.psi_hat[g];
    EXPECT_NEAR(weighted, mean, 1e-12);
  }
}

TEST(GroupLearner, IntervalHalfWidth) {
  const auto d = heterogeneous(500, 5);
  for (const auto kind : {CriticalValue::normal, CriticalValue::student_t}) {
    auto cfg = fast_config(5, 6);
    cfg.ci_level = 0.9;
    cfg.critical_value = kind;
    const auto est = fit_group_learner(d, cfg);
    for (std::size_t g = 0; g < est.groups(); ++g) {
      const double half = critical_value(0.9, kind, est.n_g[g]) * std::sqrt(est.var_hat[g]);
      EXPECT_NEAR(est.ci_hi[g] - est.psi_hat[g], half, 1e-12);
      EXPECT_NEAR(est.psi_hat[g] - est.ci_lo[g], half, 1e-12);
      EXPECT_GE(est.var_hat[g], 0.0);
    }
  }
}

TEST(GroupLearner, Deterministic) {
  const auto d = heterogeneous(400, 7);
  const auto a = fit_group_learner(d, fast_config(3, 8));
  const auto b = fit_group_learner(d, fast_config(3, 8));
  EXPECT_EQ(a.psi_hat, b.psi_hat);
  EXPECT_EQ(a.cutpoints, b.cutpoints);
}

TEST(GroupLearner, TooManyGroups) {
  const auto d = heterogeneous(20, 9);
  try {
    fit_group_learner(d, fast_config(6, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::grouping_degenerate);
  }
}

TEST(GroupLearner, TiedScoresNameTheGroup) {
  // A constant first stage puts every estimation row in the lowest group.
  Stream rng(10);
  std::vector<double> x(100), y(100);
  std::vector<int> w(100);
  for (std::size_t i = 0; i < 100; ++i) {
    x[i] = rng.uniform(-1.0, 1.0);
    w[i] = static_cast<int>(i % 2);
    y[i] = 1.0;
  }
  const Dataset d(1, x, y, w);
  auto cfg = fast_config(3, 2);
  cfg.first_stage = FirstStage::plugin;
  try {
    fit_group_learner(d, cfg, std::vector<double>(100, 0.5));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::grouping_degenerate);
    EXPECT_NE(std::string(e.what()).find("group 2"), std::string::npos) << e.what();
  }
}

TEST(GroupLearner, PredictUsesGroupEstimate) {
  const auto d = heterogeneous(400, 11);
  const auto fit = fit_group_learner_detailed(d, fast_config(4, 12));
  for (double q = -1.0; q <= 1.0; q += 0.1) {
    const double v[] = {q};
    EXPECT_EQ(fit.model.predict(v), fit.model.estimates().psi_hat[fit.model.group(v)]);
  }
}

// Replication properties on the zero-effect design with known strong selection.

TEST(GroupLearnerReplication, KnownPropensityUnbiased) {
  const std::size_t reps = 500;
  std::vector<std::vector<double>> psi(5);
  for (std::size_t r = 0; r < reps; ++r) {
    const auto s = sample_1d({PropensityMode::strong_selection, 0.0, false, 1000, derive_seed(77, {r})});
    GroupConfig cfg;
    cfg.first_stage = FirstStage::plugin;
    cfg.seed = derive_seed(78, {r});
    const auto est = fit_group_learner(s.dataset, cfg, s.true_pi);
    for (std::size_t g = 0; g < 5; ++g) psi[g].push_back(est.psi_hat[g]);
  }
  for (std::size_t g = 0; g < 5; ++g) {
    double mean = 0.0;
    for (const double v : psi[g]) mean += v;
    mean /= reps;
    double ss = 0.0;
    for (const double v : psi[g]) ss += (v - mean) * (v - mean);
    const double se = std::sqrt(ss / (reps - 1) / reps);
    EXPECT_LT(std::abs(mean), 3.0 * se) << "group " << g + 1;
  }
}

TEST(GroupLearnerReplication, IntervalCoverage) {
  const std::size_t reps = 200;
  std::size_t covered = 0;
  std::size_t all_covered = 0;
  for (std::size_t r = 0; r < reps; ++r) {
    const auto s = sample_1d({PropensityMode::strong_selection, 0.0, false, 2000, derive_seed(91, {r})});
    GroupConfig cfg;
    cfg.seed = derive_seed(92, {r});
    const auto est = fit_group_learner(s.dataset, cfg, s.true_pi);
    std::size_t inside = 0;
    for (std::size_t g = 0; g < 5; ++g) inside += est.ci_lo[g] <= 0.0 && 0.0 <= est.ci_hi[g];
    covered += inside;
    all_covered += inside == 5;
  }
  const double rate = static_cast<double>(covered) / static_cast<double>(5 * reps);
  EXPECT_GT(rate, 0.92);
  EXPECT_LT(rate, 0.98);
  std::cout << "per-group coverage " << rate << ", all five covered in " << all_covered << "/" << reps << '\n';
}
