#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "iflearn/simulate.hpp"

using namespace iflearn;

namespace {

struct ConstantModel {
  double c;
  double predict(std::span<const double>) const { return c; }
};

struct TruthModel {
  double predict(std::span<const double> x) const { return xi(x[0]) * xi(x[1]); }
};

// Treated fraction per true-propensity bin stays within 3 binomial SEs.
void expect_calibrated(const LabeledSample& s, double width) {
  const auto bins = static_cast<std::size_t>(std::ceil(1.0 / width));
  std::vector<double> pi_sum(bins, 0.0), treated(bins, 0.0), count(bins, 0.0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto b = std::min(bins - 1, static_cast<std::size_t>(s.true_pi[i] / width));
    pi_sum[b] += s.true_pi[i];
    treated[b] += s.dataset.w(i);
    count[b] += 1.0;
  }
  for (std::size_t b = 0; b < bins; ++b) {
    if (count[b] < 100) continue;
    const double p = pi_sum[b] / count[b];
    const double se = std::sqrt(p * (1.0 - p) / count[b]);
    EXPECT_LT(std::abs(treated[b] / count[b] - p), 3.0 * se) << "bin " << b;
  }
}

ExperimentConfig tiny_experiment() {
  ExperimentConfig c;
  c.dgp = Design1d{};
  c.methods = {Method::plugin, Method::if_learner, Method::oracle};
  c.n_grid = {60, 100};
  c.replications = 4;
  c.test_size = 100;
  c.seed = 99;
  c.learner.crossfit.outcome = LearnerSpec::make_kernel(0.2);
  c.learner.crossfit.propensity = LearnerSpec::make_kernel(0.5);
  c.learner.second_stage = LearnerSpec::make_kernel(0.3);
  return c;
}

}  // namespace

TEST(Dgp1d, PiecewiseBaseline) {
  EXPECT_DOUBLE_EQ(mu0_piecewise(-1.0), 0.5);
  EXPECT_DOUBLE_EQ(mu0_piecewise(0.0), -0.875);
  EXPECT_DOUBLE_EQ(mu0_piecewise(0.25), 1.0625);
  EXPECT_DOUBLE_EQ(mu0_piecewise(1.0), 1.125);
}

TEST(Dgp1d, NoiseVariance) {
  EXPECT_DOUBLE_EQ(noise_variance_1d(0.0), 0.1);
  EXPECT_DOUBLE_EQ(noise_variance_1d(0.5), 0.3);
}

TEST(Dgp1d, Propensities) {
  EXPECT_EQ(propensity_1d(PropensityMode::strong_selection, 0.0, -0.3), 0.1);
  EXPECT_EQ(propensity_1d(PropensityMode::strong_selection, 0.0, 0.3), 0.9);
  EXPECT_EQ(propensity_1d(PropensityMode::constant_half, 0.0, 0.7), 0.5);
  EXPECT_DOUBLE_EQ(propensity_1d(PropensityMode::hidden_selection, 0.5, -0.8), 0.5 + 0.5 * 0.5 * 0.8 / 2.0);
  EXPECT_EQ(nominal_propensity_1d(PropensityMode::hidden_selection, 0.5, -0.8), 0.5);
  EXPECT_EQ(nominal_propensity_1d(PropensityMode::strong_selection, 0.0, 0.3), 0.9);
}

TEST(Dgp1d, BinaryProbability) {
  EXPECT_DOUBLE_EQ(binary_probability_1d(mu0_piecewise(1.0)), 0.75);
  EXPECT_EQ(binary_probability_1d(-1.0), 0.01);
  EXPECT_EQ(binary_probability_1d(5.0), 0.99);
}

TEST(Dgp1d, SampleShapeAndTruth) {
  const auto s = sample_1d({PropensityMode::hidden_selection, 0.4, false, 500, 3});
  EXPECT_EQ(s.size(), 500u);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double x = s.dataset.x(i)[0];
    EXPECT_GE(x, -1.0);
    EXPECT_LE(x, 1.0);
    EXPECT_EQ(s.true_tau[i], 0.0);
    EXPECT_EQ(s.nominal_pi[i], 0.5);
    EXPECT_GT(s.true_pi[i], 0.0);
    EXPECT_LT(s.true_pi[i], 1.0);
  }
  const auto b = sample_1d({PropensityMode::strong_selection, 0.0, true, 500, 3});
  EXPECT_TRUE(b.dataset.binary_outcome());
  for (std::size_t i = 0; i < b.size(); ++i) EXPECT_DOUBLE_EQ(b.true_tau[i], 1.0);
}

TEST(Dgp1d, Deterministic) {
  const auto a = sample_1d({PropensityMode::strong_selection, 0.0, false, 200, 8});
  const auto b = sample_1d({PropensityMode::strong_selection, 0.0, false, 200, 8});
  const auto c = sample_1d({PropensityMode::strong_selection, 0.0, false, 200, 9});
  EXPECT_TRUE(std::equal(a.dataset.outcomes().begin(), a.dataset.outcomes().end(), b.dataset.outcomes().begin()));
  EXPECT_FALSE(std::equal(a.dataset.outcomes().begin(), a.dataset.outcomes().end(), c.dataset.outcomes().begin()));
}

TEST(Dgp1d, InvalidSelectionStrength) {
  EXPECT_THROW(sample_1d({PropensityMode::hidden_selection, 1.0, false, 10, 0}), Error);
}

TEST(Dgp1d, PropensityCalibration) {
  for (const auto mode : {PropensityMode::constant_half, PropensityMode::strong_selection,
                          PropensityMode::hidden_selection}) {
    expect_calibrated(sample_1d({mode, 0.9, false, 100000, 11}), 0.02);
  }
}

TEST(Dgp1d, NoiseCalibration) {
  const auto s = sample_1d({PropensityMode::constant_half, 0.0, false, 100000, 12});
  for (const double centre : {-0.75, -0.25, 0.0, 0.3, 0.5, 0.9}) {
    double sum = 0.0, ss = 0.0, count = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double x = s.dataset.x(i)[0];
      if (std::abs(x - centre) > 0.02) continue;
      const double r = s.dataset.y(i) - s.true_mu0[i];
      sum += r;
      ss += r * r;
      count += 1.0;
    }
    const double var = ss / count - (sum / count) * (sum / count);
    EXPECT_NEAR(var / noise_variance_1d(centre), 1.0, 0.1) << "x=" << centre;
  }
}

TEST(Dgp10d, Xi) {
  EXPECT_DOUBLE_EQ(xi(1.0 / 3.0), 1.5);
  EXPECT_NEAR(xi(0.0), 1.0 + 1.0 / (1.0 + std::exp(20.0 / 3.0)), 1e-15);
  EXPECT_NEAR(xi(0.0), 1.00127, 1e-5);
  EXPECT_NEAR(xi(-50.0), 1.0, 1e-15);
  double prev = xi(-1.0);
  for (int i = 1; i <= 400; ++i) {
    const double t = -1.0 + i * 0.005;
    const double v = xi(t);
    EXPECT_GT(v, prev);
    EXPECT_LT(v, 2.0);
    prev = v;
  }
}

TEST(Dgp10d, BetaDensity) {
  EXPECT_EQ(beta24_density(0.0), 0.0);
  EXPECT_EQ(beta24_density(1.0), 0.0);
  EXPECT_DOUBLE_EQ(beta24_density(0.25), 2.109375);
  const int m = 10000;
  double integral = 0.0;
  for (int i = 0; i < m; ++i) {
    const double a = static_cast<double>(i) / m;
    const double b = static_cast<double>(i + 1) / m;
    integral += 0.5 * (beta24_density(a) + beta24_density(b)) * (b - a);
  }
  EXPECT_NEAR(integral, 1.0, 1e-6);
  try {
    beta24_density(1.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::domain);
  }
  EXPECT_THROW(beta24_density(-0.1), Error);
}

TEST(Dgp10d, FunctionValues) {
  std::vector<double> x(kDim10d, 0.5);
  x[2] = 0.0;
  EXPECT_DOUBLE_EQ(propensity_10d(true, x), 0.25);
  x[2] = 0.25;
  EXPECT_DOUBLE_EQ(propensity_10d(true, x), 0.77734375);
  EXPECT_EQ(propensity_10d(false, x), 0.5);
  x[0] = x[1] = 1.0 / 3.0;
  EXPECT_DOUBLE_EQ(effect_10d(Effect10d::xi_product, x), 2.25);
  x[2] = 0.75;
  EXPECT_DOUBLE_EQ(effect_10d(Effect10d::three_mu0, x), 1.5);
  EXPECT_EQ(effect_10d(Effect10d::zero, x), 0.0);
  EXPECT_EQ(mu0_10d(false, x), 0.0);
  EXPECT_DOUBLE_EQ(mu0_10d(true, x), 0.5);
}

TEST(Dgp10d, SampleTruth) {
  const auto z = sample_10d({true, Effect10d::zero, 300, 4});
  for (const double t : z.true_tau) EXPECT_EQ(t, 0.0);
  const auto s = sample_10d({true, Effect10d::three_mu0, 300, 4});
  EXPECT_EQ(s.dataset.dim(), kDim10d);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto x = s.dataset.x(i);
    EXPECT_EQ(s.true_tau[i], 3.0 * (2.0 * x[2] - 1.0));
    for (const double v : x) {
      EXPECT_GE(v, 0.0);
      EXPECT_LT(v, 1.0);
    }
  }
}

TEST(Dgp10d, PropensityCalibration) {
  expect_calibrated(sample_10d({true, Effect10d::zero, 100000, 13}), 0.05);
  expect_calibrated(sample_10d({false, Effect10d::zero, 100000, 14}), 0.05);
}

TEST(Evaluate, Mse) {
  const auto s = sample_10d({false, Effect10d::xi_product, 200, 5});
  EXPECT_EQ(evaluate_mse(TruthModel{}, s), 0.0);
  const auto z = sample_10d({false, Effect10d::zero, 200, 5});
  EXPECT_NEAR(evaluate_mse(ConstantModel{0.3}, z), 0.09, 1e-15);
  EXPECT_THROW(evaluate_mse(ConstantModel{0.0}, LabeledSample{}), Error);
}

TEST(Evaluate, RiskRatioMask) {
  const auto s = sample_1d({PropensityMode::constant_half, 0.0, true, 2000, 6});
  // Rows with clamped arm probabilities are skipped, so a model that is exact
  // only on the kept rows scores zero.
  EXPECT_EQ(evaluate_mse(ConstantModel{1.0}, s, true), 0.0);
  std::size_t masked = 0;
  for (const double p : s.true_mu0) masked += p < kRiskRatioEvalFloor;
  EXPECT_GT(masked, 0u);
}

TEST(Replications, SingleReplicationHasZeroSe) {
  auto cfg = tiny_experiment();
  cfg.replications = 1;
  cfg.n_grid = {80};
  const auto table = run_replications(cfg);
  const auto rows = summarize_replications(table, "one", 1000.0);
  ASSERT_EQ(rows.size(), 3u);
  for (std::size_t m = 0; m < 3; ++m) {
    EXPECT_EQ(rows[m].mean_mse, table.mse[0][0][m]);
    EXPECT_EQ(rows[m].se_mse, 0.0);
    EXPECT_EQ(rows[m].replications_kept, 1u);
  }
}

TEST(Replications, DiscardRule) {
  ReplicationTable t{{100}, {Method::plugin, Method::if_learner}, {}};
  t.mse = {{{1.0, 2.0}, {3.0, 1e6}, {5.0, 6.0}, {2.0, std::nan("")}}};
  const auto rows = summarize_replications(t, "x", 1000.0);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].replications_kept, 2u);
  EXPECT_DOUBLE_EQ(rows[0].mean_mse, 3.0);
  EXPECT_DOUBLE_EQ(rows[1].mean_mse, 4.0);
  EXPECT_DOUBLE_EQ(rows[0].se_mse, std::sqrt(8.0 / 1.0 / 2.0));

  t.mse = {{{1e4, 1.0}}};
  try {
    summarize_replications(t, "x", 1000.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::degenerate_experiment);
  }
}

TEST(Replications, IndependentOfThreadCount) {
  const auto cfg = tiny_experiment();
  const auto a = run_replications(cfg, 1);
  const auto b = run_replications(cfg, 4);
  const auto c = run_replications(cfg, 1);
  EXPECT_EQ(a.mse, b.mse);
  EXPECT_EQ(a.mse, c.mse);
  std::ostringstream sa, sb;
  write_summary_csv(sa, summarize_replications(a, "t", 1000.0));
  write_summary_csv(sb, summarize_replications(b, "t", 1000.0));
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_EQ(sa.str().substr(0, sa.str().find('\n')), "experiment_id,method,n,replications_kept,mean_mse,se_mse");
}

TEST(Replications, ErrorsNameTheReplication) {
  auto cfg = tiny_experiment();
  cfg.n_grid = {6};
  cfg.learner.crossfit.folds = 5;
  cfg.methods = {Method::if_learner};
  try {
    run_replications(cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("replication 0 (n=6) method if_learner"), std::string::npos) << e.what();
  }
}

TEST(Replications, TenDimensionalRuns) {
  ExperimentConfig cfg;
  cfg.dgp = Design10d{true, Effect10d::three_mu0};
  cfg.methods = {Method::plugin, Method::if_learner, Method::oracle};
  cfg.n_grid = {200};
  cfg.replications = 2;
  cfg.test_size = 200;
  cfg.known_propensity = false;
  cfg.learner.crossfit.outcome = LearnerSpec::make_knn(10);
  cfg.learner.crossfit.propensity = LearnerSpec::make_knn(20);
  cfg.learner.second_stage = LearnerSpec::make_knn(10);
  const auto t = run_replications(cfg);
  for (const auto& rep : t.mse[0]) {
    for (const double v : rep) EXPECT_TRUE(std::isfinite(v));
  }
}

TEST(ExperimentConfig, Validation) {
  auto c = tiny_experiment();
  EXPECT_NO_THROW(c.validate());
  c.methods.clear();
  EXPECT_THROW(c.validate(), Error);
  c = tiny_experiment();
  c.dgp = Design1d{PropensityMode::constant_half, 0.0, true};
  EXPECT_THROW(c.validate(), Error);
  c.learner.crossfit.binary_outcome = true;
  c.learner.pseudo.target = PseudoTarget::risk_ratio;
  EXPECT_NO_THROW(c.validate());
  c.methods = {Method::group_if_eif};
  EXPECT_THROW(c.validate(), Error);
}
