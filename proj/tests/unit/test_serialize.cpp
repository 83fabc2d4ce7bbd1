#include <gtest/gtest.h>

#include <sstream>
#include <string>

#include "iflearn/iflearn.hpp"

using namespace iflearn;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::invalid_argument;
}

std::string message_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(LearnerJson, RoundTrip) {
  const LearnerSpec specs[] = {
      LearnerSpec::make_knn(7),
      LearnerSpec::make_kernel(0.3, KernelShape::epanechnikov),
      LearnerSpec::make_kernel_cv(default_bandwidth_grid()),
      LearnerSpec::make_forest(50, 3, 0.6, false, 4),
  };
  for (const auto& s : specs) {
    const json j = s;
    const auto back = j.get<LearnerSpec>();
    EXPECT_EQ(json(back), j);
  }
}

TEST(LearnerJson, StrictKeysAndEnums) {
  EXPECT_EQ(kind_of([] { json{{"kind", "knn"}, {"kk", 3}}.get<LearnerSpec>(); }), ErrorKind::config);
  EXPECT_EQ(kind_of([] { json{{"kind", "spline"}}.get<LearnerSpec>(); }), ErrorKind::config);
  EXPECT_NE(message_of([] { json{{"kind", "spline"}}.get<LearnerSpec>(); }).find("knn, kernel, forest"),
            std::string::npos);
  EXPECT_EQ(kind_of([] { json{{"kind", "kernel"}, {"shape", "box"}}.get<LearnerSpec>(); }), ErrorKind::config);
  EXPECT_EQ(kind_of([] { json{{"kind", 3}}.get<LearnerSpec>(); }), ErrorKind::config);
  EXPECT_EQ(kind_of([] { json{{"kind", "knn"}, {"k", 0}}.get<LearnerSpec>(); }), ErrorKind::hyperparameter);
}

TEST(ClipJson, RoundTripAndRange) {
  ClipConfig c;
  c.propensity = 0.05;
  const auto back = json(c).get<ClipConfig>();
  EXPECT_EQ(back.propensity, 0.05);
  EXPECT_EQ(back.probability, kDefaultProbabilityClip);
  EXPECT_EQ(kind_of([] { json{{"propensity", 0.6}}.get<ClipConfig>(); }), ErrorKind::config);
  EXPECT_EQ(kind_of([] { json{{"floor", 0.1}}.get<ClipConfig>(); }), ErrorKind::config);
}

TEST(LearnerConfig, Defaults) {
  const auto c = read_if_learner_config(json::object());
  EXPECT_EQ(c.pseudo.target, PseudoTarget::cate_aipw);
  EXPECT_EQ(c.crossfit.folds, 5u);
  EXPECT_EQ(json(c.second_stage), json(default_learner()));
  EXPECT_EQ(c.crossfit.seed, derive_seed(0, {0xC0F1}));
}

TEST(LearnerConfig, ReadsKeys) {
  const json j = {{"target", "risk_ratio"},
                  {"binary_outcome", true},
                  {"folds", 3},
                  {"second_stage", {{"kind", "knn"}, {"k", 5}}},
                  {"clip", {{"propensity", 0.02}}},
                  {"winsorize", 0.01},
                  {"seed", 42}};
  const auto c = read_if_learner_config(j);
  EXPECT_EQ(c.pseudo.target, PseudoTarget::risk_ratio);
  EXPECT_EQ(c.crossfit.folds, 3u);
  EXPECT_EQ(c.second_stage.kind, LearnerKind::knn);
  EXPECT_EQ(c.crossfit.clip.propensity, 0.02);
  EXPECT_EQ(c.pseudo.clip.propensity, 0.02);
  EXPECT_EQ(c.pseudo.winsorize, 0.01);
  EXPECT_EQ(c.seed, 42u);
}

TEST(LearnerConfig, Rejects) {
  EXPECT_EQ(kind_of([] { read_if_learner_config({{"target", "ate"}}); }), ErrorKind::config);
  EXPECT_EQ(kind_of([] { read_if_learner_config({{"target", "risk_ratio"}}); }), ErrorKind::config);
  EXPECT_EQ(kind_of([] { read_if_learner_config({{"winsorize", 0.5}}); }), ErrorKind::config);
  EXPECT_EQ(kind_of([] { read_if_learner_config({{"folds", 1}}); }), ErrorKind::config);
  EXPECT_EQ(kind_of([] { read_if_learner_config({{"nuisance_mode", "bagging"}}); }), ErrorKind::config);
}

TEST(ConfigHash, StableAndSensitive) {
  const json a = {{"x", 1}, {"y", {1, 2}}};
  const json b = json::parse(R"({"y":[1,2],"x":1})");
  EXPECT_EQ(config::hash_json(a), config::hash_json(b));
  EXPECT_EQ(config::hash_json(a).size(), 16u);
  EXPECT_NE(config::hash_json(a), config::hash_json(json{{"x", 2}, {"y", {1, 2}}}));
}

TEST(GroupConfigJson, ReadsAndRejects) {
  const auto c = read_group_config({{"groups", 4}, {"first_stage", "plugin"}, {"second_stage_estimator", "ht"},
                                    {"critical_value", "student_t"}, {"seed", 9}});
  EXPECT_EQ(c.groups, 4u);
  EXPECT_EQ(c.first_stage, FirstStage::plugin);
  EXPECT_EQ(c.second_stage_estimator, GroupEstimator::ht);
  EXPECT_EQ(c.critical_value, CriticalValue::student_t);
  EXPECT_EQ(c.seed, 9u);
  const json j = c;
  EXPECT_EQ(j["first_stage"], "plugin");
  EXPECT_EQ(kind_of([] { read_group_config({{"groups", 1}}); }), ErrorKind::config);
  EXPECT_EQ(kind_of([] { read_group_config({{"first_stage", "forest"}}); }), ErrorKind::config);
  EXPECT_EQ(kind_of([] { read_group_config({{"split_fraction", 1.0}}); }), ErrorKind::config);
}

TEST(GroupEstimatesOutput, CsvAndJson) {
  GroupEstimates e;
  e.cutpoints = {0.5};
  e.psi_hat = {1.0, 2.0};
  e.var_hat = {0.25, 0.5};
  e.ci_lo = {0.0, 1.0};
  e.ci_hi = {2.0, 3.0};
  e.n_g = {10, 12};
  std::ostringstream csv_text;
  write_group_csv(csv_text, e);
  EXPECT_EQ(csv_text.str(), "g,n_g,psi_hat,var_hat,ci_lo,ci_hi\n1,10,1,0.25,0,2\n2,12,2,0.5,1,3\n");
  const json j = e;
  ASSERT_EQ(j["groups"].size(), 2u);
  EXPECT_EQ(j["groups"][1]["g"], 2);
  EXPECT_EQ(j["groups"][1]["n_g"], 12);
  EXPECT_EQ(j["cutpoints"][0], 0.5);
}

TEST(ExperimentJson, ReadsMinimal) {
  const auto c = read_experiment_config(json::parse(R"({"methods":["if_learner"],"n_grid":[200],"replications":2})"));
  EXPECT_EQ(c.methods.size(), 1u);
  EXPECT_TRUE(std::holds_alternative<Design1d>(c.dgp));
  EXPECT_TRUE(c.known_propensity);
  EXPECT_EQ(c.learner.pseudo.target, PseudoTarget::cate_aipw);
  const json j = c;
  EXPECT_EQ(j["methods"][0], "if_learner");
  EXPECT_EQ(j["dgp"]["kind"], "1d");
  EXPECT_EQ(j["propensity"], "known");
}

TEST(ExperimentJson, BinaryDefaultsToRiskRatio) {
  const auto c = read_experiment_config(json::parse(
      R"({"dgp":{"kind":"1d","binary_outcome":true},"methods":["plugin","if_learner"],"n_grid":[100]})"));
  EXPECT_EQ(c.learner.pseudo.target, PseudoTarget::risk_ratio);
  EXPECT_TRUE(c.learner.crossfit.binary_outcome);
}

TEST(ExperimentJson, TenDimensional) {
  const auto c = read_experiment_config(json::parse(
      R"({"dgp":{"kind":"10d","confounded":true,"effect":"mu0_xi_product"},"methods":["oracle"],"n_grid":[100],
          "propensity":"estimated"})"));
  const auto& d = std::get<Design10d>(c.dgp);
  EXPECT_TRUE(d.confounded);
  EXPECT_EQ(d.effect, Effect10d::mu0_xi_product);
  EXPECT_FALSE(c.known_propensity);
}

TEST(ExperimentJson, Rejects) {
  const auto bad = [](const char* text) { return kind_of([&] { read_experiment_config(json::parse(text)); }); };
  EXPECT_EQ(bad(R"({"methods":[],"n_grid":[200]})"), ErrorKind::config);
  EXPECT_EQ(bad(R"({"methods":["if_learner"],"n_grid":[200],"replicates":3})"), ErrorKind::config);
  EXPECT_EQ(bad(R"({"methods":["t_learner"],"n_grid":[200]})"), ErrorKind::config);
  EXPECT_EQ(bad(R"({"methods":["plugin"]})"), ErrorKind::config);
  EXPECT_EQ(bad(R"({"methods":["plugin"],"n_grid":[200],"dgp":{"kind":"2d"}})"), ErrorKind::config);
  EXPECT_EQ(bad(R"({"methods":["plugin"],"n_grid":[200],"dgp":{"kind":"1d","b":1.5}})"), ErrorKind::config);
  EXPECT_EQ(bad(R"({"methods":["plugin"],"n_grid":[200],"dgp":{"kind":"10d","effect":"linear"}})"), ErrorKind::config);
  EXPECT_EQ(bad(R"({"methods":["plugin"],"n_grid":[200],"propensity":"oracle"})"), ErrorKind::config);
  EXPECT_EQ(bad(R"({"methods":["plugin"],"n_grid":[200],"experiment_id":"a,b"})"), ErrorKind::config);
  EXPECT_EQ(bad(R"({"methods":["plugin"],"n_grid":[200],"target":"mar_mean"})"), ErrorKind::config);
}

TEST(ProvenanceJson, Fields) {
  const json j = Provenance{"if_learner", "00ff", 10, 3};
  EXPECT_EQ(j["method"], "if_learner");
  EXPECT_EQ(j["config_hash"], "00ff");
  EXPECT_EQ(j["n"], 10);
  EXPECT_EQ(j["seed"], 3);
}
