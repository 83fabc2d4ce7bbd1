#pragma once

// The IF-learner: cross-fit nuisances, turn every row into an out-of-fold
// pseudo-outcome, then regress the pseudo-outcomes on the covariates.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "iflearn/crossfit.hpp"
#include "iflearn/data.hpp"
#include "iflearn/error.hpp"
#include "iflearn/learners.hpp"
#include "iflearn/pseudo.hpp"
#include "iflearn/rng.hpp"
#include "iflearn/serialize.hpp"

namespace iflearn {

struct IFLearnerConfig {
  CrossfitConfig crossfit;
  PseudoOutcomeSpec pseudo;
  LearnerSpec second_stage;
  std::uint64_t seed = 0;  // second-stage seed; nuisance seeds come from crossfit.seed

  void validate() const {
    crossfit.validate();
    second_stage.validate();
    if (needs_binary_outcome(pseudo.target) && !crossfit.binary_outcome) {
      fail(ErrorKind::config, "risk_ratio and odds_ratio targets require binary_outcome");
    }
    if (!(pseudo.winsorize >= 0.0 && pseudo.winsorize < 0.5)) {
      fail(ErrorKind::config, "winsorize quantile must lie in [0, 0.5)");
    }
  }
};

inline void to_json(json& j, const IFLearnerConfig& c) {
  j = json{{"crossfit", c.crossfit}, {"pseudo", c.pseudo}, {"second_stage", c.second_stage}, {"seed", c.seed}};
}

/// Default learner for every stage: Gaussian kernel smoother with a
/// cross-validated bandwidth.
inline LearnerSpec default_learner() { return LearnerSpec::make_kernel_cv(default_bandwidth_grid()); }

inline IFLearnerConfig default_if_learner_config() {
  IFLearnerConfig c;
  c.crossfit.outcome = default_learner();
  c.crossfit.propensity = default_learner();
  c.second_stage = default_learner();
  return c;
}

/// Keys shared by every config that embeds an IF-learner.
inline const std::vector<std::string_view> kLearnerConfigKeys = {
    "target", "folds", "binary_outcome", "nuisance_mode", "outcome_learner", "propensity_learner",
    "second_stage", "clip", "winsorize", "seed"};

/// Reads the IF-learner keys of `j`; unknown-key checking is the caller's job.
inline IFLearnerConfig read_if_learner_config(const json& j) {
  IFLearnerConfig c = default_if_learner_config();
  if (j.contains("target")) c.pseudo.target = config::enum_value(config::kPseudoTargets, j["target"], "target");
  c.crossfit.folds = config::get<std::size_t>(j, "folds", c.crossfit.folds);
  c.crossfit.binary_outcome = config::get(j, "binary_outcome", c.crossfit.binary_outcome);
  if (j.contains("nuisance_mode")) {
    c.crossfit.mode = config::enum_value(config::kNuisanceModes, j["nuisance_mode"], "nuisance_mode");
  }
  if (j.contains("outcome_learner")) c.crossfit.outcome = j["outcome_learner"].get<LearnerSpec>();
  if (j.contains("propensity_learner")) c.crossfit.propensity = j["propensity_learner"].get<LearnerSpec>();
  if (j.contains("second_stage")) c.second_stage = j["second_stage"].get<LearnerSpec>();
  if (j.contains("clip")) c.crossfit.clip = j["clip"].get<ClipConfig>();
  c.pseudo.clip = c.crossfit.clip;
  c.pseudo.winsorize = config::get(j, "winsorize", c.pseudo.winsorize);
  c.seed = config::get<std::uint64_t>(j, "seed", c.seed);
  c.crossfit.seed = derive_seed(c.seed, {0xC0F1});
  c.validate();
  return c;
}

struct Provenance {
  std::string method;
  std::string config_hash;
  std::size_t n = 0;
  std::uint64_t seed = 0;
};

inline void to_json(json& j, const Provenance& p) {
  j = json{{"method", p.method}, {"config_hash", p.config_hash}, {"n", p.n}, {"seed", p.seed}};
}

/// A fitted estimate of the target function psi(x).
class TargetModel {
 public:
  TargetModel(FittedModel model, Provenance provenance)
      : model_(std::move(model)), provenance_(std::move(provenance)) {}

  double predict(std::span<const double> x) const { return model_.predict(x); }
  std::size_t dim() const { return model_.dim(); }
  const FittedModel& model() const { return model_; }
  const Provenance& provenance() const { return provenance_; }

 private:
  FittedModel model_;
  Provenance provenance_;
};

inline double predict_target(const TargetModel& model, std::span<const double> x) { return model.predict(x); }

/// Everything produced on the way to the target model.
struct IFLearnerFit {
  TargetModel model;
  NuisanceEstimates nuisances;
  std::vector<double> pseudo_outcomes;
};

/// True nuisance functions for the oracle learner. For the MAR mean, `mu1`
/// is the regression among observed rows.
struct NuisanceFunctions {
  std::function<double(std::span<const double>)> mu0;
  std::function<double(std::span<const double>)> mu1;
  std::function<double(std::span<const double>)> pi;
};

namespace detail {

inline IFLearnerFit fit_if_learner_impl(const Dataset& data, const IFLearnerConfig& cfg,
                                        std::optional<std::span<const double>> known_pi,
                                        const FitObserver& observer) {
  cfg.validate();
  if (data.size() < 2 * cfg.crossfit.folds) {
    fail(ErrorKind::insufficient_data, "IF-learner needs at least " + std::to_string(2 * cfg.crossfit.folds) +
                                           " rows for " + std::to_string(cfg.crossfit.folds) + " folds, got " +
                                           std::to_string(data.size()));
  }
  NuisanceEstimates nuisances;
  if (needs_treatment(cfg.pseudo.target)) {
    CrossfitConfig cf = cfg.crossfit;
    cf.fit_control_arm = uses_control_arm(cfg.pseudo.target);
    nuisances = known_pi ? fixed_propensity_values(data, cf, *known_pi, observer)
                         : crossfit_nuisances(data, cf, observer);
  }
  PseudoOutcomeSpec pseudo = cfg.pseudo;
  pseudo.clip = cfg.crossfit.clip;
  auto d = build_pseudo_outcomes(data, nuisances, pseudo);
  auto model = fit(cfg.second_stage, data.covariates(), d, cfg.seed);
  Provenance prov{"if_learner", config::hash_json(json(cfg)), data.size(), cfg.seed};
  return {TargetModel(std::move(model), std::move(prov)), std::move(nuisances), std::move(d)};
}

}  // namespace detail

/// Fits the IF-learner with estimated propensities.
inline IFLearnerFit fit_if_learner_detailed(const Dataset& data, const IFLearnerConfig& cfg,
                                            const FitObserver& observer = {}) {
  return detail::fit_if_learner_impl(data, cfg, std::nullopt, observer);
}

/// Fits the IF-learner with known per-row propensities.
inline IFLearnerFit fit_if_learner_detailed(const Dataset& data, const IFLearnerConfig& cfg,
                                            std::span<const double> known_pi, const FitObserver& observer = {}) {
  return detail::fit_if_learner_impl(data, cfg, known_pi, observer);
}

inline TargetModel fit_if_learner(const Dataset& data, const IFLearnerConfig& cfg) {
  return fit_if_learner_detailed(data, cfg).model;
}

/// Fits the IF-learner with a known propensity function pi(x).
inline TargetModel fit_if_learner(const Dataset& data, const IFLearnerConfig& cfg, const PropensityFn& known_pi) {
  std::vector<double> pi(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) pi[i] = known_pi(data.x(i));
  return fit_if_learner_detailed(data, cfg, pi).model;
}

/// Pseudo-outcomes evaluated at the true nuisances (no cross-fitting).
inline std::vector<double> oracle_pseudo_outcomes(const Dataset& data, const NuisanceFunctions& truth,
                                                  const PseudoOutcomeSpec& pseudo) {
  NuisanceEstimates exact;
  if (needs_treatment(pseudo.target)) {
    const std::size_t n = data.size();
    exact.mu0_hat.resize(n);
    exact.mu1_hat.resize(n);
    exact.pi_hat.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto x = data.x(i);
      exact.mu0_hat[i] = truth.mu0 ? truth.mu0(x) : 0.0;
      exact.mu1_hat[i] = truth.mu1(x);
      exact.pi_hat[i] = truth.pi(x);
    }
  }
  return build_pseudo_outcomes(data, exact, pseudo);
}

/// Infeasible benchmark: second-stage regression of the pseudo-outcomes built
/// from the true nuisance functions.
inline TargetModel fit_oracle_learner(const Dataset& data, const NuisanceFunctions& truth,
                                      const PseudoOutcomeSpec& pseudo, const LearnerSpec& second_stage,
                                      std::uint64_t seed) {
  const auto d = oracle_pseudo_outcomes(data, truth, pseudo);
  auto model = fit(second_stage, data.covariates(), d, seed);
  const json cfg{{"pseudo", pseudo}, {"second_stage", second_stage}, {"seed", seed}};
  return TargetModel(std::move(model), Provenance{"oracle", config::hash_json(cfg), data.size(), seed});
}

/// Plug-in baseline: arm regressions fitted on the full sample and combined
/// directly, with no bias correction.
class PluginModel {
 public:
  PluginModel(std::optional<FittedModel> mu0, FittedModel mu1, PseudoTarget target)
      : mu0_(std::move(mu0)), mu1_(std::move(mu1)), target_(target) {}

  double predict(std::span<const double> x) const {
    const double m1 = mu1_.predict(x);
    switch (target_) {
      case PseudoTarget::mar_mean:
      case PseudoTarget::regression_mean:
        return m1;
      case PseudoTarget::risk_ratio: return risk_ratio(mu0_->predict(x), m1);
      case PseudoTarget::odds_ratio: return odds_ratio(mu0_->predict(x), m1);
      default: return plugin_cate(mu0_->predict(x), m1);
    }
  }

  std::size_t dim() const { return mu1_.dim(); }
  const FittedModel& treated_model() const { return mu1_; }
  const std::optional<FittedModel>& control_model() const { return mu0_; }

 private:
  std::optional<FittedModel> mu0_;
  FittedModel mu1_;
  PseudoTarget target_;
};

/// Fits the plug-in baseline for `target`; binary outcomes use clipped
/// probability fits.
inline PluginModel fit_plugin_learner(const Dataset& data, const LearnerSpec& outcome, PseudoTarget target,
                                      bool binary_outcome, const ClipConfig& clip, std::uint64_t seed) {
  auto fit_rows = [&](std::span<const std::size_t> rows, std::uint64_t s) {
    const auto sub = detail::gather(data, rows, false);
    return binary_outcome ? fit_probability(outcome, sub.x, sub.y, s, clip.probability) : fit(outcome, sub.x, sub.y, s);
  };
  std::vector<std::size_t> all(data.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  if (target == PseudoTarget::regression_mean) return PluginModel(std::nullopt, fit_rows(all, seed), target);
  data.require_both_arms();
  const auto treated = detail::arm_rows(data, all, 1);
  if (target == PseudoTarget::mar_mean) {
    return PluginModel(std::nullopt, fit_rows(treated, derive_seed(seed, {1})), target);
  }
  const auto control = detail::arm_rows(data, all, 0);
  return PluginModel(fit_rows(control, derive_seed(seed, {0})), fit_rows(treated, derive_seed(seed, {1})), target);
}

}  // namespace iflearn
