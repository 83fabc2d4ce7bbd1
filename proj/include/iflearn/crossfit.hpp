#pragma once

// First stage of the IF-learner: nuisance regressions predicted strictly out
// of fold.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "iflearn/data.hpp"
#include "iflearn/error.hpp"
#include "iflearn/learners.hpp"
#include "iflearn/rng.hpp"

namespace iflearn {

enum class NuisanceMode { crossfit, out_of_bag };
enum class NuisanceRole { mu0, mu1, pi };

inline constexpr std::size_t kMaxFoldRedraws = 100;

struct CrossfitConfig {
  std::size_t folds = 5;
  LearnerSpec outcome;
  LearnerSpec propensity;
  std::uint64_t seed = 0;
  ClipConfig clip;
  bool binary_outcome = false;
  NuisanceMode mode = NuisanceMode::crossfit;
  // Skip the w=0 regression for targets that never use it (MAR mean, HT).
  bool fit_control_arm = true;

  void validate() const {
    if (folds < 2) fail(ErrorKind::config, "crossfit needs at least 2 folds");
    outcome.validate();
    propensity.validate();
    clip.validate();
  }
};

/// Reported once per fitted nuisance model; lets callers audit which rows
/// trained a model and which rows it predicted.
struct FitEvent {
  NuisanceRole role;
  std::size_t fold;
  std::span<const std::size_t> training_rows;
  std::span<const std::size_t> predicted_rows;
};

using FitObserver = std::function<void(const FitEvent&)>;
using PropensityFn = std::function<double(std::span<const double>)>;

namespace detail {

struct Subset {
  Matrix x;
  std::vector<double> y;
};

inline Subset gather(const Dataset& data, std::span<const std::size_t> rows, bool target_is_w) {
  Subset s{Matrix(rows.size(), data.dim()), {}};
  s.y.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto xr = data.x(rows[i]);
    std::copy(xr.begin(), xr.end(), s.x.row(i).begin());
    s.y.push_back(target_is_w ? static_cast<double>(data.w(rows[i])) : data.y(rows[i]));
  }
  return s;
}

inline FittedModel fit_outcome(const CrossfitConfig& cfg, const Subset& s, std::uint64_t seed) {
  return cfg.binary_outcome ? fit_probability(cfg.outcome, s.x, s.y, seed, cfg.clip.probability)
                            : fit(cfg.outcome, s.x, s.y, seed);
}

inline std::vector<std::size_t> arm_rows(const Dataset& data, std::span<const std::size_t> rows, int arm) {
  std::vector<std::size_t> out;
  for (const std::size_t r : rows) {
    if (data.w(r) == arm) out.push_back(r);
  }
  return out;
}

inline bool folds_usable(const Dataset& data, const FoldAssignment& folds, bool need_control, bool need_treated) {
  for (std::size_t k = 0; k < folds.folds; ++k) {
    bool has0 = false;
    bool has1 = false;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (folds.fold_of[i] == k) continue;
      (data.w(i) == 0 ? has0 : has1) = true;
    }
    if ((need_control && !has0) || (need_treated && !has1)) return false;
  }
  return true;
}

inline void check_inputs(const Dataset& data, const CrossfitConfig& cfg) {
  cfg.validate();
  data.require_both_arms();
  if (cfg.binary_outcome && !data.binary_outcome()) {
    fail(ErrorKind::config, "binary_outcome is set but the outcome column is not 0/1");
  }
  if (cfg.folds > data.size()) {
    fail(ErrorKind::invalid_fold_count, std::to_string(cfg.folds) + " folds for " + std::to_string(data.size()) + " rows");
  }
}

inline FoldAssignment draw_folds(const Dataset& data, const CrossfitConfig& cfg, bool need_control) {
  for (std::size_t attempt = 0; attempt < kMaxFoldRedraws; ++attempt) {
    auto folds = make_folds(data.size(), cfg.folds, derive_seed(cfg.seed, {0xF01D, attempt}));
    if (folds_usable(data, folds, need_control, true)) return folds;
  }
  fail(ErrorKind::degenerate_arm, "no fold draw in " + std::to_string(kMaxFoldRedraws) +
                                      " attempts left both treatment arms in every training complement");
}

inline NuisanceEstimates crossfit_with(const Dataset& data, const CrossfitConfig& cfg, const FoldAssignment& folds,
                                       const std::vector<double>* known_pi, const FitObserver& observer) {
  const std::size_t n = data.size();
  if (folds.size() != n) fail(ErrorKind::shape, "fold assignment length does not match dataset");
  NuisanceEstimates out{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};

  for (std::size_t k = 0; k < folds.folds; ++k) {
    const auto train = folds.rows_not_in(k);
    const auto held = folds.rows_in(k);
    if (held.empty()) fail(ErrorKind::invalid_fold_count, "fold " + std::to_string(k) + " is empty");

    auto fit_arm = [&](int arm, NuisanceRole role, std::vector<double>& target) {
      const auto rows = arm_rows(data, train, arm);
      if (rows.empty()) {
        fail(ErrorKind::degenerate_arm, "training complement of fold " + std::to_string(k) + " has no w=" +
                                            std::to_string(arm) + " rows");
      }
      const auto model = fit_outcome(cfg, gather(data, rows, false), derive_seed(cfg.seed, {k, static_cast<std::uint64_t>(role)}));
      for (const std::size_t r : held) target[r] = model.predict(data.x(r));
      if (observer) observer({role, k, rows, held});
    };

    if (cfg.fit_control_arm) fit_arm(0, NuisanceRole::mu0, out.mu0_hat);
    fit_arm(1, NuisanceRole::mu1, out.mu1_hat);

    if (!known_pi) {
      const auto s = gather(data, train, true);
      const auto model = fit_probability(cfg.propensity, s.x, s.y,
                                         derive_seed(cfg.seed, {k, static_cast<std::uint64_t>(NuisanceRole::pi)}),
                                         cfg.clip.propensity);
      for (const std::size_t r : held) out.pi_hat[r] = model.predict(data.x(r));
      if (observer) observer({NuisanceRole::pi, k, train, held});
    }
  }
  if (known_pi) out.pi_hat = *known_pi;
  return out;
}

inline NuisanceEstimates out_of_bag_with(const Dataset& data, const CrossfitConfig& cfg,
                                         const std::vector<double>* known_pi) {
  if (cfg.outcome.kind != LearnerKind::forest || (!known_pi && cfg.propensity.kind != LearnerKind::forest)) {
    fail(ErrorKind::config, "out-of-bag nuisance mode requires forest learners");
  }
  const std::size_t n = data.size();
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  NuisanceEstimates out{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};

  auto fit_arm = [&](int arm, NuisanceRole role, std::vector<double>& target) {
    const auto rows = arm_rows(data, all, arm);
    const auto model = fit_outcome(cfg, gather(data, rows, false), derive_seed(cfg.seed, {0x00B, static_cast<std::uint64_t>(role)}));
    std::vector<std::size_t> position(n, n);
    for (std::size_t p = 0; p < rows.size(); ++p) position[rows[p]] = p;
    for (std::size_t i = 0; i < n; ++i) {
      target[i] = position[i] < n ? model.predict_out_of_bag(position[i], data.x(i)) : model.predict(data.x(i));
    }
  };
  if (cfg.fit_control_arm) fit_arm(0, NuisanceRole::mu0, out.mu0_hat);
  fit_arm(1, NuisanceRole::mu1, out.mu1_hat);

  if (known_pi) {
    out.pi_hat = *known_pi;
  } else {
    const auto s = gather(data, all, true);
    const auto model = fit_probability(cfg.propensity, s.x, s.y,
                                       derive_seed(cfg.seed, {0x00B, static_cast<std::uint64_t>(NuisanceRole::pi)}),
                                       cfg.clip.propensity);
    for (std::size_t i = 0; i < n; ++i) out.pi_hat[i] = model.predict_out_of_bag(i, data.x(i));
  }
  return out;
}

}  // namespace detail

/// Cross-fitted nuisances: mu0 on w=0 rows, mu1 on w=1 rows, pi on all rows
/// with target w, each predicted only on the fold its training set excluded.
/// Folds are redrawn (up to 100 times) until every training complement holds
/// both arms.
inline NuisanceEstimates crossfit_nuisances(const Dataset& data, const CrossfitConfig& cfg,
                                            const FitObserver& observer = {}) {
  detail::check_inputs(data, cfg);
  if (cfg.mode == NuisanceMode::out_of_bag) return detail::out_of_bag_with(data, cfg, nullptr);
  const auto folds = detail::draw_folds(data, cfg, true);
  return detail::crossfit_with(data, cfg, folds, nullptr, observer);
}

/// Same as above with a caller-supplied fold assignment (no redraws).
inline NuisanceEstimates crossfit_nuisances(const Dataset& data, const CrossfitConfig& cfg,
                                            const FoldAssignment& folds, const FitObserver& observer = {}) {
  detail::check_inputs(data, cfg);
  if (folds.folds != cfg.folds) fail(ErrorKind::config, "fold assignment does not match configured fold count");
  return detail::crossfit_with(data, cfg, folds, nullptr, observer);
}

/// Known propensities given per row; only the outcome regressions are fitted.
inline NuisanceEstimates fixed_propensity_values(const Dataset& data, const CrossfitConfig& cfg,
                                                 std::span<const double> pi_values, const FitObserver& observer = {}) {
  detail::check_inputs(data, cfg);
  if (pi_values.size() != data.size()) fail(ErrorKind::shape, "propensity vector length does not match dataset");
  std::vector<double> pi(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double v = pi_values[i];
    if (!(v > 0.0 && v < 1.0)) {
      fail(ErrorKind::domain, "known propensity " + std::to_string(v) + " at row " + std::to_string(i) +
                                  " is outside (0, 1)");
    }
    pi[i] = clip(v, cfg.clip.propensity);
  }
  if (cfg.mode == NuisanceMode::out_of_bag) return detail::out_of_bag_with(data, cfg, &pi);
  const auto folds = detail::draw_folds(data, cfg, cfg.fit_control_arm);
  return detail::crossfit_with(data, cfg, folds, &pi, observer);
}

/// Known propensity function pi(x).
inline NuisanceEstimates fixed_propensity(const Dataset& data, const CrossfitConfig& cfg, const PropensityFn& pi_fn,
                                          const FitObserver& observer = {}) {
  std::vector<double> pi(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) pi[i] = pi_fn(data.x(i));
  return fixed_propensity_values(data, cfg, pi, observer);
}

}  // namespace iflearn
