#pragma once

// Group-IF-learner: split the sample, learn a first-stage ranking on the
// auxiliary half, group the estimation half by quantiles of that ranking and
// report within-group efficient (or Horvitz-Thompson) estimates.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "iflearn/csv.hpp"
#include "iflearn/data.hpp"
#include "iflearn/error.hpp"
#include "iflearn/iflearner.hpp"
#include "iflearn/pseudo.hpp"
#include "iflearn/rng.hpp"
#include "iflearn/serialize.hpp"

namespace iflearn {

enum class FirstStage { plugin, if_learner };
enum class GroupEstimator { ht, eif };
enum class CriticalValue { normal, student_t };

struct GroupConfig {
  std::size_t groups = 5;
  double split_fraction = 0.5;
  FirstStage first_stage = FirstStage::if_learner;
  GroupEstimator second_stage_estimator = GroupEstimator::eif;
  double ci_level = 0.95;
  CriticalValue critical_value = CriticalValue::normal;
  IFLearnerConfig learner = default_if_learner_config();
  std::uint64_t seed = 0;

  void validate() const {
    if (groups < 2) fail(ErrorKind::config, "group count must be at least 2");
    if (!(split_fraction > 0.0 && split_fraction < 1.0)) fail(ErrorKind::config, "split_fraction must lie in (0, 1)");
    if (!(ci_level > 0.0 && ci_level < 1.0)) fail(ErrorKind::config, "ci_level must lie in (0, 1)");
    if (second_stage_estimator == GroupEstimator::ht && learner.pseudo.target != PseudoTarget::cate_aipw &&
        learner.pseudo.target != PseudoTarget::cate_ht) {
      fail(ErrorKind::config, "the HT second stage is defined for treatment-effect targets only");
    }
    if (learner.pseudo.target == PseudoTarget::regression_mean) {
      fail(ErrorKind::config, "group learner needs a treatment or missingness indicator");
    }
    learner.validate();
  }
};

struct GroupStatistic {
  double psi_hat = 0.0;
  double var_hat = 0.0;
};

/// Mean of the pseudo-outcomes and the unbiased variance of that mean,
/// sum (D - mean)^2 / (n (n - 1)).
inline GroupStatistic group_efficient_estimate(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) fail(ErrorKind::variance_undefined, "group has " + std::to_string(n) + " rows; need at least 2");
  double sum = 0.0;
  for (const double v : values) sum += v;
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (const double v : values) ss += (v - mean) * (v - mean);
  return {mean, ss / (static_cast<double>(n) * static_cast<double>(n - 1))};
}

/// Horvitz-Thompson version: the same statistic over ht_pseudo values.
inline GroupStatistic group_ht_estimate(std::span<const double> y, std::span<const int> w, std::span<const double> pi,
                                        double propensity_floor = kDefaultPropensityClip) {
  if (y.size() != w.size() || y.size() != pi.size()) fail(ErrorKind::shape, "y, w and pi lengths differ");
  std::vector<double> d(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) d[i] = ht_pseudo(y[i], w[i], pi[i], propensity_floor);
  return group_efficient_estimate(d);
}

/// Two-sided critical value for a confidence level.
inline double critical_value(double level, CriticalValue kind, std::size_t n_g) {
  const double p = 1.0 - (1.0 - level) / 2.0;
  if (kind == CriticalValue::student_t) {
    return boost::math::quantile(boost::math::students_t(static_cast<double>(n_g - 1)), p);
  }
  return boost::math::quantile(boost::math::normal(), p);
}

/// Type-7 empirical quantile of sorted values.
inline double empirical_quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) fail(ErrorKind::empty_dataset, "quantile of an empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

/// G-1 cutpoints at the j/G quantiles of the scores.
inline std::vector<double> quantile_cutpoints(std::span<const double> scores, std::size_t groups) {
  std::vector<double> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> cuts(groups - 1);
  for (std::size_t j = 1; j < groups; ++j) {
    cuts[j - 1] = empirical_quantile(sorted, static_cast<double>(j) / static_cast<double>(groups));
  }
  return cuts;
}

/// Group index of a score; a score equal to a cutpoint joins the lower group.
inline std::size_t group_of(double score, std::span<const double> cutpoints) {
  return static_cast<std::size_t>(std::lower_bound(cutpoints.begin(), cutpoints.end(), score) - cutpoints.begin());
}

struct GroupEstimates {
  std::vector<double> cutpoints;
  std::vector<double> psi_hat;
  std::vector<double> var_hat;
  std::vector<double> ci_lo;
  std::vector<double> ci_hi;
  std::vector<std::size_t> n_g;
  double ci_level = 0.95;

  std::size_t groups() const { return psi_hat.size(); }
};

/// The fitted group learner; predicts the estimate of the group a point falls in.
class GroupModel {
 public:
  GroupModel(std::function<double(std::span<const double>)> score, GroupEstimates estimates)
      : score_(std::move(score)), estimates_(std::move(estimates)) {}

  double first_stage(std::span<const double> x) const { return score_(x); }
  std::size_t group(std::span<const double> x) const { return group_of(score_(x), estimates_.cutpoints); }
  double predict(std::span<const double> x) const { return estimates_.psi_hat[group(x)]; }
  const GroupEstimates& estimates() const { return estimates_; }

 private:
  std::function<double(std::span<const double>)> score_;
  GroupEstimates estimates_;
};

/// Full output of a group fit, including the estimation-split bookkeeping.
struct GroupFit {
  GroupModel model;
  std::vector<std::size_t> auxiliary_rows;
  std::vector<std::size_t> estimation_rows;
  std::vector<std::size_t> group_of_row;  // aligned with estimation_rows
  std::vector<double> pseudo_outcomes;    // aligned with estimation_rows
};

namespace detail {

inline std::vector<double> pick(std::span<const double> v, std::span<const std::size_t> rows) {
  std::vector<double> out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) out[i] = v[rows[i]];
  return out;
}

inline GroupFit fit_group_impl(const Dataset& data, const GroupConfig& cfg, std::optional<std::span<const double>> known_pi) {
  cfg.validate();
  data.require_treatment();
  const std::size_t n = data.size();
  if (known_pi && known_pi->size() != n) fail(ErrorKind::shape, "propensity vector length does not match dataset");

  const auto perm = random_permutation(n, derive_seed(cfg.seed, {0x5B17}));
  const auto n_aux = static_cast<std::size_t>(std::llround(cfg.split_fraction * static_cast<double>(n)));
  std::vector<std::size_t> aux(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_aux));
  std::vector<std::size_t> est(perm.begin() + static_cast<std::ptrdiff_t>(n_aux), perm.end());
  std::sort(aux.begin(), aux.end());
  std::sort(est.begin(), est.end());
  if (est.size() < 2 * cfg.groups) {
    fail(ErrorKind::grouping_degenerate, "estimation split has " + std::to_string(est.size()) + " rows; " +
                                             std::to_string(cfg.groups) + " groups need at least " +
                                             std::to_string(2 * cfg.groups));
  }
  const Dataset d_a = data.subset(aux);
  const Dataset d_e = data.subset(est);
  const auto& xcfg = cfg.learner.crossfit;
  const PseudoTarget target = cfg.learner.pseudo.target;

  // Nuisances fitted once on D_A and evaluated on D_E.
  auto plugin = std::make_shared<PluginModel>(fit_plugin_learner(
      d_a, xcfg.outcome, target, xcfg.binary_outcome, xcfg.clip, derive_seed(cfg.seed, {0xA, 0})));
  NuisanceEstimates q_e{std::vector<double>(d_e.size(), 0.0), std::vector<double>(d_e.size(), 0.0),
                        std::vector<double>(d_e.size(), 0.0)};
  for (std::size_t i = 0; i < d_e.size(); ++i) {
    const auto x = d_e.x(i);
    if (plugin->control_model()) q_e.mu0_hat[i] = plugin->control_model()->predict(x);
    q_e.mu1_hat[i] = plugin->treated_model().predict(x);
  }
  std::vector<double> pi_a;
  if (known_pi) {
    pi_a = pick(*known_pi, aux);
    const auto pi_e = pick(*known_pi, est);
    for (std::size_t i = 0; i < d_e.size(); ++i) q_e.pi_hat[i] = clip(pi_e[i], xcfg.clip.propensity);
  } else {
    std::vector<double> w_a(d_a.size());
    for (std::size_t i = 0; i < d_a.size(); ++i) w_a[i] = d_a.w(i);
    const auto pi_model = fit_probability(xcfg.propensity, d_a.covariates(), w_a, derive_seed(cfg.seed, {0xA, 2}),
                                          xcfg.clip.propensity);
    for (std::size_t i = 0; i < d_e.size(); ++i) q_e.pi_hat[i] = pi_model.predict(d_e.x(i));
  }

  std::function<double(std::span<const double>)> score;
  if (cfg.first_stage == FirstStage::plugin) {
    score = [plugin](std::span<const double> x) { return plugin->predict(x); };
  } else {
    IFLearnerConfig lc = cfg.learner;
    lc.crossfit.seed = derive_seed(cfg.seed, {0xB, 0});
    lc.seed = derive_seed(cfg.seed, {0xB, 1});
    auto model = std::make_shared<TargetModel>(known_pi ? fit_if_learner_detailed(d_a, lc, pi_a).model
                                                        : fit_if_learner_detailed(d_a, lc).model);
    score = [model](std::span<const double> x) { return model->predict(x); };
  }

  std::vector<double> scores(d_e.size());
  for (std::size_t i = 0; i < d_e.size(); ++i) scores[i] = score(d_e.x(i));

  std::vector<double> d;
  if (cfg.second_stage_estimator == GroupEstimator::ht) {
    d.resize(d_e.size());
    for (std::size_t i = 0; i < d_e.size(); ++i) d[i] = ht_pseudo(d_e.y(i), d_e.w(i), q_e.pi_hat[i], xcfg.clip.propensity);
  } else {
    PseudoOutcomeSpec ps = cfg.learner.pseudo;
    ps.clip = xcfg.clip;
    ps.winsorize = 0.0;
    d = build_pseudo_outcomes(d_e, q_e, ps);
  }

  GroupEstimates ge;
  ge.ci_level = cfg.ci_level;
  ge.cutpoints = quantile_cutpoints(scores, cfg.groups);
  std::vector<std::size_t> membership(d_e.size());
  std::vector<std::vector<double>> members(cfg.groups);
  for (std::size_t i = 0; i < d_e.size(); ++i) {
    membership[i] = group_of(scores[i], ge.cutpoints);
    members[membership[i]].push_back(d[i]);
  }
  for (std::size_t g = 0; g < cfg.groups; ++g) {
    const std::size_t ng = members[g].size();
    if (ng < 2) {
      fail(ErrorKind::grouping_degenerate, "group " + std::to_string(g + 1) + " of " + std::to_string(cfg.groups) +
                                               " has " + std::to_string(ng) +
                                               " rows after quantile grouping (ties in first-stage predictions)");
    }
    const auto stat = group_efficient_estimate(members[g]);
    const double half = critical_value(cfg.ci_level, cfg.critical_value, ng) * std::sqrt(stat.var_hat);
    ge.psi_hat.push_back(stat.psi_hat);
    ge.var_hat.push_back(stat.var_hat);
    ge.ci_lo.push_back(stat.psi_hat - half);
    ge.ci_hi.push_back(stat.psi_hat + half);
    ge.n_g.push_back(ng);
  }
  return {GroupModel(std::move(score), std::move(ge)), std::move(aux), std::move(est), std::move(membership),
          std::move(d)};
}

}  // namespace detail

/// Fits the group learner with estimated propensities.
inline GroupFit fit_group_learner_detailed(const Dataset& data, const GroupConfig& cfg) {
  return detail::fit_group_impl(data, cfg, std::nullopt);
}

/// Fits the group learner with known per-row propensities.
inline GroupFit fit_group_learner_detailed(const Dataset& data, const GroupConfig& cfg, std::span<const double> known_pi) {
  return detail::fit_group_impl(data, cfg, known_pi);
}

inline GroupEstimates fit_group_learner(const Dataset& data, const GroupConfig& cfg) {
  return fit_group_learner_detailed(data, cfg).model.estimates();
}

inline GroupEstimates fit_group_learner(const Dataset& data, const GroupConfig& cfg, std::span<const double> known_pi) {
  return fit_group_learner_detailed(data, cfg, known_pi).model.estimates();
}

namespace config {

inline constexpr EnumTable<FirstStage, 2> kFirstStages{{{FirstStage::plugin, "plugin"}, {FirstStage::if_learner, "if_learner"}}};
inline constexpr EnumTable<GroupEstimator, 2> kGroupEstimators{{{GroupEstimator::ht, "ht"}, {GroupEstimator::eif, "eif"}}};
inline constexpr EnumTable<CriticalValue, 2> kCriticalValues{
    {{CriticalValue::normal, "normal"}, {CriticalValue::student_t, "student_t"}}};

}  // namespace config

inline void to_json(json& j, const GroupConfig& c) {
  j = json{{"groups", c.groups},
           {"split_fraction", c.split_fraction},
           {"first_stage", config::enum_name(config::kFirstStages, c.first_stage)},
           {"second_stage_estimator", config::enum_name(config::kGroupEstimators, c.second_stage_estimator)},
           {"ci_level", c.ci_level},
           {"critical_value", config::enum_name(config::kCriticalValues, c.critical_value)},
           {"learner", c.learner},
           {"seed", c.seed}};
}

inline const std::vector<std::string_view> kGroupConfigKeys = {
    "groups", "split_fraction", "first_stage", "second_stage_estimator", "ci_level", "critical_value"};

/// Reads the group keys plus the embedded IF-learner keys of `j`.
inline GroupConfig read_group_config(const json& j) {
  GroupConfig c;
  c.learner = read_if_learner_config(j);
  c.seed = c.learner.seed;
  c.groups = config::get<std::size_t>(j, "groups", c.groups);
  c.split_fraction = config::get(j, "split_fraction", c.split_fraction);
  if (j.contains("first_stage")) c.first_stage = config::enum_value(config::kFirstStages, j["first_stage"], "first_stage");
  if (j.contains("second_stage_estimator")) {
    c.second_stage_estimator =
        config::enum_value(config::kGroupEstimators, j["second_stage_estimator"], "second_stage_estimator");
  }
  c.ci_level = config::get(j, "ci_level", c.ci_level);
  if (j.contains("critical_value")) {
    c.critical_value = config::enum_value(config::kCriticalValues, j["critical_value"], "critical_value");
  }
  c.validate();
  return c;
}

inline void to_json(json& j, const GroupEstimates& e) {
  j = json::object();
  j["ci_level"] = e.ci_level;
  j["cutpoints"] = e.cutpoints;
  j["groups"] = json::array();
  for (std::size_t g = 0; g < e.groups(); ++g) {
    j["groups"].push_back({{"g", g + 1},
                           {"n_g", e.n_g[g]},
                           {"psi_hat", e.psi_hat[g]},
                           {"var_hat", e.var_hat[g]},
                           {"ci_lo", e.ci_lo[g]},
                           {"ci_hi", e.ci_hi[g]}});
  }
}

/// One row per group: g, n_g, psi_hat, var_hat, ci_lo, ci_hi.
inline void write_group_csv(std::ostream& out, const GroupEstimates& e) {
  out << "g,n_g,psi_hat,var_hat,ci_lo,ci_hi\n";
  for (std::size_t g = 0; g < e.groups(); ++g) {
    out << g + 1 << ',' << e.n_g[g] << ',' << csv::format_double(e.psi_hat[g]) << ','
        << csv::format_double(e.var_hat[g]) << ',' << csv::format_double(e.ci_lo[g]) << ','
        << csv::format_double(e.ci_hi[g]) << '\n';
  }
}

}  // namespace iflearn
