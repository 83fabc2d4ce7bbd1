#pragma once

// Simulation designs with known ground truth, MSE evaluation and the
// replication harness used by the experiments.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "iflearn/csv.hpp"
#include "iflearn/data.hpp"
#include "iflearn/error.hpp"
#include "iflearn/grouplearner.hpp"
#include "iflearn/iflearner.hpp"
#include "iflearn/parallel.hpp"
#include "iflearn/pseudo.hpp"
#include "iflearn/rng.hpp"
#include "iflearn/serialize.hpp"

namespace iflearn {

// ---------------------------------------------------------------------------
// One-dimensional design

enum class PropensityMode { constant_half, strong_selection, hidden_selection };

inline constexpr double kBinaryProbabilityFloor = 0.01;
inline constexpr double kBinaryProbabilityScale = 1.5;

struct Dgp1dConfig {
  PropensityMode propensity = PropensityMode::constant_half;
  double b = 0.0;  // selection strength for hidden_selection
  bool binary_outcome = false;
  std::size_t n = 0;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(b >= 0.0 && b < 1.0)) fail(ErrorKind::config, "hidden-selection strength b must lie in [0, 1)");
  }
};

/// Piecewise polynomial baseline on [-1, 1].
inline double mu0_piecewise(double x) {
  if (x <= -0.5) return 0.5 * (x + 2.0) * (x + 2.0);
  if (x <= 0.0) return x / 2.0 - 0.875;
  if (x <= 0.5) return -5.0 * (x - 0.2) * (x - 0.2) + 1.075;
  return x + 0.125;
}

inline double noise_variance_1d(double x) { return 0.2 - 0.1 * std::cos(2.0 * std::numbers::pi * x); }

/// The propensity that generated W.
inline double propensity_1d(PropensityMode mode, double b, double x) {
  switch (mode) {
    case PropensityMode::strong_selection: return x > 0.0 ? 0.9 : 0.1;
    case PropensityMode::hidden_selection: return 0.5 + 0.5 * b * std::abs(x) / 2.0;
    case PropensityMode::constant_half: break;
  }
  return 0.5;
}

/// The propensity a learner is told; hidden selection reports 0.5.
inline double nominal_propensity_1d(PropensityMode mode, double b, double x) {
  return mode == PropensityMode::hidden_selection ? 0.5 : propensity_1d(mode, b, x);
}

/// Success probability of the binary design, clamped into [0.01, 0.99].
inline double binary_probability_1d(double mean) {
  return std::clamp(mean / kBinaryProbabilityScale, kBinaryProbabilityFloor, 1.0 - kBinaryProbabilityFloor);
}

// ---------------------------------------------------------------------------
// Ten-dimensional design

enum class Effect10d { zero, xi_product, three_mu0, mu0_xi_product };

inline constexpr std::size_t kDim10d = 10;

struct Dgp10dConfig {
  bool confounded = false;
  Effect10d effect = Effect10d::zero;
  std::size_t n = 0;
  std::uint64_t seed = 0;
};

inline double xi(double t) { return 1.0 + 1.0 / (1.0 + std::exp(-20.0 * (t - 1.0 / 3.0))); }

/// Beta(2, 4) density 20 t (1 - t)^3.
inline double beta24_density(double t) {
  if (!(t >= 0.0 && t <= 1.0)) fail(ErrorKind::domain, "beta density argument " + std::to_string(t) + " outside [0, 1]");
  const double u = 1.0 - t;
  return 20.0 * t * u * u * u;
}

inline double mu0_10d(bool confounded, std::span<const double> x) { return confounded ? 2.0 * x[2] - 1.0 : 0.0; }

inline double propensity_10d(bool confounded, std::span<const double> x) {
  return confounded ? 0.25 * (beta24_density(x[2]) + 1.0) : 0.5;
}

/// Treatment effect; the baseline inside three_mu0 and mu0_xi_product is
/// 2 x3 - 1 in both modes.
inline double effect_10d(Effect10d effect, std::span<const double> x) {
  const double m = 2.0 * x[2] - 1.0;
  switch (effect) {
    case Effect10d::xi_product: return xi(x[0]) * xi(x[1]);
    case Effect10d::three_mu0: return 3.0 * m;
    case Effect10d::mu0_xi_product: return m * xi(x[0]) * xi(x[1]);
    case Effect10d::zero: break;
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Samples with ground truth

struct LabeledSample {
  Dataset dataset;
  std::vector<double> true_tau;    // target truth: CATE, or risk ratio in binary mode
  std::vector<double> true_pi;     // propensity that generated W
  std::vector<double> nominal_pi;  // propensity a learner is told
  std::vector<double> true_mu0;    // E[Y | W=0, X] (a probability in binary mode)
  std::vector<double> true_mu1;

  std::size_t size() const { return dataset.size(); }
};

inline LabeledSample sample_1d(const Dgp1dConfig& cfg) {
  cfg.validate();
  Stream rng(cfg.seed, 0x1D);
  std::vector<double> x(cfg.n);
  std::vector<double> y(cfg.n);
  std::vector<int> w(cfg.n);
  LabeledSample s;
  s.true_tau.resize(cfg.n);
  s.true_pi.resize(cfg.n);
  s.nominal_pi.resize(cfg.n);
  s.true_mu0.resize(cfg.n);
  s.true_mu1.resize(cfg.n);
  for (std::size_t i = 0; i < cfg.n; ++i) {
    const double xi_ = rng.uniform(-1.0, 1.0);
    const double pi = propensity_1d(cfg.propensity, cfg.b, xi_);
    const int wi = rng.bernoulli(pi) ? 1 : 0;
    const double m0 = mu0_piecewise(xi_);
    const double tau = 0.0;
    if (cfg.binary_outcome) {
      const double p0 = binary_probability_1d(m0);
      const double p1 = binary_probability_1d(m0 + tau);
      y[i] = rng.bernoulli(wi == 1 ? p1 : p0) ? 1.0 : 0.0;
      s.true_mu0[i] = p0;
      s.true_mu1[i] = p1;
      s.true_tau[i] = p1 / p0;
    } else {
      y[i] = wi * tau + m0 + rng.normal(0.0, std::sqrt(noise_variance_1d(xi_)));
      s.true_mu0[i] = m0;
      s.true_mu1[i] = m0 + tau;
      s.true_tau[i] = tau;
    }
    x[i] = xi_;
    w[i] = wi;
    s.true_pi[i] = pi;
    s.nominal_pi[i] = nominal_propensity_1d(cfg.propensity, cfg.b, xi_);
  }
  if (cfg.n > 0) s.dataset = Dataset(1, std::move(x), std::move(y), std::move(w));
  return s;
}

inline LabeledSample sample_10d(const Dgp10dConfig& cfg) {
  Stream rng(cfg.seed, 0x10D);
  std::vector<double> x(cfg.n * kDim10d);
  std::vector<double> y(cfg.n);
  std::vector<int> w(cfg.n);
  LabeledSample s;
  s.true_tau.resize(cfg.n);
  s.true_pi.resize(cfg.n);
  s.nominal_pi.resize(cfg.n);
  s.true_mu0.resize(cfg.n);
  s.true_mu1.resize(cfg.n);
  for (std::size_t i = 0; i < cfg.n; ++i) {
    const std::span<double> xr(x.data() + i * kDim10d, kDim10d);
    for (auto& v : xr) v = rng.uniform();
    const double pi = propensity_10d(cfg.confounded, xr);
    const int wi = rng.bernoulli(pi) ? 1 : 0;
    const double m0 = mu0_10d(cfg.confounded, xr);
    const double tau = effect_10d(cfg.effect, xr);
    y[i] = wi * tau + m0 + rng.normal();
    w[i] = wi;
    s.true_tau[i] = tau;
    s.true_pi[i] = pi;
    s.nominal_pi[i] = pi;
    s.true_mu0[i] = m0;
    s.true_mu1[i] = m0 + tau;
  }
  if (cfg.n > 0) s.dataset = Dataset(kDim10d, std::move(x), std::move(y), std::move(w));
  return s;
}

// ---------------------------------------------------------------------------
// Evaluation

/// Risk-ratio evaluation skips rows where either true arm probability is below this.
inline constexpr double kRiskRatioEvalFloor = 0.05;

/// Mean squared error of `model.predict` against the sample's truth. With
/// `risk_ratio_mask` only rows whose true arm probabilities are both at
/// least 0.05 count.
template <typename Model>
double evaluate_mse(const Model& model, const LabeledSample& test, bool risk_ratio_mask = false) {
  if (test.size() == 0) fail(ErrorKind::empty_dataset, "MSE on an empty test set");
  double ss = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    if (risk_ratio_mask && (test.true_mu0[i] < kRiskRatioEvalFloor || test.true_mu1[i] < kRiskRatioEvalFloor)) continue;
    const double r = model.predict(test.dataset.x(i)) - test.true_tau[i];
    ss += r * r;
    ++used;
  }
  if (used == 0) fail(ErrorKind::empty_dataset, "no test rows pass the risk-ratio evaluation filter");
  return ss / static_cast<double>(used);
}

// ---------------------------------------------------------------------------
// Experiments

enum class Method { plugin, if_learner, oracle, group_plugin_ht, group_plugin_eif, group_if_ht, group_if_eif };

namespace config {

inline constexpr EnumTable<PropensityMode, 3> kPropensityModes{{{PropensityMode::constant_half, "constant_half"},
                                                                {PropensityMode::strong_selection, "strong_selection"},
                                                                {PropensityMode::hidden_selection, "hidden_selection"}}};
inline constexpr EnumTable<Effect10d, 4> kEffects{{{Effect10d::zero, "zero"},
                                                   {Effect10d::xi_product, "xi_product"},
                                                   {Effect10d::three_mu0, "three_mu0"},
                                                   {Effect10d::mu0_xi_product, "mu0_xi_product"}}};
inline constexpr EnumTable<Method, 7> kMethods{{{Method::plugin, "plugin"},
                                                {Method::if_learner, "if_learner"},
                                                {Method::oracle, "oracle"},
                                                {Method::group_plugin_ht, "group_plugin_ht"},
                                                {Method::group_plugin_eif, "group_plugin_eif"},
                                                {Method::group_if_ht, "group_if_ht"},
                                                {Method::group_if_eif, "group_if_eif"}}};

}  // namespace config

inline std::string method_name(Method m) { return config::enum_name(config::kMethods, m); }

struct Design1d {
  PropensityMode propensity = PropensityMode::constant_half;
  double b = 0.0;
  bool binary_outcome = false;
};

struct Design10d {
  bool confounded = false;
  Effect10d effect = Effect10d::zero;
};

using Design = std::variant<Design1d, Design10d>;

struct ExperimentConfig {
  std::string experiment_id = "experiment";
  Design dgp = Design1d{};
  std::vector<Method> methods;
  std::vector<std::size_t> n_grid;
  std::size_t replications = 1;
  std::uint64_t seed = 0;
  std::size_t test_size = 1000;
  double discard_threshold = 1000.0;
  bool known_propensity = true;
  IFLearnerConfig learner = default_if_learner_config();
  std::size_t groups = 5;
  double split_fraction = 0.5;
  double ci_level = 0.95;
  std::optional<std::string> output;

  bool binary() const {
    const auto* d = std::get_if<Design1d>(&dgp);
    return d && d->binary_outcome;
  }

  void validate() const {
    if (methods.empty()) fail(ErrorKind::config, "experiment needs at least one method");
    if (n_grid.empty()) fail(ErrorKind::config, "experiment needs a non-empty n grid");
    if (replications < 1) fail(ErrorKind::config, "replication count must be at least 1");
    if (test_size < 1) fail(ErrorKind::config, "test_size must be at least 1");
    for (const auto n : n_grid) {
      if (n < 2) fail(ErrorKind::config, "every n in the grid must be at least 2");
    }
    if (const auto* d = std::get_if<Design1d>(&dgp)) {
      if (!(d->b >= 0.0 && d->b < 1.0)) fail(ErrorKind::config, "hidden-selection strength b must lie in [0, 1)");
    }
    const auto t = learner.pseudo.target;
    if (t == PseudoTarget::mar_mean || t == PseudoTarget::regression_mean) {
      fail(ErrorKind::config, "simulation designs have treatment-effect truth only; target must be a CATE or ratio");
    }
    if (binary() != learner.crossfit.binary_outcome) {
      fail(ErrorKind::config, "binary_outcome must match the design's outcome type");
    }
    if (binary() != (t == PseudoTarget::risk_ratio)) {
      fail(ErrorKind::config, "binary designs are evaluated on the risk ratio; use target risk_ratio exactly then");
    }
    for (const auto m : methods) {
      const bool group = m != Method::plugin && m != Method::if_learner && m != Method::oracle;
      if (group && binary()) fail(ErrorKind::config, "group methods are defined for continuous designs only");
    }
    learner.validate();
  }
};

inline LabeledSample draw_sample(const Design& dgp, std::size_t n, std::uint64_t seed) {
  if (const auto* d = std::get_if<Design1d>(&dgp)) return sample_1d({d->propensity, d->b, d->binary_outcome, n, seed});
  const auto& d = std::get<Design10d>(dgp);
  return sample_10d({d.confounded, d.effect, n, seed});
}

/// True nuisance functions of a design, for the oracle learner.
inline NuisanceFunctions truth_functions(const Design& dgp) {
  if (const auto* d = std::get_if<Design1d>(&dgp)) {
    const Design1d c = *d;
    NuisanceFunctions f;
    f.mu0 = [c](std::span<const double> x) {
      return c.binary_outcome ? binary_probability_1d(mu0_piecewise(x[0])) : mu0_piecewise(x[0]);
    };
    f.mu1 = f.mu0;
    f.pi = [c](std::span<const double> x) { return propensity_1d(c.propensity, c.b, x[0]); };
    return f;
  }
  const Design10d c = std::get<Design10d>(dgp);
  NuisanceFunctions f;
  f.mu0 = [c](std::span<const double> x) { return mu0_10d(c.confounded, x); };
  f.mu1 = [c](std::span<const double> x) { return mu0_10d(c.confounded, x) + effect_10d(c.effect, x); };
  f.pi = [c](std::span<const double> x) { return propensity_10d(c.confounded, x); };
  return f;
}

inline std::uint64_t replication_seed(std::uint64_t master, std::size_t n, std::size_t r) {
  return derive_seed(master, {n, r});
}

/// MSE of every configured method on one replication, in `cfg.methods` order.
inline std::vector<double> run_replication(const ExperimentConfig& cfg, std::size_t n, std::size_t r) {
  const std::uint64_t base = replication_seed(cfg.seed, n, r);
  const auto train = draw_sample(cfg.dgp, n, derive_seed(base, {1}));
  const auto test = draw_sample(cfg.dgp, cfg.test_size, derive_seed(base, {2}));
  const bool mask = cfg.learner.pseudo.target == PseudoTarget::risk_ratio;
  const PseudoTarget target = cfg.learner.pseudo.target;

  std::vector<double> out;
  out.reserve(cfg.methods.size());
  for (const Method m : cfg.methods) {
    const std::uint64_t seed = derive_seed(base, {3, static_cast<std::uint64_t>(m)});
    try {
      switch (m) {
        case Method::plugin: {
          const auto model = fit_plugin_learner(train.dataset, cfg.learner.crossfit.outcome, target,
                                                cfg.learner.crossfit.binary_outcome, cfg.learner.crossfit.clip, seed);
          out.push_back(evaluate_mse(model, test, mask));
          break;
        }
        case Method::if_learner: {
          IFLearnerConfig lc = cfg.learner;
          lc.crossfit.seed = derive_seed(seed, {0});
          lc.seed = derive_seed(seed, {1});
          const auto fit = cfg.known_propensity ? fit_if_learner_detailed(train.dataset, lc, train.nominal_pi)
                                                : fit_if_learner_detailed(train.dataset, lc);
          out.push_back(evaluate_mse(fit.model, test, mask));
          break;
        }
        case Method::oracle: {
          PseudoOutcomeSpec ps = cfg.learner.pseudo;
          ps.clip = cfg.learner.crossfit.clip;
          const auto model = fit_oracle_learner(train.dataset, truth_functions(cfg.dgp), ps, cfg.learner.second_stage,
                                                derive_seed(seed, {1}));
          out.push_back(evaluate_mse(model, test, mask));
          break;
        }
        default: {
          GroupConfig gc;
          gc.groups = cfg.groups;
          gc.split_fraction = cfg.split_fraction;
          gc.ci_level = cfg.ci_level;
          gc.learner = cfg.learner;
          gc.seed = seed;
          gc.first_stage = (m == Method::group_plugin_ht || m == Method::group_plugin_eif) ? FirstStage::plugin
                                                                                          : FirstStage::if_learner;
          gc.second_stage_estimator =
              (m == Method::group_plugin_ht || m == Method::group_if_ht) ? GroupEstimator::ht : GroupEstimator::eif;
          const auto fit = cfg.known_propensity ? fit_group_learner_detailed(train.dataset, gc, train.nominal_pi)
                                                : fit_group_learner_detailed(train.dataset, gc);
          out.push_back(evaluate_mse(fit.model, test, false));
          break;
        }
      }
    } catch (const Error& e) {
      throw Error(e.kind(), "replication " + std::to_string(r) + " (n=" + std::to_string(n) + ") method " +
                                method_name(m) + ": " + e.what());
    }
  }
  return out;
}

/// Raw per-replication MSEs: mse[n index][replication][method index].
struct ReplicationTable {
  std::vector<std::size_t> n_grid;
  std::vector<Method> methods;
  std::vector<std::vector<std::vector<double>>> mse;
};

struct SummaryRow {
  std::string experiment_id;
  Method method;
  std::size_t n = 0;
  std::size_t replications_kept = 0;
  double mean_mse = 0.0;
  double se_mse = 0.0;
};

/// Mean and standard error per (n, method). A replication with any MSE above
/// `threshold` is dropped for every method.
inline std::vector<SummaryRow> summarize_replications(const ReplicationTable& table, const std::string& experiment_id,
                                                      double threshold) {
  std::vector<SummaryRow> rows;
  for (std::size_t ni = 0; ni < table.n_grid.size(); ++ni) {
    std::vector<const std::vector<double>*> kept;
    for (const auto& rep : table.mse[ni]) {
      bool ok = true;
      for (const double v : rep) ok = ok && std::isfinite(v) && v <= threshold;
      if (ok) kept.push_back(&rep);
    }
    if (kept.empty()) {
      fail(ErrorKind::degenerate_experiment, "all " + std::to_string(table.mse[ni].size()) + " replications at n=" +
                                                 std::to_string(table.n_grid[ni]) + " exceeded the discard threshold");
    }
    const double k = static_cast<double>(kept.size());
    for (std::size_t m = 0; m < table.methods.size(); ++m) {
      double sum = 0.0;
      for (const auto* rep : kept) sum += (*rep)[m];
      const double mean = sum / k;
      double ss = 0.0;
      for (const auto* rep : kept) ss += ((*rep)[m] - mean) * ((*rep)[m] - mean);
      const double se = kept.size() > 1 ? std::sqrt(ss / (k - 1.0) / k) : 0.0;
      rows.push_back({experiment_id, table.methods[m], table.n_grid[ni], kept.size(), mean, se});
    }
  }
  return rows;
}

/// Runs every (n, replication) pair on up to `jobs` threads. Output does not
/// depend on `jobs`.
inline ReplicationTable run_replications(const ExperimentConfig& cfg, std::size_t jobs = 1) {
  cfg.validate();
  ReplicationTable table{cfg.n_grid, cfg.methods, {}};
  table.mse.assign(cfg.n_grid.size(), std::vector<std::vector<double>>(cfg.replications));
  const std::size_t total = cfg.n_grid.size() * cfg.replications;
  parallel_for(total, jobs, [&](std::size_t i) {
    const std::size_t ni = i / cfg.replications;
    const std::size_t r = i % cfg.replications;
    table.mse[ni][r] = run_replication(cfg, cfg.n_grid[ni], r);
  });
  return table;
}

inline void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "experiment_id,method,n,replications_kept,mean_mse,se_mse\n";
  for (const auto& r : rows) {
    out << r.experiment_id << ',' << method_name(r.method) << ',' << r.n << ',' << r.replications_kept << ','
        << csv::format_double(r.mean_mse) << ',' << csv::format_double(r.se_mse) << '\n';
  }
}

// ---------------------------------------------------------------------------
// JSON

inline void to_json(json& j, const Design& d) {
  if (const auto* a = std::get_if<Design1d>(&d)) {
    j = json{{"kind", "1d"},
             {"propensity", config::enum_name(config::kPropensityModes, a->propensity)},
             {"b", a->b},
             {"binary_outcome", a->binary_outcome}};
  } else {
    const auto& c = std::get<Design10d>(d);
    j = json{{"kind", "10d"}, {"confounded", c.confounded}, {"effect", config::enum_name(config::kEffects, c.effect)}};
  }
}

inline Design read_design(const json& j) {
  if (!j.is_object()) fail(ErrorKind::config, "dgp must be a JSON object");
  const auto kind = config::require<std::string>(j, "kind", "dgp");
  if (kind == "1d") {
    config::check_keys(j, {"kind", "propensity", "b", "binary_outcome"}, "dgp");
    Design1d d;
    if (j.contains("propensity")) d.propensity = config::enum_value(config::kPropensityModes, j["propensity"], "propensity");
    d.b = config::get(j, "b", d.b);
    d.binary_outcome = config::get(j, "binary_outcome", d.binary_outcome);
    return d;
  }
  if (kind == "10d") {
    config::check_keys(j, {"kind", "confounded", "effect"}, "dgp");
    Design10d d;
    d.confounded = config::get(j, "confounded", d.confounded);
    if (j.contains("effect")) d.effect = config::enum_value(config::kEffects, j["effect"], "effect");
    return d;
  }
  fail(ErrorKind::config, "unknown dgp kind '" + kind + "' (expected one of: 1d, 10d)");
}

inline ExperimentConfig read_experiment_config(const json& j) {
  config::check_keys(j,
                     config::concat_keys({"experiment_id", "dgp", "methods", "n_grid", "replications", "test_size",
                                          "discard_threshold", "propensity", "groups", "split_fraction", "ci_level",
                                          "output"},
                                         kLearnerConfigKeys),
                     "experiment config");
  ExperimentConfig c;
  c.experiment_id = config::get<std::string>(j, "experiment_id", c.experiment_id);
  if (c.experiment_id.empty() || c.experiment_id.find_first_of(",\"\n\r") != std::string::npos) {
    fail(ErrorKind::config, "experiment_id must be non-empty and free of commas, quotes and newlines");
  }
  c.dgp = read_design(j.contains("dgp") ? j["dgp"] : json::object({{"kind", "1d"}}));
  const auto methods = config::require<json>(j, "methods", "experiment config");
  if (!methods.is_array()) fail(ErrorKind::config, "methods must be an array");
  for (const auto& m : methods) c.methods.push_back(config::enum_value(config::kMethods, m, "method"));
  c.n_grid = config::require<std::vector<std::size_t>>(j, "n_grid", "experiment config");
  c.replications = config::get<std::size_t>(j, "replications", c.replications);
  c.test_size = config::get<std::size_t>(j, "test_size", c.test_size);
  c.discard_threshold = config::get(j, "discard_threshold", c.discard_threshold);
  const auto prop = config::get<std::string>(j, "propensity", "known");
  if (prop != "known" && prop != "estimated") {
    fail(ErrorKind::config, "propensity must be 'known' or 'estimated', got '" + prop + "'");
  }
  c.known_propensity = prop == "known";
  json lj = j;
  const bool binary = c.binary();
  if (!lj.contains("binary_outcome")) lj["binary_outcome"] = binary;
  if (!lj.contains("target")) lj["target"] = binary ? "risk_ratio" : "cate_aipw";
  c.learner = read_if_learner_config(lj);
  c.seed = c.learner.seed;
  c.groups = config::get<std::size_t>(j, "groups", c.groups);
  c.split_fraction = config::get(j, "split_fraction", c.split_fraction);
  c.ci_level = config::get(j, "ci_level", c.ci_level);
  if (j.contains("output")) c.output = config::get<std::string>(j, "output", "");
  c.validate();
  return c;
}

inline void to_json(json& j, const ExperimentConfig& c) {
  std::vector<std::string> methods;
  for (const auto m : c.methods) methods.push_back(method_name(m));
  j = json{{"experiment_id", c.experiment_id},
           {"dgp", c.dgp},
           {"methods", methods},
           {"n_grid", c.n_grid},
           {"replications", c.replications},
           {"seed", c.seed},
           {"test_size", c.test_size},
           {"discard_threshold", c.discard_threshold},
           {"propensity", c.known_propensity ? "known" : "estimated"},
           {"learner", c.learner},
           {"groups", c.groups},
           {"split_fraction", c.split_fraction},
           {"ci_level", c.ci_level}};
}

}  // namespace iflearn
