#pragma once

// Pseudo-outcomes built from uncentered efficient influence functions.
//
// Each constructor is a pure function of one observation and the nuisance
// values at its covariates. Clipping is done upstream when nuisances are
// produced; here out-of-range nuisances are rejected, never repaired.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "iflearn/data.hpp"
#include "iflearn/error.hpp"

namespace iflearn {

enum class PseudoTarget {
  cate_aipw,
  cate_ht,
  cate_plugin,
  risk_ratio,
  odds_ratio,
  mar_mean,
  regression_mean,
};

struct PseudoOutcomeSpec {
  PseudoTarget target = PseudoTarget::cate_aipw;
  ClipConfig clip;
  // Symmetric quantile winsorization of the pseudo-outcomes; 0 disables it.
  double winsorize = 0.0;
};

/// Targets that need a binary outcome.
constexpr bool needs_binary_outcome(PseudoTarget t) {
  return t == PseudoTarget::risk_ratio || t == PseudoTarget::odds_ratio;
}

/// Targets that need the w column.
constexpr bool needs_treatment(PseudoTarget t) { return t != PseudoTarget::regression_mean; }

/// Targets whose pseudo-outcome uses the control-arm regression.
constexpr bool uses_control_arm(PseudoTarget t) {
  return t != PseudoTarget::mar_mean && t != PseudoTarget::regression_mean && t != PseudoTarget::cate_ht;
}

namespace detail {

inline void check_propensity(double pi, double floor) {
  if (!(pi >= floor && pi <= 1.0 - floor)) {
    fail(ErrorKind::domain, "propensity " + std::to_string(pi) + " outside [" + std::to_string(floor) + ", " +
                                std::to_string(1.0 - floor) + "]");
  }
}

inline void check_indicator(int w) {
  if (w != 0 && w != 1) fail(ErrorKind::domain, "indicator must be 0 or 1");
}

}  // namespace detail

/// Uncentered EIF of the average treatment effect (AIPW form):
///   (W/pi - (1-W)/(1-pi)) Y + (1 - W/pi) mu1 - (1 - (1-W)/(1-pi)) mu0
inline double aipw_pseudo(double y, int w, double pi, double mu0, double mu1,
                          double propensity_floor = kDefaultPropensityClip) {
  detail::check_indicator(w);
  detail::check_propensity(pi, propensity_floor);
  const double a = w / pi;
  const double b = (1 - w) / (1.0 - pi);
  return (a - b) * y + ((1.0 - a) * mu1 - (1.0 - b) * mu0);
}

/// Horvitz-Thompson signal (W/pi - (1-W)/(1-pi)) Y.
inline double ht_pseudo(double y, int w, double pi, double propensity_floor = kDefaultPropensityClip) {
  detail::check_indicator(w);
  detail::check_propensity(pi, propensity_floor);
  return (w / pi - (1 - w) / (1.0 - pi)) * y;
}

/// Plug-in contrast of fitted arm regressions.
inline double plugin_cate(double mu0, double mu1) { return mu1 - mu0; }

/// Pseudo-outcome for the risk ratio mu1/mu0.
inline double rr_pseudo(double y, int w, double pi, double mu0, double mu1,
                        double propensity_floor = kDefaultPropensityClip,
                        double probability_floor = kDefaultProbabilityClip) {
  detail::check_indicator(w);
  detail::check_propensity(pi, propensity_floor);
  if (!(mu0 >= probability_floor)) {
    fail(ErrorKind::domain, "control mean " + std::to_string(mu0) + " below floor " + std::to_string(probability_floor));
  }
  const double a = w / pi;
  const double b = (1 - w) / (1.0 - pi);
  const double treated = a * y + (1.0 - a) * mu1 - mu1;
  const double control = b * y + (1.0 - b) * mu0 - mu0;
  return treated / mu0 - mu1 / (mu0 * mu0) * control + mu1 / mu0;
}

/// Partial derivatives of a transformation f(mu0, mu1).
struct Partials {
  double d_mu0 = 0.0;
  double d_mu1 = 0.0;
};

inline double risk_ratio(double mu0, double mu1) { return mu1 / mu0; }
inline Partials risk_ratio_partials(double mu0, double mu1) { return {-mu1 / (mu0 * mu0), 1.0 / mu0}; }

inline double odds_ratio(double mu0, double mu1) { return (mu1 / (1.0 - mu1)) / (mu0 / (1.0 - mu0)); }
inline Partials odds_ratio_partials(double mu0, double mu1) {
  return {-mu1 / ((1.0 - mu1) * mu0 * mu0), (1.0 - mu0) / ((1.0 - mu1) * (1.0 - mu1) * mu0)};
}

/// Delta-method pseudo-outcome for f(mu0, mu1): the centered potential-outcome
/// influence functions weighted by the partials, plus f itself.
inline double transform_pseudo(double y, int w, double pi, double mu0, double mu1, Partials partials,
                               double f_value, double propensity_floor = kDefaultPropensityClip) {
  detail::check_indicator(w);
  detail::check_propensity(pi, propensity_floor);
  if (!std::isfinite(partials.d_mu0) || !std::isfinite(partials.d_mu1) || !std::isfinite(f_value)) {
    fail(ErrorKind::domain, "transformation value or partial derivatives are not finite");
  }
  const double if_mu1 = w / pi * (y - mu1);
  const double if_mu0 = (1 - w) / (1.0 - pi) * (y - mu0);
  return partials.d_mu0 * if_mu0 + partials.d_mu1 * if_mu1 + f_value;
}

/// Mean of an outcome missing at random, with a = 1 when y is observed.
///
/// The uncentered EIF of E[Y] under MAR is (A/pi)(Y - mu) + mu with
/// mu(x) = E[Y | A=1, X=x] and pi(x) = P(A=1 | X=x). Its conditional mean is
/// mu(x) whenever either nuisance is correct:
///   E[(A/pi)(Y - mu) + mu | X] = (pi_0/pi)(mu_0 - mu) + mu.
inline double mar_pseudo(double y, int a, double pi, double mu,
                         double propensity_floor = kDefaultPropensityClip) {
  detail::check_indicator(a);
  detail::check_propensity(pi, propensity_floor);
  return a / pi * (y - mu) + mu;
}

/// Clips values to their [q, 1-q] empirical quantiles (linear interpolation
/// between order statistics).
inline void winsorize(std::vector<double>& values, double q) {
  if (q <= 0.0 || values.size() < 2) return;
  if (!(q < 0.5)) fail(ErrorKind::config, "winsorize quantile must lie in [0, 0.5)");
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  auto quantile = [&](double p) {
    const double h = static_cast<double>(sorted.size() - 1) * p;
    const auto i = static_cast<std::size_t>(std::floor(h));
    const std::size_t j = std::min(i + 1, sorted.size() - 1);
    return sorted[i] + (h - static_cast<double>(i)) * (sorted[j] - sorted[i]);
  };
  const double lo = quantile(q);
  const double hi = quantile(1.0 - q);
  for (double& v : values) v = std::clamp(v, lo, hi);
}

/// Row-wise pseudo-outcomes for `data` given aligned nuisance predictions.
inline std::vector<double> build_pseudo_outcomes(const Dataset& data, const NuisanceEstimates& nuisances,
                                                 const PseudoOutcomeSpec& spec) {
  const std::size_t n = data.size();
  std::vector<double> out(n);
  if (spec.target == PseudoTarget::regression_mean) {
    for (std::size_t i = 0; i < n; ++i) out[i] = data.y(i);
    winsorize(out, spec.winsorize);
    return out;
  }
  data.require_treatment();
  if (needs_binary_outcome(spec.target) && !data.binary_outcome()) {
    fail(ErrorKind::config, "risk and odds ratio targets require a 0/1 outcome");
  }
  if (nuisances.mu0_hat.size() != n || nuisances.mu1_hat.size() != n || nuisances.pi_hat.size() != n) {
    fail(ErrorKind::shape, "nuisance estimates are not aligned with the dataset");
  }
  const double pf = spec.clip.propensity;
  for (std::size_t i = 0; i < n; ++i) {
    const double y = data.y(i);
    const int w = data.w(i);
    const double pi = nuisances.pi_hat[i];
    const double mu0 = nuisances.mu0_hat[i];
    const double mu1 = nuisances.mu1_hat[i];
    switch (spec.target) {
      case PseudoTarget::cate_aipw: out[i] = aipw_pseudo(y, w, pi, mu0, mu1, pf); break;
      case PseudoTarget::cate_ht: out[i] = ht_pseudo(y, w, pi, pf); break;
      case PseudoTarget::cate_plugin: out[i] = plugin_cate(mu0, mu1); break;
      case PseudoTarget::risk_ratio: out[i] = rr_pseudo(y, w, pi, mu0, mu1, pf, spec.clip.probability); break;
      case PseudoTarget::odds_ratio:
        out[i] = transform_pseudo(y, w, pi, mu0, mu1, odds_ratio_partials(mu0, mu1), odds_ratio(mu0, mu1), pf);
        break;
      case PseudoTarget::mar_mean: out[i] = mar_pseudo(y, w, pi, mu1, pf); break;
      case PseudoTarget::regression_mean: out[i] = y; break;
    }
    if (!std::isfinite(out[i])) fail(ErrorKind::domain, "non-finite pseudo-outcome at row " + std::to_string(i));
  }
  winsorize(out, spec.winsorize);
  return out;
}

}  // namespace iflearn
