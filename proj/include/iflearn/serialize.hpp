#pragma once

// JSON mapping for learner, cross-fitting and pseudo-outcome settings.
// Parsing is strict: unknown keys and unknown enum names are config errors.

#include <array>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "iflearn/crossfit.hpp"
#include "iflearn/error.hpp"
#include "iflearn/learners.hpp"
#include "iflearn/pseudo.hpp"

namespace iflearn {

using json = nlohmann::json;

namespace config {

template <typename E, std::size_t N>
using EnumTable = std::array<std::pair<E, std::string_view>, N>;

template <typename E, std::size_t N>
std::string enum_name(const EnumTable<E, N>& table, E value) {
  for (const auto& [e, name] : table) {
    if (e == value) return std::string(name);
  }
  fail(ErrorKind::config, "unnamed enum value");
}

template <typename E, std::size_t N>
E enum_value(const EnumTable<E, N>& table, const json& j, std::string_view what) {
  if (!j.is_string()) fail(ErrorKind::config, std::string(what) + " must be a string");
  const auto s = j.get<std::string>();
  std::string options;
  for (const auto& [e, name] : table) {
    if (name == s) return e;
    options += (options.empty() ? "" : ", ") + std::string(name);
  }
  fail(ErrorKind::config, "unknown " + std::string(what) + " '" + s + "' (expected one of: " + options + ")");
}

inline void check_keys(const json& j, const std::vector<std::string_view>& allowed, std::string_view where) {
  if (!j.is_object()) fail(ErrorKind::config, std::string(where) + " must be a JSON object");
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const auto a : allowed) ok = ok || item.key() == a;
    if (!ok) fail(ErrorKind::config, "unknown key '" + item.key() + "' in " + std::string(where));
  }
}

inline std::vector<std::string_view> concat_keys(std::vector<std::string_view> a, const std::vector<std::string_view>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

template <typename T>
T get(const json& j, std::string_view key, const T& fallback) {
  const auto it = j.find(std::string(key));
  if (it == j.end()) return fallback;
  try {
    return it->template get<T>();
  } catch (const json::exception& e) {
    fail(ErrorKind::config, "key '" + std::string(key) + "': " + e.what());
  }
}

template <typename T>
T require(const json& j, std::string_view key, std::string_view where) {
  const auto it = j.find(std::string(key));
  if (it == j.end()) fail(ErrorKind::config, "missing key '" + std::string(key) + "' in " + std::string(where));
  try {
    return it->template get<T>();
  } catch (const json::exception& e) {
    fail(ErrorKind::config, "key '" + std::string(key) + "': " + e.what());
  }
}

inline std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

/// Stable 16-hex-digit hash of a JSON document (keys are sorted on dump).
inline std::string hash_json(const json& j) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::uint64_t h = fnv1a64(j.dump());
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kHex[h & 0xF];
    h >>= 4;
  }
  return out;
}

inline constexpr EnumTable<LearnerKind, 3> kLearnerKinds{{
    {LearnerKind::knn, "knn"}, {LearnerKind::kernel, "kernel"}, {LearnerKind::forest, "forest"}}};
inline constexpr EnumTable<KernelShape, 2> kKernelShapes{{
    {KernelShape::gaussian, "gaussian"}, {KernelShape::epanechnikov, "epanechnikov"}}};
inline constexpr EnumTable<NuisanceMode, 2> kNuisanceModes{{
    {NuisanceMode::crossfit, "crossfit"}, {NuisanceMode::out_of_bag, "out_of_bag"}}};
inline constexpr EnumTable<PseudoTarget, 7> kPseudoTargets{{
    {PseudoTarget::cate_aipw, "cate_aipw"},
    {PseudoTarget::cate_ht, "cate_ht"},
    {PseudoTarget::cate_plugin, "cate_plugin"},
    {PseudoTarget::risk_ratio, "risk_ratio"},
    {PseudoTarget::odds_ratio, "odds_ratio"},
    {PseudoTarget::mar_mean, "mar_mean"},
    {PseudoTarget::regression_mean, "regression_mean"}}};

}  // namespace config

inline void to_json(json& j, const LearnerSpec& s) {
  j = json::object();
  j["kind"] = config::enum_name(config::kLearnerKinds, s.kind);
  switch (s.kind) {
    case LearnerKind::knn:
      j["k"] = s.knn.k;
      break;
    case LearnerKind::kernel:
      j["shape"] = config::enum_name(config::kKernelShapes, s.kernel.shape);
      if (s.kernel.cv_grid.empty()) {
        j["bandwidth"] = s.kernel.bandwidth;
      } else {
        j["cv_grid"] = s.kernel.cv_grid;
        j["cv_folds"] = s.kernel.cv_folds;
      }
      break;
    case LearnerKind::forest:
      j["n_trees"] = s.forest.n_trees;
      j["min_leaf"] = s.forest.min_leaf;
      j["subsample_fraction"] = s.forest.subsample_fraction;
      j["honest"] = s.forest.honest;
      if (s.forest.features_per_split) j["features_per_split"] = *s.forest.features_per_split;
      break;
  }
  if (s.standardize) j["standardize"] = true;
}

inline void from_json(const json& j, LearnerSpec& s) {
  config::check_keys(j,
                     {"kind", "k", "shape", "bandwidth", "cv_grid", "cv_folds", "n_trees", "min_leaf",
                      "subsample_fraction", "features_per_split", "honest", "standardize"},
                     "learner");
  s = LearnerSpec{};
  s.kind = config::enum_value(config::kLearnerKinds, j.at("kind"), "learner kind");
  s.standardize = config::get(j, "standardize", false);
  switch (s.kind) {
    case LearnerKind::knn:
      s.knn.k = config::get<std::size_t>(j, "k", s.knn.k);
      break;
    case LearnerKind::kernel:
      if (j.contains("shape")) s.kernel.shape = config::enum_value(config::kKernelShapes, j["shape"], "kernel shape");
      s.kernel.bandwidth = config::get(j, "bandwidth", s.kernel.bandwidth);
      s.kernel.cv_grid = config::get(j, "cv_grid", std::vector<double>{});
      s.kernel.cv_folds = config::get<std::size_t>(j, "cv_folds", s.kernel.cv_folds);
      break;
    case LearnerKind::forest:
      s.forest.n_trees = config::get<std::size_t>(j, "n_trees", s.forest.n_trees);
      s.forest.min_leaf = config::get<std::size_t>(j, "min_leaf", s.forest.min_leaf);
      s.forest.subsample_fraction = config::get(j, "subsample_fraction", s.forest.subsample_fraction);
      s.forest.honest = config::get(j, "honest", s.forest.honest);
      if (j.contains("features_per_split")) {
        s.forest.features_per_split = config::get<std::size_t>(j, "features_per_split", 0);
      }
      break;
  }
  s.validate();
}

inline void to_json(json& j, const ClipConfig& c) {
  j = json{{"propensity", c.propensity}, {"probability", c.probability}};
}

inline void from_json(const json& j, ClipConfig& c) {
  config::check_keys(j, {"propensity", "probability"}, "clip");
  c.propensity = config::get(j, "propensity", kDefaultPropensityClip);
  c.probability = config::get(j, "probability", kDefaultProbabilityClip);
  c.validate();
}

inline void to_json(json& j, const CrossfitConfig& c) {
  j = json{{"folds", c.folds},
           {"outcome_learner", c.outcome},
           {"propensity_learner", c.propensity},
           {"seed", c.seed},
           {"clip", c.clip},
           {"binary_outcome", c.binary_outcome},
           {"mode", config::enum_name(config::kNuisanceModes, c.mode)}};
}

inline void to_json(json& j, const PseudoOutcomeSpec& p) {
  j = json{{"target", config::enum_name(config::kPseudoTargets, p.target)}, {"winsorize", p.winsorize}};
}

}  // namespace iflearn
