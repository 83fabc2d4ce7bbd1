#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "iflearn/error.hpp"
#include "iflearn/rng.hpp"

namespace iflearn {

/// Non-owning row-major view of an n x d block of reals.
class MatrixView {
 public:
  MatrixView() = default;
  MatrixView(std::span<const double> data, std::size_t rows, std::size_t cols)
      : data_(data), rows_(rows), cols_(cols) {
    if (data.size() != rows * cols) {
      fail(ErrorKind::shape, "matrix buffer has " + std::to_string(data.size()) +
                                 " values, expected " + std::to_string(rows) + "x" +
                                 std::to_string(cols));
    }
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::span<const double> row(std::size_t i) const { return data_.subspan(i * cols_, cols_); }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  std::span<const double> data() const { return data_; }

 private:
  std::span<const double> data_;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
};

/// Owning row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : data_(rows * cols, fill), rows_(rows), cols_(cols) {}
  Matrix(std::vector<double> data, std::size_t rows, std::size_t cols)
      : data_(std::move(data)), rows_(rows), cols_(cols) {
    if (data_.size() != rows * cols) fail(ErrorKind::shape, "matrix buffer size mismatch");
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(data_).subspan(i * cols_, cols_);
  }
  std::span<double> row(std::size_t i) { return std::span<double>(data_).subspan(i * cols_, cols_); }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  const std::vector<double>& data() const { return data_; }
  MatrixView view() const { return MatrixView(data_, rows_, cols_); }
  operator MatrixView() const { return view(); }

 private:
  std::vector<double> data_;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
};

/// One observed unit: covariates, outcome, and an optional binary indicator
/// (treatment for causal problems, response indicator for missing data).
struct Observation {
  std::vector<double> x;
  double y = 0.0;
  std::optional<int> w;
};

/// Immutable sample of observations sharing a covariate dimension.
class Dataset {
 public:
  Dataset() = default;

  Dataset(std::size_t dim, std::vector<double> x, std::vector<double> y,
          std::optional<std::vector<int>> w = std::nullopt)
      : dim_(dim), x_(std::move(x)), y_(std::move(y)) {
    if (y_.empty()) fail(ErrorKind::empty_dataset, "dataset has no rows");
    if (dim_ == 0) fail(ErrorKind::shape, "covariate dimension must be positive");
    if (x_.size() != y_.size() * dim_) {
      fail(ErrorKind::shape, "covariate buffer does not match " + std::to_string(y_.size()) +
                                 " rows of dimension " + std::to_string(dim_));
    }
    for (std::size_t i = 0; i < y_.size(); ++i) {
      if (!std::isfinite(y_[i])) fail(ErrorKind::domain, "non-finite outcome at row " + std::to_string(i));
      for (std::size_t j = 0; j < dim_; ++j) {
        if (!std::isfinite(x_[i * dim_ + j])) {
          fail(ErrorKind::domain, "non-finite covariate at row " + std::to_string(i));
        }
      }
    }
    if (w) {
      if (w->size() != y_.size()) fail(ErrorKind::shape, "treatment column length mismatch");
      w_.reserve(w->size());
      for (std::size_t i = 0; i < w->size(); ++i) {
        const int v = (*w)[i];
        if (v != 0 && v != 1) {
          fail(ErrorKind::domain, "treatment value " + std::to_string(v) + " at row " +
                                      std::to_string(i) + " is not 0 or 1");
        }
        w_.push_back(static_cast<std::uint8_t>(v));
      }
      has_w_ = true;
    }
  }

  static Dataset from_observations(std::span<const Observation> rows) {
    if (rows.empty()) fail(ErrorKind::empty_dataset, "dataset has no rows");
    const std::size_t d = rows.front().x.size();
    const bool with_w = rows.front().w.has_value();
    std::vector<double> x;
    std::vector<double> y;
    std::vector<int> w;
    x.reserve(rows.size() * d);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      if (r.x.size() != d) {
        fail(ErrorKind::shape, "row " + std::to_string(i) + " has " + std::to_string(r.x.size()) +
                                   " covariates, expected " + std::to_string(d));
      }
      if (r.w.has_value() != with_w) {
        fail(ErrorKind::shape, "row " + std::to_string(i) + " disagrees on treatment presence");
      }
      x.insert(x.end(), r.x.begin(), r.x.end());
      y.push_back(r.y);
      if (with_w) w.push_back(*r.w);
    }
    return with_w ? Dataset(d, std::move(x), std::move(y), std::move(w))
                  : Dataset(d, std::move(x), std::move(y));
  }

  std::size_t size() const { return y_.size(); }
  std::size_t dim() const { return dim_; }
  bool has_treatment() const { return has_w_; }

  std::span<const double> x(std::size_t i) const {
    return std::span<const double>(x_).subspan(i * dim_, dim_);
  }
  double y(std::size_t i) const { return y_[i]; }
  int w(std::size_t i) const { return w_[i]; }

  MatrixView covariates() const { return MatrixView(x_, size(), dim_); }
  std::span<const double> outcomes() const { return y_; }
  std::vector<int> treatments() const { return {w_.begin(), w_.end()}; }

  Observation observation(std::size_t i) const {
    Observation o{{x(i).begin(), x(i).end()}, y_[i], std::nullopt};
    if (has_w_) o.w = w_[i];
    return o;
  }

  /// Rows listed in `rows`, in that order.
  Dataset subset(std::span<const std::size_t> rows) const {
    std::vector<double> x;
    std::vector<double> y;
    x.reserve(rows.size() * dim_);
    y.reserve(rows.size());
    std::vector<int> w;
    for (const std::size_t r : rows) {
      const auto xr = this->x(r);
      x.insert(x.end(), xr.begin(), xr.end());
      y.push_back(y_[r]);
      if (has_w_) w.push_back(w_[r]);
    }
    if (has_w_) return Dataset(dim_, std::move(x), std::move(y), std::move(w));
    return Dataset(dim_, std::move(x), std::move(y));
  }

  std::size_t count_treated() const {
    return static_cast<std::size_t>(std::count(w_.begin(), w_.end(), std::uint8_t{1}));
  }

  /// True when every outcome is exactly 0 or 1.
  bool binary_outcome() const {
    return std::all_of(y_.begin(), y_.end(), [](double v) { return v == 0.0 || v == 1.0; });
  }

  void require_treatment() const {
    if (!has_w_) fail(ErrorKind::config, "this estimator needs a treatment/indicator column");
  }

  void require_both_arms() const {
    require_treatment();
    const std::size_t treated = count_treated();
    if (treated == 0 || treated == size()) {
      fail(ErrorKind::degenerate_arm, "dataset contains only " +
                                          std::string(treated == 0 ? "w=0" : "w=1") + " rows");
    }
  }

 private:
  std::size_t dim_ = 0;
  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<std::uint8_t> w_;
  bool has_w_ = false;
};

/// Balanced partition of n rows into K folds.
struct FoldAssignment {
  std::vector<std::size_t> fold_of;
  std::size_t folds = 0;

  std::size_t size() const { return fold_of.size(); }

  std::vector<std::size_t> rows_in(std::size_t k) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fold_of.size(); ++i) {
      if (fold_of[i] == k) out.push_back(i);
    }
    return out;
  }

  std::vector<std::size_t> rows_not_in(std::size_t k) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fold_of.size(); ++i) {
      if (fold_of[i] != k) out.push_back(i);
    }
    return out;
  }
};

/// Uniformly random balanced partition: shuffle, then cut the permutation
/// into K contiguous chunks.
inline FoldAssignment make_folds(std::size_t n, std::size_t folds, std::uint64_t seed) {
  if (folds < 2 || folds > n) {
    fail(ErrorKind::invalid_fold_count,
         "fold count " + std::to_string(folds) + " not in [2, " + std::to_string(n) + "]");
  }
  const auto perm = random_permutation(n, seed);
  FoldAssignment out;
  out.folds = folds;
  out.fold_of.resize(n);
  for (std::size_t p = 0; p < n; ++p) out.fold_of[perm[p]] = p * folds / n;
  return out;
}

inline constexpr double kDefaultPropensityClip = 0.01;
inline constexpr double kDefaultProbabilityClip = 0.01;

/// Floors used to keep propensities and binary-outcome means away from 0 and 1.
struct ClipConfig {
  double propensity = kDefaultPropensityClip;
  double probability = kDefaultProbabilityClip;

  void validate() const {
    if (!(propensity >= 0.0 && propensity < 0.5) || !(probability >= 0.0 && probability < 0.5)) {
      fail(ErrorKind::config, "clip floors must lie in [0, 0.5)");
    }
  }
};

inline double clip(double v, double floor) { return std::clamp(v, floor, 1.0 - floor); }

/// Per-row nuisance predictions, each produced without the row in training.
struct NuisanceEstimates {
  std::vector<double> mu0_hat;
  std::vector<double> mu1_hat;
  std::vector<double> pi_hat;

  std::size_t size() const { return pi_hat.size(); }
};

}  // namespace iflearn
