#pragma once

// Nonparametric base regressors. Every learner predicts a convex combination
// of training outcomes, so predictions never leave [min(y), max(y)].

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "iflearn/data.hpp"
#include "iflearn/error.hpp"
#include "iflearn/rng.hpp"

namespace iflearn {

enum class LearnerKind { knn, kernel, forest };
enum class KernelShape { gaussian, epanechnikov };

struct KnnParams {
  std::size_t k = 10;
};

struct KernelParams {
  KernelShape shape = KernelShape::gaussian;
  double bandwidth = 0.1;
  // When non-empty the bandwidth is chosen from this grid by K-fold CV on the
  // training data and `bandwidth` is ignored.
  std::vector<double> cv_grid;
  std::size_t cv_folds = 5;
};

struct ForestParams {
  std::size_t n_trees = 500;
  std::size_t min_leaf = 5;
  double subsample_fraction = 0.5;
  std::optional<std::size_t> features_per_split;  // all features when unset
  bool honest = true;
};

struct LearnerSpec {
  LearnerKind kind = LearnerKind::kernel;
  KnnParams knn;
  KernelParams kernel;
  ForestParams forest;
  bool standardize = false;

  static LearnerSpec make_knn(std::size_t k) {
    LearnerSpec s;
    s.kind = LearnerKind::knn;
    s.knn.k = k;
    return s;
  }

  static LearnerSpec make_kernel(double bandwidth, KernelShape shape = KernelShape::gaussian) {
    LearnerSpec s;
    s.kind = LearnerKind::kernel;
    s.kernel.bandwidth = bandwidth;
    s.kernel.shape = shape;
    return s;
  }

  static LearnerSpec make_kernel_cv(std::vector<double> grid, KernelShape shape = KernelShape::gaussian,
                                    std::size_t folds = 5) {
    LearnerSpec s;
    s.kind = LearnerKind::kernel;
    s.kernel.shape = shape;
    s.kernel.cv_grid = std::move(grid);
    s.kernel.cv_folds = folds;
    return s;
  }

  static LearnerSpec make_forest(std::size_t n_trees, std::size_t min_leaf, double subsample_fraction,
                                 bool honest, std::optional<std::size_t> features_per_split = std::nullopt) {
    LearnerSpec s;
    s.kind = LearnerKind::forest;
    s.forest = {n_trees, min_leaf, subsample_fraction, features_per_split, honest};
    return s;
  }

  /// Checks hyperparameters that do not depend on the training data.
  void validate() const {
    switch (kind) {
      case LearnerKind::knn:
        if (knn.k == 0) fail(ErrorKind::hyperparameter, "knn.k must be positive");
        break;
      case LearnerKind::kernel:
        if (kernel.cv_grid.empty()) {
          if (!(kernel.bandwidth > 0.0) || !std::isfinite(kernel.bandwidth)) {
            fail(ErrorKind::hyperparameter, "kernel.bandwidth must be positive");
          }
        } else {
          for (const double h : kernel.cv_grid) {
            if (!(h > 0.0) || !std::isfinite(h)) fail(ErrorKind::hyperparameter, "kernel.cv_grid entries must be positive");
          }
          if (kernel.cv_folds < 2) fail(ErrorKind::hyperparameter, "kernel.cv_folds must be at least 2");
        }
        break;
      case LearnerKind::forest:
        if (forest.n_trees == 0) fail(ErrorKind::hyperparameter, "forest.n_trees must be positive");
        if (forest.min_leaf == 0) fail(ErrorKind::hyperparameter, "forest.min_leaf must be positive");
        if (!(forest.subsample_fraction > 0.0 && forest.subsample_fraction <= 1.0)) {
          fail(ErrorKind::hyperparameter, "forest.subsample_fraction must lie in (0, 1]");
        }
        if (forest.features_per_split && *forest.features_per_split == 0) {
          fail(ErrorKind::hyperparameter, "forest.features_per_split must be positive");
        }
        break;
    }
  }
};

/// Bandwidth grid used for 1-D experiments.
inline std::vector<double> default_bandwidth_grid() {
  return {0.01, 0.02, 0.03, 0.05, 0.075, 0.1, 0.15, 0.2, 0.3, 0.5};
}

namespace detail {

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double diff = a[j] - b[j];
    s += diff * diff;
  }
  return s;
}

/// Column-wise affine rescaling learned at fit time.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  bool active() const { return !mean.empty(); }

  static Standardizer fit(MatrixView x) {
    Standardizer s;
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();
    s.mean.assign(d, 0.0);
    s.scale.assign(d, 1.0);
    for (std::size_t j = 0; j < d; ++j) {
      double m = 0.0;
      for (std::size_t i = 0; i < n; ++i) m += x(i, j);
      m /= static_cast<double>(n);
      double v = 0.0;
      for (std::size_t i = 0; i < n; ++i) v += (x(i, j) - m) * (x(i, j) - m);
      v /= static_cast<double>(n);
      s.mean[j] = m;
      s.scale[j] = v > 0.0 ? std::sqrt(v) : 1.0;
    }
    return s;
  }

  void apply(std::span<const double> in, std::span<double> out) const {
    for (std::size_t j = 0; j < in.size(); ++j) out[j] = (in[j] - mean[j]) / scale[j];
  }

  Matrix apply(MatrixView x) const {
    Matrix out(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i) apply(x.row(i), out.row(i));
    return out;
  }
};

inline double mean_of(std::span<const double> y) {
  double s = 0.0;
  for (const double v : y) s += v;
  return s / static_cast<double>(y.size());
}

}  // namespace detail

/// k nearest neighbours in Euclidean distance; ties broken by training index.
class KnnModel {
 public:
  KnnModel(MatrixView x, std::span<const double> y, std::size_t k)
      : x_(std::vector<double>(x.data().begin(), x.data().end()), x.rows(), x.cols()),
        y_(y.begin(), y.end()),
        k_(k) {}

  double predict(std::span<const double> q) const {
    const std::size_t n = y_.size();
    std::vector<std::pair<double, std::size_t>> dist(n);
    for (std::size_t i = 0; i < n; ++i) dist[i] = {detail::squared_distance(x_.row(i), q), i};
    if (k_ < n) {
      std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k_ - 1), dist.end());
      dist.resize(k_);
    }
    std::sort(dist.begin(), dist.end(), [](const auto& a, const auto& b) { return a.second < b.second; });
    double s = 0.0;
    for (const auto& [d2, i] : dist) s += y_[i];
    return s / static_cast<double>(dist.size());
  }

  std::size_t k() const { return k_; }

 private:
  Matrix x_;
  std::vector<double> y_;
  std::size_t k_;
};

/// Nadaraya-Watson smoother over a training sample sorted on the first
/// covariate, so each query only visits points inside the kernel support.
/// The Gaussian kernel is truncated at 8 bandwidths (relative weight < 2e-14).
class KernelSmoother {
 public:
  KernelSmoother() = default;

  KernelSmoother(MatrixView x, std::span<const double> y, std::span<const std::size_t> rows)
      : dim_(x.cols()) {
    std::vector<std::size_t> order(rows.begin(), rows.end());
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return x(a, 0) < x(b, 0); });
    key_.reserve(order.size());
    y_.reserve(order.size());
    x_.reserve(order.size() * dim_);
    double s = 0.0;
    for (const std::size_t r : order) {
      key_.push_back(x(r, 0));
      y_.push_back(y[r]);
      s += y[r];
      const auto xr = x.row(r);
      x_.insert(x_.end(), xr.begin(), xr.end());
    }
    mean_ = order.empty() ? 0.0 : s / static_cast<double>(order.size());
  }

  static KernelSmoother all_rows(MatrixView x, std::span<const double> y) {
    std::vector<std::size_t> rows(x.rows());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    return KernelSmoother(x, y, rows);
  }

  std::size_t size() const { return y_.size(); }
  double mean() const { return mean_; }

  double estimate(std::span<const double> q, double bandwidth, KernelShape shape) const {
    const double support = shape == KernelShape::gaussian ? 8.0 : 1.0;
    const double radius = support * bandwidth;
    const auto lo = std::lower_bound(key_.begin(), key_.end(), q[0] - radius);
    const auto hi = std::upper_bound(lo, key_.end(), q[0] + radius);
    const auto begin = static_cast<std::size_t>(lo - key_.begin());
    const auto end = static_cast<std::size_t>(hi - key_.begin());
    const double inv_h2 = 1.0 / (bandwidth * bandwidth);
    const double cutoff = support * support;
    double sw = 0.0;
    double swy = 0.0;
    if (dim_ == 1) {
      const double q0 = q[0];
      if (shape == KernelShape::gaussian) {
        for (std::size_t i = begin; i < end; ++i) {
          const double diff = key_[i] - q0;
          const double u2 = diff * diff * inv_h2;
          const double w = u2 <= cutoff ? std::exp(-0.5 * u2) : 0.0;
          sw += w;
          swy += w * y_[i];
        }
      } else {
        for (std::size_t i = begin; i < end; ++i) {
          const double diff = key_[i] - q0;
          const double u2 = diff * diff * inv_h2;
          const double w = u2 < 1.0 ? 0.75 * (1.0 - u2) : 0.0;
          sw += w;
          swy += w * y_[i];
        }
      }
    } else {
      for (std::size_t i = begin; i < end; ++i) {
        const std::span<const double> xi(x_.data() + i * dim_, dim_);
        const double u2 = detail::squared_distance(xi, q) * inv_h2;
        if (u2 > cutoff) continue;
        const double w = shape == KernelShape::gaussian ? std::exp(-0.5 * u2) : (u2 < 1.0 ? 0.75 * (1.0 - u2) : 0.0);
        sw += w;
        swy += w * y_[i];
      }
    }
    // Empty neighbourhood: fall back to the training mean.
    if (!(sw > 0.0)) return mean_;
    return swy / sw;
  }

 private:
  std::size_t dim_ = 0;
  std::vector<double> key_;
  std::vector<double> x_;
  std::vector<double> y_;
  double mean_ = 0.0;
};

struct BandwidthSelection {
  double bandwidth = 0.0;
  std::vector<double> grid;
  std::vector<double> cv_error;  // mean squared validation error per grid entry
};

/// K-fold cross-validated bandwidth; ties go to the smallest bandwidth.
inline BandwidthSelection select_bandwidth(MatrixView x, std::span<const double> y,
                                           std::vector<double> grid, KernelShape shape,
                                           std::size_t folds, std::uint64_t seed) {
  std::sort(grid.begin(), grid.end());
  BandwidthSelection out;
  out.grid = grid;
  out.cv_error.assign(grid.size(), 0.0);
  const std::size_t n = x.rows();
  if (n < 2) {
    out.bandwidth = grid.back();
    return out;
  }
  const auto assignment = make_folds(n, std::min(folds, n), seed);
  for (std::size_t k = 0; k < assignment.folds; ++k) {
    const auto train = assignment.rows_not_in(k);
    const KernelSmoother smoother(x, y, train);
    for (std::size_t i = 0; i < n; ++i) {
      if (assignment.fold_of[i] != k) continue;
      for (std::size_t g = 0; g < grid.size(); ++g) {
        const double r = y[i] - smoother.estimate(x.row(i), grid[g], shape);
        out.cv_error[g] += r * r;
      }
    }
  }
  std::size_t best = 0;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    out.cv_error[g] /= static_cast<double>(n);
    if (out.cv_error[g] < out.cv_error[best]) best = g;
  }
  out.bandwidth = grid[best];
  return out;
}

class KernelModel {
 public:
  KernelModel(MatrixView x, std::span<const double> y, double bandwidth, KernelShape shape)
      : smoother_(KernelSmoother::all_rows(x, y)), bandwidth_(bandwidth), shape_(shape) {}

  double predict(std::span<const double> q) const { return smoother_.estimate(q, bandwidth_, shape_); }
  double bandwidth() const { return bandwidth_; }

 private:
  KernelSmoother smoother_;
  double bandwidth_;
  KernelShape shape_;
};

/// Binary regression tree stored as a flat node array.
struct RegressionTree {
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    double value = 0.0;
  };

  std::vector<Node> nodes;
  // Rows (training indices) that chose the splits and that set the leaf
  // values. Identical for adaptive trees, disjoint for honest ones.
  std::vector<std::uint32_t> structure_rows;
  std::vector<std::uint32_t> estimation_rows;
  std::vector<std::uint32_t> inbag_sorted;

  std::size_t leaf_of(std::span<const double> x) const {
    std::size_t id = 0;
    while (nodes[id].feature >= 0) {
      const auto& nd = nodes[id];
      id = x[static_cast<std::size_t>(nd.feature)] <= nd.threshold ? nd.left : nd.right;
    }
    return id;
  }

  double predict(std::span<const double> x) const { return nodes[leaf_of(x)].value; }

  bool in_bag(std::size_t row) const {
    return std::binary_search(inbag_sorted.begin(), inbag_sorted.end(), static_cast<std::uint32_t>(row));
  }
};

namespace detail {

struct SplitCandidate {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

// Best variance-reduction split of rows[begin, end). Ties keep the first
// candidate seen: features are visited in ascending index order and
// thresholds in ascending order.
inline SplitCandidate best_split(MatrixView x, std::span<const double> y,
                                 std::span<const std::uint32_t> rows, std::span<const std::size_t> features,
                                 std::size_t min_leaf) {
  const std::size_t m = rows.size();
  double total = 0.0;
  for (const auto r : rows) total += y[r];
  const double base = total * total / static_cast<double>(m);
  SplitCandidate best;
  best.gain = 1e-12 * (1.0 + std::abs(base));
  std::vector<std::pair<double, double>> sorted(m);
  for (const std::size_t f : features) {
    for (std::size_t i = 0; i < m; ++i) sorted[i] = {x(rows[i], f), y[rows[i]]};
    std::sort(sorted.begin(), sorted.end());
    double left = 0.0;
    for (std::size_t i = 0; i + 1 < m; ++i) {
      left += sorted[i].second;
      const std::size_t nl = i + 1;
      const std::size_t nr = m - nl;
      if (nl < min_leaf) continue;
      if (nr < min_leaf) break;
      if (!(sorted[i].first < sorted[i + 1].first)) continue;
      const double right = total - left;
      const double gain = left * left / static_cast<double>(nl) + right * right / static_cast<double>(nr) - base;
      if (gain > best.gain) {
        best.feature = static_cast<int>(f);
        best.threshold = 0.5 * (sorted[i].first + sorted[i + 1].first);
        best.gain = gain;
      }
    }
  }
  return best;
}

inline RegressionTree grow_tree(MatrixView x, std::span<const double> y, const ForestParams& params,
                                double fallback, std::uint64_t seed) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  Stream rng(seed);

  std::vector<std::uint32_t> sample(n);
  std::iota(sample.begin(), sample.end(), 0u);
  auto size = static_cast<std::size_t>(std::llround(params.subsample_fraction * static_cast<double>(n)));
  size = std::clamp<std::size_t>(size, 1, n);
  for (std::size_t i = 0; i < size; ++i) {
    const std::size_t j = i + rng.uniform_index(n - i);
    std::swap(sample[i], sample[j]);
  }
  sample.resize(size);

  RegressionTree tree;
  tree.inbag_sorted = sample;
  std::sort(tree.inbag_sorted.begin(), tree.inbag_sorted.end());
  if (params.honest) {
    const std::size_t half = size / 2;
    tree.structure_rows.assign(sample.begin(), sample.begin() + static_cast<std::ptrdiff_t>(half));
    tree.estimation_rows.assign(sample.begin() + static_cast<std::ptrdiff_t>(half), sample.end());
  } else {
    tree.structure_rows = sample;
    tree.estimation_rows = sample;
  }

  const std::size_t mtry = std::min(params.features_per_split.value_or(d), d);
  std::vector<std::size_t> all_features(d);
  std::iota(all_features.begin(), all_features.end(), std::size_t{0});

  std::vector<std::uint32_t> rows = tree.structure_rows;
  struct Pending {
    std::uint32_t node;
    std::size_t begin;
    std::size_t end;
  };
  tree.nodes.push_back({});
  std::vector<Pending> stack{{0, 0, rows.size()}};
  while (!stack.empty()) {
    const Pending p = stack.back();
    stack.pop_back();
    const std::size_t m = p.end - p.begin;
    if (m < 2 * params.min_leaf) continue;
    for (std::size_t i = 0; i < mtry; ++i) {
      const std::size_t j = i + rng.uniform_index(d - i);
      std::swap(all_features[i], all_features[j]);
    }
    std::vector<std::size_t> features(all_features.begin(), all_features.begin() + static_cast<std::ptrdiff_t>(mtry));
    std::sort(features.begin(), features.end());
    const std::span<const std::uint32_t> node_rows(rows.data() + p.begin, m);
    const auto split = best_split(x, y, node_rows, features, params.min_leaf);
    if (split.feature < 0) continue;
    const auto f = static_cast<std::size_t>(split.feature);
    const auto mid = std::stable_partition(rows.begin() + static_cast<std::ptrdiff_t>(p.begin),
                                           rows.begin() + static_cast<std::ptrdiff_t>(p.end),
                                           [&](std::uint32_t r) { return x(r, f) <= split.threshold; });
    const auto cut = static_cast<std::size_t>(mid - rows.begin());
    const auto left = static_cast<std::uint32_t>(tree.nodes.size());
    tree.nodes.push_back({});
    tree.nodes.push_back({});
    auto& node = tree.nodes[p.node];
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = left;
    node.right = left + 1;
    stack.push_back({left + 1, cut, p.end});
    stack.push_back({left, p.begin, cut});
  }

  std::vector<double> sums(tree.nodes.size(), 0.0);
  std::vector<std::size_t> counts(tree.nodes.size(), 0);
  for (const auto r : tree.estimation_rows) {
    const std::size_t leaf = tree.leaf_of(x.row(r));
    sums[leaf] += y[r];
    ++counts[leaf];
  }
  for (std::size_t id = 0; id < tree.nodes.size(); ++id) {
    if (tree.nodes[id].feature >= 0) continue;
    tree.nodes[id].value = counts[id] > 0 ? sums[id] / static_cast<double>(counts[id]) : fallback;
  }
  return tree;
}

}  // namespace detail

/// Random regression forest built from subsamples drawn without replacement.
/// With `honest` set, each tree picks its splits on one half of its subsample
/// and fills its leaves from the other half.
class ForestModel {
 public:
  ForestModel(MatrixView x, std::span<const double> y, const ForestParams& params, std::uint64_t seed)
      : n_train_(x.rows()) {
    const double fallback = detail::mean_of(y);
    trees_.reserve(params.n_trees);
    for (std::size_t t = 0; t < params.n_trees; ++t) {
      trees_.push_back(detail::grow_tree(x, y, params, fallback, derive_seed(seed, {t})));
    }
  }

  double predict(std::span<const double> q) const {
    double s = 0.0;
    for (const auto& tree : trees_) s += tree.predict(q);
    return s / static_cast<double>(trees_.size());
  }

  /// Average over the trees whose subsample excluded training row `row`;
  /// all trees if there are none.
  double predict_out_of_bag(std::size_t row, std::span<const double> q) const {
    double s = 0.0;
    std::size_t used = 0;
    for (const auto& tree : trees_) {
      if (tree.in_bag(row)) continue;
      s += tree.predict(q);
      ++used;
    }
    if (used == 0) return predict(q);
    return s / static_cast<double>(used);
  }

  std::size_t tree_count() const { return trees_.size(); }
  const RegressionTree& tree(std::size_t t) const { return trees_[t]; }
  std::size_t training_size() const { return n_train_; }

 private:
  std::vector<RegressionTree> trees_;
  std::size_t n_train_;
};

/// A trained learner. Immutable; safe to share across threads.
class FittedModel {
 public:
  using State = std::variant<KnnModel, KernelModel, ForestModel>;

  FittedModel(LearnerSpec spec, std::size_t dim, State state, detail::Standardizer standardizer,
              std::optional<double> clip_floor = std::nullopt)
      : spec_(std::move(spec)),
        dim_(dim),
        state_(std::move(state)),
        standardizer_(std::move(standardizer)),
        clip_floor_(clip_floor) {}

  std::size_t dim() const { return dim_; }
  const LearnerSpec& spec() const { return spec_; }
  std::optional<double> clip_floor() const { return clip_floor_; }

  double predict(std::span<const double> x) const {
    check_dim(x);
    return finish(std::visit([&](const auto& m) { return m.predict(prepared(x)); }, state_));
  }

  std::vector<double> predict(MatrixView x) const {
    std::vector<double> out(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) out[i] = predict(x.row(i));
    return out;
  }

  /// Out-of-bag prediction for training row `row` (forests only).
  double predict_out_of_bag(std::size_t row, std::span<const double> x) const {
    check_dim(x);
    const auto* forest = std::get_if<ForestModel>(&state_);
    if (!forest) fail(ErrorKind::config, "out-of-bag prediction requires a forest learner");
    return finish(forest->predict_out_of_bag(row, prepared(x)));
  }

  const ForestModel* forest() const { return std::get_if<ForestModel>(&state_); }

  void set_clip_floor(double floor) { clip_floor_ = floor; }

  std::optional<double> bandwidth() const {
    if (const auto* k = std::get_if<KernelModel>(&state_)) return k->bandwidth();
    return std::nullopt;
  }

 private:
  void check_dim(std::span<const double> x) const {
    if (x.size() != dim_) {
      fail(ErrorKind::shape, "query has " + std::to_string(x.size()) + " covariates, model was trained on " +
                                 std::to_string(dim_));
    }
  }

  std::span<const double> prepared(std::span<const double> x) const {
    if (!standardizer_.active()) return x;
    scratch_.resize(x.size());
    standardizer_.apply(x, scratch_);
    return scratch_;
  }

  double finish(double v) const { return clip_floor_ ? clip(v, *clip_floor_) : v; }

  LearnerSpec spec_;
  std::size_t dim_;
  State state_;
  detail::Standardizer standardizer_;
  std::optional<double> clip_floor_;
  static thread_local inline std::vector<double> scratch_;
};

/// Trains `spec` on (x, y). Deterministic in (spec, data, seed).
inline FittedModel fit(const LearnerSpec& spec, MatrixView x, std::span<const double> y, std::uint64_t seed) {
  spec.validate();
  const std::size_t n = x.rows();
  if (n == 0) fail(ErrorKind::empty_training, "cannot fit a learner on zero rows");
  if (y.size() != n) fail(ErrorKind::shape, "outcome length does not match covariate rows");
  const std::size_t d = x.cols();

  detail::Standardizer standardizer;
  Matrix scaled;
  MatrixView xv = x;
  if (spec.standardize) {
    standardizer = detail::Standardizer::fit(x);
    scaled = standardizer.apply(x);
    xv = scaled.view();
  }

  switch (spec.kind) {
    case LearnerKind::knn: {
      if (spec.knn.k > n) {
        fail(ErrorKind::hyperparameter, "knn.k=" + std::to_string(spec.knn.k) + " exceeds training size " +
                                            std::to_string(n));
      }
      return FittedModel(spec, d, KnnModel(xv, y, spec.knn.k), standardizer);
    }
    case LearnerKind::kernel: {
      double h = spec.kernel.bandwidth;
      if (!spec.kernel.cv_grid.empty()) {
        h = select_bandwidth(xv, y, spec.kernel.cv_grid, spec.kernel.shape, spec.kernel.cv_folds, seed).bandwidth;
      }
      return FittedModel(spec, d, KernelModel(xv, y, h, spec.kernel.shape), standardizer);
    }
    case LearnerKind::forest: {
      if (spec.forest.min_leaf > n) {
        fail(ErrorKind::hyperparameter, "forest.min_leaf=" + std::to_string(spec.forest.min_leaf) +
                                            " exceeds training size " + std::to_string(n));
      }
      if (spec.forest.features_per_split && *spec.forest.features_per_split > d) {
        fail(ErrorKind::hyperparameter, "forest.features_per_split exceeds covariate dimension");
      }
      return FittedModel(spec, d, ForestModel(xv, y, spec.forest, seed), standardizer);
    }
  }
  fail(ErrorKind::config, "unknown learner kind");
}

/// Like fit(), for 0/1 targets; predictions are clipped to [p_clip, 1 - p_clip].
inline FittedModel fit_probability(const LearnerSpec& spec, MatrixView x, std::span<const double> y,
                                   std::uint64_t seed, double p_clip) {
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] != 0.0 && y[i] != 1.0) {
      fail(ErrorKind::domain, "probability target at row " + std::to_string(i) + " is not 0 or 1");
    }
  }
  if (!(p_clip >= 0.0 && p_clip < 0.5)) fail(ErrorKind::config, "probability clip must lie in [0, 0.5)");
  FittedModel m = fit(spec, x, y, seed);
  m.set_clip_floor(p_clip);
  return m;
}

inline double predict(const FittedModel& model, std::span<const double> x) { return model.predict(x); }

}  // namespace iflearn
