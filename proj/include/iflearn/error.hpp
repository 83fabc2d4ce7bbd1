#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace iflearn {

enum class ErrorKind {
  invalid_argument,
  shape,
  domain,
  config,
  schema,
  parse,
  empty_dataset,
  invalid_fold_count,
  hyperparameter,
  empty_training,
  degenerate_arm,
  insufficient_data,
  grouping_degenerate,
  variance_undefined,
  degenerate_experiment,
  io,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::shape: return "shape";
    case ErrorKind::domain: return "domain";
    case ErrorKind::config: return "config";
    case ErrorKind::schema: return "schema";
    case ErrorKind::parse: return "parse";
    case ErrorKind::empty_dataset: return "empty-dataset";
    case ErrorKind::invalid_fold_count: return "invalid-fold-count";
    case ErrorKind::hyperparameter: return "hyperparameter";
    case ErrorKind::empty_training: return "empty-training";
    case ErrorKind::degenerate_arm: return "degenerate-arm";
    case ErrorKind::insufficient_data: return "insufficient-data";
    case ErrorKind::grouping_degenerate: return "grouping-degenerate";
    case ErrorKind::variance_undefined: return "variance-undefined";
    case ErrorKind::degenerate_experiment: return "degenerate-experiment";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

// Validation errors are caused by malformed input or configuration; the
// rest are failures of an estimator on otherwise valid input.
constexpr bool is_validation_error(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::degenerate_arm:
    case ErrorKind::insufficient_data:
    case ErrorKind::grouping_degenerate:
    case ErrorKind::variance_undefined:
    case ErrorKind::degenerate_experiment:
      return false;
    default:
      return true;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + " error: " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace iflearn
