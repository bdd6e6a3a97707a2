#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace rahp::eval {

struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
  /// 0 when nothing was predicted positive.
  double precision() const;
  /// 0 when there are no positives.
  double recall() const;
  /// 0 when precision and recall are both 0.
  double f1() const;
};

/// Positive class is Helpful (true). Throws on a length mismatch or empty input.
Confusion confusion(std::span<const bool> predictions, std::span<const bool> labels);
double f1_score(std::span<const bool> predictions, std::span<const bool> labels);

/// Fraction of (positive, negative) pairs ranked correctly, ties worth 1/2.
/// Counted through a sort, so O(n log n). Throws "AUROC undefined" unless both
/// classes are present.
double auroc_pairwise(std::span<const double> scores, std::span<const bool> labels);
/// Trapezoidal area under the ROC curve, one point per distinct score.
double auroc_trapezoid(std::span<const double> scores, std::span<const bool> labels);
/// Both of the above; throws std::logic_error if they differ by more than 1e-9.
double auroc(std::span<const double> scores, std::span<const bool> labels);

inline constexpr double kDecisionThreshold = 0.5;

struct EvalReport {
  std::size_t count = 0;
  Confusion confusion;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double accuracy = 0.0;
  std::optional<double> auroc;  // nullopt when the labels have one class
  double mean_loss = 0.0;
  std::string config_fingerprint;

  nlohmann::ordered_json to_json() const;
  /// Small aligned table for terminals.
  std::string to_table() const;
};

/// Thresholds `scores` at `threshold` (score >= threshold is Helpful).
EvalReport make_report(std::span<const double> scores, std::span<const bool> labels,
                       double threshold = kDecisionThreshold);

}  // namespace rahp::eval
