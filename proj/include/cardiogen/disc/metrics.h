//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CARDIOGEN_DISC_METRICS_H_
#define CARDIOGEN_DISC_METRICS_H_

#include <cstdint>
#include <optional>
#include <span>

namespace cardiogen::disc {

struct ConfusionCounts {
  std::int64_t tp = 0;
  std::int64_t tn = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;

  std::int64_t total() const noexcept { return tp + tn + fp + fn; }
};

/// Each metric is empty when its denominator is zero.
struct ClassificationMetrics {
  std::optional<double> accuracy;
  std::optional<double> sensitivity;
  std::optional<double> specificity;
  std::optional<double> f1;
  std::optional<double> ccr;
  std::optional<double> mcc;
};

ClassificationMetrics evaluate_metrics(const ConfusionCounts &counts);

/// Positive iff score >= threshold; labels are 0/1.
ConfusionCounts confusion_counts(std::span<const double> scores,
                                 std::span<const int> labels,
                                 double threshold);

/// Area under the ROC curve by the trapezoid rule over distinct score
/// thresholds. Throws SingleClassInput when a class is missing.
double roc_auc(std::span<const double> scores, std::span<const int> labels);

/// Empty when either side has zero variance.
std::optional<double> pearson(std::span<const double> x,
                              std::span<const double> y);

}  // namespace cardiogen::disc

#endif  // CARDIOGEN_DISC_METRICS_H_
