//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#include "cardiogen/disc/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "cardiogen/core/error.h"

namespace cardiogen::disc {

namespace {

std::optional<double> ratio(double num, double den) {
  if (den == 0)
    return std::nullopt;
  return num / den;
}

void require_same_length(std::size_t a, std::size_t b) {
  if (a != b)
    throw Error(ErrorCode::kLengthMismatch,
                "scores and labels differ in length");
}

}  // namespace

ClassificationMetrics evaluate_metrics(const ConfusionCounts &c) {
  const double tp = static_cast<double>(c.tp);
  const double tn = static_cast<double>(c.tn);
  const double fp = static_cast<double>(c.fp);
  const double fn = static_cast<double>(c.fn);
  ClassificationMetrics m;
  m.accuracy = ratio(tp + tn, tp + tn + fp + fn);
  m.sensitivity = ratio(tp, tp + fn);
  m.specificity = ratio(tn, tn + fp);
  m.f1 = ratio(tp, tp + 0.5 * (fp + fn));
  if (m.sensitivity && m.specificity)
    m.ccr = 0.5 * (*m.sensitivity + *m.specificity);
  const double den = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
  if (den > 0)
    m.mcc = (tp * tn - fp * fn) / std::sqrt(den);
  return m;
}

ConfusionCounts confusion_counts(std::span<const double> scores,
                                 std::span<const int> labels,
                                 double threshold) {
  require_same_length(scores.size(), labels.size());
  ConfusionCounts c;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] >= threshold;
    const bool actual = labels[i] != 0;
    if (predicted && actual)
      ++c.tp;
    else if (predicted)
      ++c.fp;
    else if (actual)
      ++c.fn;
    else
      ++c.tn;
  }
  return c;
}

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
  require_same_length(scores.size(), labels.size());
  const auto positives =
      std::count_if(labels.begin(), labels.end(), [](int l) { return l != 0; });
  const auto negatives = static_cast<std::ptrdiff_t>(labels.size()) - positives;
  if (positives == 0 || negatives == 0)
    throw Error(ErrorCode::kSingleClassInput, "ROC AUC needs both classes");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  // Walk thresholds from high to low; tied scores move both rates at once.
  double area = 0;
  double tpr = 0, fpr = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    std::int64_t tp = 0, fp = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      (labels[order[j]] != 0 ? tp : fp) += 1;
      ++j;
    }
    const double next_tpr = tpr + double(tp) / double(positives);
    const double next_fpr = fpr + double(fp) / double(negatives);
    area += (next_fpr - fpr) * (tpr + next_tpr) / 2;
    tpr = next_tpr;
    fpr = next_fpr;
    i = j;
  }
  return area;
}

std::optional<double> pearson(std::span<const double> x,
                              std::span<const double> y) {
  require_same_length(x.size(), y.size());
  if (x.empty())
    return std::nullopt;
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0 || syy == 0)
    return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace cardiogen::disc
