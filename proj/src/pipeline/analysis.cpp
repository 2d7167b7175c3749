//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#include "cardiogen/pipeline/analysis.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "cardiogen/core/error.h"

namespace cardiogen::pipeline {

namespace {

std::vector<double> counts_of(std::span<const int> bins) {
  const int top = bins.empty() ? 0 : *std::max_element(bins.begin(), bins.end());
  std::vector<double> counts(top + 1, 0.0);
  for (int b: bins)
    counts[b] += 1;
  return counts;
}

double entropy_of_counts(const std::vector<double> &counts, double n) {
  double h = 0;
  for (double c: counts)
    if (c > 0)
      h -= c / n * std::log(c / n);
  return h;
}

}  // namespace

std::vector<int> quantile_bins(const Eigen::VectorXd &column, int bins) {
  if (bins < 1)
    throw Error(ErrorCode::kInvalidArgument, "bin count must be positive");
  if (!column.allFinite())
    throw Error(ErrorCode::kNonFiniteInput, "non-finite descriptor value");
  const auto n = static_cast<std::int64_t>(column.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return column[a] < column[b]; });
  std::vector<int> out(n);
  std::int64_t first = 0;
  for (std::int64_t r = 0; r < n; ++r) {
    if (r > 0 && column[order[r]] != column[order[r - 1]])
      first = r;
    out[order[r]] = static_cast<int>(first * bins / n);
  }
  return out;
}

double entropy(std::span<const int> bins) {
  if (bins.empty())
    return 0;
  return entropy_of_counts(counts_of(bins), static_cast<double>(bins.size()));
}

double mutual_information(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size())
    throw Error(ErrorCode::kLengthMismatch, "mutual information inputs differ");
  if (a.empty())
    return 0;
  const double n = static_cast<double>(a.size());
  const std::vector<double> ca = counts_of(a);
  const std::vector<double> cb = counts_of(b);
  std::vector<double> joint(ca.size() * cb.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    joint[a[i] * cb.size() + b[i]] += 1;
  double mi = 0;
  for (std::size_t i = 0; i < ca.size(); ++i)
    for (std::size_t j = 0; j < cb.size(); ++j) {
      const double c = joint[i * cb.size() + j];
      if (c > 0)
        mi += c / n * std::log(c * n / (ca[i] * cb[j]));
    }
  return std::max(mi, 0.0);
}

MiPruning prune_descriptors_mi(const Eigen::MatrixXd &data,
                               const MiConfig &config) {
  if (data.rows() < 2)
    throw Error(ErrorCode::kTooFewRows,
                "mutual information pruning needs at least two rows");
  const int d = static_cast<int>(data.cols());
  std::vector<std::vector<int>> bins(d);
  std::vector<double> h(d);
  for (int j = 0; j < d; ++j) {
    bins[j] = quantile_bins(data.col(j), config.bins);
    h[j] = entropy(bins[j]);
  }
  MiPruning out;
  std::vector<bool> dropped(d, false);
  for (int j = 0; j < d; ++j)
    if (h[j] <= 0) {
      dropped[j] = true;
      out.constant.push_back(j);
    }
  for (int i = 0; i < d; ++i) {
    if (dropped[i])
      continue;
    for (int j = i + 1; j < d; ++j) {
      if (dropped[j])
        continue;
      const double mi = mutual_information(bins[i], bins[j]);
      if (mi / std::min(h[i], h[j]) > config.redundancy) {
        dropped[j] = true;
        out.redundant.push_back(j);
      }
    }
    out.kept.push_back(i);
  }
  std::sort(out.redundant.begin(), out.redundant.end());
  return out;
}

Eigen::MatrixXd select_columns(const Eigen::MatrixXd &data,
                               std::span<const int> columns) {
  Eigen::MatrixXd out(data.rows(), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t k = 0; k < columns.size(); ++k) {
    if (columns[k] < 0 || columns[k] >= data.cols())
      throw Error(ErrorCode::kLayoutMismatch, "column index out of range");
    out.col(static_cast<Eigen::Index>(k)) = data.col(columns[k]);
  }
  return out;
}

double cosine_similarity(const Eigen::VectorXd &a, const Eigen::VectorXd &b) {
  if (a.size() != b.size())
    throw Error(ErrorCode::kLayoutMismatch, "descriptor widths differ");
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0 || nb == 0)
    return 0;
  return std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
}

std::vector<RankedEntry> cosine_rank(const Eigen::VectorXd &input,
                                     const Eigen::MatrixXd &candidates,
                                     std::span<const std::string> names) {
  if (candidates.rows() > 0 && candidates.cols() != input.size())
    throw Error(ErrorCode::kLayoutMismatch,
                "candidate width " + std::to_string(candidates.cols())
                    + " differs from input width "
                    + std::to_string(input.size()));
  if (static_cast<Eigen::Index>(names.size()) != candidates.rows())
    throw Error(ErrorCode::kLayoutMismatch, "one name per candidate needed");
  std::vector<RankedEntry> out(candidates.rows());
  for (Eigen::Index i = 0; i < candidates.rows(); ++i)
    out[i] = { static_cast<int>(i),
               cosine_similarity(input, candidates.row(i).transpose()) };
  std::stable_sort(out.begin(), out.end(),
                   [&](const RankedEntry &x, const RankedEntry &y) {
                     if (x.similarity != y.similarity)
                       return x.similarity > y.similarity;
                     return names[x.index] < names[y.index];
                   });
  return out;
}

Eigen::MatrixXd PcaModel::project(const Eigen::MatrixXd &data) const {
  if (data.cols() != mean.size())
    throw Error(ErrorCode::kLayoutMismatch, "projection width differs");
  Eigen::MatrixXd z = data.rowwise() - mean.transpose();
  for (Eigen::Index j = 0; j < z.cols(); ++j)
    z.col(j) = scale[j] > 0 ? Eigen::VectorXd(z.col(j) / scale[j])
                            : Eigen::VectorXd::Zero(z.rows());
  return z * components.transpose();
}

PcaResult pca_fit_project(const Eigen::MatrixXd &data, int k) {
  if (k < 1 || k > data.cols())
    throw Error(ErrorCode::kInvalidArgument,
                "component count must lie in [1, columns]");
  if (data.rows() < k + 1)
    throw Error(ErrorCode::kTooFewRows,
                "PCA needs at least " + std::to_string(k + 1) + " rows");
  if (!data.allFinite())
    throw Error(ErrorCode::kNonFiniteInput, "non-finite PCA input");
  const double n = static_cast<double>(data.rows());
  PcaResult r;
  PcaModel &m = r.model;
  m.mean = data.colwise().mean().transpose();
  const Eigen::MatrixXd centered = data.rowwise() - m.mean.transpose();
  m.scale = (centered.colwise().squaredNorm() / (n - 1)).cwiseSqrt().transpose();
  if (m.scale.maxCoeff() <= 0)
    throw Error(ErrorCode::kDegenerateData, "all rows are identical");
  Eigen::MatrixXd z = centered;
  for (Eigen::Index j = 0; j < z.cols(); ++j)
    z.col(j) = m.scale[j] > 0 ? Eigen::VectorXd(z.col(j) / m.scale[j])
                              : Eigen::VectorXd::Zero(z.rows());
  const Eigen::MatrixXd cov = z.transpose() * z / (n - 1);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  const double total = cov.trace();
  const Eigen::Index d = cov.rows();
  m.components.resize(k, d);
  m.explained_variance_ratio.resize(k);
  for (int c = 0; c < k; ++c) {
    Eigen::VectorXd v = eig.eigenvectors().col(d - 1 - c);
    Eigen::Index at = 0;
    v.cwiseAbs().maxCoeff(&at);
    if (v[at] < 0)
      v = -v;
    m.components.row(c) = v.transpose();
    m.explained_variance_ratio[c] =
        std::max(eig.eigenvalues()[d - 1 - c], 0.0) / total;
  }
  r.projected = z * m.components.transpose();
  return r;
}

}  // namespace cardiogen::pipeline
