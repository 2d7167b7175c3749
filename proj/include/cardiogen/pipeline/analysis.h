//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CARDIOGEN_PIPELINE_ANALYSIS_H_
#define CARDIOGEN_PIPELINE_ANALYSIS_H_

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace cardiogen::pipeline {

struct MiConfig {
  int bins = 16;
  /// Pairs with MI / min(H(a), H(b)) above this are redundant.
  double redundancy = 0.9;
};

/// Rank-quantile bin of each value: floor(r * bins / n) with r the 0-based
/// rank of the first member of its tie group.
std::vector<int> quantile_bins(const Eigen::VectorXd &column, int bins);

/// Plug-in entropy in nats.
double entropy(std::span<const int> bins);
double mutual_information(std::span<const int> a, std::span<const int> b);

struct MiPruning {
  std::vector<int> kept;
  std::vector<int> constant;   // zero-entropy columns
  std::vector<int> redundant;  // later member of a redundant pair
};

/// Rows are molecules. Constant columns go first; then pairs (i, j), i < j,
/// are scanned in order over surviving columns and j is dropped when the pair
/// is redundant. Throws TooFewRows below two rows.
MiPruning prune_descriptors_mi(const Eigen::MatrixXd &data,
                               const MiConfig &config = {});

Eigen::MatrixXd select_columns(const Eigen::MatrixXd &data,
                               std::span<const int> columns);

/// 0 when either vector has zero norm; clamped to [-1, 1].
double cosine_similarity(const Eigen::VectorXd &a, const Eigen::VectorXd &b);

struct RankedEntry {
  int index = 0;  // row of the candidate matrix
  double similarity = 0;
};

/// Candidates ordered by descending similarity to `input`, ties by name.
/// Throws LayoutMismatch when widths or counts disagree.
std::vector<RankedEntry> cosine_rank(const Eigen::VectorXd &input,
                                     const Eigen::MatrixXd &candidates,
                                     std::span<const std::string> names);

struct PcaModel {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;       // column standard deviation, 0 when constant
  Eigen::MatrixXd components;  // k x D, orthonormal rows
  Eigen::VectorXd explained_variance_ratio;

  Eigen::MatrixXd project(const Eigen::MatrixXd &data) const;
};

struct PcaResult {
  PcaModel model;
  Eigen::MatrixXd projected;  // rows x k
};

/// Z-scores the columns, then keeps the top-k eigenvectors of the
/// covariance. The largest-magnitude entry of each component is positive.
/// Throws TooFewRows below k + 1 rows and DegenerateData when every row is
/// the same.
PcaResult pca_fit_project(const Eigen::MatrixXd &data, int k = 2);

}  // namespace cardiogen::pipeline

#endif  // CARDIOGEN_PIPELINE_ANALYSIS_H_
