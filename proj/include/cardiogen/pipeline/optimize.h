//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CARDIOGEN_PIPELINE_OPTIMIZE_H_
#define CARDIOGEN_PIPELINE_OPTIMIZE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cardiogen/pipeline/analysis.h"
#include "cardiogen/pipeline/generation.h"

namespace cardiogen::pipeline {

struct OptimizeConfig {
  GenerationConfig generation;
  MiConfig mi;
  std::uint64_t seed = 0;
};

struct RankedCandidate {
  std::string smiles;
  double similarity = 0;
  ChannelPredictions predictions;
};

struct OptimizeReport {
  std::string input_smiles;  // canonical
  FilterSpec spec;
  std::vector<RankedCandidate> ranked;
  AttemptStats stats;
  bool budget_exhausted = false;
  /// Empty when there are no candidates to compare.
  std::optional<MiPruning> pruning;
  /// Input first, then candidates in ranked order. Empty below three rows
  /// or when every descriptor vector is identical.
  std::optional<PcaResult> pca;
  std::uint64_t seed = 0;
  std::string config_hash;
};

/// Digest of the input, filters and every configuration value.
std::string config_hash(std::string_view input_smiles, const FilterSpec &spec,
                        const OptimizeConfig &config);

/// Generation, descriptors for input and candidates, MI pruning fitted on
/// all of them, then cosine ranking in the pruned space. Requires at least
/// one active filter.
OptimizeReport optimize_cardiotoxic_drug(std::string_view input_smiles,
                                         const FilterSpec &spec,
                                         const ModelStack &models,
                                         const OptimizeConfig &config);

/// Tab-separated rank, smiles, similarity and one column per active channel,
/// preceded by a comment line carrying the seed and configuration hash.
std::string report_tsv(const OptimizeReport &report);
/// Summary: attempt counts, pruned descriptors, PCA ratios, seeds.
std::string report_json(const OptimizeReport &report);

}  // namespace cardiogen::pipeline

#endif  // CARDIOGEN_PIPELINE_OPTIMIZE_H_
