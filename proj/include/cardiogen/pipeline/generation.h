//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CARDIOGEN_PIPELINE_GENERATION_H_
#define CARDIOGEN_PIPELINE_GENERATION_H_

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cardiogen/core/random.h"
#include "cardiogen/disc/model.h"
#include "cardiogen/lm/training.h"

namespace cardiogen::pipeline {

enum class Channel { kHerg, kNav15, kCav12 };
inline constexpr int kChannelCount = 3;
inline constexpr std::array<Channel, kChannelCount> kChannels {
  Channel::kHerg, Channel::kNav15, Channel::kCav12
};

std::string_view channel_name(Channel c);

enum class FilterMode { kOff, kBlockers, kNonBlockers, kRange };

struct ChannelFilter {
  FilterMode mode = FilterMode::kOff;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  static ChannelFilter off() { return {}; }
  static ChannelFilter blockers() { return { FilterMode::kBlockers }; }
  static ChannelFilter non_blockers() { return { FilterMode::kNonBlockers }; }
  /// Half-open range lo <= prediction < hi.
  static ChannelFilter range(double lo, double hi);

  bool active() const noexcept { return mode != FilterMode::kOff; }
  /// Regression filters take a pIC50; classification filters a probability
  /// compared against `threshold` (at or above means blocker).
  bool passes(double prediction, double threshold = 0.5) const;
  std::string describe() const;
};

/// Accepts "off", "blockers", "non-blockers" or a range "(lo,hi)" where
/// either bound may be -inf / inf. Throws ParseError.
ChannelFilter parse_channel_filter(std::string_view text);

using FilterSpec = std::array<ChannelFilter, kChannelCount>;

bool any_active(const FilterSpec &spec);

/// Models the pipeline needs. Pointers are borrowed; channels without a
/// model must have their filter off.
struct ModelStack {
  const lm::LanguageModel *generator = nullptr;
  const lm::LanguageModel *mlm = nullptr;
  std::array<const disc::FusionModel *, kChannelCount> channels {};
  double decision_threshold = 0.5;
};

using ChannelPredictions = std::array<std::optional<double>, kChannelCount>;

/// Predictions of every active channel for one molecule, each made as a
/// batch of one so that repeated calls agree bitwise.
ChannelPredictions predict_channels(const ModelStack &models,
                                    const FilterSpec &spec,
                                    const smiles::Molecule &mol);

bool passes_filters(const FilterSpec &spec, const ChannelPredictions &p,
                    double threshold = 0.5);

struct GenerationConfig {
  int n = 100;
  std::int64_t max_attempts = 10000;
  /// Attempts sampled together; results do not depend on it.
  int chunk = 32;
  lm::SampleConfig sample;
};

struct AttemptStats {
  std::int64_t attempts = 0;
  std::int64_t invalid = 0;
  std::int64_t duplicates = 0;
  std::int64_t input_matches = 0;
  std::int64_t rejected = 0;
  std::int64_t accepted = 0;
};

struct Candidate {
  std::string smiles;  // canonical
  ChannelPredictions predictions;
};

struct GenerationResult {
  std::vector<Candidate> candidates;  // in attempt order
  AttemptStats stats;
  /// Set when max_attempts ran out before n candidates were accepted.
  bool budget_exhausted = false;
};

/// Samples from the generator conditioned on the scaffold and properties of
/// the input molecule until `config.n` distinct candidates pass every active
/// filter. Attempt i draws from rng.split(i). Throws InvalidInputSmiles when
/// the input does not parse.
GenerationResult generate_filtered_candidates(std::string_view input_smiles,
                                              const FilterSpec &spec,
                                              const ModelStack &models,
                                              const CounterRng &rng,
                                              const GenerationConfig &config);

}  // namespace cardiogen::pipeline

#endif  // CARDIOGEN_PIPELINE_GENERATION_H_
