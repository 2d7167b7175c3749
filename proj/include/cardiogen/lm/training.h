//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CARDIOGEN_LM_TRAINING_H_
#define CARDIOGEN_LM_TRAINING_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cardiogen/lm/transformer.h"

namespace cardiogen::lm {

/// A model with everything needed to encode inputs for it.
struct LanguageModel {
  Transformer model;
  smiles::Vocabulary vocab;
  PropertyStats stats;  // empty for masked models
};

/// Canonical, encoded training set.
struct LmCorpus {
  std::vector<std::string> smiles;  // canonical
  std::vector<smiles::TokenSequence> sequences;
  std::vector<Conditioning> conditioning;  // empty for masked models
  std::vector<chem::PropertyVector> properties;
  /// Input lines dropped because they failed to parse, held unknown tokens,
  /// or were too long.
  std::vector<std::size_t> skipped;
};

/// Canonicalizes and encodes each SMILES. When `stats` is empty and
/// `conditioned` is set, the statistics are fitted on the kept molecules and
/// written back.
/// Vocabulary over canonical spellings, plus canonical scaffolds when the
/// model is conditioned. Flagged and untokenizable indices refer to `smiles`;
/// inputs that fail to parse are reported as untokenizable.
smiles::VocabularyBuild build_lm_vocabulary(std::span<const std::string> smiles,
                                            std::int64_t min_count,
                                            bool conditioned);

LmCorpus prepare_corpus(std::span<const std::string> smiles,
                        const smiles::Vocabulary &vocab, bool conditioned,
                        PropertyStats &stats);

struct MlmCorruptionConfig {
  double select_rate = 0.15;
  double mask_fraction = 0.8;
  double random_fraction = 0.1;
};

struct MlmSample {
  smiles::TokenSequence corrupted;
  std::vector<int> targets;  // original id at selected positions, -1 elsewhere
};

/// Selects content positions independently; selected tokens become <MASK>,
/// a uniformly drawn non-special token, or stay unchanged.
MlmSample mlm_corrupt(const smiles::TokenSequence &seq, int vocab_size,
                      CounterRng &rng, const MlmCorruptionConfig &config = {});

/// Next-token targets for every row of the batch; -1 past [EOS].
std::vector<int> next_token_targets(const Batch &batch);

RealTensor ar_loss(const Transformer &model, const Batch &batch, bool training,
                   CounterRng &rng);
/// targets has batch.size * batch.len entries.
RealTensor mlm_loss(const Transformer &model, const Batch &batch,
                    std::span<const int> targets, bool training,
                    CounterRng &rng);

struct LmTrainConfig {
  int epochs = 100;
  int batch_size = 512;
  std::string optimizer = "sophia";  // or "adamw"
  double lr = 3e-4;
  double weight_decay = 0.1;
  int hessian_interval = 10;
  double grad_clip = 0;  // 0 disables
  /// "constant" or "cosine" (decays to zero over all steps).
  std::string lr_schedule = "constant";
  MlmCorruptionConfig corruption;
  std::uint64_t seed = 0;
  /// Stop once training next-token accuracy reaches this value (ignored
  /// when unset).
  std::optional<double> target_accuracy;
  int eval_every = 1;
};

struct LmEpoch {
  int epoch = 0;
  double loss = 0;
  std::optional<double> accuracy;  // training-set next-token accuracy
};

using LmEpochCallback = std::function<void(const LmEpoch &)>;

/// Trains the transformer in place; returns one entry per epoch run.
std::vector<LmEpoch> train_language_model(Transformer &model,
                                          const LmCorpus &corpus,
                                          const LmTrainConfig &config,
                                          const LmEpochCallback &on_epoch = {});

/// Fraction of next-token targets whose argmax is correct, inference mode.
double next_token_accuracy(const Transformer &model, const LmCorpus &corpus,
                           int batch_size = 64);

struct SampleConfig {
  double temperature = 1.0;  // <= 0 means greedy
  int top_k = 0;             // 0 disables truncation
};

struct Sample {
  std::string text;       // decoded token string
  std::string canonical;  // set only when the text parses
  bool valid = false;
};

/// Draws one sequence per conditioning entry. Sample i uses the stream
/// rng.split(first_index + i), so results do not depend on how requests are
/// grouped.
std::vector<Sample> sample_sequences(const LanguageModel &lm,
                                     std::span<const Conditioning> conditioning,
                                     const CounterRng &rng,
                                     std::uint64_t first_index,
                                     const SampleConfig &config = {});

/// Position-0 vector after the final layer norm of a masked model, for the
/// canonical form of the molecule.
Eigen::VectorXf extract_feature_vector(const LanguageModel &mlm,
                                       const smiles::Molecule &mol);
Eigen::VectorXf extract_feature_vector(const LanguageModel &mlm,
                                       std::string_view smiles);

}  // namespace cardiogen::lm

#endif  // CARDIOGEN_LM_TRAINING_H_
