//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CARDIOGEN_IO_MODELS_H_
#define CARDIOGEN_IO_MODELS_H_

#include <string>

#include "cardiogen/disc/model.h"
#include "cardiogen/io/checkpoint.h"
#include "cardiogen/lm/training.h"

namespace cardiogen::io {

inline constexpr std::string_view kLanguageModelModule = "language_model";
inline constexpr std::string_view kDiscriminatorModule = "discriminator";

inline constexpr std::string_view kPreparedCorpusModule = "prepared_corpus";

nlohmann::json vocabulary_json(const smiles::Vocabulary &vocab);
/// Throws CorruptCheckpoint when the special tokens are missing or moved.
smiles::Vocabulary vocabulary_from(const nlohmann::json &j);
/// null for empty statistics.
nlohmann::json stats_json(const lm::PropertyStats &stats);
lm::PropertyStats stats_from(const nlohmann::json &j);

nlohmann::json to_json(const lm::TransformerConfig &config);
lm::TransformerConfig transformer_config_from(const nlohmann::json &j);
nlohmann::json to_json(const disc::FusionConfig &config);
disc::FusionConfig fusion_config_from(const nlohmann::json &j);

/// Digest of a language model's vocabulary and parameter bytes. Stored with
/// discriminators to pin the feature model they were trained on.
std::string model_fingerprint(const lm::LanguageModel &lm);

/// Metadata holds the module kind, configuration, vocabulary and property
/// statistics; `extra` is merged in (run configuration, history, seeds).
Checkpoint to_checkpoint(const lm::LanguageModel &lm,
                         const nlohmann::json &extra = nlohmann::json::object());
/// Throws InvalidArgument for other module kinds and CorruptCheckpoint when
/// a parameter is missing, extra or misshapen.
lm::LanguageModel language_model_from(const Checkpoint &ckpt);

/// Parameters and batch-norm statistics. `feature_model` is the fingerprint
/// of the masked model that supplies features.
Checkpoint to_checkpoint(const disc::FusionModel &model,
                         const std::string &feature_model,
                         const nlohmann::json &extra = nlohmann::json::object());
disc::FusionModel fusion_model_from(const Checkpoint &ckpt);

/// Throws VocabMismatch when `ckpt` was trained on another feature model.
void check_feature_model(const Checkpoint &ckpt, const lm::LanguageModel &mlm);

/// An encoded training corpus with the vocabulary and statistics it was
/// built with. `key` digests the inputs that produced it.
struct PreparedCorpus {
  lm::LmCorpus corpus;
  smiles::Vocabulary vocab;
  lm::PropertyStats stats;
  bool conditioned = false;
  std::string key;
};

/// Token ids and scaffold frames go into the tensor table; SMILES and raw
/// properties go into the metadata so doubles round-trip exactly.
/// Conditioning vectors are rebuilt from properties and statistics on load.
Checkpoint to_checkpoint(const PreparedCorpus &prepared);
PreparedCorpus prepared_corpus_from(const Checkpoint &ckpt);

}  // namespace cardiogen::io

#endif  // CARDIOGEN_IO_MODELS_H_
