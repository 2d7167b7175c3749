//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CARDIOGEN_DISC_TRAINING_H_
#define CARDIOGEN_DISC_TRAINING_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cardiogen/disc/model.h"
#include "cardiogen/lm/training.h"

namespace cardiogen::disc {

/// pIC50 at or above this value marks a blocker.
inline constexpr double kBlockerThreshold = 5.0;

inline int blocker_label(double pic50, double threshold = kBlockerThreshold) {
  return pic50 >= threshold ? 1 : 0;
}

/// Featurizes one molecule. `mlm` supplies the transformer feature vector.
Example make_example(const smiles::Molecule &mol, const lm::LanguageModel &mlm,
                     double target = 0);
Example make_example(std::string_view smiles, const lm::LanguageModel &mlm,
                     double target = 0);

struct DiscTrainConfig {
  int epochs = 200;
  int batch_size = 32;
  double lr = 3e-4;
  double weight_decay = 1e-4;
  double l1 = 1e-4;
  double grad_clip = 5.0;
  int patience = 10;
  double lr_factor = 0.5;
  /// Probability cut for classification accuracy.
  double decision_threshold = 0.5;
  std::uint64_t seed = 0;
};

struct DiscEpoch {
  int epoch = 0;
  double train_loss = 0;
  /// Accuracy (classification) or Pearson r (regression); empty when
  /// undefined.
  std::optional<double> validation_metric;
  double lr = 0;
};

using DiscEpochCallback = std::function<void(const DiscEpoch &)>;

struct DiscTrainResult {
  FusionModel model;  // parameters from the best validation epoch
  std::vector<DiscEpoch> history;
  int best_epoch = 0;
  double best_metric = 0;
};

DiscTrainResult train_discriminator(const FusionConfig &config,
                                    std::span<const Example> train,
                                    std::span<const Example> validation,
                                    const DiscTrainConfig &train_config,
                                    const DiscEpochCallback &on_epoch = {});

std::vector<double> predict_examples(const FusionModel &model,
                                     std::span<const Example> examples,
                                     int batch_size = 256);

/// Accuracy or Pearson r of `model` on `examples`, by task.
std::optional<double> evaluate_examples(const FusionModel &model,
                                        std::span<const Example> examples,
                                        double decision_threshold = 0.5);

struct YRandomizationResult {
  std::optional<double> true_metric;
  std::vector<double> shuffled_metrics;  // undefined trials omitted
  double mean = 0;
  double stddev = 0;
};

/// Target permutation used by trial `trial` of the randomization test.
std::vector<double> permuted_targets(std::span<const double> targets,
                                     std::uint64_t seed, int trial);

/// Permutes the targets over train, validation and test together (one
/// permutation per trial), retrains, and scores each model on the permuted
/// test targets. The unshuffled model is trained once for reference.
YRandomizationResult y_randomization_test(const FusionConfig &config,
                                          std::span<const Example> train,
                                          std::span<const Example> validation,
                                          std::span<const Example> test,
                                          const DiscTrainConfig &train_config,
                                          int n_trials);

}  // namespace cardiogen::disc

#endif  // CARDIOGEN_DISC_TRAINING_H_
