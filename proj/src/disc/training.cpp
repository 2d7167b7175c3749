//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#include "cardiogen/disc/training.h"

#include <cmath>
#include <numeric>

#include "cardiogen/chem/fingerprint.h"
#include "cardiogen/core/error.h"
#include "cardiogen/core/fpenv.h"
#include "cardiogen/disc/metrics.h"
#include "cardiogen/smiles/canonical.h"
#include "cardiogen/smiles/parser.h"
#include "cardiogen/tensor/ops.h"
#include "cardiogen/tensor/optim.h"

namespace cardiogen::disc {

namespace ops = cardiogen::tensor;

namespace {

std::vector<const Example *> pointers(std::span<const Example> examples,
                                      std::span<const std::size_t> index) {
  std::vector<const Example *> out;
  out.reserve(index.size());
  for (std::size_t i: index)
    out.push_back(&examples[i]);
  return out;
}

// Shuffled index ranges of at most batch_size; a trailing single example is
// folded into the previous batch since batch norm needs two rows.
std::vector<std::vector<std::size_t>> make_batches(std::size_t n,
                                                   int batch_size,
                                                   CounterRng &rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(std::span(order));
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t start = 0; start < n; start += batch_size) {
    const std::size_t end = std::min(n, start + std::size_t(batch_size));
    out.emplace_back(order.begin() + start, order.begin() + end);
  }
  if (out.size() > 1 && out.back().size() == 1) {
    out[out.size() - 2].push_back(out.back()[0]);
    out.pop_back();
  }
  return out;
}

struct Snapshot {
  std::vector<RealMatrix> params;
  std::vector<RealMatrix> buffers;
};

Snapshot take_snapshot(FusionModel &model) {
  Snapshot s;
  for (const RealTensor &p: model.parameters())
    s.params.push_back(p.value());
  for (auto &[name, buf]: model.named_buffers())
    s.buffers.push_back(*buf);
  return s;
}

void restore(FusionModel &model, const Snapshot &s) {
  std::vector<RealTensor> params = model.parameters();
  for (std::size_t i = 0; i < params.size(); ++i)
    params[i].value() = s.params[i];
  auto buffers = model.named_buffers();
  for (std::size_t i = 0; i < buffers.size(); ++i)
    *buffers[i].second = s.buffers[i];
}

std::vector<double> targets_of(std::span<const Example> examples) {
  std::vector<double> t;
  t.reserve(examples.size());
  for (const Example &e: examples)
    t.push_back(e.target);
  return t;
}

}  // namespace

Example make_example(const smiles::Molecule &mol, const lm::LanguageModel &mlm,
                     double target) {
  Example e;
  e.smiles = smiles::write_canonical(mol);
  e.graph = featurize_graph(mol);
  e.fingerprint = chem::morgan_fingerprint(mol);
  e.features = lm::extract_feature_vector(mlm, mol);
  e.target = target;
  return e;
}

Example make_example(std::string_view text, const lm::LanguageModel &mlm,
                     double target) {
  return make_example(smiles::parse(text), mlm, target);
}

std::vector<double> predict_examples(const FusionModel &model,
                                     std::span<const Example> examples,
                                     int batch_size) {
  std::vector<double> out;
  out.reserve(examples.size());
  for (std::size_t start = 0; start < examples.size(); start += batch_size) {
    const std::size_t end =
        std::min(examples.size(), start + std::size_t(batch_size));
    std::vector<const Example *> ptrs;
    for (std::size_t i = start; i < end; ++i)
      ptrs.push_back(&examples[i]);
    const std::vector<double> p = model.predict(make_example_batch(ptrs));
    out.insert(out.end(), p.begin(), p.end());
  }
  return out;
}

std::optional<double> evaluate_examples(const FusionModel &model,
                                        std::span<const Example> examples,
                                        double decision_threshold) {
  if (examples.empty())
    return std::nullopt;
  const std::vector<double> pred = predict_examples(model, examples);
  const std::vector<double> truth = targets_of(examples);
  if (model.config().task == Task::kRegression)
    return pearson(pred, truth);
  std::vector<int> labels;
  for (double t: truth)
    labels.push_back(t >= 0.5 ? 1 : 0);
  return evaluate_metrics(confusion_counts(pred, labels, decision_threshold))
      .accuracy;
}

DiscTrainResult train_discriminator(const FusionConfig &config,
                                    std::span<const Example> train,
                                    std::span<const Example> validation,
                                    const DiscTrainConfig &tc,
                                    const DiscEpochCallback &on_epoch) {
  if (train.size() < 2)
    throw Error(ErrorCode::kEmptyDataset,
                "training needs at least two molecules");
  if (tc.batch_size < 2)
    throw Error(ErrorCode::kInvalidArgument, "batch size must be at least 2");
  ScopedFlushToZero ftz;
  CounterRng init(tc.seed, 0);
  CounterRng rng(tc.seed, 1);
  DiscTrainResult result { FusionModel(config, init), {}, 0, 0 };
  FusionModel &model = result.model;
  const std::vector<RealTensor> params = model.parameters();
  ops::AdamW<Real> optimizer(params, { .lr = tc.lr,
                                       .beta1 = 0.9,
                                       .beta2 = 0.999,
                                       .eps = 1e-8,
                                       .weight_decay = tc.weight_decay });
  ops::PlateauScheduler scheduler(tc.patience, tc.lr_factor);
  const bool classify = config.task == Task::kClassification;

  std::optional<Snapshot> best;
  double lr = tc.lr;
  for (int epoch = 1; epoch <= tc.epochs; ++epoch) {
    double loss_sum = 0;
    std::size_t seen = 0;
    for (const auto &idx: make_batches(train.size(), tc.batch_size, rng)) {
      const std::vector<const Example *> ptrs = pointers(train, idx);
      const ExampleBatch batch = make_example_batch(ptrs);
      RealMatrix target(batch.size(), 1);
      for (int i = 0; i < batch.size(); ++i)
        target(i, 0) = static_cast<Real>(ptrs[i]->target);
      optimizer.zero_grad();
      const RealTensor out = model.forward(batch, true, rng);
      RealTensor loss = classify ? ops::bce_with_logits(out, target)
                                 : ops::mse(out, target);
      const double data_loss = loss.item();
      if (!std::isfinite(data_loss))
        throw Error(ErrorCode::kNonFiniteLoss,
                    "loss is not finite at epoch " + std::to_string(epoch),
                    static_cast<std::size_t>(epoch));
      if (tc.l1 > 0)
        loss = loss + ops::scale(ops::l1_penalty(params), Real(tc.l1));
      loss.backward();
      if (tc.grad_clip > 0)
        ops::clip_grad_norm(params, tc.grad_clip);
      optimizer.step();
      loss_sum += data_loss * double(idx.size());
      seen += idx.size();
    }
    const double train_loss = loss_sum / double(seen);
    lr = scheduler.step(train_loss, lr);
    optimizer.set_lr(lr);

    // Without validation data the last epoch is kept.
    DiscEpoch e { epoch, train_loss,
                  evaluate_examples(model, validation, tc.decision_threshold),
                  lr };
    if (e.validation_metric
        && (!best || *e.validation_metric > result.best_metric)) {
      best = take_snapshot(model);
      result.best_epoch = epoch;
      result.best_metric = *e.validation_metric;
    }
    result.history.push_back(e);
    if (on_epoch)
      on_epoch(e);
  }
  if (best)
    restore(model, *best);
  else
    result.best_epoch = tc.epochs;
  return result;
}

std::vector<double> permuted_targets(std::span<const double> targets,
                                     std::uint64_t seed, int trial) {
  std::vector<double> out(targets.begin(), targets.end());
  CounterRng rng = CounterRng(seed, 7).split(static_cast<std::uint64_t>(trial));
  rng.shuffle(std::span(out));
  return out;
}

YRandomizationResult y_randomization_test(const FusionConfig &config,
                                          std::span<const Example> train,
                                          std::span<const Example> validation,
                                          std::span<const Example> test,
                                          const DiscTrainConfig &tc,
                                          int n_trials) {
  if (n_trials < 1)
    throw Error(ErrorCode::kInvalidArgument, "n_trials must be at least 1");
  YRandomizationResult r;
  r.true_metric = evaluate_examples(
      train_discriminator(config, train, validation, tc).model, test,
      tc.decision_threshold);

  std::vector<double> targets = targets_of(train);
  for (auto part: { validation, test }) {
    const std::vector<double> t = targets_of(part);
    targets.insert(targets.end(), t.begin(), t.end());
  }
  for (int trial = 0; trial < n_trials; ++trial) {
    const std::vector<double> permuted =
        permuted_targets(targets, tc.seed, trial);
    std::size_t next = 0;
    auto relabel = [&](std::span<const Example> part) {
      std::vector<Example> out(part.begin(), part.end());
      for (Example &e: out)
        e.target = permuted[next++];
      return out;
    };
    const std::vector<Example> t = relabel(train);
    const std::vector<Example> v = relabel(validation);
    const std::vector<Example> s = relabel(test);
    DiscTrainConfig trial_config = tc;
    trial_config.seed = tc.seed + 1 + static_cast<std::uint64_t>(trial);
    const auto metric =
        evaluate_examples(train_discriminator(config, t, v, trial_config).model,
                          s, tc.decision_threshold);
    if (metric)
      r.shuffled_metrics.push_back(*metric);
  }
  if (!r.shuffled_metrics.empty()) {
    const double n = double(r.shuffled_metrics.size());
    r.mean = std::accumulate(r.shuffled_metrics.begin(),
                             r.shuffled_metrics.end(), 0.0)
             / n;
    double ss = 0;
    for (double m: r.shuffled_metrics)
      ss += (m - r.mean) * (m - r.mean);
    r.stddev = std::sqrt(ss / n);
  }
  return r;
}

}  // namespace cardiogen::disc
