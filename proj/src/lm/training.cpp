//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#include "cardiogen/lm/training.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <numeric>

#include "cardiogen/chem/scaffold.h"
#include "cardiogen/core/error.h"
#include "cardiogen/core/fpenv.h"
#include "cardiogen/smiles/canonical.h"
#include "cardiogen/smiles/parser.h"
#include "cardiogen/tensor/optim.h"

namespace cardiogen::lm {

using smiles::TokenSequence;

smiles::VocabularyBuild build_lm_vocabulary(std::span<const std::string> input,
                                            std::int64_t min_count,
                                            bool conditioned) {
  std::vector<std::string> texts;
  std::vector<std::size_t> origin;
  std::vector<std::size_t> failed;
  for (std::size_t i = 0; i < input.size(); ++i) {
    try {
      const smiles::Molecule mol = smiles::parse(input[i]);
      texts.push_back(smiles::write_canonical(mol));
      origin.push_back(i);
      if (conditioned) {
        const smiles::Molecule scaffold = chem::murcko_scaffold(mol);
        if (!scaffold.empty()) {
          texts.push_back(smiles::write_canonical(scaffold));
          origin.push_back(i);
        }
      }
    } catch (const Error &) {
      failed.push_back(i);
    }
  }
  smiles::VocabularyBuild build = smiles::build_vocabulary(texts, min_count);
  auto remap = [&](std::vector<std::size_t> &idx) {
    for (std::size_t &k: idx)
      k = origin[k];
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  };
  remap(build.flagged);
  remap(build.untokenizable);
  build.untokenizable.insert(build.untokenizable.end(), failed.begin(),
                             failed.end());
  std::sort(build.untokenizable.begin(), build.untokenizable.end());
  return build;
}

LmCorpus prepare_corpus(std::span<const std::string> input,
                        const smiles::Vocabulary &vocab, bool conditioned,
                        PropertyStats &stats) {
  LmCorpus c;
  std::vector<std::vector<int>> scaffolds;
  for (std::size_t i = 0; i < input.size(); ++i) {
    try {
      const smiles::Molecule mol = smiles::parse(input[i]);
      std::string canonical = smiles::write_canonical(mol);
      TokenSequence seq = smiles::encode_smiles(canonical, vocab);
      if (conditioned) {
        scaffolds.push_back(scaffold_frame(
            smiles::write_canonical(chem::murcko_scaffold(mol)), vocab));
        c.properties.push_back(chem::physchem_properties(mol));
      }
      c.smiles.push_back(std::move(canonical));
      c.sequences.push_back(std::move(seq));
    } catch (const Error &) {
      c.skipped.push_back(i);
    }
  }
  if (c.sequences.empty())
    throw Error(ErrorCode::kEmptyAfterFiltering, "no usable molecules in corpus");
  if (conditioned) {
    if (stats.empty())
      stats = PropertyStats::fit(c.properties);
    for (std::size_t i = 0; i < c.sequences.size(); ++i)
      c.conditioning.push_back(
          { std::move(scaffolds[i]), stats.normalize(c.properties[i]) });
  }
  return c;
}

MlmSample mlm_corrupt(const TokenSequence &seq, int vocab_size,
                      CounterRng &rng, const MlmCorruptionConfig &config) {
  MlmSample s { seq, std::vector<int>(seq.ids.size(), -1) };
  const int n_content = vocab_size - smiles::kSpecialCount;
  for (int t = 1; t <= seq.content_len; ++t) {
    if (!rng.bernoulli(config.select_rate))
      continue;
    s.targets[t] = seq.ids[t];
    const double r = rng.uniform();
    if (r < config.mask_fraction)
      s.corrupted.ids[t] = smiles::kMaskId;
    else if (r < config.mask_fraction + config.random_fraction && n_content > 0)
      s.corrupted.ids[t] =
          smiles::kSpecialCount + static_cast<int>(rng.uniform_int(n_content));
  }
  return s;
}

std::vector<int> next_token_targets(const Batch &batch) {
  std::vector<int> targets(batch.ids.size(), -1);
  for (int b = 0; b < batch.size; ++b)
    for (int t = 0; t + 1 < batch.key_lengths[b]; ++t)
      targets[std::size_t(b) * batch.len + t] =
          batch.ids[std::size_t(b) * batch.len + t + 1];
  return targets;
}

RealTensor ar_loss(const Transformer &model, const Batch &batch, bool training,
                   CounterRng &rng) {
  const std::vector<int> targets = next_token_targets(batch);
  return tensor::cross_entropy<Real>(model.logits(batch, training, rng),
                                     targets);
}

RealTensor mlm_loss(const Transformer &model, const Batch &batch,
                    std::span<const int> targets, bool training,
                    CounterRng &rng) {
  if (targets.size() != batch.ids.size())
    throw Error(ErrorCode::kShapeMismatch, "mlm targets");
  return tensor::cross_entropy<Real>(model.logits(batch, training, rng),
                                     targets);
}

namespace {

struct PreparedBatch {
  Batch batch;
  std::vector<int> targets;
};

PreparedBatch prepare_batch(const Transformer &model, const LmCorpus &corpus,
                            std::span<const std::size_t> rows,
                            const MlmCorruptionConfig &corruption,
                            CounterRng &rng) {
  std::vector<TokenSequence> seqs;
  std::vector<Conditioning> conds;
  std::vector<std::vector<int>> masked_targets;
  for (std::size_t r: rows) {
    if (model.config().causal()) {
      seqs.push_back(corpus.sequences[r]);
      if (!corpus.conditioning.empty())
        conds.push_back(corpus.conditioning[r]);
    } else {
      MlmSample s = mlm_corrupt(corpus.sequences[r], model.config().vocab_size,
                                rng, corruption);
      seqs.push_back(std::move(s.corrupted));
      masked_targets.push_back(std::move(s.targets));
    }
  }
  PreparedBatch p { make_batch(seqs, conds), {} };
  if (model.config().causal()) {
    p.targets = next_token_targets(p.batch);
  } else {
    for (const auto &t: masked_targets)
      p.targets.insert(p.targets.end(), t.begin(), t.begin() + p.batch.len);
  }
  return p;
}

/// Gauss-Newton-Bartlett estimate: gradient of the loss against labels drawn
/// from the model's own predictive distribution, squared and scaled by the
/// batch size.
std::vector<RealMatrix> gnb_estimate(const Transformer &model,
                                     const PreparedBatch &p, CounterRng &rng) {
  const auto params = model.parameters();
  for (auto t: params)
    t.zero_grad();
  CounterRng unused;
  RealTensor logits = model.logits(p.batch, false, unused);
  std::vector<int> sampled(p.targets.size(), -1);
  for (std::size_t i = 0; i < sampled.size(); ++i) {
    if (p.targets[i] < 0)
      continue;
    auto row = logits.value().row(static_cast<Eigen::Index>(i));
    const double mx = row.maxCoeff();
    double z = 0;
    for (Eigen::Index j = 0; j < row.size(); ++j)
      z += std::exp(double(row(j)) - mx);
    double u = rng.uniform() * z;
    int pick = static_cast<int>(row.size()) - 1;
    for (Eigen::Index j = 0; j < row.size(); ++j) {
      u -= std::exp(double(row(j)) - mx);
      if (u < 0) {
        pick = static_cast<int>(j);
        break;
      }
    }
    sampled[i] = pick;
  }
  tensor::cross_entropy<Real>(logits, sampled).backward();
  std::vector<RealMatrix> est;
  const Real scale = static_cast<Real>(p.batch.size);
  for (auto &t: params) {
    if (t.has_grad())
      est.push_back(scale * t.grad().cwiseAbs2());
    else
      est.push_back(RealMatrix::Zero(t.rows(), t.cols()));
  }
  return est;
}

}  // namespace

std::vector<LmEpoch> train_language_model(Transformer &model,
                                          const LmCorpus &corpus,
                                          const LmTrainConfig &config,
                                          const LmEpochCallback &on_epoch) {
  if (corpus.sequences.empty())
    throw Error(ErrorCode::kEmptyDataset, "empty training corpus");
  if (config.batch_size < 1 || config.epochs < 0)
    throw Error(ErrorCode::kInvalidArgument, "bad batch size or epoch count");
  if (model.config().conditioned() && corpus.conditioning.empty())
    throw Error(ErrorCode::kInvalidArgument,
                "conditioned model needs a conditioned corpus");

  ScopedFlushToZero ftz;
  CounterRng rng(config.seed, 1);
  CounterRng hessian_rng(config.seed, 2);
  const auto params = model.parameters();
  std::unique_ptr<tensor::AdamW<Real>> adamw;
  std::unique_ptr<tensor::Sophia<Real>> sophia;
  if (config.optimizer == "adamw") {
    tensor::AdamWConfig c;
    c.lr = config.lr;
    c.weight_decay = config.weight_decay;
    adamw = std::make_unique<tensor::AdamW<Real>>(params, c);
  } else if (config.optimizer == "sophia") {
    tensor::SophiaConfig c;
    c.lr = config.lr;
    c.weight_decay = config.weight_decay;
    c.hessian_interval = config.hessian_interval;
    sophia = std::make_unique<tensor::Sophia<Real>>(params, c);
  } else {
    throw Error(ErrorCode::kInvalidArgument,
                "unknown optimizer: " + config.optimizer);
  }

  if (config.lr_schedule != "constant" && config.lr_schedule != "cosine")
    throw Error(ErrorCode::kInvalidArgument,
                "unknown lr schedule: " + config.lr_schedule);
  const long steps_per_epoch =
      (static_cast<long>(corpus.sequences.size()) + config.batch_size - 1)
      / config.batch_size;
  const double total_steps = double(steps_per_epoch) * config.epochs;
  long step = 0;
  auto set_lr = [&](double lr) {
    if (adamw)
      adamw->set_lr(lr);
    else
      sophia->set_lr(lr);
  };

  std::vector<std::size_t> order(corpus.sequences.size());
  std::iota(order.begin(), order.end(), std::size_t(0));
  std::vector<LmEpoch> history;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    double loss_sum = 0;
    int n_batches = 0;
    for (std::size_t start = 0; start < order.size();
         start += config.batch_size) {
      const std::size_t end =
          std::min(order.size(), start + std::size_t(config.batch_size));
      const std::span<const std::size_t> rows(order.data() + start,
                                              end - start);
      PreparedBatch p =
          prepare_batch(model, corpus, rows, config.corruption, rng);
      for (auto t: params)
        t.zero_grad();
      RealTensor loss = tensor::cross_entropy<Real>(
          model.logits(p.batch, true, rng), p.targets);
      const double value = loss.item();
      if (!std::isfinite(value))
        throw Error(ErrorCode::kNonFiniteLoss,
                    "non-finite loss at epoch " + std::to_string(epoch),
                    static_cast<std::size_t>(epoch));
      loss.backward();
      if (config.grad_clip > 0)
        tensor::clip_grad_norm(params, config.grad_clip);
      if (config.lr_schedule == "cosine")
        set_lr(config.lr * 0.5
               * (1 + std::cos(std::numbers::pi * double(step) / total_steps)));
      ++step;
      if (adamw) {
        adamw->step();
      } else {
        sophia->step([&] { return gnb_estimate(model, p, hessian_rng); });
      }
      loss_sum += value;
      ++n_batches;
    }
    LmEpoch e { epoch, loss_sum / std::max(n_batches, 1), std::nullopt };
    if (model.config().causal() && config.eval_every > 0
        && (epoch % config.eval_every == 0 || epoch == config.epochs))
      e.accuracy = next_token_accuracy(model, corpus);
    history.push_back(e);
    if (on_epoch)
      on_epoch(e);
    if (config.target_accuracy && e.accuracy
        && *e.accuracy >= *config.target_accuracy)
      break;
  }
  for (auto t: params)
    t.zero_grad();
  return history;
}

double next_token_accuracy(const Transformer &model, const LmCorpus &corpus,
                           int batch_size) {
  tensor::NoGradGuard guard;
  CounterRng unused;
  long correct = 0, total = 0;
  for (std::size_t start = 0; start < corpus.sequences.size();
       start += batch_size) {
    const std::size_t end =
        std::min(corpus.sequences.size(), start + std::size_t(batch_size));
    std::span<const TokenSequence> seqs(corpus.sequences.data() + start,
                                        end - start);
    std::span<const Conditioning> conds;
    if (!corpus.conditioning.empty())
      conds = { corpus.conditioning.data() + start, end - start };
    const Batch batch = make_batch(seqs, conds);
    const std::vector<int> targets = next_token_targets(batch);
    const RealMatrix logits = model.logits(batch, false, unused).value();
    for (std::size_t i = 0; i < targets.size(); ++i) {
      if (targets[i] < 0)
        continue;
      Eigen::Index arg;
      logits.row(static_cast<Eigen::Index>(i)).maxCoeff(&arg);
      correct += arg == targets[i] ? 1 : 0;
      ++total;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(correct) / total;
}

namespace {

int draw_token(const Eigen::Ref<const RealMatrix> &row,
               const SampleConfig &config, CounterRng &rng) {
  const int v = static_cast<int>(row.cols());
  // [CLS], <pad> and <MASK> never appear inside a sequence.
  auto allowed = [](int id) {
    return !smiles::Vocabulary::is_special(id) || id == smiles::kEosId;
  };
  if (config.temperature <= 0) {
    int best = -1;
    for (int j = 0; j < v; ++j)
      if (allowed(j) && (best < 0 || row(0, j) > row(0, best)))
        best = j;
    return best;
  }
  std::vector<int> ids;
  for (int j = 0; j < v; ++j)
    if (allowed(j))
      ids.push_back(j);
  if (config.top_k > 0 && config.top_k < static_cast<int>(ids.size())) {
    std::stable_sort(ids.begin(), ids.end(),
                     [&](int a, int b) { return row(0, a) > row(0, b); });
    ids.resize(config.top_k);
    std::sort(ids.begin(), ids.end());
  }
  double mx = -std::numeric_limits<double>::infinity();
  for (int j: ids)
    mx = std::max(mx, double(row(0, j)) / config.temperature);
  std::vector<double> w(ids.size());
  double z = 0;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    w[i] = std::exp(double(row(0, ids[i])) / config.temperature - mx);
    z += w[i];
  }
  double u = rng.uniform() * z;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    u -= w[i];
    if (u < 0)
      return ids[i];
  }
  return ids.back();
}

}  // namespace

std::vector<Sample> sample_sequences(const LanguageModel &lm,
                                     std::span<const Conditioning> conditioning,
                                     const CounterRng &rng,
                                     std::uint64_t first_index,
                                     const SampleConfig &config) {
  const Transformer &model = lm.model;
  if (!model.config().causal())
    throw Error(ErrorCode::kInvalidArgument,
                "sampling needs an autoregressive model");
  tensor::NoGradGuard guard;
  CounterRng unused;
  const int n = static_cast<int>(conditioning.size());
  const int block = model.config().block_size;
  std::vector<std::vector<int>> ids(n, std::vector<int>(1, smiles::kClsId));
  std::vector<CounterRng> streams;
  std::vector<bool> done(n, false);
  for (int i = 0; i < n; ++i)
    streams.push_back(rng.split(first_index + i));

  for (int len = 1; len < block; ++len) {
    std::vector<int> active;
    for (int i = 0; i < n; ++i)
      if (!done[i])
        active.push_back(i);
    if (active.empty())
      break;
    Batch batch;
    batch.size = static_cast<int>(active.size());
    batch.len = len;
    batch.properties.resize(batch.size, model.config().n_properties);
    for (int r = 0; r < batch.size; ++r) {
      const int i = active[r];
      const Conditioning &c = conditioning[i];
      batch.ids.insert(batch.ids.end(), ids[i].begin(), ids[i].end());
      batch.scaffold.insert(batch.scaffold.end(), c.scaffold_ids.begin(),
                            c.scaffold_ids.begin() + len);
      batch.properties.row(r) = c.properties.cast<Real>().transpose();
      batch.key_lengths.push_back(len);
    }
    const RealMatrix logits = model.logits(batch, false, unused).value();
    for (int r = 0; r < batch.size; ++r) {
      const int i = active[r];
      const int next =
          draw_token(logits.row(Eigen::Index(r) * len + len - 1), config,
                     streams[i]);
      if (next == smiles::kEosId || len + 1 == block)
        done[i] = true;
      if (next != smiles::kEosId)
        ids[i].push_back(next);
    }
  }

  std::vector<Sample> out(n);
  for (int i = 0; i < n; ++i) {
    for (std::size_t t = 1; t < ids[i].size(); ++t)
      out[i].text += lm.vocab.token(ids[i][t]);
    if (out[i].text.empty())
      continue;
    try {
      out[i].canonical = smiles::canonicalize(out[i].text);
      out[i].valid = true;
    } catch (const Error &) {
    }
  }
  return out;
}

Eigen::VectorXf extract_feature_vector(const LanguageModel &mlm,
                                       const smiles::Molecule &mol) {
  if (mlm.model.config().causal())
    throw Error(ErrorCode::kInvalidArgument,
                "feature extraction needs a masked model");
  const TokenSequence seq =
      smiles::encode_smiles(smiles::write_canonical(mol), mlm.vocab,
                            mlm.model.config().block_size);
  tensor::NoGradGuard guard;
  CounterRng unused;
  const Batch batch = make_batch(std::span(&seq, 1), {});
  const RealMatrix h = mlm.model.hidden(batch, false, unused).value();
  return h.row(0).transpose();
}

Eigen::VectorXf extract_feature_vector(const LanguageModel &mlm,
                                       std::string_view text) {
  return extract_feature_vector(mlm, smiles::parse(text));
}

}  // namespace cardiogen::lm
