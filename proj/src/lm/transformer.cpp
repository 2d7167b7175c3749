//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#include "cardiogen/lm/transformer.h"

#include <algorithm>
#include <cmath>

#include "cardiogen/chem/scaffold.h"
#include "cardiogen/core/error.h"
#include "cardiogen/smiles/canonical.h"
#include "cardiogen/smiles/tokenizer.h"

namespace cardiogen::lm {

using tensor::Linear;
using tensor::LayerNorm;

namespace {

constexpr double kEmbeddingStd = 0.02;

}  // namespace

std::string_view model_kind_name(ModelKind kind) {
  return kind == ModelKind::kAutoregressive ? "autoregressive" : "masked";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "autoregressive")
    return ModelKind::kAutoregressive;
  if (name == "masked")
    return ModelKind::kMasked;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown model kind: " + std::string(name));
}

void TransformerConfig::validate() const {
  auto fail = [](const std::string &msg) {
    throw Error(ErrorCode::kInvalidArgument, "transformer config: " + msg);
  };
  if (n_blocks < 1 || n_heads < 1 || d_model < 1)
    fail("sizes must be positive");
  if (d_model % n_heads != 0)
    fail("d_model must be divisible by n_heads");
  if (!(dropout >= 0 && dropout < 1))
    fail("dropout must be in [0, 1)");
  if (block_size < 3)
    fail("block_size too small");
  if (vocab_size <= smiles::kSpecialCount)
    fail("vocabulary has no content tokens");
  if (ffn_multiplier < 1 || n_properties < 0)
    fail("bad ffn multiplier or property count");
}

Eigen::Index expected_parameter_count(const TransformerConfig &c) {
  const Eigen::Index d = c.d_model, v = c.vocab_size, f = c.ffn_multiplier * d;
  Eigen::Index n = v * d + Eigen::Index(c.block_size) * d;
  if (c.conditioned())
    n += v * d + Eigen::Index(c.n_properties) * d;
  const Eigen::Index per_block = 2 * d            // ln1
                                 + d * 3 * d + 3 * d  // qkv
                                 + d * d + d          // proj
                                 + 2 * d              // ln2
                                 + d * f + f          // fc1
                                 + f * d + d;         // fc2
  n += c.n_blocks * per_block;
  n += 2 * d + d * v + v;
  return n;
}

PropertyStats PropertyStats::fit(std::span<const chem::PropertyVector> rows) {
  PropertyStats s;
  s.mean = Eigen::VectorXd::Zero(chem::kPropertyCount);
  s.stddev = Eigen::VectorXd::Zero(chem::kPropertyCount);
  if (rows.empty())
    return s;
  for (const auto &r: rows) {
    const auto v = r.values();
    for (int i = 0; i < chem::kPropertyCount; ++i)
      s.mean(i) += v[i];
  }
  s.mean /= static_cast<double>(rows.size());
  for (const auto &r: rows) {
    const auto v = r.values();
    for (int i = 0; i < chem::kPropertyCount; ++i)
      s.stddev(i) += (v[i] - s.mean(i)) * (v[i] - s.mean(i));
  }
  s.stddev = (s.stddev / static_cast<double>(rows.size())).cwiseSqrt();
  return s;
}

Eigen::VectorXd PropertyStats::normalize(const chem::PropertyVector &p) const {
  const auto v = p.values();
  Eigen::VectorXd z(chem::kPropertyCount);
  for (int i = 0; i < chem::kPropertyCount; ++i)
    z(i) = stddev(i) > 0 ? (v[i] - mean(i)) / stddev(i) : 0.0;
  return z;
}

Conditioning Conditioning::none(int block_size, int n_properties) {
  return { std::vector<int>(block_size, smiles::kPadId),
           Eigen::VectorXd::Zero(n_properties) };
}

std::vector<int> scaffold_frame(std::string_view scaffold_smiles,
                                const smiles::Vocabulary &vocab,
                                int block_size) {
  if (scaffold_smiles.empty())
    return std::vector<int>(block_size, smiles::kPadId);
  try {
    return smiles::encode_smiles(scaffold_smiles, vocab, block_size).ids;
  } catch (const Error &e) {
    throw Error(ErrorCode::kVocabMismatch,
                "scaffold " + std::string(scaffold_smiles) + ": " + e.what());
  }
}

Conditioning make_conditioning(const smiles::Molecule &mol,
                               const smiles::Vocabulary &vocab,
                               const PropertyStats &stats) {
  const std::string scaffold =
      smiles::write_canonical(chem::murcko_scaffold(mol));
  return { scaffold_frame(scaffold, vocab),
           stats.normalize(chem::physchem_properties(mol)) };
}

Batch make_batch(std::span<const smiles::TokenSequence> sequences,
                 std::span<const Conditioning> conditioning, int len) {
  Batch b;
  b.size = static_cast<int>(sequences.size());
  if (b.size == 0)
    throw Error(ErrorCode::kEmptyDataset, "empty batch");
  const int frame = static_cast<int>(sequences.front().ids.size());
  if (len <= 0) {
    for (const auto &s: sequences)
      len = std::max(len, s.content_len + 2);
  }
  if (len > frame)
    throw Error(ErrorCode::kShapeMismatch, "batch length exceeds frame");
  b.len = len;
  const bool conditioned = !conditioning.empty();
  if (conditioned && conditioning.size() != sequences.size())
    throw Error(ErrorCode::kShapeMismatch, "conditioning count mismatch");
  b.ids.reserve(std::size_t(b.size) * len);
  for (const auto &s: sequences) {
    if (static_cast<int>(s.ids.size()) != frame)
      throw Error(ErrorCode::kShapeMismatch, "ragged sequence frames");
    b.ids.insert(b.ids.end(), s.ids.begin(), s.ids.begin() + len);
    b.key_lengths.push_back(std::min(len, s.content_len + 2));
  }
  if (conditioned) {
    const auto n_props = conditioning.front().properties.size();
    b.properties.resize(b.size, n_props);
    for (int i = 0; i < b.size; ++i) {
      const auto &c = conditioning[i];
      if (static_cast<int>(c.scaffold_ids.size()) < len
          || c.properties.size() != n_props)
        throw Error(ErrorCode::kShapeMismatch, "conditioning shape");
      b.scaffold.insert(b.scaffold.end(), c.scaffold_ids.begin(),
                        c.scaffold_ids.begin() + len);
      b.properties.row(i) = c.properties.cast<Real>().transpose();
    }
  }
  return b;
}

Transformer::Transformer(const TransformerConfig &config, CounterRng &rng)
    : config_(config) {
  config_.validate();
  const int d = config_.d_model, v = config_.vocab_size;
  auto table = [&](int rows) {
    return RealTensor::parameter(
        tensor::normal_matrix<Real>(rows, d, kEmbeddingStd, rng));
  };
  token_embedding_ = table(v);
  position_embedding_ = table(config_.block_size);
  if (config_.conditioned()) {
    RealMatrix scaffold = tensor::normal_matrix<Real>(v, d, kEmbeddingStd, rng);
    scaffold.row(smiles::kPadId).setZero();
    scaffold_embedding_ = RealTensor::parameter(std::move(scaffold));
    property_projection_ =
        Linear<Real>(std::max(config_.n_properties, 1), d, rng, false);
  }
  const int f = config_.ffn_multiplier * d;
  for (int i = 0; i < config_.n_blocks; ++i) {
    Block blk;
    blk.ln1 = LayerNorm<Real>(d);
    blk.qkv = Linear<Real>(d, 3 * d, rng);
    blk.proj = Linear<Real>(d, d, rng);
    blk.ln2 = LayerNorm<Real>(d);
    blk.fc1 = Linear<Real>(d, f, rng);
    blk.fc2 = Linear<Real>(f, d, rng);
    blocks_.push_back(std::move(blk));
  }
  final_norm_ = LayerNorm<Real>(d);
  head_ = Linear<Real>(d, v, rng);
}

RealTensor Transformer::embed(const Batch &batch, bool training,
                              CounterRng &rng) const {
  if (batch.len > config_.block_size)
    throw Error(ErrorCode::kShapeMismatch, "sequence longer than block size");
  for (int id: batch.ids)
    if (id < 0 || id >= config_.vocab_size)
      throw Error(ErrorCode::kVocabMismatch,
                  "token id " + std::to_string(id) + " outside vocabulary");
  std::vector<int> positions(batch.ids.size());
  for (std::size_t i = 0; i < positions.size(); ++i)
    positions[i] = static_cast<int>(i % batch.len);
  RealTensor x = tensor::embedding<Real>(token_embedding_, batch.ids);
  x = x + tensor::embedding<Real>(position_embedding_, positions);
  if (config_.conditioned() && !batch.scaffold.empty()) {
    for (int id: batch.scaffold)
      if (id < 0 || id >= config_.vocab_size)
        throw Error(ErrorCode::kVocabMismatch, "scaffold id outside vocabulary");
    if (batch.properties.cols() != config_.n_properties)
      throw Error(ErrorCode::kShapeMismatch, "property vector width");
    x = x
        + tensor::embedding<Real>(scaffold_embedding_, batch.scaffold,
                                  smiles::kPadId);
    x = x
        + tensor::repeat_rows(property_projection_(RealTensor(batch.properties)),
                              batch.len);
  }
  return tensor::dropout(x, config_.dropout, training, rng);
}

std::span<const int> Transformer::attention_lengths(const Batch &batch) const {
  // Causal masking already hides everything a pad could leak into a
  // real position, so only the bidirectional model masks pad keys.
  if (config_.causal())
    return {};
  return batch.key_lengths;
}

RealTensor Transformer::block_forward(int index, const RealTensor &x,
                                      const Batch &batch, bool training,
                                      CounterRng &rng) const {
  const Block &blk = blocks_.at(index);
  if (x.cols() != config_.d_model
      || x.rows() != Eigen::Index(batch.size) * batch.len)
    throw Error(ErrorCode::kShapeMismatch, "block input shape");
  RealTensor a = tensor::self_attention<Real>(
      blk.qkv(blk.ln1(x)), batch.size, batch.len, config_.n_heads,
      config_.causal(), attention_lengths(batch));
  RealTensor h = x + tensor::dropout(blk.proj(a), config_.dropout, training, rng);
  RealTensor f = blk.fc2(tensor::gelu(blk.fc1(blk.ln2(h))));
  return h + tensor::dropout(f, config_.dropout, training, rng);
}

RealTensor Transformer::hidden(const Batch &batch, bool training,
                               CounterRng &rng) const {
  RealTensor x = embed(batch, training, rng);
  for (int i = 0; i < config_.n_blocks; ++i)
    x = block_forward(i, x, batch, training, rng);
  return final_norm_(x);
}

RealTensor Transformer::logits(const Batch &batch, bool training,
                               CounterRng &rng) const {
  return head_(hidden(batch, training, rng));
}

RealTensor Transformer::block_input(int index, const Batch &batch) const {
  tensor::NoGradGuard guard;
  CounterRng unused;
  RealTensor x = embed(batch, false, unused);
  for (int i = 0; i < index; ++i)
    x = block_forward(i, x, batch, false, unused);
  return x;
}

std::vector<RealMatrix> Transformer::attention_maps(int index,
                                                    const Batch &batch) const {
  tensor::NoGradGuard guard;
  const Block &blk = blocks_.at(index);
  RealTensor qkv = blk.qkv(blk.ln1(block_input(index, batch)));
  return tensor::attention_weights<Real>(qkv, batch.size, batch.len,
                                         config_.n_heads, config_.causal(),
                                         attention_lengths(batch));
}

tensor::NamedTensors<Real> Transformer::named_parameters() const {
  tensor::NamedTensors<Real> out;
  out.emplace_back("token_embedding", token_embedding_);
  out.emplace_back("position_embedding", position_embedding_);
  if (config_.conditioned()) {
    out.emplace_back("scaffold_embedding", scaffold_embedding_);
    property_projection_.collect("property_projection", out);
  }
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const std::string p = "blocks." + std::to_string(i);
    blocks_[i].ln1.collect(p + ".ln1", out);
    blocks_[i].qkv.collect(p + ".qkv", out);
    blocks_[i].proj.collect(p + ".proj", out);
    blocks_[i].ln2.collect(p + ".ln2", out);
    blocks_[i].fc1.collect(p + ".fc1", out);
    blocks_[i].fc2.collect(p + ".fc2", out);
  }
  final_norm_.collect("final_norm", out);
  head_.collect("head", out);
  return out;
}

std::vector<RealTensor> Transformer::parameters() const {
  return tensor::tensors_of(named_parameters());
}

Eigen::Index Transformer::parameter_count() const {
  return tensor::parameter_count(named_parameters());
}

}  // namespace cardiogen::lm
