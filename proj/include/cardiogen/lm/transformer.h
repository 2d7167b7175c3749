//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CARDIOGEN_LM_TRANSFORMER_H_
#define CARDIOGEN_LM_TRANSFORMER_H_

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "cardiogen/chem/properties.h"
#include "cardiogen/core/random.h"
#include "cardiogen/smiles/molecule.h"
#include "cardiogen/smiles/vocabulary.h"
#include "cardiogen/tensor/nn.h"

namespace cardiogen::lm {

using Real = float;
using RealTensor = tensor::Tensor<Real>;
using RealMatrix = tensor::Matrix<Real>;

enum class ModelKind {
  kAutoregressive,  // causal, scaffold and property conditioned
  kMasked,          // bidirectional, unconditioned
};

std::string_view model_kind_name(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);

struct TransformerConfig {
  ModelKind kind = ModelKind::kAutoregressive;
  int n_blocks = 8;
  int n_heads = 8;
  int d_model = 256;
  int block_size = smiles::kBlockSize;
  double dropout = 0.1;
  int vocab_size = 0;
  int n_properties = chem::kPropertyCount;
  int ffn_multiplier = 4;

  bool conditioned() const noexcept { return kind == ModelKind::kAutoregressive; }
  bool causal() const noexcept { return kind == ModelKind::kAutoregressive; }

  /// Throws InvalidArgument on inconsistent sizes.
  void validate() const;
};

/// Closed-form parameter count for a configuration.
Eigen::Index expected_parameter_count(const TransformerConfig &config);

/// Per-property mean and standard deviation used for z-scoring.
struct PropertyStats {
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;

  static PropertyStats fit(std::span<const chem::PropertyVector> rows);
  /// Properties with zero spread normalize to 0.
  Eigen::VectorXd normalize(const chem::PropertyVector &p) const;
  bool empty() const noexcept { return mean.size() == 0; }
};

struct Conditioning {
  std::vector<int> scaffold_ids;  // block_size entries, all <pad> when absent
  Eigen::VectorXd properties;     // z-scored

  static Conditioning none(int block_size, int n_properties);
};

/// Scaffold frame for a scaffold SMILES; the empty scaffold maps to an
/// all-<pad> frame. Throws VocabMismatch when a scaffold token is unknown.
std::vector<int> scaffold_frame(std::string_view scaffold_smiles,
                                const smiles::Vocabulary &vocab,
                                int block_size = smiles::kBlockSize);

Conditioning make_conditioning(const smiles::Molecule &mol,
                               const smiles::Vocabulary &vocab,
                               const PropertyStats &stats);

/// Rows laid out sequence-major: row b*len + t is position t of sequence b.
struct Batch {
  int size = 0;
  int len = 0;
  std::vector<int> ids;
  std::vector<int> scaffold;  // empty when unconditioned
  RealMatrix properties;      // size x n_properties, empty when unconditioned
  std::vector<int> key_lengths;
};

/// len = 0 trims to the longest framed sequence (content + 2).
Batch make_batch(std::span<const smiles::TokenSequence> sequences,
                 std::span<const Conditioning> conditioning, int len = 0);

class Transformer {
public:
  Transformer() = default;
  Transformer(const TransformerConfig &config, CounterRng &rng);

  const TransformerConfig &config() const noexcept { return config_; }

  /// Token + position embeddings, plus scaffold and broadcast property
  /// projection for conditioned models, then dropout.
  RealTensor embed(const Batch &batch, bool training, CounterRng &rng) const;
  RealTensor block_forward(int index, const RealTensor &x, const Batch &batch,
                           bool training, CounterRng &rng) const;
  /// Activations after the final layer norm, before the vocabulary head.
  RealTensor hidden(const Batch &batch, bool training, CounterRng &rng) const;
  RealTensor logits(const Batch &batch, bool training, CounterRng &rng) const;

  /// Attention probabilities of one block, one matrix per (sequence, head).
  std::vector<RealMatrix> attention_maps(int index, const Batch &batch) const;

  tensor::NamedTensors<Real> named_parameters() const;
  std::vector<RealTensor> parameters() const;
  Eigen::Index parameter_count() const;

private:
  struct Block {
    tensor::LayerNorm<Real> ln1;
    tensor::Linear<Real> qkv;
    tensor::Linear<Real> proj;
    tensor::LayerNorm<Real> ln2;
    tensor::Linear<Real> fc1;
    tensor::Linear<Real> fc2;
  };

  std::span<const int> attention_lengths(const Batch &batch) const;
  RealTensor block_input(int index, const Batch &batch) const;

  TransformerConfig config_;
  RealTensor token_embedding_;
  RealTensor position_embedding_;
  RealTensor scaffold_embedding_;
  tensor::Linear<Real> property_projection_;
  std::vector<Block> blocks_;
  tensor::LayerNorm<Real> final_norm_;
  tensor::Linear<Real> head_;
};

}  // namespace cardiogen::lm

#endif  // CARDIOGEN_LM_TRANSFORMER_H_
