//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CARDIOGEN_DISC_MODEL_H_
#define CARDIOGEN_DISC_MODEL_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "cardiogen/chem/fingerprint.h"
#include "cardiogen/core/random.h"
#include "cardiogen/disc/graph.h"
#include "cardiogen/tensor/nn.h"

namespace cardiogen::disc {

using Real = float;
using RealTensor = tensor::Tensor<Real>;
using RealMatrix = tensor::Matrix<Real>;

enum class Task { kClassification, kRegression };

std::string_view task_name(Task task);
Task parse_task(std::string_view name);

struct FusionConfig {
  Task task = Task::kClassification;
  int gat_hidden = 64;  // concatenated over heads
  int gat_heads = 4;
  int encoder_hidden = 256;
  int head_hidden = 256;
  double dropout = 0.5;
  /// Adds a learned per-edge-class scalar to each attention logit.
  bool bond_attention = true;
  int feature_dim = 256;
  int fingerprint_bits = chem::kFingerprintBits;

  void validate() const;
};

/// One molecule ready for the model.
struct Example {
  std::string smiles;
  MolecularGraph graph;
  chem::Fingerprint fingerprint;
  Eigen::VectorXf features;  // transformer feature vector
  double target = 0;         // class label (0/1) or pIC50
};

struct ExampleBatch {
  GraphBatch graphs;
  RealMatrix fingerprints;  // batch x bits, 0/1
  RealMatrix features;      // batch x feature_dim
  int size() const noexcept { return graphs.graph_count; }
};

ExampleBatch make_example_batch(std::span<const Example *const> examples);

/// Graph attention convolution with concatenated heads.
class GatLayer {
public:
  GatLayer() = default;
  GatLayer(int in, int heads, int head_width, bool bond_attention,
           CounterRng &rng);

  /// Node features in, node features out (nodes x heads*head_width). When
  /// `attention` is given it receives the per-edge weights (edges x heads).
  RealTensor forward(const RealTensor &x, const GraphBatch &g,
                     RealMatrix *attention = nullptr) const;

  void collect(const std::string &prefix,
               tensor::NamedTensors<Real> &out) const;

private:
  int heads_ = 0;
  int head_width_ = 0;
  bool bond_attention_ = true;
  tensor::Linear<Real> transform_;
  RealTensor attend_source_;  // 1 x heads*width
  RealTensor attend_target_;  // 1 x heads*width
  RealTensor edge_bias_;      // kEdgeClassCount x heads
  RealTensor bias_;           // 1 x heads*width
};

class FusionModel {
public:
  FusionModel() = default;
  FusionModel(const FusionConfig &config, CounterRng &rng);

  const FusionConfig &config() const noexcept { return config_; }

  /// Pooled graph embedding (graphs x gat_hidden).
  RealTensor encode_graph(const GraphBatch &g,
                          std::vector<RealMatrix> *attention = nullptr) const;

  /// Raw output (batch x 1): logits for classification, pIC50 for
  /// regression. Training mode updates batch-norm running statistics and
  /// needs at least two rows.
  RealTensor forward(const ExampleBatch &batch, bool training,
                     CounterRng &rng) const;

  /// Inference: sigmoid probabilities or pIC50 values.
  std::vector<double> predict(const ExampleBatch &batch) const;

  tensor::NamedTensors<Real> named_parameters() const;
  std::vector<RealTensor> parameters() const;
  tensor::NamedBuffers<Real> named_buffers();
  Eigen::Index parameter_count() const;

private:
  struct Encoder {
    tensor::Linear<Real> fc1;
    tensor::BatchNorm<Real> bn1;
    tensor::Linear<Real> fc2;
    tensor::BatchNorm<Real> bn2;
  };

  RealTensor encode(Encoder &enc, const RealTensor &x, bool training,
                    CounterRng &rng) const;

  FusionConfig config_;
  GatLayer gat1_;
  GatLayer gat2_;
  // Running statistics change in training mode only.
  mutable Encoder fingerprint_encoder_;
  mutable Encoder feature_encoder_;
  tensor::Linear<Real> head_fc1_;
  mutable tensor::BatchNorm<Real> head_bn_;
  tensor::Linear<Real> head_fc2_;
};

}  // namespace cardiogen::disc

#endif  // CARDIOGEN_DISC_MODEL_H_
