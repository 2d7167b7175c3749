//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#include "cardiogen/disc/model.h"

#include <cmath>

#include "cardiogen/core/error.h"
#include "cardiogen/tensor/ops.h"

namespace cardiogen::disc {

namespace ops = cardiogen::tensor;

std::string_view task_name(Task task) {
  return task == Task::kClassification ? "classification" : "regression";
}

Task parse_task(std::string_view name) {
  if (name == "classification")
    return Task::kClassification;
  if (name == "regression")
    return Task::kRegression;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown task '" + std::string(name) + "'");
}

void FusionConfig::validate() const {
  if (gat_heads <= 0 || gat_hidden <= 0 || gat_hidden % gat_heads != 0)
    throw Error(ErrorCode::kInvalidArgument,
                "gat_hidden must be a positive multiple of gat_heads");
  if (encoder_hidden <= 0 || head_hidden <= 0 || feature_dim <= 0
      || fingerprint_bits <= 0)
    throw Error(ErrorCode::kInvalidArgument, "layer sizes must be positive");
  if (!(dropout >= 0 && dropout < 1))
    throw Error(ErrorCode::kInvalidArgument, "dropout must be in [0, 1)");
}

ExampleBatch make_example_batch(std::span<const Example *const> examples) {
  ExampleBatch b;
  std::vector<const MolecularGraph *> graphs;
  for (const Example *e: examples)
    graphs.push_back(&e->graph);
  b.graphs = batch_graphs(graphs);
  const int n = static_cast<int>(examples.size());
  if (n == 0)
    return b;
  const int bits = examples[0]->fingerprint.size();
  const auto dim = examples[0]->features.size();
  b.fingerprints = RealMatrix::Zero(n, bits);
  b.features.resize(n, dim);
  for (int i = 0; i < n; ++i) {
    const Example &e = *examples[i];
    if (e.fingerprint.size() != bits || e.features.size() != dim)
      throw Error(ErrorCode::kShapeMismatch, "inconsistent example sizes");
    for (int bit: e.fingerprint.on_bits())
      b.fingerprints(i, bit) = 1;
    b.features.row(i) = e.features.transpose();
  }
  return b;
}

GatLayer::GatLayer(int in, int heads, int head_width, bool bond_attention,
                   CounterRng &rng)
    : heads_(heads), head_width_(head_width), bond_attention_(bond_attention),
      transform_(in, heads * head_width, rng, false) {
  const int width = heads * head_width;
  const double bound = std::sqrt(6.0 / (head_width + 1));
  attend_source_ = RealTensor::parameter(
      tensor::uniform_matrix<Real>(1, width, bound, rng));
  attend_target_ = RealTensor::parameter(
      tensor::uniform_matrix<Real>(1, width, bound, rng));
  if (bond_attention_)
    edge_bias_ = RealTensor::parameter(RealMatrix::Zero(kEdgeClassCount, heads));
  bias_ = RealTensor::parameter(RealMatrix::Zero(1, width));
}

RealTensor GatLayer::forward(const RealTensor &x, const GraphBatch &g,
                             RealMatrix *attention) const {
  const int n = static_cast<int>(x.rows());
  if (n != g.nodes.rows())
    throw Error(ErrorCode::kShapeMismatch, "GAT node count");
  const RealTensor h = transform_(x);
  const RealTensor src_score =
      ops::head_sum(ops::mul(h, attend_source_), heads_);
  const RealTensor dst_score =
      ops::head_sum(ops::mul(h, attend_target_), heads_);
  RealTensor logits = ops::add(ops::gather_rows(src_score, g.source),
                               ops::gather_rows(dst_score, g.target));
  if (bond_attention_)
    logits = ops::add(logits, ops::embedding(edge_bias_, g.edge_class));
  const RealTensor alpha =
      ops::segment_softmax(ops::leaky_relu(logits, Real(0.2)), g.target, n);
  if (attention)
    *attention = alpha.value();
  const RealTensor messages = ops::mul(ops::gather_rows(h, g.source),
                                       ops::head_expand(alpha, head_width_));
  return ops::add(ops::scatter_add_rows(messages, g.target, n), bias_);
}

void GatLayer::collect(const std::string &prefix,
                       tensor::NamedTensors<Real> &out) const {
  transform_.collect(prefix + ".transform", out);
  out.emplace_back(prefix + ".attend_source", attend_source_);
  out.emplace_back(prefix + ".attend_target", attend_target_);
  if (bond_attention_)
    out.emplace_back(prefix + ".edge_bias", edge_bias_);
  out.emplace_back(prefix + ".bias", bias_);
}

FusionModel::FusionModel(const FusionConfig &config, CounterRng &rng)
    : config_(config) {
  config_.validate();
  const int width = config_.gat_hidden / config_.gat_heads;
  gat1_ = GatLayer(kAtomFeatureCount, config_.gat_heads, width,
                   config_.bond_attention, rng);
  gat2_ = GatLayer(config_.gat_hidden, config_.gat_heads, width,
                   config_.bond_attention, rng);
  const int e = config_.encoder_hidden;
  fingerprint_encoder_ = { tensor::Linear<Real>(config_.fingerprint_bits, e, rng),
                           tensor::BatchNorm<Real>(e),
                           tensor::Linear<Real>(e, e, rng),
                           tensor::BatchNorm<Real>(e) };
  feature_encoder_ = { tensor::Linear<Real>(config_.feature_dim, e, rng),
                       tensor::BatchNorm<Real>(e),
                       tensor::Linear<Real>(e, e, rng),
                       tensor::BatchNorm<Real>(e) };
  head_fc1_ = tensor::Linear<Real>(config_.gat_hidden + 2 * e,
                                   config_.head_hidden, rng);
  head_bn_ = tensor::BatchNorm<Real>(config_.head_hidden);
  head_fc2_ = tensor::Linear<Real>(config_.head_hidden, 1, rng);
}

RealTensor FusionModel::encode_graph(const GraphBatch &g,
                                     std::vector<RealMatrix> *attention) const {
  RealMatrix a1, a2;
  const RealTensor x(g.nodes.cast<Real>());
  const RealTensor h1 =
      ops::relu(gat1_.forward(x, g, attention ? &a1 : nullptr));
  const RealTensor h2 = gat2_.forward(h1, g, attention ? &a2 : nullptr);
  if (attention)
    *attention = { std::move(a1), std::move(a2) };
  return ops::scatter_add_rows(h2, g.graph_of_node, g.graph_count);
}

RealTensor FusionModel::encode(Encoder &enc, const RealTensor &x,
                               bool training, CounterRng &rng) const {
  const double p = config_.dropout;
  RealTensor h = ops::dropout(ops::relu(enc.bn1(enc.fc1(x), training)), p,
                              training, rng);
  return ops::dropout(ops::relu(enc.bn2(enc.fc2(h), training)), p, training,
                      rng);
}

RealTensor FusionModel::forward(const ExampleBatch &batch, bool training,
                                CounterRng &rng) const {
  if (batch.fingerprints.cols() != config_.fingerprint_bits
      || batch.features.cols() != config_.feature_dim)
    throw Error(ErrorCode::kShapeMismatch, "fusion input widths");
  if (training && batch.size() < 2)
    throw Error(ErrorCode::kInvalidArgument,
                "training batches need at least two molecules");
  const RealTensor graph = encode_graph(batch.graphs);
  const RealTensor fp = encode(fingerprint_encoder_,
                               RealTensor(batch.fingerprints), training, rng);
  const RealTensor feat =
      encode(feature_encoder_, RealTensor(batch.features), training, rng);
  const RealTensor joined = ops::concat_cols<Real>({ graph, fp, feat });
  const RealTensor h =
      ops::dropout(ops::relu(head_bn_(head_fc1_(joined), training)),
                   config_.dropout, training, rng);
  return head_fc2_(h);
}

std::vector<double> FusionModel::predict(const ExampleBatch &batch) const {
  tensor::NoGradGuard guard;
  CounterRng unused;
  const RealMatrix out = forward(batch, false, unused).value();
  std::vector<double> result(out.rows());
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double v = out(i, 0);
    result[i] = config_.task == Task::kClassification ? 1 / (1 + std::exp(-v))
                                                      : v;
  }
  return result;
}

tensor::NamedTensors<Real> FusionModel::named_parameters() const {
  tensor::NamedTensors<Real> out;
  gat1_.collect("gat1", out);
  gat2_.collect("gat2", out);
  auto encoder = [&](const std::string &name, const Encoder &enc) {
    enc.fc1.collect(name + ".fc1", out);
    enc.bn1.collect(name + ".bn1", out);
    enc.fc2.collect(name + ".fc2", out);
    enc.bn2.collect(name + ".bn2", out);
  };
  encoder("fingerprint_encoder", fingerprint_encoder_);
  encoder("feature_encoder", feature_encoder_);
  head_fc1_.collect("head.fc1", out);
  head_bn_.collect("head.bn", out);
  head_fc2_.collect("head.fc2", out);
  return out;
}

std::vector<RealTensor> FusionModel::parameters() const {
  return tensor::tensors_of(named_parameters());
}

tensor::NamedBuffers<Real> FusionModel::named_buffers() {
  tensor::NamedBuffers<Real> out;
  fingerprint_encoder_.bn1.collect_buffers("fingerprint_encoder.bn1", out);
  fingerprint_encoder_.bn2.collect_buffers("fingerprint_encoder.bn2", out);
  feature_encoder_.bn1.collect_buffers("feature_encoder.bn1", out);
  feature_encoder_.bn2.collect_buffers("feature_encoder.bn2", out);
  head_bn_.collect_buffers("head.bn", out);
  return out;
}

Eigen::Index FusionModel::parameter_count() const {
  return tensor::parameter_count(named_parameters());
}

}  // namespace cardiogen::disc
