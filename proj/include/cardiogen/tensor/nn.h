//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CARDIOGEN_TENSOR_NN_H_
#define CARDIOGEN_TENSOR_NN_H_

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "cardiogen/core/random.h"
#include "cardiogen/tensor/ops.h"

namespace cardiogen::tensor {

template <class S>
using NamedTensors = std::vector<std::pair<std::string, Tensor<S>>>;

/// Non-trainable state saved alongside parameters (batch-norm statistics).
template <class S>
using NamedBuffers = std::vector<std::pair<std::string, Matrix<S> *>>;

template <class S>
Matrix<S> uniform_matrix(Eigen::Index rows, Eigen::Index cols, double bound,
                         CounterRng &rng) {
  Matrix<S> m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i)
    m.data()[i] = static_cast<S>(rng.uniform(-bound, bound));
  return m;
}

template <class S>
Matrix<S> normal_matrix(Eigen::Index rows, Eigen::Index cols, double stddev,
                        CounterRng &rng) {
  Matrix<S> m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i)
    m.data()[i] = static_cast<S>(stddev * rng.normal());
  return m;
}

template <class S>
struct Linear {
  Tensor<S> weight;  // in x out
  Tensor<S> bias;    // 1 x out, empty when has_bias is false
  bool has_bias = true;

  Linear() = default;
  /// Uniform(-1/sqrt(in), 1/sqrt(in)) for weights and biases.
  Linear(Eigen::Index in, Eigen::Index out, CounterRng &rng,
         bool with_bias = true)
      : has_bias(with_bias) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    weight = Tensor<S>::parameter(uniform_matrix<S>(in, out, bound, rng));
    if (has_bias)
      bias = Tensor<S>::parameter(uniform_matrix<S>(1, out, bound, rng));
  }

  Tensor<S> operator()(const Tensor<S> &x) const {
    Tensor<S> y = matmul(x, weight);
    return has_bias ? add(y, bias) : y;
  }

  void collect(const std::string &prefix, NamedTensors<S> &out) const {
    out.emplace_back(prefix + ".weight", weight);
    if (has_bias)
      out.emplace_back(prefix + ".bias", bias);
  }
};

template <class S>
struct LayerNorm {
  Tensor<S> gamma;
  Tensor<S> beta;

  LayerNorm() = default;
  explicit LayerNorm(Eigen::Index d)
      : gamma(Tensor<S>::parameter(Matrix<S>::Ones(1, d))),
        beta(Tensor<S>::parameter(Matrix<S>::Zero(1, d))) { }

  Tensor<S> operator()(const Tensor<S> &x) const {
    return layer_norm(x, gamma, beta);
  }

  void collect(const std::string &prefix, NamedTensors<S> &out) const {
    out.emplace_back(prefix + ".gamma", gamma);
    out.emplace_back(prefix + ".beta", beta);
  }
};

template <class S>
struct BatchNorm {
  Tensor<S> gamma;
  Tensor<S> beta;
  BatchNormStats<S> stats;

  BatchNorm() = default;
  explicit BatchNorm(Eigen::Index d)
      : gamma(Tensor<S>::parameter(Matrix<S>::Ones(1, d))),
        beta(Tensor<S>::parameter(Matrix<S>::Zero(1, d))),
        stats { Matrix<S>::Zero(1, d), Matrix<S>::Ones(1, d) } { }

  Tensor<S> operator()(const Tensor<S> &x, bool training) {
    return batch_norm(x, gamma, beta, stats, training);
  }

  void collect(const std::string &prefix, NamedTensors<S> &out) const {
    out.emplace_back(prefix + ".gamma", gamma);
    out.emplace_back(prefix + ".beta", beta);
  }

  void collect_buffers(const std::string &prefix, NamedBuffers<S> &out) {
    out.emplace_back(prefix + ".running_mean", &stats.running_mean);
    out.emplace_back(prefix + ".running_var", &stats.running_var);
  }
};

template <class S>
std::vector<Tensor<S>> tensors_of(const NamedTensors<S> &named) {
  std::vector<Tensor<S>> out;
  out.reserve(named.size());
  for (const auto &[name, t]: named)
    out.push_back(t);
  return out;
}

template <class S>
Eigen::Index parameter_count(const NamedTensors<S> &named) {
  Eigen::Index n = 0;
  for (const auto &[name, t]: named)
    n += t.size();
  return n;
}

}  // namespace cardiogen::tensor

#endif  // CARDIOGEN_TENSOR_NN_H_
