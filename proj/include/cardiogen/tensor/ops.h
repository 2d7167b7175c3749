//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CARDIOGEN_TENSOR_OPS_H_
#define CARDIOGEN_TENSOR_OPS_H_

#include <span>
#include <vector>

#include "cardiogen/core/random.h"
#include "cardiogen/tensor/tensor.h"

namespace cardiogen::tensor {

// Shapes are (rows, cols). "Row broadcast" means a 1 x n operand is applied
// to every row of an m x n operand.

template <class S>
Tensor<S> matmul(const Tensor<S> &a, const Tensor<S> &b);

/// a + b; b may be row-broadcast.
template <class S>
Tensor<S> add(const Tensor<S> &a, const Tensor<S> &b);

/// a - b; b may be row-broadcast.
template <class S>
Tensor<S> sub(const Tensor<S> &a, const Tensor<S> &b);

/// Elementwise a * b; b may be row-broadcast.
template <class S>
Tensor<S> mul(const Tensor<S> &a, const Tensor<S> &b);

template <class S>
Tensor<S> scale(const Tensor<S> &a, S factor);

/// Sum of all entries, 1 x 1.
template <class S>
Tensor<S> sum(const Tensor<S> &a);

/// Mean of all entries, 1 x 1.
template <class S>
Tensor<S> mean(const Tensor<S> &a);

template <class S>
Tensor<S> concat_cols(const std::vector<Tensor<S>> &parts);

template <class S>
Tensor<S> concat_rows(const std::vector<Tensor<S>> &parts);

/// Rows of table selected by ids. Rows whose id equals padding_id come out
/// as zeros and pass no gradient to the table.
template <class S>
Tensor<S> embedding(const Tensor<S> &table, std::span<const int> ids,
                    int padding_id = -1);

/// out[i] = x[index[i]].
template <class S>
Tensor<S> gather_rows(const Tensor<S> &x, std::span<const int> index);

/// out[index[i]] += x[i], out has n_out rows.
template <class S>
Tensor<S> scatter_add_rows(const Tensor<S> &x, std::span<const int> index,
                           int n_out);

/// Every row repeated `times` times consecutively.
template <class S>
Tensor<S> repeat_rows(const Tensor<S> &x, int times);

template <class S>
Tensor<S> relu(const Tensor<S> &x);

template <class S>
Tensor<S> leaky_relu(const Tensor<S> &x, S slope = S(0.2));

/// Exact (erf) form.
template <class S>
Tensor<S> gelu(const Tensor<S> &x);

template <class S>
Tensor<S> sigmoid(const Tensor<S> &x);

template <class S>
Tensor<S> softmax_rows(const Tensor<S> &x);

template <class S>
Tensor<S> layer_norm(const Tensor<S> &x, const Tensor<S> &gamma,
                     const Tensor<S> &beta, S eps = S(1e-5));

template <class S>
struct BatchNormStats {
  Matrix<S> running_mean;
  Matrix<S> running_var;
};

/// Training mode normalizes with batch statistics (needs >= 2 rows) and
/// updates the running statistics; inference mode uses the running ones.
template <class S>
Tensor<S> batch_norm(const Tensor<S> &x, const Tensor<S> &gamma,
                     const Tensor<S> &beta, BatchNormStats<S> &stats,
                     bool training, S momentum = S(0.1), S eps = S(1e-5));

/// Zeroes entries with probability p and scales survivors by 1/(1-p).
template <class S>
Tensor<S> dropout(const Tensor<S> &x, double p, bool training,
                  CounterRng &rng);

/// Mean over rows with target >= 0 of -log softmax(logits)[target].
/// Rows with target -1 are ignored. Returns 0 when nothing is counted.
template <class S>
Tensor<S> cross_entropy(const Tensor<S> &logits, std::span<const int> targets);

template <class S>
Tensor<S> mse(const Tensor<S> &pred, const Matrix<S> &target);

template <class S>
Tensor<S> bce_with_logits(const Tensor<S> &logits, const Matrix<S> &target);

/// Sum of absolute values over all given tensors.
template <class S>
Tensor<S> l1_penalty(const std::vector<Tensor<S>> &params);

/// Softmax within groups of rows sharing a segment id, per column.
template <class S>
Tensor<S> segment_softmax(const Tensor<S> &scores, std::span<const int> segment,
                          int n_segments);

/// (n x heads*width) -> (n x heads): sum inside each head block.
template <class S>
Tensor<S> head_sum(const Tensor<S> &x, int heads);

/// (n x heads) -> (n x heads*width): each column repeated width times.
template <class S>
Tensor<S> head_expand(const Tensor<S> &x, int width);

/// Multi-head scaled dot-product attention over packed projections.
/// qkv holds batch*len rows of [q | k | v], each d wide. Keys at positions
/// >= key_lengths[b] are masked; causal also masks keys after the query.
template <class S>
Tensor<S> self_attention(const Tensor<S> &qkv, int batch, int len, int heads,
                         bool causal, std::span<const int> key_lengths);

/// Attention weights of the last self_attention forward for inspection:
/// one len x len matrix per (batch, head).
template <class S>
std::vector<Matrix<S>> attention_weights(const Tensor<S> &qkv, int batch,
                                         int len, int heads, bool causal,
                                         std::span<const int> key_lengths);

template <class S>
Tensor<S> operator+(const Tensor<S> &a, const Tensor<S> &b) {
  return add(a, b);
}

template <class S>
Tensor<S> operator-(const Tensor<S> &a, const Tensor<S> &b) {
  return sub(a, b);
}

template <class S>
Tensor<S> operator*(const Tensor<S> &a, const Tensor<S> &b) {
  return mul(a, b);
}

/// Throws NonFiniteInput if any entry is NaN or infinite.
template <class S>
void require_finite(const Matrix<S> &m, const char *what);

}  // namespace cardiogen::tensor

#endif  // CARDIOGEN_TENSOR_OPS_H_
