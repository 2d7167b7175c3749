//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#include "cardiogen/tensor/ops.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <unsupported/Eigen/SpecialFunctions>

#include "cardiogen/core/error.h"

namespace cardiogen::tensor {

namespace {

template <class S>
bool wants(Node<S> &n, int k) {
  return n.parents[k]->requires_grad;
}

template <class S>
Matrix<S> &grad_of(Node<S> &n, int k) {
  return n.parents[k]->grad_ref();
}

template <class S>
const Matrix<S> &value_of(Node<S> &n, int k) {
  return n.parents[k]->value;
}

[[noreturn]] void shape_error(const char *op, Eigen::Index ar, Eigen::Index ac,
                              Eigen::Index br, Eigen::Index bc) {
  throw Error(ErrorCode::kShapeMismatch,
              std::string(op) + ": (" + std::to_string(ar) + ", "
                  + std::to_string(ac) + ") vs (" + std::to_string(br) + ", "
                  + std::to_string(bc) + ")");
}

// True when b is applied to every row of a.
template <class S>
bool check_broadcast(const char *op, const Tensor<S> &a, const Tensor<S> &b) {
  if (a.rows() == b.rows() && a.cols() == b.cols())
    return false;
  if (b.rows() == 1 && a.cols() == b.cols())
    return true;
  shape_error(op, a.rows(), a.cols(), b.rows(), b.cols());
}

template <class S>
void softmax_prefix(Eigen::Ref<Matrix<S>> row, Eigen::Index limit) {
  S mx = row(0, 0);
  for (Eigen::Index j = 1; j < limit; ++j)
    mx = std::max(mx, row(0, j));
  S total = 0;
  for (Eigen::Index j = 0; j < limit; ++j) {
    row(0, j) = std::exp(row(0, j) - mx);
    total += row(0, j);
  }
  for (Eigen::Index j = 0; j < limit; ++j)
    row(0, j) /= total;
  for (Eigen::Index j = limit; j < row.cols(); ++j)
    row(0, j) = 0;
}

template <class S>
std::vector<Matrix<S>> attention_probs(const Matrix<S> &qkv, int batch, int len,
                                       int heads, bool causal,
                                       std::span<const int> key_lengths) {
  const Eigen::Index d = qkv.cols() / 3;
  const Eigen::Index dh = d / heads;
  const S scale = S(1) / std::sqrt(static_cast<S>(dh));
  std::vector<Matrix<S>> probs(static_cast<std::size_t>(batch) * heads);
  for (int b = 0; b < batch; ++b) {
    const int kl = key_lengths.empty() ? len : std::clamp(key_lengths[b], 1, len);
    for (int h = 0; h < heads; ++h) {
      auto q = qkv.block(b * len, h * dh, len, dh);
      auto k = qkv.block(b * len, d + h * dh, len, dh);
      Matrix<S> &p = probs[b * heads + h];
      p.noalias() = (q * k.transpose()) * scale;
      for (int i = 0; i < len; ++i) {
        const int limit = causal ? std::min(i + 1, kl) : kl;
        softmax_prefix<S>(p.row(i), limit);
      }
    }
  }
  return probs;
}

}  // namespace

template <class S>
void require_finite(const Matrix<S> &m, const char *what) {
  if (!m.allFinite())
    throw Error(ErrorCode::kNonFiniteInput, std::string(what)
                                                + " has NaN or infinite entries");
}

template <class S>
Tensor<S> matmul(const Tensor<S> &a, const Tensor<S> &b) {
  if (a.cols() != b.rows())
    shape_error("matmul", a.rows(), a.cols(), b.rows(), b.cols());
  Matrix<S> out = a.value() * b.value();
  return Tensor<S>::make(std::move(out), { a, b }, [](Node<S> &n) {
    if (wants(n, 0))
      grad_of(n, 0).noalias() += n.grad * value_of(n, 1).transpose();
    if (wants(n, 1))
      grad_of(n, 1).noalias() += value_of(n, 0).transpose() * n.grad;
  });
}

template <class S>
Tensor<S> add(const Tensor<S> &a, const Tensor<S> &b) {
  const bool bc = check_broadcast("add", a, b);
  Matrix<S> out = a.value();
  if (bc)
    out.rowwise() += b.value().row(0);
  else
    out += b.value();
  return Tensor<S>::make(std::move(out), { a, b }, [bc](Node<S> &n) {
    if (wants(n, 0))
      grad_of(n, 0) += n.grad;
    if (wants(n, 1)) {
      if (bc)
        grad_of(n, 1) += n.grad.colwise().sum();
      else
        grad_of(n, 1) += n.grad;
    }
  });
}

template <class S>
Tensor<S> sub(const Tensor<S> &a, const Tensor<S> &b) {
  const bool bc = check_broadcast("sub", a, b);
  Matrix<S> out = a.value();
  if (bc)
    out.rowwise() -= b.value().row(0);
  else
    out -= b.value();
  return Tensor<S>::make(std::move(out), { a, b }, [bc](Node<S> &n) {
    if (wants(n, 0))
      grad_of(n, 0) += n.grad;
    if (wants(n, 1)) {
      if (bc)
        grad_of(n, 1) -= n.grad.colwise().sum();
      else
        grad_of(n, 1) -= n.grad;
    }
  });
}

template <class S>
Tensor<S> mul(const Tensor<S> &a, const Tensor<S> &b) {
  const bool bc = check_broadcast("mul", a, b);
  Matrix<S> out;
  if (bc)
    out = a.value().array().rowwise() * b.value().row(0).array();
  else
    out = a.value().cwiseProduct(b.value());
  return Tensor<S>::make(std::move(out), { a, b }, [bc](Node<S> &n) {
    const Matrix<S> &av = value_of(n, 0);
    const Matrix<S> &bv = value_of(n, 1);
    if (wants(n, 0)) {
      if (bc)
        grad_of(n, 0).array() += n.grad.array().rowwise() * bv.row(0).array();
      else
        grad_of(n, 0).array() += n.grad.array() * bv.array();
    }
    if (wants(n, 1)) {
      if (bc)
        grad_of(n, 1) += n.grad.cwiseProduct(av).colwise().sum();
      else
        grad_of(n, 1).array() += n.grad.array() * av.array();
    }
  });
}

template <class S>
Tensor<S> scale(const Tensor<S> &a, S factor) {
  Matrix<S> out = a.value() * factor;
  return Tensor<S>::make(std::move(out), { a }, [factor](Node<S> &n) {
    if (wants(n, 0))
      grad_of(n, 0) += n.grad * factor;
  });
}

template <class S>
Tensor<S> sum(const Tensor<S> &a) {
  Matrix<S> out(1, 1);
  out(0, 0) = static_cast<S>(a.value().template cast<double>().sum());
  return Tensor<S>::make(std::move(out), { a }, [](Node<S> &n) {
    if (wants(n, 0))
      grad_of(n, 0).array() += n.grad(0, 0);
  });
}

template <class S>
Tensor<S> mean(const Tensor<S> &a) {
  const double count = static_cast<double>(std::max<Eigen::Index>(a.size(), 1));
  Matrix<S> out(1, 1);
  out(0, 0) = static_cast<S>(a.value().template cast<double>().sum() / count);
  return Tensor<S>::make(std::move(out), { a }, [count](Node<S> &n) {
    if (wants(n, 0))
      grad_of(n, 0).array() += static_cast<S>(n.grad(0, 0) / count);
  });
}

template <class S>
Tensor<S> concat_cols(const std::vector<Tensor<S>> &parts) {
  if (parts.empty())
    throw Error(ErrorCode::kShapeMismatch, "concat_cols: no inputs");
  Eigen::Index cols = 0;
  for (const auto &p: parts) {
    if (p.rows() != parts[0].rows())
      shape_error("concat_cols", parts[0].rows(), parts[0].cols(), p.rows(),
                  p.cols());
    cols += p.cols();
  }
  Matrix<S> out(parts[0].rows(), cols);
  std::vector<Eigen::Index> offsets;
  Eigen::Index off = 0;
  for (const auto &p: parts) {
    out.middleCols(off, p.cols()) = p.value();
    offsets.push_back(off);
    off += p.cols();
  }
  return Tensor<S>::make(std::move(out), parts, [offsets](Node<S> &n) {
    for (std::size_t k = 0; k < offsets.size(); ++k)
      if (wants(n, static_cast<int>(k)))
        grad_of(n, static_cast<int>(k))
            += n.grad.middleCols(offsets[k], value_of(n, static_cast<int>(k)).cols());
  });
}

template <class S>
Tensor<S> concat_rows(const std::vector<Tensor<S>> &parts) {
  if (parts.empty())
    throw Error(ErrorCode::kShapeMismatch, "concat_rows: no inputs");
  Eigen::Index rows = 0;
  for (const auto &p: parts) {
    if (p.cols() != parts[0].cols())
      shape_error("concat_rows", parts[0].rows(), parts[0].cols(), p.rows(),
                  p.cols());
    rows += p.rows();
  }
  Matrix<S> out(rows, parts[0].cols());
  std::vector<Eigen::Index> offsets;
  Eigen::Index off = 0;
  for (const auto &p: parts) {
    out.middleRows(off, p.rows()) = p.value();
    offsets.push_back(off);
    off += p.rows();
  }
  return Tensor<S>::make(std::move(out), parts, [offsets](Node<S> &n) {
    for (std::size_t k = 0; k < offsets.size(); ++k)
      if (wants(n, static_cast<int>(k)))
        grad_of(n, static_cast<int>(k))
            += n.grad.middleRows(offsets[k], value_of(n, static_cast<int>(k)).rows());
  });
}

template <class S>
Tensor<S> embedding(const Tensor<S> &table, std::span<const int> ids,
                    int padding_id) {
  const Eigen::Index vocab = table.rows();
  Matrix<S> out(static_cast<Eigen::Index>(ids.size()), table.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= vocab)
      throw Error(ErrorCode::kVocabMismatch,
                  "embedding id " + std::to_string(ids[i]) + " outside table of "
                      + std::to_string(vocab));
    if (ids[i] == padding_id)
      out.row(i).setZero();
    else
      out.row(i) = table.value().row(ids[i]);
  }
  std::vector<int> idx(ids.begin(), ids.end());
  return Tensor<S>::make(std::move(out), { table },
                         [idx = std::move(idx), padding_id](Node<S> &n) {
                           if (!wants(n, 0))
                             return;
                           Matrix<S> &g = grad_of(n, 0);
                           for (std::size_t i = 0; i < idx.size(); ++i)
                             if (idx[i] != padding_id)
                               g.row(idx[i]) += n.grad.row(i);
                         });
}

template <class S>
Tensor<S> gather_rows(const Tensor<S> &x, std::span<const int> index) {
  Matrix<S> out(static_cast<Eigen::Index>(index.size()), x.cols());
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (index[i] < 0 || index[i] >= x.rows())
      throw Error(ErrorCode::kShapeMismatch, "gather_rows index out of range");
    out.row(i) = x.value().row(index[i]);
  }
  std::vector<int> idx(index.begin(), index.end());
  return Tensor<S>::make(std::move(out), { x },
                         [idx = std::move(idx)](Node<S> &n) {
                           if (!wants(n, 0))
                             return;
                           Matrix<S> &g = grad_of(n, 0);
                           for (std::size_t i = 0; i < idx.size(); ++i)
                             g.row(idx[i]) += n.grad.row(i);
                         });
}

template <class S>
Tensor<S> scatter_add_rows(const Tensor<S> &x, std::span<const int> index,
                           int n_out) {
  if (static_cast<Eigen::Index>(index.size()) != x.rows())
    throw Error(ErrorCode::kShapeMismatch, "scatter_add_rows index length");
  Matrix<S> out = Matrix<S>::Zero(n_out, x.cols());
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (index[i] < 0 || index[i] >= n_out)
      throw Error(ErrorCode::kShapeMismatch, "scatter_add_rows index range");
    out.row(index[i]) += x.value().row(i);
  }
  std::vector<int> idx(index.begin(), index.end());
  return Tensor<S>::make(std::move(out), { x },
                         [idx = std::move(idx)](Node<S> &n) {
                           if (!wants(n, 0))
                             return;
                           Matrix<S> &g = grad_of(n, 0);
                           for (std::size_t i = 0; i < idx.size(); ++i)
                             g.row(i) += n.grad.row(idx[i]);
                         });
}

template <class S>
Tensor<S> repeat_rows(const Tensor<S> &x, int times) {
  Matrix<S> out(x.rows() * times, x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r)
    out.middleRows(r * times, times).rowwise() = x.value().row(r);
  return Tensor<S>::make(std::move(out), { x }, [times](Node<S> &n) {
    if (!wants(n, 0))
      return;
    Matrix<S> &g = grad_of(n, 0);
    for (Eigen::Index r = 0; r < g.rows(); ++r)
      g.row(r) += n.grad.middleRows(r * times, times).colwise().sum();
  });
}

template <class S>
Tensor<S> relu(const Tensor<S> &x) {
  Matrix<S> out = x.value().cwiseMax(S(0));
  return Tensor<S>::make(std::move(out), { x }, [](Node<S> &n) {
    if (wants(n, 0))
      grad_of(n, 0).array()
          += (value_of(n, 0).array() > S(0)).select(n.grad.array(), S(0));
  });
}

template <class S>
Tensor<S> leaky_relu(const Tensor<S> &x, S slope) {
  Matrix<S> out = (x.value().array() > S(0)).select(x.value().array(),
                                                    x.value().array() * slope);
  return Tensor<S>::make(std::move(out), { x }, [slope](Node<S> &n) {
    if (wants(n, 0))
      grad_of(n, 0).array() += (value_of(n, 0).array() > S(0))
                                   .select(n.grad.array(), n.grad.array() * slope);
  });
}

template <class S>
Tensor<S> gelu(const Tensor<S> &x) {
  const S inv_sqrt2 = S(0.70710678118654752440);
  Matrix<S> cdf = (S(0.5) * (S(1) + (x.value().array() * inv_sqrt2).erf()))
                      .matrix();
  Matrix<S> out = x.value().cwiseProduct(cdf);
  return Tensor<S>::make(std::move(out), { x },
                         [cdf = std::move(cdf)](Node<S> &n) {
    if (!wants(n, 0))
      return;
    const S inv_sqrt_2pi = S(0.39894228040143267794);
    const auto v = value_of(n, 0).array();
    grad_of(n, 0).array()
        += n.grad.array()
           * (cdf.array()
              + v * inv_sqrt_2pi * (S(-0.5) * v.square()).exp());
  });
}

template <class S>
Tensor<S> sigmoid(const Tensor<S> &x) {
  Matrix<S> out = x.value().unaryExpr([](S v) {
    return v >= 0 ? S(1) / (S(1) + std::exp(-v))
                  : std::exp(v) / (S(1) + std::exp(v));
  });
  Matrix<S> y = out;
  return Tensor<S>::make(std::move(out), { x }, [y = std::move(y)](Node<S> &n) {
    if (wants(n, 0))
      grad_of(n, 0).array() += n.grad.array() * y.array() * (S(1) - y.array());
  });
}

template <class S>
Tensor<S> softmax_rows(const Tensor<S> &x) {
  Matrix<S> out = x.value();
  for (Eigen::Index r = 0; r < out.rows(); ++r)
    softmax_prefix<S>(out.row(r), out.cols());
  Matrix<S> y = out;
  return Tensor<S>::make(std::move(out), { x }, [y = std::move(y)](Node<S> &n) {
    if (!wants(n, 0))
      return;
    Matrix<S> gy = n.grad.cwiseProduct(y);
    auto row_sum = gy.rowwise().sum();
    grad_of(n, 0) += gy - (y.array().colwise() * row_sum.array()).matrix();
  });
}

template <class S>
Tensor<S> layer_norm(const Tensor<S> &x, const Tensor<S> &gamma,
                     const Tensor<S> &beta, S eps) {
  if (gamma.rows() != 1 || gamma.cols() != x.cols() || beta.rows() != 1
      || beta.cols() != x.cols())
    shape_error("layer_norm", x.rows(), x.cols(), gamma.rows(), gamma.cols());
  const Eigen::Index d = x.cols();
  Matrix<S> xhat(x.rows(), d);
  Eigen::Matrix<S, Eigen::Dynamic, 1> inv_std(x.rows());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const auto row = x.value().row(r);
    const S mu = row.mean();
    const S var = (row.array() - mu).square().mean();
    inv_std[r] = S(1) / std::sqrt(var + eps);
    xhat.row(r) = (row.array() - mu) * inv_std[r];
  }
  Matrix<S> out = (xhat.array().rowwise() * gamma.value().row(0).array())
                      .rowwise()
                  + beta.value().row(0).array();
  return Tensor<S>::make(
      std::move(out), { x, gamma, beta },
      [xhat = std::move(xhat), inv_std = std::move(inv_std)](Node<S> &n) {
        const Matrix<S> &g = value_of(n, 1);
        if (wants(n, 0)) {
          Matrix<S> dxhat = n.grad.array().rowwise() * g.row(0).array();
          const S inv_d = S(1) / static_cast<S>(dxhat.cols());
          Matrix<S> &gx = grad_of(n, 0);
          for (Eigen::Index r = 0; r < dxhat.rows(); ++r) {
            const S m1 = dxhat.row(r).sum() * inv_d;
            const S m2 = dxhat.row(r).dot(xhat.row(r)) * inv_d;
            gx.row(r).array() += inv_std[r]
                                 * (dxhat.row(r).array() - m1
                                    - xhat.row(r).array() * m2);
          }
        }
        if (wants(n, 1))
          grad_of(n, 1) += n.grad.cwiseProduct(xhat).colwise().sum();
        if (wants(n, 2))
          grad_of(n, 2) += n.grad.colwise().sum();
      });
}

template <class S>
Tensor<S> batch_norm(const Tensor<S> &x, const Tensor<S> &gamma,
                     const Tensor<S> &beta, BatchNormStats<S> &stats,
                     bool training, S momentum, S eps) {
  const Eigen::Index d = x.cols();
  if (gamma.cols() != d || beta.cols() != d || stats.running_mean.cols() != d
      || stats.running_var.cols() != d)
    shape_error("batch_norm", x.rows(), x.cols(), gamma.rows(), gamma.cols());
  if (!training) {
    RowVector<S> inv_std
        = (stats.running_var.row(0).array() + eps).rsqrt().matrix();
    RowVector<S> mul = inv_std.cwiseProduct(gamma.value().row(0));
    Matrix<S> out = ((x.value().rowwise() - stats.running_mean.row(0)).array()
                         .rowwise()
                     * mul.array())
                        .rowwise()
                    + beta.value().row(0).array();
    Matrix<S> xhat = (x.value().rowwise() - stats.running_mean.row(0)).array().rowwise()
                     * inv_std.array();
    return Tensor<S>::make(
        std::move(out), { x, gamma, beta },
        [mul, xhat = std::move(xhat)](Node<S> &n) {
          if (wants(n, 0))
            grad_of(n, 0).array() += n.grad.array().rowwise() * mul.array();
          if (wants(n, 1))
            grad_of(n, 1) += n.grad.cwiseProduct(xhat).colwise().sum();
          if (wants(n, 2))
            grad_of(n, 2) += n.grad.colwise().sum();
        });
  }
  const Eigen::Index m = x.rows();
  if (m < 2)
    throw Error(ErrorCode::kInvalidArgument,
                "batch_norm in training mode needs at least 2 rows");
  RowVector<S> mu = x.value().colwise().mean();
  Matrix<S> centered = x.value().rowwise() - mu;
  RowVector<S> var = centered.array().square().colwise().mean().matrix();
  RowVector<S> inv_std = (var.array() + eps).rsqrt().matrix();
  Matrix<S> xhat = centered.array().rowwise() * inv_std.array();
  Matrix<S> out = (xhat.array().rowwise() * gamma.value().row(0).array()).rowwise()
                  + beta.value().row(0).array();
  const S unbias = static_cast<S>(m) / static_cast<S>(m - 1);
  stats.running_mean = (S(1) - momentum) * stats.running_mean + momentum * mu;
  stats.running_var
      = (S(1) - momentum) * stats.running_var + (momentum * unbias) * var;
  return Tensor<S>::make(
      std::move(out), { x, gamma, beta },
      [xhat = std::move(xhat), inv_std](Node<S> &n) {
        const Matrix<S> &g = value_of(n, 1);
        if (wants(n, 0)) {
          Matrix<S> dxhat = n.grad.array().rowwise() * g.row(0).array();
          const S inv_m = S(1) / static_cast<S>(dxhat.rows());
          RowVector<S> m1 = dxhat.colwise().sum() * inv_m;
          RowVector<S> m2 = dxhat.cwiseProduct(xhat).colwise().sum() * inv_m;
          Matrix<S> dx = (dxhat.rowwise() - m1).array()
                         - xhat.array().rowwise() * m2.array();
          grad_of(n, 0).array() += dx.array().rowwise() * inv_std.array();
        }
        if (wants(n, 1))
          grad_of(n, 1) += n.grad.cwiseProduct(xhat).colwise().sum();
        if (wants(n, 2))
          grad_of(n, 2) += n.grad.colwise().sum();
      });
}

template <class S>
Tensor<S> dropout(const Tensor<S> &x, double p, bool training,
                  CounterRng &rng) {
  if (!training || p <= 0)
    return x;
  if (p >= 1)
    throw Error(ErrorCode::kInvalidArgument, "dropout rate must be < 1");
  const S keep_scale = static_cast<S>(1.0 / (1.0 - p));
  Matrix<S> mask(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < mask.size(); ++i)
    mask.data()[i] = rng.uniform() < p ? S(0) : keep_scale;
  Matrix<S> out = x.value().cwiseProduct(mask);
  return Tensor<S>::make(std::move(out), { x },
                         [mask = std::move(mask)](Node<S> &n) {
                           if (wants(n, 0))
                             grad_of(n, 0).array()
                                 += n.grad.array() * mask.array();
                         });
}

template <class S>
Tensor<S> cross_entropy(const Tensor<S> &logits, std::span<const int> targets) {
  if (static_cast<Eigen::Index>(targets.size()) != logits.rows())
    shape_error("cross_entropy", logits.rows(), logits.cols(),
                static_cast<Eigen::Index>(targets.size()), 1);
  require_finite(logits.value(), "cross_entropy logits");
  const Eigen::Index v = logits.cols();
  Matrix<S> probs(logits.rows(), v);
  double total = 0;
  int count = 0;
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const int t = targets[r];
    if (t < 0)
      continue;
    if (t >= v)
      throw Error(ErrorCode::kShapeMismatch, "cross_entropy target out of range");
    const auto row = logits.value().row(r);
    const S mx = row.maxCoeff();
    double z = 0;
    for (Eigen::Index j = 0; j < v; ++j)
      z += std::exp(static_cast<double>(row(j) - mx));
    total += std::log(z) - static_cast<double>(row(t) - mx);
    for (Eigen::Index j = 0; j < v; ++j)
      probs(r, j) = static_cast<S>(std::exp(static_cast<double>(row(j) - mx)) / z);
    ++count;
  }
  Matrix<S> out(1, 1);
  out(0, 0) = count ? static_cast<S>(total / count) : S(0);
  std::vector<int> tgt(targets.begin(), targets.end());
  return Tensor<S>::make(
      std::move(out), { logits },
      [probs = std::move(probs), tgt = std::move(tgt), count](Node<S> &n) {
        if (!wants(n, 0) || count == 0)
          return;
        const S g = n.grad(0, 0) / static_cast<S>(count);
        Matrix<S> &gl = grad_of(n, 0);
        for (std::size_t r = 0; r < tgt.size(); ++r) {
          if (tgt[r] < 0)
            continue;
          gl.row(r) += probs.row(r) * g;
          gl(r, tgt[r]) -= g;
        }
      });
}

template <class S>
Tensor<S> mse(const Tensor<S> &pred, const Matrix<S> &target) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols())
    shape_error("mse", pred.rows(), pred.cols(), target.rows(), target.cols());
  require_finite(pred.value(), "mse prediction");
  Matrix<S> diff = pred.value() - target;
  const double count = static_cast<double>(std::max<Eigen::Index>(diff.size(), 1));
  Matrix<S> out(1, 1);
  out(0, 0) = static_cast<S>(diff.template cast<double>().squaredNorm() / count);
  return Tensor<S>::make(std::move(out), { pred },
                         [diff = std::move(diff), count](Node<S> &n) {
                           if (wants(n, 0))
                             grad_of(n, 0)
                                 += diff * static_cast<S>(2 * n.grad(0, 0) / count);
                         });
}

template <class S>
Tensor<S> bce_with_logits(const Tensor<S> &logits, const Matrix<S> &target) {
  if (logits.rows() != target.rows() || logits.cols() != target.cols())
    shape_error("bce", logits.rows(), logits.cols(), target.rows(), target.cols());
  require_finite(logits.value(), "bce logits");
  const Matrix<S> &z = logits.value();
  double total = 0;
  Matrix<S> p(z.rows(), z.cols());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double x = z.data()[i];
    const double y = target.data()[i];
    // max(x,0) - x*y + log(1 + exp(-|x|))
    total += std::max(x, 0.0) - x * y + std::log1p(std::exp(-std::abs(x)));
    p.data()[i] = static_cast<S>(x >= 0 ? 1 / (1 + std::exp(-x))
                                        : std::exp(x) / (1 + std::exp(x)));
  }
  const double count = static_cast<double>(std::max<Eigen::Index>(z.size(), 1));
  Matrix<S> out(1, 1);
  out(0, 0) = static_cast<S>(total / count);
  Matrix<S> residual = p - target;
  return Tensor<S>::make(std::move(out), { logits },
                         [residual = std::move(residual), count](Node<S> &n) {
                           if (wants(n, 0))
                             grad_of(n, 0) += residual
                                              * static_cast<S>(n.grad(0, 0) / count);
                         });
}

template <class S>
Tensor<S> l1_penalty(const std::vector<Tensor<S>> &params) {
  double total = 0;
  for (const auto &p: params)
    total += p.value().template cast<double>().cwiseAbs().sum();
  Matrix<S> out(1, 1);
  out(0, 0) = static_cast<S>(total);
  return Tensor<S>::make(std::move(out), params, [](Node<S> &n) {
    for (std::size_t k = 0; k < n.parents.size(); ++k) {
      if (!wants(n, static_cast<int>(k)))
        continue;
      const Matrix<S> &v = value_of(n, static_cast<int>(k));
      grad_of(n, static_cast<int>(k)).array()
          += v.array().sign() * n.grad(0, 0);
    }
  });
}

template <class S>
Tensor<S> segment_softmax(const Tensor<S> &scores, std::span<const int> segment,
                          int n_segments) {
  const Eigen::Index e = scores.rows(), h = scores.cols();
  if (static_cast<Eigen::Index>(segment.size()) != e)
    throw Error(ErrorCode::kShapeMismatch, "segment_softmax segment length");
  Matrix<S> mx = Matrix<S>::Constant(n_segments, h,
                                     -std::numeric_limits<S>::infinity());
  for (Eigen::Index i = 0; i < e; ++i) {
    if (segment[i] < 0 || segment[i] >= n_segments)
      throw Error(ErrorCode::kShapeMismatch, "segment id out of range");
    mx.row(segment[i]) = mx.row(segment[i]).cwiseMax(scores.value().row(i));
  }
  Matrix<S> out(e, h);
  Matrix<S> total = Matrix<S>::Zero(n_segments, h);
  for (Eigen::Index i = 0; i < e; ++i) {
    out.row(i) = (scores.value().row(i) - mx.row(segment[i])).array().exp();
    total.row(segment[i]) += out.row(i);
  }
  for (Eigen::Index i = 0; i < e; ++i)
    out.row(i).array() /= total.row(segment[i]).array();
  Matrix<S> y = out;
  std::vector<int> seg(segment.begin(), segment.end());
  return Tensor<S>::make(
      std::move(out), { scores },
      [y = std::move(y), seg = std::move(seg), n_segments](Node<S> &n) {
        if (!wants(n, 0))
          return;
        Matrix<S> gy = n.grad.cwiseProduct(y);
        Matrix<S> seg_sum = Matrix<S>::Zero(n_segments, y.cols());
        for (std::size_t i = 0; i < seg.size(); ++i)
          seg_sum.row(seg[i]) += gy.row(i);
        Matrix<S> &g = grad_of(n, 0);
        for (std::size_t i = 0; i < seg.size(); ++i)
          g.row(i) += gy.row(i) - y.row(i).cwiseProduct(seg_sum.row(seg[i]));
      });
}

template <class S>
Tensor<S> head_sum(const Tensor<S> &x, int heads) {
  if (heads <= 0 || x.cols() % heads != 0)
    shape_error("head_sum", x.rows(), x.cols(), heads, 1);
  const Eigen::Index w = x.cols() / heads;
  Matrix<S> out(x.rows(), heads);
  for (int h = 0; h < heads; ++h)
    out.col(h) = x.value().middleCols(h * w, w).rowwise().sum();
  return Tensor<S>::make(std::move(out), { x }, [heads, w](Node<S> &n) {
    if (!wants(n, 0))
      return;
    Matrix<S> &g = grad_of(n, 0);
    for (int h = 0; h < heads; ++h)
      g.middleCols(h * w, w).colwise() += n.grad.col(h);
  });
}

template <class S>
Tensor<S> head_expand(const Tensor<S> &x, int width) {
  const Eigen::Index heads = x.cols();
  Matrix<S> out(x.rows(), heads * width);
  for (Eigen::Index h = 0; h < heads; ++h)
    out.middleCols(h * width, width).colwise() = x.value().col(h);
  return Tensor<S>::make(std::move(out), { x }, [heads, width](Node<S> &n) {
    if (!wants(n, 0))
      return;
    Matrix<S> &g = grad_of(n, 0);
    for (Eigen::Index h = 0; h < heads; ++h)
      g.col(h) += n.grad.middleCols(h * width, width).rowwise().sum();
  });
}

template <class S>
Tensor<S> self_attention(const Tensor<S> &qkv, int batch, int len, int heads,
                         bool causal, std::span<const int> key_lengths) {
  if (qkv.rows() != static_cast<Eigen::Index>(batch) * len
      || qkv.cols() % (3 * heads) != 0)
    shape_error("self_attention", qkv.rows(), qkv.cols(), batch * len, heads);
  if (!key_lengths.empty()
      && static_cast<int>(key_lengths.size()) != batch)
    throw Error(ErrorCode::kShapeMismatch, "self_attention key_lengths");
  const Eigen::Index d = qkv.cols() / 3;
  const Eigen::Index dh = d / heads;
  auto probs = attention_probs<S>(qkv.value(), batch, len, heads, causal,
                                  key_lengths);
  Matrix<S> out(qkv.rows(), d);
  for (int b = 0; b < batch; ++b)
    for (int h = 0; h < heads; ++h)
      out.block(b * len, h * dh, len, dh).noalias()
          = probs[b * heads + h] * qkv.value().block(b * len, 2 * d + h * dh, len, dh);
  const S scale = S(1) / std::sqrt(static_cast<S>(dh));
  return Tensor<S>::make(
      std::move(out), { qkv },
      [probs = std::move(probs), batch, len, heads, d, dh, scale](Node<S> &n) {
        if (!wants(n, 0))
          return;
        const Matrix<S> &x = value_of(n, 0);
        Matrix<S> &g = grad_of(n, 0);
        Matrix<S> dp, ds;
        for (int b = 0; b < batch; ++b) {
          for (int h = 0; h < heads; ++h) {
            const Matrix<S> &p = probs[b * heads + h];
            auto q = x.block(b * len, h * dh, len, dh);
            auto k = x.block(b * len, d + h * dh, len, dh);
            auto v = x.block(b * len, 2 * d + h * dh, len, dh);
            auto dout = n.grad.block(b * len, h * dh, len, dh);
            dp.noalias() = dout * v.transpose();
            g.block(b * len, 2 * d + h * dh, len, dh).noalias()
                += p.transpose() * dout;
            auto row_dot = dp.cwiseProduct(p).rowwise().sum();
            ds = p.cwiseProduct(dp);
            ds -= (p.array().colwise() * row_dot.array()).matrix();
            ds *= scale;
            g.block(b * len, h * dh, len, dh).noalias() += ds * k;
            g.block(b * len, d + h * dh, len, dh).noalias() += ds.transpose() * q;
          }
        }
      });
}

template <class S>
std::vector<Matrix<S>> attention_weights(const Tensor<S> &qkv, int batch,
                                         int len, int heads, bool causal,
                                         std::span<const int> key_lengths) {
  return attention_probs<S>(qkv.value(), batch, len, heads, causal, key_lengths);
}

#define CARDIOGEN_INSTANTIATE_OPS(S)                                           \
  template void require_finite<S>(const Matrix<S> &, const char *);           \
  template Tensor<S> matmul(const Tensor<S> &, const Tensor<S> &);             \
  template Tensor<S> add(const Tensor<S> &, const Tensor<S> &);                \
  template Tensor<S> sub(const Tensor<S> &, const Tensor<S> &);                \
  template Tensor<S> mul(const Tensor<S> &, const Tensor<S> &);                \
  template Tensor<S> scale(const Tensor<S> &, S);                              \
  template Tensor<S> sum(const Tensor<S> &);                                   \
  template Tensor<S> mean(const Tensor<S> &);                                  \
  template Tensor<S> concat_cols(const std::vector<Tensor<S>> &);              \
  template Tensor<S> concat_rows(const std::vector<Tensor<S>> &);              \
  template Tensor<S> embedding(const Tensor<S> &, std::span<const int>, int);  \
  template Tensor<S> gather_rows(const Tensor<S> &, std::span<const int>);     \
  template Tensor<S> scatter_add_rows(const Tensor<S> &, std::span<const int>, \
                                      int);                                    \
  template Tensor<S> repeat_rows(const Tensor<S> &, int);                      \
  template Tensor<S> relu(const Tensor<S> &);                                  \
  template Tensor<S> leaky_relu(const Tensor<S> &, S);                         \
  template Tensor<S> gelu(const Tensor<S> &);                                  \
  template Tensor<S> sigmoid(const Tensor<S> &);                               \
  template Tensor<S> softmax_rows(const Tensor<S> &);                          \
  template Tensor<S> layer_norm(const Tensor<S> &, const Tensor<S> &,          \
                                const Tensor<S> &, S);                         \
  template Tensor<S> batch_norm(const Tensor<S> &, const Tensor<S> &,          \
                                const Tensor<S> &, BatchNormStats<S> &, bool,  \
                                S, S);                                         \
  template Tensor<S> dropout(const Tensor<S> &, double, bool, CounterRng &);   \
  template Tensor<S> cross_entropy(const Tensor<S> &, std::span<const int>);   \
  template Tensor<S> mse(const Tensor<S> &, const Matrix<S> &);                \
  template Tensor<S> bce_with_logits(const Tensor<S> &, const Matrix<S> &);    \
  template Tensor<S> l1_penalty(const std::vector<Tensor<S>> &);               \
  template Tensor<S> segment_softmax(const Tensor<S> &, std::span<const int>,  \
                                     int);                                     \
  template Tensor<S> head_sum(const Tensor<S> &, int);                         \
  template Tensor<S> head_expand(const Tensor<S> &, int);                      \
  template Tensor<S> self_attention(const Tensor<S> &, int, int, int, bool,    \
                                    std::span<const int>);                     \
  template std::vector<Matrix<S>> attention_weights(                           \
      const Tensor<S> &, int, int, int, bool, std::span<const int>);

CARDIOGEN_INSTANTIATE_OPS(float)
CARDIOGEN_INSTANTIATE_OPS(double)

}  // namespace cardiogen::tensor
