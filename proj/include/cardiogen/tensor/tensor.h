//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CARDIOGEN_TENSOR_TENSOR_H_
#define CARDIOGEN_TENSOR_TENSOR_H_

#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace cardiogen::tensor {

template <class S>
using Matrix = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <class S>
using RowVector = Eigen::Matrix<S, 1, Eigen::Dynamic>;

template <class S>
struct Node {
  Matrix<S> value;
  Matrix<S> grad;  // empty until the first accumulation
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node &)> backward;

  Matrix<S> &grad_ref() {
    if (grad.size() == 0)
      grad.setZero(value.rows(), value.cols());
    return grad;
  }
};

/// Whether newly created op nodes record their inputs. Thread-local.
bool grad_enabled() noexcept;

class NoGradGuard {
public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard &) = delete;
  NoGradGuard &operator=(const NoGradGuard &) = delete;

private:
  bool previous_;
};

/// A dense rank-2 value with an optional reverse-mode gradient. Vectors are
/// 1 x n rows; scalars are 1 x 1. Copies share the underlying node.
template <class S>
class Tensor {
public:
  using Scalar = S;

  Tensor(): node_(std::make_shared<Node<S>>()) { }
  explicit Tensor(Matrix<S> value, bool requires_grad = false)
      : node_(std::make_shared<Node<S>>()) {
    node_->value = std::move(value);
    node_->requires_grad = requires_grad;
  }

  static Tensor parameter(Matrix<S> value) {
    return Tensor(std::move(value), true);
  }
  static Tensor scalar(S v) {
    Matrix<S> m(1, 1);
    m(0, 0) = v;
    return Tensor(std::move(m));
  }

  const Matrix<S> &value() const noexcept { return node_->value; }
  Matrix<S> &value() noexcept { return node_->value; }
  const Matrix<S> &grad() const noexcept { return node_->grad; }
  Matrix<S> &grad() noexcept { return node_->grad_ref(); }
  bool has_grad() const noexcept { return node_->grad.size() != 0; }

  Eigen::Index rows() const noexcept { return node_->value.rows(); }
  Eigen::Index cols() const noexcept { return node_->value.cols(); }
  Eigen::Index size() const noexcept { return node_->value.size(); }
  S item() const { return node_->value(0, 0); }

  bool requires_grad() const noexcept { return node_->requires_grad; }
  void set_requires_grad(bool on) noexcept { node_->requires_grad = on; }
  void zero_grad() { node_->grad.resize(0, 0); }

  /// Seeds d(self)/d(self) = 1 (self must be 1 x 1) and propagates through
  /// the recorded graph in reverse topological order.
  void backward();

  /// Same as backward() with an explicit upstream gradient.
  void backward(const Matrix<S> &seed);

  /// Drops graph edges so intermediate buffers can be freed.
  Tensor detach() const { return Tensor(node_->value); }

  const std::shared_ptr<Node<S>> &node() const noexcept { return node_; }

  /// Builds an op result. When gradient recording is on and any input
  /// requires a gradient, the node keeps the inputs and the closure.
  static Tensor make(Matrix<S> value, std::vector<Tensor> inputs,
                     std::function<void(Node<S> &)> backward);

private:
  std::shared_ptr<Node<S>> node_;
};

extern template class Tensor<float>;
extern template class Tensor<double>;

}  // namespace cardiogen::tensor

#endif  // CARDIOGEN_TENSOR_TENSOR_H_
