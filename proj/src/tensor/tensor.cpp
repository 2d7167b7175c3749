//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#include "cardiogen/tensor/tensor.h"

#include <unordered_set>

#include "cardiogen/core/error.h"

namespace cardiogen::tensor {

namespace {

thread_local bool g_grad_enabled = true;

}  // namespace

bool grad_enabled() noexcept {
  return g_grad_enabled;
}

NoGradGuard::NoGradGuard(): previous_(g_grad_enabled) {
  g_grad_enabled = false;
}

NoGradGuard::~NoGradGuard() {
  g_grad_enabled = previous_;
}

template <class S>
Tensor<S> Tensor<S>::make(Matrix<S> value, std::vector<Tensor> inputs,
                          std::function<void(Node<S> &)> backward) {
  Tensor out(std::move(value));
  if (!g_grad_enabled)
    return out;
  bool any = false;
  for (const auto &t: inputs)
    any = any || t.requires_grad();
  if (!any)
    return out;
  out.node_->requires_grad = true;
  out.node_->parents.reserve(inputs.size());
  for (auto &t: inputs)
    out.node_->parents.push_back(t.node_);
  out.node_->backward = std::move(backward);
  return out;
}

template <class S>
void Tensor<S>::backward() {
  if (size() != 1)
    throw Error(ErrorCode::kShapeMismatch,
                "backward() without a seed needs a 1 x 1 tensor");
  Matrix<S> seed(1, 1);
  seed(0, 0) = S(1);
  backward(seed);
}

template <class S>
void Tensor<S>::backward(const Matrix<S> &seed) {
  if (seed.rows() != rows() || seed.cols() != cols())
    throw Error(ErrorCode::kShapeMismatch, "backward seed shape");
  if (!requires_grad())
    return;

  // Iterative post-order DFS gives a topological order without recursion.
  std::vector<Node<S> *> order;
  std::unordered_set<Node<S> *> visited;
  std::vector<std::pair<Node<S> *, std::size_t>> stack;
  stack.emplace_back(node_.get(), 0);
  visited.insert(node_.get());
  while (!stack.empty()) {
    auto &[n, next] = stack.back();
    if (next < n->parents.size()) {
      Node<S> *p = n->parents[next++].get();
      if (p->requires_grad && visited.insert(p).second)
        stack.emplace_back(p, 0);
      continue;
    }
    order.push_back(n);
    stack.pop_back();
  }

  node_->grad_ref() += seed;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node<S> *n = *it;
    if (n->backward && n->grad.size() != 0)
      n->backward(*n);
  }
}

template class Tensor<float>;
template class Tensor<double>;

}  // namespace cardiogen::tensor
