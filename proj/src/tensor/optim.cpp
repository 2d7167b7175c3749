//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#include "cardiogen/tensor/optim.h"

#include <cmath>
#include <string>

#include "cardiogen/core/error.h"

namespace cardiogen::tensor {

template <class S>
AdamW<S>::AdamW(std::vector<Tensor<S>> params, AdamWConfig config)
    : params_(std::move(params)), config_(config) {
  for (const auto &p: params_) {
    m_.push_back(Matrix<S>::Zero(p.rows(), p.cols()));
    v_.push_back(Matrix<S>::Zero(p.rows(), p.cols()));
  }
}

template <class S>
void AdamW<S>::step() {
  ++step_;
  const S lr = static_cast<S>(config_.lr);
  const S b1 = static_cast<S>(config_.beta1);
  const S b2 = static_cast<S>(config_.beta2);
  const S c1 = static_cast<S>(1 - std::pow(config_.beta1, step_));
  const S c2 = static_cast<S>(1 - std::pow(config_.beta2, step_));
  const S eps = static_cast<S>(config_.eps);
  const S decay = static_cast<S>(1 - config_.lr * config_.weight_decay);
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Tensor<S> p = params_[i];
    if (p.value().rows() != m_[i].rows() || p.value().cols() != m_[i].cols())
      throw Error(ErrorCode::kShapeMismatch, "AdamW parameter reshaped");
    p.value() *= decay;
    if (!p.has_grad())
      continue;
    const Matrix<S> &g = p.grad();
    m_[i] = b1 * m_[i] + (S(1) - b1) * g;
    v_[i] = b2 * v_[i] + (S(1) - b2) * g.cwiseAbs2();
    p.value().array()
        -= lr * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + eps);
  }
}

template <class S>
void AdamW<S>::zero_grad() {
  for (auto &p: params_)
    p.zero_grad();
}

template <class S>
Sophia<S>::Sophia(std::vector<Tensor<S>> params, SophiaConfig config)
    : params_(std::move(params)), config_(config) {
  if (config_.hessian_interval < 1)
    throw Error(ErrorCode::kInvalidArgument, "hessian_interval must be >= 1");
  for (const auto &p: params_) {
    m_.push_back(Matrix<S>::Zero(p.rows(), p.cols()));
    h_.push_back(Matrix<S>::Zero(p.rows(), p.cols()));
  }
}

template <class S>
void Sophia<S>::step(const HessianHook &hook) {
  const S b1 = static_cast<S>(config_.beta1);
  for (std::size_t i = 0; i < params_.size(); ++i)
    if (params_[i].has_grad())
      m_[i] = b1 * m_[i] + (S(1) - b1) * params_[i].grad();
    else
      m_[i] *= b1;

  if (hook && step_ % config_.hessian_interval == 0) {
    std::vector<Matrix<S>> est = hook();
    if (est.size() != params_.size())
      throw Error(ErrorCode::kShapeMismatch, "Hessian estimate count");
    const S b2 = static_cast<S>(config_.beta2);
    for (std::size_t i = 0; i < est.size(); ++i) {
      if (est[i].rows() != h_[i].rows() || est[i].cols() != h_[i].cols())
        throw Error(ErrorCode::kShapeMismatch, "Hessian estimate shape");
      if ((est[i].array() < S(0)).any())
        throw Error(ErrorCode::kNegativeHessianEstimate,
                    "parameter " + std::to_string(i));
      h_[i] = b2 * h_[i] + (S(1) - b2) * est[i];
    }
  }
  ++step_;

  const S lr = static_cast<S>(config_.lr);
  const S gamma = static_cast<S>(config_.gamma);
  const S eps = static_cast<S>(config_.eps);
  const S rho = static_cast<S>(config_.rho);
  const S decay = static_cast<S>(1 - config_.lr * config_.weight_decay);
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Tensor<S> p = params_[i];
    p.value() *= decay;
    auto denom = (gamma * h_[i].array()).max(eps);
    p.value().array() -= lr * (m_[i].array() / denom).min(rho).max(-rho);
  }
}

template <class S>
void Sophia<S>::zero_grad() {
  for (auto &p: params_)
    p.zero_grad();
}

template <class S>
double clip_grad_norm(const std::vector<Tensor<S>> &params, double max_norm) {
  double sq = 0;
  for (const auto &p: params)
    if (p.has_grad())
      sq += p.grad().template cast<double>().squaredNorm();
  const double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0) {
    const S factor = static_cast<S>(max_norm / norm);
    for (auto p: params)
      if (p.has_grad())
        p.grad() *= factor;
  }
  return norm;
}

double PlateauScheduler::step(double epoch_loss, double lr) {
  if (!best_ || epoch_loss < *best_) {
    best_ = epoch_loss;
    since_ = 0;
    return lr;
  }
  if (++since_ >= patience_) {
    since_ = 0;
    return lr * factor_;
  }
  return lr;
}

template class AdamW<float>;
template class AdamW<double>;
template class Sophia<float>;
template class Sophia<double>;
template double clip_grad_norm(const std::vector<Tensor<float>> &, double);
template double clip_grad_norm(const std::vector<Tensor<double>> &, double);

}  // namespace cardiogen::tensor
