//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CARDIOGEN_TENSOR_OPTIM_H_
#define CARDIOGEN_TENSOR_OPTIM_H_

#include <functional>
#include <optional>
#include <vector>

#include "cardiogen/tensor/tensor.h"

namespace cardiogen::tensor {

struct AdamWConfig {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 1e-4;
};

/// Decoupled weight decay followed by a bias-corrected Adam step.
template <class S>
class AdamW {
public:
  AdamW(std::vector<Tensor<S>> params, AdamWConfig config);

  /// Reads each parameter's accumulated gradient; parameters that never
  /// received one are treated as having a zero gradient.
  void step();
  void zero_grad();

  double lr() const noexcept { return config_.lr; }
  void set_lr(double lr) noexcept { config_.lr = lr; }
  long step_count() const noexcept { return step_; }
  const AdamWConfig &config() const noexcept { return config_; }
  const std::vector<Tensor<S>> &params() const noexcept { return params_; }

private:
  std::vector<Tensor<S>> params_;
  AdamWConfig config_;
  long step_ = 0;
  std::vector<Matrix<S>> m_;
  std::vector<Matrix<S>> v_;
};

struct SophiaConfig {
  double lr = 3e-4;
  double beta1 = 0.96;
  double beta2 = 0.99;
  double rho = 1.0;
  double gamma = 0.05;
  double eps = 1e-12;
  double weight_decay = 0.1;
  int hessian_interval = 10;
};

/// Clipped second-order step: u = clip(m / max(gamma * h, eps), +-rho).
template <class S>
class Sophia {
public:
  /// Returns a diagonal curvature estimate per parameter, same shapes.
  using HessianHook = std::function<std::vector<Matrix<S>>()>;

  Sophia(std::vector<Tensor<S>> params, SophiaConfig config);

  /// Every hessian_interval steps (starting with the first) the hook is
  /// called and folded into the running estimate. Throws
  /// NegativeHessianEstimate on any negative entry.
  void step(const HessianHook &hook);
  void zero_grad();

  double lr() const noexcept { return config_.lr; }
  void set_lr(double lr) noexcept { config_.lr = lr; }
  long step_count() const noexcept { return step_; }
  const std::vector<Matrix<S>> &hessian() const noexcept { return h_; }
  const std::vector<Matrix<S>> &momentum() const noexcept { return m_; }
  const SophiaConfig &config() const noexcept { return config_; }

private:
  std::vector<Tensor<S>> params_;
  SophiaConfig config_;
  long step_ = 0;
  std::vector<Matrix<S>> m_;
  std::vector<Matrix<S>> h_;
};

/// Scales all gradients by max_norm / g when their global L2 norm g exceeds
/// max_norm. Returns g.
template <class S>
double clip_grad_norm(const std::vector<Tensor<S>> &params, double max_norm);

/// Halves the learning rate after `patience` consecutive epochs without a
/// strict improvement over the best loss.
class PlateauScheduler {
public:
  explicit PlateauScheduler(int patience = 10, double factor = 0.5)
      : patience_(patience), factor_(factor) { }

  double step(double epoch_loss, double lr);

  std::optional<double> best_loss() const noexcept { return best_; }
  int epochs_since_improvement() const noexcept { return since_; }
  int patience() const noexcept { return patience_; }

private:
  int patience_;
  double factor_;
  std::optional<double> best_;
  int since_ = 0;
};

extern template class AdamW<float>;
extern template class AdamW<double>;
extern template class Sophia<float>;
extern template class Sophia<double>;

}  // namespace cardiogen::tensor

#endif  // CARDIOGEN_TENSOR_OPTIM_H_
