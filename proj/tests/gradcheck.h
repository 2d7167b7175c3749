//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CARDIOGEN_TESTS_GRADCHECK_H_
#define CARDIOGEN_TESTS_GRADCHECK_H_

#include <algorithm>
#include <functional>
#include <vector>

#include "cardiogen/core/random.h"
#include "cardiogen/tensor/nn.h"
#include "cardiogen/tensor/ops.h"

namespace cardiogen::test {

using DTensor = tensor::Tensor<double>;
using DMatrix = tensor::Matrix<double>;
using TensorFn = std::function<DTensor(const std::vector<DTensor> &)>;

inline DMatrix random_matrix(Eigen::Index r, Eigen::Index c, CounterRng &rng,
                             double lo = -1, double hi = 1) {
  DMatrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i)
    m.data()[i] = rng.uniform(lo, hi);
  return m;
}

// Values bounded away from 0 so kinks (relu, |x|) are not straddled.
inline DMatrix away_from_zero(Eigen::Index r, Eigen::Index c, CounterRng &rng) {
  DMatrix m = random_matrix(r, c, rng, 0.05, 1.0);
  for (Eigen::Index i = 0; i < m.size(); ++i)
    if (rng.bernoulli(0.5))
      m.data()[i] = -m.data()[i];
  return m;
}

// Worst relative error ||analytic - numeric|| / max(||analytic||, ||numeric||)
// over all inputs, using central differences with step h on a random linear
// projection of the output.
inline double gradcheck(std::vector<DTensor> inputs, const TensorFn &f,
                        double h = 1e-5, std::uint64_t seed = 99) {
  for (auto &t: inputs) {
    t.set_requires_grad(true);
    t.zero_grad();
  }
  DTensor out = f(inputs);
  CounterRng rng(seed);
  const DMatrix proj = random_matrix(out.rows(), out.cols(), rng);
  tensor::sum(tensor::mul(out, DTensor(proj))).backward();

  auto objective = [&]() {
    tensor::NoGradGuard guard;
    return f(inputs).value().cwiseProduct(proj).sum();
  };
  double worst = 0;
  for (auto &t: inputs) {
    DMatrix analytic = t.has_grad() ? DMatrix(t.grad())
                                    : DMatrix::Zero(t.rows(), t.cols());
    DMatrix numeric(t.rows(), t.cols());
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      double &v = t.value().data()[i];
      const double orig = v;
      v = orig + h;
      const double fp = objective();
      v = orig - h;
      const double fm = objective();
      v = orig;
      numeric.data()[i] = (fp - fm) / (2 * h);
    }
    const double scale
        = std::max({ analytic.norm(), numeric.norm(), 1e-12 });
    worst = std::max(worst, (analytic - numeric).norm() / scale);
  }
  return worst;
}

}  // namespace cardiogen::test

#endif  // CARDIOGEN_TESTS_GRADCHECK_H_
