//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#include <doctest.h>

#include <cmath>
#include <limits>
#include <map>

#include "cardiogen/core/error.h"
#include "cardiogen/tensor/nn.h"
#include "cardiogen/tensor/optim.h"
#include "primitive_checks.h"

using namespace cardiogen;
using namespace cardiogen::tensor;
using test::DMatrix;
using test::DTensor;

namespace {

DTensor row_of(std::initializer_list<double> v) {
  DMatrix m(1, static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x: v)
    m(0, i++) = x;
  return DTensor(m);
}

}  // namespace

TEST_CASE("primitive values") {
  auto s = softmax_rows(row_of({ 0, 0 }));
  CHECK(s.value()(0, 0) == 0.5);
  CHECK(s.value()(0, 1) == 0.5);
  CHECK(gelu(row_of({ 0 })).item() == 0.0);
  CHECK(relu(row_of({ -1 })).item() == 0.0);
  CHECK(gelu(row_of({ 1 })).item()
        == doctest::Approx(0.5 * (1 + std::erf(1 / std::sqrt(2.0)))));

  DTensor x = DTensor::parameter(DMatrix::Constant(1, 1, 3.0));
  DTensor y = mul(x, x);
  y.backward();
  CHECK(x.grad()(0, 0) == 6.0);
}

TEST_CASE("every primitive passes central-difference checks") {
  std::map<std::string, int> trials;
  for (const auto &c: test::run_primitive_checks(5)) {
    CAPTURE(c.op);
    CAPTURE(c.trial);
    CHECK(c.rel_error < 1e-4);
    trials[c.op] += 1;
  }
  for (const auto &[op, n]: trials)
    CHECK(n >= 5);
  CHECK(trials.size() >= 15);
}

TEST_CASE("softmax rows sum to one and cross entropy is non-negative") {
  CounterRng rng(5);
  DTensor x(test::random_matrix(7, 9, rng, -5, 5));
  auto p = softmax_rows(x).value();
  for (Eigen::Index r = 0; r < p.rows(); ++r)
    CHECK(std::abs(p.row(r).sum() - 1.0) < 1e-9);
  std::vector<int> t { 0, 1, 2, 3, 4, 5, 6 };
  CHECK(cross_entropy<double>(x, t).item() >= 0.0);
  std::vector<int> none(7, -1);
  CHECK(cross_entropy<double>(x, none).item() == 0.0);
}

TEST_CASE("dropout preserves the expectation") {
  CounterRng rng(17);
  DMatrix ones = DMatrix::Ones(1, 100000);
  auto y = dropout(DTensor(ones), 0.1, true, rng).value();
  CHECK(std::abs(y.mean() - 1.0) < 0.02);
  const auto zeros = (y.array() == 0).count();
  CHECK(std::abs(zeros / 1e5 - 0.1) < 0.01);
  auto same = dropout(DTensor(ones), 0.1, false, rng).value();
  CHECK(same == ones);
}

TEST_CASE("batch norm keeps running statistics") {
  BatchNorm<double> bn(2);
  DMatrix x(4, 2);
  x << 1, 10, 2, 20, 3, 30, 4, 40;
  bn(DTensor(x), true);
  CHECK(bn.stats.running_mean(0, 0) == doctest::Approx(0.1 * 2.5));
  CHECK(bn.stats.running_var(0, 0)
        == doctest::Approx(0.9 + 0.1 * (1.25 * 4.0 / 3.0)));
  auto y = bn(DTensor(x.topRows(1)), false).value();
  CHECK(y(0, 0) == doctest::Approx((1 - 0.25) / std::sqrt(bn.stats.running_var(0, 0) + 1e-5)));
  CHECK_THROWS_AS(bn(DTensor(x.topRows(1)), true), Error);
}

TEST_CASE("shape mismatches are reported") {
  DTensor a(DMatrix::Zero(2, 3)), b(DMatrix::Zero(2, 3));
  try {
    matmul(a, b);
    FAIL("no error");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kShapeMismatch);
  }
  DMatrix bad = DMatrix::Zero(1, 2);
  bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
  try {
    std::vector<int> t { 0 };
    cross_entropy<double>(DTensor(bad), t);
    FAIL("no error");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kNonFiniteInput);
  }
}

TEST_CASE("AdamW") {
  {
    DTensor p = DTensor::parameter(DMatrix::Constant(2, 2, 1.5));
    AdamWConfig cfg;
    cfg.weight_decay = 0;
    AdamW<double> opt({ p }, cfg);
    p.grad().setZero();
    opt.step();
    CHECK(p.value() == DMatrix::Constant(2, 2, 1.5));
  }
  {
    DTensor x = DTensor::parameter(DMatrix::Constant(1, 1, 1.0));
    AdamW<double> opt({ x }, AdamWConfig {});
    mul(x, x).backward();
    opt.step();
    CHECK(std::abs(x.item()) < 1.0);
  }
  {
    // f(x) = sum c_i x_i^2, minimum 0 at the origin.
    DMatrix c(1, 5);
    c << 1, 2, 3, 4, 5;
    DTensor x = DTensor::parameter(DMatrix::Constant(1, 5, 1.0));
    AdamWConfig cfg;
    cfg.lr = 0.05;
    cfg.weight_decay = 0;
    AdamW<double> opt({ x }, cfg);
    double loss = 0;
    for (int i = 0; i < 500; ++i) {
      opt.zero_grad();
      DTensor f = sum(mul(mul(x, x), DTensor(c)));
      loss = f.item();
      f.backward();
      opt.step();
    }
    loss = (x.value().array().square() * c.array()).sum();
    CHECK(loss < 1e-6);
  }
}

TEST_CASE("Sophia") {
  {
    DTensor p = DTensor::parameter(DMatrix::Constant(1, 3, 2.0));
    SophiaConfig cfg;
    Sophia<double> opt({ p }, cfg);
    p.grad().setZero();
    opt.step({});
    CHECK(p.value()(0, 0) == doctest::Approx(2.0 * (1 - cfg.lr * cfg.weight_decay)));
  }
  {
    // Update bound: |delta| <= lr * rho beyond weight decay.
    CounterRng rng(1);
    DTensor p = DTensor::parameter(test::random_matrix(3, 3, rng));
    SophiaConfig cfg;
    cfg.weight_decay = 0;
    Sophia<double> opt({ p }, cfg);
    for (int i = 0; i < 20; ++i) {
      DMatrix before = p.value();
      opt.zero_grad();
      p.grad() = test::random_matrix(3, 3, rng, -100, 100);
      opt.step([&] { return std::vector<DMatrix> { test::random_matrix(3, 3, rng, 0, 1e-3) }; });
      CHECK((p.value() - before).cwiseAbs().maxCoeff() <= cfg.lr * cfg.rho + 1e-15);
    }
  }
  {
    DTensor p = DTensor::parameter(DMatrix::Zero(1, 1));
    Sophia<double> opt({ p }, SophiaConfig {});
    p.grad().setZero();
    try {
      opt.step([] { return std::vector<DMatrix> { DMatrix::Constant(1, 1, -1.0) }; });
      FAIL("no error");
    } catch (const Error &e) {
      CHECK(e.code() == ErrorCode::kNegativeHessianEstimate);
    }
  }
}

TEST_CASE("Sophia descends on 1-d logistic regression") {
  // Separable 1-d data, logit = w * x.
  DMatrix xs(8, 1);
  xs << -2, -1.5, -1, -0.5, 0.5, 1, 1.5, 2;
  DMatrix ys = (xs.array() > 0).cast<double>().matrix();
  auto loss_at = [&](double w) {
    double s = 0;
    for (Eigen::Index i = 0; i < xs.rows(); ++i) {
      const double z = w * xs(i, 0);
      s += std::max(z, 0.0) - z * ys(i, 0) + std::log1p(std::exp(-std::abs(z)));
    }
    return s / xs.rows();
  };
  // Brute-force grid: the loss does go below 0.1 for large enough w.
  double grid_min = 1e9;
  for (double w = -10; w <= 10; w += 0.01)
    grid_min = std::min(grid_min, loss_at(w));
  REQUIRE(grid_min < 0.1);

  DTensor w = DTensor::parameter(DMatrix::Zero(1, 1));
  SophiaConfig cfg;
  cfg.lr = 0.05;
  cfg.weight_decay = 0;
  Sophia<double> opt({ w }, cfg);
  CounterRng rng(8);
  DTensor x(xs);
  auto hook = [&] {
    // Gauss-Newton-Bartlett: labels drawn from the model's own prediction.
    DTensor logits = matmul(x, w);
    DMatrix sampled(xs.rows(), 1);
    for (Eigen::Index i = 0; i < xs.rows(); ++i) {
      const double p = 1 / (1 + std::exp(-logits.value()(i, 0)));
      sampled(i, 0) = rng.bernoulli(p) ? 1.0 : 0.0;
    }
    DMatrix saved = w.grad();
    w.zero_grad();
    bce_with_logits(logits, sampled).backward();
    DMatrix est = static_cast<double>(xs.rows()) * w.grad().cwiseAbs2();
    w.grad() = saved;
    return std::vector<DMatrix> { est };
  };
  const double start = loss_at(0);
  for (int i = 0; i < 300; ++i) {
    opt.zero_grad();
    bce_with_logits(matmul(x, w), ys).backward();
    opt.step(hook);
  }
  const double end = loss_at(w.item());
  CHECK(end < start);
  CHECK(end < 0.1);
}

TEST_CASE("gradient clipping") {
  DTensor p = DTensor::parameter(DMatrix::Zero(1, 2));
  p.grad() << 3, 4;
  CHECK(clip_grad_norm<double>({ p }, 5.0) == 5.0);
  CHECK(p.grad()(0, 0) == 3.0);
  CHECK(p.grad()(0, 1) == 4.0);
  clip_grad_norm<double>({ p }, 2.5);
  CHECK(p.grad()(0, 0) == 1.5);
  CHECK(p.grad()(0, 1) == 2.0);
  DTensor q = DTensor::parameter(DMatrix::Zero(1, 2));
  q.grad().setZero();
  CHECK(clip_grad_norm<double>({ q }, 5.0) == 0.0);
  CHECK(q.grad().isZero());
}

TEST_CASE("plateau scheduler") {
  {
    PlateauScheduler s;
    double lr = 1.0;
    for (int e = 0; e < 50; ++e)
      lr = s.step(100.0 - e, lr);
    CHECK(lr == 1.0);
  }
  {
    PlateauScheduler s;
    double lr = 1.0;
    lr = s.step(1.0, lr);
    for (int e = 1; e <= 9; ++e) {
      lr = s.step(1.0, lr);
      CHECK(lr == 1.0);
    }
    lr = s.step(1.0, lr);
    CHECK(lr == 0.5);
  }
  {
    // Counter simulated by hand: a best, then 20 equal epochs -> halvings at
    // the 10th and 20th.
    PlateauScheduler s;
    double lr = 1.0;
    lr = s.step(2.0, lr);
    int halvings = 0;
    for (int e = 0; e < 20; ++e) {
      const double next = s.step(2.0, lr);
      halvings += next < lr ? 1 : 0;
      lr = next;
    }
    CHECK(halvings == 2);
    CHECK(lr == 0.25);
  }
}

TEST_CASE("determinism of a small training run") {
  auto run = [] {
    CounterRng rng(42);
    Linear<float> lin(4, 3, rng);
    AdamW<float> opt({ lin.weight, lin.bias }, AdamWConfig {});
    Matrix<float> x = normal_matrix<float>(8, 4, 1.0, rng);
    std::vector<int> t { 0, 1, 2, 0, 1, 2, 0, 1 };
    for (int i = 0; i < 20; ++i) {
      opt.zero_grad();
      auto h = dropout(lin(Tensor<float>(x)), 0.1, true, rng);
      cross_entropy<float>(h, t).backward();
      opt.step();
    }
    return Matrix<float>(lin.weight.value());
  };
  CHECK(run() == run());
}
