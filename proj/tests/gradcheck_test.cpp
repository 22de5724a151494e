// tests/gradcheck_test.cpp

// Copyright 2026  case-diar authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "casediar/gradcheck.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "casediar/graph.hpp"

namespace nd = casediar::ndiff;
using casediar::Tensor2;

TEST(FiniteDiffCheck, RejectsEpsilonOutsideRange) {
  nd::ParamStore ps(1);
  ps.add("w", 1, 1);
  auto loss = [&]() { return nd::sum_sq(ps.use("w")); };
  EXPECT_THROW(nd::finite_diff_check(ps, loss, 1e-8), std::invalid_argument);
  EXPECT_THROW(nd::finite_diff_check(ps, loss, 1e-2), std::invalid_argument);
}

TEST(FiniteDiffCheck, LinearModelQuadraticLossIsExact) {
  nd::ParamStore ps(2);
  ps.add("W", 3, 2);
  ps.add("b", 1, 2);
  const Tensor2 x = Tensor2::from_rows({{0.3, -0.7, 1.1}, {0.9, 0.2, -0.4}});
  const Tensor2 target = Tensor2::from_rows({{1.0, 0.0}, {0.0, 1.0}});
  auto loss = [&]() {
    nd::Var out = nd::affine(nd::constant(x), ps.use("W"), ps.use("b"));
    return nd::sum_sq(nd::sub(out, nd::constant(target)));
  };
  const auto res = nd::finite_diff_check(ps, loss, 1e-4);
  // central differences are exact for quadratics up to rounding
  EXPECT_LT(res.max_rel_err, 1e-8) << res.worst_param;
}

TEST(FiniteDiffCheck, ReportsWorstEntry) {
  nd::ParamStore ps(4);
  ps.add("a", 1, 2);
  ps.add("z", 1, 1);
  auto loss = [&]() {
    return nd::add(nd::sum_sq(ps.use("a")), nd::sum_sq(ps.use("z")));
  };
  const auto res = nd::finite_diff_check(ps, loss, 1e-5);
  EXPECT_LT(res.max_rel_err, 1e-8);
  EXPECT_FALSE(res.worst_param.empty());
}

/// A deliberately x2-corrupted analytic gradient must surface as ~0.5
/// relative error against honest central differences.
TEST(FiniteDiffCheck, CorruptionShowsHalfRelativeError) {
  nd::ParamStore ps(5);
  ps.add("w", 2, 3);
  auto loss = [&]() { return nd::sum_sq(ps.use("w")); };
  ps.zero_grads();
  nd::backward(loss());
  const Tensor2 honest = ps.grad("w");
  double worst = 0.0;
  const double eps = 1e-5;
  for (std::size_t i = 0; i < honest.data.size(); ++i) {
    Tensor2& w = ps.value("w");
    const double saved = w.data[i];
    w.data[i] = saved + eps;
    const double fp = nd::scalar(loss());
    w.data[i] = saved - eps;
    const double fm = nd::scalar(loss());
    w.data[i] = saved;
    const double numeric = (fp - fm) / (2 * eps);
    const double corrupted = 2.0 * honest.data[i];
    const double denom = std::max(std::abs(numeric), std::abs(corrupted));
    if (denom < 1e-7) continue;
    worst = std::max(worst, std::abs(numeric - corrupted) / denom);
  }
  EXPECT_NEAR(worst, 0.5, 1e-6);
}

TEST(FiniteDiffCheck, NonlinearCompositeWithinTolerance) {
  nd::ParamStore ps(11);
  ps.add("W1", 4, 3);
  ps.add("b1", 1, 3);
  ps.add("W2", 3, 2);
  ps.add("b2", 1, 2);
  const Tensor2 x = Tensor2::from_rows(
      {{0.2, -0.4, 0.6, 0.8}, {-0.1, 0.5, -0.9, 0.3}, {0.7, 0.7, -0.2, -0.6}});
  auto loss = [&]() {
    nd::Var h = nd::tanh(nd::affine(nd::constant(x), ps.use("W1"), ps.use("b1")));
    nd::Var out = nd::affine(h, ps.use("W2"), ps.use("b2"));
    return nd::softmax_cross_entropy(out, {0, 1, 0});
  };
  const auto res = nd::finite_diff_check(ps, loss, 1e-5);
  EXPECT_LT(res.max_rel_err, 1e-6) << res.worst_param;
}
