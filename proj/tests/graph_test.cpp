// tests/graph_test.cpp

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

#include "casediar/graph.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <random>

#include "casediar/gradcheck.hpp"
#include "casediar/params.hpp"

namespace nd = casediar::ndiff;
using casediar::Tensor2;
using nd::Var;

namespace {

Tensor2 random_tensor(std::size_t r, std::size_t c, std::mt19937_64& rng, double margin = 0.0) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Tensor2 t(r, c);
  for (double& v : t.data) {
    do {
      v = dist(rng);
    } while (margin > 0.0 && std::abs(v) < margin);
  }
  return t;
}

}  // namespace

TEST(Affine, IdentityCase) {
  Var x = nd::constant(Tensor2::from_rows({{1.0, 2.0}}));
  Var w = nd::constant(Tensor2::from_rows({{1.0, 0.0}, {0.0, 1.0}}));
  Var b = nd::constant(Tensor2::from_rows({{0.0, 0.0}}));
  Var out = nd::affine(x, w, b);
  EXPECT_DOUBLE_EQ(out->value.at(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(out->value.at(0, 1), 2.0);
}

TEST(Affine, HandArithmetic) {
  Var x = nd::constant(Tensor2::from_rows({{1.0, 1.0}}));
  Var w = nd::constant(Tensor2::from_rows({{2.0, 0.0}, {0.0, 3.0}}));
  Var b = nd::constant(Tensor2::from_rows({{1.0, 1.0}}));
  Var out = nd::affine(x, w, b);
  EXPECT_DOUBLE_EQ(out->value.at(0, 0), 3.0);
  EXPECT_DOUBLE_EQ(out->value.at(0, 1), 4.0);
}

TEST(Affine, RejectsDimensionMismatchWithShapes) {
  Var x = nd::constant(Tensor2(1, 3));
  Var w = nd::constant(Tensor2(4, 2));
  Var b = nd::constant(Tensor2(1, 2));
  try {
    nd::affine(x, w, b);
    FAIL() << "expected dimension error";
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("1x3"), std::string::npos);
    EXPECT_NE(msg.find("4x2"), std::string::npos);
  }
}

TEST(Affine, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(7);
  const Tensor2 x = random_tensor(3, 4, rng);
  nd::ParamStore ps(11);
  ps.add("W", 4, 2);
  ps.add("b", 1, 2);
  const Tensor2 weights = random_tensor(3, 2, rng);
  auto loss = [&]() {
    Var out = nd::affine(nd::constant(x), ps.use("W"), ps.use("b"));
    return nd::sum_sq(nd::hadamard(out, nd::constant(weights)));
  };
  const auto res = nd::finite_diff_check(ps, loss, 1e-5);
  EXPECT_LT(res.max_rel_err, 1e-6) << res.worst_param;
}

TEST(Relu, Examples) {
  Var x = nd::leaf(Tensor2::from_rows({{-1.0, 2.0}}));
  Var out = nd::relu(x);
  EXPECT_DOUBLE_EQ(out->value.at(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(out->value.at(0, 1), 2.0);
}

TEST(Relu, ZeroInputHasZeroGradient) {
  Var x = nd::leaf(Tensor2::from_rows({{0.0, 0.0}}));
  Var loss = nd::sum_sq(nd::relu(x));
  nd::backward(loss);
  EXPECT_DOUBLE_EQ(x->grad.at(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(x->grad.at(0, 1), 0.0);
}

TEST(Relu, GradientCheckAwayFromKink) {
  std::mt19937_64 rng(3);
  nd::ParamStore ps(5);
  ps.add("w", 2, 3);
  ps.value("w") = random_tensor(2, 3, rng, 1e-3);  // keep entries off the kink
  auto loss = [&]() { return nd::sum_sq(nd::relu(ps.use("w"))); };
  const auto res = nd::finite_diff_check(ps, loss, 1e-5);
  EXPECT_LT(res.max_rel_err, 1e-7);
}

TEST(Hadamard, Examples) {
  Var a = nd::constant(Tensor2::from_rows({{1.0, 2.0}}));
  Var b = nd::constant(Tensor2::from_rows({{3.0, 4.0}}));
  Var out = nd::hadamard(a, b);
  EXPECT_DOUBLE_EQ(out->value.at(0, 0), 3.0);
  EXPECT_DOUBLE_EQ(out->value.at(0, 1), 8.0);

  Var ones = nd::constant(Tensor2::filled(1, 2, 1.0));
  Var same = nd::hadamard(a, ones);
  EXPECT_EQ(same->value.data, a->value.data);

  Var bad = nd::constant(Tensor2(2, 2));
  EXPECT_THROW(nd::hadamard(a, bad), std::invalid_argument);
}

TEST(Hadamard, GradientCheck) {
  std::mt19937_64 rng(17);
  nd::ParamStore ps(9);
  ps.add("a", 2, 3);
  ps.add("b", 2, 3);
  const Tensor2 mix = random_tensor(2, 3, rng);
  auto loss = [&]() {
    return nd::sum_sq(nd::hadamard(nd::hadamard(ps.use("a"), ps.use("b")),
                                   nd::constant(mix)));
  };
  const auto res = nd::finite_diff_check(ps, loss, 1e-5);
  EXPECT_LT(res.max_rel_err, 1e-6);
}

TEST(SoftmaxCrossEntropy, UniformCaseIsLn2) {
  Var logits = nd::constant(Tensor2::from_rows({{0.0, 0.0}}));
  Var loss = nd::softmax_cross_entropy(logits, {0});
  EXPECT_NEAR(nd::scalar(loss), std::log(2.0), 1e-12);
}

TEST(SoftmaxCrossEntropy, AnalyticSkewedCase) {
  // -log(e^10 / (e^10 + 1)) = log(1 + e^-10)
  Var logits = nd::constant(Tensor2::from_rows({{10.0, 0.0}}));
  Var loss = nd::softmax_cross_entropy(logits, {0});
  EXPECT_NEAR(nd::scalar(loss), std::log1p(std::exp(-10.0)), 1e-12);
  EXPECT_NEAR(nd::scalar(loss), 4.5398e-5, 1e-8);
}

TEST(SoftmaxCrossEntropy, RejectsOutOfRangeTarget) {
  Var logits = nd::constant(Tensor2::from_rows({{0.0, 0.0}}));
  EXPECT_THROW(nd::softmax_cross_entropy(logits, {2}), std::invalid_argument);
}

TEST(SoftmaxCrossEntropy, GradientCheck) {
  std::mt19937_64 rng(23);
  nd::ParamStore ps(29);
  ps.add("logits", 3, 4);
  auto loss = [&]() { return nd::softmax_cross_entropy(ps.use("logits"), {1, 3, 0}); };
  const auto res = nd::finite_diff_check(ps, loss, 1e-5);
  EXPECT_LT(res.max_rel_err, 1e-7);
}

TEST(AngularSoftmax, GeometryForcedLogits) {
  // embedding aligned with class 0, orthogonal to class 1, s = 10
  nd::LossConfig cfg;
  cfg.scale = 10.0;
  Var e = nd::constant(Tensor2::from_rows({{2.0, 0.0}}));  // norm irrelevant
  Var w = nd::constant(Tensor2::from_rows({{0.5, 0.0}, {0.0, 3.0}}));
  Var logits = nd::angular_softmax_logits(e, w, cfg);
  EXPECT_NEAR(logits->value.at(0, 0), 10.0, 1e-12);
  EXPECT_NEAR(logits->value.at(0, 1), 0.0, 1e-12);
}

TEST(AngularSoftmax, IdenticalWeightsGiveUniformLossLnK) {
  nd::LossConfig cfg;
  Var e = nd::constant(Tensor2::from_rows({{1.0, 2.0, 3.0}}));
  Var w = nd::constant(Tensor2::from_rows(
      {{1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}}));
  Var loss = nd::softmax_cross_entropy(nd::angular_softmax_logits(e, w, cfg), {2});
  EXPECT_NEAR(nd::scalar(loss), std::log(4.0), 1e-12);
}

TEST(AngularSoftmax, RejectsZeroNormEmbedding) {
  nd::LossConfig cfg;
  Var e = nd::constant(Tensor2(1, 3));
  Var w = nd::constant(Tensor2::filled(2, 3, 1.0));
  EXPECT_THROW(nd::angular_softmax_logits(e, w, cfg), std::invalid_argument);
}

TEST(AngularSoftmax, GradientThroughNormalization) {
  std::mt19937_64 rng(31);
  nd::ParamStore ps(37);
  ps.add("e", 3, 5);
  ps.add("w", 4, 5);
  nd::LossConfig cfg;
  auto loss = [&]() {
    return nd::softmax_cross_entropy(
        nd::angular_softmax_logits(ps.use("e"), ps.use("w"), cfg), {0, 3, 1});
  };
  const auto res = nd::finite_diff_check(ps, loss, 1e-5);
  EXPECT_LT(res.max_rel_err, 1e-6) << res.worst_param;
}

TEST(AngularSoftmax, InvariantToPositiveRescaling) {
  nd::LossConfig cfg;
  std::mt19937_64 rng(41);
  const Tensor2 e = random_tensor(2, 4, rng, 1e-2);
  const Tensor2 w = random_tensor(3, 4, rng, 1e-2);
  const Tensor2 base =
      nd::angular_softmax_logits(nd::constant(e), nd::constant(w), cfg)->value;

  Tensor2 e_scaled = e;
  for (std::size_t c = 0; c < e.cols; ++c) e_scaled.at(0, c) *= 7.5;  // one embedding row
  Tensor2 w_scaled = w;
  for (std::size_t c = 0; c < w.cols; ++c) w_scaled.at(2, c) *= 0.03;  // one class row
  const Tensor2 scaled =
      nd::angular_softmax_logits(nd::constant(e_scaled), nd::constant(w_scaled), cfg)->value;
  for (std::size_t i = 0; i < base.data.size(); ++i) {
    EXPECT_NEAR(base.data[i], scaled.data[i], 1e-12);
  }
}

TEST(GradientReverse, ForwardIsIdentity) {
  Var x = nd::leaf(Tensor2::from_rows({{1.0, 2.0}}));
  Var out = nd::gradient_reverse(x, 1.0);
  EXPECT_EQ(out->value.data, x->value.data);
}

TEST(GradientReverse, FlipsUpstreamSign) {
  // loss = sum(grl(x) * c) so dL/dx would be c without the reversal
  Var x = nd::leaf(Tensor2::from_rows({{1.0, 1.0}}));
  Var c = nd::constant(Tensor2::from_rows({{0.5, -2.0}}));
  Var loss = nd::sum_all(nd::hadamard(nd::gradient_reverse(x, 1.0), c));
  nd::backward(loss);
  EXPECT_DOUBLE_EQ(x->grad.at(0, 0), -0.5);
  EXPECT_DOUBLE_EQ(x->grad.at(0, 1), 2.0);
}

TEST(GradientReverse, LambdaZeroKillsGradient) {
  Var x = nd::leaf(Tensor2::from_rows({{1.0, 1.0}}));
  Var loss = nd::sum_sq(nd::gradient_reverse(x, 0.0));
  nd::backward(loss);
  EXPECT_DOUBLE_EQ(x->grad.at(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(x->grad.at(0, 1), 0.0);
}

TEST(Optimizer, ZeroGradientLeavesParametersUnchanged) {
  nd::ParamStore ps(1);
  ps.add("w", 2, 2);
  const Tensor2 before = ps.value("w");
  nd::AdamState adam;
  nd::optimizer_step(ps, adam, 0.1);
  EXPECT_EQ(ps.value("w").data, before.data);
}

TEST(Optimizer, FirstStepWithUnitGradientMovesByLearningRate) {
  nd::ParamStore ps(1);
  ps.add("w", 1, 1, nd::Init::kZeros);
  ps.value("w").at(0, 0) = 5.0;
  ps.grad("w").at(0, 0) = 1.0;
  nd::AdamState adam;
  nd::optimizer_step(ps, adam, 0.1);
  EXPECT_NEAR(ps.value("w").at(0, 0), 4.9, 1e-7);
}

TEST(Optimizer, RejectsNonFiniteGradientNamingParameter) {
  nd::ParamStore ps(1);
  ps.add("w.bad", 1, 1);
  ps.grad("w.bad").at(0, 0) = std::nan("");
  nd::AdamState adam;
  try {
    nd::optimizer_step(ps, adam, 0.1);
    FAIL() << "expected rejection";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("w.bad"), std::string::npos);
  }
}

TEST(Optimizer, DeterministicAcrossRuns) {
  auto run = []() {
    nd::ParamStore ps(99);
    ps.add("w", 3, 3);
    nd::AdamState adam;
    for (int step = 0; step < 5; ++step) {
      ps.zero_grads();
      auto loss = nd::sum_sq(ps.use("w"));
      nd::backward(loss);
      nd::optimizer_step(ps, adam, 1e-2);
    }
    return ps.value("w").data;
  };
  EXPECT_EQ(run(), run());
}

TEST(ParamStore, InitializationIsSeededGlorot) {
  nd::ParamStore a(42), b(42), c(43);
  a.add("w", 8, 8);
  b.add("w", 8, 8);
  c.add("w", 8, 8);
  EXPECT_EQ(a.value("w").data, b.value("w").data);
  EXPECT_NE(a.value("w").data, c.value("w").data);
  const double limit = std::sqrt(6.0 / 16.0);
  for (double v : a.value("w").data) {
    EXPECT_LE(std::abs(v), limit);
  }
}

TEST(Checkpoint, RoundTripIsBitExact) {
  nd::ParamStore ps(123);
  ps.add("layer.W", 3, 4);
  ps.add("layer.b", 1, 4);
  ps.value("layer.b").at(0, 2) = 1.0 / 3.0;
  ps.meta["system"] = "baseline test";
  const std::string path = testing::TempDir() + "/ckpt_roundtrip.ckpt";
  nd::save_checkpoint(ps, path);
  const nd::ParamStore loaded = nd::load_checkpoint(path);
  EXPECT_EQ(loaded.seed(), 123u);
  EXPECT_EQ(loaded.value("layer.W").data, ps.value("layer.W").data);
  EXPECT_EQ(loaded.value("layer.b").data, ps.value("layer.b").data);
  EXPECT_EQ(loaded.meta.at("system"), "baseline test");
}

TEST(Forward, PurityBitwise) {
  std::mt19937_64 rng(55);
  const Tensor2 x = random_tensor(4, 6, rng);
  nd::ParamStore ps(7);
  ps.add("W", 6, 3);
  ps.add("b", 1, 3);
  auto forward = [&]() {
    return nd::relu(nd::affine(nd::constant(x), ps.frozen("W"), ps.frozen("b")))->value.data;
  };
  EXPECT_EQ(forward(), forward());
}
