// tests/tensor_test.cpp

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

#include "casediar/tensor.hpp"

#include <gtest/gtest.h>

namespace nd = casediar::ndiff;
using casediar::Tensor2;

TEST(Tensor2, ShapeAndData) {
  Tensor2 t(2, 3);
  EXPECT_EQ(t.rows, 2u);
  EXPECT_EQ(t.cols, 3u);
  EXPECT_EQ(t.data.size(), 6u);
  t.at(1, 2) = 4.5;
  EXPECT_DOUBLE_EQ(t.at(1, 2), 4.5);
  EXPECT_TRUE(t.all_finite());
}

TEST(Tensor2, FromRowsRejectsRagged) {
  EXPECT_THROW(Tensor2::from_rows({{1.0, 2.0}, {3.0}}), std::invalid_argument);
}

TEST(Tensor2, MatmulAgainstHandComputation) {
  const Tensor2 a = Tensor2::from_rows({{1.0, 2.0}, {3.0, 4.0}});
  const Tensor2 b = Tensor2::from_rows({{5.0, 6.0}, {7.0, 8.0}});
  const Tensor2 c = nd::matmul(a, b);
  EXPECT_DOUBLE_EQ(c.at(0, 0), 19.0);
  EXPECT_DOUBLE_EQ(c.at(0, 1), 22.0);
  EXPECT_DOUBLE_EQ(c.at(1, 0), 43.0);
  EXPECT_DOUBLE_EQ(c.at(1, 1), 50.0);
}

TEST(Tensor2, MatmulRejectsMismatchNamingShapes) {
  const Tensor2 a(2, 3);
  const Tensor2 b(2, 3);
  try {
    nd::matmul(a, b);
    FAIL() << "expected a shape error";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("2x3"), std::string::npos);
  }
}

TEST(Tensor2, TransposeRoundTrip) {
  const Tensor2 a = Tensor2::from_rows({{1.0, 2.0, 3.0}, {4.0, 5.0, 6.0}});
  const Tensor2 att = nd::transpose(nd::transpose(a));
  EXPECT_EQ(att.data, a.data);
}

TEST(Tensor2, CanonicalRowOrderIsInputOrderIndependent) {
  const Tensor2 a = Tensor2::from_rows({{2.0, 0.0}, {1.0, 5.0}, {1.0, 3.0}});
  const auto order = nd::canonical_row_order(a);
  ASSERT_EQ(order.size(), 3u);
  EXPECT_EQ(order[0], 2u);  // (1,3)
  EXPECT_EQ(order[1], 1u);  // (1,5)
  EXPECT_EQ(order[2], 0u);  // (2,0)
}
