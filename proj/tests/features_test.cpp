// tests/features_test.cpp

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

#include "casediar/features.hpp"

#include <gtest/gtest.h>

#include <random>

namespace feat = casediar::features;
using casediar::Tensor2;

TEST(SpliceContext, SingleFrameReplicatesEdges) {
  const Tensor2 x = Tensor2::from_rows({{1.0, 2.0}});
  const Tensor2 out = feat::splice_context(x, 1, 1);
  ASSERT_EQ(out.rows, 1u);
  ASSERT_EQ(out.cols, 6u);
  const std::vector<double> expect = {1, 2, 1, 2, 1, 2};
  EXPECT_EQ(out.data, expect);
}

TEST(SpliceContext, PaperContextWidth) {
  // 40-d features with [-7, +7] context splice to 600 columns
  Tensor2 x(5, 40);
  const Tensor2 out = feat::splice_context(x, 7, 7);
  EXPECT_EQ(out.cols, 600u);
  EXPECT_EQ(out.rows, 5u);
}

TEST(SpliceContext, LeftOnlyEnumeration) {
  const Tensor2 x = Tensor2::from_rows({{0.0}, {1.0}, {2.0}});
  const Tensor2 out = feat::splice_context(x, 1, 0);
  ASSERT_EQ(out.cols, 2u);
  EXPECT_EQ(out.at(0, 0), 0.0);  // edge replication
  EXPECT_EQ(out.at(0, 1), 0.0);
  EXPECT_EQ(out.at(1, 0), 0.0);
  EXPECT_EQ(out.at(1, 1), 1.0);
  EXPECT_EQ(out.at(2, 0), 1.0);
  EXPECT_EQ(out.at(2, 1), 2.0);
}

TEST(SpliceContext, MiddleColumnsEqualFrame) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> dist(-1, 1);
  Tensor2 x(9, 3);
  for (double& v : x.data) v = dist(rng);
  const Tensor2 out = feat::splice_context(x, 2, 2);
  ASSERT_EQ(out.rows, x.rows);
  for (std::size_t t = 0; t < x.rows; ++t) {
    for (std::size_t c = 0; c < x.cols; ++c) {
      EXPECT_EQ(out.at(t, 2 * x.cols + c), x.at(t, c));
    }
  }
}

TEST(SpliceContext, RejectsEmptyInput) {
  EXPECT_THROW(feat::splice_context(Tensor2(0, 4), 1, 1), std::invalid_argument);
}

TEST(SlideWindows, ExactTilingCase) {
  const auto plan = feat::slide_windows(500, 200, 100);
  std::vector<std::size_t> starts;
  for (const auto& s : plan.spans) starts.push_back(s.start);
  EXPECT_EQ(starts, (std::vector<std::size_t>{0, 100, 200, 300}));
  for (const auto& s : plan.spans) EXPECT_EQ(s.length(), 200u);
}

TEST(SlideWindows, TailAnchoredFinalWindow) {
  const auto plan = feat::slide_windows(450, 200, 100);
  std::vector<std::size_t> starts;
  for (const auto& s : plan.spans) starts.push_back(s.start);
  EXPECT_EQ(starts, (std::vector<std::size_t>{0, 100, 200, 250}));
  EXPECT_EQ(plan.spans.back().end, 450u);
}

TEST(SlideWindows, ShortSegmentGivesOneSpan) {
  const auto plan = feat::slide_windows(150, 200, 100);
  ASSERT_EQ(plan.spans.size(), 1u);
  EXPECT_EQ(plan.spans[0].start, 0u);
  EXPECT_EQ(plan.spans[0].end, 150u);
}

TEST(SlideWindows, RejectsZeroFramesAndBadHop) {
  EXPECT_THROW(feat::slide_windows(0, 200, 100), std::invalid_argument);
  EXPECT_THROW(feat::slide_windows(500, 100, 200), std::invalid_argument);
  EXPECT_THROW(feat::slide_windows(500, 100, 0), std::invalid_argument);
}

TEST(SlideWindows, SpansCoverEverythingWithExpectedOverlap) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t t = 1 + rng() % 900;
    const std::size_t w = 1 + rng() % 250;
    const std::size_t h = 1 + rng() % w;
    const auto plan = feat::slide_windows(t, w, h);
    std::vector<char> covered(t, 0);
    for (const auto& s : plan.spans) {
      ASSERT_LE(s.end, t);
      for (std::size_t i = s.start; i < s.end; ++i) covered[i] = 1;
    }
    for (std::size_t i = 0; i < t; ++i) {
      ASSERT_TRUE(covered[i]) << "frame " << i << " uncovered, T=" << t << " w=" << w
                              << " h=" << h;
    }
    // consecutive emitted spans overlap by w - h, except possibly the tail
    for (std::size_t i = 2; i < plan.spans.size(); ++i) {
      EXPECT_EQ(plan.spans[i - 1].start - plan.spans[i - 2].start, h);
    }
  }
}

TEST(TimeConversion, PaperWindowArithmetic) {
  EXPECT_DOUBLE_EQ(feat::frames_to_seconds(200, 0.010), 2.0);
  EXPECT_DOUBLE_EQ(feat::frames_to_seconds(0, 0.010), 0.0);
}

TEST(TimeConversion, TieRoundsTowardLaterFrame) {
  EXPECT_EQ(feat::seconds_to_frames(0.015, 0.010), 2u);
  EXPECT_EQ(feat::seconds_to_frames(0.0, 0.010), 0u);
}

TEST(TimeConversion, RejectsNegativeTimeAndBadPeriod) {
  EXPECT_THROW(feat::seconds_to_frames(-0.1, 0.010), std::invalid_argument);
  EXPECT_THROW(feat::frames_to_seconds(10, 0.0), std::invalid_argument);
}

TEST(TimeConversion, RoundTripWithinHalfPeriod) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> dist(0.0, 100.0);
  for (int i = 0; i < 200; ++i) {
    const double s = dist(rng);
    const double back = feat::frames_to_seconds(feat::seconds_to_frames(s, 0.010), 0.010);
    EXPECT_LE(std::abs(back - s), 0.005 + 1e-12);
  }
}

TEST(FeatureFile, RoundTripIsBitExact) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> dist(-10, 10);
  feat::FrameMatrix fm;
  fm.frames = Tensor2(23, 7);
  for (double& v : fm.frames.data) v = dist(rng);
  fm.frame_period = 0.010;
  const std::string path = testing::TempDir() + "/roundtrip.feat";
  feat::save_features(fm, path);
  const feat::FrameMatrix back = feat::load_features(path);
  EXPECT_EQ(back.frames.rows, fm.frames.rows);
  EXPECT_EQ(back.frames.cols, fm.frames.cols);
  EXPECT_EQ(back.frames.data, fm.frames.data);
  EXPECT_EQ(back.frame_period, fm.frame_period);
}

TEST(FeatureFile, RejectsForeignFile) {
  const std::string path = testing::TempDir() + "/not_a_feature_file";
  {
    std::ofstream out(path);
    out << "hello";
  }
  EXPECT_THROW(feat::load_features(path), std::runtime_error);
}
