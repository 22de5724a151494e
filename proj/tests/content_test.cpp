// tests/content_test.cpp

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

#include "casediar/content.hpp"

#include <gtest/gtest.h>

namespace ct = casediar::content;
using casediar::Tensor2;

namespace {

ct::UnitInventory tiny_inventory(std::size_t k) {
  std::vector<std::string> syms;
  for (std::size_t i = 0; i < k; ++i) syms.push_back("u" + std::to_string(i));
  return ct::UnitInventory(ct::Level::kPhone, std::move(syms));
}

}  // namespace

TEST(UnitInventory, DefaultsMatchConfiguredDimensions) {
  EXPECT_EQ(ct::default_phone_inventory().dimension, 48u);
  EXPECT_EQ(ct::default_character_inventory().dimension, 27u);
}

TEST(UnitInventory, RejectsDuplicateSymbols) {
  EXPECT_THROW(ct::UnitInventory(ct::Level::kPhone, {"a", "b", "a"}), std::invalid_argument);
}

TEST(OneHot, BasicAndLastPosition) {
  const auto inv3 = tiny_inventory(3);
  const auto v = ct::one_hot(0, inv3);
  EXPECT_EQ(v, (std::vector<double>{1.0, 0.0, 0.0}));

  const auto phones = ct::default_phone_inventory();
  const auto v48 = ct::one_hot(47, phones);
  ASSERT_EQ(v48.size(), 48u);
  EXPECT_EQ(v48[47], 1.0);
  double sum = 0.0;
  for (double e : v48) sum += e;
  EXPECT_EQ(sum, 1.0);
}

TEST(OneHot, RejectsOutOfRange) {
  EXPECT_THROW(ct::one_hot(3, tiny_inventory(3)), std::invalid_argument);
}

TEST(ExpandAlignment, DirectExpansion) {
  const auto inv = tiny_inventory(2);
  ct::AlignmentTrack track;
  track.level = ct::Level::kPhone;
  track.entries = {{0, 0, 2}, {1, 2, 5}};
  std::map<ct::Level, ct::UnitInventory> invs{{ct::Level::kPhone, inv}};
  const Tensor2 m = ct::expand_alignment({&track}, 5, invs, ct::WordTable());
  ASSERT_EQ(m.rows, 5u);
  ASSERT_EQ(m.cols, 2u);
  for (std::size_t t = 0; t < 2; ++t) {
    EXPECT_EQ(m.at(t, 0), 1.0);
    EXPECT_EQ(m.at(t, 1), 0.0);
  }
  for (std::size_t t = 2; t < 5; ++t) {
    EXPECT_EQ(m.at(t, 0), 0.0);
    EXPECT_EQ(m.at(t, 1), 1.0);
  }
}

TEST(ExpandAlignment, EmptyTrackGivesZeroRows) {
  const auto inv = tiny_inventory(4);
  ct::AlignmentTrack track;
  track.level = ct::Level::kPhone;
  std::map<ct::Level, ct::UnitInventory> invs{{ct::Level::kPhone, inv}};
  const Tensor2 m = ct::expand_alignment({&track}, 3, invs, ct::WordTable());
  for (double v : m.data) EXPECT_EQ(v, 0.0);
}

TEST(ExpandAlignment, PhonePlusCharWidthIs75) {
  ct::AlignmentTrack phone, chr;
  phone.level = ct::Level::kPhone;
  chr.level = ct::Level::kCharacter;
  std::map<ct::Level, ct::UnitInventory> invs{
      {ct::Level::kPhone, ct::default_phone_inventory()},
      {ct::Level::kCharacter, ct::default_character_inventory()}};
  const Tensor2 m = ct::expand_alignment({&phone, &chr}, 4, invs, ct::WordTable());
  EXPECT_EQ(m.cols, 75u);
}

TEST(ExpandAlignment, RejectsOverlapAndOverrun) {
  const auto inv = tiny_inventory(2);
  std::map<ct::Level, ct::UnitInventory> invs{{ct::Level::kPhone, inv}};
  ct::AlignmentTrack overlapping;
  overlapping.level = ct::Level::kPhone;
  overlapping.entries = {{0, 0, 3}, {1, 2, 5}};
  EXPECT_THROW(ct::expand_alignment({&overlapping}, 5, invs, ct::WordTable()),
               std::invalid_argument);
  ct::AlignmentTrack overrun;
  overrun.level = ct::Level::kPhone;
  overrun.entries = {{0, 0, 9}};
  EXPECT_THROW(ct::expand_alignment({&overrun}, 5, invs, ct::WordTable()),
               std::invalid_argument);
}

TEST(ExpandAlignment, CoveredRowsSumToOnePerLevel) {
  const auto inv = tiny_inventory(5);
  ct::AlignmentTrack track;
  track.level = ct::Level::kPhone;
  track.entries = {{2, 1, 4}, {4, 6, 8}};
  std::map<ct::Level, ct::UnitInventory> invs{{ct::Level::kPhone, inv}};
  const Tensor2 m = ct::expand_alignment({&track}, 10, invs, ct::WordTable());
  for (std::size_t t = 0; t < 10; ++t) {
    double sum = 0.0;
    for (std::size_t c = 0; c < m.cols; ++c) sum += m.at(t, c);
    const bool covered = (t >= 1 && t < 4) || (t >= 6 && t < 8);
    EXPECT_EQ(sum, covered ? 1.0 : 0.0) << "frame " << t;
  }
}

TEST(WordTable, DeterministicAndOovIsZero) {
  const ct::WordTable a(10, 42, 16), b(10, 42, 16), c(10, 43, 16);
  EXPECT_EQ(a.row(3), b.row(3));
  EXPECT_NE(a.row(3), c.row(3));
  const auto& oov = a.row(99);
  for (double v : oov) EXPECT_EQ(v, 0.0);
}

TEST(ParseCtm, BasicArithmetic) {
  const auto inv = ct::UnitInventory(ct::Level::kPhone, {"AH", "B"});
  const auto tracks = ct::parse_ctm("m1 1 0.00 0.50 AH\n", inv, 0.010);
  ASSERT_EQ(tracks.size(), 1u);
  EXPECT_EQ(tracks[0].recording, "m1");
  ASSERT_EQ(tracks[0].track.entries.size(), 1u);
  EXPECT_EQ(tracks[0].track.entries[0].unit, 0);
  EXPECT_EQ(tracks[0].track.entries[0].start_frame, 0u);
  EXPECT_EQ(tracks[0].track.entries[0].end_frame, 50u);
}

TEST(ParseCtm, RoundTripIsStable) {
  const auto inv = ct::UnitInventory(ct::Level::kPhone, {"AH", "B", "K"});
  const std::string text = "m1 1 0.00 0.50 AH\nm1 1 0.50 0.30 B\nm1 1 0.80 0.20 K\n";
  const auto first = ct::parse_ctm(text, inv, 0.010);
  const std::string emitted = ct::emit_ctm(first, inv, 0.010);
  const auto second = ct::parse_ctm(emitted, inv, 0.010);
  ASSERT_EQ(first.size(), second.size());
  for (std::size_t i = 0; i < first.size(); ++i) {
    ASSERT_EQ(first[i].track.entries.size(), second[i].track.entries.size());
    for (std::size_t j = 0; j < first[i].track.entries.size(); ++j) {
      EXPECT_EQ(first[i].track.entries[j].unit, second[i].track.entries[j].unit);
      EXPECT_EQ(first[i].track.entries[j].start_frame, second[i].track.entries[j].start_frame);
      EXPECT_EQ(first[i].track.entries[j].end_frame, second[i].track.entries[j].end_frame);
    }
  }
}

TEST(ParseCtm, ErrorsNameTheLine) {
  const auto inv = ct::UnitInventory(ct::Level::kPhone, {"AH"});
  try {
    ct::parse_ctm("m1 1 0.0 0.5\n", inv, 0.010);  // four fields
    FAIL() << "expected malformed-line error";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("line 1"), std::string::npos);
  }
  try {
    ct::parse_ctm("m1 1 0.00 0.50 AH\nm1 1 1.00 -0.50 AH\n", inv, 0.010);
    FAIL() << "expected negative-duration error";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(InjectErrors, RateZeroIsIdentity) {
  const auto inv = tiny_inventory(6);
  ct::AlignmentTrack track;
  track.level = ct::Level::kPhone;
  track.entries = {{0, 0, 5}, {3, 5, 9}, {5, 9, 14}};
  const auto out = ct::inject_errors(track, 0.0, inv, 7);
  ASSERT_EQ(out.entries.size(), track.entries.size());
  for (std::size_t i = 0; i < out.entries.size(); ++i) {
    EXPECT_EQ(out.entries[i].unit, track.entries[i].unit);
  }
  EXPECT_EQ(out.source, ct::Source::kHypothesis);
}

TEST(InjectErrors, RateOneChangesEveryUnit) {
  const auto inv = tiny_inventory(6);
  ct::AlignmentTrack track;
  track.level = ct::Level::kPhone;
  for (int i = 0; i < 50; ++i) {
    track.entries.push_back({i % 6, static_cast<std::size_t>(2 * i),
                             static_cast<std::size_t>(2 * i + 2)});
  }
  const auto out = ct::inject_errors(track, 1.0, inv, 11);
  for (std::size_t i = 0; i < out.entries.size(); ++i) {
    EXPECT_NE(out.entries[i].unit, track.entries[i].unit) << "entry " << i;
  }
}

TEST(InjectErrors, MonteCarloFractionMatchesRate) {
  const auto inv = tiny_inventory(10);
  ct::AlignmentTrack track;
  track.level = ct::Level::kPhone;
  for (int i = 0; i < 10000; ++i) {
    track.entries.push_back({i % 10, static_cast<std::size_t>(2 * i),
                             static_cast<std::size_t>(2 * i + 2)});
  }
  const auto out = ct::inject_errors(track, 0.4, inv, 123);
  std::size_t changed = 0;
  for (std::size_t i = 0; i < out.entries.size(); ++i) {
    if (out.entries[i].unit != track.entries[i].unit) ++changed;
  }
  const double fraction = static_cast<double>(changed) / 10000.0;
  EXPECT_NEAR(fraction, 0.4, 0.02);
}

TEST(InjectErrors, NeverAltersTimings) {
  const auto inv = tiny_inventory(4);
  ct::AlignmentTrack track;
  track.level = ct::Level::kPhone;
  track.entries = {{0, 3, 8}, {1, 8, 12}, {2, 20, 31}};
  const auto out = ct::inject_errors(track, 0.7, inv, 99);
  ASSERT_EQ(out.entries.size(), track.entries.size());
  for (std::size_t i = 0; i < out.entries.size(); ++i) {
    EXPECT_EQ(out.entries[i].start_frame, track.entries[i].start_frame);
    EXPECT_EQ(out.entries[i].end_frame, track.entries[i].end_frame);
  }
}

TEST(InjectErrors, RejectsBadRateOrTinyInventory) {
  const auto inv = tiny_inventory(4);
  ct::AlignmentTrack track;
  track.level = ct::Level::kPhone;
  track.entries = {{0, 0, 2}};
  EXPECT_THROW(ct::inject_errors(track, 1.5, inv, 1), std::invalid_argument);
  EXPECT_THROW(ct::inject_errors(track, 0.5, tiny_inventory(1), 1), std::invalid_argument);
}

TEST(SimulateHypothesis, RateZeroKeepReferenceReproducesReference) {
  // one 40-frame word over one segment, keep-reference mode
  ct::Lexicon lex;
  lex.words = {"ab", "cd"};
  lex.phones = {{0, 1}, {2, 3}};
  lex.characters = {{0, 1}, {2, 3}};
  ct::AlignmentTrack words, phones, chars;
  words.level = ct::Level::kWord;
  phones.level = ct::Level::kPhone;
  chars.level = ct::Level::kCharacter;
  words.entries = {{0, 0, 40}, {1, 40, 80}};
  phones.entries = {{0, 0, 15}, {1, 15, 40}, {2, 40, 70}, {3, 70, 80}};
  chars.entries = {{0, 0, 20}, {1, 20, 40}, {2, 40, 60}, {3, 60, 80}};
  const std::vector<casediar::features::FrameSpan> segs = {{0, 80}};
  const auto hyp = ct::simulate_hypothesis(words, &phones, &chars, lex, segs, 0.0, 5,
                                           ct::HypRetime::kKeepReference);
  ASSERT_EQ(hyp.word.entries.size(), 2u);
  ASSERT_EQ(hyp.phone.entries.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(hyp.phone.entries[i].unit, phones.entries[i].unit);
    EXPECT_EQ(hyp.phone.entries[i].start_frame, phones.entries[i].start_frame);
    EXPECT_EQ(hyp.phone.entries[i].end_frame, phones.entries[i].end_frame);
  }
}

TEST(SimulateHypothesis, SubdivideClipsToSegments) {
  ct::Lexicon lex;
  lex.words = {"ab", "cd"};
  lex.phones = {{0, 1}, {2, 3}};
  lex.characters = {{0, 1}, {2, 3}};
  ct::AlignmentTrack words;
  words.level = ct::Level::kWord;
  words.entries = {{0, 0, 40}, {1, 40, 80}};
  // automatic segments cut into the words
  const std::vector<casediar::features::FrameSpan> segs = {{10, 60}};
  const auto hyp = ct::simulate_hypothesis(words, nullptr, nullptr, lex, segs, 0.0, 5,
                                           ct::HypRetime::kSubdivide);
  ASSERT_EQ(hyp.word.entries.size(), 2u);
  EXPECT_EQ(hyp.word.entries[0].start_frame, 10u);
  EXPECT_EQ(hyp.word.entries[0].end_frame, 40u);
  EXPECT_EQ(hyp.word.entries[1].start_frame, 40u);
  EXPECT_EQ(hyp.word.entries[1].end_frame, 60u);
  // every frame of the segment stays covered by the subdivided phones
  hyp.phone.validate();
  EXPECT_EQ(hyp.phone.entries.front().start_frame, 10u);
  EXPECT_EQ(hyp.phone.entries.back().end_frame, 60u);
}
