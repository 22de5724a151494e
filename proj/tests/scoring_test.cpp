// tests/scoring_test.cpp

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

#include "casediar/scoring.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>

namespace sc = casediar::scoring;

namespace {

/// Frame-level brute-force scorer at 10 ms used as the independent oracle
/// for the interval implementation. Mapping via exhaustive permutation
/// search on frame overlap counts.
struct FrameScore {
  double ms, fa, ser, der;
};

FrameScore frame_score(const std::vector<sc::RttmRecord>& ref,
                       const std::vector<sc::RttmRecord>& hyp, double step = 0.010) {
  double end = 0.0;
  for (const auto& r : ref) end = std::max(end, r.end());
  for (const auto& h : hyp) end = std::max(end, h.end());
  const std::size_t frames = static_cast<std::size_t>(std::floor(end / step + 0.5));

  std::set<std::string> ref_names, hyp_names;
  for (const auto& r : ref) ref_names.insert(r.speaker);
  for (const auto& h : hyp) hyp_names.insert(h.speaker);
  std::vector<std::string> rs(ref_names.begin(), ref_names.end());
  std::vector<std::string> hs(hyp_names.begin(), hyp_names.end());

  auto active = [&](const std::vector<sc::RttmRecord>& recs, const std::string& who,
                    double t) {
    for (const auto& r : recs) {
      if (r.speaker == who && r.onset <= t && t < r.end()) return true;
    }
    return false;
  };

  // frame overlap counts per (hyp, ref) pair
  std::vector<std::vector<double>> overlap(hs.size(), std::vector<double>(rs.size(), 0.0));
  for (std::size_t f = 0; f < frames; ++f) {
    const double mid = (static_cast<double>(f) + 0.5) * step;
    for (std::size_t h = 0; h < hs.size(); ++h) {
      for (std::size_t r = 0; r < rs.size(); ++r) {
        if (active(hyp, hs[h], mid) && active(ref, rs[r], mid)) overlap[h][r] += 1.0;
      }
    }
  }
  // exhaustive assignment over the smaller side
  std::vector<int> ridx(rs.size());
  std::iota(ridx.begin(), ridx.end(), 0);
  double best = -1.0;
  std::map<std::string, std::string> best_map;
  if (hs.empty() || rs.empty()) {
    best = 0.0;
  } else {
    do {
      double total = 0.0;
      std::map<std::string, std::string> m;
      for (std::size_t h = 0; h < hs.size() && h < ridx.size(); ++h) {
        total += overlap[h][static_cast<std::size_t>(ridx[h])];
        m[hs[h]] = rs[static_cast<std::size_t>(ridx[h])];
      }
      if (total > best) {
        best = total;
        best_map = m;
      }
    } while (std::next_permutation(ridx.begin(), ridx.end()));
  }

  double ref_time = 0.0, miss = 0.0, fa = 0.0, ser = 0.0;
  for (std::size_t f = 0; f < frames; ++f) {
    const double mid = (static_cast<double>(f) + 0.5) * step;
    std::set<std::string> ra, ha;
    for (const auto& name : rs)
      if (active(ref, name, mid)) ra.insert(name);
    for (const auto& name : hs)
      if (active(hyp, name, mid)) ha.insert(name);
    const double nr = static_cast<double>(ra.size());
    const double nh = static_cast<double>(ha.size());
    ref_time += nr;
    miss += std::max(0.0, nr - nh);
    fa += std::max(0.0, nh - nr);
    double correct = 0.0;
    for (const auto& h : ha) {
      auto it = best_map.find(h);
      if (it != best_map.end() && ra.count(it->second)) correct += 1.0;
    }
    ser += std::min(nr, nh) - correct;
  }
  FrameScore out{0, 0, 0, 0};
  if (ref_time > 0) {
    out.ms = 100.0 * miss / ref_time;
    out.fa = 100.0 * fa / ref_time;
    out.ser = 100.0 * ser / ref_time;
  }
  out.der = out.ms + out.fa + out.ser;
  return out;
}

std::vector<sc::RttmRecord> random_meeting(std::mt19937_64& rng, const std::string& id,
                                           int n_speakers, double total_s) {
  std::uniform_int_distribution<int> spk(0, n_speakers - 1);
  std::uniform_int_distribution<int> len_frames(30, 300);   // 0.3 .. 3 s on the grid
  std::uniform_int_distribution<int> gap_frames(0, 80);
  std::vector<sc::RttmRecord> out;
  double t = 0.0;
  while (true) {
    const double dur = len_frames(rng) * 0.010;
    if (t + dur > total_s) break;
    out.push_back({id, t, dur, "s" + std::to_string(spk(rng))});
    t += dur + gap_frames(rng) * 0.010;
  }
  return out;
}

}  // namespace

TEST(ParseRttm, BasicRecord) {
  const auto recs =
      sc::parse_rttm("SPEAKER m1 1 0.00 10.00 <NA> <NA> spk1 <NA> <NA>\n");
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_EQ(recs[0].meeting, "m1");
  EXPECT_DOUBLE_EQ(recs[0].onset, 0.0);
  EXPECT_DOUBLE_EQ(recs[0].duration, 10.0);
  EXPECT_EQ(recs[0].speaker, "spk1");
}

TEST(ParseRttm, EmitParseIdentity) {
  const std::string text =
      "SPEAKER m1 1 0.000 10.000 <NA> <NA> spk1 <NA> <NA>\n"
      "SPEAKER m1 1 10.500 2.250 <NA> <NA> spk2 <NA> <NA>\n"
      "SPEAKER m2 1 0.125 3.375 <NA> <NA> spk1 <NA> <NA>\n";
  EXPECT_EQ(sc::emit_rttm(sc::parse_rttm(text)), text);
}

TEST(ParseRttm, ErrorsNameLines) {
  try {
    sc::parse_rttm("SPEAKER m1 1 0.0 -5.0 <NA> <NA> spk1 <NA> <NA>\n");
    FAIL() << "expected duration error";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("line 1"), std::string::npos);
  }
  EXPECT_THROW(sc::parse_rttm("WORD m1 1 0.0 5.0 <NA> <NA> x <NA> <NA>\n"),
               std::invalid_argument);
}

TEST(OptimalMapping, IdentityAndPermutation) {
  std::vector<sc::RttmRecord> ref = {{"m", 0, 10, "a"}, {"m", 10, 10, "b"}};
  {
    const auto mapping = sc::optimal_mapping(ref, ref);
    ASSERT_EQ(mapping.size(), 2u);
    for (const auto& p : mapping) EXPECT_EQ(p.hypothesis, p.reference);
  }
  std::vector<sc::RttmRecord> hyp = {{"m", 0, 10, "x"}, {"m", 10, 10, "y"}};
  const auto mapping = sc::optimal_mapping(ref, hyp);
  std::map<std::string, std::string> m;
  for (const auto& p : mapping) m[p.hypothesis] = p.reference;
  EXPECT_EQ(m.at("x"), "a");
  EXPECT_EQ(m.at("y"), "b");
}

TEST(OptimalMapping, MatchesExhaustiveSearchOn3x3) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> dur(0.5, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    // random overlap structure built from interleaved segments
    std::vector<sc::RttmRecord> ref, hyp;
    double t = 0.0;
    for (int i = 0; i < 12; ++i) {
      const double d = dur(rng);
      ref.push_back({"m", t, d, "r" + std::to_string(i % 3)});
      hyp.push_back({"m", t + 0.2, d, "h" + std::to_string((i + static_cast<int>(rng() % 3)) % 3)});
      t += d + 0.1;
    }
    const auto mapping = sc::optimal_mapping(ref, hyp);
    double mapped_total = 0.0;
    for (const auto& p : mapping) mapped_total += p.overlap;

    // exhaustive: all 6 bijections of {h0,h1,h2} onto {r0,r1,r2}
    auto overlap_of = [&](const std::string& h, const std::string& r) {
      double total = 0.0;
      for (const auto& hr : hyp) {
        if (hr.speaker != h) continue;
        for (const auto& rr : ref) {
          if (rr.speaker != r) continue;
          const double a = std::max(hr.onset, rr.onset);
          const double b = std::min(hr.end(), rr.end());
          if (b > a) total += b - a;
        }
      }
      return total;
    };
    std::vector<int> perm = {0, 1, 2};
    double best = 0.0;
    do {
      double total = 0.0;
      for (int h = 0; h < 3; ++h) {
        total += overlap_of("h" + std::to_string(h), "r" + std::to_string(perm[static_cast<std::size_t>(h)]));
      }
      best = std::max(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
    EXPECT_NEAR(mapped_total, best, 1e-9);
  }
}

TEST(ComputeDer, PerfectHypothesisScoresZero) {
  std::vector<sc::RttmRecord> ref = {{"m", 0, 10, "a"}, {"m", 10, 10, "b"}};
  const auto rep = sc::compute_der(ref, ref, 0.0);
  EXPECT_DOUBLE_EQ(rep.ms, 0.0);
  EXPECT_DOUBLE_EQ(rep.fa, 0.0);
  EXPECT_DOUBLE_EQ(rep.ser, 0.0);
  EXPECT_DOUBLE_EQ(rep.der, 0.0);
  EXPECT_DOUBLE_EQ(rep.scored_time, 20.0);
}

TEST(ComputeDer, HandComputedTenPercentSer) {
  std::vector<sc::RttmRecord> ref = {{"m", 0, 10, "spk1"}, {"m", 10, 10, "spk2"}};
  std::vector<sc::RttmRecord> hyp = {{"m", 0, 12, "A"}, {"m", 12, 8, "B"}};
  const auto rep = sc::compute_der(ref, hyp, 0.0);
  EXPECT_NEAR(rep.ser, 10.0, 1e-9);
  EXPECT_NEAR(rep.ms, 0.0, 1e-9);
  EXPECT_NEAR(rep.fa, 0.0, 1e-9);
  EXPECT_NEAR(rep.der, 10.0, 1e-9);
  std::map<std::string, std::string> m;
  for (const auto& p : rep.mapping) m[p.hypothesis] = p.reference;
  EXPECT_EQ(m.at("A"), "spk1");
  EXPECT_EQ(m.at("B"), "spk2");
}

TEST(ComputeDer, EmptyHypothesisIsAllMiss) {
  std::vector<sc::RttmRecord> ref = {{"m", 0, 20, "a"}};
  const auto rep = sc::compute_der(ref, {}, 0.0);
  EXPECT_NEAR(rep.ms, 100.0, 1e-9);
  EXPECT_DOUBLE_EQ(rep.fa, 0.0);
  EXPECT_DOUBLE_EQ(rep.ser, 0.0);
  EXPECT_NEAR(rep.der, 100.0, 1e-9);
}

TEST(ComputeDer, RejectsEmptyReferenceAndNegativeCollar) {
  std::vector<sc::RttmRecord> hyp = {{"m", 0, 5, "x"}};
  EXPECT_THROW(sc::compute_der({}, hyp, 0.0), std::invalid_argument);
  std::vector<sc::RttmRecord> ref = {{"m", 0, 5, "a"}};
  EXPECT_THROW(sc::compute_der(ref, hyp, -0.1), std::invalid_argument);
}

TEST(ComputeDer, InvariantUnderHypothesisRelabeling) {
  std::mt19937_64 rng(5);
  const auto ref = random_meeting(rng, "m", 3, 60.0);
  auto hyp = random_meeting(rng, "m", 3, 60.0);
  const auto base = sc::compute_der(ref, hyp, 0.0);
  for (auto& h : hyp) h.speaker = "renamed_" + h.speaker;
  const auto renamed = sc::compute_der(ref, hyp, 0.0);
  EXPECT_NEAR(base.der, renamed.der, 1e-12);
  EXPECT_NEAR(base.ser, renamed.ser, 1e-12);
}

TEST(ComputeDer, SelfScoreZeroForEveryCollar) {
  std::mt19937_64 rng(7);
  const auto ref = random_meeting(rng, "m", 4, 60.0);
  for (double collar : {0.0, 0.05, 0.25, 1.0}) {
    const auto rep = sc::compute_der(ref, ref, collar);
    EXPECT_NEAR(rep.der, 0.0, 1e-12) << "collar " << collar;
  }
}

TEST(ComputeDer, ComponentsNonNegativeAndSumExactly) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 25; ++trial) {
    const auto ref = random_meeting(rng, "m", 3, 60.0);
    const auto hyp = random_meeting(rng, "m", 4, 60.0);
    if (ref.empty()) continue;
    const auto rep = sc::compute_der(ref, hyp, 0.0);
    EXPECT_GE(rep.ms, 0.0);
    EXPECT_GE(rep.fa, 0.0);
    EXPECT_GE(rep.ser, 0.0);
    EXPECT_DOUBLE_EQ(rep.der, rep.ms + rep.fa + rep.ser);
  }
}

TEST(ComputeDer, MatchesFrameOracleOnRandomMeetings) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 25; ++trial) {
    const auto ref = random_meeting(rng, "m", 3, 60.0);
    const auto hyp = random_meeting(rng, "m", 3, 60.0);
    if (ref.empty()) continue;
    const auto rep = sc::compute_der(ref, hyp, 0.0);
    const auto oracle = frame_score(ref, hyp);
    EXPECT_NEAR(rep.der, oracle.der, 0.05) << "trial " << trial;
    EXPECT_NEAR(rep.ms, oracle.ms, 0.05);
    EXPECT_NEAR(rep.fa, oracle.fa, 0.05);
    EXPECT_NEAR(rep.ser, oracle.ser, 0.05);
  }
}

TEST(AggregateReports, TimeWeighted) {
  sc::DerReport a, b;
  a.scored_time = 100.0;
  a.ser_seconds = 10.0;
  a.ser = 10.0;
  a.der = 10.0;
  b.scored_time = 100.0;
  b.ser_seconds = 20.0;
  b.ser = 20.0;
  b.der = 20.0;
  const auto total = sc::aggregate_reports({a, b});
  EXPECT_NEAR(total.ser, 15.0, 1e-12);
  EXPECT_NEAR(total.der, 15.0, 1e-12);
}

TEST(Collar, ExcisesBoundaryRegions) {
  // hypothesis wrong only within 0.2 s of a reference boundary: a 0.25 s
  // collar hides the error
  std::vector<sc::RttmRecord> ref = {{"m", 0, 10, "a"}, {"m", 10, 10, "b"}};
  std::vector<sc::RttmRecord> hyp = {{"m", 0, 10.2, "a"}, {"m", 10.2, 9.8, "b"}};
  const auto strict = sc::compute_der(ref, hyp, 0.0);
  EXPECT_GT(strict.ser, 0.9);
  const auto relaxed = sc::compute_der(ref, hyp, 0.25);
  EXPECT_NEAR(relaxed.der, 0.0, 1e-9);
}
