// casediar/scoring.hpp

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

#ifndef CASEDIAR_SCORING_HPP_
#define CASEDIAR_SCORING_HPP_

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace casediar {
namespace scoring {

/// One speech interval with a speaker label.
struct RttmRecord {
  std::string meeting;
  double onset = 0.0;     // seconds
  double duration = 0.0;  // seconds, > 0
  std::string speaker;

  double end() const { return onset + duration; }
};

struct SpeakerPair {
  std::string meeting;
  std::string hypothesis;
  std::string reference;
  double overlap = 0.0;  // seconds
};

/// MS/FA/SER/DER as percentages of scored reference speech time.
/// DER = MS + FA + SER by construction.
struct DerReport {
  double ms = 0.0;
  double fa = 0.0;
  double ser = 0.0;
  double der = 0.0;
  double scored_time = 0.0;  // reference speech seconds inside scored regions
  double miss_seconds = 0.0;
  double fa_seconds = 0.0;
  double ser_seconds = 0.0;
  std::vector<SpeakerPair> mapping;
};

// ---------------------------------------------------------------------------
// RTTM text format:
// SPEAKER <meeting> 1 <onset> <dur> <NA> <NA> <speaker> <NA> <NA>
// ---------------------------------------------------------------------------

inline std::vector<RttmRecord> parse_rttm(const std::string& text) {
  std::vector<RttmRecord> out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == ';') continue;
    std::istringstream ls(line);
    std::string tag, meeting, channel, na1, na2, speaker, na3, na4;
    double onset = 0.0, dur = 0.0;
    if (!(ls >> tag >> meeting >> channel >> onset >> dur >> na1 >> na2 >> speaker >> na3 >>
          na4) ||
        tag != "SPEAKER") {
      throw std::invalid_argument("parse_rttm: malformed line " + std::to_string(line_no));
    }
    if (dur <= 0.0) {
      throw std::invalid_argument("parse_rttm: non-positive duration on line " +
                                  std::to_string(line_no));
    }
    if (onset < 0.0) {
      throw std::invalid_argument("parse_rttm: negative onset on line " +
                                  std::to_string(line_no));
    }
    out.push_back({meeting, onset, dur, speaker});
  }
  std::stable_sort(out.begin(), out.end(), [](const RttmRecord& a, const RttmRecord& b) {
    if (a.meeting != b.meeting) return a.meeting < b.meeting;
    return a.onset < b.onset;
  });
  return out;
}

inline std::string emit_rttm(std::vector<RttmRecord> records) {
  std::stable_sort(records.begin(), records.end(),
                   [](const RttmRecord& a, const RttmRecord& b) {
                     if (a.meeting != b.meeting) return a.meeting < b.meeting;
                     return a.onset < b.onset;
                   });
  std::ostringstream out;
  char buf[64];
  for (const RttmRecord& r : records) {
    std::snprintf(buf, sizeof(buf), "%.3f %.3f", r.onset, r.duration);
    out << "SPEAKER " << r.meeting << " 1 " << buf << " <NA> <NA> " << r.speaker
        << " <NA> <NA>\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Optimal assignment (Kuhn-Munkres, potentials formulation)
// ---------------------------------------------------------------------------

namespace detail {

/// Minimum-cost perfect matching on a square cost matrix.
/// Returns row -> column assignment.
inline std::vector<int> hungarian_min_cost(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, std::numeric_limits<double>::infinity());
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      int i0 = p[j0], j1 = 0;
      double delta = std::numeric_limits<double>::infinity();
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= n; ++j) {
    if (p[j] > 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

/// Maximum-weight one-to-one matching on a (possibly rectangular)
/// non-negative weight matrix; unmatched rows/columns are allowed and
/// zero-weight pairs are not reported.
inline std::vector<std::pair<int, int>> max_weight_matching(
    const std::vector<std::vector<double>>& weight) {
  const std::size_t rows = weight.size();
  const std::size_t cols = rows ? weight[0].size() : 0;
  if (rows == 0 || cols == 0) return {};
  const std::size_t n = std::max(rows, cols);
  double max_w = 0.0;
  for (const auto& r : weight)
    for (double w : r) max_w = std::max(max_w, w);
  std::vector<std::vector<double>> cost(n, std::vector<double>(n, max_w));
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) cost[r][c] = max_w - weight[r][c];
  const std::vector<int> assign = hungarian_min_cost(cost);
  std::vector<std::pair<int, int>> out;
  for (std::size_t r = 0; r < rows; ++r) {
    const int c = assign[r];
    if (c >= 0 && static_cast<std::size_t>(c) < cols && weight[r][static_cast<std::size_t>(c)] > 0.0) {
      out.emplace_back(static_cast<int>(r), c);
    }
  }
  return out;
}

struct Timeline {
  // elementary interval [a, b) with active reference/hypothesis speaker sets
  struct Cell {
    double a = 0.0, b = 0.0;
    std::set<std::string> ref;
    std::set<std::string> hyp;
  };
  std::vector<Cell> cells;  // scored cells only
};

/// Elementary intervals of one meeting with collar regions around reference
/// boundaries excised.
inline Timeline build_timeline(const std::vector<const RttmRecord*>& ref,
                               const std::vector<const RttmRecord*>& hyp, double collar) {
  std::vector<double> cuts;
  std::vector<std::pair<double, double>> excluded;
  for (const RttmRecord* r : ref) {
    cuts.push_back(r->onset);
    cuts.push_back(r->end());
    if (collar > 0.0) {
      excluded.emplace_back(std::max(0.0, r->onset - collar), r->onset + collar);
      excluded.emplace_back(std::max(0.0, r->end() - collar), r->end() + collar);
    }
  }
  for (const RttmRecord* h : hyp) {
    cuts.push_back(h->onset);
    cuts.push_back(h->end());
  }
  for (const auto& [a, b] : excluded) {
    cuts.push_back(a);
    cuts.push_back(b);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  Timeline tl;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    if (!(b > a)) continue;
    const double mid = a + (b - a) / 2.0;
    bool scored = true;
    for (const auto& [xa, xb] : excluded) {
      if (mid >= xa && mid < xb) {
        scored = false;
        break;
      }
    }
    if (!scored) continue;
    Timeline::Cell cell;
    cell.a = a;
    cell.b = b;
    for (const RttmRecord* r : ref) {
      if (r->onset <= mid && mid < r->end()) cell.ref.insert(r->speaker);
    }
    for (const RttmRecord* h : hyp) {
      if (h->onset <= mid && mid < h->end()) cell.hyp.insert(h->speaker);
    }
    if (!cell.ref.empty() || !cell.hyp.empty()) tl.cells.push_back(std::move(cell));
  }
  return tl;
}

}  // namespace detail

/// One-to-one hypothesis-to-reference speaker pairing maximizing total
/// overlapped time. Pairing is computed per meeting; unmatched speakers are
/// simply absent from the result.
inline std::vector<SpeakerPair> optimal_mapping(const std::vector<RttmRecord>& ref,
                                                const std::vector<RttmRecord>& hyp,
                                                double collar = 0.0) {
  std::set<std::string> meetings;
  for (const auto& r : ref) meetings.insert(r.meeting);
  for (const auto& h : hyp) meetings.insert(h.meeting);

  std::vector<SpeakerPair> out;
  for (const std::string& meeting : meetings) {
    std::vector<const RttmRecord*> mref, mhyp;
    for (const auto& r : ref)
      if (r.meeting == meeting) mref.push_back(&r);
    for (const auto& h : hyp)
      if (h.meeting == meeting) mhyp.push_back(&h);

    std::vector<std::string> ref_speakers, hyp_speakers;
    std::map<std::string, std::size_t> ref_idx, hyp_idx;
    for (const RttmRecord* r : mref) {
      if (ref_idx.emplace(r->speaker, ref_speakers.size()).second)
        ref_speakers.push_back(r->speaker);
    }
    for (const RttmRecord* h : mhyp) {
      if (hyp_idx.emplace(h->speaker, hyp_speakers.size()).second)
        hyp_speakers.push_back(h->speaker);
    }
    if (ref_speakers.empty() || hyp_speakers.empty()) continue;

    detail::Timeline tl = detail::build_timeline(mref, mhyp, collar);
    std::vector<std::vector<double>> overlap(hyp_speakers.size(),
                                             std::vector<double>(ref_speakers.size(), 0.0));
    for (const auto& cell : tl.cells) {
      const double dur = cell.b - cell.a;
      for (const auto& h : cell.hyp) {
        for (const auto& r : cell.ref) {
          overlap[hyp_idx[h]][ref_idx[r]] += dur;
        }
      }
    }
    for (const auto& [h, r] : detail::max_weight_matching(overlap)) {
      out.push_back({meeting, hyp_speakers[static_cast<std::size_t>(h)],
                     ref_speakers[static_cast<std::size_t>(r)],
                     overlap[static_cast<std::size_t>(h)][static_cast<std::size_t>(r)]});
    }
  }
  return out;
}

/// Interval-exact DER with collar excision around reference boundaries:
///   MS  = reference speech with too few hypothesis speakers,
///   FA  = hypothesis speech with too few reference speakers,
///   SER = speech attributed to a wrongly mapped speaker,
/// each as a percentage of scored reference speech time.
inline DerReport compute_der(const std::vector<RttmRecord>& ref,
                             const std::vector<RttmRecord>& hyp, double collar = 0.0) {
  if (ref.empty()) throw std::invalid_argument("compute_der: empty reference");
  if (collar < 0.0) throw std::invalid_argument("compute_der: negative collar");

  DerReport report;
  report.mapping = optimal_mapping(ref, hyp, collar);
  std::map<std::string, std::map<std::string, std::string>> hyp_to_ref;  // per meeting
  for (const auto& pair : report.mapping) {
    hyp_to_ref[pair.meeting][pair.hypothesis] = pair.reference;
  }

  std::set<std::string> meetings;
  for (const auto& r : ref) meetings.insert(r.meeting);
  for (const auto& h : hyp) meetings.insert(h.meeting);

  double ref_time = 0.0, miss = 0.0, fa = 0.0, ser = 0.0;
  for (const std::string& meeting : meetings) {
    std::vector<const RttmRecord*> mref, mhyp;
    for (const auto& r : ref)
      if (r.meeting == meeting) mref.push_back(&r);
    for (const auto& h : hyp)
      if (h.meeting == meeting) mhyp.push_back(&h);
    detail::Timeline tl = detail::build_timeline(mref, mhyp, collar);
    const auto& mapping = hyp_to_ref[meeting];
    for (const auto& cell : tl.cells) {
      const double dur = cell.b - cell.a;
      const auto n_ref = static_cast<double>(cell.ref.size());
      const auto n_hyp = static_cast<double>(cell.hyp.size());
      ref_time += dur * n_ref;
      miss += dur * std::max(0.0, n_ref - n_hyp);
      fa += dur * std::max(0.0, n_hyp - n_ref);
      double correct = 0.0;
      for (const auto& h : cell.hyp) {
        auto it = mapping.find(h);
        if (it != mapping.end() && cell.ref.count(it->second)) correct += 1.0;
      }
      ser += dur * (std::min(n_ref, n_hyp) - correct);
    }
  }

  report.scored_time = ref_time;
  report.miss_seconds = miss;
  report.fa_seconds = fa;
  report.ser_seconds = ser;
  if (ref_time > 0.0) {
    report.ms = 100.0 * miss / ref_time;
    report.fa = 100.0 * fa / ref_time;
    report.ser = 100.0 * ser / ref_time;
  }
  report.der = report.ms + report.fa + report.ser;
  return report;
}

/// Time-weighted aggregate of per-meeting reports.
inline DerReport aggregate_reports(const std::vector<DerReport>& reports) {
  DerReport total;
  for (const DerReport& r : reports) {
    total.scored_time += r.scored_time;
    total.miss_seconds += r.miss_seconds;
    total.fa_seconds += r.fa_seconds;
    total.ser_seconds += r.ser_seconds;
    total.mapping.insert(total.mapping.end(), r.mapping.begin(), r.mapping.end());
  }
  if (total.scored_time > 0.0) {
    total.ms = 100.0 * total.miss_seconds / total.scored_time;
    total.fa = 100.0 * total.fa_seconds / total.scored_time;
    total.ser = 100.0 * total.ser_seconds / total.scored_time;
  }
  total.der = total.ms + total.fa + total.ser;
  return total;
}

inline std::string format_der_table(const DerReport& r, const std::string& label) {
  char buf[256];
  std::ostringstream out;
  out << "system                          MS      FA     SER     DER  scored_s\n";
  std::snprintf(buf, sizeof(buf), "%-28s %6.2f  %6.2f  %6.2f  %6.2f  %8.2f\n", label.c_str(),
                r.ms, r.fa, r.ser, r.der, r.scored_time);
  out << buf;
  return out.str();
}

inline std::string format_der_kv(const DerReport& r, const std::string& label) {
  char buf[128];
  std::ostringstream out;
  auto kv = [&](const char* key, double value) {
    std::snprintf(buf, sizeof(buf), "%s.%s = %.6f\n", label.c_str(), key, value);
    out << buf;
  };
  kv("MS", r.ms);
  kv("FA", r.fa);
  kv("SER", r.ser);
  kv("DER", r.der);
  kv("scored_seconds", r.scored_time);
  for (const auto& pair : r.mapping) {
    out << label << ".map." << pair.meeting << "." << pair.hypothesis << " = "
        << pair.reference << "\n";
  }
  return out.str();
}

}  // namespace scoring
}  // namespace casediar

#endif  // CASEDIAR_SCORING_HPP_
