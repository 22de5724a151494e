// casediar/content.hpp

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

#ifndef CASEDIAR_CONTENT_HPP_
#define CASEDIAR_CONTENT_HPP_

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "casediar/features.hpp"
#include "casediar/tensor.hpp"

namespace casediar {
namespace content {

enum class Level { kPhone = 0, kCharacter = 1, kWord = 2 };

inline const char* level_name(Level l) {
  switch (l) {
    case Level::kPhone: return "phone";
    case Level::kCharacter: return "character";
    case Level::kWord: return "word";
  }
  return "?";
}

enum class Source { kReference, kHypothesis };

/// Which content levels a system consumes. Parsed from names like "p+c".
struct LevelSet {
  bool phone = false;
  bool character = false;
  bool word = false;

  bool any() const { return phone || character || word; }

  static LevelSet parse(const std::string& text) {
    LevelSet s;
    for (char ch : text) {
      if (ch == 'p') s.phone = true;
      else if (ch == 'c') s.character = true;
      else if (ch == 'w') s.word = true;
      else if (ch == '+' || ch == ' ') continue;
      else throw std::invalid_argument("LevelSet: bad level spec '" + text + "'");
    }
    return s;
  }

  std::string str() const {
    std::string out;
    auto app = [&out](const char* t) {
      if (!out.empty()) out += "+";
      out += t;
    };
    if (phone) app("p");
    if (character) app("c");
    if (word) app("w");
    return out.empty() ? "none" : out;
  }
};

// ---------------------------------------------------------------------------
// Unit inventories
// ---------------------------------------------------------------------------

/// Ordered unique symbol list for one content level. For phone/character
/// levels the vector dimension equals the inventory size (1-of-k); for the
/// word level the dimension is the word-table width.
struct UnitInventory {
  Level level = Level::kPhone;
  std::vector<std::string> units;
  std::size_t dimension = 0;

  UnitInventory() = default;
  UnitInventory(Level l, std::vector<std::string> syms, std::size_t word_width = 300)
      : level(l), units(std::move(syms)) {
    std::map<std::string, int> seen;
    for (std::size_t i = 0; i < units.size(); ++i) {
      if (!seen.emplace(units[i], static_cast<int>(i)).second) {
        throw std::invalid_argument("UnitInventory: duplicate symbol '" + units[i] + "'");
      }
    }
    index_ = std::move(seen);
    dimension = (level == Level::kWord) ? word_width : units.size();
  }

  std::size_t size() const { return units.size(); }

  int index_of(const std::string& symbol) const {
    auto it = index_.find(symbol);
    return it == index_.end() ? -1 : it->second;
  }

  const std::string& symbol(int id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= units.size()) {
      throw std::invalid_argument("UnitInventory: id " + std::to_string(id) +
                                  " outside inventory of " + std::to_string(units.size()));
    }
    return units[static_cast<std::size_t>(id)];
  }

 private:
  std::map<std::string, int> index_;
};

inline UnitInventory default_phone_inventory() {
  return UnitInventory(
      Level::kPhone,
      {"aa", "ae", "ah", "ao", "aw", "ax", "ay", "b",  "ch", "d",  "dh", "dx",
       "eh", "el", "em", "en", "er", "ey", "f",  "g",  "hh", "ih", "ix", "iy",
       "jh", "k",  "l",  "m",  "n",  "ng", "ow", "oy", "p",  "r",  "s",  "sh",
       "t",  "th", "uh", "uw", "v",  "w",  "y",  "z",  "zh", "sil", "sp", "spn"});
}

inline UnitInventory default_character_inventory() {
  std::vector<std::string> syms;
  for (char c = 'a'; c <= 'z'; ++c) syms.emplace_back(1, c);
  syms.emplace_back("_");
  return UnitInventory(Level::kCharacter, std::move(syms));
}

inline void save_inventory(const UnitInventory& inv, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_inventory: cannot write '" + path + "'");
  for (const auto& u : inv.units) out << u << "\n";
}

inline UnitInventory load_inventory(const std::string& path, Level level,
                                    std::size_t word_width = 300) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_inventory: cannot open '" + path + "'");
  std::vector<std::string> syms;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) syms.push_back(line);
  }
  return UnitInventory(level, std::move(syms), word_width);
}

// ---------------------------------------------------------------------------
// Alignment tracks
// ---------------------------------------------------------------------------

struct AlignEntry {
  int unit = 0;
  std::size_t start_frame = 0;  // inclusive
  std::size_t end_frame = 0;    // exclusive
};

/// Timed content units at one level, sorted and non-overlapping.
struct AlignmentTrack {
  Level level = Level::kPhone;
  std::vector<AlignEntry> entries;
  Source source = Source::kReference;

  void validate() const {
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const AlignEntry& e = entries[i];
      if (e.end_frame <= e.start_frame) {
        throw std::invalid_argument("AlignmentTrack: empty entry at index " +
                                    std::to_string(i));
      }
      if (i > 0 && e.start_frame < entries[i - 1].end_frame) {
        throw std::invalid_argument("AlignmentTrack: overlapping entries at index " +
                                    std::to_string(i));
      }
    }
  }

  std::size_t max_end() const {
    std::size_t m = 0;
    for (const auto& e : entries) m = std::max(m, e.end_frame);
    return m;
  }
};

// ---------------------------------------------------------------------------
// Word table: fixed seeded random vectors standing in for pretrained word
// embeddings. Out-of-vocabulary ids map to all-zeros.
// ---------------------------------------------------------------------------

class WordTable {
 public:
  WordTable() = default;
  WordTable(std::size_t vocabulary_size, std::uint64_t seed, std::size_t width = 300)
      : width_(width), seed_(seed), zeros_(width, 0.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-0.5, 0.5);
    rows_.resize(vocabulary_size);
    for (auto& row : rows_) {
      row.resize(width);
      for (double& v : row) v = dist(rng);
    }
  }

  std::size_t width() const { return width_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t vocabulary_size() const { return rows_.size(); }

  const std::vector<double>& row(int word_id) const {
    if (word_id < 0 || static_cast<std::size_t>(word_id) >= rows_.size()) return zeros_;
    return rows_[static_cast<std::size_t>(word_id)];
  }

 private:
  std::size_t width_ = 300;
  std::uint64_t seed_ = 0;
  std::vector<std::vector<double>> rows_;
  std::vector<double> zeros_;
};

// ---------------------------------------------------------------------------
// Vector representations
// ---------------------------------------------------------------------------

/// 1-of-k encoding: 1.0 at unit_id, 0.0 elsewhere.
inline std::vector<double> one_hot(int unit_id, const UnitInventory& inv) {
  if (inv.level == Level::kWord) {
    throw std::invalid_argument("one_hot: word level uses the word table, not 1-of-k");
  }
  if (unit_id < 0 || static_cast<std::size_t>(unit_id) >= inv.dimension) {
    throw std::invalid_argument("one_hot: id " + std::to_string(unit_id) +
                                " out of range for k=" + std::to_string(inv.dimension));
  }
  std::vector<double> v(inv.dimension, 0.0);
  v[static_cast<std::size_t>(unit_id)] = 1.0;
  return v;
}

/// Per-frame content rows: the concatenation over the given tracks (in
/// canonical phone, character, word order) of the active unit's vector.
/// Frames covered by no entry get zeros for that level.
inline Tensor2 expand_alignment(std::vector<const AlignmentTrack*> tracks,
                                std::size_t num_frames,
                                const std::map<Level, UnitInventory>& inventories,
                                const WordTable& table) {
  std::stable_sort(tracks.begin(), tracks.end(),
                   [](const AlignmentTrack* a, const AlignmentTrack* b) {
                     return static_cast<int>(a->level) < static_cast<int>(b->level);
                   });
  std::size_t total = 0;
  for (const AlignmentTrack* t : tracks) {
    t->validate();
    if (t->max_end() > num_frames) {
      throw std::invalid_argument(std::string("expand_alignment: ") + level_name(t->level) +
                                  " entry ends at " + std::to_string(t->max_end()) +
                                  " beyond T=" + std::to_string(num_frames));
    }
    if (t->level == Level::kWord) {
      total += table.width();
    } else {
      auto it = inventories.find(t->level);
      if (it == inventories.end()) {
        throw std::invalid_argument(std::string("expand_alignment: no inventory for ") +
                                    level_name(t->level));
      }
      total += it->second.dimension;
    }
  }
  Tensor2 out(num_frames, total);
  std::size_t offset = 0;
  for (const AlignmentTrack* t : tracks) {
    std::size_t dim = 0;
    if (t->level == Level::kWord) {
      dim = table.width();
      for (const AlignEntry& e : t->entries) {
        const std::vector<double>& row = table.row(e.unit);
        for (std::size_t fr = e.start_frame; fr < e.end_frame; ++fr) {
          std::copy(row.begin(), row.end(), out.row_ptr(fr) + offset);
        }
      }
    } else {
      const UnitInventory& inv = inventories.at(t->level);
      dim = inv.dimension;
      for (const AlignEntry& e : t->entries) {
        if (e.unit < 0 || static_cast<std::size_t>(e.unit) >= dim) {
          throw std::invalid_argument(std::string("expand_alignment: ") +
                                      level_name(t->level) + " id " +
                                      std::to_string(e.unit) + " out of range");
        }
        for (std::size_t fr = e.start_frame; fr < e.end_frame; ++fr) {
          out.at(fr, offset + static_cast<std::size_t>(e.unit)) = 1.0;
        }
      }
    }
    offset += dim;
  }
  return out;
}

// ---------------------------------------------------------------------------
// CTM interchange: `<recording> <channel> <start_s> <dur_s> <unit>`
// ---------------------------------------------------------------------------

struct NamedTrack {
  std::string recording;
  AlignmentTrack track;
};

inline std::vector<NamedTrack> parse_ctm(const std::string& text, const UnitInventory& inv,
                                         double frame_period = 0.010) {
  std::vector<NamedTrack> out;
  std::map<std::string, std::size_t> by_recording;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == ';') continue;
    std::istringstream ls(line);
    std::string recording, channel, unit;
    double start = 0.0, dur = 0.0;
    if (!(ls >> recording >> channel >> start >> dur >> unit)) {
      throw std::invalid_argument("parse_ctm: malformed line " + std::to_string(line_no));
    }
    std::string extra;
    if (ls >> extra) {
      throw std::invalid_argument("parse_ctm: trailing fields on line " +
                                  std::to_string(line_no));
    }
    if (dur <= 0.0) {
      throw std::invalid_argument("parse_ctm: non-positive duration on line " +
                                  std::to_string(line_no));
    }
    if (start < 0.0) {
      throw std::invalid_argument("parse_ctm: negative start on line " +
                                  std::to_string(line_no));
    }
    int id = inv.index_of(unit);
    if (id < 0) {
      throw std::invalid_argument("parse_ctm: unknown unit '" + unit + "' on line " +
                                  std::to_string(line_no));
    }
    AlignEntry entry;
    entry.unit = id;
    entry.start_frame = features::seconds_to_frames(start, frame_period);
    entry.end_frame = features::seconds_to_frames(start + dur, frame_period);
    if (entry.end_frame <= entry.start_frame) entry.end_frame = entry.start_frame + 1;
    auto it = by_recording.find(recording);
    if (it == by_recording.end()) {
      by_recording.emplace(recording, out.size());
      out.push_back({recording, AlignmentTrack{inv.level, {}, Source::kReference}});
      it = by_recording.find(recording);
    }
    out[it->second].track.entries.push_back(entry);
  }
  for (auto& nt : out) {
    std::stable_sort(nt.track.entries.begin(), nt.track.entries.end(),
                     [](const AlignEntry& a, const AlignEntry& b) {
                       return a.start_frame < b.start_frame;
                     });
    nt.track.validate();
  }
  return out;
}

inline std::string emit_ctm(const std::vector<NamedTrack>& tracks, const UnitInventory& inv,
                            double frame_period = 0.010) {
  std::ostringstream out;
  char buf[64];
  for (const auto& nt : tracks) {
    for (const AlignEntry& e : nt.track.entries) {
      const double start = features::frames_to_seconds(e.start_frame, frame_period);
      const double dur = features::frames_to_seconds(e.end_frame - e.start_frame, frame_period);
      std::snprintf(buf, sizeof(buf), "%.2f %.2f", start, dur);
      out << nt.recording << " 1 " << buf << " " << inv.symbol(e.unit) << "\n";
    }
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Hypothesis error injection: the stand-in for ASR decoding
// ---------------------------------------------------------------------------

/// Each entry is independently substituted, with the given probability, by a
/// uniformly random different unit. Timings are never altered. Deterministic
/// given the seed; the result is marked as a hypothesis track.
inline AlignmentTrack inject_errors(const AlignmentTrack& track, double unit_error_rate,
                                    const UnitInventory& inv, std::uint64_t seed) {
  if (!(unit_error_rate >= 0.0 && unit_error_rate <= 1.0)) {
    throw std::invalid_argument("inject_errors: rate must lie in [0,1], got " +
                                std::to_string(unit_error_rate));
  }
  const std::size_t k = inv.size();
  if (unit_error_rate > 0.0 && k < 2) {
    throw std::invalid_argument("inject_errors: inventory of " + std::to_string(k) +
                                " units cannot yield a different substitute");
  }
  AlignmentTrack out = track;
  out.source = Source::kHypothesis;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (AlignEntry& e : out.entries) {
    const double c = coin(rng);
    if (c < unit_error_rate) {
      std::uniform_int_distribution<int> pick(0, static_cast<int>(k) - 2);
      int sub = pick(rng);
      if (sub >= e.unit) ++sub;  // uniform over the k-1 other units
      e.unit = sub;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Lexicon: word -> phone sequence; spellings come from the word symbol
// itself over the character inventory.
// ---------------------------------------------------------------------------

struct Lexicon {
  std::vector<std::string> words;           // word symbols (their spellings)
  std::vector<std::vector<int>> phones;     // per word: phone ids
  std::vector<std::vector<int>> characters; // per word: character ids

  UnitInventory word_inventory(std::size_t table_width = 300) const {
    return UnitInventory(Level::kWord, words, table_width);
  }
};

inline void save_lexicon(const Lexicon& lex, const UnitInventory& phone_inv,
                         const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_lexicon: cannot write '" + path + "'");
  for (std::size_t w = 0; w < lex.words.size(); ++w) {
    out << lex.words[w];
    for (int p : lex.phones[w]) out << " " << phone_inv.symbol(p);
    out << "\n";
  }
}

inline Lexicon load_lexicon(const std::string& path, const UnitInventory& phone_inv,
                            const UnitInventory& char_inv) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_lexicon: cannot open '" + path + "'");
  Lexicon lex;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string word, phone;
    ls >> word;
    std::vector<int> phones;
    while (ls >> phone) {
      int id = phone_inv.index_of(phone);
      if (id < 0) {
        throw std::runtime_error("load_lexicon: unknown phone '" + phone + "' on line " +
                                 std::to_string(line_no));
      }
      phones.push_back(id);
    }
    if (phones.empty()) {
      throw std::runtime_error("load_lexicon: word without phones on line " +
                               std::to_string(line_no));
    }
    std::vector<int> chars;
    for (char ch : word) {
      int id = char_inv.index_of(std::string(1, ch));
      if (id < 0) {
        throw std::runtime_error("load_lexicon: unspellable word '" + word + "' on line " +
                                 std::to_string(line_no));
      }
      chars.push_back(id);
    }
    lex.words.push_back(word);
    lex.phones.push_back(std::move(phones));
    lex.characters.push_back(std::move(chars));
  }
  return lex;
}

// ---------------------------------------------------------------------------
// Hypothesis simulation: clip the oracle transcript onto segments, inject
// substitution errors, and derive phone/character tracks from the words.
// ---------------------------------------------------------------------------

enum class HypRetime {
  kKeepReference,  // unchanged words keep reference sub-unit timing
  kSubdivide,      // all words subdivide their span uniformly
};

struct AlignmentSet {
  AlignmentTrack word;
  AlignmentTrack phone;
  AlignmentTrack character;
};

namespace detail {

/// Uniform subdivision of [start, end) into the unit sequence; every unit
/// gets at least one frame while frames remain.
inline void subdivide_span(std::size_t start, std::size_t end, const std::vector<int>& seq,
                           std::vector<AlignEntry>& out) {
  const std::size_t span = end - start;
  const std::size_t n = std::min<std::size_t>(seq.size(), span);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t a = start + (span * i) / n;
    std::size_t b = start + (span * (i + 1)) / n;
    out.push_back({seq[i], a, b});
  }
}

inline void copy_clipped(const AlignmentTrack& src, std::size_t start, std::size_t end,
                         std::vector<AlignEntry>& out) {
  for (const AlignEntry& e : src.entries) {
    const std::size_t a = std::max(e.start_frame, start);
    const std::size_t b = std::min(e.end_frame, end);
    if (a < b) out.push_back({e.unit, a, b});
  }
}

}  // namespace detail

/// Simulated ASR over the given segments. Words from the oracle transcript
/// overlapping a segment are clipped to it and substituted at the given
/// rate; phone/character tracks come from the lexicon. In kKeepReference
/// mode unchanged words reuse the reference sub-unit timing (so rate 0
/// reproduces the reference alignment on reference segments exactly);
/// kSubdivide retimes every word uniformly and never touches the reference
/// phone/character tracks.
inline AlignmentSet simulate_hypothesis(const AlignmentTrack& ref_words,
                                        const AlignmentTrack* ref_phones,
                                        const AlignmentTrack* ref_chars,
                                        const Lexicon& lexicon,
                                        const std::vector<features::FrameSpan>& segments,
                                        double unit_error_rate, std::uint64_t seed,
                                        HypRetime retime) {
  if (retime == HypRetime::kKeepReference && (ref_phones == nullptr || ref_chars == nullptr)) {
    throw std::invalid_argument(
        "simulate_hypothesis: keep-reference retiming needs reference phone/character tracks");
  }
  AlignmentSet hyp;
  hyp.word.level = Level::kWord;
  hyp.phone.level = Level::kPhone;
  hyp.character.level = Level::kCharacter;
  hyp.word.source = hyp.phone.source = hyp.character.source = Source::kHypothesis;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  const int vocab = static_cast<int>(lexicon.words.size());
  if (vocab < 2 && unit_error_rate > 0.0) {
    throw std::invalid_argument("simulate_hypothesis: lexicon too small for substitutions");
  }

  std::vector<features::FrameSpan> ordered = segments;
  std::sort(ordered.begin(), ordered.end(),
            [](const features::FrameSpan& a, const features::FrameSpan& b) {
              return a.start < b.start;
            });
  for (const features::FrameSpan& seg : ordered) {
    for (const AlignEntry& w : ref_words.entries) {
      const std::size_t a = std::max(w.start_frame, seg.start);
      const std::size_t b = std::min(w.end_frame, seg.end);
      if (a >= b) continue;
      int unit = w.unit;
      bool substituted = false;
      if (coin(rng) < unit_error_rate) {
        std::uniform_int_distribution<int> pick(0, vocab - 2);
        int sub = pick(rng);
        if (sub >= unit) ++sub;
        unit = sub;
        substituted = true;
      }
      hyp.word.entries.push_back({unit, a, b});
      const bool clipped = (a != w.start_frame) || (b != w.end_frame);
      if (retime == HypRetime::kKeepReference && !substituted && !clipped) {
        detail::copy_clipped(*ref_phones, a, b, hyp.phone.entries);
        detail::copy_clipped(*ref_chars, a, b, hyp.character.entries);
      } else {
        detail::subdivide_span(a, b, lexicon.phones[static_cast<std::size_t>(unit)],
                               hyp.phone.entries);
        detail::subdivide_span(a, b, lexicon.characters[static_cast<std::size_t>(unit)],
                               hyp.character.entries);
      }
    }
  }
  hyp.word.validate();
  hyp.phone.validate();
  hyp.character.validate();
  return hyp;
}

}  // namespace content
}  // namespace casediar

#endif  // CASEDIAR_CONTENT_HPP_
