// casediar/synthdata.hpp

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

#ifndef CASEDIAR_SYNTHDATA_HPP_
#define CASEDIAR_SYNTHDATA_HPP_

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "casediar/content.hpp"
#include "casediar/features.hpp"
#include "casediar/scoring.hpp"
#include "casediar/tensor.hpp"

namespace casediar {
namespace synthdata {

/// Generator knobs. `content_influence` is the experimental lever: when the
/// per-phone feature offsets dominate the within-speaker variance,
/// content-blind embeddings smear across phones.
struct SynthSpec {
  std::size_t n_speakers = 6;
  std::size_t n_meetings = 8;
  double duration_s = 120.0;
  std::size_t lexicon_size = 60;
  std::size_t phones_per_word_min = 2;
  std::size_t phones_per_word_max = 5;
  double silence_ratio = 0.2;
  double speaker_separation = 1.0;
  double content_influence = 1.0;
  double noise_sigma = 0.1;
  std::uint64_t seed = 1;

  std::size_t feature_dim = 40;
  double frame_period = 0.010;
  std::size_t phone_frames_min = 8;
  std::size_t phone_frames_max = 16;
  std::size_t dev_meetings = 0;   // 0 = one fifth of the meetings, at least 1
  std::size_t eval_meetings = 0;  // 0 = one fifth of the meetings, at least 1
  bool open_set = true;           // dev/eval speakers disjoint from training

  void validate() const {
    if (n_speakers < 1 || n_meetings < 1 || lexicon_size < 1 || feature_dim < 1) {
      throw std::invalid_argument("SynthSpec: counts must be >= 1");
    }
    if (!(silence_ratio >= 0.0 && silence_ratio < 1.0)) {
      throw std::invalid_argument("SynthSpec: silence_ratio must lie in [0, 1)");
    }
    if (speaker_separation < 0.0 || content_influence < 0.0 || noise_sigma < 0.0) {
      throw std::invalid_argument("SynthSpec: separations and sigma must be >= 0");
    }
    if (phones_per_word_min < 1 || phones_per_word_max < phones_per_word_min) {
      throw std::invalid_argument("SynthSpec: bad phones-per-word range");
    }
    if (phone_frames_min < 2 || phone_frames_max < phone_frames_min) {
      // graphemes span up to two characters, so a phone needs >= 2 frames
      throw std::invalid_argument("SynthSpec: phone frame range must start at >= 2");
    }
    if (!(duration_s > 0.0) || !(frame_period > 0.0)) {
      throw std::invalid_argument("SynthSpec: duration and frame period must be > 0");
    }
  }
};

struct SynthSegment {
  std::size_t start_frame = 0;
  std::size_t end_frame = 0;
  int speaker = -1;  // global speaker id
};

struct SynthMeeting {
  std::string id;
  features::FrameMatrix features;
  std::vector<scoring::RttmRecord> reference;
  content::AlignmentSet alignments;
  std::vector<SynthSegment> segments;
};

struct CorpusSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> dev;
  std::vector<std::size_t> eval;
  // per train meeting id: held-out segment indices (per-speaker stratified)
  std::map<std::string, std::set<std::size_t>> heldout;
};

struct SynthCorpus {
  SynthSpec spec;
  content::UnitInventory phone_inventory;
  content::UnitInventory character_inventory;
  content::Lexicon lexicon;
  std::uint64_t word_table_seed = 0;
  std::vector<SynthMeeting> meetings;
  CorpusSplit split;
  std::vector<int> train_speakers;
  std::vector<int> test_speakers;
  std::vector<std::string> warnings;
};

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t x = seed ^ (salt * 0x9e3779b97f4a7c15ull);
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ull;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebull;
  x ^= x >> 31;
  return x;
}

inline std::string speaker_name(int id) { return "spk" + std::to_string(id); }

// ---------------------------------------------------------------------------
// Lexicon generation
// ---------------------------------------------------------------------------

/// Words are random phone sequences; spellings come from a fixed seeded
/// phone-to-grapheme map so the character level carries learnable phone
/// information. Spelling collisions get a deterministic suffix.
inline content::Lexicon make_lexicon(const SynthSpec& spec,
                                     const content::UnitInventory& phone_inv,
                                     const content::UnitInventory& char_inv) {
  spec.validate();
  std::mt19937_64 rng(derive_seed(spec.seed, 101));
  std::uniform_int_distribution<int> phone_pick(0, static_cast<int>(phone_inv.size()) - 1);
  std::uniform_int_distribution<std::size_t> len_pick(spec.phones_per_word_min,
                                                      spec.phones_per_word_max);
  std::uniform_int_distribution<int> letter(0, 25);
  std::uniform_int_distribution<int> glen(1, 2);

  std::vector<std::string> graphemes(phone_inv.size());
  for (auto& g : graphemes) {
    const int n = glen(rng);
    for (int i = 0; i < n; ++i) g.push_back(static_cast<char>('a' + letter(rng)));
  }

  content::Lexicon lex;
  std::set<std::string> used;
  for (std::size_t w = 0; w < spec.lexicon_size; ++w) {
    std::vector<int> phones;
    std::string spelling;
    for (int attempt = 0; attempt < 64; ++attempt) {
      phones.clear();
      spelling.clear();
      const std::size_t n = len_pick(rng);
      for (std::size_t i = 0; i < n; ++i) {
        const int p = phone_pick(rng);
        phones.push_back(p);
        spelling += graphemes[static_cast<std::size_t>(p)];
      }
      if (!used.count(spelling)) break;
    }
    while (used.count(spelling)) spelling.push_back(static_cast<char>('a' + letter(rng)));
    used.insert(spelling);
    std::vector<int> chars;
    for (char ch : spelling) chars.push_back(char_inv.index_of(std::string(1, ch)));
    lex.words.push_back(spelling);
    lex.phones.push_back(std::move(phones));
    lex.characters.push_back(std::move(chars));
  }
  return lex;
}

// ---------------------------------------------------------------------------
// Meeting generation
// ---------------------------------------------------------------------------

namespace detail {

struct Latents {
  Tensor2 speaker_means;  // n_speakers x F
  Tensor2 phone_offsets;  // n_phones x F
};

inline Latents make_latents(const SynthSpec& spec, std::size_t n_phones) {
  Latents lat;
  std::mt19937_64 rng(derive_seed(spec.seed, 202));
  std::normal_distribution<double> gauss(0.0, 1.0);
  lat.speaker_means = Tensor2(spec.n_speakers, spec.feature_dim);
  const double spk_scale =
      spec.speaker_separation / std::sqrt(2.0 * static_cast<double>(spec.feature_dim));
  for (double& v : lat.speaker_means.data) v = spk_scale * gauss(rng);
  lat.phone_offsets = Tensor2(n_phones, spec.feature_dim);
  const double ph_scale = 1.0 / std::sqrt(static_cast<double>(spec.feature_dim));
  for (double& v : lat.phone_offsets.data) v = ph_scale * gauss(rng);
  return lat;
}

struct WordLayout {
  int word = -1;
  std::size_t start = 0, end = 0;
  std::vector<content::AlignEntry> phones;
  std::vector<content::AlignEntry> chars;
};

/// Lay one word over [start, start+len) with the drawn per-phone durations,
/// rescaled to fit exactly; characters subdivide the span uniformly.
inline WordLayout lay_word(int word, std::size_t start, std::size_t len,
                           const std::vector<std::size_t>& phone_durs,
                           const content::Lexicon& lex) {
  WordLayout out;
  out.word = word;
  out.start = start;
  out.end = start + len;
  const auto& phones = lex.phones[static_cast<std::size_t>(word)];
  if (len < phones.size()) {
    throw std::invalid_argument("lay_word: span of " + std::to_string(len) +
                                " frames cannot hold " + std::to_string(phones.size()) +
                                " phones");
  }
  std::size_t total = 0;
  for (std::size_t d : phone_durs) total += d;
  std::size_t acc = 0, pos = start;
  for (std::size_t i = 0; i < phones.size(); ++i) {
    acc += phone_durs[i];
    const std::size_t ideal = start + (len * acc) / total;
    const std::size_t lo = pos + 1;                       // every phone gets >= 1 frame
    const std::size_t hi = out.end - (phones.size() - 1 - i);
    const std::size_t next = std::min(std::max(ideal, lo), hi);
    out.phones.push_back({phones[i], pos, next});
    pos = next;
  }
  out.phones.back().end_frame = out.end;
  const auto& chars = lex.characters[static_cast<std::size_t>(word)];
  if (len < chars.size()) {
    throw std::invalid_argument("lay_word: span of " + std::to_string(len) +
                                " frames cannot hold " + std::to_string(chars.size()) +
                                " characters");
  }
  for (std::size_t i = 0; i < chars.size(); ++i) {
    const std::size_t a = start + (len * i) / chars.size();
    const std::size_t b = start + (len * (i + 1)) / chars.size();
    out.chars.push_back({chars[i], a, b});
  }
  return out;
}

}  // namespace detail

/// Alternating speaker turns (uniform 2-8 s) separated by silences; each
/// turn filled with lexicon words. Frame features are
/// speaker_mean + content_influence * phone_offset + Gaussian noise; silence
/// frames are noise only. Deterministic given (spec, meeting_index).
inline SynthMeeting generate_meeting(const SynthSpec& spec, std::size_t meeting_index,
                                     const content::Lexicon& lexicon,
                                     const std::vector<int>& speaker_pool) {
  spec.validate();
  if (speaker_pool.empty()) {
    throw std::invalid_argument("generate_meeting: empty speaker pool");
  }
  const std::size_t total_frames = features::seconds_to_frames(spec.duration_s, spec.frame_period);
  const std::size_t min_turn = features::seconds_to_frames(0.5, spec.frame_period);
  if (total_frames < features::seconds_to_frames(2.0, spec.frame_period)) {
    throw std::invalid_argument("generate_meeting: duration too short for one turn");
  }

  std::mt19937_64 rng(derive_seed(spec.seed, 1000 + meeting_index));
  std::uniform_real_distribution<double> turn_len_s(2.0, 8.0);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<int> word_pick(0, static_cast<int>(lexicon.words.size()) - 1);
  std::uniform_int_distribution<std::size_t> phone_dur(spec.phone_frames_min,
                                                       spec.phone_frames_max);

  SynthMeeting meeting;
  char idbuf[32];
  std::snprintf(idbuf, sizeof(idbuf), "M%04zu", meeting_index);
  meeting.id = idbuf;
  meeting.alignments.word.level = content::Level::kWord;
  meeting.alignments.phone.level = content::Level::kPhone;
  meeting.alignments.character.level = content::Level::kCharacter;

  std::vector<detail::WordLayout> words;
  const double gap_factor =
      spec.silence_ratio > 0.0 ? spec.silence_ratio / (1.0 - spec.silence_ratio) : 0.0;
  const std::size_t carry_cap = features::seconds_to_frames(4.0, spec.frame_period);
  double carry = 0.0;
  std::size_t t = 0;
  int prev_speaker = -1;
  while (t < total_frames) {
    // next speaker, never repeating the previous one when possible
    int speaker = speaker_pool[0];
    if (speaker_pool.size() > 1) {
      std::vector<int> cands;
      for (int s : speaker_pool)
        if (s != prev_speaker) cands.push_back(s);
      std::uniform_int_distribution<std::size_t> pick(0, cands.size() - 1);
      speaker = cands[pick(rng)];
    }
    std::size_t turn_frames =
        features::seconds_to_frames(turn_len_s(rng), spec.frame_period);
    turn_frames = std::min(turn_frames, total_frames - t);
    if (turn_frames < min_turn) break;
    const std::size_t turn_end = t + turn_frames;

    std::size_t cur = t;
    std::size_t first_word = words.size();
    while (cur < turn_end) {
      const int word = word_pick(rng);
      const auto& phones = lexicon.phones[static_cast<std::size_t>(word)];
      std::vector<std::size_t> durs(phones.size());
      std::size_t wlen = 0;
      for (auto& d : durs) {
        d = phone_dur(rng);
        wlen += d;
      }
      const std::size_t remaining = turn_end - cur;
      if (wlen <= remaining) {
        words.push_back(detail::lay_word(word, cur, wlen, durs, lexicon));
        cur += wlen;
      } else {
        const std::size_t min_units =
            std::max(phones.size(), lexicon.characters[static_cast<std::size_t>(word)].size());
        if (remaining >= min_units) {
          words.push_back(detail::lay_word(word, cur, remaining, durs, lexicon));
        } else if (words.size() > first_word) {
          detail::WordLayout& prev = words.back();
          prev.end = turn_end;
          prev.phones.back().end_frame = turn_end;
          prev.chars.back().end_frame = turn_end;
        }
        cur = turn_end;
      }
    }
    if (words.size() == first_word) break;  // nothing fit; stop tiling

    meeting.segments.push_back({t, turn_end, speaker});
    prev_speaker = speaker;
    t = turn_end;

    if (gap_factor > 0.0) {
      carry += gap_factor * static_cast<double>(turn_frames);
      const bool emit = coin(rng) >= 0.4 || carry >= static_cast<double>(carry_cap);
      if (emit) {
        const std::size_t gap = static_cast<std::size_t>(carry + 0.5);
        t = std::min(total_frames, t + gap);
        carry = 0.0;
      }
    }
  }

  // with no silence requested the segments tile the whole duration exactly
  if (spec.silence_ratio == 0.0 && !meeting.segments.empty() &&
      meeting.segments.back().end_frame < total_frames) {
    meeting.segments.back().end_frame = total_frames;
    detail::WordLayout& last = words.back();
    last.end = total_frames;
    last.phones.back().end_frame = total_frames;
    last.chars.back().end_frame = total_frames;
  }

  for (const auto& w : words) {
    meeting.alignments.word.entries.push_back({w.word, w.start, w.end});
    for (const auto& p : w.phones) meeting.alignments.phone.entries.push_back(p);
    for (const auto& c : w.chars) meeting.alignments.character.entries.push_back(c);
  }
  meeting.alignments.word.validate();
  meeting.alignments.phone.validate();
  meeting.alignments.character.validate();

  // features: noise everywhere, speaker mean over segments, phone offsets
  const detail::Latents lat = detail::make_latents(spec, 48);
  meeting.features.frame_period = spec.frame_period;
  meeting.features.frames = Tensor2(total_frames, spec.feature_dim);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (double& v : meeting.features.frames.data) v = spec.noise_sigma * gauss(rng);
  for (const auto& seg : meeting.segments) {
    const double* mean = lat.speaker_means.row_ptr(static_cast<std::size_t>(seg.speaker));
    for (std::size_t fr = seg.start_frame; fr < seg.end_frame; ++fr) {
      double* row = meeting.features.frames.row_ptr(fr);
      for (std::size_t c = 0; c < spec.feature_dim; ++c) row[c] += mean[c];
    }
  }
  if (spec.content_influence > 0.0) {
    for (const auto& e : meeting.alignments.phone.entries) {
      const double* off = lat.phone_offsets.row_ptr(static_cast<std::size_t>(e.unit) %
                                                    lat.phone_offsets.rows);
      for (std::size_t fr = e.start_frame; fr < e.end_frame; ++fr) {
        double* row = meeting.features.frames.row_ptr(fr);
        for (std::size_t c = 0; c < spec.feature_dim; ++c) {
          row[c] += spec.content_influence * off[c];
        }
      }
    }
  }

  for (const auto& seg : meeting.segments) {
    meeting.reference.push_back(
        {meeting.id, features::frames_to_seconds(seg.start_frame, spec.frame_period),
         features::frames_to_seconds(seg.end_frame - seg.start_frame, spec.frame_period),
         speaker_name(seg.speaker)});
  }
  return meeting;
}

// ---------------------------------------------------------------------------
// Corpus assembly and splitting
// ---------------------------------------------------------------------------

/// Per-speaker stratified held-out selection over the training meetings'
/// segments; meeting-level dev/eval assignment is fixed by the spec.
inline CorpusSplit split_corpus(const std::vector<SynthMeeting>& meetings,
                                const SynthSpec& spec, double heldout_fraction) {
  if (!(heldout_fraction > 0.0 && heldout_fraction < 1.0)) {
    throw std::invalid_argument("split_corpus: fraction must lie in (0,1)");
  }
  CorpusSplit split;
  std::size_t n_dev = spec.dev_meetings ? spec.dev_meetings
                                        : std::max<std::size_t>(1, spec.n_meetings / 5);
  std::size_t n_eval = spec.eval_meetings ? spec.eval_meetings
                                          : std::max<std::size_t>(1, spec.n_meetings / 5);
  if (n_dev + n_eval >= spec.n_meetings) {
    throw std::invalid_argument("split_corpus: no training meetings left");
  }
  const std::size_t n_train = spec.n_meetings - n_dev - n_eval;
  for (std::size_t i = 0; i < meetings.size(); ++i) {
    if (i < n_train) split.train.push_back(i);
    else if (i < n_train + n_dev) split.dev.push_back(i);
    else split.eval.push_back(i);
  }

  std::map<int, std::vector<std::pair<std::string, std::size_t>>> per_speaker;
  for (std::size_t mi : split.train) {
    const SynthMeeting& m = meetings[mi];
    for (std::size_t si = 0; si < m.segments.size(); ++si) {
      per_speaker[m.segments[si].speaker].emplace_back(m.id, si);
    }
  }
  std::mt19937_64 rng(derive_seed(spec.seed, 303));
  for (auto& [speaker, segs] : per_speaker) {
    const std::size_t n = segs.size();
    std::size_t held = static_cast<std::size_t>(
        std::floor(heldout_fraction * static_cast<double>(n) + 0.5));
    if (held >= n) {
      throw std::invalid_argument("split_corpus: fraction leaves speaker " +
                                  speaker_name(speaker) + " without training segments");
    }
    std::shuffle(segs.begin(), segs.end(), rng);
    for (std::size_t i = 0; i < held; ++i) {
      split.heldout[segs[i].first].insert(segs[i].second);
    }
  }
  return split;
}

inline SynthCorpus generate_corpus(const SynthSpec& spec, double heldout_fraction = 0.1) {
  spec.validate();
  SynthCorpus corpus;
  corpus.spec = spec;
  corpus.phone_inventory = content::default_phone_inventory();
  corpus.character_inventory = content::default_character_inventory();
  corpus.lexicon = make_lexicon(spec, corpus.phone_inventory, corpus.character_inventory);
  corpus.word_table_seed = derive_seed(spec.seed, 404);

  // speaker pools
  std::vector<int> all;
  for (std::size_t s = 0; s < spec.n_speakers; ++s) all.push_back(static_cast<int>(s));
  if (spec.open_set && spec.n_speakers >= 4) {
    const std::size_t n_test =
        std::max<std::size_t>(2, static_cast<std::size_t>(spec.n_speakers * 2 / 5));
    corpus.train_speakers.assign(all.begin(), all.end() - static_cast<long>(n_test));
    corpus.test_speakers.assign(all.end() - static_cast<long>(n_test), all.end());
  } else {
    corpus.train_speakers = all;
    corpus.test_speakers = all;
    if (spec.open_set) {
      corpus.warnings.push_back("open_set requested but fewer than 4 speakers; pools shared");
    }
  }
  if (corpus.train_speakers.size() < 2) {
    corpus.warnings.push_back("fewer than 2 training speakers; embedder training will reject this corpus");
  }

  std::size_t n_dev = spec.dev_meetings ? spec.dev_meetings
                                        : std::max<std::size_t>(1, spec.n_meetings / 5);
  std::size_t n_eval = spec.eval_meetings ? spec.eval_meetings
                                          : std::max<std::size_t>(1, spec.n_meetings / 5);
  if (n_dev + n_eval >= spec.n_meetings) {
    throw std::invalid_argument("generate_corpus: no training meetings left");
  }
  const std::size_t n_train = spec.n_meetings - n_dev - n_eval;
  for (std::size_t mi = 0; mi < spec.n_meetings; ++mi) {
    const std::vector<int>& pool =
        mi < n_train ? corpus.train_speakers : corpus.test_speakers;
    corpus.meetings.push_back(generate_meeting(spec, mi, corpus.lexicon, pool));
  }
  corpus.split = split_corpus(corpus.meetings, spec, heldout_fraction);
  return corpus;
}

// ---------------------------------------------------------------------------
// Corpus directory layout:
//   <dir>/<meeting>.feat .rttm .phone.ctm .char.ctm .word.ctm
//   <dir>/phones.txt chars.txt words.txt lexicon.txt manifest.txt
// ---------------------------------------------------------------------------

struct Manifest {
  std::uint64_t seed = 0;
  std::uint64_t word_table_seed = 0;
  std::size_t feature_dim = 0;
  double frame_period = 0.010;
  std::size_t n_speakers = 0;
  std::vector<std::string> train, dev, eval;
  std::map<std::string, std::set<std::size_t>> heldout;
  std::vector<std::string> warnings;

  std::vector<std::string> meeting_set(const std::string& name) const {
    if (name == "train") return train;
    if (name == "dev") return dev;
    if (name == "eval") return eval;
    if (name == "all") {
      std::vector<std::string> out = train;
      out.insert(out.end(), dev.begin(), dev.end());
      out.insert(out.end(), eval.begin(), eval.end());
      return out;
    }
    throw std::invalid_argument("manifest: unknown meeting set '" + name + "'");
  }
};

inline void write_manifest(const Manifest& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_manifest: cannot write '" + path + "'");
  out.precision(17);
  out << "casediar-corpus 1\n";
  out << "seed " << m.seed << "\n";
  out << "word_table_seed " << m.word_table_seed << "\n";
  out << "feature_dim " << m.feature_dim << "\n";
  out << "frame_period " << m.frame_period << "\n";
  out << "n_speakers " << m.n_speakers << "\n";
  for (const auto& id : m.train) out << "split train " << id << "\n";
  for (const auto& id : m.dev) out << "split dev " << id << "\n";
  for (const auto& id : m.eval) out << "split eval " << id << "\n";
  for (const auto& [id, segs] : m.heldout) {
    for (std::size_t s : segs) out << "heldout " << id << " " << s << "\n";
  }
  for (const auto& w : m.warnings) out << "warning " << w << "\n";
  out << "end\n";
}

inline Manifest read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_manifest: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line != "casediar-corpus 1") {
    throw std::runtime_error("read_manifest: '" + path + "' is not a corpus manifest");
  }
  Manifest m;
  while (std::getline(in, line)) {
    if (line.empty() || line == "end") continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "seed") ls >> m.seed;
    else if (tag == "word_table_seed") ls >> m.word_table_seed;
    else if (tag == "feature_dim") ls >> m.feature_dim;
    else if (tag == "frame_period") ls >> m.frame_period;
    else if (tag == "n_speakers") ls >> m.n_speakers;
    else if (tag == "split") {
      std::string which, id;
      ls >> which >> id;
      if (which == "train") m.train.push_back(id);
      else if (which == "dev") m.dev.push_back(id);
      else if (which == "eval") m.eval.push_back(id);
    } else if (tag == "heldout") {
      std::string id;
      std::size_t seg = 0;
      ls >> id >> seg;
      m.heldout[id].insert(seg);
    } else if (tag == "warning") {
      std::string rest;
      std::getline(ls, rest);
      if (!rest.empty() && rest[0] == ' ') rest.erase(0, 1);
      m.warnings.push_back(rest);
    }
  }
  return m;
}

inline void write_corpus(const SynthCorpus& corpus, const std::string& dir) {
  auto write_text = [](const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_corpus: cannot write '" + path + "'");
    out << text;
  };
  const content::UnitInventory word_inv = corpus.lexicon.word_inventory();
  for (const SynthMeeting& m : corpus.meetings) {
    features::save_features(m.features, dir + "/" + m.id + ".feat");
    write_text(dir + "/" + m.id + ".rttm", scoring::emit_rttm(m.reference));
    write_text(dir + "/" + m.id + ".phone.ctm",
               content::emit_ctm({{m.id, m.alignments.phone}}, corpus.phone_inventory,
                                 corpus.spec.frame_period));
    write_text(dir + "/" + m.id + ".char.ctm",
               content::emit_ctm({{m.id, m.alignments.character}}, corpus.character_inventory,
                                 corpus.spec.frame_period));
    write_text(dir + "/" + m.id + ".word.ctm",
               content::emit_ctm({{m.id, m.alignments.word}}, word_inv,
                                 corpus.spec.frame_period));
  }
  content::save_inventory(corpus.phone_inventory, dir + "/phones.txt");
  content::save_inventory(corpus.character_inventory, dir + "/chars.txt");
  content::save_inventory(word_inv, dir + "/words.txt");
  content::save_lexicon(corpus.lexicon, corpus.phone_inventory, dir + "/lexicon.txt");

  Manifest manifest;
  manifest.seed = corpus.spec.seed;
  manifest.word_table_seed = corpus.word_table_seed;
  manifest.feature_dim = corpus.spec.feature_dim;
  manifest.frame_period = corpus.spec.frame_period;
  manifest.n_speakers = corpus.spec.n_speakers;
  for (std::size_t i : corpus.split.train) manifest.train.push_back(corpus.meetings[i].id);
  for (std::size_t i : corpus.split.dev) manifest.dev.push_back(corpus.meetings[i].id);
  for (std::size_t i : corpus.split.eval) manifest.eval.push_back(corpus.meetings[i].id);
  manifest.heldout = corpus.split.heldout;
  manifest.warnings = corpus.warnings;
  write_manifest(manifest, dir + "/manifest.txt");
}

}  // namespace synthdata
}  // namespace casediar

#endif  // CASEDIAR_SYNTHDATA_HPP_
