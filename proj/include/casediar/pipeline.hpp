// casediar/pipeline.hpp

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

#ifndef CASEDIAR_PIPELINE_HPP_
#define CASEDIAR_PIPELINE_HPP_

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "casediar/cluster.hpp"
#include "casediar/config.hpp"
#include "casediar/content.hpp"
#include "casediar/features.hpp"
#include "casediar/models.hpp"
#include "casediar/params.hpp"
#include "casediar/scoring.hpp"
#include "casediar/synthdata.hpp"

namespace casediar {
namespace pipeline {

enum class Regime { kReference, kManualHypothesis, kAutomaticHypothesis };

inline Regime parse_regime(const std::string& name) {
  if (name == "reference") return Regime::kReference;
  if (name == "manual-hypothesis") return Regime::kManualHypothesis;
  if (name == "automatic-hypothesis") return Regime::kAutomaticHypothesis;
  throw std::invalid_argument("unknown regime '" + name + "'");
}

inline const char* regime_name(Regime r) {
  switch (r) {
    case Regime::kReference: return "reference";
    case Regime::kManualHypothesis: return "manual-hypothesis";
    case Regime::kAutomaticHypothesis: return "automatic-hypothesis";
  }
  return "?";
}

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// ---------------------------------------------------------------------------
// Run configuration
// ---------------------------------------------------------------------------

struct RunConfig {
  std::string corpus_dir = "corpus";
  std::string out_dir = "out";
  std::uint64_t seed = 1;

  synthdata::SynthSpec synth;
  double heldout_fraction = 0.1;

  models::EmbedderConfig embedder;  // dims; levels/mode filled per system
  models::TrainOptions embedder_train{10, 1e-3};

  std::vector<std::string> systems = {"baseline"};
  bool resume = false;
  bool with_vad = true;
  bool with_cpd = true;

  models::VadConfig vad;
  models::TrainOptions vad_train{4, 1e-3};
  std::size_t vad_sample_target = 4000;

  models::CpdConfig cpd;
  models::TrainOptions cpd_train{4, 1e-3};
  std::size_t cpd_negatives_per_positive = 2;
  std::size_t cpd_max_examples = 1200;

  Regime regime = Regime::kReference;
  std::string system = "baseline";
  double error_rate = 0.0;
  std::string meeting_set = "eval";
  double vad_threshold = 0.5;
  std::size_t vad_min_gap = 20;
  std::size_t vad_min_len = 30;
  double cpd_threshold = 0.5;
  std::size_t cpd_min_gap = 50;
  std::size_t min_segment_len = 20;
  double cluster_percentile = 60.0;
  double pass1_percentile = 60.0;
  std::size_t k_max = 8;
  content::HypRetime retime = content::HypRetime::kKeepReference;
  double collar = 0.0;
  bool dump_affinity = false;

  std::vector<std::string> exp_systems = {"baseline", "multitask",  "adversarial",
                                          "case_p",   "case_c",     "case_pc",
                                          "case_w",   "case_wpc"};
  std::vector<std::string> exp_regimes = {"reference", "manual-hypothesis",
                                          "automatic-hypothesis"};
  std::vector<double> exp_error_rates = {0.0, 0.2, 0.4};
  std::vector<std::uint64_t> exp_seeds;  // default: seed .. seed+4
  std::vector<double> p_grid = {60.0, 80.0};
};

inline RunConfig load_run_config(const config::Config& c) {
  RunConfig rc;
  rc.corpus_dir = c.get_string("corpus.dir", rc.corpus_dir);
  rc.out_dir = c.get_string("out", rc.out_dir);
  rc.seed = c.get_seed("seed", rc.seed);

  synthdata::SynthSpec& s = rc.synth;
  s.n_speakers = c.get_size("corpus.n_speakers", s.n_speakers);
  s.n_meetings = c.get_size("corpus.n_meetings", s.n_meetings);
  s.duration_s = c.get_double("corpus.duration_s", s.duration_s);
  s.lexicon_size = c.get_size("corpus.lexicon_size", s.lexicon_size);
  s.phones_per_word_min = c.get_size("corpus.phones_per_word_min", s.phones_per_word_min);
  s.phones_per_word_max = c.get_size("corpus.phones_per_word_max", s.phones_per_word_max);
  s.silence_ratio = c.get_double("corpus.silence_ratio", s.silence_ratio);
  s.speaker_separation = c.get_double("corpus.speaker_separation", s.speaker_separation);
  s.content_influence = c.get_double("corpus.content_influence", s.content_influence);
  s.noise_sigma = c.get_double("corpus.noise_sigma", s.noise_sigma);
  s.seed = c.get_seed("corpus.seed", rc.seed);
  s.feature_dim = c.get_size("corpus.feature_dim", s.feature_dim);
  s.frame_period = c.get_double("corpus.frame_period", s.frame_period);
  s.phone_frames_min = c.get_size("corpus.phone_frames_min", s.phone_frames_min);
  s.phone_frames_max = c.get_size("corpus.phone_frames_max", s.phone_frames_max);
  s.dev_meetings = c.get_size("corpus.dev_meetings", s.dev_meetings);
  s.eval_meetings = c.get_size("corpus.eval_meetings", s.eval_meetings);
  s.open_set = c.get_bool("corpus.open_set", s.open_set);
  rc.heldout_fraction = c.get_double("corpus.heldout_fraction", rc.heldout_fraction);

  models::EmbedderConfig& e = rc.embedder;
  e.acoustic_dim = s.feature_dim;
  e.phone_dim = c.get_size("embedder.phone_dim", e.phone_dim);
  e.char_dim = c.get_size("embedder.char_dim", e.char_dim);
  e.word_dim = c.get_size("embedder.word_dim", e.word_dim);
  e.word_proj_dim = c.get_size("embedder.word_proj_dim", e.word_proj_dim);
  e.context_left = c.get_size("embedder.context_left", e.context_left);
  e.context_right = c.get_size("embedder.context_right", e.context_right);
  e.hidden = c.get_size_list("embedder.hidden", "256,256,256");
  e.dvector_dim = c.get_size("embedder.dvector_dim", e.dvector_dim);
  e.attention_heads = c.get_size("embedder.attention_heads", e.attention_heads);
  e.attention_dim = c.get_size("embedder.attention_dim", e.attention_dim);
  e.penalty_weight = c.get_double("embedder.penalty_weight", e.penalty_weight);
  e.loss.scale = c.get_double("embedder.angular_scale", e.loss.scale);
  e.loss.margin = static_cast<int>(c.get_int("embedder.angular_margin", e.loss.margin));
  e.adversarial_lambda = c.get_double("embedder.adversarial_lambda", e.adversarial_lambda);
  e.aux_weight = c.get_double("embedder.aux_weight", e.aux_weight);
  e.window_len = c.get_size("embedder.window_len", e.window_len);
  e.hop = c.get_size("embedder.hop", e.hop);
  rc.embedder_train.epochs = c.get_size("train.embedder_epochs", rc.embedder_train.epochs);
  rc.embedder_train.lr = c.get_double("train.embedder_lr", rc.embedder_train.lr);

  rc.systems = c.get_list("train.systems", "baseline");
  rc.resume = c.get_bool("train.resume", false);
  rc.with_vad = c.get_bool("train.vad", true);
  rc.with_cpd = c.get_bool("train.cpd", true);

  rc.vad.acoustic_dim = s.feature_dim;
  rc.vad.context = c.get_size("vad.context", rc.vad.context);
  rc.vad.hidden = c.get_size("vad.hidden", rc.vad.hidden);
  rc.vad.layers = c.get_size("vad.layers", rc.vad.layers);
  rc.vad_train.epochs = c.get_size("train.vad_epochs", rc.vad_train.epochs);
  rc.vad_train.lr = c.get_double("train.vad_lr", rc.vad_train.lr);
  rc.vad_sample_target = c.get_size("train.vad_sample_target", rc.vad_sample_target);

  rc.cpd.acoustic_dim = s.feature_dim;
  rc.cpd.context = c.get_size("cpd.context", rc.cpd.context);
  rc.cpd.rnn_hidden = c.get_size("cpd.rnn_hidden", rc.cpd.rnn_hidden);
  rc.cpd.tdnn_left = c.get_size("cpd.tdnn_left", rc.cpd.tdnn_left);
  rc.cpd.tdnn_right = c.get_size("cpd.tdnn_right", rc.cpd.tdnn_right);
  rc.cpd.tdnn_hidden = c.get_size("cpd.tdnn_hidden", rc.cpd.tdnn_hidden);
  rc.cpd.tdnn_out = c.get_size("cpd.tdnn_out", rc.cpd.tdnn_out);
  rc.cpd_train.epochs = c.get_size("train.cpd_epochs", rc.cpd_train.epochs);
  rc.cpd_train.lr = c.get_double("train.cpd_lr", rc.cpd_train.lr);
  rc.cpd_negatives_per_positive =
      c.get_size("train.cpd_negatives_per_positive", rc.cpd_negatives_per_positive);
  rc.cpd_max_examples = c.get_size("train.cpd_max_examples", rc.cpd_max_examples);

  rc.regime = parse_regime(c.get_string("diarise.regime", "reference"));
  rc.system = c.get_string("diarise.system", rc.system);
  rc.error_rate = c.get_double("diarise.error_rate", rc.error_rate);
  rc.meeting_set = c.get_string("diarise.set", rc.meeting_set);
  rc.vad_threshold = c.get_double("diarise.vad_threshold", rc.vad_threshold);
  rc.vad_min_gap = c.get_size("diarise.vad_min_gap", rc.vad_min_gap);
  rc.vad_min_len = c.get_size("diarise.vad_min_len", rc.vad_min_len);
  rc.cpd_threshold = c.get_double("diarise.cpd_threshold", rc.cpd_threshold);
  rc.cpd_min_gap = c.get_size("diarise.cpd_min_gap", rc.cpd_min_gap);
  rc.min_segment_len = c.get_size("diarise.min_segment_len", rc.min_segment_len);
  rc.cluster_percentile = c.get_double("diarise.percentile", rc.cluster_percentile);
  rc.pass1_percentile = c.get_double("diarise.pass1_percentile", rc.cluster_percentile);
  rc.k_max = c.get_size("diarise.k_max", rc.k_max);
  rc.retime = c.get_string("diarise.hyp_retime", "reference") == "subdivide"
                  ? content::HypRetime::kSubdivide
                  : content::HypRetime::kKeepReference;
  rc.collar = c.get_double("score.collar", rc.collar);
  rc.dump_affinity = c.get_bool("diarise.dump_affinity", false);

  rc.exp_systems = c.get_list(
      "experiment.systems",
      "baseline,multitask,adversarial,case_p,case_c,case_pc,case_w,case_wpc");
  rc.exp_regimes =
      c.get_list("experiment.regimes", "reference,manual-hypothesis,automatic-hypothesis");
  rc.exp_error_rates = c.get_double_list("experiment.error_rates", "0,0.2,0.4");
  if (c.has("experiment.seeds")) {
    for (const std::string& t : c.get_list("experiment.seeds", "")) {
      rc.exp_seeds.push_back(std::stoull(t));
    }
  } else {
    for (std::uint64_t k = 0; k < 5; ++k) rc.exp_seeds.push_back(rc.seed + k);
  }
  rc.p_grid = c.get_double_list("experiment.p_grid", "60,80");
  return rc;
}

/// Embedder configuration for a named system: baseline, multitask,
/// adversarial, or case_<levels> with levels drawn from {p, c, w}.
inline models::EmbedderConfig system_config(const RunConfig& rc, const std::string& system) {
  models::EmbedderConfig cfg = rc.embedder;
  cfg.levels = content::LevelSet{};
  cfg.mode = models::TrainingMode::kPlain;
  if (system == "baseline") {
    return cfg;
  }
  if (system == "multitask") {
    cfg.mode = models::TrainingMode::kMultitask;
    return cfg;
  }
  if (system == "adversarial") {
    cfg.mode = models::TrainingMode::kAdversarial;
    return cfg;
  }
  if (system.rfind("case_", 0) == 0) {
    cfg.levels = content::LevelSet::parse(system.substr(5));
    if (!cfg.levels.any()) {
      throw std::invalid_argument("system '" + system + "' names no content level");
    }
    return cfg;
  }
  throw std::invalid_argument("unknown system '" + system + "'");
}

// ---------------------------------------------------------------------------
// Audited corpus access
// ---------------------------------------------------------------------------

enum class Consumer { kPipeline, kSimulator, kScorer };

inline const char* consumer_name(Consumer c) {
  switch (c) {
    case Consumer::kPipeline: return "pipeline";
    case Consumer::kSimulator: return "simulator";
    case Consumer::kScorer: return "scorer";
  }
  return "?";
}

struct AccessEvent {
  std::string item;
  Consumer consumer;
};

/// All corpus file access funnels through here so tests can audit exactly
/// which artifacts each pipeline stage touched.
class CorpusReader {
 public:
  CorpusReader(std::string dir, std::size_t word_table_width = 300)
      : dir_(std::move(dir)) {
    manifest_ = synthdata::read_manifest(dir_ + "/manifest.txt");
    phone_inv_ = content::load_inventory(dir_ + "/phones.txt", content::Level::kPhone);
    char_inv_ = content::load_inventory(dir_ + "/chars.txt", content::Level::kCharacter);
    lexicon_ = content::load_lexicon(dir_ + "/lexicon.txt", phone_inv_, char_inv_);
    word_table_ =
        content::WordTable(lexicon_.words.size(), manifest_.word_table_seed, word_table_width);
  }

  const synthdata::Manifest& manifest() const { return manifest_; }
  const content::UnitInventory& phone_inventory() const { return phone_inv_; }
  const content::UnitInventory& char_inventory() const { return char_inv_; }
  const content::Lexicon& lexicon() const { return lexicon_; }
  const content::WordTable& word_table() const { return word_table_; }
  const std::string& dir() const { return dir_; }

  features::FrameMatrix features(const std::string& meeting, Consumer c) const {
    log_.push_back({meeting + ".feat", c});
    return features::load_features(dir_ + "/" + meeting + ".feat");
  }

  std::vector<scoring::RttmRecord> reference_rttm(const std::string& meeting,
                                                  Consumer c) const {
    log_.push_back({meeting + ".rttm", c});
    return scoring::parse_rttm(read_text(dir_ + "/" + meeting + ".rttm"));
  }

  content::AlignmentTrack reference_track(const std::string& meeting, content::Level level,
                                          Consumer c) const {
    const char* suffix = level == content::Level::kPhone
                             ? ".phone.ctm"
                             : level == content::Level::kCharacter ? ".char.ctm" : ".word.ctm";
    log_.push_back({meeting + suffix, c});
    const content::UnitInventory* inv = &phone_inv_;
    content::UnitInventory word_inv;
    if (level == content::Level::kCharacter) inv = &char_inv_;
    if (level == content::Level::kWord) {
      word_inv = lexicon_.word_inventory(word_table_.width());
      inv = &word_inv;
    }
    auto named = content::parse_ctm(read_text(dir_ + "/" + meeting + suffix), *inv,
                                    manifest_.frame_period);
    for (auto& nt : named) {
      if (nt.recording == meeting) return std::move(nt.track);
    }
    throw std::runtime_error("corpus: no alignment for '" + meeting + "' in " + suffix);
  }

  content::AlignmentSet reference_alignments(const std::string& meeting, Consumer c) const {
    content::AlignmentSet set;
    set.phone = reference_track(meeting, content::Level::kPhone, c);
    set.character = reference_track(meeting, content::Level::kCharacter, c);
    set.word = reference_track(meeting, content::Level::kWord, c);
    return set;
  }

  const std::vector<AccessEvent>& access_log() const { return log_; }
  void clear_access_log() { log_.clear(); }

 private:
  static std::string read_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("corpus: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  }

  std::string dir_;
  synthdata::Manifest manifest_;
  content::UnitInventory phone_inv_, char_inv_;
  content::Lexicon lexicon_;
  content::WordTable word_table_;
  mutable std::vector<AccessEvent> log_;
};

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

struct RefSegment {
  features::FrameSpan span;
  std::string speaker;
};

inline std::vector<RefSegment> segments_from_rttm(const std::vector<scoring::RttmRecord>& recs,
                                                  double period) {
  std::vector<RefSegment> out;
  for (const auto& r : recs) {
    RefSegment s;
    s.span.start = features::seconds_to_frames(r.onset, period);
    s.span.end = features::seconds_to_frames(r.onset + r.duration, period);
    s.speaker = r.speaker;
    if (s.span.end > s.span.start) out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end(), [](const RefSegment& a, const RefSegment& b) {
    return a.span.start < b.span.start;
  });
  return out;
}

/// Content rows for the whole meeting, restricted to the configured levels.
inline Tensor2 content_matrix(const content::AlignmentSet& set, std::size_t num_frames,
                              const models::EmbedderConfig& cfg, const CorpusReader& reader) {
  std::vector<const content::AlignmentTrack*> tracks;
  if (cfg.levels.phone) tracks.push_back(&set.phone);
  if (cfg.levels.character) tracks.push_back(&set.character);
  if (cfg.levels.word) tracks.push_back(&set.word);
  std::map<content::Level, content::UnitInventory> invs;
  invs[content::Level::kPhone] = reader.phone_inventory();
  invs[content::Level::kCharacter] = reader.char_inventory();
  return content::expand_alignment(tracks, num_frames, invs, reader.word_table());
}

/// Speech spans from per-frame posteriors: threshold, close short gaps,
/// drop short runs.
inline std::vector<features::FrameSpan> posterior_segments(const std::vector<double>& post,
                                                           double threshold,
                                                           std::size_t min_gap,
                                                           std::size_t min_len) {
  std::vector<features::FrameSpan> runs;
  std::size_t start = 0;
  bool in_run = false;
  for (std::size_t t = 0; t <= post.size(); ++t) {
    const bool speech = t < post.size() && post[t] >= threshold;
    if (speech && !in_run) {
      start = t;
      in_run = true;
    } else if (!speech && in_run) {
      runs.push_back({start, t});
      in_run = false;
    }
  }
  std::vector<features::FrameSpan> merged;
  for (const auto& r : runs) {
    if (!merged.empty() && r.start - merged.back().end < min_gap) {
      merged.back().end = r.end;
    } else {
      merged.push_back(r);
    }
  }
  std::vector<features::FrameSpan> out;
  for (const auto& r : merged) {
    if (r.length() >= min_len) out.push_back(r);
  }
  return out;
}

inline Tensor2 slice_rows(const Tensor2& m, std::size_t a, std::size_t b) {
  Tensor2 out(b - a, m.cols);
  std::copy(m.row_ptr(a), m.row_ptr(a) + (b - a) * m.cols, out.data.begin());
  return out;
}

/// Hypothesis RTTM records from per-segment cluster labels; exactly adjacent
/// same-speaker segments merge into one record.
inline std::vector<scoring::RttmRecord> labels_to_records(
    const std::string& meeting, const std::vector<features::FrameSpan>& segments,
    const std::vector<int>& labels, double period) {
  std::vector<scoring::RttmRecord> out;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const std::string speaker = "c" + std::to_string(labels[i]);
    const double onset = features::frames_to_seconds(segments[i].start, period);
    const double dur = features::frames_to_seconds(segments[i].length(), period);
    if (!out.empty() && out.back().speaker == speaker &&
        out.back().onset + out.back().duration >= onset - 1e-9) {
      out.back().duration = onset + dur - out.back().onset;
    } else {
      out.push_back({meeting, onset, dur, speaker});
    }
  }
  return out;
}

struct Extraction {
  std::vector<features::FrameSpan> segments;
  Tensor2 embeddings;              // N x dvector_dim
  std::vector<int> segment_of_window;
};

inline Extraction extract_meeting(const features::FrameMatrix& meeting,
                                  const std::vector<features::FrameSpan>& segments,
                                  const ndiff::ParamStore& ps,
                                  const models::EmbedderConfig& cfg, const Tensor2* content,
                                  const std::string& meeting_id) {
  Extraction ex;
  ex.segments = segments;
  const auto embs =
      models::extract_window_dvectors(meeting, segments, ps, cfg, content, meeting_id);
  ex.embeddings = Tensor2(embs.size(), cfg.dvector_dim);
  ex.segment_of_window.resize(embs.size());
  for (std::size_t i = 0; i < embs.size(); ++i) {
    std::copy(embs[i].vector.begin(), embs[i].vector.end(), ex.embeddings.row_ptr(i));
    ex.segment_of_window[i] = embs[i].segment_id;
  }
  return ex;
}

inline std::vector<scoring::RttmRecord> cluster_and_assign(const Extraction& ex,
                                                           double percentile,
                                                           std::size_t k_max,
                                                           std::uint64_t seed,
                                                           const std::string& meeting_id,
                                                           double period) {
  if (ex.segments.empty()) return {};
  std::vector<int> labels;
  if (ex.embeddings.rows < 2) {
    labels.assign(ex.segments.size(), 0);
  } else {
    const cluster::ClusterResult result =
        cluster::spectral_cluster(ex.embeddings, percentile, k_max, seed);
    labels = cluster::assign_segments(ex.segments.size(), ex.embeddings,
                                      ex.segment_of_window, result);
  }
  return labels_to_records(meeting_id, ex.segments, labels, period);
}

// ---------------------------------------------------------------------------
// Diarisation of one meeting in one of the three alignment regimes
// ---------------------------------------------------------------------------

struct MeetingDiarisation {
  std::vector<scoring::RttmRecord> pass1;  // automatic regime only
  std::vector<scoring::RttmRecord> final_records;
};

struct Checkpoints {
  const ndiff::ParamStore* system = nullptr;    // the embedder under test
  const ndiff::ParamStore* baseline = nullptr;  // pass 1 of the two-pass protocol
  const ndiff::ParamStore* vad = nullptr;
  const ndiff::ParamStore* cpd = nullptr;
};

/// Automatic segmentation: VAD speech regions split at CPD change points.
inline std::vector<features::FrameSpan> automatic_segments(
    const features::FrameMatrix& meeting, const RunConfig& rc, const ndiff::ParamStore& vad_ps,
    const ndiff::ParamStore& cpd_ps) {
  const std::vector<double> post = models::vad_classify(meeting, vad_ps, rc.vad);
  const auto regions =
      posterior_segments(post, rc.vad_threshold, rc.vad_min_gap, rc.vad_min_len);
  std::vector<features::FrameSpan> segments;
  for (const auto& region : regions) {
    const Tensor2 slice = slice_rows(meeting.frames, region.start, region.end);
    const std::vector<double> scores = models::cpd_score(slice, cpd_ps, rc.cpd);
    std::vector<std::size_t> changes =
        models::pick_changes(scores, rc.cpd_threshold, rc.cpd_min_gap);
    std::size_t prev = 0;
    std::vector<std::size_t> cuts;
    for (std::size_t c : changes) {
      if (c >= prev + rc.min_segment_len && region.length() - c >= rc.min_segment_len) {
        cuts.push_back(c);
        prev = c;
      }
    }
    std::size_t start = region.start;
    for (std::size_t c : cuts) {
      segments.push_back({start, region.start + c});
      start = region.start + c;
    }
    segments.push_back({start, region.end});
  }
  return segments;
}

inline MeetingDiarisation diarise_meeting(const CorpusReader& reader, const RunConfig& rc,
                                          const std::string& system,
                                          const models::EmbedderConfig& cfg,
                                          const Checkpoints& ckpt,
                                          const std::string& meeting_id, Regime regime,
                                          double error_rate, double percentile) {
  MeetingDiarisation result;
  const double period = reader.manifest().frame_period;
  const features::FrameMatrix meeting = reader.features(meeting_id, Consumer::kPipeline);
  const std::uint64_t cluster_seed = synthdata::derive_seed(rc.seed, fnv1a(meeting_id) ^
                                                                         fnv1a(system));

  if (regime == Regime::kAutomaticHypothesis) {
    if (ckpt.vad == nullptr || ckpt.cpd == nullptr || ckpt.baseline == nullptr) {
      throw std::invalid_argument(
          "automatic-hypothesis regime requires vad, cpd and baseline checkpoints");
    }
    const auto segments = automatic_segments(meeting, rc, *ckpt.vad, *ckpt.cpd);
    models::EmbedderConfig base_cfg = cfg;
    base_cfg.levels = content::LevelSet{};
    base_cfg.mode = models::TrainingMode::kPlain;
    const Extraction pass1_ex =
        extract_meeting(meeting, segments, *ckpt.baseline, base_cfg, nullptr, meeting_id);
    const std::uint64_t pass1_seed =
        synthdata::derive_seed(rc.seed, fnv1a(meeting_id) ^ fnv1a("baseline"));
    result.pass1 = cluster_and_assign(pass1_ex, rc.pass1_percentile, rc.k_max, pass1_seed,
                                      meeting_id, period);
    if (!cfg.levels.any()) {
      // pass 2 with a content-blind embedder is pass 1 re-clustered; for the
      // baseline itself the pass-1 result stands
      if (system == "baseline") {
        result.final_records = result.pass1;
      } else {
        const Extraction ex =
            extract_meeting(meeting, segments, *ckpt.system, cfg, nullptr, meeting_id);
        result.final_records =
            cluster_and_assign(ex, percentile, rc.k_max, cluster_seed, meeting_id, period);
      }
      return result;
    }
    // simulated ASR decodes the automatic segments; word timing is
    // subdivided, reference phone/character tracks are never read here
    const content::AlignmentTrack words =
        reader.reference_track(meeting_id, content::Level::kWord, Consumer::kSimulator);
    const content::AlignmentSet hyp = content::simulate_hypothesis(
        words, nullptr, nullptr, reader.lexicon(), segments, error_rate,
        synthdata::derive_seed(rc.seed, fnv1a(meeting_id) ^ 0x517eull),
        content::HypRetime::kSubdivide);
    const Tensor2 cm = content_matrix(hyp, meeting.num_frames(), cfg, reader);
    const Extraction ex =
        extract_meeting(meeting, segments, *ckpt.system, cfg, &cm, meeting_id);
    result.final_records =
        cluster_and_assign(ex, percentile, rc.k_max, cluster_seed, meeting_id, period);
    return result;
  }

  // manual segmentation regimes
  const auto refs = reader.reference_rttm(meeting_id, Consumer::kPipeline);
  const auto ref_segments = segments_from_rttm(refs, period);
  std::vector<features::FrameSpan> segments;
  for (const auto& rs : ref_segments) segments.push_back(rs.span);

  Tensor2 cm;
  const Tensor2* cm_ptr = nullptr;
  if (cfg.levels.any()) {
    if (regime == Regime::kReference) {
      const content::AlignmentSet set =
          reader.reference_alignments(meeting_id, Consumer::kPipeline);
      cm = content_matrix(set, meeting.num_frames(), cfg, reader);
    } else {
      const content::AlignmentSet ref_set =
          reader.reference_alignments(meeting_id, Consumer::kSimulator);
      const content::AlignmentSet hyp = content::simulate_hypothesis(
          ref_set.word, &ref_set.phone, &ref_set.character, reader.lexicon(), segments,
          error_rate, synthdata::derive_seed(rc.seed, fnv1a(meeting_id) ^ 0x517eull),
          rc.retime);
      cm = content_matrix(hyp, meeting.num_frames(), cfg, reader);
    }
    cm_ptr = &cm;
  }
  const Extraction ex = extract_meeting(meeting, segments, *ckpt.system, cfg, cm_ptr,
                                        meeting_id);
  result.final_records =
      cluster_and_assign(ex, percentile, rc.k_max, cluster_seed, meeting_id, period);
  return result;
}

// ---------------------------------------------------------------------------
// Training data assembly
// ---------------------------------------------------------------------------

struct TrainingSets {
  std::vector<models::TrainingWindow> train;
  std::vector<models::TrainingWindow> heldout;
  std::size_t n_speakers = 0;
  std::size_t n_phones = 0;
};

inline TrainingSets build_training_windows(const CorpusReader& reader, const RunConfig& rc,
                                           const models::EmbedderConfig& cfg) {
  const synthdata::Manifest& manifest = reader.manifest();
  TrainingSets sets;
  sets.n_phones = reader.phone_inventory().size();

  std::set<std::string> speaker_names;
  struct MeetingData {
    features::FrameMatrix feats;
    std::vector<RefSegment> segments;
    Tensor2 content;
    std::vector<int> phone_frames;
  };
  std::vector<MeetingData> data;
  for (const std::string& mid : manifest.train) {
    MeetingData md;
    md.feats = reader.features(mid, Consumer::kPipeline);
    md.segments = segments_from_rttm(reader.reference_rttm(mid, Consumer::kPipeline),
                                     manifest.frame_period);
    const bool need_content = cfg.levels.any();
    const bool need_phones = cfg.mode != models::TrainingMode::kPlain;
    if (need_content || need_phones) {
      const content::AlignmentSet set =
          reader.reference_alignments(mid, Consumer::kPipeline);
      if (need_content) md.content = content_matrix(set, md.feats.num_frames(), cfg, reader);
      if (need_phones) {
        md.phone_frames.assign(md.feats.num_frames(), -1);
        for (const auto& e : set.phone.entries) {
          for (std::size_t fr = e.start_frame; fr < e.end_frame; ++fr) {
            md.phone_frames[fr] = e.unit;
          }
        }
      }
    }
    for (const auto& seg : md.segments) speaker_names.insert(seg.speaker);
    data.push_back(std::move(md));
  }
  std::map<std::string, int> speaker_class;
  for (const std::string& name : speaker_names) {
    const int id = static_cast<int>(speaker_class.size());
    speaker_class[name] = id;
  }
  sets.n_speakers = speaker_class.size();

  for (std::size_t mi = 0; mi < data.size(); ++mi) {
    const std::string& mid = manifest.train[mi];
    const MeetingData& md = data[mi];
    const auto held_it = manifest.heldout.find(mid);
    for (std::size_t si = 0; si < md.segments.size(); ++si) {
      const RefSegment& seg = md.segments[si];
      const bool held = held_it != manifest.heldout.end() && held_it->second.count(si);
      const auto plan = features::slide_windows(seg.span.length(), cfg.window_len, cfg.hop);
      for (const auto& w : plan.spans) {
        const std::size_t a = seg.span.start + w.start;
        const std::size_t b = seg.span.start + w.end;
        models::TrainingWindow tw;
        tw.acoustic = slice_rows(md.feats.frames, a, b);
        if (cfg.levels.any()) tw.content = slice_rows(md.content, a, b);
        tw.speaker = speaker_class.at(seg.speaker);
        if (!md.phone_frames.empty()) {
          tw.phone_frames.assign(md.phone_frames.begin() + static_cast<long>(a),
                                 md.phone_frames.begin() + static_cast<long>(b));
        }
        (held ? sets.heldout : sets.train).push_back(std::move(tw));
      }
    }
  }
  return sets;
}

/// Frame-labeled VAD training rows, deterministically strided to the target
/// sample count.
inline std::pair<Tensor2, std::vector<int>> build_vad_data(const CorpusReader& reader,
                                                           const RunConfig& rc) {
  const synthdata::Manifest& manifest = reader.manifest();
  struct Ref {
    features::FrameMatrix feats;
    std::vector<char> speech;
  };
  std::vector<Ref> meetings;
  std::size_t total = 0;
  for (const std::string& mid : manifest.train) {
    Ref r;
    r.feats = reader.features(mid, Consumer::kPipeline);
    r.speech.assign(r.feats.num_frames(), 0);
    for (const auto& seg : segments_from_rttm(reader.reference_rttm(mid, Consumer::kPipeline),
                                              manifest.frame_period)) {
      for (std::size_t fr = seg.span.start; fr < seg.span.end && fr < r.speech.size(); ++fr) {
        r.speech[fr] = 1;
      }
    }
    total += r.feats.num_frames();
    meetings.push_back(std::move(r));
  }
  const std::size_t stride = std::max<std::size_t>(1, total / std::max<std::size_t>(
                                                              rc.vad_sample_target, 1));
  std::vector<std::pair<std::size_t, std::size_t>> picks;  // meeting, frame
  for (std::size_t mi = 0; mi < meetings.size(); ++mi) {
    for (std::size_t fr = 0; fr < meetings[mi].feats.num_frames(); fr += stride) {
      picks.emplace_back(mi, fr);
    }
  }
  const std::size_t width = rc.vad.input_width();
  Tensor2 rows(picks.size(), width);
  std::vector<int> labels(picks.size());
  for (std::size_t i = 0; i < picks.size(); ++i) {
    const auto [mi, fr] = picks[i];
    const Tensor2& f = meetings[mi].feats.frames;
    for (long o = -static_cast<long>(rc.vad.context); o <= static_cast<long>(rc.vad.context);
         ++o) {
      long j = static_cast<long>(fr) + o;
      if (j < 0) j = 0;
      if (j >= static_cast<long>(f.rows)) j = static_cast<long>(f.rows) - 1;
      std::copy(f.row_ptr(static_cast<std::size_t>(j)),
                f.row_ptr(static_cast<std::size_t>(j)) + f.cols,
                rows.row_ptr(i) + static_cast<std::size_t>(o + static_cast<long>(rc.vad.context)) *
                                      f.cols);
    }
    labels[i] = meetings[mi].speech[fr];
  }
  return {std::move(rows), std::move(labels)};
}

struct CpdData {
  std::vector<std::unique_ptr<Tensor2>> regions;
  std::vector<models::CpdExample> examples;
};

/// CPD examples from continuous-speech runs of the training meetings:
/// positives within +-2 frames of an internal speaker change, negatives at
/// least 10 frames from any change.
inline CpdData build_cpd_data(const CorpusReader& reader, const RunConfig& rc) {
  const synthdata::Manifest& manifest = reader.manifest();
  CpdData data;
  std::mt19937_64 rng(synthdata::derive_seed(rc.seed, 777));
  std::vector<std::pair<std::size_t, std::size_t>> candidates;  // region idx, frame
  std::vector<std::vector<std::size_t>> region_changes;
  for (const std::string& mid : manifest.train) {
    const features::FrameMatrix feats = reader.features(mid, Consumer::kPipeline);
    const auto segments = segments_from_rttm(reader.reference_rttm(mid, Consumer::kPipeline),
                                             manifest.frame_period);
    // merge exactly adjacent segments into continuous speech runs
    std::size_t i = 0;
    while (i < segments.size()) {
      std::size_t j = i;
      std::vector<std::size_t> changes;  // region-relative change frames
      while (j + 1 < segments.size() &&
             segments[j + 1].span.start == segments[j].span.end) {
        if (segments[j + 1].speaker != segments[j].speaker) {
          changes.push_back(segments[j + 1].span.start - segments[i].span.start);
        }
        ++j;
      }
      const std::size_t len = segments[j].span.end - segments[i].span.start;
      if (len > 2 * rc.cpd.context) {
        data.regions.push_back(std::make_unique<Tensor2>(
            slice_rows(feats.frames, segments[i].span.start, segments[j].span.end)));
        region_changes.push_back(changes);
      }
      i = j + 1;
    }
  }
  // positives
  for (std::size_t ri = 0; ri < data.regions.size(); ++ri) {
    const std::size_t len = data.regions[ri]->rows;
    for (std::size_t c : region_changes[ri]) {
      for (long d = -2; d <= 2; ++d) {
        const long t = static_cast<long>(c) + d;
        if (t >= static_cast<long>(rc.cpd.context) &&
            t + static_cast<long>(rc.cpd.context) <= static_cast<long>(len)) {
          data.examples.push_back({data.regions[ri].get(), static_cast<std::size_t>(t), 1});
        }
      }
    }
  }
  const std::size_t n_pos = data.examples.size();
  // negatives, uniformly sampled away from changes
  std::size_t want_neg = n_pos * rc.cpd_negatives_per_positive;
  if (n_pos == 0) want_neg = std::min<std::size_t>(rc.cpd_max_examples, 200);
  std::size_t guard = 0;
  while (data.examples.size() < n_pos + want_neg && guard++ < 100000 &&
         !data.regions.empty()) {
    std::uniform_int_distribution<std::size_t> rpick(0, data.regions.size() - 1);
    const std::size_t ri = rpick(rng);
    const std::size_t len = data.regions[ri]->rows;
    if (len <= 2 * rc.cpd.context) continue;
    std::uniform_int_distribution<std::size_t> fpick(rc.cpd.context, len - rc.cpd.context);
    const std::size_t t = fpick(rng);
    bool near_change = false;
    for (std::size_t c : region_changes[ri]) {
      const std::size_t gap = t > c ? t - c : c - t;
      if (gap < 10) {
        near_change = true;
        break;
      }
    }
    if (!near_change) data.examples.push_back({data.regions[ri].get(), t, 0});
  }
  if (data.examples.size() > rc.cpd_max_examples) {
    std::shuffle(data.examples.begin(), data.examples.end(), rng);
    data.examples.resize(rc.cpd_max_examples);
  }
  return data;
}

}  // namespace pipeline
}  // namespace casediar

#endif  // CASEDIAR_PIPELINE_HPP_
