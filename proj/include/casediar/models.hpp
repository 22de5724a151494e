// casediar/models.hpp

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

#ifndef CASEDIAR_MODELS_HPP_
#define CASEDIAR_MODELS_HPP_

#include <algorithm>
#include <cstdint>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "casediar/content.hpp"
#include "casediar/features.hpp"
#include "casediar/gradcheck.hpp"
#include "casediar/graph.hpp"
#include "casediar/params.hpp"
#include "casediar/tensor.hpp"

namespace casediar {
namespace models {

using ndiff::AdamConfig;
using ndiff::AdamState;
using ndiff::ParamStore;
using ndiff::Var;

// ---------------------------------------------------------------------------
// Speaker embedder
// ---------------------------------------------------------------------------

enum class TrainingMode { kPlain, kMultitask, kAdversarial };

struct EmbedderConfig {
  std::size_t acoustic_dim = 40;
  content::LevelSet levels;           // empty set = baseline d-vectors
  std::size_t phone_dim = 48;
  std::size_t char_dim = 27;
  std::size_t word_dim = 300;         // incoming word-vector width
  std::size_t word_proj_dim = 100;    // learned projection output width
  std::size_t context_left = 7;
  std::size_t context_right = 7;
  std::vector<std::size_t> hidden = {256, 256, 256};
  std::size_t dvector_dim = 128;
  std::size_t attention_heads = 4;
  std::size_t attention_dim = 64;
  double penalty_weight = 1.0;        // mu on the attention penalty
  ndiff::LossConfig loss;
  TrainingMode mode = TrainingMode::kPlain;
  double adversarial_lambda = 1.0;
  double aux_weight = 1.0;            // weight on the phone classification loss
  std::size_t window_len = 200;       // frames per extraction window
  std::size_t hop = 100;

  void validate() const {
    if (dvector_dim < 1) throw std::invalid_argument("EmbedderConfig: dvector_dim must be >= 1");
    if (attention_heads < 1) throw std::invalid_argument("EmbedderConfig: need >= 1 head");
    if (hidden.empty()) throw std::invalid_argument("EmbedderConfig: no hidden layers");
    if (mode != TrainingMode::kAdversarial && adversarial_lambda != 1.0 &&
        adversarial_lambda < 0.0) {
      throw std::invalid_argument("EmbedderConfig: lambda only meaningful in adversarial mode");
    }
    if (adversarial_lambda < 0.0) {
      throw std::invalid_argument("EmbedderConfig: adversarial lambda must be >= 0");
    }
    loss.validate();
  }

  /// Width of the expand_alignment content rows for the configured levels.
  std::size_t content_width() const {
    std::size_t w = 0;
    if (levels.phone) w += phone_dim;
    if (levels.character) w += char_dim;
    if (levels.word) w += word_dim;
    return w;
  }

  /// Per-frame model input width after the word projection.
  std::size_t frame_input_width() const {
    std::size_t w = acoustic_dim;
    if (levels.phone) w += phone_dim;
    if (levels.character) w += char_dim;
    if (levels.word) w += word_proj_dim;
    return w;
  }

  std::size_t spliced_width() const {
    return frame_input_width() * (context_left + context_right + 1);
  }
};

/// One 128-d (by default) speaker embedding per fixed-length window.
struct WindowEmbedding {
  std::vector<double> vector;
  features::FrameSpan span;  // meeting-global frame range
  int segment_id = -1;
  std::string meeting_id;
};

using ParamFn = std::function<Var(const std::string&)>;

inline ParamFn trainable(ParamStore& ps) {
  return [&ps](const std::string& name) { return ps.use(name); };
}

inline ParamFn frozen(const ParamStore& ps) {
  return [&ps](const std::string& name) { return ps.frozen(name); };
}

inline ParamStore init_embedder_params(const EmbedderConfig& cfg, std::size_t n_speakers,
                                       std::size_t n_phones, std::uint64_t seed) {
  cfg.validate();
  ParamStore ps(seed);
  if (cfg.levels.word) {
    ps.add("wproj.W", cfg.word_dim, cfg.word_proj_dim);
    ps.add("wproj.b", 1, cfg.word_proj_dim, ndiff::Init::kZeros);
  }
  std::size_t in = cfg.spliced_width();
  for (std::size_t l = 0; l < cfg.hidden.size(); ++l) {
    const std::string tag = "tdnn" + std::to_string(l + 1);
    ps.add(tag + ".W", in, cfg.hidden[l]);
    ps.add(tag + ".b", 1, cfg.hidden[l], ndiff::Init::kZeros);
    in = cfg.hidden[l];
  }
  ps.add("dvec.W", in, cfg.dvector_dim);
  ps.add("dvec.b", 1, cfg.dvector_dim, ndiff::Init::kZeros);
  ps.add("att.score.W", cfg.dvector_dim, cfg.attention_dim);
  ps.add("att.score.b", 1, cfg.attention_dim, ndiff::Init::kZeros);
  ps.add("att.head.W", cfg.attention_dim, cfg.attention_heads);
  ps.add("att.out.W", cfg.dvector_dim, cfg.dvector_dim);
  ps.add("att.out.b", 1, cfg.dvector_dim, ndiff::Init::kZeros);
  ps.add("spk.W", n_speakers, cfg.dvector_dim);
  if (cfg.loss.kind == ndiff::LossConfig::Kind::kSoftmaxCrossEntropy) {
    ps.add("spk.b", 1, n_speakers, ndiff::Init::kZeros);
  }
  if (cfg.mode != TrainingMode::kPlain) {
    ps.add("phone.W", cfg.dvector_dim, n_phones);
    ps.add("phone.b", 1, n_phones, ndiff::Init::kZeros);
  }
  ps.meta["kind"] = "embedder";
  return ps;
}

namespace detail {

/// Splice the per-frame inputs over [-left, +right] with edge replication,
/// built from gathers so gradients flow back to every frame.
inline Var splice_graph(const Var& frames, std::size_t left, std::size_t right) {
  std::vector<Var> blocks;
  blocks.reserve(left + right + 1);
  const std::size_t t = frames->value.rows;
  for (long o = -static_cast<long>(left); o <= static_cast<long>(right); ++o) {
    blocks.push_back(ndiff::gather_rows(frames, features::context_row_indices(t, o)));
  }
  return ndiff::concat_cols(blocks);
}

/// Acoustic frames plus (optionally) content rows to per-frame model inputs:
/// the word slice goes through the learned projection, everything is
/// concatenated, spliced and passed through the TDNN stack.
inline Var frame_dvector_graph(const Tensor2& acoustic, const Tensor2* content,
                               const EmbedderConfig& cfg, const ParamFn& param) {
  if (acoustic.cols != cfg.acoustic_dim) {
    throw std::invalid_argument("frame_dvectors: acoustic width " +
                                std::to_string(acoustic.cols) + " != configured " +
                                std::to_string(cfg.acoustic_dim));
  }
  std::vector<Var> parts{ndiff::constant(acoustic)};
  if (cfg.levels.any()) {
    if (content == nullptr) {
      throw std::invalid_argument("frame_dvectors: content levels " + cfg.levels.str() +
                                  " configured but no content rows supplied");
    }
    if (content->rows != acoustic.rows) {
      throw std::invalid_argument("frame_dvectors: content rows " +
                                  std::to_string(content->rows) + " != acoustic rows " +
                                  std::to_string(acoustic.rows));
    }
    if (content->cols != cfg.content_width()) {
      throw std::invalid_argument("frame_dvectors: content width " +
                                  std::to_string(content->cols) + " != configured " +
                                  std::to_string(cfg.content_width()));
    }
    Var c = ndiff::constant(*content);
    std::size_t off = 0;
    if (cfg.levels.phone) {
      parts.push_back(ndiff::slice_cols(c, off, off + cfg.phone_dim));
      off += cfg.phone_dim;
    }
    if (cfg.levels.character) {
      parts.push_back(ndiff::slice_cols(c, off, off + cfg.char_dim));
      off += cfg.char_dim;
    }
    if (cfg.levels.word) {
      Var w = ndiff::slice_cols(c, off, off + cfg.word_dim);
      parts.push_back(ndiff::affine(w, param("wproj.W"), param("wproj.b")));
    }
  }
  Var x = parts.size() == 1 ? parts[0] : ndiff::concat_cols(parts);
  Var h = splice_graph(x, cfg.context_left, cfg.context_right);
  for (std::size_t l = 0; l < cfg.hidden.size(); ++l) {
    const std::string tag = "tdnn" + std::to_string(l + 1);
    h = ndiff::relu(ndiff::affine(h, param(tag + ".W"), param(tag + ".b")));
  }
  return ndiff::affine(h, param("dvec.W"), param("dvec.b"));
}

struct PoolGraph {
  Var pooled;   // 1 x dvector_dim
  Var penalty;  // 1 x 1, ||A A^T - I||_F^2
};

/// Multi-head self-attentive pooling. Frames are first brought into a
/// canonical row order, which makes the pooled output and the penalty
/// bitwise invariant under any permutation of the input rows.
inline PoolGraph attentive_pool_graph(const Var& frame_dvecs, const EmbedderConfig& cfg,
                                      const ParamFn& param) {
  if (frame_dvecs->value.rows < 1) {
    throw std::invalid_argument("attentive_pool: no frames");
  }
  Var sorted = ndiff::gather_rows(frame_dvecs, ndiff::canonical_row_order(frame_dvecs->value));
  Var scores = ndiff::matmul(
      ndiff::tanh(ndiff::affine(sorted, param("att.score.W"), param("att.score.b"))),
      param("att.head.W"));                                      // T x H
  Var attention = ndiff::softmax_rows(ndiff::transpose(scores)); // H x T, rows sum to 1
  Var heads = ndiff::matmul(attention, sorted);                  // H x dvec
  Var pooled = ndiff::affine(ndiff::mean_rows(heads), param("att.out.W"), param("att.out.b"));
  Var penalty = ndiff::sum_sq(ndiff::add_scaled_identity(
      ndiff::matmul(attention, ndiff::transpose(attention)), -1.0));
  return {pooled, penalty};
}

inline Var speaker_logits_graph(const Var& pooled, const EmbedderConfig& cfg,
                                const ParamFn& param) {
  if (cfg.loss.kind == ndiff::LossConfig::Kind::kAngularSoftmax) {
    return ndiff::angular_softmax_logits(pooled, param("spk.W"), cfg.loss);
  }
  return ndiff::add_rowvec(ndiff::matmul(pooled, ndiff::transpose(param("spk.W"))),
                           param("spk.b"));
}

}  // namespace detail

/// Frame-level d-vectors for one window or segment (frozen parameters).
inline Tensor2 frame_dvectors(const Tensor2& acoustic, const Tensor2* content,
                              const EmbedderConfig& cfg, const ParamStore& ps) {
  return detail::frame_dvector_graph(acoustic, content, cfg, frozen(ps))->value;
}

struct PoolResult {
  std::vector<double> pooled;
  double penalty = 0.0;
};

/// Window-level pooling of frame d-vectors (frozen parameters).
inline PoolResult attentive_pool(const Tensor2& frame_dvecs, const EmbedderConfig& cfg,
                                 const ParamStore& ps) {
  auto g = detail::attentive_pool_graph(ndiff::constant(frame_dvecs), cfg, frozen(ps));
  PoolResult out;
  out.pooled = g.pooled->value.data;
  out.penalty = ndiff::scalar(g.penalty);
  return out;
}

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

/// One labeled fixed-length window of a training meeting.
struct TrainingWindow {
  Tensor2 acoustic;               // T x F
  Tensor2 content;                // T x content_width, may be empty for baseline
  int speaker = -1;               // class index
  std::vector<int> phone_frames;  // per-frame phone ids, -1 = unlabeled
};

struct TrainReport {
  std::vector<double> epoch_losses;
  std::vector<double> heldout_accuracy;
  std::size_t windows = 0;
  std::size_t heldout_windows = 0;

  std::string to_string() const {
    std::ostringstream out;
    char buf[128];
    out << "epoch  loss          heldout_acc\n";
    for (std::size_t e = 0; e < epoch_losses.size(); ++e) {
      const double acc = e < heldout_accuracy.size() ? heldout_accuracy[e] : -1.0;
      std::snprintf(buf, sizeof(buf), "%-5zu  %-12.6f  %.4f\n", e + 1, epoch_losses[e], acc);
      out << buf;
    }
    out << "train_windows " << windows << "\nheldout_windows " << heldout_windows << "\n";
    return out.str();
  }
};

struct TrainOptions {
  std::size_t epochs = 10;
  double lr = 1e-3;
};

/// Full training loss for one window under the configured mode.
inline Var window_loss_graph(const TrainingWindow& w, const EmbedderConfig& cfg,
                             const ParamFn& param) {
  const Tensor2* content = cfg.levels.any() ? &w.content : nullptr;
  Var fd = detail::frame_dvector_graph(w.acoustic, content, cfg, param);
  detail::PoolGraph pool = detail::attentive_pool_graph(fd, cfg, param);
  Var logits = detail::speaker_logits_graph(pool.pooled, cfg, param);
  Var loss = ndiff::softmax_cross_entropy(logits, {w.speaker});
  if (cfg.penalty_weight != 0.0) {
    loss = ndiff::add(loss, ndiff::scale(pool.penalty, cfg.penalty_weight));
  }
  if (cfg.mode != TrainingMode::kPlain) {
    bool labeled = false;
    for (int t : w.phone_frames) {
      if (t >= 0) {
        labeled = true;
        break;
      }
    }
    if (labeled) {
      Var input = cfg.mode == TrainingMode::kAdversarial
                      ? ndiff::gradient_reverse(fd, cfg.adversarial_lambda)
                      : fd;
      Var phone_logits = ndiff::affine(input, param("phone.W"), param("phone.b"));
      loss = ndiff::add(loss, ndiff::scale(ndiff::softmax_cross_entropy(phone_logits,
                                                                        w.phone_frames),
                                           cfg.aux_weight));
    }
  }
  return loss;
}

inline int classify_window(const TrainingWindow& w, const EmbedderConfig& cfg,
                           const ParamStore& ps) {
  const Tensor2* content = cfg.levels.any() ? &w.content : nullptr;
  auto param = frozen(ps);
  Var fd = detail::frame_dvector_graph(w.acoustic, content, cfg, param);
  detail::PoolGraph pool = detail::attentive_pool_graph(fd, cfg, param);
  Var logits = detail::speaker_logits_graph(pool.pooled, cfg, param);
  const Tensor2& l = logits->value;
  int best = 0;
  for (std::size_t c = 1; c < l.cols; ++c) {
    if (l.at(0, c) > l.at(0, best)) best = static_cast<int>(c);
  }
  return best;
}

/// Window-stochastic training, deterministic given the seed. Minimizes the
/// speaker loss plus mu times the attention penalty, plus the configured
/// auxiliary phone loss.
inline TrainReport train_embedder(const std::vector<TrainingWindow>& train,
                                  const std::vector<TrainingWindow>& heldout,
                                  const EmbedderConfig& cfg, ParamStore& ps,
                                  const TrainOptions& opt, std::uint64_t seed) {
  cfg.validate();
  std::set<int> speakers;
  for (const auto& w : train) speakers.insert(w.speaker);
  if (speakers.size() < 2) {
    throw std::invalid_argument("train_embedder: need at least 2 speakers, got " +
                                std::to_string(speakers.size()));
  }
  TrainReport report;
  report.windows = train.size();
  report.heldout_windows = heldout.size();
  std::mt19937_64 rng(seed);
  AdamState adam;
  AdamConfig adam_cfg;
  adam_cfg.lr = opt.lr;
  std::vector<std::size_t> order(train.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (std::size_t epoch = 0; epoch < opt.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    for (std::size_t i : order) {
      ps.zero_grads();
      Var loss = window_loss_graph(train[i], cfg, trainable(ps));
      loss_sum += ndiff::scalar(loss);
      ndiff::backward(loss);
      adam.step(ps, adam_cfg);
    }
    report.epoch_losses.push_back(loss_sum / static_cast<double>(train.size()));
    if (!heldout.empty()) {
      std::size_t hits = 0;
      for (const auto& w : heldout) {
        if (classify_window(w, cfg, ps) == w.speaker) ++hits;
      }
      report.heldout_accuracy.push_back(static_cast<double>(hits) /
                                        static_cast<double>(heldout.size()));
    } else {
      report.heldout_accuracy.push_back(0.0);
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Window d-vector extraction
// ---------------------------------------------------------------------------

/// Embeddings for every sliding window of every segment; `content` covers
/// the whole meeting (rows 0..T) or is null for the baseline embedder.
inline std::vector<WindowEmbedding> extract_window_dvectors(
    const features::FrameMatrix& meeting, const std::vector<features::FrameSpan>& segments,
    const ParamStore& ps, const EmbedderConfig& cfg, const Tensor2* content,
    const std::string& meeting_id) {
  cfg.validate();
  if (cfg.levels.any() && content == nullptr) {
    throw std::invalid_argument("extract_window_dvectors: content levels " +
                                cfg.levels.str() + " configured but no alignments supplied");
  }
  std::vector<features::FrameSpan> ordered = segments;
  std::sort(ordered.begin(), ordered.end(),
            [](const features::FrameSpan& a, const features::FrameSpan& b) {
              return a.start < b.start;
            });
  for (std::size_t i = 1; i < ordered.size(); ++i) {
    if (ordered[i].start < ordered[i - 1].end) {
      throw std::invalid_argument("extract_window_dvectors: overlapping segments");
    }
  }
  std::vector<WindowEmbedding> out;
  for (std::size_t si = 0; si < segments.size(); ++si) {
    const features::FrameSpan seg = segments[si];
    if (seg.end > meeting.num_frames() || seg.end <= seg.start) {
      throw std::invalid_argument("extract_window_dvectors: bad segment [" +
                                  std::to_string(seg.start) + "," + std::to_string(seg.end) +
                                  ")");
    }
    const features::WindowPlan plan =
        features::slide_windows(seg.length(), cfg.window_len, cfg.hop);
    for (const features::FrameSpan& w : plan.spans) {
      const std::size_t a = seg.start + w.start;
      const std::size_t b = seg.start + w.end;
      Tensor2 acoustic(b - a, meeting.dim());
      for (std::size_t r = a; r < b; ++r) {
        std::copy(meeting.frames.row_ptr(r), meeting.frames.row_ptr(r) + meeting.dim(),
                  acoustic.row_ptr(r - a));
      }
      Tensor2 cwin;
      const Tensor2* cptr = nullptr;
      if (cfg.levels.any()) {
        cwin = Tensor2(b - a, content->cols);
        for (std::size_t r = a; r < b; ++r) {
          std::copy(content->row_ptr(r), content->row_ptr(r) + content->cols,
                    cwin.row_ptr(r - a));
        }
        cptr = &cwin;
      }
      auto param = frozen(ps);
      Var fd = detail::frame_dvector_graph(acoustic, cptr, cfg, param);
      detail::PoolGraph pool = detail::attentive_pool_graph(fd, cfg, param);
      WindowEmbedding emb;
      emb.vector = pool.pooled->value.data;
      emb.span = {a, b};
      emb.segment_id = static_cast<int>(si);
      emb.meeting_id = meeting_id;
      for (double v : emb.vector) {
        if (!std::isfinite(v)) {
          throw std::runtime_error("extract_window_dvectors: non-finite embedding in " +
                                   meeting_id);
        }
      }
      out.push_back(std::move(emb));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Voice activity detection
// ---------------------------------------------------------------------------

struct VadConfig {
  std::size_t acoustic_dim = 40;
  std::size_t context = 27;  // frames on each side; 55-frame input window
  std::size_t hidden = 128;
  std::size_t layers = 7;

  std::size_t input_width() const { return acoustic_dim * (2 * context + 1); }
};

inline ParamStore init_vad_params(const VadConfig& cfg, std::uint64_t seed) {
  ParamStore ps(seed);
  std::size_t in = cfg.input_width();
  for (std::size_t l = 0; l < cfg.layers; ++l) {
    const std::string tag = "vad.l" + std::to_string(l + 1);
    ps.add(tag + ".W", in, cfg.hidden);
    ps.add(tag + ".b", 1, cfg.hidden, ndiff::Init::kZeros);
    in = cfg.hidden;
  }
  ps.add("vad.out.W", in, 2);
  ps.add("vad.out.b", 1, 2, ndiff::Init::kZeros);
  ps.meta["kind"] = "vad";
  return ps;
}

namespace detail {

inline Var vad_logits_graph(const Tensor2& spliced_rows, const VadConfig& cfg,
                            const ParamFn& param) {
  Var h = ndiff::constant(spliced_rows);
  for (std::size_t l = 0; l < cfg.layers; ++l) {
    const std::string tag = "vad.l" + std::to_string(l + 1);
    h = ndiff::relu(ndiff::affine(h, param(tag + ".W"), param(tag + ".b")));
  }
  return ndiff::affine(h, param("vad.out.W"), param("vad.out.b"));
}

}  // namespace detail

/// Per-frame speech posterior in [0, 1].
inline std::vector<double> vad_classify(const features::FrameMatrix& x, const ParamStore& ps,
                                        const VadConfig& cfg) {
  const Tensor2 spliced = features::splice_context(x.frames, cfg.context, cfg.context);
  std::vector<double> posterior(x.num_frames());
  const std::size_t batch = 512;
  for (std::size_t start = 0; start < spliced.rows; start += batch) {
    const std::size_t end = std::min(spliced.rows, start + batch);
    Tensor2 rows(end - start, spliced.cols);
    std::copy(spliced.row_ptr(start), spliced.row_ptr(start) + (end - start) * spliced.cols,
              rows.data.begin());
    Var logits = detail::vad_logits_graph(rows, cfg, frozen(ps));
    for (std::size_t r = start; r < end; ++r) {
      const double a = logits->value.at(r - start, 0);
      const double b = logits->value.at(r - start, 1);
      const double m = std::max(a, b);
      const double ea = std::exp(a - m), eb = std::exp(b - m);
      posterior[r] = eb / (ea + eb);
    }
  }
  return posterior;
}

/// Frame-labeled VAD training on pre-spliced rows.
inline TrainReport train_vad(const Tensor2& spliced_rows, const std::vector<int>& labels,
                             const VadConfig& cfg, ParamStore& ps, const TrainOptions& opt,
                             std::uint64_t seed) {
  if (spliced_rows.rows != labels.size()) {
    throw std::invalid_argument("train_vad: " + std::to_string(labels.size()) +
                                " labels for " + std::to_string(spliced_rows.rows) + " rows");
  }
  TrainReport report;
  report.windows = spliced_rows.rows;
  std::mt19937_64 rng(seed);
  AdamState adam;
  AdamConfig adam_cfg;
  adam_cfg.lr = opt.lr;
  std::vector<std::size_t> order(spliced_rows.rows);
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const std::size_t batch = 256;
  for (std::size_t epoch = 0; epoch < opt.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(order.size(), start + batch);
      Tensor2 rows(end - start, spliced_rows.cols);
      std::vector<int> targets(end - start);
      for (std::size_t i = start; i < end; ++i) {
        std::copy(spliced_rows.row_ptr(order[i]),
                  spliced_rows.row_ptr(order[i]) + spliced_rows.cols,
                  rows.row_ptr(i - start));
        targets[i - start] = labels[order[i]];
      }
      ps.zero_grads();
      Var loss = ndiff::softmax_cross_entropy(
          detail::vad_logits_graph(rows, cfg, trainable(ps)), targets);
      loss_sum += ndiff::scalar(loss);
      ndiff::backward(loss);
      adam.step(ps, adam_cfg);
      ++batches;
    }
    report.epoch_losses.push_back(loss_sum / static_cast<double>(batches));
    report.heldout_accuracy.push_back(0.0);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Change point detection
// ---------------------------------------------------------------------------

struct CpdConfig {
  std::size_t acoustic_dim = 40;
  std::size_t context = 50;  // frames on each side of the candidate change
  std::size_t rnn_hidden = 128;
  // frame d-vector TDNN trunk
  std::size_t tdnn_left = 7;
  std::size_t tdnn_right = 7;
  std::size_t tdnn_hidden = 64;
  std::size_t tdnn_out = 32;

  void validate() const {
    if (context < 1) throw std::invalid_argument("CpdConfig: context must be >= 1");
  }
};

inline ParamStore init_cpd_params(const CpdConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  ParamStore ps(seed);
  const std::size_t spliced = cfg.acoustic_dim * (cfg.tdnn_left + cfg.tdnn_right + 1);
  ps.add("cpd.tdnn1.W", spliced, cfg.tdnn_hidden);
  ps.add("cpd.tdnn1.b", 1, cfg.tdnn_hidden, ndiff::Init::kZeros);
  ps.add("cpd.tdnn2.W", cfg.tdnn_hidden, cfg.tdnn_out);
  ps.add("cpd.tdnn2.b", 1, cfg.tdnn_out, ndiff::Init::kZeros);
  for (const char* dir : {"fwd", "bwd"}) {
    ps.add(std::string("cpd.") + dir + ".Win", cfg.tdnn_out, cfg.rnn_hidden);
    ps.add(std::string("cpd.") + dir + ".Wrec", cfg.rnn_hidden, cfg.rnn_hidden);
    ps.add(std::string("cpd.") + dir + ".b", 1, cfg.rnn_hidden, ndiff::Init::kZeros);
  }
  ps.add("cpd.out.W", cfg.rnn_hidden, 2);
  ps.add("cpd.out.b", 1, 2, ndiff::Init::kZeros);
  ps.meta["kind"] = "cpd";
  return ps;
}

namespace detail {

inline Var cpd_tdnn_graph(const Tensor2& region, const CpdConfig& cfg, const ParamFn& param) {
  Var x = ndiff::constant(region);
  Var h = splice_graph(x, cfg.tdnn_left, cfg.tdnn_right);
  h = ndiff::relu(ndiff::affine(h, param("cpd.tdnn1.W"), param("cpd.tdnn1.b")));
  return ndiff::relu(ndiff::affine(h, param("cpd.tdnn2.W"), param("cpd.tdnn2.b")));
}

/// Simple ReLU recurrence over the given d-vector rows, visited in `steps`
/// order; returns the final hidden state (1 x rnn_hidden).
inline Var relu_rnn_graph(const Var& dvecs, const std::vector<std::size_t>& steps,
                          const CpdConfig& cfg, const ParamFn& param, const char* dir) {
  const std::string base = std::string("cpd.") + dir;
  Var win = param(base + ".Win");
  Var wrec = param(base + ".Wrec");
  Var b = param(base + ".b");
  Var h = ndiff::constant(Tensor2::zeros(1, cfg.rnn_hidden));
  for (std::size_t i : steps) {
    Var x = ndiff::gather_rows(dvecs, {i});
    h = ndiff::relu(ndiff::add_rowvec(
        ndiff::add(ndiff::matmul(x, win), ndiff::matmul(h, wrec)), b));
  }
  return h;
}

/// Change posterior for the frame `t` (region-relative): a forward
/// recurrence over [t-context, t), a backward recurrence over [t, t+context),
/// Hadamard fusion and a 2-way softmax.
inline Var cpd_frame_logits_graph(const Var& dvecs, std::size_t t, const CpdConfig& cfg,
                                  const ParamFn& param) {
  if (t < cfg.context || t + cfg.context > dvecs->value.rows) {
    throw std::invalid_argument("cpd_frame_logits: frame " + std::to_string(t) +
                                " lacks a full +-" + std::to_string(cfg.context) +
                                " context");
  }
  std::vector<std::size_t> past, future;
  for (std::size_t i = t - cfg.context; i < t; ++i) past.push_back(i);
  for (std::size_t i = t + cfg.context; i > t; --i) future.push_back(i - 1);
  Var hp = relu_rnn_graph(dvecs, past, cfg, param, "fwd");
  Var hf = relu_rnn_graph(dvecs, future, cfg, param, "bwd");
  Var fused = ndiff::hadamard(hp, hf);
  return ndiff::affine(fused, param("cpd.out.W"), param("cpd.out.b"));
}

}  // namespace detail

namespace detail {

inline void relu_rnn_step(const double* x, std::size_t xd, std::vector<double>& h,
                          const Tensor2& win, const Tensor2& wrec, const Tensor2& b) {
  const std::size_t hd = h.size();
  std::vector<double> next(hd);
  for (std::size_t j = 0; j < hd; ++j) {
    double s = b.at(0, j);
    for (std::size_t k = 0; k < xd; ++k) s += x[k] * win.at(k, j);
    for (std::size_t k = 0; k < hd; ++k) s += h[k] * wrec.at(k, j);
    next[j] = s > 0.0 ? s : 0.0;
  }
  h.swap(next);
}

}  // namespace detail

/// Change posterior per frame of a speech region. Frames without a full
/// context on both sides score 0. Plain arithmetic path; the function is the
/// same one the training graph differentiates.
inline std::vector<double> cpd_score(const Tensor2& region, const ParamStore& ps,
                                     const CpdConfig& cfg) {
  cfg.validate();
  std::vector<double> scores(region.rows, 0.0);
  if (region.rows <= 2 * cfg.context) return scores;

  Tensor2 h = features::splice_context(region, cfg.tdnn_left, cfg.tdnn_right);
  auto affine_relu = [&ps](const Tensor2& x, const std::string& w, const std::string& b) {
    Tensor2 out = ndiff::matmul(x, ps.value(w));
    const Tensor2& bias = ps.value(b);
    for (std::size_t r = 0; r < out.rows; ++r)
      for (std::size_t c = 0; c < out.cols; ++c) {
        double v = out.at(r, c) + bias.at(0, c);
        out.at(r, c) = v > 0.0 ? v : 0.0;
      }
    return out;
  };
  const Tensor2 dv1 = affine_relu(h, "cpd.tdnn1.W", "cpd.tdnn1.b");
  const Tensor2 dvecs = affine_relu(dv1, "cpd.tdnn2.W", "cpd.tdnn2.b");

  const Tensor2& fwd_win = ps.value("cpd.fwd.Win");
  const Tensor2& fwd_wrec = ps.value("cpd.fwd.Wrec");
  const Tensor2& fwd_b = ps.value("cpd.fwd.b");
  const Tensor2& bwd_win = ps.value("cpd.bwd.Win");
  const Tensor2& bwd_wrec = ps.value("cpd.bwd.Wrec");
  const Tensor2& bwd_b = ps.value("cpd.bwd.b");
  const Tensor2& out_w = ps.value("cpd.out.W");
  const Tensor2& out_b = ps.value("cpd.out.b");

  std::vector<double> hp(cfg.rnn_hidden), hf(cfg.rnn_hidden);
  for (std::size_t t = cfg.context; t + cfg.context <= region.rows; ++t) {
    std::fill(hp.begin(), hp.end(), 0.0);
    std::fill(hf.begin(), hf.end(), 0.0);
    for (std::size_t i = t - cfg.context; i < t; ++i) {
      detail::relu_rnn_step(dvecs.row_ptr(i), dvecs.cols, hp, fwd_win, fwd_wrec, fwd_b);
    }
    for (std::size_t i = t + cfg.context; i > t; --i) {
      detail::relu_rnn_step(dvecs.row_ptr(i - 1), dvecs.cols, hf, bwd_win, bwd_wrec, bwd_b);
    }
    double logit0 = out_b.at(0, 0), logit1 = out_b.at(0, 1);
    for (std::size_t k = 0; k < cfg.rnn_hidden; ++k) {
      const double fused = hp[k] * hf[k];
      logit0 += fused * out_w.at(k, 0);
      logit1 += fused * out_w.at(k, 1);
    }
    const double m = std::max(logit0, logit1);
    const double ea = std::exp(logit0 - m), eb = std::exp(logit1 - m);
    scores[t] = eb / (ea + eb);
  }
  return scores;
}

/// One CPD training example: a frame inside a region with a change label.
struct CpdExample {
  const Tensor2* region = nullptr;  // borrowed speech-region features
  std::size_t t = 0;                // region-relative frame
  int label = 0;                    // 1 within +-2 frames of a true change
};

inline TrainReport train_cpd(const std::vector<CpdExample>& examples, const CpdConfig& cfg,
                             ParamStore& ps, const TrainOptions& opt, std::uint64_t seed) {
  cfg.validate();
  TrainReport report;
  report.windows = examples.size();
  std::mt19937_64 rng(seed);
  AdamState adam;
  AdamConfig adam_cfg;
  adam_cfg.lr = opt.lr;
  std::vector<std::size_t> order(examples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (std::size_t epoch = 0; epoch < opt.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    for (std::size_t i : order) {
      const CpdExample& ex = examples[i];
      const std::size_t lo =
          ex.t >= cfg.context + cfg.tdnn_left ? ex.t - cfg.context - cfg.tdnn_left : 0;
      const std::size_t hi =
          std::min(ex.region->rows, ex.t + cfg.context + cfg.tdnn_right);
      Tensor2 strip(hi - lo, ex.region->cols);
      std::copy(ex.region->row_ptr(lo), ex.region->row_ptr(lo) + (hi - lo) * ex.region->cols,
                strip.data.begin());
      ps.zero_grads();
      auto param = trainable(ps);
      Var dvecs = detail::cpd_tdnn_graph(strip, cfg, param);
      Var logits = detail::cpd_frame_logits_graph(dvecs, ex.t - lo, cfg, param);
      Var loss = ndiff::softmax_cross_entropy(logits, {ex.label});
      loss_sum += ndiff::scalar(loss);
      ndiff::backward(loss);
      adam.step(ps, adam_cfg);
    }
    report.epoch_losses.push_back(loss_sum / static_cast<double>(examples.size()));
    report.heldout_accuracy.push_back(0.0);
  }
  return report;
}

/// Local maxima above the threshold, greedily kept best-first with a minimum
/// separation of min_gap frames.
inline std::vector<std::size_t> pick_changes(const std::vector<double>& scores,
                                             double threshold, std::size_t min_gap) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw std::invalid_argument("pick_changes: threshold must lie in (0,1), got " +
                                std::to_string(threshold));
  }
  std::vector<std::size_t> candidates;
  for (std::size_t t = 0; t < scores.size(); ++t) {
    const double prev = t > 0 ? scores[t - 1] : -1.0;
    const double next = t + 1 < scores.size() ? scores[t + 1] : -1.0;
    if (scores[t] >= threshold && scores[t] >= prev && scores[t] > next) {
      candidates.push_back(t);
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&scores](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::vector<std::size_t> accepted;
  for (std::size_t t : candidates) {
    bool ok = true;
    for (std::size_t a : accepted) {
      const std::size_t gap = t > a ? t - a : a - t;
      if (gap < min_gap) {
        ok = false;
        break;
      }
    }
    if (ok) accepted.push_back(t);
  }
  std::sort(accepted.begin(), accepted.end());
  return accepted;
}

}  // namespace models
}  // namespace casediar

#endif  // CASEDIAR_MODELS_HPP_
