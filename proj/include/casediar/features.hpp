// casediar/features.hpp

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

#ifndef CASEDIAR_FEATURES_HPP_
#define CASEDIAR_FEATURES_HPP_

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "casediar/tensor.hpp"

namespace casediar {
namespace features {

/// T x F acoustic feature frames with frame timing metadata.
struct FrameMatrix {
  Tensor2 frames;                // T rows, F columns
  double frame_period = 0.010;   // seconds between frame starts
  double frame_size = 0.025;     // seconds covered by one frame

  std::size_t num_frames() const { return frames.rows; }
  std::size_t dim() const { return frames.cols; }
};

/// Half-open [start, end) frame range.
struct FrameSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  std::size_t length() const { return end - start; }
};

/// Fixed-length sliding-window coverage of a T-frame interval.
struct WindowPlan {
  std::size_t window_len = 200;
  std::size_t hop = 100;
  std::vector<FrameSpan> spans;
};

/// Row indices for stacking frames [t+offset] with edge replication.
inline std::vector<std::size_t> context_row_indices(std::size_t num_rows, long offset) {
  std::vector<std::size_t> idx(num_rows);
  for (std::size_t t = 0; t < num_rows; ++t) {
    long j = static_cast<long>(t) + offset;
    if (j < 0) j = 0;
    if (j >= static_cast<long>(num_rows)) j = static_cast<long>(num_rows) - 1;
    idx[t] = static_cast<std::size_t>(j);
  }
  return idx;
}

/// Row t of the output is the concatenation of rows t-left .. t+right of x,
/// replicating the first/last row past the edges. Output is
/// T x (F * (left + right + 1)).
inline Tensor2 splice_context(const Tensor2& x, std::size_t left, std::size_t right) {
  if (x.rows == 0 || x.cols == 0) {
    throw std::invalid_argument("splice_context: empty input " + x.shape_str());
  }
  const std::size_t width = left + right + 1;
  Tensor2 out(x.rows, x.cols * width);
  for (long o = -static_cast<long>(left); o <= static_cast<long>(right); ++o) {
    const std::size_t block = static_cast<std::size_t>(o + static_cast<long>(left));
    const auto idx = context_row_indices(x.rows, o);
    for (std::size_t t = 0; t < x.rows; ++t) {
      std::memcpy(out.row_ptr(t) + block * x.cols, x.row_ptr(idx[t]),
                  x.cols * sizeof(double));
    }
  }
  return out;
}

inline Tensor2 splice_context(const FrameMatrix& x, std::size_t left, std::size_t right) {
  return splice_context(x.frames, left, right);
}

/// Spans start at 0, hop, 2*hop, ... while start + window_len <= T. If the
/// last emitted span does not end at T, a final span anchored at
/// T - window_len is added so no frame is left uncovered. If T < window_len
/// the plan is the single span [0, T).
inline WindowPlan slide_windows(std::size_t num_frames, std::size_t window_len,
                                std::size_t hop) {
  if (num_frames == 0) throw std::invalid_argument("slide_windows: T = 0");
  if (window_len < hop || hop == 0) {
    throw std::invalid_argument("slide_windows: need window_len >= hop >= 1, got window_len=" +
                                std::to_string(window_len) + " hop=" + std::to_string(hop));
  }
  WindowPlan plan;
  plan.window_len = window_len;
  plan.hop = hop;
  if (num_frames < window_len) {
    plan.spans.push_back({0, num_frames});
    return plan;
  }
  for (std::size_t start = 0; start + window_len <= num_frames; start += hop) {
    plan.spans.push_back({start, start + window_len});
  }
  if (plan.spans.back().end != num_frames) {
    plan.spans.push_back({num_frames - window_len, num_frames});
  }
  return plan;
}

inline double frames_to_seconds(std::size_t n, double period) {
  if (!(period > 0.0)) {
    throw std::invalid_argument("frames_to_seconds: period must be > 0");
  }
  return static_cast<double>(n) * period;
}

/// Nearest frame, ties toward the later frame.
inline std::size_t seconds_to_frames(double seconds, double period) {
  if (!(period > 0.0)) {
    throw std::invalid_argument("seconds_to_frames: period must be > 0");
  }
  if (seconds < 0.0) {
    throw std::invalid_argument("seconds_to_frames: negative time " +
                                std::to_string(seconds));
  }
  return static_cast<std::size_t>(std::floor(seconds / period + 0.5));
}

// ---------------------------------------------------------------------------
// Feature file: magic, version, T, F, frame_period header, then row-major
// 64-bit frames.
// ---------------------------------------------------------------------------

inline constexpr char kFeatureMagic[4] = {'C', 'D', 'F', 'T'};
inline constexpr std::uint32_t kFeatureVersion = 1;

inline void save_features(const FrameMatrix& fm, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_features: cannot write '" + path + "'");
  out.write(kFeatureMagic, 4);
  const std::uint32_t version = kFeatureVersion;
  const std::uint64_t t = fm.frames.rows;
  const std::uint64_t f = fm.frames.cols;
  out.write(reinterpret_cast<const char*>(&version), sizeof(version));
  out.write(reinterpret_cast<const char*>(&t), sizeof(t));
  out.write(reinterpret_cast<const char*>(&f), sizeof(f));
  out.write(reinterpret_cast<const char*>(&fm.frame_period), sizeof(double));
  out.write(reinterpret_cast<const char*>(fm.frames.data.data()),
            static_cast<std::streamsize>(fm.frames.data.size() * sizeof(double)));
  if (!out) throw std::runtime_error("save_features: write failure on '" + path + "'");
}

inline FrameMatrix load_features(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_features: cannot open '" + path + "'");
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kFeatureMagic, 4) != 0) {
    throw std::runtime_error("load_features: '" + path + "' is not a feature file");
  }
  std::uint32_t version = 0;
  std::uint64_t t = 0, f = 0;
  FrameMatrix fm;
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  if (version != kFeatureVersion) {
    throw std::runtime_error("load_features: unsupported version " + std::to_string(version));
  }
  in.read(reinterpret_cast<char*>(&t), sizeof(t));
  in.read(reinterpret_cast<char*>(&f), sizeof(f));
  in.read(reinterpret_cast<char*>(&fm.frame_period), sizeof(double));
  fm.frames = Tensor2(static_cast<std::size_t>(t), static_cast<std::size_t>(f));
  in.read(reinterpret_cast<char*>(fm.frames.data.data()),
          static_cast<std::streamsize>(fm.frames.data.size() * sizeof(double)));
  if (!in) throw std::runtime_error("load_features: truncated file '" + path + "'");
  return fm;
}

}  // namespace features
}  // namespace casediar

#endif  // CASEDIAR_FEATURES_HPP_
