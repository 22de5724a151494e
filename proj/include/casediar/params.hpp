// casediar/params.hpp

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

#ifndef CASEDIAR_PARAMS_HPP_
#define CASEDIAR_PARAMS_HPP_

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "casediar/graph.hpp"
#include "casediar/tensor.hpp"

namespace casediar {
namespace ndiff {

enum class Init { kZeros, kGlorotUniform };

/// Named parameter tensors with per-parameter gradient accumulators.
/// Registration order must be deterministic: initialization draws from one
/// sequential generator seeded at construction.
class ParamStore {
 public:
  struct Param {
    Tensor2 value;
    Tensor2 grad;
  };

  explicit ParamStore(std::uint64_t seed = 0) : seed_(seed), rng_(seed) {}

  std::uint64_t seed() const { return seed_; }

  Tensor2& add(const std::string& name, std::size_t rows, std::size_t cols,
               Init init = Init::kGlorotUniform) {
    if (name.empty() || name.find_first_of(" \t\n") != std::string::npos) {
      throw std::invalid_argument("ParamStore: bad parameter name '" + name + "'");
    }
    if (params_.count(name)) {
      throw std::invalid_argument("ParamStore: duplicate parameter '" + name + "'");
    }
    Param p;
    p.value = Tensor2::zeros(rows, cols);
    p.grad = Tensor2::zeros(rows, cols);
    if (init == Init::kGlorotUniform) {
      const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
      std::uniform_real_distribution<double> dist(-limit, limit);
      for (double& v : p.value.data) v = dist(rng_);
    }
    auto [it, ok] = params_.emplace(name, std::move(p));
    (void)ok;
    return it->second.value;
  }

  bool has(const std::string& name) const { return params_.count(name) != 0; }

  Param& at(const std::string& name) {
    auto it = params_.find(name);
    if (it == params_.end()) {
      throw std::invalid_argument("ParamStore: unknown parameter '" + name + "'");
    }
    return it->second;
  }

  const Param& at(const std::string& name) const {
    auto it = params_.find(name);
    if (it == params_.end()) {
      throw std::invalid_argument("ParamStore: unknown parameter '" + name + "'");
    }
    return it->second;
  }

  Tensor2& value(const std::string& name) { return at(name).value; }
  const Tensor2& value(const std::string& name) const { return at(name).value; }
  Tensor2& grad(const std::string& name) { return at(name).grad; }

  /// Trainable leaf: backward() accumulates into this store's gradient slot.
  Var use(const std::string& name) {
    Param& p = at(name);
    return leaf(p.value, &p.grad);
  }

  /// Read-only leaf for extraction with frozen parameters.
  Var frozen(const std::string& name) const { return constant(at(name).value); }

  void zero_grads() {
    for (auto& [name, p] : params_) {
      std::fill(p.grad.data.begin(), p.grad.data.end(), 0.0);
    }
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    out.reserve(params_.size());
    for (const auto& [name, p] : params_) out.push_back(name);
    return out;
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& [name, p] : params_) n += p.value.size();
    return n;
  }

  std::map<std::string, std::string> meta;  // free-form, persisted in checkpoints

 private:
  std::map<std::string, Param> params_;  // ordered: deterministic iteration
  std::uint64_t seed_;
  std::mt19937_64 rng_;
};

// ---------------------------------------------------------------------------
// Loss configuration
// ---------------------------------------------------------------------------

struct LossConfig {
  enum class Kind { kSoftmaxCrossEntropy, kAngularSoftmax };
  Kind kind = Kind::kAngularSoftmax;
  int margin = 1;      // angular margin factor m
  double scale = 10.0; // logit scale s

  void validate() const {
    if (margin < 1) {
      throw std::invalid_argument("LossConfig: margin must be >= 1, got " +
                                  std::to_string(margin));
    }
    if (!(scale > 0.0) || !std::isfinite(scale)) {
      throw std::invalid_argument("LossConfig: scale must be finite and > 0");
    }
  }
};

/// logit(i,j) = s * cos(e_i, w_j). Class weight rows and embedding rows are
/// renormalized to unit norm inside the op, so training discriminates on
/// cosine distance only. Only m = 1 is supported.
inline Var angular_softmax_logits(const Var& embeddings, const Var& class_weights,
                                  const LossConfig& cfg) {
  cfg.validate();
  if (cfg.margin != 1) {
    throw std::invalid_argument("angular_softmax_logits: only margin m=1 is supported, got " +
                                std::to_string(cfg.margin));
  }
  if (embeddings->value.cols != class_weights->value.cols) {
    throw std::invalid_argument("angular_softmax_logits: embedding dim " +
                                embeddings->value.shape_str() + " vs class weights " +
                                class_weights->value.shape_str());
  }
  Var e = normalize_rows(embeddings);
  Var w = normalize_rows(class_weights);
  return scale(matmul(e, transpose(w)), cfg.scale);
}

// ---------------------------------------------------------------------------
// Optimizer: adaptive moment estimation with bias correction
// ---------------------------------------------------------------------------

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class AdamState {
 public:
  void step(ParamStore& ps, const AdamConfig& cfg) {
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t_));
    for (const std::string& name : ps.names()) {
      ParamStore::Param& p = ps.at(name);
      for (double g : p.grad.data) {
        if (!std::isfinite(g)) {
          throw std::runtime_error("optimizer_step: non-finite gradient in '" + name + "'");
        }
      }
      auto& [m, v] = moments_[name];
      if (m.data.empty()) {
        m = Tensor2::zeros(p.value.rows, p.value.cols);
        v = Tensor2::zeros(p.value.rows, p.value.cols);
      }
      for (std::size_t i = 0; i < p.value.data.size(); ++i) {
        const double g = p.grad.data[i];
        m.data[i] = cfg.beta1 * m.data[i] + (1.0 - cfg.beta1) * g;
        v.data[i] = cfg.beta2 * v.data[i] + (1.0 - cfg.beta2) * g * g;
        const double mhat = m.data[i] / bc1;
        const double vhat = v.data[i] / bc2;
        p.value.data[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.epsilon);
      }
    }
  }

  long steps_taken() const { return t_; }

 private:
  std::map<std::string, std::pair<Tensor2, Tensor2>> moments_;
  long t_ = 0;
};

/// One adaptive step at learning rate `lr`; gradients must be populated.
inline void optimizer_step(ParamStore& ps, AdamState& state, double lr) {
  AdamConfig cfg;
  cfg.lr = lr;
  state.step(ps, cfg);
}

// ---------------------------------------------------------------------------
// Checkpoint file: textual map name -> shape -> row-major values.
// Values are written as hex floats, so a round trip is bit-exact.
// ---------------------------------------------------------------------------

inline constexpr const char* kCheckpointMagic = "casediar-checkpoint";
inline constexpr int kCheckpointVersion = 1;

inline void save_checkpoint(const ParamStore& ps, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_checkpoint: cannot write '" + path + "'");
  out << kCheckpointMagic << " " << kCheckpointVersion << "\n";
  out << "seed " << ps.seed() << "\n";
  for (const auto& [k, v] : ps.meta) out << "meta " << k << " " << v << "\n";
  out << std::hexfloat;
  for (const std::string& name : ps.names()) {
    const Tensor2& t = ps.value(name);
    out << "param " << name << " " << t.rows << " " << t.cols << "\n";
    for (std::size_t r = 0; r < t.rows; ++r) {
      for (std::size_t c = 0; c < t.cols; ++c) {
        if (c) out << ' ';
        out << t.at(r, c);
      }
      out << "\n";
    }
  }
  out << "end\n";
  if (!out) throw std::runtime_error("save_checkpoint: write failure on '" + path + "'");
}

inline ParamStore load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_checkpoint: cannot open '" + path + "'");
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != kCheckpointMagic || version != kCheckpointVersion) {
    throw std::runtime_error("load_checkpoint: '" + path + "' is not a version-" +
                             std::to_string(kCheckpointVersion) + " checkpoint");
  }
  std::string word;
  in >> word;
  if (word != "seed") throw std::runtime_error("load_checkpoint: missing seed line");
  std::uint64_t seed = 0;
  in >> seed;
  ParamStore ps(seed);
  std::string line;
  std::getline(in, line);  // finish seed line
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "end") break;
    if (tag == "meta") {
      std::string key;
      ls >> key;
      std::string rest;
      std::getline(ls, rest);
      if (!rest.empty() && rest[0] == ' ') rest.erase(0, 1);
      ps.meta[key] = rest;
      continue;
    }
    if (tag != "param") {
      throw std::runtime_error("load_checkpoint: unexpected line '" + line + "'");
    }
    std::string name;
    std::size_t rows = 0, cols = 0;
    ls >> name >> rows >> cols;
    Tensor2& t = ps.add(name, rows, cols, Init::kZeros);
    for (std::size_t r = 0; r < rows; ++r) {
      if (!std::getline(in, line)) {
        throw std::runtime_error("load_checkpoint: truncated values for '" + name + "'");
      }
      const char* p = line.c_str();
      char* endp = nullptr;
      for (std::size_t c = 0; c < cols; ++c) {
        double v = std::strtod(p, &endp);
        if (endp == p) {
          throw std::runtime_error("load_checkpoint: bad value in '" + name + "' row " +
                                   std::to_string(r));
        }
        t.at(r, c) = v;
        p = endp;
      }
    }
  }
  return ps;
}

}  // namespace ndiff
}  // namespace casediar

#endif  // CASEDIAR_PARAMS_HPP_
