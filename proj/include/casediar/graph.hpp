// casediar/graph.hpp

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

#ifndef CASEDIAR_GRAPH_HPP_
#define CASEDIAR_GRAPH_HPP_

#include <algorithm>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "casediar/tensor.hpp"

namespace casediar {
namespace ndiff {

// Reverse-mode differentiation over Tensor2 values. A forward pass builds a
// DAG of Node objects; backward() sweeps it in reverse creation order.
// Creation order is a valid topological order because parents always exist
// before their children.

class Node;
using Var = std::shared_ptr<Node>;

class Node {
 public:
  Tensor2 value;
  Tensor2 grad;  // allocated by backward(); same shape as value
  bool needs_grad = false;
  std::uint64_t order = 0;
  std::vector<Var> parents;
  std::function<void(Node&)> backprop;  // accumulates this->grad into parents
  Tensor2* grad_sink = nullptr;         // external accumulator, e.g. a ParamStore slot
};

namespace detail {

inline std::uint64_t next_order() {
  thread_local std::uint64_t counter = 0;
  return ++counter;
}

inline Var make_node(Tensor2 value, std::vector<Var> parents) {
  auto n = std::make_shared<Node>();
  n->value = std::move(value);
  n->order = next_order();
  n->parents = std::move(parents);
  for (const auto& p : n->parents) {
    if (p->needs_grad) n->needs_grad = true;
  }
  return n;
}

inline Tensor2& grad_of(Node& n) {
  if (n.grad.data.empty()) n.grad = Tensor2::zeros(n.value.rows, n.value.cols);
  return n.grad;
}

}  // namespace detail

inline Var constant(Tensor2 v) {
  auto n = std::make_shared<Node>();
  n->value = std::move(v);
  n->order = detail::next_order();
  return n;
}

/// Differentiable leaf. If `sink` is given, backward() adds the leaf gradient
/// into it (used to accumulate into a parameter store).
inline Var leaf(Tensor2 v, Tensor2* sink = nullptr) {
  auto n = std::make_shared<Node>();
  n->value = std::move(v);
  n->order = detail::next_order();
  n->needs_grad = true;
  n->grad_sink = sink;
  return n;
}

inline Var matmul(const Var& a, const Var& b) {
  Var out = detail::make_node(matmul(a->value, b->value), {a, b});
  if (out->needs_grad) {
    out->backprop = [](Node& n) {
      Node& a = *n.parents[0];
      Node& b = *n.parents[1];
      if (a.needs_grad) accumulate(detail::grad_of(a), matmul(n.grad, transpose(b.value)));
      if (b.needs_grad) accumulate(detail::grad_of(b), matmul(transpose(a.value), n.grad));
    };
  }
  return out;
}

inline Var add(const Var& a, const Var& b) {
  Var out = detail::make_node(add(a->value, b->value), {a, b});
  if (out->needs_grad) {
    out->backprop = [](Node& n) {
      for (int i = 0; i < 2; ++i) {
        Node& p = *n.parents[i];
        if (p.needs_grad) accumulate(detail::grad_of(p), n.grad);
      }
    };
  }
  return out;
}

inline Var sub(const Var& a, const Var& b) {
  Var out = detail::make_node(add(a->value, scale(b->value, -1.0)), {a, b});
  if (out->needs_grad) {
    out->backprop = [](Node& n) {
      Node& a = *n.parents[0];
      Node& b = *n.parents[1];
      if (a.needs_grad) accumulate(detail::grad_of(a), n.grad);
      if (b.needs_grad) accumulate(detail::grad_of(b), scale(n.grad, -1.0));
    };
  }
  return out;
}

inline Var scale(const Var& x, double c) {
  Var out = detail::make_node(scale(x->value, c), {x});
  if (out->needs_grad) {
    out->backprop = [c](Node& n) {
      Node& x = *n.parents[0];
      if (x.needs_grad) accumulate(detail::grad_of(x), scale(n.grad, c));
    };
  }
  return out;
}

/// Adds a 1xC row vector to every row of x.
inline Var add_rowvec(const Var& x, const Var& b) {
  const Tensor2& xv = x->value;
  const Tensor2& bv = b->value;
  if (bv.rows != 1 || bv.cols != xv.cols) {
    throw std::invalid_argument("add_rowvec: bias " + bv.shape_str() +
                                " incompatible with input " + xv.shape_str());
  }
  Tensor2 v = xv;
  for (std::size_t r = 0; r < v.rows; ++r)
    for (std::size_t c = 0; c < v.cols; ++c) v.at(r, c) += bv.at(0, c);
  Var out = detail::make_node(std::move(v), {x, b});
  if (out->needs_grad) {
    out->backprop = [](Node& n) {
      Node& x = *n.parents[0];
      Node& b = *n.parents[1];
      if (x.needs_grad) accumulate(detail::grad_of(x), n.grad);
      if (b.needs_grad) {
        Tensor2& g = detail::grad_of(b);
        for (std::size_t r = 0; r < n.grad.rows; ++r)
          for (std::size_t c = 0; c < n.grad.cols; ++c) g.at(0, c) += n.grad.at(r, c);
      }
    };
  }
  return out;
}

/// out = x W + b, bias broadcast per row.
inline Var affine(const Var& x, const Var& w, const Var& b) {
  if (x->value.cols != w->value.rows) {
    throw std::invalid_argument("affine: input " + x->value.shape_str() +
                                " does not match weight " + w->value.shape_str());
  }
  return add_rowvec(matmul(x, w), b);
}

/// Elementwise max(0, x). Subgradient at 0 is 0.
inline Var relu(const Var& x) {
  Tensor2 v = x->value;
  for (double& e : v.data) e = e > 0.0 ? e : 0.0;
  Var out = detail::make_node(std::move(v), {x});
  if (out->needs_grad) {
    out->backprop = [](Node& n) {
      Node& x = *n.parents[0];
      if (!x.needs_grad) return;
      Tensor2& g = detail::grad_of(x);
      for (std::size_t i = 0; i < g.data.size(); ++i)
        if (x.value.data[i] > 0.0) g.data[i] += n.grad.data[i];
    };
  }
  return out;
}

inline Var tanh(const Var& x) {
  Tensor2 v = x->value;
  for (double& e : v.data) e = std::tanh(e);
  Var out = detail::make_node(std::move(v), {x});
  if (out->needs_grad) {
    out->backprop = [](Node& n) {
      Node& x = *n.parents[0];
      if (!x.needs_grad) return;
      Tensor2& g = detail::grad_of(x);
      for (std::size_t i = 0; i < g.data.size(); ++i)
        g.data[i] += n.grad.data[i] * (1.0 - n.value.data[i] * n.value.data[i]);
    };
  }
  return out;
}

inline Var hadamard(const Var& a, const Var& b) {
  if (!a->value.same_shape(b->value)) {
    throw std::invalid_argument("hadamard: shape mismatch " + a->value.shape_str() +
                                " vs " + b->value.shape_str());
  }
  Tensor2 v = a->value;
  for (std::size_t i = 0; i < v.data.size(); ++i) v.data[i] *= b->value.data[i];
  Var out = detail::make_node(std::move(v), {a, b});
  if (out->needs_grad) {
    out->backprop = [](Node& n) {
      Node& a = *n.parents[0];
      Node& b = *n.parents[1];
      if (a.needs_grad) {
        Tensor2& g = detail::grad_of(a);
        for (std::size_t i = 0; i < g.data.size(); ++i)
          g.data[i] += n.grad.data[i] * b.value.data[i];
      }
      if (b.needs_grad) {
        Tensor2& g = detail::grad_of(b);
        for (std::size_t i = 0; i < g.data.size(); ++i)
          g.data[i] += n.grad.data[i] * a.value.data[i];
      }
    };
  }
  return out;
}

inline Var concat_cols(const std::vector<Var>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat_cols: no inputs");
  std::size_t rows = parts[0]->value.rows;
  std::size_t cols = 0;
  for (const auto& p : parts) {
    if (p->value.rows != rows) {
      throw std::invalid_argument("concat_cols: row mismatch " +
                                  parts[0]->value.shape_str() + " vs " +
                                  p->value.shape_str());
    }
    cols += p->value.cols;
  }
  Tensor2 v(rows, cols);
  std::size_t off = 0;
  for (const auto& p : parts) {
    for (std::size_t r = 0; r < rows; ++r)
      std::copy(p->value.row_ptr(r), p->value.row_ptr(r) + p->value.cols,
                v.row_ptr(r) + off);
    off += p->value.cols;
  }
  Var out = detail::make_node(std::move(v), parts);
  if (out->needs_grad) {
    out->backprop = [](Node& n) {
      std::size_t off = 0;
      for (auto& pp : n.parents) {
        Node& p = *pp;
        if (p.needs_grad) {
          Tensor2& g = detail::grad_of(p);
          for (std::size_t r = 0; r < g.rows; ++r)
            for (std::size_t c = 0; c < g.cols; ++c) g.at(r, c) += n.grad.at(r, off + c);
        }
        off += p.value.cols;
      }
    };
  }
  return out;
}

inline Var slice_cols(const Var& x, std::size_t c0, std::size_t c1) {
  const Tensor2& xv = x->value;
  if (c0 >= c1 || c1 > xv.cols) {
    throw std::invalid_argument("slice_cols: range [" + std::to_string(c0) + "," +
                                std::to_string(c1) + ") outside " + xv.shape_str());
  }
  Tensor2 v(xv.rows, c1 - c0);
  for (std::size_t r = 0; r < v.rows; ++r)
    std::copy(xv.row_ptr(r) + c0, xv.row_ptr(r) + c1, v.row_ptr(r));
  Var out = detail::make_node(std::move(v), {x});
  if (out->needs_grad) {
    out->backprop = [c0](Node& n) {
      Node& x = *n.parents[0];
      if (!x.needs_grad) return;
      Tensor2& g = detail::grad_of(x);
      for (std::size_t r = 0; r < n.grad.rows; ++r)
        for (std::size_t c = 0; c < n.grad.cols; ++c) g.at(r, c0 + c) += n.grad.at(r, c);
    };
  }
  return out;
}

/// out row i = x row indices[i]; rows may repeat (edge replication).
inline Var gather_rows(const Var& x, std::vector<std::size_t> indices) {
  const Tensor2& xv = x->value;
  Tensor2 v(indices.size(), xv.cols);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= xv.rows) {
      throw std::invalid_argument("gather_rows: index " + std::to_string(indices[i]) +
                                  " outside " + xv.shape_str());
    }
    std::copy(xv.row_ptr(indices[i]), xv.row_ptr(indices[i]) + xv.cols, v.row_ptr(i));
  }
  Var out = detail::make_node(std::move(v), {x});
  if (out->needs_grad) {
    out->backprop = [indices = std::move(indices)](Node& n) {
      Node& x = *n.parents[0];
      if (!x.needs_grad) return;
      Tensor2& g = detail::grad_of(x);
      for (std::size_t i = 0; i < indices.size(); ++i)
        for (std::size_t c = 0; c < g.cols; ++c) g.at(indices[i], c) += n.grad.at(i, c);
    };
  }
  return out;
}

inline Var transpose(const Var& x) {
  Var out = detail::make_node(transpose(x->value), {x});
  if (out->needs_grad) {
    out->backprop = [](Node& n) {
      Node& x = *n.parents[0];
      if (x.needs_grad) accumulate(detail::grad_of(x), transpose(n.grad));
    };
  }
  return out;
}

/// Row-wise softmax with max subtraction.
inline Var softmax_rows(const Var& x) {
  Tensor2 v = x->value;
  for (std::size_t r = 0; r < v.rows; ++r) {
    double* p = v.row_ptr(r);
    double mx = p[0];
    for (std::size_t c = 1; c < v.cols; ++c) mx = std::max(mx, p[c]);
    double sum = 0.0;
    for (std::size_t c = 0; c < v.cols; ++c) {
      p[c] = std::exp(p[c] - mx);
      sum += p[c];
    }
    for (std::size_t c = 0; c < v.cols; ++c) p[c] /= sum;
  }
  Var out = detail::make_node(std::move(v), {x});
  if (out->needs_grad) {
    out->backprop = [](Node& n) {
      Node& x = *n.parents[0];
      if (!x.needs_grad) return;
      Tensor2& g = detail::grad_of(x);
      for (std::size_t r = 0; r < g.rows; ++r) {
        double dot = 0.0;
        for (std::size_t c = 0; c < g.cols; ++c) dot += n.grad.at(r, c) * n.value.at(r, c);
        for (std::size_t c = 0; c < g.cols; ++c)
          g.at(r, c) += n.value.at(r, c) * (n.grad.at(r, c) - dot);
      }
    };
  }
  return out;
}

/// 1xC vector of column means.
inline Var mean_rows(const Var& x) {
  const Tensor2& xv = x->value;
  if (xv.rows == 0) throw std::invalid_argument("mean_rows: empty input");
  Tensor2 v(1, xv.cols);
  for (std::size_t r = 0; r < xv.rows; ++r)
    for (std::size_t c = 0; c < xv.cols; ++c) v.at(0, c) += xv.at(r, c);
  for (std::size_t c = 0; c < xv.cols; ++c) v.at(0, c) /= static_cast<double>(xv.rows);
  Var out = detail::make_node(std::move(v), {x});
  if (out->needs_grad) {
    out->backprop = [](Node& n) {
      Node& x = *n.parents[0];
      if (!x.needs_grad) return;
      Tensor2& g = detail::grad_of(x);
      const double inv = 1.0 / static_cast<double>(g.rows);
      for (std::size_t r = 0; r < g.rows; ++r)
        for (std::size_t c = 0; c < g.cols; ++c) g.at(r, c) += n.grad.at(0, c) * inv;
    };
  }
  return out;
}

/// 1x1 sum of all entries.
inline Var sum_all(const Var& x) {
  double s = 0.0;
  for (double e : x->value.data) s += e;
  Tensor2 v(1, 1);
  v.at(0, 0) = s;
  Var out = detail::make_node(std::move(v), {x});
  if (out->needs_grad) {
    out->backprop = [](Node& n) {
      Node& x = *n.parents[0];
      if (!x.needs_grad) return;
      Tensor2& g = detail::grad_of(x);
      const double up = n.grad.at(0, 0);
      for (double& e : g.data) e += up;
    };
  }
  return out;
}

/// 1x1 sum of squared entries (Frobenius norm squared).
inline Var sum_sq(const Var& x) {
  double s = 0.0;
  for (double e : x->value.data) s += e * e;
  Tensor2 v(1, 1);
  v.at(0, 0) = s;
  Var out = detail::make_node(std::move(v), {x});
  if (out->needs_grad) {
    out->backprop = [](Node& n) {
      Node& x = *n.parents[0];
      if (!x.needs_grad) return;
      Tensor2& g = detail::grad_of(x);
      const double up = n.grad.at(0, 0);
      for (std::size_t i = 0; i < g.data.size(); ++i) g.data[i] += 2.0 * x.value.data[i] * up;
    };
  }
  return out;
}

/// x + s*I for square x; gradient passes through unchanged.
inline Var add_scaled_identity(const Var& x, double s) {
  const Tensor2& xv = x->value;
  if (xv.rows != xv.cols) {
    throw std::invalid_argument("add_scaled_identity: input not square, " + xv.shape_str());
  }
  Tensor2 v = xv;
  for (std::size_t i = 0; i < v.rows; ++i) v.at(i, i) += s;
  Var out = detail::make_node(std::move(v), {x});
  if (out->needs_grad) {
    out->backprop = [](Node& n) {
      Node& x = *n.parents[0];
      if (x.needs_grad) accumulate(detail::grad_of(x), n.grad);
    };
  }
  return out;
}

/// Rows rescaled to unit Euclidean norm; rejects zero-norm rows.
inline Var normalize_rows(const Var& x) {
  const Tensor2& xv = x->value;
  Tensor2 v = xv;
  std::vector<double> norms(xv.rows);
  for (std::size_t r = 0; r < xv.rows; ++r) {
    double nrm = xv.row_norm(r);
    if (nrm < 1e-300) {
      throw std::invalid_argument("normalize_rows: zero-norm row " + std::to_string(r));
    }
    norms[r] = nrm;
    for (std::size_t c = 0; c < xv.cols; ++c) v.at(r, c) /= nrm;
  }
  Var out = detail::make_node(std::move(v), {x});
  if (out->needs_grad) {
    out->backprop = [norms = std::move(norms)](Node& n) {
      Node& x = *n.parents[0];
      if (!x.needs_grad) return;
      Tensor2& g = detail::grad_of(x);
      for (std::size_t r = 0; r < g.rows; ++r) {
        double dot = 0.0;
        for (std::size_t c = 0; c < g.cols; ++c) dot += n.grad.at(r, c) * n.value.at(r, c);
        for (std::size_t c = 0; c < g.cols; ++c)
          g.at(r, c) += (n.grad.at(r, c) - dot * n.value.at(r, c)) / norms[r];
      }
    };
  }
  return out;
}

/// Identity forward; backward multiplies the upstream gradient by -lambda.
inline Var gradient_reverse(const Var& x, double lambda) {
  if (lambda < 0.0) {
    throw std::invalid_argument("gradient_reverse: lambda must be >= 0, got " +
                                std::to_string(lambda));
  }
  Var out = detail::make_node(x->value, {x});
  if (out->needs_grad) {
    out->backprop = [lambda](Node& n) {
      Node& x = *n.parents[0];
      if (x.needs_grad) accumulate(detail::grad_of(x), scale(n.grad, -lambda));
    };
  }
  return out;
}

/// Mean over rows of -log softmax(logits)[target]. Rows whose target is -1
/// are skipped; the mean is taken over the remaining rows.
inline Var softmax_cross_entropy(const Var& logits, const std::vector<int>& targets) {
  const Tensor2& lv = logits->value;
  if (targets.size() != lv.rows) {
    throw std::invalid_argument("softmax_cross_entropy: " + std::to_string(targets.size()) +
                                " targets for " + std::to_string(lv.rows) + " rows");
  }
  Tensor2 probs(lv.rows, lv.cols);
  double loss = 0.0;
  std::size_t counted = 0;
  for (std::size_t r = 0; r < lv.rows; ++r) {
    const double* p = lv.row_ptr(r);
    double mx = p[0];
    for (std::size_t c = 1; c < lv.cols; ++c) mx = std::max(mx, p[c]);
    double sum = 0.0;
    for (std::size_t c = 0; c < lv.cols; ++c) {
      probs.at(r, c) = std::exp(p[c] - mx);
      sum += probs.at(r, c);
    }
    for (std::size_t c = 0; c < lv.cols; ++c) probs.at(r, c) /= sum;
    int t = targets[r];
    if (t < 0) continue;
    if (static_cast<std::size_t>(t) >= lv.cols) {
      throw std::invalid_argument("softmax_cross_entropy: target " + std::to_string(t) +
                                  " out of range for " + std::to_string(lv.cols) +
                                  " classes at row " + std::to_string(r));
    }
    loss -= std::log(probs.at(r, static_cast<std::size_t>(t)));
    ++counted;
  }
  if (counted == 0) {
    throw std::invalid_argument("softmax_cross_entropy: no labeled rows");
  }
  Tensor2 v(1, 1);
  v.at(0, 0) = loss / static_cast<double>(counted);
  Var out = detail::make_node(std::move(v), {logits});
  if (out->needs_grad) {
    out->backprop = [probs = std::move(probs), targets, counted](Node& n) {
      Node& l = *n.parents[0];
      if (!l.needs_grad) return;
      Tensor2& g = detail::grad_of(l);
      const double up = n.grad.at(0, 0) / static_cast<double>(counted);
      for (std::size_t r = 0; r < g.rows; ++r) {
        int t = targets[r];
        if (t < 0) continue;
        for (std::size_t c = 0; c < g.cols; ++c) {
          double delta = (c == static_cast<std::size_t>(t)) ? 1.0 : 0.0;
          g.at(r, c) += (probs.at(r, c) - delta) * up;
        }
      }
    };
  }
  return out;
}

inline double scalar(const Var& x) {
  if (x->value.rows != 1 || x->value.cols != 1) {
    throw std::invalid_argument("scalar: node is " + x->value.shape_str() + ", not 1x1");
  }
  return x->value.at(0, 0);
}

/// Reverse sweep from a 1x1 loss node. Gradients accumulate into each
/// reachable leaf's grad and, where set, its grad_sink.
inline void backward(const Var& loss) {
  if (loss->value.rows != 1 || loss->value.cols != 1) {
    throw std::invalid_argument("backward: loss is " + loss->value.shape_str() + ", not 1x1");
  }
  std::vector<Node*> nodes;
  std::unordered_set<Node*> seen;
  std::vector<Var> stack{loss};
  std::vector<Var> keep_alive;
  while (!stack.empty()) {
    Var v = stack.back();
    stack.pop_back();
    if (!v->needs_grad || !seen.insert(v.get()).second) continue;
    keep_alive.push_back(v);
    nodes.push_back(v.get());
    for (const auto& p : v->parents) stack.push_back(p);
  }
  std::sort(nodes.begin(), nodes.end(),
            [](const Node* a, const Node* b) { return a->order > b->order; });
  for (Node* n : nodes) detail::grad_of(*n);
  detail::grad_of(*loss).at(0, 0) = 1.0;
  for (Node* n : nodes) {
    if (n->backprop) n->backprop(*n);
  }
  for (Node* n : nodes) {
    if (n->grad_sink != nullptr) accumulate(*n->grad_sink, n->grad);
  }
}

}  // namespace ndiff
}  // namespace casediar

#endif  // CASEDIAR_GRAPH_HPP_
