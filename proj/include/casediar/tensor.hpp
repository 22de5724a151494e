// casediar/tensor.hpp

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

#ifndef CASEDIAR_TENSOR_HPP_
#define CASEDIAR_TENSOR_HPP_

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace casediar {
namespace ndiff {

/// Dense row-major matrix of 64-bit reals. The single value type moved
/// between all layers, losses and file formats in this library.
struct Tensor2 {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;  // row-major, data.size() == rows*cols

  Tensor2() = default;
  Tensor2(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  Tensor2(std::size_t r, std::size_t c, std::vector<double> values)
      : rows(r), cols(c), data(std::move(values)) {
    if (data.size() != rows * cols) {
      throw std::invalid_argument("Tensor2: data length " +
                                  std::to_string(data.size()) +
                                  " does not equal rows*cols = " +
                                  std::to_string(rows * cols));
    }
  }

  static Tensor2 zeros(std::size_t r, std::size_t c) { return Tensor2(r, c); }

  static Tensor2 filled(std::size_t r, std::size_t c, double v) {
    Tensor2 t(r, c);
    std::fill(t.data.begin(), t.data.end(), v);
    return t;
  }

  /// Builds from nested brace lists; all rows must have equal length.
  static Tensor2 from_rows(std::initializer_list<std::initializer_list<double>> rows_in) {
    Tensor2 t;
    t.rows = rows_in.size();
    t.cols = t.rows ? rows_in.begin()->size() : 0;
    t.data.reserve(t.rows * t.cols);
    for (const auto& r : rows_in) {
      if (r.size() != t.cols) {
        throw std::invalid_argument("Tensor2::from_rows: ragged row lengths");
      }
      t.data.insert(t.data.end(), r.begin(), r.end());
    }
    return t;
  }

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  double& operator()(std::size_t r, std::size_t c) { return at(r, c); }
  double operator()(std::size_t r, std::size_t c) const { return at(r, c); }

  const double* row_ptr(std::size_t r) const { return data.data() + r * cols; }
  double* row_ptr(std::size_t r) { return data.data() + r * cols; }

  std::size_t size() const { return rows * cols; }
  bool empty() const { return rows == 0 || cols == 0; }

  bool same_shape(const Tensor2& o) const { return rows == o.rows && cols == o.cols; }

  std::string shape_str() const {
    return std::to_string(rows) + "x" + std::to_string(cols);
  }

  bool all_finite() const {
    for (double v : data) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

  double row_norm(std::size_t r) const {
    double s = 0.0;
    const double* p = row_ptr(r);
    for (std::size_t c = 0; c < cols; ++c) s += p[c] * p[c];
    return std::sqrt(s);
  }
};

using EigenMap = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using EigenConstMap =
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

inline EigenConstMap as_eigen(const Tensor2& t) {
  return EigenConstMap(t.data.data(), static_cast<Eigen::Index>(t.rows),
                       static_cast<Eigen::Index>(t.cols));
}

inline EigenMap as_eigen(Tensor2& t) {
  return EigenMap(t.data.data(), static_cast<Eigen::Index>(t.rows),
                  static_cast<Eigen::Index>(t.cols));
}

inline Tensor2 matmul(const Tensor2& a, const Tensor2& b) {
  if (a.cols != b.rows) {
    throw std::invalid_argument("matmul: inner dimensions disagree, lhs " +
                                a.shape_str() + " vs rhs " + b.shape_str());
  }
  Tensor2 out(a.rows, b.cols);
  as_eigen(out).noalias() = as_eigen(a) * as_eigen(b);
  return out;
}

inline Tensor2 transpose(const Tensor2& a) {
  Tensor2 out(a.cols, a.rows);
  as_eigen(out) = as_eigen(a).transpose();
  return out;
}

inline Tensor2 add(const Tensor2& a, const Tensor2& b) {
  if (!a.same_shape(b)) {
    throw std::invalid_argument("add: shape mismatch " + a.shape_str() + " vs " +
                                b.shape_str());
  }
  Tensor2 out = a;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += b.data[i];
  return out;
}

inline void accumulate(Tensor2& into, const Tensor2& g) {
  if (!into.same_shape(g)) {
    throw std::invalid_argument("accumulate: shape mismatch " + into.shape_str() +
                                " vs " + g.shape_str());
  }
  for (std::size_t i = 0; i < into.data.size(); ++i) into.data[i] += g.data[i];
}

inline Tensor2 scale(const Tensor2& a, double c) {
  Tensor2 out = a;
  for (double& v : out.data) v *= c;
  return out;
}

/// Input-order independent visit order: row indices sorted by lexicographic
/// comparison of row values.
inline std::vector<std::size_t> canonical_row_order(const Tensor2& rows) {
  std::vector<std::size_t> order(rows.rows);
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&rows](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(rows.row_ptr(a), rows.row_ptr(a) + rows.cols,
                                        rows.row_ptr(b), rows.row_ptr(b) + rows.cols);
  });
  return order;
}

}  // namespace ndiff

using ndiff::Tensor2;

}  // namespace casediar

#endif  // CASEDIAR_TENSOR_HPP_
