// casediar/cluster.hpp

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

#ifndef CASEDIAR_CLUSTER_HPP_
#define CASEDIAR_CLUSTER_HPP_

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "casediar/tensor.hpp"

namespace casediar {
namespace cluster {

/// Symmetric affinity with refinement provenance.
struct AffinityMatrix {
  Tensor2 a;
  double percentile = -1.0;  // < 0 while unrefined
  std::size_t size() const { return a.rows; }
};

struct ClusterResult {
  std::vector<int> labels;          // one cluster id per embedding, in [0, k)
  std::size_t k = 0;
  std::vector<double> eigenvalues;  // sorted descending
  Tensor2 centroids;                // k x dim, means in the original space
};

namespace detail {

inline double cosine(const Tensor2& x, std::size_t i, std::size_t j) {
  double dot = 0.0, ni = 0.0, nj = 0.0;
  const double* a = x.row_ptr(i);
  const double* b = x.row_ptr(j);
  for (std::size_t c = 0; c < x.cols; ++c) {
    dot += a[c] * b[c];
    ni += a[c] * a[c];
    nj += b[c] * b[c];
  }
  return dot / std::sqrt(ni * nj);
}

inline std::uint64_t row_hash(const Tensor2& rows, const std::vector<std::size_t>& order) {
  std::uint64_t h = 1469598103934665603ull;
  for (std::size_t idx : order) {
    const double* p = rows.row_ptr(idx);
    for (std::size_t c = 0; c < rows.cols; ++c) {
      std::uint64_t bits;
      std::memcpy(&bits, &p[c], sizeof(bits));
      for (int b = 0; b < 8; ++b) {
        h ^= (bits >> (8 * b)) & 0xffu;
        h *= 1099511628211ull;
      }
    }
  }
  return h;
}

inline double sq_dist(const Tensor2& rows, std::size_t i, const std::vector<double>& center) {
  double d = 0.0;
  const double* p = rows.row_ptr(i);
  for (std::size_t c = 0; c < rows.cols; ++c) {
    const double diff = p[c] - center[c];
    d += diff * diff;
  }
  return d;
}

struct KMeansRun {
  std::vector<int> labels;
  double inertia = std::numeric_limits<double>::infinity();
};

/// Seeded k-means with k-means++ initialization. All data-order dependent
/// steps walk the canonical order, so the outcome is independent of input
/// row order (up to the matching relabeling).
inline KMeansRun kmeans(const Tensor2& rows, std::size_t k, std::mt19937_64& rng,
                        const std::vector<std::size_t>& order) {
  const std::size_t n = rows.rows;
  const std::size_t dim = rows.cols;
  std::vector<std::vector<double>> centers;
  centers.reserve(k);

  // k-means++ over the canonical order
  std::uniform_int_distribution<std::size_t> first(0, n - 1);
  const std::size_t first_idx = order[first(rng)];
  centers.emplace_back(rows.row_ptr(first_idx), rows.row_ptr(first_idx) + dim);
  std::vector<double> d2(n, 0.0);
  while (centers.size() < k) {
    double total = 0.0;
    for (std::size_t oi = 0; oi < n; ++oi) {
      const std::size_t i = order[oi];
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : centers) best = std::min(best, sq_dist(rows, i, c));
      d2[oi] = best;
      total += best;
    }
    std::size_t chosen = order[0];
    if (total <= 0.0) {
      std::uniform_int_distribution<std::size_t> any(0, n - 1);
      chosen = order[any(rng)];
    } else {
      std::uniform_real_distribution<double> u(0.0, total);
      double r = u(rng);
      for (std::size_t oi = 0; oi < n; ++oi) {
        r -= d2[oi];
        if (r <= 0.0) {
          chosen = order[oi];
          break;
        }
      }
    }
    centers.emplace_back(rows.row_ptr(chosen), rows.row_ptr(chosen) + dim);
  }

  std::vector<int> labels(n, 0);
  for (int iter = 0; iter < 100; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      int best_c = 0;
      for (std::size_t c = 0; c < k; ++c) {
        const double d = sq_dist(rows, i, centers[c]);
        if (d < best) {
          best = d;
          best_c = static_cast<int>(c);
        }
      }
      if (labels[i] != best_c) {
        labels[i] = best_c;
        changed = true;
      }
    }
    // recompute means in canonical order
    std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t oi = 0; oi < n; ++oi) {
      const std::size_t i = order[oi];
      const double* p = rows.row_ptr(i);
      auto& s = sums[static_cast<std::size_t>(labels[i])];
      for (std::size_t c = 0; c < dim; ++c) s[c] += p[c];
      ++counts[static_cast<std::size_t>(labels[i])];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) {
        // revive an empty cluster at the farthest point (canonical order)
        double far_d = -1.0;
        std::size_t far_i = order[0];
        for (std::size_t oi = 0; oi < n; ++oi) {
          const std::size_t i = order[oi];
          const double d = sq_dist(rows, i, centers[static_cast<std::size_t>(labels[i])]);
          if (d > far_d) {
            far_d = d;
            far_i = i;
          }
        }
        centers[c].assign(rows.row_ptr(far_i), rows.row_ptr(far_i) + dim);
        labels[far_i] = static_cast<int>(c);
        changed = true;
        continue;
      }
      for (std::size_t cc = 0; cc < dim; ++cc) {
        centers[c][cc] = sums[c][cc] / static_cast<double>(counts[c]);
      }
    }
    if (!changed) break;
  }

  KMeansRun run;
  run.labels = std::move(labels);
  run.inertia = 0.0;
  for (std::size_t oi = 0; oi < n; ++oi) {
    const std::size_t i = order[oi];
    run.inertia += sq_dist(rows, i, centers[static_cast<std::size_t>(run.labels[i])]);
  }
  return run;
}

}  // namespace detail

/// A(i,j) = (1 + cos(v_i, v_j)) / 2, diagonal left at zero for the
/// refinement stage to fill.
inline AffinityMatrix cosine_affinity(const Tensor2& embeddings) {
  const std::size_t n = embeddings.rows;
  for (std::size_t i = 0; i < n; ++i) {
    if (embeddings.row_norm(i) < 1e-300) {
      throw std::invalid_argument("cosine_affinity: zero-norm embedding at index " +
                                  std::to_string(i));
    }
  }
  AffinityMatrix out;
  out.a = Tensor2(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = (1.0 + detail::cosine(embeddings, i, j)) / 2.0;
      out.a.at(i, j) = v;
      out.a.at(j, i) = v;
    }
  }
  return out;
}

/// Row thresholding: per row, off-diagonal entries at or below the p-th
/// percentile value (nearest rank) are zeroed; entries equal to the row
/// maximum always survive, the diagonal becomes the row maximum, and the
/// result is re-symmetrized by elementwise max with its transpose. Tie
/// handling is value-based, so equal entries share one fate and the
/// refinement commutes with input permutations.
inline AffinityMatrix refine_affinity(const AffinityMatrix& in, double percentile) {
  if (!(percentile >= 0.0 && percentile < 100.0)) {
    throw std::invalid_argument("refine_affinity: percentile must lie in [0, 100)");
  }
  const std::size_t n = in.a.rows;
  if (in.a.cols != n) {
    throw std::invalid_argument("refine_affinity: matrix not square, " + in.a.shape_str());
  }
  Tensor2 r = in.a;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> off;
    off.reserve(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) off.push_back(r.at(i, j));
    }
    if (off.empty()) {
      r.at(i, i) = 0.0;
      continue;
    }
    std::sort(off.begin(), off.end());
    const double row_max = off.back();
    if (percentile > 0.0) {
      const std::size_t rank = static_cast<std::size_t>(
          std::ceil(percentile / 100.0 * static_cast<double>(off.size())));
      const double threshold = off[std::min(rank, off.size()) - 1];
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        if (r.at(i, j) <= threshold && r.at(i, j) != row_max) r.at(i, j) = 0.0;
      }
    }
    r.at(i, i) = row_max;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double m = std::max(r.at(i, j), r.at(j, i));
      r.at(i, j) = m;
      r.at(j, i) = m;
    }
  }
  AffinityMatrix out;
  out.a = std::move(r);
  out.percentile = percentile;
  return out;
}

inline std::vector<double> symmetric_eigenvalues_desc(const Tensor2& a) {
  const Eigen::MatrixXd sym = ndiff::as_eigen(a);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
  std::vector<double> eigs(solver.eigenvalues().data(),
                           solver.eigenvalues().data() + solver.eigenvalues().size());
  std::reverse(eigs.begin(), eigs.end());
  return eigs;
}

/// Maximum eigenvalue drop-off as the largest ratio of consecutive sorted
/// eigenvalues. The additive gap is unusable here: cosine-0 pairs leave a
/// rank-one affinity background of 0.5 whose lambda_1 - lambda_2 gap always
/// dominates, and for k equal groups the cross-affinity floor (1+cos)/2 >=
/// (1 - 1/(k-1))/2 makes the additive gap provably miss k >= 4 however well
/// separated the groups are. A flat spectrum (largest additive gap below
/// 1e-9) degenerates to k = 1.
inline std::size_t eigengap_from_sorted(const std::vector<double>& eigs, std::size_t k_max) {
  const std::size_t limit = std::min(k_max, eigs.size());
  double best_gap = -1.0;
  for (std::size_t i = 1; i < eigs.size(); ++i) {
    best_gap = std::max(best_gap, eigs[i - 1] - eigs[i]);
  }
  if (best_gap < 1e-9) return 1;
  const double floor_v = std::max(eigs[0] * 1e-12, 1e-12);
  double best_ratio = -1.0;
  std::size_t best_k = 1;
  for (std::size_t i = 1; i < limit; ++i) {
    const double hi = std::max(eigs[i - 1], floor_v);
    const double lo = std::max(eigs[i], floor_v);
    const double ratio = hi / lo;
    if (ratio > best_ratio * (1.0 + 1e-12)) {
      best_ratio = ratio;
      best_k = i;
    }
  }
  return best_k;
}

/// Cluster count at the maximum eigenvalue drop-off of the (refined)
/// affinity spectrum.
inline std::size_t eigengap_count(const AffinityMatrix& a, std::size_t k_max) {
  if (a.size() < 2) {
    throw std::invalid_argument("eigengap_count: need at least 2 embeddings, got " +
                                std::to_string(a.size()));
  }
  if (k_max < 2) throw std::invalid_argument("eigengap_count: k_max must be >= 2");
  return eigengap_from_sorted(symmetric_eigenvalues_desc(a.a), k_max);
}

/// Cosine-affinity spectral clustering: refinement, eigengap model
/// selection, row-normalized spectral embedding, seeded k-means with 10
/// restarts. Centroids are means in the original embedding space.
inline ClusterResult spectral_cluster(const Tensor2& embeddings, double percentile,
                                      std::size_t k_max, std::uint64_t seed) {
  const std::size_t n = embeddings.rows;
  if (n < 2) {
    throw std::invalid_argument("spectral_cluster: need at least 2 embeddings, got " +
                                std::to_string(n));
  }
  AffinityMatrix refined = refine_affinity(cosine_affinity(embeddings), percentile);

  const Eigen::MatrixXd sym = ndiff::as_eigen(refined.a);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  std::vector<double> eigs(solver.eigenvalues().data(),
                           solver.eigenvalues().data() + solver.eigenvalues().size());
  std::reverse(eigs.begin(), eigs.end());

  ClusterResult result;
  result.eigenvalues = eigs;
  result.k = eigengap_from_sorted(eigs, k_max);

  if (result.k == 1) {
    result.labels.assign(n, 0);
  } else {
    // top-k eigenvectors (descending eigenvalue), row-normalized
    Tensor2 spectral(n, result.k);
    const auto& vecs = solver.eigenvectors();
    for (std::size_t c = 0; c < result.k; ++c) {
      const Eigen::Index col = static_cast<Eigen::Index>(n - 1 - c);
      for (std::size_t r = 0; r < n; ++r) {
        spectral.at(r, c) = vecs(static_cast<Eigen::Index>(r), col);
      }
    }
    for (std::size_t r = 0; r < n; ++r) {
      const double nrm = spectral.row_norm(r);
      if (nrm > 1e-300) {
        for (std::size_t c = 0; c < result.k; ++c) spectral.at(r, c) /= nrm;
      }
    }

    const auto order = ndiff::canonical_row_order(spectral);
    std::mt19937_64 rng(seed ^ detail::row_hash(spectral, order));
    detail::KMeansRun best;
    for (int restart = 0; restart < 10; ++restart) {
      detail::KMeansRun run = detail::kmeans(spectral, result.k, rng, order);
      if (run.inertia < best.inertia) best = std::move(run);
    }
    // relabel by first appearance in canonical order
    std::vector<int> remap(result.k, -1);
    int next = 0;
    for (std::size_t oi = 0; oi < n; ++oi) {
      int& m = remap[static_cast<std::size_t>(best.labels[order[oi]])];
      if (m < 0) m = next++;
    }
    result.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      result.labels[i] = remap[static_cast<std::size_t>(best.labels[i])];
    }
  }

  result.centroids = Tensor2(result.k, embeddings.cols);
  std::vector<std::size_t> counts(result.k, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<std::size_t>(result.labels[i]);
    ++counts[c];
    for (std::size_t d = 0; d < embeddings.cols; ++d) {
      result.centroids.at(c, d) += embeddings.at(i, d);
    }
  }
  for (std::size_t c = 0; c < result.k; ++c) {
    for (std::size_t d = 0; d < embeddings.cols; ++d) {
      result.centroids.at(c, d) /= static_cast<double>(counts[c]);
    }
  }
  return result;
}

/// Segment label = centroid with the smallest cosine distance to the mean
/// of the segment's window embeddings; ties break to the lowest cluster id.
inline std::vector<int> assign_segments(std::size_t num_segments,
                                        const Tensor2& window_embeddings,
                                        const std::vector<int>& segment_of_window,
                                        const ClusterResult& result) {
  if (segment_of_window.size() != window_embeddings.rows) {
    throw std::invalid_argument("assign_segments: " +
                                std::to_string(segment_of_window.size()) +
                                " segment ids for " +
                                std::to_string(window_embeddings.rows) + " windows");
  }
  const std::size_t dim = window_embeddings.cols;
  std::vector<std::vector<double>> means(num_segments, std::vector<double>(dim, 0.0));
  std::vector<std::size_t> counts(num_segments, 0);
  for (std::size_t w = 0; w < window_embeddings.rows; ++w) {
    const int s = segment_of_window[w];
    if (s < 0 || static_cast<std::size_t>(s) >= num_segments) {
      throw std::invalid_argument("assign_segments: window " + std::to_string(w) +
                                  " has bad segment id " + std::to_string(s));
    }
    const double* p = window_embeddings.row_ptr(w);
    for (std::size_t d = 0; d < dim; ++d) means[static_cast<std::size_t>(s)][d] += p[d];
    ++counts[static_cast<std::size_t>(s)];
  }
  std::vector<int> labels(num_segments, 0);
  for (std::size_t s = 0; s < num_segments; ++s) {
    if (counts[s] == 0) {
      throw std::invalid_argument("assign_segments: segment " + std::to_string(s) +
                                  " owns no window embeddings");
    }
    for (std::size_t d = 0; d < dim; ++d) means[s][d] /= static_cast<double>(counts[s]);
    double best = std::numeric_limits<double>::infinity();
    int best_c = 0;
    for (std::size_t c = 0; c < result.k; ++c) {
      double dot = 0.0, nm = 0.0, nc = 0.0;
      for (std::size_t d = 0; d < dim; ++d) {
        dot += means[s][d] * result.centroids.at(c, d);
        nm += means[s][d] * means[s][d];
        nc += result.centroids.at(c, d) * result.centroids.at(c, d);
      }
      const double denom = std::sqrt(nm * nc);
      const double dist = denom > 0.0 ? 1.0 - dot / denom : 1.0;
      if (dist < best - 1e-15) {
        best = dist;
        best_c = static_cast<int>(c);
      }
    }
    labels[s] = best_c;
  }
  return labels;
}

/// Debug dump: one row of the matrix per line.
inline void dump_matrix(const Tensor2& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("dump_matrix: cannot write '" + path + "'");
  out.precision(17);
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t c = 0; c < m.cols; ++c) {
      if (c) out << ' ';
      out << m.at(r, c);
    }
    out << "\n";
  }
}

}  // namespace cluster
}  // namespace casediar

#endif  // CASEDIAR_CLUSTER_HPP_
