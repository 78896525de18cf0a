// voxanon/codebook.h

// Copyright 2026  The voxanon Authors

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

#ifndef VOXANON_CODEBOOK_H_
#define VOXANON_CODEBOOK_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "voxanon/error.h"
#include "voxanon/parallel.h"
#include "voxanon/random.h"
#include "voxanon/types.h"

namespace voxanon {

/// K centroids (one per row) defining discrete tokens 0..K-1.
template <typename Scalar>
class BasicCodebook {
 public:
  explicit BasicCodebook(RowMatrix<Scalar> centroids)
      : centroids_(std::move(centroids)) {
    if (centroids_.rows() < 2)
      throw SchemaError("codebook needs at least 2 centroids, got " +
                        std::to_string(centroids_.rows()));
    if (centroids_.cols() < 1) throw SchemaError("codebook has dimension 0");
    RequireFinite(centroids_, "codebook");
    norms_ = centroids_.rowwise().norm();
    for (Eigen::Index i = 0; i < size(); ++i) {
      if (!(norms_[i] > Scalar(0)))
        throw DataError("codebook centroid " + std::to_string(i) +
                        " has zero norm");
      for (Eigen::Index j = 0; j < i; ++j) {
        if (centroids_.row(i) == centroids_.row(j))
          throw DataError("codebook centroids " + std::to_string(j) + " and " +
                          std::to_string(i) + " are identical");
      }
    }
  }

  const RowMatrix<Scalar> &centroids() const { return centroids_; }
  const Vector<Scalar> &norms() const { return norms_; }
  Eigen::Index size() const { return centroids_.rows(); }
  Eigen::Index dim() const { return centroids_.cols(); }

 private:
  RowMatrix<Scalar> centroids_;
  Vector<Scalar> norms_;
};

using Codebook = BasicCodebook<float>;

template <typename Scalar>
struct KMeansResult {
  BasicCodebook<Scalar> codebook;
  // Inertia after each assignment step, starting with the initial centroids.
  std::vector<double> inertia;
  std::vector<std::int32_t> assignments;
  int iterations = 0;
  bool converged = false;
};

namespace internal {

template <typename Scalar, typename A, typename B>
double SquaredDistance(const Eigen::MatrixBase<A> &a,
                       const Eigen::MatrixBase<B> &b) {
  double acc = 0.0;
  for (Eigen::Index d = 0; d < a.size(); ++d) {
    const double diff = static_cast<double>(a(d)) - static_cast<double>(b(d));
    acc += diff * diff;
  }
  return acc;
}

// Nearest centroid by squared Euclidean distance, lowest index on ties.
template <typename Scalar, typename Row>
std::pair<std::int32_t, double> Nearest(const RowMatrix<Scalar> &centroids,
                                        const Eigen::MatrixBase<Row> &x) {
  std::int32_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
    const double d = SquaredDistance<Scalar>(x, centroids.row(c));
    if (d < best_d) {
      best_d = d;
      best = static_cast<std::int32_t>(c);
    }
  }
  return {best, best_d};
}

inline constexpr std::size_t kAssignChunk = 512;

template <typename Scalar>
double Assign(const RowMatrix<Scalar> &frames, const RowMatrix<Scalar> &centroids,
              int workers, std::vector<std::int32_t> &assign,
              std::vector<double> &dist) {
  const auto n = static_cast<std::size_t>(frames.rows());
  assign.resize(n);
  dist.resize(n);
  const std::size_t chunks = (n + kAssignChunk - 1) / kAssignChunk;
  ParallelFor(chunks, workers, [&](std::size_t c) {
    const std::size_t end = std::min(n, (c + 1) * kAssignChunk);
    for (std::size_t i = c * kAssignChunk; i < end; ++i) {
      const auto [best, d] =
          Nearest<Scalar>(centroids, frames.row(static_cast<Eigen::Index>(i)));
      assign[i] = best;
      dist[i] = d;
    }
  });
  double inertia = 0.0;
  for (double d : dist) inertia += d;
  return inertia;
}

// Index drawn with probability proportional to d2 (uniform if all zero).
inline Eigen::Index DrawProportional(const std::vector<double> &d2, double total,
                                     SeededStream &rng) {
  const auto n = static_cast<Eigen::Index>(d2.size());
  if (!(total > 0.0))
    return static_cast<Eigen::Index>(rng.Index(d2.size()));
  const double target = rng.Uniform01() * total;
  double run = 0.0;
  Eigen::Index pick = n - 1;
  for (Eigen::Index i = 0; i < n; ++i) {
    run += d2[i];
    if (run > target && d2[i] > 0.0) {
      pick = i;
      break;
    }
  }
  while (d2[pick] == 0.0) --pick;
  return pick;
}

// Greedy k-means++ seeding: first center uniform; each later center is the
// best of 2 + floor(ln k) candidates drawn proportionally to D^2, judged by
// the potential left after adding it.
template <typename Scalar>
RowMatrix<Scalar> SeedPlusPlus(const RowMatrix<Scalar> &frames, int k,
                               SeededStream &rng) {
  const Eigen::Index n = frames.rows();
  const int trials = 2 + static_cast<int>(std::log(static_cast<double>(k)));
  RowMatrix<Scalar> centers(k, frames.cols());
  centers.row(0) = frames.row(static_cast<Eigen::Index>(
      rng.Index(static_cast<std::size_t>(n))));
  std::vector<double> d2(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i)
    d2[i] = SquaredDistance<Scalar>(frames.row(i), centers.row(0));
  std::vector<double> cand(d2.size()), best(d2.size());
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (double v : d2) total += v;
    Eigen::Index best_pick = -1;
    double best_potential = 0.0;
    for (int t = 0; t < trials; ++t) {
      const Eigen::Index pick = DrawProportional(d2, total, rng);
      double potential = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        cand[i] = std::min(d2[i], SquaredDistance<Scalar>(frames.row(i), frames.row(pick)));
        potential += cand[i];
      }
      if (best_pick < 0 || potential < best_potential) {
        best_pick = pick;
        best_potential = potential;
        best.swap(cand);
      }
    }
    centers.row(c) = frames.row(best_pick);
    d2.swap(best);
  }
  return centers;
}

}  // namespace internal

/// Lloyd's algorithm with k-means++ seeding drawn from `seed`.
///
/// Stops when an iteration changes no assignment, or after `max_iters`
/// update steps. An emptied cluster is re-seeded at the point farthest from
/// its current centroid.
template <typename Scalar>
KMeansResult<Scalar> KMeansFit(const RowMatrix<Scalar> &frames, int k,
                               int max_iters, std::uint64_t seed,
                               int workers = 1) {
  if (k < 2) throw SchemaError("k-means needs K >= 2");
  if (max_iters < 1) throw DomainError("max_iters must be >= 1");
  if (frames.rows() < k)
    throw CapacityError("k-means: " + std::to_string(frames.rows()) +
                        " points for K = " + std::to_string(k));
  RequireFinite(frames, "k-means input");

  SeededStream rng(seed, "kmeans");
  RowMatrix<Scalar> centers = internal::SeedPlusPlus(frames, k, rng);
  std::vector<std::int32_t> assign;
  std::vector<double> dist;
  std::vector<double> history{
      internal::Assign(frames, centers, workers, assign, dist)};

  int iter = 0;
  bool converged = false;
  const Eigen::Index dim = frames.cols();
  while (iter < max_iters) {
    ++iter;
    RowMatrix<double> sums = RowMatrix<double>::Zero(k, dim);
    std::vector<Eigen::Index> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < frames.rows(); ++i) {
      sums.row(assign[i]) += frames.row(i).template cast<double>();
      ++counts[assign[i]];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        centers.row(c) =
            (sums.row(c) / static_cast<double>(counts[c])).template cast<Scalar>();
        continue;
      }
      const auto far = static_cast<Eigen::Index>(
          std::max_element(dist.begin(), dist.end()) - dist.begin());
      centers.row(c) = frames.row(far);
      dist[far] = 0.0;
    }
    std::vector<std::int32_t> prev = assign;
    history.push_back(internal::Assign(frames, centers, workers, assign, dist));
    if (assign == prev) {
      converged = true;
      break;
    }
  }
  return {BasicCodebook<Scalar>(std::move(centers)), std::move(history),
          std::move(assign), iter, converged};
}

/// Token of each frame: index of the nearest centroid (squared Euclidean),
/// lowest index on ties.
template <typename Scalar>
TokenSequence Discretize(const RowMatrix<Scalar> &frames,
                         const BasicCodebook<Scalar> &codebook) {
  if (frames.cols() != codebook.dim())
    throw SchemaError("discretize: frame dimension " +
                      std::to_string(frames.cols()) +
                      " does not match codebook dimension " +
                      std::to_string(codebook.dim()));
  TokenSequence tokens(static_cast<std::size_t>(frames.rows()));
  for (Eigen::Index t = 0; t < frames.rows(); ++t)
    tokens[t] = internal::Nearest<Scalar>(codebook.centroids(), frames.row(t)).first;
  return tokens;
}

// Reduces every run of equal adjacent tokens to a single token.
inline TokenSequence CollapseRepeats(const TokenSequence &tokens) {
  TokenSequence out;
  out.reserve(tokens.size());
  for (auto tok : tokens)
    if (out.empty() || out.back() != tok) out.push_back(tok);
  return out;
}

}  // namespace voxanon

#endif  // VOXANON_CODEBOOK_H_
