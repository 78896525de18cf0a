// voxanon/knn.h

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

#ifndef VOXANON_KNN_H_
#define VOXANON_KNN_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "voxanon/error.h"
#include "voxanon/parallel.h"
#include "voxanon/random.h"
#include "voxanon/types.h"

namespace voxanon {

enum class Metric { kCosine, kEuclidean };

inline constexpr int kDefaultK = 4;
inline constexpr double kDefaultNoiseBound = 32.0;

struct KnnOptions {
  Metric metric = Metric::kCosine;
  int workers = 1;
};

struct Neighbor {
  Eigen::Index index = 0;
  // Cosine similarity, or negated squared distance for Metric::kEuclidean.
  double similarity = 0.0;
};

/// Pool of target-speaker frames searched by kNN regression.
///
/// Rows are kept in insertion order; row norms are computed once at
/// construction. Immutable afterwards, so one instance can be shared by any
/// number of concurrent queries.
template <typename Scalar>
class BasicMatchingSet {
 public:
  BasicMatchingSet(RowMatrix<Scalar> frames, std::string source_id)
      : frames_(std::move(frames)), source_id_(std::move(source_id)) {
    if (frames_.rows() == 0 || frames_.cols() == 0)
      throw SchemaError("matching set '" + source_id_ + "' is empty");
    RequireFinite(frames_, "matching set '" + source_id_ + "'");
    norms_ = frames_.rowwise().norm();
    for (Eigen::Index i = 0; i < norms_.size(); ++i) {
      if (!(norms_[i] > Scalar(0)))
        throw DataError("matching set '" + source_id_ + "': row " +
                        std::to_string(i) + " has zero norm");
    }
  }

  const RowMatrix<Scalar> &frames() const { return frames_; }
  const Vector<Scalar> &norms() const { return norms_; }
  const std::string &source_id() const { return source_id_; }
  Eigen::Index size() const { return frames_.rows(); }
  Eigen::Index dim() const { return frames_.cols(); }

 private:
  RowMatrix<Scalar> frames_;
  Vector<Scalar> norms_;
  std::string source_id_;
};

using MatchingSet = BasicMatchingSet<float>;

/// Concatenates the frames of `sequences` (in order) into one matching set.
template <typename Scalar>
BasicMatchingSet<Scalar> BuildMatchingSet(
    std::span<const BasicFeatureSequence<Scalar>> sequences,
    std::string source_id) {
  if (sequences.empty())
    throw SchemaError("matching set '" + source_id + "': no sequences");
  const Eigen::Index dim = sequences.front().dim();
  Eigen::Index rows = 0;
  for (const auto &s : sequences) {
    if (s.dim() != dim)
      throw SchemaError("matching set '" + source_id + "': utterance '" +
                        s.utterance_id + "' has dimension " +
                        std::to_string(s.dim()) + ", expected " +
                        std::to_string(dim));
    rows += s.num_frames();
  }
  RowMatrix<Scalar> frames(rows, dim);
  Eigen::Index at = 0;
  for (const auto &s : sequences) {
    frames.middleRows(at, s.num_frames()) = s.frames;
    at += s.num_frames();
  }
  return BasicMatchingSet<Scalar>(std::move(frames), std::move(source_id));
}

/// Matching sets with normalized pooling weights.
template <typename Scalar>
class BasicPooledTarget {
 public:
  // Empty `weights` means uniform pooling. Weights are rescaled to sum to 1.
  explicit BasicPooledTarget(std::vector<BasicMatchingSet<Scalar>> sets,
                             std::vector<double> weights = {})
      : sets_(std::move(sets)), weights_(std::move(weights)) {
    if (sets_.empty()) throw SchemaError("pooled target has no matching sets");
    if (weights_.empty()) weights_.assign(sets_.size(), 1.0);
    if (weights_.size() != sets_.size())
      throw SchemaError("pooled target: " + std::to_string(sets_.size()) +
                        " sets but " + std::to_string(weights_.size()) +
                        " weights");
    double total = 0.0;
    for (double w : weights_) {
      if (!(w >= 0.0) || !std::isfinite(w))
        throw DomainError("pooled target: weights must be finite and >= 0");
      total += w;
    }
    if (!(total > 0.0)) throw DomainError("pooled target: weights sum to 0");
    for (double &w : weights_) w /= total;
    for (const auto &s : sets_) {
      if (s.dim() != sets_.front().dim())
        throw SchemaError("pooled target: matching set '" + s.source_id() +
                          "' has mismatched dimension");
    }
  }

  const std::vector<BasicMatchingSet<Scalar>> &sets() const { return sets_; }
  const std::vector<double> &weights() const { return weights_; }
  Eigen::Index dim() const { return sets_.front().dim(); }
  Eigen::Index min_size() const {
    Eigen::Index m = sets_.front().size();
    for (const auto &s : sets_) m = std::min(m, s.size());
    return m;
  }

 private:
  std::vector<BasicMatchingSet<Scalar>> sets_;
  std::vector<double> weights_;
};

using PooledTarget = BasicPooledTarget<float>;

struct PerturbConfig {
  double noise_bound = 0.0;
  double length_factor_lo = 1.0;
  double length_factor_hi = 1.0;
  std::uint64_t seed = 0;

  void Validate() const {
    if (!(noise_bound >= 0.0) || !std::isfinite(noise_bound))
      throw DomainError("noise bound must be finite and >= 0");
    if (!(length_factor_lo > 0.0) || !(length_factor_lo <= length_factor_hi) ||
        !std::isfinite(length_factor_hi))
      throw DomainError("length factor range must satisfy 0 < lo <= hi");
  }
};

namespace internal {

inline void CheckK(int k, Eigen::Index m) {
  if (k <= 0) throw DomainError("k must be positive");
  if (k > m)
    throw CapacityError("k = " + std::to_string(k) +
                        " exceeds matching set size " + std::to_string(m));
}

// Ranks by similarity descending, then by row index ascending.
inline void TopK(const double *scores, Eigen::Index m, int k,
                 std::vector<Eigen::Index> &scratch,
                 std::vector<Neighbor> &out) {
  scratch.resize(static_cast<std::size_t>(m));
  std::iota(scratch.begin(), scratch.end(), Eigen::Index{0});
  std::partial_sort(scratch.begin(), scratch.begin() + k, scratch.end(),
                    [scores](Eigen::Index a, Eigen::Index b) {
                      if (scores[a] != scores[b]) return scores[a] > scores[b];
                      return a < b;
                    });
  out.resize(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) out[j] = {scratch[j], scores[scratch[j]]};
}

// Number of query rows scored per matrix product. Fixed so results do not
// depend on how work is split across threads.
inline constexpr Eigen::Index kQueryBlock = 256;

// Fills `scores` (rows x M, row-major) for one block of queries.
template <typename Scalar>
void ScoreBlock(const BasicMatchingSet<Scalar> &set,
                const Eigen::Ref<const RowMatrix<Scalar>> &queries,
                Metric metric, RowMatrix<double> &scores) {
  const RowMatrix<Scalar> dots = queries * set.frames().transpose();
  scores.resize(queries.rows(), set.size());
  if (metric == Metric::kCosine) {
    for (Eigen::Index b = 0; b < queries.rows(); ++b) {
      const double qn = static_cast<double>(queries.row(b).norm());
      if (!(qn > 0.0))
        throw DataError("kNN query frame has zero norm");
      for (Eigen::Index m = 0; m < set.size(); ++m)
        scores(b, m) = static_cast<double>(dots(b, m)) /
                       (qn * static_cast<double>(set.norms()[m]));
    }
  } else {
    for (Eigen::Index b = 0; b < queries.rows(); ++b) {
      const double qn2 = static_cast<double>(queries.row(b).squaredNorm());
      for (Eigen::Index m = 0; m < set.size(); ++m) {
        const double sn = static_cast<double>(set.norms()[m]);
        scores(b, m) = -(qn2 - 2.0 * static_cast<double>(dots(b, m)) + sn * sn);
      }
    }
  }
}

// Mean of the selected rows, clamped into their componentwise range so the
// result stays inside the neighbors' bounding box despite rounding.
template <typename Scalar, typename OutRow>
void MeanOfRows(const RowMatrix<Scalar> &rows,
                const std::vector<Neighbor> &nbrs, OutRow &&out) {
  const Eigen::Index dim = rows.cols();
  for (Eigen::Index d = 0; d < dim; ++d) {
    double sum = 0.0;
    Scalar lo = rows(nbrs.front().index, d), hi = lo;
    for (const auto &n : nbrs) {
      const Scalar v = rows(n.index, d);
      sum += static_cast<double>(v);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const Scalar mean =
        static_cast<Scalar>(sum / static_cast<double>(nbrs.size()));
    out(d) = std::clamp(mean, lo, hi);
  }
}

// kNN mean of every row of `queries`, written into `out` (same shape).
template <typename Scalar>
void RegressInto(const RowMatrix<Scalar> &queries,
                 const BasicMatchingSet<Scalar> &set, int k,
                 const KnnOptions &opts, RowMatrix<Scalar> &out) {
  CheckK(k, set.size());
  if (queries.cols() != set.dim())
    throw SchemaError("query dimension " + std::to_string(queries.cols()) +
                      " does not match matching set dimension " +
                      std::to_string(set.dim()));
  out.resize(queries.rows(), queries.cols());
  const Eigen::Index blocks = (queries.rows() + kQueryBlock - 1) / kQueryBlock;
  ParallelFor(static_cast<std::size_t>(blocks), opts.workers,
              [&](std::size_t blk) {
    const Eigen::Index begin = static_cast<Eigen::Index>(blk) * kQueryBlock;
    const Eigen::Index rows = std::min(kQueryBlock, queries.rows() - begin);
    RowMatrix<double> scores;
    ScoreBlock<Scalar>(set, queries.middleRows(begin, rows), opts.metric,
                       scores);
    std::vector<Eigen::Index> scratch;
    std::vector<Neighbor> nbrs;
    for (Eigen::Index b = 0; b < rows; ++b) {
      TopK(scores.row(b).data(), set.size(), k, scratch, nbrs);
      MeanOfRows(set.frames(), nbrs, out.row(begin + b));
    }
  });
}

}  // namespace internal

/// The k rows of `set` most similar to `query`, best first. Equal
/// similarities are ordered by row index.
template <typename Scalar, typename Derived>
std::vector<Neighbor> KnnQuery(const BasicMatchingSet<Scalar> &set,
                               const Eigen::MatrixBase<Derived> &query, int k,
                               Metric metric = Metric::kCosine) {
  internal::CheckK(k, set.size());
  if (query.size() != set.dim())
    throw SchemaError("query dimension does not match matching set");
  const RowMatrix<Scalar> q = query.derived().template cast<Scalar>().transpose();
  RowMatrix<double> scores;
  internal::ScoreBlock<Scalar>(set, q, metric, scores);
  std::vector<Eigen::Index> scratch;
  std::vector<Neighbor> out;
  internal::TopK(scores.data(), set.size(), k, scratch, out);
  return out;
}

/// Replaces each frame of `seq` by the mean of its k nearest matching-set rows.
template <typename Scalar>
BasicFeatureSequence<Scalar> KnnRegress(const BasicFeatureSequence<Scalar> &seq,
                                        const BasicMatchingSet<Scalar> &set,
                                        int k = kDefaultK,
                                        const KnnOptions &opts = {}) {
  BasicFeatureSequence<Scalar> out;
  out.utterance_id = seq.utterance_id;
  internal::RegressInto(seq.frames, set, k, opts, out.frames);
  return out;
}

/// Weighted sum over matching sets of the per-set kNN regression.
/// Sets with zero weight are skipped.
template <typename Scalar>
BasicFeatureSequence<Scalar> PooledRegress(
    const BasicFeatureSequence<Scalar> &seq,
    const BasicPooledTarget<Scalar> &target, int k = kDefaultK,
    const KnnOptions &opts = {}) {
  if (seq.dim() != target.dim())
    throw SchemaError("sequence dimension does not match pooled target");
  internal::CheckK(k, target.min_size());
  RowMatrix<double> acc = RowMatrix<double>::Zero(seq.num_frames(), seq.dim());
  RowMatrix<Scalar> part;
  for (std::size_t j = 0; j < target.sets().size(); ++j) {
    const double w = target.weights()[j];
    if (w == 0.0) continue;
    internal::RegressInto(seq.frames, target.sets()[j], k, opts, part);
    acc += w * part.template cast<double>();
  }
  BasicFeatureSequence<Scalar> out;
  out.utterance_id = seq.utterance_id;
  out.frames = acc.template cast<Scalar>();
  return out;
}

/// Adds i.i.d. Uniform(-bound, bound) noise to every component. The stream
/// is keyed by (seed, utterance_id); every output component differs from its
/// input by strictly less than `bound`.
template <typename Scalar>
BasicFeatureSequence<Scalar> PerturbNoise(const BasicFeatureSequence<Scalar> &seq,
                                          double bound, std::uint64_t seed) {
  if (!(bound >= 0.0) || !std::isfinite(bound))
    throw DomainError("noise bound must be finite and >= 0");
  BasicFeatureSequence<Scalar> out = seq;
  if (bound == 0.0) return out;
  SeededStream stream(seed, seq.utterance_id, "noise");
  for (Eigen::Index t = 0; t < out.frames.rows(); ++t) {
    for (Eigen::Index d = 0; d < out.frames.cols(); ++d) {
      const Scalar in = seq.frames(t, d);
      Scalar v = static_cast<Scalar>(static_cast<double>(in) +
                                     stream.Uniform(-bound, bound));
      // Rounding to Scalar may reach the bound; pull back toward the input.
      while (std::abs(static_cast<long double>(v) -
                      static_cast<long double>(in)) >=
             static_cast<long double>(bound))
        v = std::nextafter(v, in);
      out.frames(t, d) = v;
    }
  }
  return out;
}

/// Output length for a tempo factor: max(1, round(T / factor)).
inline Eigen::Index StretchedLength(Eigen::Index frames, double factor) {
  const double t = std::round(static_cast<double>(frames) / factor);
  return std::max<Eigen::Index>(1, static_cast<Eigen::Index>(t));
}

/// Tempo change by linear interpolation along time. Output frame t' samples
/// input position t' (T - 1) / (T' - 1), or the midpoint when T' = 1.
template <typename Scalar>
BasicFeatureSequence<Scalar> LengthVariation(
    const BasicFeatureSequence<Scalar> &seq, double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor))
    throw DomainError("length factor must be positive and finite");
  const Eigen::Index in_len = seq.num_frames();
  if (in_len < 1) throw DataError("cannot stretch an empty sequence");
  if (factor == 1.0) return seq;
  const Eigen::Index out_len = StretchedLength(in_len, factor);

  BasicFeatureSequence<Scalar> out;
  out.utterance_id = seq.utterance_id;
  out.frames.resize(out_len, seq.dim());
  for (Eigen::Index t = 0; t < out_len; ++t) {
    const double pos =
        out_len == 1 ? 0.5 * static_cast<double>(in_len - 1)
                     : static_cast<double>(t) * static_cast<double>(in_len - 1) /
                           static_cast<double>(out_len - 1);
    Eigen::Index i0 = static_cast<Eigen::Index>(std::floor(pos));
    double frac = pos - static_cast<double>(i0);
    if (i0 >= in_len - 1) {
      i0 = in_len - 1;
      frac = 0.0;
    }
    const Eigen::Index i1 = std::min(i0 + 1, in_len - 1);
    for (Eigen::Index d = 0; d < seq.dim(); ++d) {
      const Scalar a = seq.frames(i0, d), b = seq.frames(i1, d);
      const double v = static_cast<double>(a) +
                       frac * (static_cast<double>(b) - static_cast<double>(a));
      out.frames(t, d) =
          std::clamp(static_cast<Scalar>(v), std::min(a, b), std::max(a, b));
    }
  }
  return out;
}

/// Length factor used by AnonymizeUtterance for one utterance.
inline double DrawLengthFactor(const PerturbConfig &cfg,
                               const std::string &utterance_id) {
  SeededStream stream(cfg.seed, utterance_id, "length");
  return stream.Uniform(cfg.length_factor_lo, cfg.length_factor_hi);
}

/// Full conversion: length variation, then input noise, then pooled kNN
/// regression. Deterministic in (cfg.seed, seq.utterance_id).
template <typename Scalar>
BasicFeatureSequence<Scalar> AnonymizeUtterance(
    const BasicFeatureSequence<Scalar> &seq,
    const BasicPooledTarget<Scalar> &target, int k, const PerturbConfig &cfg,
    const KnnOptions &opts = {}) {
  cfg.Validate();
  const BasicFeatureSequence<Scalar> stretched =
      LengthVariation(seq, DrawLengthFactor(cfg, seq.utterance_id));
  const BasicFeatureSequence<Scalar> noisy =
      PerturbNoise(stretched, cfg.noise_bound, cfg.seed);
  return PooledRegress(noisy, target, k, opts);
}

}  // namespace voxanon

#endif  // VOXANON_KNN_H_
