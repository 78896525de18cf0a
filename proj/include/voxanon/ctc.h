// voxanon/ctc.h

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

#ifndef VOXANON_CTC_H_
#define VOXANON_CTC_H_

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Core>

#include "voxanon/codebook.h"
#include "voxanon/error.h"
#include "voxanon/types.h"

namespace voxanon {

// How a frame/centroid cosine becomes a logit.
//   kSimilarity: cos / temperature
//   kDistance:   (1 - cos) / temperature
enum class LogitSign { kSimilarity, kDistance };

struct CtcConfig {
  double temperature = 1.0;
  // Constant logit of the blank class, which is appended as class K.
  double blank_logit = 0.0;
  LogitSign sign = LogitSign::kSimilarity;

  void Validate() const {
    if (!(temperature > 0.0) || !std::isfinite(temperature))
      throw DomainError("CTC temperature must be positive and finite");
    if (!std::isfinite(blank_logit))
      throw DomainError("CTC blank logit must be finite");
  }
};

template <typename Scalar>
struct CtcResult {
  double loss = 0.0;
  // d loss / d frames, same shape as the input frames.
  RowMatrix<Scalar> grad;
  bool feasible = true;
};

namespace internal {

inline double LogAdd(double a, double b) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  return std::max(a, b) + std::log1p(std::exp(-std::abs(a - b)));
}

// Cosine of every frame against every centroid (T x K).
template <typename Scalar>
RowMatrixd FrameCentroidCosines(const RowMatrix<Scalar> &frames,
                                const BasicCodebook<Scalar> &codebook,
                                Eigen::VectorXd &frame_norms) {
  if (frames.cols() != codebook.dim())
    throw SchemaError("CTC: frame dimension " + std::to_string(frames.cols()) +
                      " does not match codebook dimension " +
                      std::to_string(codebook.dim()));
  const RowMatrixd f = frames.template cast<double>();
  frame_norms = f.rowwise().norm();
  for (Eigen::Index t = 0; t < f.rows(); ++t)
    if (!(frame_norms[t] > 0.0))
      throw DataError("CTC: frame " + std::to_string(t) + " has zero norm");
  const RowMatrixd c = codebook.centroids().template cast<double>();
  const Eigen::VectorXd cn = c.rowwise().norm();
  RowMatrixd cos = f * c.transpose();
  cos.array().colwise() /= frame_norms.array();
  cos.array().rowwise() /= cn.transpose().array();
  return cos;
}

inline double LogitScale(const CtcConfig &cfg) {
  return (cfg.sign == LogitSign::kSimilarity ? 1.0 : -1.0) / cfg.temperature;
}

inline RowMatrixd LogitsFromCosines(const RowMatrixd &cos, const CtcConfig &cfg) {
  const Eigen::Index k = cos.cols();
  RowMatrixd logits(cos.rows(), k + 1);
  if (cfg.sign == LogitSign::kSimilarity)
    logits.leftCols(k) = cos / cfg.temperature;
  else
    logits.leftCols(k) = (1.0 - cos.array()) / cfg.temperature;
  logits.col(k).setConstant(cfg.blank_logit);
  return logits;
}

inline RowMatrixd LogSoftmaxRows(const RowMatrixd &logits) {
  RowMatrixd out(logits.rows(), logits.cols());
  for (Eigen::Index t = 0; t < logits.rows(); ++t) {
    const double m = logits.row(t).maxCoeff();
    const double lse =
        m + std::log((logits.row(t).array() - m).exp().sum());
    out.row(t) = logits.row(t).array() - lse;
  }
  return out;
}

}  // namespace internal

/// Per-frame logits over K centroids plus a trailing blank class (T x (K+1)).
template <typename Scalar>
RowMatrixd CtcLogits(const RowMatrix<Scalar> &frames,
                     const BasicCodebook<Scalar> &codebook,
                     const CtcConfig &cfg) {
  cfg.Validate();
  Eigen::VectorXd norms;
  return internal::LogitsFromCosines(
      internal::FrameCentroidCosines(frames, codebook, norms), cfg);
}

/// Smallest frame count that admits a CTC alignment of `target`: one frame
/// per label plus one separating blank per adjacent repeat.
inline Eigen::Index CtcMinFrames(const TokenSequence &target) {
  Eigen::Index need = static_cast<Eigen::Index>(target.size());
  for (std::size_t i = 1; i < target.size(); ++i)
    if (target[i] == target[i - 1]) ++need;
  return need;
}

/// CTC negative log-likelihood of `target` under the cosine logits of
/// `frames`, with its gradient with respect to the frames.
///
/// The forward and backward recursions run in log space. When no alignment
/// fits in the available frames the result is +inf with a zero gradient and
/// `feasible == false`.
template <typename Scalar>
CtcResult<Scalar> CtcLoss(const RowMatrix<Scalar> &frames,
                          const TokenSequence &target,
                          const BasicCodebook<Scalar> &codebook,
                          const CtcConfig &cfg) {
  cfg.Validate();
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  const Eigen::Index num_classes = codebook.size();
  const Eigen::Index blank = num_classes;
  for (auto tok : target)
    if (tok < 0 || tok >= num_classes)
      throw SchemaError("CTC: target token " + std::to_string(tok) +
                        " outside [0, " + std::to_string(num_classes) + ")");

  Eigen::VectorXd frame_norms;
  const RowMatrixd cos =
      internal::FrameCentroidCosines(frames, codebook, frame_norms);
  const Eigen::Index num_frames = frames.rows();

  CtcResult<Scalar> result;
  result.grad = RowMatrix<Scalar>::Zero(frames.rows(), frames.cols());
  if (num_frames < CtcMinFrames(target) || num_frames == 0) {
    result.loss = std::numeric_limits<double>::infinity();
    result.feasible = false;
    return result;
  }

  const RowMatrixd log_probs =
      internal::LogSoftmaxRows(internal::LogitsFromCosines(cos, cfg));

  // Blank-augmented label sequence: blank, l1, blank, l2, ..., blank.
  const Eigen::Index ext = 2 * static_cast<Eigen::Index>(target.size()) + 1;
  auto label = [&](Eigen::Index s) -> Eigen::Index {
    return s % 2 == 0 ? blank : target[static_cast<std::size_t>(s / 2)];
  };
  auto can_skip = [&](Eigen::Index s) {
    return s >= 2 && label(s) != blank && label(s) != label(s - 2);
  };

  RowMatrixd alpha = RowMatrixd::Constant(num_frames, ext, kNegInf);
  alpha(0, 0) = log_probs(0, blank);
  if (ext > 1) alpha(0, 1) = log_probs(0, label(1));
  for (Eigen::Index t = 1; t < num_frames; ++t) {
    for (Eigen::Index s = 0; s < ext; ++s) {
      double a = alpha(t - 1, s);
      if (s >= 1) a = internal::LogAdd(a, alpha(t - 1, s - 1));
      if (can_skip(s)) a = internal::LogAdd(a, alpha(t - 1, s - 2));
      if (a != kNegInf) alpha(t, s) = a + log_probs(t, label(s));
    }
  }

  RowMatrixd beta = RowMatrixd::Constant(num_frames, ext, kNegInf);
  const Eigen::Index last = num_frames - 1;
  beta(last, ext - 1) = log_probs(last, label(ext - 1));
  if (ext > 1) beta(last, ext - 2) = log_probs(last, label(ext - 2));
  for (Eigen::Index t = last - 1; t >= 0; --t) {
    for (Eigen::Index s = 0; s < ext; ++s) {
      double b = beta(t + 1, s);
      if (s + 1 < ext) b = internal::LogAdd(b, beta(t + 1, s + 1));
      if (s + 2 < ext && can_skip(s + 2))
        b = internal::LogAdd(b, beta(t + 1, s + 2));
      if (b != kNegInf) beta(t, s) = b + log_probs(t, label(s));
    }
  }

  double log_likelihood = alpha(last, ext - 1);
  if (ext > 1) log_likelihood = internal::LogAdd(log_likelihood, alpha(last, ext - 2));
  // P <= 1, so any negative value is rounding.
  result.loss = std::max(0.0, -log_likelihood);

  // d loss / d logit(t, c) = p(t, c) - occupancy(t, c), with occupancy the
  // posterior mass of alignments emitting class c at frame t.
  const double scale = internal::LogitScale(cfg);
  const RowMatrixd centroids = codebook.centroids().template cast<double>();
  const Eigen::VectorXd centroid_norms = centroids.rowwise().norm();
  std::vector<double> log_occ(static_cast<std::size_t>(num_classes + 1));
  for (Eigen::Index t = 0; t < num_frames; ++t) {
    std::fill(log_occ.begin(), log_occ.end(), kNegInf);
    for (Eigen::Index s = 0; s < ext; ++s) {
      const Eigen::Index c = label(s);
      log_occ[c] = internal::LogAdd(log_occ[c], alpha(t, s) + beta(t, s) -
                                                    log_probs(t, c));
    }
    // Only centroid logits depend on the frame; the blank logit is constant.
    Eigen::VectorXd weighted_dir = Eigen::VectorXd::Zero(frames.cols());
    double weighted_cos = 0.0;
    for (Eigen::Index c = 0; c < num_classes; ++c) {
      const double occ = log_occ[c] == kNegInf
                             ? 0.0
                             : std::exp(log_occ[c] - log_likelihood);
      const double g = (std::exp(log_probs(t, c)) - occ) * scale;
      weighted_dir += (g / centroid_norms[c]) * centroids.row(c).transpose();
      weighted_cos += g * cos(t, c);
    }
    const double fn = frame_norms[t];
    const Eigen::VectorXd f = frames.row(t).template cast<double>().transpose();
    // d cos(f, m) / d f = m / (|f| |m|) - cos(f, m) f / |f|^2
    const Eigen::VectorXd g = weighted_dir / fn - (weighted_cos / (fn * fn)) * f;
    result.grad.row(t) = g.transpose().template cast<Scalar>();
  }
  return result;
}

}  // namespace voxanon

#endif  // VOXANON_CTC_H_
