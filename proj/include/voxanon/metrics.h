// voxanon/metrics.h

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

#ifndef VOXANON_METRICS_H_
#define VOXANON_METRICS_H_

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "voxanon/error.h"
#include "voxanon/types.h"

namespace voxanon {

// How a test embedding is compared with an enrollment pool.
//   kMeanEmbedding: cosine against the mean of length-normalized enrollments.
//   kMeanScore:     mean of the cosines against each enrollment.
enum class EnrollPooling { kMeanEmbedding, kMeanScore };

template <typename Scalar>
double EnrollmentScore(std::span<const Vector<Scalar>> enroll,
                       const Vector<Scalar> &test,
                       EnrollPooling pooling = EnrollPooling::kMeanEmbedding) {
  if (enroll.empty()) throw SchemaError("enrollment pool is empty");
  const Eigen::VectorXd t = test.template cast<double>();
  const double tn = t.norm();
  if (!(tn > 0.0)) throw DataError("test embedding has zero norm");
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(t.size());
  double score_sum = 0.0;
  for (const auto &e : enroll) {
    if (e.size() != t.size())
      throw SchemaError("enrollment embedding dimension " +
                        std::to_string(e.size()) + " != test dimension " +
                        std::to_string(t.size()));
    const Eigen::VectorXd v = e.template cast<double>();
    const double vn = v.norm();
    if (!(vn > 0.0)) throw DataError("enrollment embedding has zero norm");
    acc += v / vn;
    score_sum += v.dot(t) / (vn * tn);
  }
  if (pooling == EnrollPooling::kMeanScore)
    return score_sum / static_cast<double>(enroll.size());
  const double an = acc.norm();
  if (!(an > 0.0)) throw DataError("enrollment pool mean has zero norm");
  return acc.dot(t) / (an * tn);
}

struct EerResult {
  double eer = 0.0;
  double threshold = 0.0;
  std::size_t n_target = 0;
  std::size_t n_nontarget = 0;
};

/// Equal error rate over a set of scored trials.
///
/// P_miss(th) is the fraction of target scores below th, P_fa(th) the fraction
/// of non-target scores at or above th. Thresholds are swept over score
/// midpoints; when the two step curves do not meet at an operating point the
/// crossing is linearly interpolated between the bracketing points.
EerResult ComputeEer(std::span<const TrialScore> scores);

struct WerResult {
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  std::size_t n_ref = 0;
  double wer = 0.0;

  std::size_t errors() const { return substitutions + deletions + insertions; }
};

// Lowercases ASCII letters; other bytes pass through.
std::string FoldCase(std::string_view word);

/// Edit counts from one minimal alignment of hyp against ref. The backtrace
/// prefers substitution/match, then insertion, then deletion. Throws
/// DomainError for an empty reference.
WerResult WordErrorRate(const std::vector<std::string> &ref,
                        const std::vector<std::string> &hyp);

// Same counts without the non-empty reference requirement; wer is 0 when the
// reference is empty.
WerResult AlignWords(const std::vector<std::string> &ref,
                     const std::vector<std::string> &hyp);

/// Corpus WER: sum of errors over sum of reference words. Utterances missing
/// from `hyps` are scored against an empty hypothesis.
WerResult CorpusWordErrorRate(const std::vector<Transcript> &refs,
                              const std::vector<Transcript> &hyps);

struct UarResult {
  std::map<std::string, double> per_class_recall;
  double uar = 0.0;
};

/// Mean over gold classes of per-class recall. Classes seen only among
/// predictions do not count.
UarResult UnweightedAverageRecall(
    std::span<const std::pair<std::string, std::string>> gold_and_predicted);

}  // namespace voxanon

#endif  // VOXANON_METRICS_H_
