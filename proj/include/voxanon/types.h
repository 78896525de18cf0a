// voxanon/types.h

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

#ifndef VOXANON_TYPES_H_
#define VOXANON_TYPES_H_

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "voxanon/error.h"

namespace voxanon {

// Frames are stored one per row, matching the C-order layout of NPY files.
template <typename Scalar>
using RowMatrix =
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using RowMatrixf = RowMatrix<float>;
using RowMatrixd = RowMatrix<double>;

/// One utterance worth of feature frames (T x D).
template <typename Scalar>
struct BasicFeatureSequence {
  RowMatrix<Scalar> frames;
  std::string utterance_id;

  Eigen::Index num_frames() const { return frames.rows(); }
  Eigen::Index dim() const { return frames.cols(); }
};

using FeatureSequence = BasicFeatureSequence<float>;

struct Embedding {
  Eigen::VectorXf vector;
  std::string utterance_id;
  std::optional<std::string> speaker_id;
};

struct Trial {
  std::string enroll_speaker_id;
  std::string test_utterance_id;
  bool is_target = false;

  bool operator==(const Trial &) const = default;
};

using TrialList = std::vector<Trial>;

struct TrialScore {
  double score = 0.0;
  bool is_target = false;
  std::string enroll_speaker_id;
  std::string test_utterance_id;

  bool operator==(const TrialScore &) const = default;
};

struct Transcript {
  std::string utterance_id;
  std::vector<std::string> words;

  bool operator==(const Transcript &) const = default;
};

using TokenSequence = std::vector<std::int32_t>;

/// Throws DataError if any entry is NaN or infinite.
template <typename Derived>
void RequireFinite(const Eigen::DenseBase<Derived> &m, const std::string &what) {
  if (!m.allFinite()) throw DataError(what + ": non-finite value");
}

}  // namespace voxanon

#endif  // VOXANON_TYPES_H_
