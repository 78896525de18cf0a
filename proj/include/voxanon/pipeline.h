// voxanon/pipeline.h

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

#ifndef VOXANON_PIPELINE_H_
#define VOXANON_PIPELINE_H_

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "voxanon/config.h"
#include "voxanon/knn.h"

namespace voxanon {

namespace fs = std::filesystem;

// One matching set in a target manifest. Relative file paths are resolved
// against the manifest's directory.
struct TargetSetSpec {
  std::string id;
  double weight = 1.0;
  std::vector<fs::path> files;
};

// {"sets": [{"id": "...", "weight": 1.0, "files": ["a.npy", ...]}, ...]}
std::vector<TargetSetSpec> ReadTargetManifest(const fs::path &path);

/// Loads every matching set named in the manifest. `cfg.pool_weights`, when
/// non-empty, overrides the manifest weights.
PooledTarget LoadPooledTarget(const fs::path &manifest, const RunConfig &cfg);

struct UtteranceReport {
  std::string utterance_id;
  bool ok = false;
  std::string error;
  Eigen::Index frames_in = 0;
  Eigen::Index frames_out = 0;
  double length_factor = 1.0;
  double seconds = 0.0;
};

struct ConvertSummary {
  std::vector<UtteranceReport> utterances;  // sorted by utterance id
  std::size_t failed = 0;

  nlohmann::json ToJson(const RunConfig &cfg) const;
};

/// Anonymizes every `*.npy` in `source_dir` against the pooled target and
/// writes `<utterance_id>.npy` plus `summary.json` into `out_dir`.
///
/// Target loading errors are thrown before anything is written. Per-utterance
/// failures are collected in the summary; the other utterances are still
/// written. Output files do not depend on `cfg.workers`.
ConvertSummary RunConvert(const RunConfig &cfg, const fs::path &source_dir,
                          const fs::path &target_manifest,
                          const fs::path &out_dir);

}  // namespace voxanon

#endif  // VOXANON_PIPELINE_H_
