// voxanon/config.h

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

#ifndef VOXANON_CONFIG_H_
#define VOXANON_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "voxanon/knn.h"

namespace voxanon {

// Settings for a conversion run. Defaults give plain kNN-VC (k = 4, no
// perturbation, uniform pooling).
struct RunConfig {
  int k = kDefaultK;
  double noise_bound = 0.0;
  double length_factor_lo = 1.0;
  double length_factor_hi = 1.0;
  std::vector<double> pool_weights;  // empty: take weights from the manifest
  std::uint64_t seed = 0;
  int workers = 1;
  Metric metric = Metric::kCosine;

  void Validate() const;
  PerturbConfig Perturb() const;
};

// Sets one `key=value` entry. Known keys: k, noise_bound,
// length_factor_range (lo,hi), pool_weights (comma list), seed, workers,
// metric (cosine|euclidean).
void SetRunConfigValue(RunConfig &cfg, std::string_view key,
                       std::string_view value);

// Flat `key=value` lines; blank lines and lines starting with '#' are skipped.
RunConfig ParseRunConfig(std::string_view text, RunConfig base = {});
RunConfig LoadRunConfig(const std::filesystem::path &path, RunConfig base = {});

// Canonical text form, parseable by ParseRunConfig.
std::string RunConfigToText(const RunConfig &cfg);

}  // namespace voxanon

#endif  // VOXANON_CONFIG_H_
