// voxanon/synth.h

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

#ifndef VOXANON_SYNTH_H_
#define VOXANON_SYNTH_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "voxanon/types.h"

namespace voxanon {

// Synthetic speakers: one isotropic unit-variance Gaussian cluster of frames
// per speaker. Used for installation checks and model-free experiments.
struct SyntheticCorpusSpec {
  int n_speakers = 10;
  int frames_per_speaker = 400;
  int dim = 16;
  // Minimum distance between any two speaker means, in units of the
  // per-component standard deviation.
  double cluster_separation = 10.0;
  std::uint64_t seed = 0;
  int utterances_per_speaker = 8;

  void Validate() const;
};

struct SyntheticCorpus {
  std::vector<std::string> speakers;
  RowMatrixd means;  // one row per speaker
  std::vector<FeatureSequence> utterances;
  std::map<std::string, std::string> utt2spk;

  // First half of the speakers act as sources, the rest as targets.
  std::size_t num_source_speakers() const { return speakers.size() / 2; }
  bool IsSourceSpeaker(const std::string &speaker) const;
};

SyntheticCorpus GenerateSyntheticCorpus(const SyntheticCorpusSpec &spec);

/// Writes the corpus under `out_dir`:
///   source/<utt>.npy, target/<utt>.npy  feature files by speaker role
///   means/<spk>.npy                     cluster means as 1-D embeddings
///   utt2spk.json                        utterance -> speaker sidecar
///   targets.json                        one matching set per target speaker
///   manifest.json                       spec, speakers and file lists
/// Returns the manifest.
nlohmann::json WriteSyntheticCorpus(const SyntheticCorpus &corpus,
                                    const SyntheticCorpusSpec &spec,
                                    const std::filesystem::path &out_dir);

}  // namespace voxanon

#endif  // VOXANON_SYNTH_H_
