// synth.cc

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

#include "voxanon/synth.h"

#include <cmath>
#include <cstdio>
#include <limits>

#include "voxanon/error.h"
#include "voxanon/io.h"
#include "voxanon/random.h"

namespace voxanon {

namespace {

std::string SpeakerId(int i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "spk%02d", i);
  return buf;
}

std::string UtteranceId(const std::string &spk, int u) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "_u%03d", u);
  return spk + buf;
}

double MinPairwiseDistance(const RowMatrixd &means) {
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < means.rows(); ++i)
    for (Eigen::Index j = i + 1; j < means.rows(); ++j)
      best = std::min(best, (means.row(i) - means.row(j)).norm());
  return best;
}

}  // namespace

void SyntheticCorpusSpec::Validate() const {
  if (n_speakers < 2) throw SchemaError("synthetic corpus needs >= 2 speakers");
  if (dim < 2) throw SchemaError("synthetic corpus needs dimension >= 2");
  if (!(cluster_separation > 0.0) || !std::isfinite(cluster_separation))
    throw DomainError("cluster separation must be positive");
  if (utterances_per_speaker < 1)
    throw SchemaError("need >= 1 utterance per speaker");
  if (frames_per_speaker < utterances_per_speaker)
    throw SchemaError("frames_per_speaker must be >= utterances_per_speaker");
}

bool SyntheticCorpus::IsSourceSpeaker(const std::string &speaker) const {
  for (std::size_t i = 0; i < num_source_speakers(); ++i)
    if (speakers[i] == speaker) return true;
  return false;
}

SyntheticCorpus GenerateSyntheticCorpus(const SyntheticCorpusSpec &spec) {
  spec.Validate();
  SyntheticCorpus corpus;
  corpus.means.resize(spec.n_speakers, spec.dim);
  SeededStream mean_rng(spec.seed, "synthetic-means");
  for (Eigen::Index i = 0; i < corpus.means.rows(); ++i)
    for (Eigen::Index d = 0; d < corpus.means.cols(); ++d)
      corpus.means(i, d) = mean_rng.Normal();
  // Rescale so the closest pair sits exactly at the requested separation.
  corpus.means *= spec.cluster_separation / MinPairwiseDistance(corpus.means);
  while (MinPairwiseDistance(corpus.means) < spec.cluster_separation)
    corpus.means *= 1.0 + 1e-12;

  for (int s = 0; s < spec.n_speakers; ++s) {
    const std::string spk = SpeakerId(s);
    corpus.speakers.push_back(spk);
    SeededStream rng(spec.seed, spk, "synthetic-frames");
    const int base = spec.frames_per_speaker / spec.utterances_per_speaker;
    const int extra = spec.frames_per_speaker % spec.utterances_per_speaker;
    for (int u = 0; u < spec.utterances_per_speaker; ++u) {
      FeatureSequence seq;
      seq.utterance_id = UtteranceId(spk, u);
      seq.frames.resize(base + (u < extra ? 1 : 0), spec.dim);
      for (Eigen::Index t = 0; t < seq.frames.rows(); ++t)
        for (Eigen::Index d = 0; d < spec.dim; ++d)
          seq.frames(t, d) = static_cast<float>(corpus.means(s, d) + rng.Normal());
      corpus.utt2spk.emplace(seq.utterance_id, spk);
      corpus.utterances.push_back(std::move(seq));
    }
  }
  return corpus;
}

nlohmann::json WriteSyntheticCorpus(const SyntheticCorpus &corpus,
                                    const SyntheticCorpusSpec &spec,
                                    const std::filesystem::path &out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  for (const char *sub : {"source", "target", "means"}) {
    fs::create_directories(out_dir / sub, ec);
    if (ec) throw IoError("cannot create " + (out_dir / sub).string());
  }

  nlohmann::json speakers = nlohmann::json::object();
  std::map<std::string, std::vector<std::string>> files;
  for (const auto &utt : corpus.utterances) {
    const std::string &spk = corpus.utt2spk.at(utt.utterance_id);
    const std::string rel = std::string(corpus.IsSourceSpeaker(spk) ? "source"
                                                                    : "target") +
                            "/" + utt.utterance_id + ".npy";
    WriteFeatureFile(utt, out_dir / rel);
    files[spk].push_back(rel);
  }

  nlohmann::json sets = nlohmann::json::array();
  for (std::size_t s = 0; s < corpus.speakers.size(); ++s) {
    const std::string &spk = corpus.speakers[s];
    Embedding mean{corpus.means.row(static_cast<Eigen::Index>(s))
                       .cast<float>()
                       .transpose(),
                   spk, spk};
    const std::string mean_rel = "means/" + spk + ".npy";
    WriteEmbeddingFile(mean, out_dir / mean_rel);
    const bool source = corpus.IsSourceSpeaker(spk);
    speakers[spk] = {{"role", source ? "source" : "target"},
                     {"mean", mean_rel},
                     {"utterances", files[spk]}};
    if (!source) sets.push_back({{"id", spk}, {"weight", 1.0}, {"files", files[spk]}});
  }

  WriteSpeakerMap(corpus.utt2spk, out_dir / "utt2spk.json");
  WriteTextFileAtomic(out_dir / "targets.json",
                      nlohmann::json({{"sets", sets}}).dump(2) + "\n");
  nlohmann::json manifest = {
      {"spec",
       {{"n_speakers", spec.n_speakers},
        {"frames_per_speaker", spec.frames_per_speaker},
        {"dim", spec.dim},
        {"cluster_separation", spec.cluster_separation},
        {"seed", spec.seed},
        {"utterances_per_speaker", spec.utterances_per_speaker}}},
      {"speakers", speakers}};
  WriteTextFileAtomic(out_dir / "manifest.json", manifest.dump(2) + "\n");
  return manifest;
}

}  // namespace voxanon
