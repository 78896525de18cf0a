// pipeline.cc

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

#include "voxanon/pipeline.h"

#include <algorithm>
#include <chrono>

#include "voxanon/error.h"
#include "voxanon/io.h"
#include "voxanon/parallel.h"

namespace voxanon {

std::vector<TargetSetSpec> ReadTargetManifest(const fs::path &path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(ReadTextFile(path));
  } catch (const nlohmann::json::parse_error &e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  std::vector<TargetSetSpec> sets;
  try {
    for (const auto &item : j.at("sets")) {
      TargetSetSpec spec;
      spec.id = item.at("id").get<std::string>();
      spec.weight = item.value("weight", 1.0);
      for (const auto &f : item.at("files")) {
        fs::path p = f.get<std::string>();
        spec.files.push_back(p.is_absolute() ? p : path.parent_path() / p);
      }
      if (spec.files.empty())
        throw SchemaError(path.string() + ": set '" + spec.id + "' lists no files");
      sets.push_back(std::move(spec));
    }
  } catch (const nlohmann::json::exception &e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
  if (sets.empty()) throw SchemaError(path.string() + ": no matching sets");
  return sets;
}

PooledTarget LoadPooledTarget(const fs::path &manifest, const RunConfig &cfg) {
  const auto specs = ReadTargetManifest(manifest);
  std::vector<MatchingSet> sets;
  std::vector<double> weights;
  for (const auto &spec : specs) {
    std::vector<FeatureSequence> seqs;
    for (const auto &f : spec.files) seqs.push_back(ReadFeatureFile(f));
    sets.push_back(BuildMatchingSet<float>(seqs, spec.id));
    weights.push_back(spec.weight);
  }
  if (!cfg.pool_weights.empty()) {
    if (cfg.pool_weights.size() != sets.size())
      throw SchemaError("pool_weights has " +
                        std::to_string(cfg.pool_weights.size()) +
                        " entries but the manifest has " +
                        std::to_string(sets.size()) + " sets");
    weights = cfg.pool_weights;
  }
  return PooledTarget(std::move(sets), std::move(weights));
}

nlohmann::json ConvertSummary::ToJson(const RunConfig &cfg) const {
  nlohmann::json utts = nlohmann::json::array();
  for (const auto &u : utterances) {
    nlohmann::json r = {{"utterance_id", u.utterance_id},
                        {"ok", u.ok},
                        {"frames_in", u.frames_in},
                        {"frames_out", u.frames_out},
                        {"length_factor", u.length_factor},
                        {"seconds", u.seconds}};
    if (!u.ok) r["error"] = u.error;
    utts.push_back(std::move(r));
  }
  return {{"config", RunConfigToText(cfg)},
          {"converted", utterances.size() - failed},
          {"failed", failed},
          {"utterances", utts}};
}

ConvertSummary RunConvert(const RunConfig &cfg, const fs::path &source_dir,
                          const fs::path &target_manifest,
                          const fs::path &out_dir) {
  cfg.Validate();
  if (!fs::is_directory(source_dir))
    throw IoError("source directory does not exist: " + source_dir.string());
  const PooledTarget target = LoadPooledTarget(target_manifest, cfg);

  std::vector<fs::path> inputs;
  for (const auto &entry : fs::directory_iterator(source_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".npy")
      inputs.push_back(entry.path());
  std::sort(inputs.begin(), inputs.end());
  if (inputs.empty())
    throw SchemaError("no .npy feature files in " + source_dir.string());

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

  const PerturbConfig perturb = cfg.Perturb();
  const KnnOptions opts{cfg.metric, 1};
  ConvertSummary summary;
  summary.utterances.resize(inputs.size());
  ParallelFor(inputs.size(), cfg.workers, [&](std::size_t i) {
    UtteranceReport &rep = summary.utterances[i];
    rep.utterance_id = inputs[i].stem().string();
    const auto start = std::chrono::steady_clock::now();
    try {
      const FeatureSequence seq = ReadFeatureFile(inputs[i]);
      rep.frames_in = seq.num_frames();
      rep.length_factor = DrawLengthFactor(perturb, seq.utterance_id);
      const FeatureSequence out =
          AnonymizeUtterance(seq, target, cfg.k, perturb, opts);
      WriteFeatureFile(out, out_dir / (seq.utterance_id + ".npy"));
      rep.frames_out = out.num_frames();
      rep.ok = true;
    } catch (const std::exception &e) {
      rep.error = e.what();
    }
    rep.seconds = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - start)
                      .count();
  });
  for (const auto &u : summary.utterances)
    if (!u.ok) ++summary.failed;

  WriteTextFileAtomic(out_dir / "summary.json",
                      summary.ToJson(cfg).dump(2) + "\n");
  return summary;
}

}  // namespace voxanon
