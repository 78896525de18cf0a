// voxanon/admixture.h

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

#ifndef VOXANON_ADMIXTURE_H_
#define VOXANON_ADMIXTURE_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace voxanon {

namespace fs = std::filesystem;

/// Per-utterance choice of anonymization backend.
struct AdmixturePlan {
  std::map<std::string, std::string> assignments;  // utterance -> backend
  std::map<std::string, double> p;                 // backend -> probability
  std::uint64_t seed = 0;

  std::map<std::string, std::size_t> Counts() const;
};

// Probabilities must be finite, non-negative and sum to 1 within 1e-12.
void ValidateMixProbabilities(const std::map<std::string, double> &p);

/// Assigns each utterance independently: backend b with probability p[b].
/// The draw for an utterance depends only on (seed, utterance id), so the
/// plan does not depend on list order and adding utterances leaves existing
/// assignments untouched.
AdmixturePlan PlanAdmixture(std::span<const std::string> utterance_ids,
                            const std::map<std::string, double> &p,
                            std::uint64_t seed);

// Backend for one utterance under (p, seed).
std::string AssignBackend(const std::string &utterance_id,
                          const std::map<std::string, double> &p,
                          std::uint64_t seed);

nlohmann::json PlanToJson(const AdmixturePlan &plan);
AdmixturePlan PlanFromJson(const nlohmann::json &j);
void WritePlan(const AdmixturePlan &plan, const fs::path &path);
AdmixturePlan ReadPlan(const fs::path &path);

struct AdmixtureEntry {
  std::string backend;
  fs::path source;
  std::string file;  // name inside the output directory
};

struct AdmixtureManifest {
  std::map<std::string, AdmixtureEntry> entries;
  std::map<std::string, std::size_t> counts;
};

nlohmann::json ManifestToJson(const AdmixtureManifest &manifest);

/// Copies each utterance's file from its assigned backend directory into
/// `out_dir` and writes `out_dir/manifest.json`. A backend file is matched
/// by stem (`<utterance_id>.<ext>`). All sources are located before anything
/// is copied; the manifest is written last, atomically.
AdmixtureManifest ApplyAdmixture(const AdmixturePlan &plan,
                                 const std::map<std::string, fs::path> &backend_dirs,
                                 const fs::path &out_dir, int workers = 1);

struct TradeoffPoint {
  std::string label;
  double mix_fraction = 0.0;
  double eer = 0.0;
  double uar = 0.0;
  double wer = 0.0;
};

struct TradeoffRow {
  TradeoffPoint point;
  // Values on the straight line between the lowest- and highest-fraction
  // points, and the measured value minus that line.
  double eer_linear = 0.0, eer_vs_linear = 0.0;
  double uar_linear = 0.0, uar_vs_linear = 0.0;
  double wer_linear = 0.0, wer_vs_linear = 0.0;
};

// Rows sorted by mix fraction (stable), with linear baselines filled in.
std::vector<TradeoffRow> ComputeTradeoff(std::vector<TradeoffPoint> points);

std::string TradeoffCsv(const std::vector<TradeoffRow> &rows);
nlohmann::json TradeoffJson(const std::vector<TradeoffRow> &rows);

/// Writes `output` as CSV and a JSON twin next to it (same stem, .json).
std::vector<TradeoffRow> WriteTradeoffReport(std::vector<TradeoffPoint> points,
                                             const fs::path &output);

// Reads `label,mix_fraction,eer,uar,wer` CSV; extra columns are ignored.
std::vector<TradeoffPoint> ReadTradeoffPoints(const fs::path &path);

}  // namespace voxanon

#endif  // VOXANON_ADMIXTURE_H_
