// admixture.cc

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

#include "voxanon/admixture.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "voxanon/error.h"
#include "voxanon/io.h"
#include "voxanon/parallel.h"
#include "voxanon/random.h"

namespace voxanon {

namespace {

constexpr double kProbabilityTolerance = 1e-12;

std::vector<std::string> SplitCsvLine(std::string_view line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    out.emplace_back(line.substr(pos, comma == std::string_view::npos
                                          ? std::string_view::npos
                                          : comma - pos));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace

std::map<std::string, std::size_t> AdmixturePlan::Counts() const {
  std::map<std::string, std::size_t> counts;
  for (const auto &[backend, prob] : p) counts[backend] = 0;
  for (const auto &[utt, backend] : assignments) ++counts[backend];
  return counts;
}

void ValidateMixProbabilities(const std::map<std::string, double> &p) {
  if (p.empty()) throw SchemaError("mix probabilities are empty");
  double total = 0.0;
  for (const auto &[backend, prob] : p) {
    if (backend.empty()) throw SchemaError("empty backend id");
    if (!std::isfinite(prob) || prob < 0.0)
      throw SchemaError("probability for backend '" + backend +
                        "' must be finite and >= 0");
    total += prob;
  }
  if (std::abs(total - 1.0) > kProbabilityTolerance)
    throw SchemaError("mix probabilities sum to " + FormatReal(total) +
                      ", expected 1");
}

std::string AssignBackend(const std::string &utterance_id,
                          const std::map<std::string, double> &p,
                          std::uint64_t seed) {
  const double u = SeededStream(seed, utterance_id, "admix").Uniform01();
  double cumulative = 0.0;
  const std::string *last_positive = nullptr;
  for (const auto &[backend, prob] : p) {
    if (prob <= 0.0) continue;
    cumulative += prob;
    last_positive = &backend;
    if (u < cumulative) return backend;
  }
  // Only reachable when rounding leaves the cumulative sum just below u.
  return *last_positive;
}

AdmixturePlan PlanAdmixture(std::span<const std::string> utterance_ids,
                            const std::map<std::string, double> &p,
                            std::uint64_t seed) {
  ValidateMixProbabilities(p);
  AdmixturePlan plan;
  plan.p = p;
  plan.seed = seed;
  for (const auto &id : utterance_ids) {
    if (!plan.assignments.emplace(id, AssignBackend(id, p, seed)).second)
      throw DataError("duplicate utterance id '" + id + "'");
  }
  return plan;
}

nlohmann::json PlanToJson(const AdmixturePlan &plan) {
  return {{"seed", plan.seed},
          {"p", plan.p},
          {"counts", plan.Counts()},
          {"assignments", plan.assignments}};
}

AdmixturePlan PlanFromJson(const nlohmann::json &j) {
  AdmixturePlan plan;
  try {
    plan.seed = j.at("seed").get<std::uint64_t>();
    plan.p = j.at("p").get<std::map<std::string, double>>();
    plan.assignments =
        j.at("assignments").get<std::map<std::string, std::string>>();
  } catch (const nlohmann::json::exception &e) {
    throw SchemaError(std::string("admixture plan: ") + e.what());
  }
  ValidateMixProbabilities(plan.p);
  for (const auto &[utt, backend] : plan.assignments)
    if (!plan.p.count(backend))
      throw SchemaError("plan assigns '" + utt + "' to unknown backend '" +
                        backend + "'");
  return plan;
}

void WritePlan(const AdmixturePlan &plan, const fs::path &path) {
  WriteTextFileAtomic(path, PlanToJson(plan).dump(2) + "\n");
}

AdmixturePlan ReadPlan(const fs::path &path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(ReadTextFile(path));
  } catch (const nlohmann::json::parse_error &e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return PlanFromJson(j);
}

nlohmann::json ManifestToJson(const AdmixtureManifest &manifest) {
  nlohmann::json utts = nlohmann::json::object();
  for (const auto &[utt, e] : manifest.entries)
    utts[utt] = {{"backend", e.backend},
                 {"source", e.source.string()},
                 {"file", e.file}};
  return {{"counts", manifest.counts}, {"utterances", utts}};
}

AdmixtureManifest ApplyAdmixture(
    const AdmixturePlan &plan,
    const std::map<std::string, fs::path> &backend_dirs,
    const fs::path &out_dir, int workers) {
  // Index each referenced backend directory by file stem.
  std::map<std::string, std::map<std::string, std::vector<fs::path>>> index;
  for (const auto &[utt, backend] : plan.assignments) {
    if (index.count(backend)) continue;
    const auto dir = backend_dirs.find(backend);
    if (dir == backend_dirs.end())
      throw SchemaError("no directory given for backend '" + backend + "'");
    if (!fs::is_directory(dir->second))
      throw IoError("backend '" + backend + "' directory does not exist: " +
                    dir->second.string());
    auto &files = index[backend];
    for (const auto &entry : fs::directory_iterator(dir->second)) {
      if (!entry.is_regular_file()) continue;
      files[entry.path().stem().string()].push_back(entry.path());
    }
  }

  AdmixtureManifest manifest;
  for (const auto &[backend, prob] : plan.p) manifest.counts[backend] = 0;
  for (const auto &[utt, backend] : plan.assignments) {
    const auto &files = index.at(backend);
    const auto it = files.find(utt);
    if (it == files.end()) throw MissingOutputError(utt, backend);
    if (it->second.size() > 1)
      throw DataError("backend '" + backend +
                      "' has several files for utterance '" + utt + "'");
    const fs::path &src = it->second.front();
    manifest.entries.emplace(utt, AdmixtureEntry{backend, src, src.filename().string()});
    ++manifest.counts[backend];
  }

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

  std::vector<const AdmixtureEntry *> jobs;
  for (const auto &[utt, e] : manifest.entries) jobs.push_back(&e);
  ParallelFor(jobs.size(), workers, [&](std::size_t i) {
    std::error_code copy_ec;
    fs::copy_file(jobs[i]->source, out_dir / jobs[i]->file,
                  fs::copy_options::overwrite_existing, copy_ec);
    if (copy_ec)
      throw IoError("copy " + jobs[i]->source.string() + ": " + copy_ec.message());
  });

  WriteTextFileAtomic(out_dir / "manifest.json",
                      ManifestToJson(manifest).dump(2) + "\n");
  return manifest;
}

std::vector<TradeoffRow> ComputeTradeoff(std::vector<TradeoffPoint> points) {
  if (points.empty()) throw SchemaError("trade-off report needs at least one point");
  for (const auto &pt : points) {
    if (!(pt.mix_fraction >= 0.0 && pt.mix_fraction <= 1.0))
      throw DomainError("point '" + pt.label + "': mix fraction outside [0, 1]");
    if (!std::isfinite(pt.eer) || !std::isfinite(pt.uar) || !std::isfinite(pt.wer))
      throw DataError("point '" + pt.label + "': non-finite metric");
  }
  std::stable_sort(points.begin(), points.end(),
                   [](const TradeoffPoint &a, const TradeoffPoint &b) {
                     return a.mix_fraction < b.mix_fraction;
                   });
  const TradeoffPoint &lo = points.front();
  const TradeoffPoint &hi = points.back();
  const double span = hi.mix_fraction - lo.mix_fraction;
  auto line = [&](double f, double a, double b) {
    if (span == 0.0) return a;
    if (f == hi.mix_fraction) return b;
    return a + (f - lo.mix_fraction) / span * (b - a);
  };

  std::vector<TradeoffRow> rows;
  rows.reserve(points.size());
  for (const auto &pt : points) {
    TradeoffRow r;
    r.point = pt;
    r.eer_linear = line(pt.mix_fraction, lo.eer, hi.eer);
    r.uar_linear = line(pt.mix_fraction, lo.uar, hi.uar);
    r.wer_linear = line(pt.mix_fraction, lo.wer, hi.wer);
    r.eer_vs_linear = pt.eer - r.eer_linear;
    r.uar_vs_linear = pt.uar - r.uar_linear;
    r.wer_vs_linear = pt.wer - r.wer_linear;
    rows.push_back(r);
  }
  return rows;
}

std::string TradeoffCsv(const std::vector<TradeoffRow> &rows) {
  std::string out =
      "label,mix_fraction,eer,uar,wer,eer_linear,eer_vs_linear,uar_linear,"
      "uar_vs_linear,wer_linear,wer_vs_linear\n";
  for (const auto &r : rows) {
    if (r.point.label.find_first_of(",\"\r\n") != std::string::npos)
      throw DataError("label '" + r.point.label +
                      "' contains a comma, quote or newline");
    out += r.point.label;
    for (double v : {r.point.mix_fraction, r.point.eer, r.point.uar, r.point.wer,
                     r.eer_linear, r.eer_vs_linear, r.uar_linear,
                     r.uar_vs_linear, r.wer_linear, r.wer_vs_linear})
      out += "," + FormatReal(v);
    out += "\n";
  }
  return out;
}

nlohmann::json TradeoffJson(const std::vector<TradeoffRow> &rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto &r : rows)
    arr.push_back({{"label", r.point.label},
                   {"mix_fraction", r.point.mix_fraction},
                   {"eer", r.point.eer},
                   {"uar", r.point.uar},
                   {"wer", r.point.wer},
                   {"eer_linear", r.eer_linear},
                   {"eer_vs_linear", r.eer_vs_linear},
                   {"uar_linear", r.uar_linear},
                   {"uar_vs_linear", r.uar_vs_linear},
                   {"wer_linear", r.wer_linear},
                   {"wer_vs_linear", r.wer_vs_linear}});
  return arr;
}

std::vector<TradeoffRow> WriteTradeoffReport(std::vector<TradeoffPoint> points,
                                             const fs::path &output) {
  auto rows = ComputeTradeoff(std::move(points));
  fs::path json_path = output;
  json_path.replace_extension(".json");
  if (json_path == output) json_path += ".json";
  WriteTextFileAtomic(output, TradeoffCsv(rows));
  WriteTextFileAtomic(json_path, TradeoffJson(rows).dump(2) + "\n");
  return rows;
}

std::vector<TradeoffPoint> ReadTradeoffPoints(const fs::path &path) {
  const std::string text = ReadTextFile(path);
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    std::string line = text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(std::move(line));
    pos = nl + 1;
  }
  if (lines.empty()) throw FormatError(path.string() + ": missing CSV header");

  const auto header = SplitCsvLine(lines.front());
  auto column = [&](const std::string &name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw SchemaError(path.string() + ": missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t c_label = column("label"), c_mix = column("mix_fraction"),
                    c_eer = column("eer"), c_uar = column("uar"),
                    c_wer = column("wer");

  std::vector<TradeoffPoint> points;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = SplitCsvLine(lines[i]);
    if (fields.size() != header.size())
      throw FormatError(path.string() + ":" + std::to_string(i + 1) +
                        ": expected " + std::to_string(header.size()) +
                        " fields");
    points.push_back({fields[c_label], ParseReal(fields[c_mix]),
                      ParseReal(fields[c_eer]), ParseReal(fields[c_uar]),
                      ParseReal(fields[c_wer])});
  }
  return points;
}

}  // namespace voxanon
