// config.cc

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

#include "voxanon/config.h"

#include <charconv>

#include "voxanon/error.h"
#include "voxanon/io.h"

namespace voxanon {

namespace {

std::string_view Strip(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename Int>
Int ParseInt(std::string_view key, std::string_view text) {
  Int v{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw FormatError("config '" + std::string(key) + "': bad integer '" +
                      std::string(text) + "'");
  return v;
}

std::vector<double> ParseRealList(std::string_view key, std::string_view text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto comma = text.find(',', pos);
    if (comma == std::string_view::npos) comma = text.size();
    const auto item = Strip(text.substr(pos, comma - pos));
    if (item.empty())
      throw FormatError("config '" + std::string(key) + "': empty list item");
    out.push_back(ParseReal(item));
    pos = comma + 1;
  }
  return out;
}

std::string JoinReals(const std::vector<double> &v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += FormatReal(v[i]);
  }
  return out;
}

}  // namespace

void RunConfig::Validate() const {
  if (k < 1) throw DomainError("k must be >= 1");
  if (workers < 1) throw DomainError("workers must be >= 1");
  for (double w : pool_weights)
    if (!(w >= 0.0) || !std::isfinite(w))
      throw DomainError("pool weights must be finite and >= 0");
  Perturb().Validate();
}

PerturbConfig RunConfig::Perturb() const {
  return {noise_bound, length_factor_lo, length_factor_hi, seed};
}

void SetRunConfigValue(RunConfig &cfg, std::string_view key,
                       std::string_view value) {
  value = Strip(value);
  if (key == "k") {
    cfg.k = ParseInt<int>(key, value);
  } else if (key == "noise_bound") {
    cfg.noise_bound = ParseReal(value);
  } else if (key == "length_factor_range") {
    const auto range = ParseRealList(key, value);
    if (range.size() != 2)
      throw FormatError("config 'length_factor_range' needs lo,hi");
    cfg.length_factor_lo = range[0];
    cfg.length_factor_hi = range[1];
  } else if (key == "pool_weights") {
    cfg.pool_weights = value.empty() ? std::vector<double>{}
                                     : ParseRealList(key, value);
  } else if (key == "seed") {
    cfg.seed = ParseInt<std::uint64_t>(key, value);
  } else if (key == "workers") {
    cfg.workers = ParseInt<int>(key, value);
  } else if (key == "metric") {
    if (value == "cosine")
      cfg.metric = Metric::kCosine;
    else if (value == "euclidean")
      cfg.metric = Metric::kEuclidean;
    else
      throw SchemaError("config 'metric': expected cosine|euclidean");
  } else {
    throw SchemaError("unknown config key '" + std::string(key) + "'");
  }
}

RunConfig ParseRunConfig(std::string_view text, RunConfig base) {
  std::size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const auto line = Strip(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw FormatError("config line " + std::to_string(line_no) +
                        ": expected key=value");
    SetRunConfigValue(base, Strip(line.substr(0, eq)), line.substr(eq + 1));
  }
  return base;
}

RunConfig LoadRunConfig(const std::filesystem::path &path, RunConfig base) {
  return ParseRunConfig(ReadTextFile(path), std::move(base));
}

std::string RunConfigToText(const RunConfig &cfg) {
  std::string out;
  out += "k=" + std::to_string(cfg.k) + "\n";
  out += "noise_bound=" + FormatReal(cfg.noise_bound) + "\n";
  out += "length_factor_range=" + FormatReal(cfg.length_factor_lo) + "," +
         FormatReal(cfg.length_factor_hi) + "\n";
  out += "pool_weights=" + JoinReals(cfg.pool_weights) + "\n";
  out += "seed=" + std::to_string(cfg.seed) + "\n";
  out += "workers=" + std::to_string(cfg.workers) + "\n";
  out += std::string("metric=") +
         (cfg.metric == Metric::kCosine ? "cosine" : "euclidean") + "\n";
  return out;
}

}  // namespace voxanon
