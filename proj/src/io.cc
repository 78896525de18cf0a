// io.cc

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

#include "voxanon/io.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "json.hpp"

#include "voxanon/error.h"
#include "voxanon/npy.h"

namespace voxanon {

namespace {

void RequireParentDir(const fs::path &path) {
  const fs::path parent = path.parent_path();
  if (!parent.empty() && !fs::is_directory(parent))
    throw IoError("directory does not exist: " + parent.string());
}

// Splits on '\n', dropping a trailing '\r' and the empty tail after the final
// newline.
std::vector<std::string_view> Lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    pos = nl + 1;
  }
  return lines;
}

bool IsBlank(std::string_view line) {
  return line.find_first_not_of(" \t") == std::string_view::npos;
}

bool ParseTargetField(const std::string &field, const std::string &where) {
  if (field == "target") return true;
  if (field == "nontarget") return false;
  throw SchemaError(where + ": expected target|nontarget, got '" + field + "'");
}

std::string Where(const fs::path &path, std::size_t line_no) {
  return path.string() + ":" + std::to_string(line_no);
}

}  // namespace

std::string FormatReal(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw DataError("cannot format real");
  return std::string(buf, ptr);
}

double ParseReal(std::string_view text) {
  double v = 0.0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw FormatError("not a real number: '" + std::string(text) + "'");
  return v;
}

std::vector<std::string> SplitWords(std::string_view line) {
  std::vector<std::string> words;
  std::size_t pos = 0;
  while (pos < line.size()) {
    const auto b = line.find_first_not_of(" \t\r\n", pos);
    if (b == std::string_view::npos) break;
    auto e = line.find_first_of(" \t\r\n", b);
    if (e == std::string_view::npos) e = line.size();
    words.emplace_back(line.substr(b, e - b));
    pos = e;
  }
  return words;
}

std::string ReadTextFile(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path.string());
  return text;
}

void WriteTextFileAtomic(const fs::path &path, std::string_view contents) {
  RequireParentDir(path);
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("rename to " + path.string() + ": " + ec.message());
}

FeatureSequence ReadFeatureFile(const fs::path &path) {
  NpyArray arr = ReadNpy(path);
  if (arr.shape.size() != 2)
    throw SchemaError(path.string() + ": expected a 2-D array, got rank " +
                      std::to_string(arr.shape.size()));
  if (arr.shape[0] == 0 || arr.shape[1] == 0)
    throw DataError(path.string() + ": empty feature matrix");
  FeatureSequence seq;
  seq.frames = Eigen::Map<const RowMatrixf>(
      arr.data.data(), static_cast<Eigen::Index>(arr.shape[0]),
      static_cast<Eigen::Index>(arr.shape[1]));
  RequireFinite(seq.frames, path.string());
  seq.utterance_id = path.stem().string();
  return seq;
}

void WriteMatrixFile(const RowMatrixf &m, const fs::path &path) {
  RequireParentDir(path);
  const std::size_t shape[2] = {static_cast<std::size_t>(m.rows()),
                                static_cast<std::size_t>(m.cols())};
  WriteNpy(path, shape,
           std::span<const float>(m.data(), static_cast<std::size_t>(m.size())));
}

RowMatrixf ReadMatrixFile(const fs::path &path) {
  return ReadFeatureFile(path).frames;
}

void WriteFeatureFile(const FeatureSequence &seq, const fs::path &path) {
  WriteMatrixFile(seq.frames, path);
}

Embedding ReadEmbeddingFile(const fs::path &path) {
  NpyArray arr = ReadNpy(path);
  if (arr.shape.size() != 1)
    throw SchemaError(path.string() + ": expected a 1-D array, got rank " +
                      std::to_string(arr.shape.size()));
  if (arr.shape[0] == 0) throw DataError(path.string() + ": empty embedding");
  Embedding emb;
  emb.vector = Eigen::Map<const Eigen::VectorXf>(
      arr.data.data(), static_cast<Eigen::Index>(arr.shape[0]));
  RequireFinite(emb.vector, path.string());
  if (emb.vector.isZero(0.0))
    throw DataError(path.string() + ": all-zero embedding");
  emb.utterance_id = path.stem().string();
  return emb;
}

void WriteEmbeddingFile(const Embedding &emb, const fs::path &path) {
  RequireParentDir(path);
  const std::size_t shape[1] = {static_cast<std::size_t>(emb.vector.size())};
  WriteNpy(path, shape,
           std::span<const float>(emb.vector.data(),
                                  static_cast<std::size_t>(emb.vector.size())));
}

std::map<std::string, std::string> ReadSpeakerMap(const fs::path &path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(ReadTextFile(path));
  } catch (const nlohmann::json::parse_error &e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  if (!j.is_object())
    throw SchemaError(path.string() + ": expected a JSON object");
  std::map<std::string, std::string> out;
  for (const auto &[utt, spk] : j.items()) {
    if (!spk.is_string())
      throw SchemaError(path.string() + ": speaker id for '" + utt +
                        "' is not a string");
    out.emplace(utt, spk.get<std::string>());
  }
  return out;
}

void WriteSpeakerMap(const std::map<std::string, std::string> &utt2spk,
                     const fs::path &path) {
  WriteTextFileAtomic(path, nlohmann::json(utt2spk).dump(2) + "\n");
}

TrialList ParseTrialList(std::string_view text) {
  TrialList trials;
  std::set<std::pair<std::string, std::string>> seen;
  std::size_t line_no = 0;
  for (auto line : Lines(text)) {
    ++line_no;
    if (IsBlank(line)) continue;
    const auto fields = SplitWords(line);
    const std::string where = "line " + std::to_string(line_no);
    if (fields.size() != 3)
      throw FormatError(where + ": expected 3 fields, got " +
                        std::to_string(fields.size()));
    Trial t{fields[0], fields[1], ParseTargetField(fields[2], where)};
    if (!seen.emplace(t.enroll_speaker_id, t.test_utterance_id).second)
      throw DataError(where + ": duplicate trial " + t.enroll_speaker_id + " " +
                      t.test_utterance_id);
    trials.push_back(std::move(t));
  }
  return trials;
}

TrialList ReadTrialList(const fs::path &path) {
  try {
    return ParseTrialList(ReadTextFile(path));
  } catch (const FormatError &e) {
    throw FormatError(path.string() + ": " + e.what());
  } catch (const SchemaError &e) {
    throw SchemaError(path.string() + ": " + e.what());
  } catch (const DataError &e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void WriteTrialList(const TrialList &trials, const fs::path &path) {
  std::string out;
  for (const auto &t : trials)
    out += t.enroll_speaker_id + " " + t.test_utterance_id + " " +
           (t.is_target ? "target" : "nontarget") + "\n";
  WriteTextFileAtomic(path, out);
}

std::vector<TrialScore> ReadScoreFile(const fs::path &path) {
  const std::string text = ReadTextFile(path);
  std::vector<TrialScore> scores;
  std::size_t line_no = 0;
  for (auto line : Lines(text)) {
    ++line_no;
    if (IsBlank(line)) continue;
    const auto fields = SplitWords(line);
    const std::string where = Where(path, line_no);
    if (fields.size() != 4)
      throw FormatError(where + ": expected 4 fields, got " +
                        std::to_string(fields.size()));
    TrialScore s;
    s.enroll_speaker_id = fields[0];
    s.test_utterance_id = fields[1];
    try {
      s.score = ParseReal(fields[2]);
    } catch (const FormatError &e) {
      throw FormatError(where + ": " + e.what());
    }
    if (!std::isfinite(s.score)) throw DataError(where + ": non-finite score");
    s.is_target = ParseTargetField(fields[3], where);
    scores.push_back(std::move(s));
  }
  return scores;
}

void WriteScoreFile(const std::vector<TrialScore> &scores, const fs::path &path) {
  std::string out;
  for (const auto &s : scores)
    out += s.enroll_speaker_id + " " + s.test_utterance_id + " " +
           FormatReal(s.score) + " " + (s.is_target ? "target" : "nontarget") +
           "\n";
  WriteTextFileAtomic(path, out);
}

std::vector<Transcript> ReadTranscripts(const fs::path &path) {
  const std::string text = ReadTextFile(path);
  std::vector<Transcript> out;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  for (auto line : Lines(text)) {
    ++line_no;
    if (IsBlank(line)) continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos)
      throw FormatError(Where(path, line_no) + ": missing tab separator");
    const auto id = SplitWords(line.substr(0, tab));
    if (id.size() != 1)
      throw FormatError(Where(path, line_no) + ": bad utterance id");
    Transcript t{id[0], SplitWords(line.substr(tab + 1))};
    if (!seen.insert(t.utterance_id).second)
      throw DataError(Where(path, line_no) + ": duplicate utterance " +
                      t.utterance_id);
    out.push_back(std::move(t));
  }
  return out;
}

void WriteTranscripts(const std::vector<Transcript> &transcripts,
                      const fs::path &path) {
  std::string out;
  for (const auto &t : transcripts) {
    out += t.utterance_id + "\t";
    for (std::size_t i = 0; i < t.words.size(); ++i) {
      if (t.words[i].empty() ||
          t.words[i].find_first_of(" \t\r\n") != std::string::npos)
        throw DataError("transcript " + t.utterance_id +
                        ": word is empty or contains whitespace");
      if (i) out += ' ';
      out += t.words[i];
    }
    out += '\n';
  }
  WriteTextFileAtomic(path, out);
}

std::vector<TokenSequence> ReadTokenFile(const fs::path &path) {
  const std::string text = ReadTextFile(path);
  std::vector<TokenSequence> out;
  std::size_t line_no = 0;
  for (auto line : Lines(text)) {
    ++line_no;
    TokenSequence seq;
    for (const auto &w : SplitWords(line)) {
      std::int32_t v = 0;
      const auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
      if (ec != std::errc() || ptr != w.data() + w.size())
        throw FormatError(Where(path, line_no) + ": bad token '" + w + "'");
      if (v < 0) throw DataError(Where(path, line_no) + ": negative token");
      seq.push_back(v);
    }
    out.push_back(std::move(seq));
  }
  return out;
}

void WriteTokenFile(const std::vector<TokenSequence> &seqs,
                    const fs::path &path) {
  std::string out;
  for (const auto &seq : seqs) {
    for (std::size_t i = 0; i < seq.size(); ++i) {
      if (i) out += ' ';
      out += std::to_string(seq[i]);
    }
    out += '\n';
  }
  WriteTextFileAtomic(path, out);
}

std::vector<std::pair<std::string, std::string>> ReadLabelFile(
    const fs::path &path) {
  const std::string text = ReadTextFile(path);
  std::vector<std::pair<std::string, std::string>> out;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  for (auto line : Lines(text)) {
    ++line_no;
    if (IsBlank(line)) continue;
    const auto fields = SplitWords(line);
    if (fields.size() != 2)
      throw FormatError(Where(path, line_no) + ": expected 2 fields");
    if (!seen.insert(fields[0]).second)
      throw DataError(Where(path, line_no) + ": duplicate id " + fields[0]);
    out.emplace_back(fields[0], fields[1]);
  }
  return out;
}

}  // namespace voxanon
