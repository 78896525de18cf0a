// voxanon/io.h

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

#ifndef VOXANON_IO_H_
#define VOXANON_IO_H_

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "voxanon/types.h"

namespace voxanon {

namespace fs = std::filesystem;

// Feature matrices: 2-D float32 NPY, utterance id taken from the file stem.
FeatureSequence ReadFeatureFile(const fs::path &path);
void WriteFeatureFile(const FeatureSequence &seq, const fs::path &path);

// Writes any float matrix (codebooks, gradients) as 2-D NPY.
void WriteMatrixFile(const RowMatrixf &m, const fs::path &path);
RowMatrixf ReadMatrixFile(const fs::path &path);

// Embeddings: 1-D float32 NPY.
Embedding ReadEmbeddingFile(const fs::path &path);
void WriteEmbeddingFile(const Embedding &emb, const fs::path &path);

// Sidecar JSON object mapping utterance id to speaker id.
std::map<std::string, std::string> ReadSpeakerMap(const fs::path &path);
void WriteSpeakerMap(const std::map<std::string, std::string> &utt2spk,
                     const fs::path &path);

// `<enroll_speaker_id> <test_utterance_id> <target|nontarget>` per line.
TrialList ParseTrialList(std::string_view text);
TrialList ReadTrialList(const fs::path &path);
void WriteTrialList(const TrialList &trials, const fs::path &path);

// `<enroll_speaker_id> <test_utterance_id> <score> <target|nontarget>`.
std::vector<TrialScore> ReadScoreFile(const fs::path &path);
void WriteScoreFile(const std::vector<TrialScore> &scores, const fs::path &path);

// `<utterance_id>\t<space-joined words>` per line.
std::vector<Transcript> ReadTranscripts(const fs::path &path);
void WriteTranscripts(const std::vector<Transcript> &transcripts,
                      const fs::path &path);

// One token sequence per line, space-separated integers.
std::vector<TokenSequence> ReadTokenFile(const fs::path &path);
void WriteTokenFile(const std::vector<TokenSequence> &seqs, const fs::path &path);

// `<utterance_id> <label>` per line, in file order.
std::vector<std::pair<std::string, std::string>> ReadLabelFile(
    const fs::path &path);

// Locale-independent shortest round-trip formatting and strict parsing.
std::string FormatReal(double v);
double ParseReal(std::string_view text);

// Whitespace tokenizer shared by the text readers.
std::vector<std::string> SplitWords(std::string_view line);

std::string ReadTextFile(const fs::path &path);
// Writes through a temporary sibling and renames, so readers never observe a
// partially written file.
void WriteTextFileAtomic(const fs::path &path, std::string_view contents);

}  // namespace voxanon

#endif  // VOXANON_IO_H_
