// tests/pipeline_test.cc

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

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <random>

#include "json.hpp"
#include "voxanon/admixture.h"
#include "voxanon/config.h"
#include "voxanon/error.h"
#include "voxanon/io.h"
#include "voxanon/npy.h"
#include "voxanon/pipeline.h"
#include "voxanon/synth.h"

namespace voxanon {
namespace {

using nlohmann::json;

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("voxanon_pipe_" + std::to_string(std::random_device{}()));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path &path() const { return path_; }

 private:
  fs::path path_;
};

// Runs the CLI with stdout sent to `out` and stderr to `out`.err.
int RunCli(const std::string &args, const fs::path &out) {
  const std::string cmd = std::string(VOXANON_CLI) + " " + args + " > '" +
                          out.string() + "' 2> '" + out.string() + ".err'";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string Q(const fs::path &p) { return "'" + p.string() + "'"; }

void WriteManifest(const fs::path &path,
                   const std::vector<std::pair<std::string, std::vector<std::string>>> &sets) {
  json j;
  j["sets"] = json::array();
  for (const auto &[id, files] : sets) j["sets"].push_back({{"id", id}, {"files", files}});
  WriteTextFileAtomic(path, j.dump());
}

std::vector<fs::path> SortedFiles(const fs::path &dir) {
  std::vector<fs::path> out;
  for (const auto &e : fs::directory_iterator(dir)) out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

TEST(SynthTest, Validation) {
  SyntheticCorpusSpec spec;
  spec.n_speakers = 1;
  EXPECT_THROW(GenerateSyntheticCorpus(spec), SchemaError);
  spec = {};
  spec.dim = 1;
  EXPECT_THROW(GenerateSyntheticCorpus(spec), SchemaError);
}

TEST(SynthTest, Deterministic) {
  SyntheticCorpusSpec spec;
  spec.seed = 3;
  const auto a = GenerateSyntheticCorpus(spec);
  const auto b = GenerateSyntheticCorpus(spec);
  EXPECT_EQ(a.means, b.means);
  ASSERT_EQ(a.utterances.size(), b.utterances.size());
  for (std::size_t i = 0; i < a.utterances.size(); ++i)
    EXPECT_EQ(a.utterances[i].frames, b.utterances[i].frames);
  spec.seed = 4;
  EXPECT_NE(GenerateSyntheticCorpus(spec).means, a.means);
}

TEST(SynthTest, SeparationAndFrameCounts) {
  SyntheticCorpusSpec spec;
  spec.frames_per_speaker = 403;
  const auto c = GenerateSyntheticCorpus(spec);
  double min_dist = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < c.means.rows(); ++i)
    for (Eigen::Index j = 0; j < i; ++j)
      min_dist = std::min(min_dist, (c.means.row(i) - c.means.row(j)).norm());
  EXPECT_GE(min_dist, 10.0);
  EXPECT_NEAR(min_dist, 10.0, 1e-9);
  std::map<std::string, Eigen::Index> frames;
  for (const auto &u : c.utterances) frames[c.utt2spk.at(u.utterance_id)] += u.num_frames();
  EXPECT_EQ(frames.size(), 10u);
  for (const auto &[spk, n] : frames) EXPECT_EQ(n, 403);
}

TEST(SynthTest, TwoSpeakersAreSeparable) {
  SyntheticCorpusSpec spec;
  spec.n_speakers = 2;
  spec.frames_per_speaker = 2000;
  const auto c = GenerateSyntheticCorpus(spec);
  std::size_t correct = 0, total = 0;
  for (const auto &u : c.utterances) {
    const Eigen::Index truth = c.utt2spk.at(u.utterance_id) == c.speakers[0] ? 0 : 1;
    for (Eigen::Index t = 0; t < u.num_frames(); ++t) {
      const Eigen::RowVectorXd f = u.frames.row(t).cast<double>();
      const Eigen::Index nearest =
          (f - c.means.row(0)).squaredNorm() <= (f - c.means.row(1)).squaredNorm() ? 0 : 1;
      correct += nearest == truth;
      ++total;
    }
  }
  EXPECT_GE(static_cast<double>(correct) / static_cast<double>(total), 0.99);
}

TEST(SynthTest, WrittenLayout) {
  TempDir dir;
  SyntheticCorpusSpec spec;
  spec.n_speakers = 4;
  spec.frames_per_speaker = 40;
  spec.utterances_per_speaker = 4;
  const auto c = GenerateSyntheticCorpus(spec);
  WriteSyntheticCorpus(c, spec, dir.path());
  EXPECT_EQ(SortedFiles(dir.path() / "source").size(), 8u);
  EXPECT_EQ(SortedFiles(dir.path() / "target").size(), 8u);
  EXPECT_EQ(SortedFiles(dir.path() / "means").size(), 4u);
  const auto sets = ReadTargetManifest(dir.path() / "targets.json");
  ASSERT_EQ(sets.size(), 2u);
  EXPECT_EQ(sets[0].files.size(), 4u);
  const auto emb = ReadEmbeddingFile(dir.path() / "means" / (c.speakers[1] + ".npy"));
  EXPECT_EQ(emb.vector, c.means.row(1).cast<float>().transpose());
  const auto back = ReadFeatureFile(dir.path() / "source" / (c.utterances[0].utterance_id + ".npy"));
  EXPECT_EQ(back.frames, c.utterances[0].frames);
}

TEST(AnonymizeSyntheticTest, SingleTargetDominatesOutput) {
  SyntheticCorpusSpec spec;
  spec.n_speakers = 2;
  const auto c = GenerateSyntheticCorpus(spec);
  std::vector<FeatureSequence> source, target;
  for (const auto &u : c.utterances)
    (c.utt2spk.at(u.utterance_id) == c.speakers[0] ? source : target).push_back(u);
  const PooledTarget pooled({BuildMatchingSet<float>(target, c.speakers[1])});
  const PerturbConfig cfg{32.0, 0.8, 1.2, 5};
  std::size_t near_target = 0, total = 0;
  for (const auto &u : source) {
    const auto out = AnonymizeUtterance(u, pooled, 4, cfg);
    for (Eigen::Index t = 0; t < out.num_frames(); ++t) {
      const Eigen::RowVectorXd f = out.frames.row(t).cast<double>();
      near_target += (f - c.means.row(1)).squaredNorm() < (f - c.means.row(0)).squaredNorm();
      ++total;
    }
  }
  EXPECT_GT(static_cast<double>(near_target) / static_cast<double>(total), 0.5);
}

class ConvertTest : public ::testing::Test {
 protected:
  void SetUp() override {
    SyntheticCorpusSpec spec;
    spec.n_speakers = 4;
    spec.frames_per_speaker = 100;
    spec.utterances_per_speaker = 5;
    WriteSyntheticCorpus(GenerateSyntheticCorpus(spec), spec, dir_.path() / "corpus");
  }
  fs::path corpus() const { return dir_.path() / "corpus"; }
  TempDir dir_;
};

TEST_F(ConvertTest, IdentityRetrieval) {
  const fs::path src = dir_.path() / "one";
  fs::create_directories(src);
  const auto first = SortedFiles(corpus() / "source").front();
  fs::copy_file(first, src / first.filename());
  WriteManifest(dir_.path() / "self.json", {{"self", {("one" / first.filename()).string()}}});
  RunConfig cfg;
  cfg.k = 1;
  const auto summary = RunConvert(cfg, src, dir_.path() / "self.json", dir_.path() / "out");
  EXPECT_EQ(summary.failed, 0u);
  EXPECT_EQ(ReadTextFile(dir_.path() / "out" / first.filename()), ReadTextFile(first));
  EXPECT_TRUE(fs::exists(dir_.path() / "out" / "summary.json"));
}

TEST_F(ConvertTest, WorkerCountDoesNotChangeOutput) {
  RunConfig cfg;
  cfg.noise_bound = 32;
  cfg.length_factor_lo = 0.8;
  cfg.length_factor_hi = 1.2;
  cfg.seed = 17;
  cfg.workers = 1;
  RunConvert(cfg, corpus() / "source", corpus() / "targets.json", dir_.path() / "w1");
  cfg.workers = 8;
  RunConvert(cfg, corpus() / "source", corpus() / "targets.json", dir_.path() / "w8");
  const auto a = SortedFiles(dir_.path() / "w1");
  const auto b = SortedFiles(dir_.path() / "w8");
  ASSERT_EQ(a.size(), 11u);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].filename(), b[i].filename());
    if (a[i].extension() == ".npy") EXPECT_EQ(ReadTextFile(a[i]), ReadTextFile(b[i]));
  }
}

TEST_F(ConvertTest, MissingManifestWritesNothing) {
  EXPECT_THROW(RunConvert({}, corpus() / "source", dir_.path() / "nope.json", dir_.path() / "out"),
               IoError);
  EXPECT_FALSE(fs::exists(dir_.path() / "out" / "summary.json"));
}

TEST_F(ConvertTest, BadUtteranceIsReportedOthersWritten) {
  const fs::path src = dir_.path() / "mixed";
  fs::create_directories(src);
  for (const auto &f : SortedFiles(corpus() / "source")) fs::copy_file(f, src / f.filename());
  const std::vector<std::size_t> shape{6};
  const std::vector<float> data{1, 2, 3, 4, 5, 6};
  WriteNpy(src / "broken.npy", shape, data);
  const auto summary = RunConvert({}, src, corpus() / "targets.json", dir_.path() / "out");
  EXPECT_EQ(summary.failed, 1u);
  EXPECT_EQ(summary.utterances.size(), 11u);
  EXPECT_FALSE(fs::exists(dir_.path() / "out" / "broken.npy"));
  EXPECT_EQ(SortedFiles(dir_.path() / "out").size(), 11u);
  const auto j = json::parse(ReadTextFile(dir_.path() / "out" / "summary.json"));
  EXPECT_EQ(j.at("failed").get<int>(), 1);
}

TEST_F(ConvertTest, PoolWeightCountMustMatchSets) {
  RunConfig cfg;
  cfg.pool_weights = {1.0, 2.0, 3.0};
  EXPECT_THROW(RunConvert(cfg, corpus() / "source", corpus() / "targets.json", dir_.path() / "out"),
               SchemaError);
}

class CliTest : public ConvertTest {
 protected:
  fs::path Out(const std::string &name) const { return dir_.path() / name; }
};

TEST_F(CliTest, ConvertAndFailures) {
  EXPECT_EQ(RunCli("--seed 3 --workers 4 convert " + Q(corpus() / "source") + " " +
                       Q(corpus() / "targets.json") + " " + Q(Out("conv")) +
                       " --noise-bound 32 --length-factor-range 0.8,1.2",
                   Out("conv.log")),
            0);
  EXPECT_EQ(SortedFiles(Out("conv")).size(), 11u);
  EXPECT_NE(RunCli("convert " + Q(corpus() / "source") + " " + Q(Out("missing.json")) + " " +
                       Q(Out("conv2")),
                   Out("conv2.log")),
            0);
  EXPECT_FALSE(fs::exists(Out("conv2") / "summary.json"));
  EXPECT_NE(ReadTextFile(Out("conv2.log.err")).find("ERROR"), std::string::npos);
  EXPECT_NE(RunCli("frobnicate", Out("bad.log")), 0);
}

TEST_F(CliTest, ConfigFileAndFlagPrecedence) {
  WriteTextFileAtomic(Out("run.cfg"), "k=1\nseed=9\nworkers=2\n");
  ASSERT_EQ(RunCli("--config " + Q(Out("run.cfg")) + " --json convert " + Q(corpus() / "source") +
                       " " + Q(corpus() / "targets.json") + " " + Q(Out("c1")) + " --k 3",
                   Out("c1.json")),
            0);
  const auto j = json::parse(ReadTextFile(Out("c1.json")));
  const RunConfig used = ParseRunConfig(j.at("config").get<std::string>());
  EXPECT_EQ(used.k, 3);
  EXPECT_EQ(used.seed, 9u);
  EXPECT_EQ(used.workers, 2);
}

TEST_F(CliTest, CodebookCommands) {
  ASSERT_EQ(RunCli("kmeans " + Q(corpus() / "target") + " --k 4 --out " + Q(Out("cb.npy")),
                   Out("km.log")),
            0);
  const auto cb = ReadMatrixFile(Out("cb.npy"));
  EXPECT_EQ(cb.rows(), 4);
  EXPECT_EQ(cb.cols(), 16);
  const auto utt = SortedFiles(corpus() / "source").front();
  ASSERT_EQ(RunCli("discretize " + Q(utt) + " --codebook " + Q(Out("cb.npy")) +
                       " --collapse --out " + Q(Out("tok.txt")),
                   Out("dis.log")),
            0);
  const auto tokens = ReadTokenFile(Out("tok.txt"));
  ASSERT_EQ(tokens.size(), 1u);
  EXPECT_FALSE(tokens[0].empty());
  ASSERT_EQ(RunCli("--json ctc-loss " + Q(utt) + " --codebook " + Q(Out("cb.npy")) +
                       " --target " + Q(Out("tok.txt")) + " --grad-out " + Q(Out("g.npy")),
                   Out("ctc.json")),
            0);
  const auto j = json::parse(ReadTextFile(Out("ctc.json")));
  EXPECT_EQ(j.at("metric"), "ctc_loss");
  EXPECT_GE(j.at("value").get<double>(), 0.0);
  EXPECT_EQ(ReadMatrixFile(Out("g.npy")).rows(), ReadFeatureFile(utt).num_frames());
  // A target longer than the utterance cannot be aligned.
  std::string long_target;
  for (int i = 0; i < 100; ++i) long_target += std::to_string(i % 2) + " ";
  WriteTextFileAtomic(Out("long.txt"), long_target + "\n");
  EXPECT_EQ(RunCli("ctc-loss " + Q(utt) + " --codebook " + Q(Out("cb.npy")) + " --target " +
                       Q(Out("long.txt")),
                   Out("ctc2.log")),
            1);
}

TEST_F(CliTest, MetricCommands) {
  WriteTextFileAtomic(Out("scores.txt"),
                      "a u1 0.9 target\na u2 0.1 nontarget\nb u3 0.2 target\nb u4 0.3 nontarget\n");
  ASSERT_EQ(RunCli("--json eer " + Q(Out("scores.txt")), Out("eer.json")), 0);
  auto j = json::parse(ReadTextFile(Out("eer.json")));
  EXPECT_EQ(j.at("metric"), "eer");
  EXPECT_DOUBLE_EQ(j.at("value").get<double>(), 0.5);

  WriteTextFileAtomic(Out("ref.txt"), "u1\tthe cat sat\nu2\thello world\n");
  WriteTextFileAtomic(Out("hyp.txt"), "u1\tthe bat sat\nu2\tHELLO world\n");
  ASSERT_EQ(RunCli("--json wer " + Q(Out("ref.txt")) + " " + Q(Out("hyp.txt")), Out("wer.json")), 0);
  j = json::parse(ReadTextFile(Out("wer.json")));
  EXPECT_DOUBLE_EQ(j.at("value").get<double>(), 0.2);

  WriteTextFileAtomic(Out("gold.txt"), "u1 happy\nu2 happy\nu3 sad\n");
  WriteTextFileAtomic(Out("pred.txt"), "u1 happy\nu2 sad\nu3 sad\n");
  ASSERT_EQ(RunCli("--json uar " + Q(Out("gold.txt")) + " " + Q(Out("pred.txt")), Out("uar.json")), 0);
  j = json::parse(ReadTextFile(Out("uar.json")));
  EXPECT_DOUBLE_EQ(j.at("value").get<double>(), 0.75);

  ASSERT_EQ(RunCli("eer " + Q(Out("scores.txt")), Out("eer.txt")), 0);
  EXPECT_EQ(ReadTextFile(Out("eer.txt")).rfind("eer 0.5", 0), 0u);
}

TEST_F(CliTest, ScoreCommand) {
  const auto utt2spk =
      json::parse(ReadTextFile(corpus() / "utt2spk.json")).get<std::map<std::string, std::string>>();
  // Enrollment: speaker means; test: utterance means of the source files.
  fs::create_directories(Out("enroll"));
  fs::create_directories(Out("test"));
  json map;
  for (const auto &f : SortedFiles(corpus() / "means")) {
    fs::copy_file(f, Out("enroll") / f.filename());
    map[f.stem().string()] = f.stem().string();
  }
  WriteTextFileAtomic(Out("map.json"), map.dump());
  std::string trials;
  for (const auto &f : SortedFiles(corpus() / "source")) {
    const auto seq = ReadFeatureFile(f);
    WriteEmbeddingFile({seq.frames.colwise().mean().transpose(), seq.utterance_id, {}},
                       Out("test") / f.filename());
    for (const auto &m : map.items())
      trials += m.key() + " " + seq.utterance_id + " " +
                (utt2spk.at(seq.utterance_id) == m.key() ? "target" : "nontarget") + "\n";
  }
  WriteTextFileAtomic(Out("trials.txt"), trials);
  ASSERT_EQ(RunCli("score " + Q(Out("trials.txt")) + " --enroll-dir " + Q(Out("enroll")) +
                       " --enroll-map " + Q(Out("map.json")) + " --test-dir " + Q(Out("test")) +
                       " --out " + Q(Out("scores.txt")),
                   Out("score.log")),
            0);
  EXPECT_EQ(ReadScoreFile(Out("scores.txt")).size(), 40u);
  ASSERT_EQ(RunCli("--json eer " + Q(Out("scores.txt")), Out("eer.json")), 0);
  EXPECT_DOUBLE_EQ(json::parse(ReadTextFile(Out("eer.json"))).at("value").get<double>(), 0.0);
}

TEST_F(CliTest, AdmixCommands) {
  fs::create_directories(Out("a"));
  fs::create_directories(Out("b"));
  for (const auto &f : SortedFiles(corpus() / "source")) {
    fs::copy_file(f, Out("a") / f.filename());
    fs::copy_file(f, Out("b") / f.filename());
  }
  WriteTextFileAtomic(Out("a") / "summary.json", "{}");
  ASSERT_EQ(RunCli("--seed 4 admix plan --p a=0.6 --p b=0.4 --from-dir " + Q(Out("a")) +
                       " --out " + Q(Out("plan.json")),
                   Out("plan.log")),
            0);
  const auto plan = ReadPlan(Out("plan.json"));
  EXPECT_EQ(plan.assignments.size(), 10u);
  EXPECT_EQ(plan.seed, 4u);
  ASSERT_EQ(RunCli("admix apply --plan " + Q(Out("plan.json")) + " --backend a=" + Q(Out("a")) +
                       " --backend b=" + Q(Out("b")) + " --out " + Q(Out("mix")),
                   Out("apply.log")),
            0);
  EXPECT_EQ(SortedFiles(Out("mix")).size(), 11u);
  EXPECT_NE(RunCli("admix plan --p a=0.6 --p b=0.3 --from-dir " + Q(Out("a")) + " --out " +
                       Q(Out("plan2.json")),
                   Out("plan2.log")),
            0);
  WriteTextFileAtomic(Out("points.csv"),
                      "label,mix_fraction,eer,uar,wer\nknn,0,7.95,56.70,3.16\n"
                      "vits,1,48.25,30.35,3.75\nmix,0.4,40.81,47.09,3.33\n");
  ASSERT_EQ(RunCli("admix report " + Q(Out("points.csv")) + " --out " + Q(Out("report.csv")),
                   Out("report.log")),
            0);
  EXPECT_TRUE(fs::exists(Out("report.json")));
}

TEST_F(CliTest, SynthCommandIsDeterministic) {
  ASSERT_EQ(RunCli("--seed 2 synth " + Q(Out("s1")) + " --speakers 3 --frames 30 --utterances 3",
                   Out("s1.log")),
            0);
  ASSERT_EQ(RunCli("--seed 2 synth " + Q(Out("s2")) + " --speakers 3 --frames 30 --utterances 3",
                   Out("s2.log")),
            0);
  for (const auto &sub : {"source", "target", "means"}) {
    const auto a = SortedFiles(Out("s1") / sub);
    const auto b = SortedFiles(Out("s2") / sub);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(ReadTextFile(a[i]), ReadTextFile(b[i]));
  }
  EXPECT_NE(RunCli("synth " + Q(Out("s3")) + " --speakers 1", Out("s3.log")), 0);
}

}  // namespace
}  // namespace voxanon
