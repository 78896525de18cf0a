// tools/voxanon.cc

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

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "voxanon/admixture.h"
#include "voxanon/codebook.h"
#include "voxanon/config.h"
#include "voxanon/ctc.h"
#include "voxanon/error.h"
#include "voxanon/io.h"
#include "voxanon/metrics.h"
#include "voxanon/pipeline.h"
#include "voxanon/synth.h"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace voxanon;

namespace {

struct GlobalOptions {
  std::uint64_t seed = 0;
  int workers = 1;
  std::string config;
  bool json_output = false;
  CLI::Option *seed_opt = nullptr;
  CLI::Option *workers_opt = nullptr;
};

// Metric results go to stdout: a JSON record with --json, a text line without.
void EmitMetric(const GlobalOptions &g, const std::string &metric, double value,
                const json &components) {
  if (g.json_output) {
    std::cout << json{{"metric", metric}, {"value", value},
                      {"components", components}}
                     .dump()
              << "\n";
    return;
  }
  std::cout << metric << " " << FormatReal(value);
  for (const auto &[k, v] : components.items())
    if (v.is_primitive()) std::cout << " " << k << "=" << v.dump();
  std::cout << "\n";
}

// Expands directories to their *.npy files (sorted); files pass through.
std::vector<fs::path> ExpandFeatureInputs(const std::vector<std::string> &args) {
  std::vector<fs::path> out;
  for (const auto &a : args) {
    if (fs::is_directory(a)) {
      std::vector<fs::path> found;
      for (const auto &e : fs::directory_iterator(a))
        if (e.is_regular_file() && e.path().extension() == ".npy")
          found.push_back(e.path());
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else {
      out.emplace_back(a);
    }
  }
  return out;
}

// Parses `name=value` pairs, each argument possibly holding a comma list.
std::map<std::string, std::string> ParseAssignments(
    const std::vector<std::string> &args) {
  std::map<std::string, std::string> out;
  for (const auto &arg : args) {
    std::size_t pos = 0;
    while (pos <= arg.size()) {
      auto comma = arg.find(',', pos);
      if (comma == std::string::npos) comma = arg.size();
      const std::string item = arg.substr(pos, comma - pos);
      pos = comma + 1;
      const auto eq = item.find('=');
      if (eq == std::string::npos || eq == 0)
        throw FormatError("expected name=value, got '" + item + "'");
      if (!out.emplace(item.substr(0, eq), item.substr(eq + 1)).second)
        throw DataError("'" + item.substr(0, eq) + "' given twice");
    }
  }
  return out;
}

Codebook LoadCodebook(const std::string &path) {
  return Codebook(ReadMatrixFile(path));
}

CtcConfig MakeCtcConfig(double temperature, double blank_logit, bool distance) {
  CtcConfig cfg{temperature, blank_logit,
                distance ? LogitSign::kDistance : LogitSign::kSimilarity};
  cfg.Validate();
  return cfg;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{
      "voxanon: feature-space voice anonymization (kNN conversion, k-means/CTC "
      "objective, random admixture) and privacy/utility metrics"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  g.seed_opt = app.add_option("--seed", g.seed, "Seed for every random stream");
  g.workers_opt = app.add_option("--workers", g.workers, "Worker threads")
                      ->check(CLI::PositiveNumber);
  app.add_option("--config", g.config, "key=value run config (flags win)")
      ->check(CLI::ExistingFile);
  app.add_flag("--json", g.json_output, "Machine-readable metric output");

  // convert
  auto *convert = app.add_subcommand("convert", "Anonymize a directory of feature files");
  std::string conv_src, conv_targets, conv_out, conv_metric;
  int conv_k = kDefaultK;
  double conv_noise = 0.0;
  std::vector<double> conv_range, conv_weights;
  convert->add_option("source_dir", conv_src)->required()->check(CLI::ExistingDirectory);
  convert->add_option("target_manifest", conv_targets)->required();
  convert->add_option("out_dir", conv_out)->required();
  auto *conv_k_opt = convert->add_option("--k", conv_k, "Neighbors per matching set");
  auto *conv_noise_opt = convert->add_option(
      "--noise-bound", conv_noise, "Uniform input-noise amplitude (0 disables; 32 is typical)");
  auto *conv_range_opt =
      convert->add_option("--length-factor-range", conv_range, "lo,hi tempo factor range")
          ->expected(2)
          ->delimiter(',');
  auto *conv_weights_opt =
      convert->add_option("--pool-weights", conv_weights, "Comma-separated set weights")
          ->delimiter(',');
  auto *conv_metric_opt = convert->add_option("--metric", conv_metric)
                              ->check(CLI::IsMember({"cosine", "euclidean"}));

  // kmeans
  auto *kmeans = app.add_subcommand("kmeans", "Fit a k-means codebook");
  std::vector<std::string> km_inputs;
  int km_k = 0, km_iters = 100;
  std::string km_out;
  kmeans->add_option("inputs", km_inputs, "Feature files or directories")->required();
  kmeans->add_option("--k", km_k, "Number of centroids")->required();
  kmeans->add_option("--max-iters", km_iters);
  kmeans->add_option("--out", km_out, "Codebook NPY path")->required();

  // discretize
  auto *discretize = app.add_subcommand("discretize", "Map frames to codebook tokens");
  std::string dis_in, dis_codebook, dis_out;
  bool dis_collapse = false;
  discretize->add_option("features", dis_in)->required()->check(CLI::ExistingFile);
  discretize->add_option("--codebook", dis_codebook)->required()->check(CLI::ExistingFile);
  discretize->add_flag("--collapse", dis_collapse, "Collapse repeated tokens");
  discretize->add_option("--out", dis_out, "Token file (default: stdout)");

  // ctc-loss
  auto *ctc = app.add_subcommand("ctc-loss", "CTC loss of frames against a token target");
  std::string ctc_in, ctc_codebook, ctc_target, ctc_grad;
  double ctc_temp = 1.0, ctc_blank = 0.0;
  bool ctc_distance = false;
  ctc->add_option("frames", ctc_in)->required()->check(CLI::ExistingFile);
  ctc->add_option("--codebook", ctc_codebook)->required()->check(CLI::ExistingFile);
  ctc->add_option("--target", ctc_target, "Token file; first line is used")
      ->required()
      ->check(CLI::ExistingFile);
  ctc->add_option("--temperature", ctc_temp);
  ctc->add_option("--blank-logit", ctc_blank);
  ctc->add_flag("--distance-logits", ctc_distance,
                "Use (1 - cosine) instead of cosine as the logit");
  ctc->add_option("--grad-out", ctc_grad, "Write d loss / d frames as NPY");

  // score
  auto *score = app.add_subcommand("score", "Cosine-score trials against enrollment pools");
  std::string sc_trials, sc_enroll_dir, sc_enroll_map, sc_test_dir, sc_out;
  bool sc_pool_scores = false;
  score->add_option("trials", sc_trials)->required()->check(CLI::ExistingFile);
  score->add_option("--enroll-dir", sc_enroll_dir)->required()->check(CLI::ExistingDirectory);
  score->add_option("--enroll-map", sc_enroll_map, "utterance -> speaker JSON")
      ->required()
      ->check(CLI::ExistingFile);
  score->add_option("--test-dir", sc_test_dir)->required()->check(CLI::ExistingDirectory);
  score->add_option("--out", sc_out, "Score file")->required();
  score->add_flag("--pool-scores", sc_pool_scores,
                  "Average per-enrollment cosines instead of pooling embeddings");

  // eer / wer / uar
  auto *eer = app.add_subcommand("eer", "Equal error rate of a score file");
  std::string eer_in;
  eer->add_option("scores", eer_in)->required()->check(CLI::ExistingFile);

  auto *wer = app.add_subcommand("wer", "Corpus word error rate");
  std::string wer_ref, wer_hyp;
  wer->add_option("ref", wer_ref)->required()->check(CLI::ExistingFile);
  wer->add_option("hyp", wer_hyp)->required()->check(CLI::ExistingFile);

  auto *uar = app.add_subcommand("uar", "Unweighted average recall");
  std::string uar_gold, uar_pred;
  uar->add_option("gold", uar_gold, "<utt> <label> lines")->required()->check(CLI::ExistingFile);
  uar->add_option("predicted", uar_pred, "<utt> <label> lines")
      ->required()
      ->check(CLI::ExistingFile);

  // admix
  auto *admix = app.add_subcommand("admix", "Random admixture of backends");
  admix->require_subcommand(1);
  auto *admix_plan = admix->add_subcommand("plan", "Assign utterances to backends");
  std::vector<std::string> plan_p;
  std::string plan_ids, plan_dir, plan_out, plan_ext = ".npy";
  admix_plan->add_option("--p", plan_p, "backend=probability (repeatable)")->required();
  auto *plan_ids_opt = admix_plan->add_option("--ids", plan_ids, "One utterance id per line")
                           ->check(CLI::ExistingFile);
  auto *plan_dir_opt =
      admix_plan->add_option("--from-dir", plan_dir, "Use file stems in a directory")
          ->check(CLI::ExistingDirectory);
  plan_ids_opt->excludes(plan_dir_opt);
  admix_plan->add_option("--ext", plan_ext, "File extension read by --from-dir")
      ->capture_default_str();
  admix_plan->add_option("--out", plan_out, "Plan JSON")->required();

  auto *admix_apply = admix->add_subcommand("apply", "Materialize a mixed corpus");
  std::string apply_plan, apply_out;
  std::vector<std::string> apply_backends;
  admix_apply->add_option("--plan", apply_plan)->required()->check(CLI::ExistingFile);
  admix_apply->add_option("--backend", apply_backends, "backend=directory (repeatable)")
      ->required();
  admix_apply->add_option("--out", apply_out)->required();

  auto *admix_report = admix->add_subcommand("report", "Privacy/utility trade-off report");
  std::string report_in, report_out;
  admix_report->add_option("points", report_in, "CSV: label,mix_fraction,eer,uar,wer")
      ->required()
      ->check(CLI::ExistingFile);
  admix_report->add_option("--out", report_out, "Report CSV (JSON twin alongside)")
      ->required();

  // synth
  auto *synth = app.add_subcommand("synth", "Generate a synthetic speaker corpus");
  SyntheticCorpusSpec synth_spec;
  std::string synth_out;
  synth->add_option("out_dir", synth_out)->required();
  synth->add_option("--speakers", synth_spec.n_speakers);
  synth->add_option("--frames", synth_spec.frames_per_speaker, "Frames per speaker");
  synth->add_option("--dim", synth_spec.dim);
  synth->add_option("--separation", synth_spec.cluster_separation);
  synth->add_option("--utterances", synth_spec.utterances_per_speaker,
                    "Utterances per speaker");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*convert) {
      RunConfig cfg;
      if (!g.config.empty()) cfg = LoadRunConfig(g.config);
      if (g.seed_opt->count()) cfg.seed = g.seed;
      if (g.workers_opt->count()) cfg.workers = g.workers;
      if (conv_k_opt->count()) cfg.k = conv_k;
      if (conv_noise_opt->count()) cfg.noise_bound = conv_noise;
      if (conv_range_opt->count()) {
        cfg.length_factor_lo = conv_range[0];
        cfg.length_factor_hi = conv_range[1];
      }
      if (conv_weights_opt->count()) cfg.pool_weights = conv_weights;
      if (conv_metric_opt->count())
        cfg.metric = conv_metric == "cosine" ? Metric::kCosine : Metric::kEuclidean;
      const ConvertSummary summary = RunConvert(cfg, conv_src, conv_targets, conv_out);
      for (const auto &u : summary.utterances)
        if (!u.ok) std::cerr << "convert: " << u.utterance_id << ": " << u.error << "\n";
      std::cerr << "convert: " << summary.utterances.size() - summary.failed
                << " converted, " << summary.failed << " failed\n";
      if (g.json_output) std::cout << summary.ToJson(cfg).dump() << "\n";
      return summary.failed == 0 ? 0 : 1;
    }

    if (*kmeans) {
      std::vector<FeatureSequence> seqs;
      for (const auto &p : ExpandFeatureInputs(km_inputs))
        seqs.push_back(ReadFeatureFile(p));
      if (seqs.empty()) throw SchemaError("kmeans: no input features");
      const MatchingSet pooled = BuildMatchingSet<float>(seqs, "kmeans");
      const auto fit = KMeansFit(pooled.frames(), km_k, km_iters, g.seed, g.workers);
      WriteMatrixFile(fit.codebook.centroids(), km_out);
      EmitMetric(g, "kmeans_inertia", fit.inertia.back(),
                 {{"k", km_k},
                  {"points", pooled.size()},
                  {"iterations", fit.iterations},
                  {"converged", fit.converged},
                  {"inertia_history", fit.inertia}});
      return 0;
    }

    if (*discretize) {
      const FeatureSequence seq = ReadFeatureFile(dis_in);
      TokenSequence tokens = Discretize(seq.frames, LoadCodebook(dis_codebook));
      if (dis_collapse) tokens = CollapseRepeats(tokens);
      if (dis_out.empty()) {
        for (std::size_t i = 0; i < tokens.size(); ++i)
          std::cout << (i ? " " : "") << tokens[i];
        std::cout << "\n";
      } else {
        WriteTokenFile({tokens}, dis_out);
      }
      return 0;
    }

    if (*ctc) {
      const FeatureSequence seq = ReadFeatureFile(ctc_in);
      const auto targets = ReadTokenFile(ctc_target);
      if (targets.empty()) throw SchemaError("ctc-loss: target file is empty");
      const auto res = CtcLoss(seq.frames, targets.front(), LoadCodebook(ctc_codebook),
                               MakeCtcConfig(ctc_temp, ctc_blank, ctc_distance));
      if (!ctc_grad.empty()) WriteMatrixFile(res.grad, ctc_grad);
      if (g.json_output) {
        // JSON has no infinity; an infeasible loss is reported as null.
        std::cout << json{{"metric", "ctc_loss"},
                          {"value", res.feasible ? json(res.loss) : json(nullptr)},
                          {"components",
                           {{"feasible", res.feasible},
                            {"frames", seq.num_frames()},
                            {"target_length", targets.front().size()}}}}
                         .dump()
                  << "\n";
      } else {
        std::cout << "ctc_loss " << (res.feasible ? FormatReal(res.loss) : "inf")
                  << " feasible=" << (res.feasible ? "true" : "false") << "\n";
      }
      if (!res.feasible) {
        std::cerr << "ctc-loss: target needs more frames than the input has\n";
        return 1;
      }
      return 0;
    }

    if (*score) {
      const auto utt2spk = ReadSpeakerMap(sc_enroll_map);
      std::map<std::string, std::vector<Eigen::VectorXf>> pools;
      const TrialList trials = ReadTrialList(sc_trials);
      std::set<std::string> needed;
      for (const auto &t : trials) needed.insert(t.enroll_speaker_id);
      for (const auto &[utt, spk] : utt2spk)
        if (needed.count(spk))
          pools[spk].push_back(
              ReadEmbeddingFile(fs::path(sc_enroll_dir) / (utt + ".npy")).vector);
      std::map<std::string, Eigen::VectorXf> tests;
      std::vector<TrialScore> scores;
      const EnrollPooling pooling =
          sc_pool_scores ? EnrollPooling::kMeanScore : EnrollPooling::kMeanEmbedding;
      for (const auto &t : trials) {
        const auto pool = pools.find(t.enroll_speaker_id);
        if (pool == pools.end())
          throw SchemaError("no enrollment utterances for speaker '" +
                            t.enroll_speaker_id + "'");
        auto test = tests.find(t.test_utterance_id);
        if (test == tests.end())
          test = tests
                     .emplace(t.test_utterance_id,
                              ReadEmbeddingFile(fs::path(sc_test_dir) /
                                                (t.test_utterance_id + ".npy"))
                                  .vector)
                     .first;
        scores.push_back({EnrollmentScore<float>(pool->second, test->second, pooling),
                          t.is_target, t.enroll_speaker_id, t.test_utterance_id});
      }
      WriteScoreFile(scores, sc_out);
      std::cerr << "score: wrote " << scores.size() << " trial scores to " << sc_out
                << "\n";
      return 0;
    }

    if (*eer) {
      const auto scores = ReadScoreFile(eer_in);
      const EerResult r = ComputeEer(scores);
      EmitMetric(g, "eer", r.eer,
                 {{"threshold", r.threshold},
                  {"n_target", r.n_target},
                  {"n_nontarget", r.n_nontarget}});
      return 0;
    }

    if (*wer) {
      const WerResult r = CorpusWordErrorRate(ReadTranscripts(wer_ref),
                                              ReadTranscripts(wer_hyp));
      EmitMetric(g, "wer", r.wer,
                 {{"substitutions", r.substitutions},
                  {"deletions", r.deletions},
                  {"insertions", r.insertions},
                  {"n_ref", r.n_ref}});
      return 0;
    }

    if (*uar) {
      const auto gold = ReadLabelFile(uar_gold);
      std::map<std::string, std::string> pred;
      for (auto &[utt, label] : ReadLabelFile(uar_pred)) pred.emplace(utt, label);
      std::vector<std::pair<std::string, std::string>> pairs;
      for (const auto &[utt, label] : gold) {
        const auto it = pred.find(utt);
        if (it == pred.end()) throw DataError("uar: no prediction for '" + utt + "'");
        pairs.emplace_back(label, it->second);
      }
      const UarResult r = UnweightedAverageRecall(pairs);
      EmitMetric(g, "uar", r.uar,
                 {{"classes", r.per_class_recall.size()},
                  {"per_class_recall", r.per_class_recall}});
      return 0;
    }

    if (*admix_plan) {
      std::map<std::string, double> p;
      for (const auto &[backend, value] : ParseAssignments(plan_p))
        p.emplace(backend, ParseReal(value));
      std::vector<std::string> ids;
      if (!plan_ids.empty()) {
        for (const auto &w : SplitWords(ReadTextFile(plan_ids))) ids.push_back(w);
      } else if (!plan_dir.empty()) {
        for (const auto &e : fs::directory_iterator(plan_dir))
          if (e.is_regular_file() && e.path().extension() == plan_ext)
            ids.push_back(e.path().stem().string());
        std::sort(ids.begin(), ids.end());
      } else {
        throw SchemaError("admix plan: give --ids or --from-dir");
      }
      const AdmixturePlan plan = PlanAdmixture(ids, p, g.seed);
      WritePlan(plan, plan_out);
      for (const auto &[backend, n] : plan.Counts())
        std::cerr << "admix plan: " << backend << " " << n << "\n";
      return 0;
    }

    if (*admix_apply) {
      std::map<std::string, fs::path> dirs;
      for (const auto &[backend, dir] : ParseAssignments(apply_backends))
        dirs.emplace(backend, dir);
      const auto manifest =
          ApplyAdmixture(ReadPlan(apply_plan), dirs, apply_out, g.workers);
      for (const auto &[backend, n] : manifest.counts)
        std::cerr << "admix apply: " << backend << " " << n << "\n";
      return 0;
    }

    if (*admix_report) {
      const auto rows = WriteTradeoffReport(ReadTradeoffPoints(report_in), report_out);
      if (g.json_output) std::cout << TradeoffJson(rows).dump() << "\n";
      else std::cout << TradeoffCsv(rows);
      return 0;
    }

    if (*synth) {
      synth_spec.seed = g.seed;
      const auto corpus = GenerateSyntheticCorpus(synth_spec);
      WriteSyntheticCorpus(corpus, synth_spec, synth_out);
      std::cerr << "synth: " << corpus.speakers.size() << " speakers, "
                << corpus.utterances.size() << " utterances in " << synth_out << "\n";
      return 0;
    }
  } catch (const std::exception &e) {
    std::cerr << "voxanon: ERROR: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
