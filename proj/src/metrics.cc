// metrics.cc

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

#include "voxanon/metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace voxanon {

EerResult ComputeEer(std::span<const TrialScore> scores) {
  std::vector<std::pair<double, bool>> sorted;
  sorted.reserve(scores.size());
  EerResult res;
  for (const auto &s : scores) {
    if (!std::isfinite(s.score)) throw DataError("EER: non-finite score");
    sorted.emplace_back(s.score, s.is_target);
    (s.is_target ? res.n_target : res.n_nontarget)++;
  }
  if (res.n_target == 0 || res.n_nontarget == 0)
    throw SchemaError("EER needs at least one target and one non-target trial");
  std::sort(sorted.begin(), sorted.end());

  const double nt = static_cast<double>(res.n_target);
  const double nn = static_cast<double>(res.n_nontarget);

  // Operating point below every score: nothing missed, everything accepted.
  double prev_miss = 0.0, prev_fa = 1.0, prev_th = sorted.front().first;
  std::size_t misses = 0, rejected_nontargets = 0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    const double v = sorted[i].first;
    for (; i < sorted.size() && sorted[i].first == v; ++i)
      (sorted[i].second ? misses : rejected_nontargets)++;
    // Threshold just above v: midpoint to the next score, or past the max.
    const double th = i < sorted.size()
                          ? 0.5 * (v + sorted[i].first)
                          : std::nextafter(v, std::numeric_limits<double>::infinity());
    const double miss = static_cast<double>(misses) / nt;
    const double fa = (nn - static_cast<double>(rejected_nontargets)) / nn;
    if (miss >= fa) {
      if (miss == fa) {
        res.eer = miss;
        res.threshold = th;
      } else {
        // Intersect the segment between the two operating points with the
        // diagonal miss == fa.
        const double alpha =
            (prev_fa - prev_miss) / ((miss - prev_miss) - (fa - prev_fa));
        res.eer = prev_miss + alpha * (miss - prev_miss);
        res.threshold = prev_th + alpha * (th - prev_th);
      }
      return res;
    }
    prev_miss = miss;
    prev_fa = fa;
    prev_th = th;
  }
  // Unreachable: the last point has miss = 1 >= fa = 0.
  res.eer = 0.5;
  return res;
}

std::string FoldCase(std::string_view word) {
  std::string out(word);
  for (char &c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

WerResult AlignWords(const std::vector<std::string> &ref,
                     const std::vector<std::string> &hyp) {
  const std::size_t n = ref.size(), m = hyp.size();
  std::vector<std::string> r(n), h(m);
  std::transform(ref.begin(), ref.end(), r.begin(), FoldCase);
  std::transform(hyp.begin(), hyp.end(), h.begin(), FoldCase);

  // cost[i][j]: edit distance between r[0, i) and h[0, j).
  std::vector<std::vector<std::size_t>> cost(n + 1,
                                             std::vector<std::size_t>(m + 1));
  for (std::size_t i = 0; i <= n; ++i) cost[i][0] = i;
  for (std::size_t j = 0; j <= m; ++j) cost[0][j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t diag = cost[i - 1][j - 1] + (r[i - 1] != h[j - 1]);
      cost[i][j] = std::min({diag, cost[i][j - 1] + 1, cost[i - 1][j] + 1});
    }
  }

  WerResult res;
  res.n_ref = n;
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 &&
        cost[i][j] == cost[i - 1][j - 1] + (r[i - 1] != h[j - 1])) {
      if (r[i - 1] != h[j - 1]) ++res.substitutions;
      --i;
      --j;
    } else if (j > 0 && cost[i][j] == cost[i][j - 1] + 1) {
      ++res.insertions;
      --j;
    } else {
      ++res.deletions;
      --i;
    }
  }
  res.wer = n == 0 ? 0.0
                   : static_cast<double>(res.errors()) / static_cast<double>(n);
  return res;
}

WerResult WordErrorRate(const std::vector<std::string> &ref,
                        const std::vector<std::string> &hyp) {
  if (ref.empty()) throw DomainError("WER is undefined for an empty reference");
  return AlignWords(ref, hyp);
}

WerResult CorpusWordErrorRate(const std::vector<Transcript> &refs,
                              const std::vector<Transcript> &hyps) {
  std::unordered_map<std::string, const Transcript *> by_id;
  for (const auto &h : hyps) by_id.emplace(h.utterance_id, &h);
  static const std::vector<std::string> kEmpty;
  WerResult total;
  for (const auto &r : refs) {
    const auto it = by_id.find(r.utterance_id);
    const WerResult u =
        AlignWords(r.words, it == by_id.end() ? kEmpty : it->second->words);
    total.substitutions += u.substitutions;
    total.deletions += u.deletions;
    total.insertions += u.insertions;
    total.n_ref += u.n_ref;
  }
  if (total.n_ref == 0)
    throw DomainError("WER is undefined for an empty reference corpus");
  total.wer = static_cast<double>(total.errors()) /
              static_cast<double>(total.n_ref);
  return total;
}

UarResult UnweightedAverageRecall(
    std::span<const std::pair<std::string, std::string>> gold_and_predicted) {
  if (gold_and_predicted.empty()) throw SchemaError("UAR input is empty");
  std::map<std::string, std::pair<std::size_t, std::size_t>> tally;
  for (const auto &[gold, pred] : gold_and_predicted) {
    auto &[correct, total] = tally[gold];
    ++total;
    if (gold == pred) ++correct;
  }
  UarResult res;
  double sum = 0.0;
  for (const auto &[label, counts] : tally) {
    const double recall = static_cast<double>(counts.first) /
                          static_cast<double>(counts.second);
    res.per_class_recall.emplace(label, recall);
    sum += recall;
  }
  res.uar = sum / static_cast<double>(tally.size());
  return res;
}

}  // namespace voxanon
