// tests/ctc_test.cc

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

#include <cmath>
#include <random>

#include "voxanon/ctc.h"
#include "voxanon/error.h"

namespace voxanon {
namespace {

RowMatrixd RandomMatrix(std::mt19937_64 &rng, Eigen::Index rows, Eigen::Index cols,
                        double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  RowMatrixd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  return m;
}

// Softmax probabilities computed directly from cosines, without the
// library's logit helpers.
RowMatrixd OracleProbs(const RowMatrixd &f, const RowMatrixd &c, const CtcConfig &cfg) {
  const Eigen::Index k = c.rows();
  RowMatrixd p(f.rows(), k + 1);
  for (Eigen::Index t = 0; t < f.rows(); ++t) {
    double z = 0.0;
    for (Eigen::Index j = 0; j <= k; ++j) {
      double logit = cfg.blank_logit;
      if (j < k) {
        const double cos = f.row(t).dot(c.row(j)) / (f.row(t).norm() * c.row(j).norm());
        logit = (cfg.sign == LogitSign::kSimilarity ? cos : 1.0 - cos) / cfg.temperature;
      }
      p(t, j) = std::exp(logit);
      z += p(t, j);
    }
    p.row(t) /= z;
  }
  return p;
}

// Sums the probability of every frame-level path whose collapse (merge
// repeats, then drop blanks) equals the target.
double OracleLikelihood(const RowMatrixd &probs, const TokenSequence &target) {
  const Eigen::Index t_len = probs.rows();
  const int classes = static_cast<int>(probs.cols());
  const int blank = classes - 1;
  std::vector<int> path(t_len, 0);
  double total = 0.0;
  while (true) {
    TokenSequence collapsed;
    int prev = -1;
    for (int s : path) {
      if (s != prev && s != blank) collapsed.push_back(s);
      prev = s;
    }
    if (collapsed == target) {
      double p = 1.0;
      for (Eigen::Index t = 0; t < t_len; ++t) p *= probs(t, path[t]);
      total += p;
    }
    Eigen::Index pos = 0;
    while (pos < t_len && ++path[pos] == classes) path[pos++] = 0;
    if (pos == t_len) break;
  }
  return total;
}

TEST(CtcTest, MinFrames) {
  EXPECT_EQ(CtcMinFrames({}), 0);
  EXPECT_EQ(CtcMinFrames({1, 2, 3}), 3);
  EXPECT_EQ(CtcMinFrames({1, 1}), 3);
  EXPECT_EQ(CtcMinFrames({2, 2, 2, 0}), 6);
}

TEST(CtcTest, MatchesPathEnumeration) {
  std::mt19937_64 rng(1);
  const RowMatrixd c = RandomMatrix(rng, 3, 4);
  const BasicCodebook<double> codebook(c);
  const std::vector<TokenSequence> targets{
      {}, {0}, {2}, {0, 1}, {1, 1}, {2, 0, 2}, {0, 0, 1}, {1, 2, 0, 1}};
  const std::vector<CtcConfig> configs{
      {1.0, 0.0, LogitSign::kSimilarity},
      {0.1, 0.5, LogitSign::kSimilarity},
      {0.5, -1.0, LogitSign::kDistance}};
  for (const auto &cfg : configs) {
    for (Eigen::Index t_len = 1; t_len <= 6; ++t_len) {
      const RowMatrixd f = RandomMatrix(rng, t_len, 4);
      const RowMatrixd probs = OracleProbs(f, c, cfg);
      for (const auto &target : targets) {
        const auto res = CtcLoss(f, target, codebook, cfg);
        const double like = OracleLikelihood(probs, target);
        if (like == 0.0) {
          EXPECT_FALSE(res.feasible);
          EXPECT_TRUE(std::isinf(res.loss));
          EXPECT_LT(t_len, CtcMinFrames(target));
        } else {
          ASSERT_TRUE(res.feasible);
          EXPECT_NEAR(res.loss, -std::log(like), 1e-9 * std::max(1.0, -std::log(like)))
              << "T=" << t_len << " L=" << target.size();
        }
      }
    }
  }
}

TEST(CtcTest, InfeasibleGivesInfinityAndZeroGradient) {
  const BasicCodebook<double> codebook(RowMatrixd::Identity(3, 3));
  const RowMatrixd f = RowMatrixd::Ones(2, 3);
  const auto res = CtcLoss(f, {1, 1}, codebook, {});
  EXPECT_FALSE(res.feasible);
  EXPECT_EQ(res.loss, std::numeric_limits<double>::infinity());
  EXPECT_EQ(res.grad, RowMatrixd::Zero(2, 3));
  const auto ok = CtcLoss(RowMatrixd(RowMatrixd::Ones(3, 3)), {1, 1}, codebook, {});
  EXPECT_TRUE(ok.feasible);
  EXPECT_TRUE(std::isfinite(ok.loss));
}

TEST(CtcTest, EmptyTargetIsAllBlank) {
  std::mt19937_64 rng(2);
  const RowMatrixd c = RandomMatrix(rng, 4, 3);
  const RowMatrixd f = RandomMatrix(rng, 7, 3);
  const CtcConfig cfg{0.5, 0.3, LogitSign::kSimilarity};
  const RowMatrixd probs = OracleProbs(f, c, cfg);
  double expect = 0.0;
  for (Eigen::Index t = 0; t < 7; ++t) expect -= std::log(probs(t, 4));
  EXPECT_NEAR(CtcLoss(f, {}, BasicCodebook<double>(c), cfg).loss, expect, 1e-10);
}

TEST(CtcTest, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(3);
  const double h = 1e-4;
  const std::vector<CtcConfig> configs{
      {1.0, 0.0, LogitSign::kSimilarity},
      {0.2, 0.1, LogitSign::kSimilarity},
      {0.3, 0.0, LogitSign::kDistance}};
  for (const auto &cfg : configs) {
    for (int trial = 0; trial < 5; ++trial) {
      const BasicCodebook<double> codebook(RandomMatrix(rng, 5, 6));
      RowMatrixd f = RandomMatrix(rng, 12, 6, 3.0);
      const TokenSequence target{0, 3, 3, 1, 4};
      const auto res = CtcLoss(f, target, codebook, cfg);
      ASSERT_TRUE(res.feasible);
      for (Eigen::Index i = 0; i < f.size(); ++i) {
        const double keep = f.data()[i];
        f.data()[i] = keep + h;
        const double up = CtcLoss(f, target, codebook, cfg).loss;
        f.data()[i] = keep - h;
        const double down = CtcLoss(f, target, codebook, cfg).loss;
        f.data()[i] = keep;
        const double fd = (up - down) / (2.0 * h);
        const double an = res.grad.data()[i];
        if (std::max(std::abs(fd), std::abs(an)) <= 1e-8) continue;
        EXPECT_LE(std::abs(fd - an) / std::max(std::abs(fd), std::abs(an)), 1e-4)
            << "component " << i << " fd " << fd << " analytic " << an;
      }
    }
  }
}

TEST(CtcTest, FloatAgreesWithDouble) {
  std::mt19937_64 rng(4);
  const RowMatrixd c = RandomMatrix(rng, 6, 8);
  const RowMatrixd f = RandomMatrix(rng, 30, 8);
  const TokenSequence target{1, 2, 2, 5, 0};
  const auto d = CtcLoss(f, target, BasicCodebook<double>(c), {});
  const auto s = CtcLoss<float>(f.cast<float>(), target,
                                BasicCodebook<float>(c.cast<float>()), {});
  EXPECT_NEAR(s.loss, d.loss, 1e-4 * d.loss);
  EXPECT_LT((s.grad.cast<double>() - d.grad).cwiseAbs().maxCoeff(), 1e-4);
}

TEST(CtcTest, LossIsNonNegative) {
  std::mt19937_64 rng(5);
  const BasicCodebook<double> codebook(RandomMatrix(rng, 3, 2));
  for (int i = 0; i < 50; ++i) {
    const auto res = CtcLoss(RandomMatrix(rng, 4, 2), {static_cast<int>(i % 3)}, codebook,
                             {0.01, 0.0, LogitSign::kSimilarity});
    EXPECT_GE(res.loss, 0.0);
  }
}

TEST(CtcTest, Errors) {
  const BasicCodebook<double> codebook(RowMatrixd::Identity(3, 3));
  const RowMatrixd f = RowMatrixd::Ones(4, 3);
  EXPECT_THROW(CtcLoss(f, {3}, codebook, {}), SchemaError);
  EXPECT_THROW(CtcLoss(f, {-1}, codebook, {}), SchemaError);
  EXPECT_THROW(CtcLoss(f, {0}, codebook, {0.0, 0.0, LogitSign::kSimilarity}), DomainError);
  RowMatrixd z = f;
  z.row(1).setZero();
  EXPECT_THROW(CtcLoss(z, {0}, codebook, {}), DataError);
  EXPECT_THROW(CtcLoss(RowMatrixd(RowMatrixd::Ones(4, 2)), {0}, codebook, {}), SchemaError);
}

}  // namespace
}  // namespace voxanon
