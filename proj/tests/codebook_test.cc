// tests/codebook_test.cc

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

#include <algorithm>
#include <random>

#include "voxanon/codebook.h"
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

std::int32_t OracleNearest(const RowMatrixd &centroids, const RowMatrixd &frames,
                           Eigen::Index t) {
  std::int32_t best = -1;
  double best_d = 0.0;
  for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
    double d = 0.0;
    for (Eigen::Index j = 0; j < centroids.cols(); ++j) {
      const double diff = frames(t, j) - centroids(c, j);
      d += diff * diff;
    }
    if (best < 0 || d < best_d) {
      best = static_cast<std::int32_t>(c);
      best_d = d;
    }
  }
  return best;
}

double OracleInertia(const RowMatrixd &frames, const RowMatrixd &centroids) {
  double total = 0.0;
  for (Eigen::Index t = 0; t < frames.rows(); ++t) {
    const auto c = OracleNearest(centroids, frames, t);
    total += (frames.row(t) - centroids.row(c)).squaredNorm();
  }
  return total;
}

TEST(CodebookTest, Validation) {
  EXPECT_THROW(BasicCodebook<double>(RowMatrixd::Ones(1, 3)), SchemaError);
  RowMatrixd zero = RowMatrixd::Identity(3, 3);
  zero.row(2).setZero();
  EXPECT_THROW(BasicCodebook<double>{zero}, DataError);
  RowMatrixd dup = RowMatrixd::Identity(3, 3);
  dup.row(2) = dup.row(0);
  EXPECT_THROW(BasicCodebook<double>{dup}, DataError);
  EXPECT_NO_THROW(BasicCodebook<double>(RowMatrixd::Identity(2, 3)));
}

TEST(DiscretizeTest, HandExample) {
  RowMatrixd c(3, 2);
  c << 1, 0, 0, 1, -1, 0;
  RowMatrixd f(4, 2);
  f << 0.9, 0.1, -2, 0.3, 0.1, 5, 0.0, 0.0;
  // Last frame is equidistant from all three; lowest index wins.
  EXPECT_EQ(Discretize(f, BasicCodebook<double>(c)), (TokenSequence{0, 2, 1, 0}));
}

TEST(DiscretizeTest, MatchesExhaustiveSearch) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const RowMatrixd c = RandomMatrix(rng, 8, 5);
    const RowMatrixd f = RandomMatrix(rng, 100, 5);
    const auto tokens = Discretize(f, BasicCodebook<double>(c));
    for (Eigen::Index t = 0; t < f.rows(); ++t)
      EXPECT_EQ(tokens[t], OracleNearest(c, f, t));
  }
}

TEST(DiscretizeTest, DimensionMismatch) {
  EXPECT_THROW(Discretize<double>(RowMatrixd(RowMatrixd::Ones(2, 4)), BasicCodebook<double>(RowMatrixd::Identity(2, 3))),
               SchemaError);
}

TEST(CollapseRepeatsTest, Runs) {
  EXPECT_EQ(CollapseRepeats({1, 1, 2, 2, 2, 1}), (TokenSequence{1, 2, 1}));
  EXPECT_EQ(CollapseRepeats({}), TokenSequence{});
  EXPECT_EQ(CollapseRepeats({3}), TokenSequence{3});
  EXPECT_EQ(CollapseRepeats({0, 1, 0, 1}), (TokenSequence{0, 1, 0, 1}));
}

TEST(KMeansTest, InertiaNeverIncreases) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = 20 + static_cast<Eigen::Index>(rng() % 200);
    const Eigen::Index d = 1 + static_cast<Eigen::Index>(rng() % 6);
    const int k = 2 + static_cast<int>(rng() % 7);
    const RowMatrixd x = RandomMatrix(rng, n, d);
    const auto fit = KMeansFit(x, k, 100, trial);
    ASSERT_GE(fit.inertia.size(), 2u);
    for (std::size_t i = 1; i < fit.inertia.size(); ++i)
      EXPECT_LE(fit.inertia[i], fit.inertia[i - 1] * (1.0 + 1e-12))
          << "trial " << trial << " step " << i;
    EXPECT_NEAR(fit.inertia.back(), OracleInertia(x, fit.codebook.centroids()),
                1e-9 * fit.inertia.back());
    ASSERT_EQ(fit.assignments.size(), static_cast<std::size_t>(n));
    for (Eigen::Index t = 0; t < n; ++t)
      EXPECT_EQ(fit.assignments[t], OracleNearest(fit.codebook.centroids(), x, t));
  }
}

TEST(KMeansTest, RecoversSeparatedClusters) {
  std::mt19937_64 rng(3);
  RowMatrixd x(300, 2);
  const double centers[3][2] = {{10, 0}, {-10, 0}, {0, 10}};
  for (Eigen::Index i = 0; i < 300; ++i) {
    x.row(i) = RandomMatrix(rng, 1, 2, 0.5);
    x(i, 0) += centers[i % 3][0];
    x(i, 1) += centers[i % 3][1];
  }
  const auto fit = KMeansFit(x, 3, 100, 7);
  EXPECT_TRUE(fit.converged);
  for (Eigen::Index i = 3; i < 300; ++i)
    EXPECT_EQ(fit.assignments[i], fit.assignments[i % 3]);
  EXPECT_NE(fit.assignments[0], fit.assignments[1]);
  EXPECT_NE(fit.assignments[0], fit.assignments[2]);
  EXPECT_NE(fit.assignments[1], fit.assignments[2]);
}

TEST(KMeansTest, DeterministicAcrossRunsAndWorkers) {
  std::mt19937_64 rng(4);
  const RowMatrixf x = RandomMatrix(rng, 3000, 8).cast<float>();
  const auto a = KMeansFit(x, 16, 30, 11, 1);
  const auto b = KMeansFit(x, 16, 30, 11, 6);
  EXPECT_EQ(a.codebook.centroids(), b.codebook.centroids());
  EXPECT_EQ(a.assignments, b.assignments);
  EXPECT_EQ(a.inertia, b.inertia);
  const auto c = KMeansFit(x, 16, 30, 12, 1);
  EXPECT_NE(a.codebook.centroids(), c.codebook.centroids());
}

TEST(KMeansTest, OneClusterPerPoint) {
  std::mt19937_64 rng(6);
  const RowMatrixd x = RandomMatrix(rng, 9, 3);
  const auto fit = KMeansFit(x, 9, 10, 2);
  EXPECT_EQ(fit.inertia.back(), 0.0);
  std::vector<bool> seen(9, false);
  for (Eigen::Index c = 0; c < 9; ++c)
    for (Eigen::Index i = 0; i < 9; ++i)
      if (fit.codebook.centroids().row(c) == x.row(i)) seen[i] = true;
  EXPECT_EQ(std::count(seen.begin(), seen.end(), true), 9);
}

TEST(KMeansTest, IterationCap) {
  std::mt19937_64 rng(5);
  const RowMatrixd x = RandomMatrix(rng, 500, 3);
  const auto fit = KMeansFit(x, 10, 1, 0);
  EXPECT_EQ(fit.iterations, 1);
  EXPECT_EQ(fit.inertia.size(), 2u);
}

TEST(KMeansTest, DuplicatePointsStillGiveDistinctCentroids) {
  RowMatrixd x(6, 2);
  x << 1, 1, 1, 1, 1, 1, 1, 1, 5, 5, 5, 5;
  const auto fit = KMeansFit(x, 2, 20, 0);
  EXPECT_NEAR(fit.inertia.back(), 0.0, 1e-12);
}

TEST(KMeansTest, Errors) {
  const RowMatrixd x = RowMatrixd::Identity(3, 3);
  EXPECT_THROW(KMeansFit(x, 1, 10, 0), SchemaError);
  EXPECT_THROW(KMeansFit(x, 4, 10, 0), CapacityError);
  EXPECT_THROW(KMeansFit(x, 2, 0, 0), DomainError);
}

}  // namespace
}  // namespace voxanon
