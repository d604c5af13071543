// Copyright 2026 The HALSX Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <set>
#include <vector>

#include "halsx/operators.hpp"
#include "oracles.hpp"

namespace halsx {
namespace {

Matrix m22() {
  Matrix m(2, 2);
  m << 1, 2, 3, 4;
  return m;
}

std::vector<Matrix> explicit_masks(const MeasurementOperator& op) {
  std::vector<Matrix> out;
  for (Index i = 0; i < op.size(); ++i) out.push_back(op.mask(i));
  return out;
}

std::vector<MeasurementOperator> one_of_each(Index n1, Index n2, std::uint64_t seed) {
  return {MeasurementOperator::complete(n1, n2),
          make_random_completion(n1, n2, 0.4, seed),
          make_gaussian_sensing(n1, n2, 5, seed),
          make_rank_one(n1, n2, 5, seed),
          make_random_aggregates(n1, n2, 0.5, seed)};
}

TEST(Apply, CompleteIsRowMajorVectorization) {
  Vector a = MeasurementOperator::complete(2, 2).apply(m22());
  EXPECT_EQ(a, (Vector(4) << 1, 2, 3, 4).finished());
}

TEST(Apply, AggregateSumsSpan) {
  auto op = MeasurementOperator::temporal_aggregate(4, 1, {{0, 0, 3}});
  Matrix col(4, 1);
  col << 1, 2, 3, 4;
  EXPECT_DOUBLE_EQ(op.apply(col)(0), 6.0);
}

TEST(Apply, RankOneMatchesExplicitOuterProduct) {
  Matrix alpha(1, 2), beta(1, 2);
  alpha << 1, 1;
  beta << 1, -1;
  auto op = MeasurementOperator::rank_one(2, 2, alpha, beta);
  const Matrix mask = alpha.row(0).transpose() * beta.row(0);
  const double expected = (m22().array() * mask.array()).sum();
  EXPECT_DOUBLE_EQ(expected, -2.0);
  EXPECT_DOUBLE_EQ(op.apply(m22())(0), expected);
}

TEST(Apply, DimensionMismatchThrows) {
  auto op = MeasurementOperator::complete(2, 3);
  EXPECT_THROW(op.apply(Matrix::Zero(3, 2)), Error);
  EXPECT_THROW(op.adjoint(Vector::Zero(5)), Error);
}

TEST(Adjoint, CompletionSingleEntry) {
  auto op = MeasurementOperator::completion(2, 3, {{0, 1}});
  Matrix a = op.adjoint((Vector(1) << 5).finished());
  Matrix expected = Matrix::Zero(2, 3);
  expected(0, 1) = 5;
  EXPECT_EQ(a, expected);
}

TEST(Adjoint, ZeroVectorGivesZeroMatrix) {
  for (const auto& op : one_of_each(4, 3, 11))
    EXPECT_EQ(op.adjoint(Vector::Zero(op.size())), Matrix::Zero(4, 3));
}

TEST(Adjoint, IdentityAgainstExplicitMasks) {
  Rng rng(3);
  for (const auto& op : one_of_each(4, 3, 5)) {
    const auto masks = explicit_masks(op);
    for (int rep = 0; rep < 10; ++rep) {
      Matrix m = gaussian_matrix(4, 3, rng);
      Vector b = gaussian_matrix(op.size(), 1, rng);
      const double lhs = op.apply(m).dot(b);
      const double rhs = (m.array() * op.adjoint(b).array()).sum();
      const double brute = oracle::mask_inner(masks, m, b);
      const double scale = m.norm() * b.norm();
      EXPECT_NEAR(lhs, rhs, 1e-12 * scale) << to_string(op.kind());
      EXPECT_NEAR(lhs, brute, 1e-12 * scale) << to_string(op.kind());
    }
  }
}

TEST(Adjoint, CompleteApplyThenAdjointIsExact) {
  Rng rng(9);
  Matrix m = gaussian_matrix(5, 4, rng);
  auto op = MeasurementOperator::complete(5, 4);
  EXPECT_EQ(op.adjoint(op.apply(m)), m);
}

TEST(MaskProducts, MatchDenseMasks) {
  Rng rng(21);
  for (const auto& op : one_of_each(5, 4, 8)) {
    Vector f = gaussian_matrix(5, 1, rng), g = gaussian_matrix(4, 1, rng);
    for (Index i = 0; i < op.size(); ++i) {
      const Matrix a = op.mask(i);
      EXPECT_LT((op.mask_times(i, g) - a * g).norm(), 1e-12);
      EXPECT_LT((op.mask_transpose_times(i, f) - a.transpose() * f).norm(), 1e-12);
    }
    EXPECT_LT((op.apply_outer(f, g) - op.apply(f * g.transpose())).norm(), 1e-12);
  }
}

TEST(Construction, InvalidPayloadsRejected) {
  EXPECT_THROW(MeasurementOperator::completion(2, 2, {{0, 0}, {0, 0}}), Error);
  EXPECT_THROW(MeasurementOperator::completion(2, 2, {{2, 0}}), Error);
  EXPECT_THROW(MeasurementOperator::temporal_aggregate(4, 1, {{0, 0, 3}, {0, 2, 2}}),
               Error);
  EXPECT_THROW(MeasurementOperator::temporal_aggregate(4, 1, {{0, 3, 2}}), Error);
  EXPECT_THROW(MeasurementOperator::temporal_aggregate(4, 1, {{0, 0, 0}}), Error);
  EXPECT_THROW(MeasurementOperator::temporal_aggregate(4, 1, {{1, 0, 1}}), Error);
}

TEST(Construction, RankOneStoresVectorPairs) {
  auto op = make_rank_one(30, 20, 7, 1);
  EXPECT_EQ(op.alphas().rows(), 7);
  EXPECT_EQ(op.alphas().cols(), 30);
  EXPECT_EQ(op.betas().cols(), 20);
}

TEST(Projection, CompletionOverwritesAndClamps) {
  auto op = MeasurementOperator::completion(2, 2, {{0, 0}});
  Matrix w(2, 2);
  w << 0, -3, 2, 5;
  Matrix v = project_polytope(op, (Vector(1) << 7).finished(), w);
  Matrix expected(2, 2);
  expected << 7, 0, 2, 5;
  EXPECT_EQ(v, expected);
}

TEST(Projection, AggregateSpanMatchesGridSearch) {
  auto op = MeasurementOperator::temporal_aggregate(2, 1, {{0, 0, 2}});
  Matrix w(2, 1);
  w << -1, 1;
  Matrix v = project_polytope(op, (Vector(1) << 4).finished(), w);
  // Grid search over the segment {v >= 0, v1 + v2 = 4}.
  double best = 1e300, best_v1 = -1;
  for (int s = 0; s <= 400000; ++s) {
    const double v1 = 4.0 * s / 400000.0, v2 = 4.0 - v1;
    const double d = (v1 + 1) * (v1 + 1) + (v2 - 1) * (v2 - 1);
    if (d < best) {
      best = d;
      best_v1 = v1;
    }
  }
  EXPECT_NEAR(v(0, 0), best_v1, 1e-4);
  EXPECT_NEAR(v(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(v(1, 0), 3.0, 1e-12);
}

TEST(Projection, GaussianFeasiblePointIsFixed) {
  Rng rng(4);
  auto op = make_gaussian_sensing(4, 3, 5, 2);
  Matrix w = uniform_matrix(4, 3, rng, 0.5, 1.5);
  Matrix v = project_polytope(op, op.apply(w), w);
  EXPECT_LT((v - w).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Projection, FeasibleOnEveryFamily) {
  Rng rng(17);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    for (const auto& op : one_of_each(6, 5, seed)) {
      Matrix truth = uniform_matrix(6, 5, rng);
      Vector b = op.apply(truth);
      Matrix w = gaussian_matrix(6, 5, rng);
      ProjectionOptions opts;
      opts.max_iter = 20000;
      ProjectionResult r = PolytopeProjector(op, b, opts).project(w);
      EXPECT_TRUE(r.converged) << to_string(op.kind()) << " residual " << r.residual;
      EXPECT_GE(r.V.minCoeff(), -1e-12);
      EXPECT_LE((op.apply(r.V) - b).lpNorm<Eigen::Infinity>(), 1e-8);
    }
  }
}

TEST(Projection, FastPathsMatchQpOracle) {
  Rng rng(23);
  for (int rep = 0; rep < 20; ++rep) {
    // 2x2 matrices: four unknowns.
    auto comp = make_random_completion(2, 2, 0.5, static_cast<std::uint64_t>(rep));
    auto agg = make_random_aggregates(2, 2, 0.6, static_cast<std::uint64_t>(rep));
    for (const auto* op : {&comp, &agg}) {
      Matrix truth = uniform_matrix(2, 2, rng);
      Vector b = op->apply(truth);
      Matrix w = gaussian_matrix(2, 2, rng);
      Matrix v = project_polytope(*op, b, w);
      Vector ref = oracle::polytope_qp(op->dense(), b, vec_rowmajor(w));
      EXPECT_LT((vec_rowmajor(v) - ref).cwiseAbs().maxCoeff(), 1e-8)
          << to_string(op->kind());
    }
  }
}

TEST(Projection, DykstraMatchesQpOracle) {
  Rng rng(31);
  for (int rep = 0; rep < 10; ++rep) {
    auto op = make_gaussian_sensing(2, 2, 2, static_cast<std::uint64_t>(rep));
    Matrix truth = uniform_matrix(2, 2, rng);
    Vector b = op.apply(truth);
    Matrix w = gaussian_matrix(2, 2, rng);
    ProjectionOptions opts;
    opts.tol = 1e-12;
    opts.rel_change = 1e-14;
    opts.max_iter = 200000;
    ProjectionResult r = PolytopeProjector(op, b, opts).project(w);
    Vector ref = oracle::polytope_qp(op.dense(), b, vec_rowmajor(w));
    EXPECT_LT((vec_rowmajor(r.V) - ref).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(Projection, NegativeAggregateIsInfeasible) {
  auto op = make_periodic_aggregates(4, 2, 2);
  Vector b = Vector::Ones(op.size());
  b(1) = -0.5;
  try {
    PolytopeProjector p(op, b);
    FAIL() << "expected an infeasibility error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInfeasible);
  }
}

TEST(Projection, PartialAggregateCoverageClampsUncovered) {
  auto op = MeasurementOperator::temporal_aggregate(4, 1, {{0, 0, 2}});
  Matrix w(4, 1);
  w << 1, 1, -2, 3;
  Matrix v = project_polytope(op, (Vector(1) << 4).finished(), w);
  EXPECT_DOUBLE_EQ(v(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(v(1, 0), 2.0);
  EXPECT_DOUBLE_EQ(v(2, 0), 0.0);
  EXPECT_DOUBLE_EQ(v(3, 0), 3.0);
}

TEST(Simplex, ProjectionIsOnSimplex) {
  Rng rng(2);
  for (int rep = 0; rep < 50; ++rep) {
    Vector v = gaussian_matrix(7, 1, rng);
    Vector p = project_simplex(v, 2.5);
    EXPECT_NEAR(p.sum(), 2.5, 1e-12);
    EXPECT_GE(p.minCoeff(), 0.0);
  }
}

TEST(Generators, PeriodicSpans) {
  auto op = make_periodic_aggregates(6, 1, 3);
  ASSERT_EQ(op.size(), 2);
  EXPECT_EQ(op.spans()[0].start, 0);
  EXPECT_EQ(op.spans()[0].length, 3);
  EXPECT_EQ(op.spans()[1].start, 3);
  EXPECT_EQ(op.spans()[1].length, 3);

  auto rem = make_periodic_aggregates(7, 1, 3);
  ASSERT_EQ(rem.size(), 3);
  EXPECT_EQ(rem.spans()[2].length, 1);
  EXPECT_THROW(make_periodic_aggregates(7, 1, 0), Error);
  EXPECT_THROW(make_periodic_aggregates(7, 1, 8), Error);
}

TEST(Generators, RandomAggregatesCountAndCoverage) {
  auto op = make_random_aggregates(100, 10, 0.2, 12345);
  EXPECT_GE(op.size(), 180);
  EXPECT_LE(op.size(), 220);
  Matrix count = Matrix::Zero(100, 10);
  for (const auto& s : op.spans()) count.col(s.col).segment(s.start, s.length).array() += 1;
  EXPECT_EQ(count, Matrix::Ones(100, 10));
  EXPECT_THROW(make_random_aggregates(10, 2, 0.0, 1), Error);
  EXPECT_THROW(make_random_aggregates(10, 2, 1.5, 1), Error);
}

TEST(Generators, RandomCompletionIsDeterministicAndUnique) {
  auto a = make_random_completion(20, 15, 0.3, 7);
  auto b = make_random_completion(20, 15, 0.3, 7);
  ASSERT_EQ(a.size(), b.size());
  std::set<std::pair<Index, Index>> seen;
  for (Index i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a.entries()[i].row, b.entries()[i].row);
    EXPECT_EQ(a.entries()[i].col, b.entries()[i].col);
    seen.insert({a.entries()[i].row, a.entries()[i].col});
  }
  EXPECT_EQ(static_cast<Index>(seen.size()), a.size());
}

TEST(Coverage, MarksMeasuredCells) {
  auto op = MeasurementOperator::temporal_aggregate(4, 2, {{1, 1, 2}});
  auto cov = op.coverage();
  EXPECT_FALSE(cov(0, 1));
  EXPECT_TRUE(cov(1, 1));
  EXPECT_TRUE(cov(2, 1));
  EXPECT_FALSE(cov(0, 0));
  EXPECT_TRUE(MeasurementOperator::complete(2, 2).coverage().all());
}

}  // namespace
}  // namespace halsx
