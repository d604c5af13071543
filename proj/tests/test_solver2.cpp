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

#include "halsx/solver.hpp"
#include "halsx/solver2.hpp"

namespace halsx {
namespace {

TEST(NormalSystem, CompleteMaskGivesScaledIdentity) {
  Rng rng(1);
  const Vector g = uniform_matrix(4, 1, rng);
  const Matrix b = gaussian_matrix(5, 4, rng);
  const auto op = MeasurementOperator::complete(5, 4);
  const NormalSystem sys = build_normal_system(op, g, op.apply(b), false);
  EXPECT_LT((sys.gram - g.squaredNorm() * Matrix::Identity(5, 5)).cwiseAbs().maxCoeff(),
            1e-12);
  EXPECT_LT((sys.rhs - b * g).cwiseAbs().maxCoeff(), 1e-12);
  // The solve is then the HALS update b g / ||g||^2.
  const Vector f = solve_update(sys.gram, sys.rhs);
  EXPECT_LT((f - b * g / g.squaredNorm()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(NormalSystem, SingleMeasurementHasRankAtMostOne) {
  Rng rng(2);
  const auto op = make_gaussian_sensing(4, 3, 1, 5);
  const Vector g = uniform_matrix(3, 1, rng);
  const NormalSystem sys = build_normal_system(op, g, Vector::Ones(1), false);
  Eigen::JacobiSVD<Matrix> svd(sys.gram);
  const Vector s = svd.singularValues();
  EXPECT_LT(s(1), 1e-12 * std::max(1.0, s(0)));
}

TEST(NormalSystem, MatchesExplicitMaskSums) {
  Rng rng(3);
  std::vector<Matrix> masks;
  for (int i = 0; i < 6; ++i) masks.push_back(gaussian_matrix(4, 3, rng));
  const auto op = MeasurementOperator::gaussian_sensing(4, 3, masks);
  const Vector res = gaussian_matrix(6, 1, rng);
  const Vector g_c = uniform_matrix(3, 1, rng);
  const Vector g_r = uniform_matrix(4, 1, rng);
  const Matrix x = gaussian_matrix(4, 2, rng);

  Matrix gram_r = Matrix::Zero(4, 4), gram_c = Matrix::Zero(3, 3);
  Vector rhs_r = Vector::Zero(4), rhs_c = Vector::Zero(3);
  for (int i = 0; i < 6; ++i) {
    const Vector a = masks[i] * g_c;
    const Vector c = masks[i].transpose() * g_r;
    gram_r += a * a.transpose();
    rhs_r += res(i) * a;
    gram_c += c * c.transpose();
    rhs_c += res(i) * c;
  }
  const NormalSystem row = build_normal_system(op, g_c, res, false);
  const NormalSystem col = build_normal_system(op, g_r, res, true);
  EXPECT_LT((row.gram - gram_r).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((row.rhs - rhs_r).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((col.gram - gram_c).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((col.rhs - rhs_c).cwiseAbs().maxCoeff(), 1e-12);

  const NormalSystem feat = build_normal_system(op, g_c, res, false, &x);
  Matrix gram_x = Matrix::Zero(2, 2);
  Vector rhs_x = Vector::Zero(2);
  for (int i = 0; i < 6; ++i) {
    const Vector a = x.transpose() * (masks[i] * g_c);
    gram_x += a * a.transpose();
    rhs_x += res(i) * a;
  }
  EXPECT_LT((feat.gram - gram_x).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((feat.rhs - rhs_x).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SolveUpdate, IdentityReturnsRhs) {
  const Vector rhs = Vector::LinSpaced(4, 1.0, 4.0);
  EXPECT_LT((solve_update(Matrix::Identity(4, 4), rhs) - rhs).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(SolveUpdate, SingularUsesMinimumNorm) {
  Matrix gram = Matrix::Zero(2, 2);
  gram(0, 0) = 2.0;
  const Vector f = solve_update(gram, Eigen::Vector2d(4.0, 0.0));
  EXPECT_NEAR(f(0), 2.0, 1e-15);
  EXPECT_EQ(f(1), 0.0);
}

TEST(SolveUpdate, MatchesDenseSolverOnPositiveDefinite) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    const Matrix a = gaussian_matrix(5, 5, rng);
    const Matrix gram = a * a.transpose() + 0.1 * Matrix::Identity(5, 5);
    const Vector rhs = gaussian_matrix(5, 1, rng);
    const Vector ref = gram.fullPivLu().solve(rhs);
    EXPECT_LT((solve_update(gram, rhs) - ref).norm(), 1e-10 * ref.norm());
  }
}

TEST(Fit2, UnrampedUpdateIsStationary) {
  Rng rng(4);
  const auto op = make_random_completion(6, 5, 0.7, 2);
  const Vector res = gaussian_matrix(op.size(), 1, rng);
  const Vector g = uniform_matrix(5, 1, rng, 0.5, 1.0);
  const NormalSystem sys = build_normal_system(op, g, res, false);
  const Vector f = solve_update(sys.gram, sys.rhs);
  // A*[A(f g^T) - res] g vanishes on rows that carry measurements.
  const Vector grad = op.adjoint(op.apply_outer(f, g) - res) * g;
  EXPECT_LT(grad.cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Fit2, CoincidesWithFitUnderCompleteObservation) {
  Rng rng(5);
  const Matrix v = uniform_matrix(8, 2, rng) * uniform_matrix(6, 2, rng).transpose() +
                   0.05 * uniform_matrix(8, 6, rng);
  const auto op = MeasurementOperator::complete(8, 6);
  const Vector b = op.apply(v);
  const Matrix x_r = uniform_matrix(8, 3, rng);
  for (bool features : {false, true}) {
    SolverConfig cfg;
    cfg.rank = 2;
    cfg.max_iter = 40;
    cfg.kkt_epsilon = 1e-300;
    cfg.seed = 9;
    FeatureSet fs{Features::identity_of(8), Features::identity_of(6)};
    if (features) {
      fs.row = Features::numeric(x_r);
      cfg.row_link.family = LinkFamily::kLinear;
      // The safeguard has no counterpart in HALSX2.
      cfg.monotone_safeguard = false;
    }
    const FactorModel a = fit(op, b, fs, cfg);
    const FactorModel c = fit2(op, b, fs, cfg);
    ASSERT_EQ(a.trace.size(), c.trace.size());
    for (size_t t = 0; t < a.trace.size(); ++t)
      EXPECT_NEAR(a.trace[t].objective, c.trace[t].objective,
                  1e-10 * std::max(1.0, a.trace[t].objective))
          << (features ? "linear" : "identity") << " iteration " << t;
    EXPECT_LT((a.F_r - c.F_r).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(Fit2, RankOneCompletionDrivesResidualToZero) {
  Rng rng(6);
  const Matrix truth = uniform_matrix(10, 1, rng, 0.5, 1.5) *
                       uniform_matrix(9, 1, rng, 0.5, 1.5).transpose();
  const auto op = make_random_completion(10, 9, 0.8, 3);
  const Vector b = op.apply(truth);
  SolverConfig cfg;
  cfg.rank = 1;
  cfg.max_iter = 500;
  cfg.kkt_epsilon = 1e-14;
  const FactorModel m =
      fit2(op, b, {Features::identity_of(10), Features::identity_of(9)}, cfg);
  EXPECT_LT((b - op.apply(m.product())).norm(), 1e-6);
  EXPECT_TRUE(m.V.size() == 0);
}

TEST(Fit2, TimeLimitStopsTheRun) {
  Rng rng(7);
  const Matrix v = uniform_matrix(6, 5, rng);
  const auto op = MeasurementOperator::complete(6, 5);
  SolverConfig cfg;
  cfg.max_seconds = 0.0;
  const FactorModel m =
      fit2(op, op.apply(v), {Features::identity_of(6), Features::identity_of(5)}, cfg);
  EXPECT_EQ(m.stop, StopReason::kTimeLimit);
  EXPECT_EQ(m.iterations, 0);
}

TEST(Fit2, TraceRecordsWallTime) {
  Rng rng(8);
  const Matrix v = uniform_matrix(6, 5, rng);
  const auto op = MeasurementOperator::complete(6, 5);
  SolverConfig cfg;
  cfg.max_iter = 5;
  cfg.kkt_epsilon = 1e-300;
  const FactorModel m =
      fit2(op, op.apply(v), {Features::identity_of(6), Features::identity_of(5)}, cfg);
  for (size_t t = 0; t + 1 < m.trace.size(); ++t) EXPECT_GT(m.trace[t].seconds, 0.0);
}

TEST(Fit2, RejectsNonlinearFamilies) {
  const auto op = MeasurementOperator::complete(6, 5);
  Rng rng(9);
  SolverConfig cfg;
  cfg.row_link.family = LinkFamily::kSpline;
  try {
    fit2(op, Vector::Ones(30),
         {Features::numeric(gaussian_matrix(6, 1, rng)), Features::identity_of(5)}, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnsupported);
  }
}

TEST(Fit2, RejectsRankDeficientFeatures) {
  const auto op = MeasurementOperator::complete(6, 5);
  Matrix x = Matrix::Ones(6, 2);
  SolverConfig cfg;
  cfg.row_link.family = LinkFamily::kLinear;
  try {
    fit2(op, Vector::Ones(30), {Features::numeric(x), Features::identity_of(5)}, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kRankDeficient);
  }
}

}  // namespace
}  // namespace halsx
