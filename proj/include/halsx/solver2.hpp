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

#ifndef HALSX_SOLVER2_HPP_
#define HALSX_SOLVER2_HPP_

#include <chrono>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "halsx/common.hpp"
#include "halsx/linkmodels.hpp"
#include "halsx/operators.hpp"
#include "halsx/solver.hpp"

namespace halsx {

struct NormalSystem {
  Matrix gram;  // symmetric PSD
  Vector rhs;
};

/// Normal equations of min_f ||res - A(f g^T)||^2 (row side) or
/// min_f ||res - A(g f^T)||^2 (column side):
///   gram = sum_i a_i a_i^T,  rhs = sum_i res_i a_i,
/// with a_i = A_i g or A_i^T g. With numeric features the system is taken in
/// coefficient space, a_i -> X^T a_i.
///
/// Every measurement contributes a dense rank-one update, so one call costs
/// O(N n^2) whatever the mask sparsity.
inline NormalSystem build_normal_system(const MeasurementOperator& op, const Vector& g,
                                        const Vector& res, bool column_side,
                                        const Matrix* x = nullptr) {
  require(res.size() == op.size(), ErrorCode::kBadInput,
          "residual length does not match operator");
  const Index n = column_side ? op.cols() : op.rows();
  require(g.size() == (column_side ? op.rows() : op.cols()), ErrorCode::kBadInput,
          "partner factor length does not match operator");
  Matrix gram = Matrix::Zero(n, n);
  Vector rhs = Vector::Zero(n);
  for (Index i = 0; i < op.size(); ++i) {
    const Vector a = column_side ? op.mask_transpose_times(i, g) : op.mask_times(i, g);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(a);
    rhs.noalias() += res(i) * a;
  }
  gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
  if (x == nullptr) return {std::move(gram), std::move(rhs)};
  require(x->rows() == n, ErrorCode::kBadInput, "feature rows do not match operator");
  return {x->transpose() * gram * *x, x->transpose() * rhs};
}

/// Minimum-norm solution of gram * f = rhs via the generalised inverse;
/// eigenvalues below 1e-12 * the largest are treated as zero.
inline Vector solve_update(const Matrix& gram, const Vector& rhs) {
  require(gram.rows() == gram.cols() && gram.rows() == rhs.size(), ErrorCode::kBadInput,
          "solve_update: shape mismatch");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
  const Vector& lam = eig.eigenvalues();
  const double cutoff = 1e-12 * std::max(lam.cwiseAbs().maxCoeff(), 0.0);
  const Vector proj = eig.eigenvectors().transpose() * rhs;
  Vector scaled = Vector::Zero(proj.size());
  for (Index i = 0; i < lam.size(); ++i)
    if (lam(i) > cutoff && lam(i) > 0.0) scaled(i) = proj(i) / lam(i);
  return eig.eigenvectors() * scaled;
}

/// First-order vector of ||b - A(F_r F_c^T)||^2 restricted to the active
/// (positive) entries and mapped to parameter space, stacked over both sides.
inline double sampling_kkt_residual(const MeasurementOperator& op, const Vector& res,
                                    const Matrix& f_r, const Matrix& f_c,
                                    const Features& x_r, const Features& x_c) {
  const Matrix adj = op.adjoint(res);
  const Matrix g_r = adj * f_c;
  const Matrix g_c = adj.transpose() * f_r;
  double sq = 0.0;
  for (Index i = 0; i < f_r.cols(); ++i) {
    const Vector m_r = (f_r.col(i).array() > 0.0).select(g_r.col(i), 0.0);
    const Vector m_c = (f_c.col(i).array() > 0.0).select(g_c.col(i), 0.0);
    sq += x_r.identity ? m_r.squaredNorm() : (x_r.X.transpose() * m_r).squaredNorm();
    sq += x_c.identity ? m_c.squaredNorm() : (x_c.X.transpose() * m_c).squaredNorm();
  }
  return std::sqrt(sq);
}

/// HALSX2: hierarchical updates on the sampling error
/// ||b - A((f_r(X_r))_+ (f_c(X_c))_+^T)||^2, no slack matrix.
inline FactorModel fit2(const MeasurementOperator& op, const Vector& b,
                        const FeatureSet& features, const SolverConfig& cfg) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  detail::check_config(op, features, cfg);
  require(b.size() == op.size(), ErrorCode::kBadInput,
          "measurement vector length does not match operator");
  for (const LinkOptions* lo : {&cfg.row_link, &cfg.col_link})
    require(lo->family == LinkFamily::kIdentity || lo->family == LinkFamily::kLinear,
            ErrorCode::kUnsupported,
            std::string("HALSX2 supports identity and linear links only, got ") +
                to_string(lo->family));
  for (const Features* f : {&features.row, &features.col})
    if (!f->identity)
      require(full_column_rank(f->X, 1e-10), ErrorCode::kRankDeficient,
              "linear link needs full-column-rank features (" +
                  shape_str(f->X.rows(), f->X.cols()) + ")");

  const auto row_fitter = make_link_fitter(features.row, cfg.row_link);
  const auto col_fitter = make_link_fitter(features.col, cfg.col_link);

  FactorModel model;
  model.rank = cfg.rank;
  std::tie(model.F_r, model.F_c) = detail::initial_factors(op, b, cfg);
  const double level = detail::measurement_mean(op, b);
  const double eps_col = cfg.eps_col_factor * level;
  detail::initialise_links(model.F_r, model.row_links, *row_fitter, features.row,
                           eps_col, "row");
  detail::initialise_links(model.F_c, model.col_links, *col_fitter, features.col,
                           eps_col, "column");

  int increases = 0;
  for (int iter = 0;; ++iter) {
    const auto iter_start = Clock::now();
    Vector res = b - op.apply(model.product());
    const double objective = res.squaredNorm();
    const double kkt = sampling_kkt_residual(op, res, model.F_r, model.F_c,
                                             features.row, features.col);
    if (iter == 0) model.kkt_initial = kkt;
    if (iter > 0) {
      increases = objective > model.trace.back().objective ? increases + 1 : 0;
    }
    if (cfg.record_block_objectives) model.block_objectives.push_back(objective);
    model.trace.push_back({iter, objective, kkt, 0.0});
    model.iterations = iter;
    const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
    if (kkt <= cfg.kkt_epsilon * model.kkt_initial && (iter > 0 || kkt == 0.0)) {
      model.stop = StopReason::kConverged;
      break;
    }
    if (increases >= cfg.divergence_window) {
      model.stop = StopReason::kDiverged;
      break;
    }
    if (iter == cfg.max_iter) {
      model.stop = StopReason::kMaxIter;
      break;
    }
    if (elapsed >= cfg.max_seconds) {
      model.stop = StopReason::kTimeLimit;
      break;
    }

    for (int side = 0; side < 2; ++side) {
      const bool column_side = side == 1;
      Matrix& own = column_side ? model.F_c : model.F_r;
      const Matrix& partner = column_side ? model.F_r : model.F_c;
      const Features& feats = column_side ? features.col : features.row;
      std::vector<LinkModel>& links = column_side ? model.col_links : model.row_links;
      for (Index i = 0; i < cfg.rank; ++i) {
        const Vector g = partner.col(i);
        auto outer = [&](const Vector& f) {
          return column_side ? op.apply_outer(g, f) : op.apply_outer(f, g);
        };
        res += outer(own.col(i));
        if (g.squaredNorm() <= 0.0) {
          own.col(i).setConstant(eps_col);
        } else {
          const NormalSystem sys = build_normal_system(
              op, g, res, column_side, feats.identity ? nullptr : &feats.X);
          const Vector coef = solve_update(sys.gram, sys.rhs);
          LinkModel link = feats.identity ? LinkModel(IdentityLink{coef})
                                          : LinkModel(LinearLink{coef});
          Vector col = link.evaluate(feats);
          if (col.maxCoeff() <= 0.0) col.setConstant(eps_col);
          own.col(i) = col;
          links[static_cast<size_t>(i)] = std::move(link);
        }
        res -= outer(own.col(i));
        if (cfg.record_block_objectives) model.block_objectives.push_back(res.squaredNorm());
      }
    }
    model.trace.back().seconds =
        std::chrono::duration<double>(Clock::now() - iter_start).count();
  }
  model.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return model;
}

}  // namespace halsx

#endif  // HALSX_SOLVER2_HPP_
