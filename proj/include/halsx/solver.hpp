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

#ifndef HALSX_SOLVER_HPP_
#define HALSX_SOLVER_HPP_

#include <chrono>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "halsx/common.hpp"
#include "halsx/linkmodels.hpp"
#include "halsx/operators.hpp"

namespace halsx {

struct SolverConfig {
  Index rank = 1;
  int max_iter = 200;
  double kkt_epsilon = 1e-4;
  ProjectionOptions projection;
  double eps_col_factor = 1e-16;  // degenerate columns become this * mean|V|
  LinkOptions row_link;
  LinkOptions col_link;
  std::uint64_t seed = 0;
  // Reject a link update whose ramped column would raise the block
  // objective. Only matters for families whose fit is not the exact block
  // minimiser (reduced linear designs, penalised splines, ridge kernels).
  bool monotone_safeguard = true;
  bool record_block_objectives = false;
  // Passes over one side's k columns before switching sides. 1 is the plain
  // alternation; more passes bring each side closer to its block optimum.
  int inner_passes = 1;
  // HALSX2 only.
  double max_seconds = 300.0;
  int divergence_window = 5;
  // Optional starting factors (n1 x k, n2 x k); drawn from the seed if absent.
  std::optional<Matrix> init_row;
  std::optional<Matrix> init_col;
};

enum class StopReason { kConverged, kMaxIter, kDiverged, kTimeLimit };

inline const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::kConverged: return "converged";
    case StopReason::kMaxIter: return "max_iter";
    case StopReason::kDiverged: return "diverged";
    case StopReason::kTimeLimit: return "time_limit";
  }
  return "unknown";
}

struct TraceRow {
  int iter = 0;
  double objective = 0.0;
  double kkt = 0.0;
  double seconds = 0.0;  // wall time of the iteration that produced this row
};

struct FactorModel {
  Matrix F_r, F_c;
  Matrix V;  // empty for HALSX2
  std::vector<LinkModel> row_links, col_links;
  Index rank = 0;
  std::vector<TraceRow> trace;
  std::vector<double> block_objectives;  // filled when requested
  StopReason stop = StopReason::kMaxIter;
  int iterations = 0;
  double kkt_initial = 0.0;
  double seconds = 0.0;

  Matrix product() const { return F_r * F_c.transpose(); }
};

// ---------------------------------------------------------------------------
// KKT residual.

/// Norm of the stacked first-order vector for
/// min ||V - F_r F_c^T||^2 over nonnegative link outputs:
///   [ (V - F_r F_c^T)_- ; (V - F_r F_c^T) o V ;
///     D_c^T ((E^T F_r) o 1{F_c > 0}) ; D_r^T ((E F_c) o 1{F_r > 0}) ]
/// where D is the Jacobian of a side's fitted values in its parameters
/// (I for identity features, X for linear, spline design, kernel Gram).
inline double kkt_residual(const Matrix& v, const Matrix& f_r, const Matrix& f_c,
                           const LinkFitter& row, const LinkFitter& col) {
  const Matrix e = v - f_r * f_c.transpose();
  double sq = negative_part(e).squaredNorm() + e.cwiseProduct(v).squaredNorm();
  const Matrix g_r = e * f_c;
  const Matrix g_c = e.transpose() * f_r;
  for (Index i = 0; i < f_r.cols(); ++i) {
    const Vector masked_r =
        (f_r.col(i).array() > 0.0).select(g_r.col(i), 0.0);
    const Vector masked_c =
        (f_c.col(i).array() > 0.0).select(g_c.col(i), 0.0);
    sq += row.design_transpose_times(masked_r).squaredNorm();
    sq += col.design_transpose_times(masked_c).squaredNorm();
  }
  return std::sqrt(sq);
}

/// Identity or linear features on both sides.
inline double kkt_residual(const Matrix& v, const Matrix& f_r, const Matrix& f_c,
                           const Features& x_r, const Features& x_c) {
  auto side = [](const Features& x) -> std::unique_ptr<LinkFitter> {
    if (x.identity) return std::make_unique<IdentityFitter>(x.rows());
    return std::make_unique<LinearFitter>(x.X);
  };
  return kkt_residual(v, f_r, f_c, *side(x_r), *side(x_c));
}

// ---------------------------------------------------------------------------
// Shared helpers for both solvers.

namespace detail {

/// Least-squares mean level implied by the measurements: the constant c
/// minimising sum_i (b_i - c <A_i, 1>)^2.
inline double measurement_mean(const MeasurementOperator& op, const Vector& b) {
  const Vector s = op.mask_sums();
  const double den = s.squaredNorm();
  if (den <= 0.0) return 1.0;
  const double m = s.dot(b) / den;
  return m > 0.0 ? m : 1.0;
}

inline std::pair<Matrix, Matrix> initial_factors(const MeasurementOperator& op,
                                                 const Vector& b,
                                                 const SolverConfig& cfg) {
  const Index k = cfg.rank;
  Matrix f_r, f_c;
  if (cfg.init_row && cfg.init_col) {
    f_r = *cfg.init_row;
    f_c = *cfg.init_col;
    require(f_r.rows() == op.rows() && f_r.cols() == k && f_c.rows() == op.cols() &&
                f_c.cols() == k,
            ErrorCode::kBadInput, "initial factors have the wrong shape");
    require(f_r.minCoeff() >= 0.0 && f_c.minCoeff() >= 0.0, ErrorCode::kBadInput,
            "initial factors must be nonnegative");
    return {f_r, f_c};
  }
  Rng rng(cfg.seed);
  f_r = uniform_matrix(op.rows(), k, rng);
  f_c = uniform_matrix(op.cols(), k, rng);
  const double current = (f_r * f_c.transpose()).mean();
  const double scale = std::sqrt(measurement_mean(op, b) / current);
  return {f_r * scale, f_c * scale};
}

inline void check_config(const MeasurementOperator& op, const FeatureSet& features,
                         const SolverConfig& cfg) {
  require(cfg.rank >= 1, ErrorCode::kBadInput, "rank must be >= 1");
  require(cfg.max_iter >= 0, ErrorCode::kBadInput, "max_iter must be >= 0");
  require(cfg.kkt_epsilon > 0.0 && cfg.projection.tol > 0.0, ErrorCode::kBadInput,
          "tolerances must be positive");
  require(features.row.rows() == op.rows(), ErrorCode::kBadInput,
          "row features have " + std::to_string(features.row.rows()) +
              " rows, operator has " + std::to_string(op.rows()));
  require(features.col.rows() == op.cols(), ErrorCode::kBadInput,
          "column features have " + std::to_string(features.col.rows()) +
              " rows, operator has " + std::to_string(op.cols()));
}

inline LinkModel fit_with_context(const LinkFitter& fitter, const Vector& target,
                                  double weight, const char* side, Index column,
                                  int iter) {
  try {
    return fitter.fit(target, weight);
  } catch (const Error& e) {
    throw Error(e.code(), std::string(side) + " link fit failed for column " +
                              std::to_string(column) + " at iteration " +
                              std::to_string(iter) + ": " + e.what());
  }
}

/// Fits links to the starting columns so F = (f(X))_+ holds from the start.
inline void initialise_links(Matrix& f, std::vector<LinkModel>& links,
                             const LinkFitter& fitter, const Features& features,
                             double eps_col, const char* side) {
  links.clear();
  for (Index i = 0; i < f.cols(); ++i) {
    LinkModel m = fit_with_context(fitter, f.col(i), 1.0, side, i, 0);
    Vector col = m.evaluate(features);
    if (col.maxCoeff() <= 0.0) col.setConstant(eps_col);
    f.col(i) = col;
    links.push_back(std::move(m));
  }
}

}  // namespace detail

/// One Gauss-Seidel column step on the residual R = V - F_r F_c^T.
///
/// `own` is the factor being updated (F_r for the row pass, F_c for the
/// column pass) and `partner` the other one. On return R again equals the
/// residual for the updated factors.
struct ColumnUpdate {
  bool degenerate = false;
  bool rejected = false;  // safeguard kept the previous column
};

inline ColumnUpdate update_column(Matrix& r, Matrix& own, const Matrix& partner,
                                  Index i, bool column_side, const LinkFitter& fitter,
                                  const Features& features,
                                  std::vector<LinkModel>& links, double eps_col,
                                  bool safeguard, int iter) {
  ColumnUpdate out;
  const Vector g = partner.col(i);
  if (column_side)
    r.noalias() += g * own.col(i).transpose();
  else
    r.noalias() += own.col(i) * g.transpose();

  auto sub = column_side ? reduce_subproblem_transposed(r, g) : reduce_subproblem(r, g);
  if (!sub) {
    own.col(i).setConstant(eps_col);
    out.degenerate = true;
  } else {
    LinkModel model = detail::fit_with_context(
        fitter, sub->target, sub->weight, column_side ? "column" : "row", i, iter);
    Vector cand = model.evaluate(features);
    if (cand.maxCoeff() <= 0.0) {
      cand.setConstant(eps_col);
      out.degenerate = true;
    }
    if (safeguard && fitter.family() != LinkFamily::kIdentity &&
        (sub->target - cand).squaredNorm() >
            (sub->target - own.col(i)).squaredNorm()) {
      out.rejected = true;
    } else {
      own.col(i) = cand;
      links[static_cast<size_t>(i)] = std::move(model);
    }
  }

  if (column_side)
    r.noalias() -= g * own.col(i).transpose();
  else
    r.noalias() -= own.col(i) * g.transpose();
  return out;
}

/// HALSX: alternate the slack projection with hierarchical link refits.
inline FactorModel fit(const MeasurementOperator& op, const Vector& b,
                       const FeatureSet& features, const SolverConfig& cfg) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  detail::check_config(op, features, cfg);
  PolytopeProjector projector(op, b, cfg.projection);
  const bool exact_projection =
      op.kind() != MaskKind::kGaussianSensing && op.kind() != MaskKind::kRankOne;

  const auto row_fitter = make_link_fitter(features.row, cfg.row_link);
  const auto col_fitter = make_link_fitter(features.col, cfg.col_link);

  FactorModel model;
  model.rank = cfg.rank;
  std::tie(model.F_r, model.F_c) = detail::initial_factors(op, b, cfg);
  const double eps_init = cfg.eps_col_factor * detail::measurement_mean(op, b);
  detail::initialise_links(model.F_r, model.row_links, *row_fitter, features.row,
                           eps_init, "row");
  detail::initialise_links(model.F_c, model.col_links, *col_fitter, features.col,
                           eps_init, "column");

  auto project = [&](const Matrix& w) {
    ProjectionResult p = projector.project(w);
    require(p.converged, ErrorCode::kInfeasible,
            "polytope projection did not reach tolerance (residual " +
                std::to_string(p.residual) +
                "); the measurements may be infeasible");
    return std::move(p.V);
  };

  model.V = project(model.product());
  for (int iter = 0;; ++iter) {
    const auto iter_start = Clock::now();
    Matrix r = model.V - model.product();
    const double objective = r.squaredNorm();
    const double kkt =
        kkt_residual(model.V, model.F_r, model.F_c, *row_fitter, *col_fitter);
    if (iter == 0) model.kkt_initial = kkt;
    if (cfg.record_block_objectives) model.block_objectives.push_back(objective);
    model.trace.push_back({iter, objective, kkt,
                           std::chrono::duration<double>(Clock::now() - iter_start).count()});
    model.iterations = iter;
    if (kkt <= cfg.kkt_epsilon * model.kkt_initial && (iter > 0 || kkt == 0.0)) {
      model.stop = StopReason::kConverged;
      break;
    }
    if (iter == cfg.max_iter) {
      model.stop = StopReason::kMaxIter;
      break;
    }

    const double eps_col = cfg.eps_col_factor * model.V.cwiseAbs().mean();
    for (int side = 0; side < 2; ++side) {
      const bool column_side = side == 1;
      Matrix& own = column_side ? model.F_c : model.F_r;
      const Matrix& partner = column_side ? model.F_r : model.F_c;
      for (int pass = 0; pass < cfg.inner_passes; ++pass)
      for (Index i = 0; i < cfg.rank; ++i) {
        update_column(r, own, partner, i, column_side,
                      column_side ? *col_fitter : *row_fitter,
                      column_side ? features.col : features.row,
                      column_side ? model.col_links : model.row_links, eps_col,
                      cfg.monotone_safeguard, iter);
        if (cfg.record_block_objectives) model.block_objectives.push_back(r.squaredNorm());
      }
    }

    const Matrix fit_now = model.product();
    Matrix v_new = project(fit_now);
    // Dykstra is iterative; keep the previous slack if it is not improved.
    if (exact_projection || !cfg.monotone_safeguard ||
        (v_new - fit_now).squaredNorm() <= (model.V - fit_now).squaredNorm())
      model.V = std::move(v_new);
    model.trace.back().seconds =
        std::chrono::duration<double>(Clock::now() - iter_start).count();
  }
  model.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return model;
}

/// Plain HALS: identity features on both sides.
inline FactorModel fit_hals(const MeasurementOperator& op, const Vector& b,
                            SolverConfig cfg) {
  cfg.row_link.family = LinkFamily::kIdentity;
  cfg.col_link.family = LinkFamily::kIdentity;
  return fit(op, b,
             FeatureSet{Features::identity_of(op.rows()), Features::identity_of(op.cols())},
             cfg);
}

// ---------------------------------------------------------------------------
// Prediction.

inline Matrix evaluate_links(const std::vector<LinkModel>& links, const Matrix& x) {
  Matrix out(x.rows(), static_cast<Index>(links.size()));
  for (size_t i = 0; i < links.size(); ++i)
    out.col(static_cast<Index>(i)) = links[i].evaluate(x);
  return out;
}

struct Prediction {
  std::optional<Matrix> row_block;     // new rows x training columns
  std::optional<Matrix> col_block;     // training rows x new columns
  std::optional<Matrix> rowcol_block;  // new rows x new columns
};

inline Prediction predict(const FactorModel& model, const std::optional<Matrix>& x_r_new,
                          const std::optional<Matrix>& x_c_new) {
  require(x_r_new.has_value() || x_c_new.has_value(), ErrorCode::kBadInput,
          "predict needs new row features, new column features, or both");
  Prediction out;
  std::optional<Matrix> g_r, g_c;
  if (x_r_new) {
    g_r = evaluate_links(model.row_links, *x_r_new);
    out.row_block = *g_r * model.F_c.transpose();
  }
  if (x_c_new) {
    g_c = evaluate_links(model.col_links, *x_c_new);
    out.col_block = model.F_r * g_c->transpose();
  }
  if (g_r && g_c) out.rowcol_block = *g_r * g_c->transpose();
  return out;
}

}  // namespace halsx

#endif  // HALSX_SOLVER_HPP_
