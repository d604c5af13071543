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

#ifndef HALSX_OPERATORS_HPP_
#define HALSX_OPERATORS_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "halsx/common.hpp"

namespace halsx {

enum class MaskKind {
  kComplete,
  kCompletion,
  kGaussianSensing,
  kRankOne,
  kTemporalAggregate,
};

inline const char* to_string(MaskKind kind) {
  switch (kind) {
    case MaskKind::kComplete: return "complete";
    case MaskKind::kCompletion: return "completion";
    case MaskKind::kGaussianSensing: return "gaussian_sensing";
    case MaskKind::kRankOne: return "rank_one";
    case MaskKind::kTemporalAggregate: return "temporal_aggregate";
  }
  return "unknown";
}

inline MaskKind mask_kind_from_string(const std::string& s) {
  for (MaskKind k : {MaskKind::kComplete, MaskKind::kCompletion,
                     MaskKind::kGaussianSensing, MaskKind::kRankOne,
                     MaskKind::kTemporalAggregate})
    if (s == to_string(k)) return k;
  throw Error(ErrorCode::kBadInput, "unknown mask kind '" + s + "'");
}

struct Entry {
  Index row = 0;
  Index col = 0;
  bool operator<(const Entry& o) const {
    return row != o.row ? row < o.row : col < o.col;
  }
};

/// A temporal aggregate: sum of column `col` over rows [start, start+length).
struct AggregateSpan {
  Index col = 0;
  Index start = 0;
  Index length = 1;
};

/// Linear measurement operator A : R^{n1 x n2} -> R^N, stored in the
/// compact form of its mask family. Immutable after construction.
///
/// Measurement i is <M, A_i>. For the complete family the masks are ordered
/// row-major, so measurement r * n2 + c reads entry (r, c). Gaussian masks
/// are kept as one N x (n1 n2) matrix whose rows are row-major vectorized
/// masks; rank-one masks keep only their two factor vectors.
class MeasurementOperator {
 public:
  static MeasurementOperator complete(Index n1, Index n2) {
    check_dims(n1, n2);
    return MeasurementOperator(MaskKind::kComplete, n1, n2, n1 * n2,
                               CompletePayload{});
  }

  static MeasurementOperator completion(Index n1, Index n2,
                                        std::vector<Entry> entries) {
    check_dims(n1, n2);
    std::set<Entry> seen;
    for (const Entry& e : entries) {
      require(e.row >= 0 && e.row < n1 && e.col >= 0 && e.col < n2,
              ErrorCode::kBadInput,
              "completion entry (" + std::to_string(e.row) + "," +
                  std::to_string(e.col) + ") out of bounds");
      require(seen.insert(e).second, ErrorCode::kBadInput,
              "duplicate completion entry (" + std::to_string(e.row) + "," +
                  std::to_string(e.col) + ")");
    }
    const Index n = static_cast<Index>(entries.size());
    return MeasurementOperator(MaskKind::kCompletion, n1, n2, n,
                               CompletionPayload{std::move(entries)});
  }

  /// `flat` is N x (n1 n2); row i is the row-major vectorization of A_i.
  static MeasurementOperator gaussian_sensing(Index n1, Index n2, Matrix flat) {
    check_dims(n1, n2);
    require(flat.cols() == n1 * n2, ErrorCode::kBadInput,
            "sensing masks must have n1*n2 = " + std::to_string(n1 * n2) +
                " columns");
    const Index n = flat.rows();
    return MeasurementOperator(MaskKind::kGaussianSensing, n1, n2, n,
                               SensingPayload{std::move(flat)});
  }

  static MeasurementOperator gaussian_sensing(Index n1, Index n2,
                                              const std::vector<Matrix>& masks) {
    Matrix flat(static_cast<Index>(masks.size()), n1 * n2);
    for (size_t i = 0; i < masks.size(); ++i) {
      require(masks[i].rows() == n1 && masks[i].cols() == n2,
              ErrorCode::kBadInput, "sensing mask has wrong shape");
      flat.row(static_cast<Index>(i)) = vec_rowmajor(masks[i]).transpose();
    }
    return gaussian_sensing(n1, n2, std::move(flat));
  }

  /// Row i of `alphas` (N x n1) and `betas` (N x n2) define A_i = a_i b_i^T.
  static MeasurementOperator rank_one(Index n1, Index n2, Matrix alphas,
                                      Matrix betas) {
    check_dims(n1, n2);
    require(alphas.cols() == n1 && betas.cols() == n2 &&
                alphas.rows() == betas.rows(),
            ErrorCode::kBadInput, "rank-one factors have inconsistent shapes");
    const Index n = alphas.rows();
    return MeasurementOperator(MaskKind::kRankOne, n1, n2, n,
                               RankOnePayload{std::move(alphas), std::move(betas)});
  }

  static MeasurementOperator temporal_aggregate(Index n1, Index n2,
                                                std::vector<AggregateSpan> spans) {
    check_dims(n1, n2);
    std::vector<std::vector<std::pair<Index, Index>>> by_col(
        static_cast<size_t>(n2));
    for (const AggregateSpan& s : spans) {
      require(s.col >= 0 && s.col < n2, ErrorCode::kBadInput,
              "aggregate column out of bounds");
      require(s.start >= 0 && s.length >= 1 && s.start + s.length <= n1,
              ErrorCode::kBadInput,
              "aggregate span [" + std::to_string(s.start) + ", " +
                  std::to_string(s.start + s.length) + ") invalid for n1 = " +
                  std::to_string(n1));
      by_col[static_cast<size_t>(s.col)].emplace_back(s.start, s.start + s.length);
    }
    for (auto& col : by_col) {
      std::sort(col.begin(), col.end());
      for (size_t i = 1; i < col.size(); ++i)
        require(col[i].first >= col[i - 1].second, ErrorCode::kBadInput,
                "aggregate spans overlap within a column");
    }
    const Index n = static_cast<Index>(spans.size());
    return MeasurementOperator(MaskKind::kTemporalAggregate, n1, n2, n,
                               AggregatePayload{std::move(spans)});
  }

  MaskKind kind() const { return kind_; }
  Index rows() const { return n1_; }
  Index cols() const { return n2_; }
  Index size() const { return n_; }

  const std::vector<Entry>& entries() const {
    return std::get<CompletionPayload>(payload_).entries;
  }
  const std::vector<AggregateSpan>& spans() const {
    return std::get<AggregatePayload>(payload_).spans;
  }
  const Matrix& sensing_masks() const {
    return std::get<SensingPayload>(payload_).flat;
  }
  const Matrix& alphas() const { return std::get<RankOnePayload>(payload_).alphas; }
  const Matrix& betas() const { return std::get<RankOnePayload>(payload_).betas; }

  Vector apply(const Matrix& m) const {
    check_matrix(m);
    Vector out(n_);
    switch (kind_) {
      case MaskKind::kComplete:
        out = vec_rowmajor(m);
        break;
      case MaskKind::kCompletion: {
        const auto& es = entries();
        for (Index i = 0; i < n_; ++i) out(i) = m(es[i].row, es[i].col);
        break;
      }
      case MaskKind::kGaussianSensing:
        out = sensing_masks() * vec_rowmajor(m);
        break;
      case MaskKind::kRankOne:
        for (Index i = 0; i < n_; ++i)
          out(i) = alphas().row(i).dot(m * betas().row(i).transpose());
        break;
      case MaskKind::kTemporalAggregate: {
        const auto& ss = spans();
        for (Index i = 0; i < n_; ++i)
          out(i) = m.col(ss[i].col).segment(ss[i].start, ss[i].length).sum();
        break;
      }
    }
    return out;
  }

  /// Sum_i b_i A_i.
  Matrix adjoint(const Vector& b) const {
    check_vector(b);
    Matrix out = Matrix::Zero(n1_, n2_);
    switch (kind_) {
      case MaskKind::kComplete:
        out = unvec_rowmajor(b, n1_, n2_);
        break;
      case MaskKind::kCompletion: {
        const auto& es = entries();
        for (Index i = 0; i < n_; ++i) out(es[i].row, es[i].col) += b(i);
        break;
      }
      case MaskKind::kGaussianSensing:
        out = unvec_rowmajor(sensing_masks().transpose() * b, n1_, n2_);
        break;
      case MaskKind::kRankOne:
        for (Index i = 0; i < n_; ++i)
          out.noalias() += b(i) * alphas().row(i).transpose() * betas().row(i);
        break;
      case MaskKind::kTemporalAggregate: {
        const auto& ss = spans();
        for (Index i = 0; i < n_; ++i)
          out.col(ss[i].col).segment(ss[i].start, ss[i].length).array() += b(i);
        break;
      }
    }
    return out;
  }

  /// Dense A_i; for tests and small oracles.
  Matrix mask(Index i) const {
    Vector e = Vector::Zero(n_);
    e(i) = 1.0;
    return adjoint(e);
  }

  /// N x (n1 n2) matrix of row-major vectorized masks.
  Matrix dense() const {
    if (kind_ == MaskKind::kGaussianSensing) return sensing_masks();
    Matrix flat(n_, n1_ * n2_);
    for (Index i = 0; i < n_; ++i) flat.row(i) = vec_rowmajor(mask(i)).transpose();
    return flat;
  }

  /// A_i g, an n1-vector.
  Vector mask_times(Index i, const Vector& g) const {
    Vector u = Vector::Zero(n1_);
    switch (kind_) {
      case MaskKind::kComplete:
        u(i / n2_) = g(i % n2_);
        break;
      case MaskKind::kCompletion: {
        const Entry& e = entries()[static_cast<size_t>(i)];
        u(e.row) = g(e.col);
        break;
      }
      case MaskKind::kGaussianSensing:
        for (Index r = 0; r < n1_; ++r)
          u(r) = sensing_masks().row(i).segment(r * n2_, n2_).dot(g);
        break;
      case MaskKind::kRankOne:
        u = alphas().row(i).transpose() * betas().row(i).dot(g);
        break;
      case MaskKind::kTemporalAggregate: {
        const AggregateSpan& s = spans()[static_cast<size_t>(i)];
        u.segment(s.start, s.length).setConstant(g(s.col));
        break;
      }
    }
    return u;
  }

  /// A_i^T f, an n2-vector.
  Vector mask_transpose_times(Index i, const Vector& f) const {
    Vector u = Vector::Zero(n2_);
    switch (kind_) {
      case MaskKind::kComplete:
        u(i % n2_) = f(i / n2_);
        break;
      case MaskKind::kCompletion: {
        const Entry& e = entries()[static_cast<size_t>(i)];
        u(e.col) = f(e.row);
        break;
      }
      case MaskKind::kGaussianSensing:
        for (Index r = 0; r < n1_; ++r)
          u.noalias() += f(r) * sensing_masks().row(i).segment(r * n2_, n2_).transpose();
        break;
      case MaskKind::kRankOne:
        u = betas().row(i).transpose() * alphas().row(i).dot(f);
        break;
      case MaskKind::kTemporalAggregate: {
        const AggregateSpan& s = spans()[static_cast<size_t>(i)];
        u(s.col) = f.segment(s.start, s.length).sum();
        break;
      }
    }
    return u;
  }

  /// A(f g^T) without forming the outer product.
  Vector apply_outer(const Vector& f, const Vector& g) const {
    require(f.size() == n1_ && g.size() == n2_, ErrorCode::kBadInput,
            "apply_outer: factor lengths do not match operator");
    Vector out(n_);
    switch (kind_) {
      case MaskKind::kComplete:
        for (Index r = 0; r < n1_; ++r)
          for (Index c = 0; c < n2_; ++c) out(r * n2_ + c) = f(r) * g(c);
        break;
      case MaskKind::kCompletion: {
        const auto& es = entries();
        for (Index i = 0; i < n_; ++i) out(i) = f(es[i].row) * g(es[i].col);
        break;
      }
      case MaskKind::kGaussianSensing:
        for (Index i = 0; i < n_; ++i) out(i) = f.dot(mask_times(i, g));
        break;
      case MaskKind::kRankOne:
        out = (alphas() * f).cwiseProduct(betas() * g);
        break;
      case MaskKind::kTemporalAggregate: {
        const auto& ss = spans();
        for (Index i = 0; i < n_; ++i)
          out(i) = g(ss[i].col) * f.segment(ss[i].start, ss[i].length).sum();
        break;
      }
    }
    return out;
  }

  /// <A_i, 1> for every i.
  Vector mask_sums() const { return apply(Matrix::Ones(n1_, n2_)); }

  /// Cells touched by at least one mask.
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> coverage() const {
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> cov(n1_, n2_);
    switch (kind_) {
      case MaskKind::kComplete:
        cov.setConstant(true);
        break;
      case MaskKind::kGaussianSensing:
        cov = unvec_rowmajor(sensing_masks().cwiseAbs().colwise().sum().transpose(),
                             n1_, n2_)
                  .array() > 0.0;
        break;
      case MaskKind::kRankOne:
        cov = (alphas().cwiseAbs().transpose() * betas().cwiseAbs()).array() > 0.0;
        break;
      case MaskKind::kCompletion:
        cov.setConstant(false);
        for (const Entry& e : entries()) cov(e.row, e.col) = true;
        break;
      case MaskKind::kTemporalAggregate:
        cov.setConstant(false);
        for (const AggregateSpan& s : spans())
          cov.col(s.col).segment(s.start, s.length).setConstant(true);
        break;
    }
    return cov;
  }

 private:
  struct CompletePayload {};
  struct CompletionPayload { std::vector<Entry> entries; };
  struct SensingPayload { Matrix flat; };
  struct RankOnePayload { Matrix alphas, betas; };
  struct AggregatePayload { std::vector<AggregateSpan> spans; };
  using Payload = std::variant<CompletePayload, CompletionPayload, SensingPayload,
                               RankOnePayload, AggregatePayload>;

  MeasurementOperator(MaskKind kind, Index n1, Index n2, Index n, Payload p)
      : kind_(kind), n1_(n1), n2_(n2), n_(n), payload_(std::move(p)) {}

  static void check_dims(Index n1, Index n2) {
    require(n1 >= 1 && n2 >= 1, ErrorCode::kBadInput,
            "operator dimensions must be positive");
  }
  void check_matrix(const Matrix& m) const {
    require(m.rows() == n1_ && m.cols() == n2_, ErrorCode::kBadInput,
            "matrix is " + shape_str(m.rows(), m.cols()) + ", operator expects " +
                shape_str(n1_, n2_));
  }
  void check_vector(const Vector& b) const {
    require(b.size() == n_, ErrorCode::kBadInput,
            "measurement vector has length " + std::to_string(b.size()) +
                ", operator has N = " + std::to_string(n_));
  }

  MaskKind kind_;
  Index n1_, n2_, n_;
  Payload payload_;
};

// ---------------------------------------------------------------------------
// Projection onto {V >= 0, A(V) = b}.

/// Euclidean projection of v onto {x >= 0, sum(x) = total}, total >= 0.
/// Sort-based, O(h log h).
inline Vector project_simplex(const Vector& v, double total) {
  require(total >= 0.0, ErrorCode::kInfeasible,
          "simplex total must be nonnegative");
  const Index h = v.size();
  if (h == 0) return v;
  if (total == 0.0) return Vector::Zero(h);
  std::vector<double> u(v.data(), v.data() + h);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (Index j = 0; j < h; ++j) {
    cumsum += u[static_cast<size_t>(j)];
    const double t = (cumsum - total) / static_cast<double>(j + 1);
    if (u[static_cast<size_t>(j)] - t > 0.0) theta = t;
  }
  return (v.array() - theta).cwiseMax(0.0).matrix();
}

struct ProjectionOptions {
  double tol = 1e-8;           // max-norm measurement residual
  int max_iter = 500;
  double rel_change = 1e-9;    // stop once iterates stall and are feasible
};

struct ProjectionResult {
  Matrix V;
  double residual = 0.0;
  int iterations = 0;
  bool converged = true;
};

/// Projects onto the measurement-consistent nonnegative polytope.
///
/// Completion and complete masks overwrite observed cells and clamp the rest;
/// temporal aggregates project each span onto its scaled simplex and clamp
/// uncovered cells. Every other family runs Dykstra's alternating projection
/// between the affine set (step V + A^+(b - A V), with the minimum-norm
/// solve factored once here) and the nonnegative orthant.
///
/// Holds a pointer to `op`, which must outlive the projector.
class PolytopeProjector {
 public:
  PolytopeProjector(const MeasurementOperator& op, Vector b,
                    ProjectionOptions options = {})
      : op_(&op), b_(std::move(b)), options_(options) {
    require(b_.size() == op.size(), ErrorCode::kBadInput,
            "measurement vector length does not match operator");
    switch (op.kind()) {
      case MaskKind::kComplete:
      case MaskKind::kCompletion:
      case MaskKind::kTemporalAggregate:
        for (Index i = 0; i < b_.size(); ++i)
          require(b_(i) >= 0.0, ErrorCode::kInfeasible,
                  "measurement " + std::to_string(i) + " is negative (" +
                      std::to_string(b_(i)) +
                      ") but every mask forces a nonnegative value");
        break;
      case MaskKind::kGaussianSensing:
      case MaskKind::kRankOne:
        flat_ = op.dense();
        cod_.compute(flat_);
        break;
    }
  }

  const MeasurementOperator& op() const { return *op_; }
  const Vector& measurements() const { return b_; }

  ProjectionResult project(const Matrix& w) const {
    require(w.rows() == op_->rows() && w.cols() == op_->cols(),
            ErrorCode::kBadInput, "projection input has wrong shape");
    ProjectionResult out;
    switch (op_->kind()) {
      case MaskKind::kComplete:
        out.V = unvec_rowmajor(b_, op_->rows(), op_->cols());
        break;
      case MaskKind::kCompletion: {
        out.V = ramp(w);
        const auto& es = op_->entries();
        for (size_t i = 0; i < es.size(); ++i)
          out.V(es[i].row, es[i].col) = b_(static_cast<Index>(i));
        break;
      }
      case MaskKind::kTemporalAggregate: {
        out.V = ramp(w);
        const auto& ss = op_->spans();
        for (size_t i = 0; i < ss.size(); ++i) {
          const AggregateSpan& s = ss[i];
          out.V.col(s.col).segment(s.start, s.length) = project_simplex(
              w.col(s.col).segment(s.start, s.length), b_(static_cast<Index>(i)));
        }
        break;
      }
      case MaskKind::kGaussianSensing:
      case MaskKind::kRankOne:
        return dykstra(w);
    }
    out.residual = (op_->apply(out.V) - b_).lpNorm<Eigen::Infinity>();
    out.converged = out.residual <= options_.tol;
    return out;
  }

 private:
  ProjectionResult dykstra(const Matrix& w) const {
    const Index n1 = op_->rows(), n2 = op_->cols();
    Vector x = vec_rowmajor(w);
    Vector q = Vector::Zero(x.size());
    ProjectionResult out;
    for (int it = 1; it <= options_.max_iter; ++it) {
      Vector y = x + cod_.solve(b_ - flat_ * x);
      Vector z = (y + q).cwiseMax(0.0);
      q += y - z;
      const double change = (z - x).norm() / std::max(x.norm(), 1e-300);
      x = std::move(z);
      out.iterations = it;
      out.residual = (flat_ * x - b_).lpNorm<Eigen::Infinity>();
      if (out.residual <= options_.tol && change < options_.rel_change) break;
    }
    out.V = unvec_rowmajor(x, n1, n2);
    out.converged = out.residual <= options_.tol;
    return out;
  }

  const MeasurementOperator* op_;
  Vector b_;
  ProjectionOptions options_;
  Matrix flat_;
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod_;
};

/// One-shot projection; throws kNonConvergence with the final residual when
/// the tolerance is not reached within max_iter.
inline Matrix project_polytope(const MeasurementOperator& op, const Vector& b,
                               const Matrix& w, double tol = 1e-8,
                               int max_iter = 500) {
  ProjectionOptions opts;
  opts.tol = tol;
  opts.max_iter = max_iter;
  PolytopeProjector projector(op, b, opts);
  ProjectionResult r = projector.project(w);
  require(r.converged, ErrorCode::kNonConvergence,
          "polytope projection stopped after " + std::to_string(r.iterations) +
              " iterations with residual " + std::to_string(r.residual));
  return std::move(r.V);
}

// ---------------------------------------------------------------------------
// Mask generators.

inline MeasurementOperator make_periodic_aggregates(Index n1, Index n2,
                                                    Index period) {
  require(period >= 1 && period <= n1, ErrorCode::kBadInput,
          "period must lie in [1, n1]");
  std::vector<AggregateSpan> spans;
  for (Index c = 0; c < n2; ++c)
    for (Index t = 0; t < n1; t += period)
      spans.push_back({c, t, std::min(period, n1 - t)});
  return MeasurementOperator::temporal_aggregate(n1, n2, std::move(spans));
}

/// Random spans covering every cell once. Each interior period boundary is a
/// breakpoint with probability (rate n1 - 1) / (n1 - 1), so a column carries
/// rate * n1 measurements on average.
inline MeasurementOperator make_random_aggregates(Index n1, Index n2, double rate,
                                                  std::uint64_t seed) {
  require(rate > 0.0 && rate <= 1.0, ErrorCode::kBadInput,
          "sampling rate must lie in (0, 1]");
  Rng rng(seed);
  const double p =
      n1 > 1 ? std::clamp((rate * static_cast<double>(n1) - 1.0) /
                              static_cast<double>(n1 - 1),
                          0.0, 1.0)
             : 0.0;
  std::bernoulli_distribution cut(p);
  std::vector<AggregateSpan> spans;
  for (Index c = 0; c < n2; ++c) {
    Index start = 0;
    for (Index t = 1; t < n1; ++t) {
      if (cut(rng)) {
        spans.push_back({c, start, t - start});
        start = t;
      }
    }
    spans.push_back({c, start, n1 - start});
  }
  return MeasurementOperator::temporal_aggregate(n1, n2, std::move(spans));
}

/// Uniformly sampled entries, round(rate n1 n2) of them (at least one).
inline MeasurementOperator make_random_completion(Index n1, Index n2, double rate,
                                                  std::uint64_t seed) {
  require(rate > 0.0 && rate <= 1.0, ErrorCode::kBadInput,
          "sampling rate must lie in (0, 1]");
  Rng rng(seed);
  std::vector<Index> cells(static_cast<size_t>(n1 * n2));
  std::iota(cells.begin(), cells.end(), Index{0});
  std::shuffle(cells.begin(), cells.end(), rng);
  const auto count = std::max<Index>(
      1, static_cast<Index>(std::llround(rate * static_cast<double>(n1 * n2))));
  cells.resize(static_cast<size_t>(count));
  std::sort(cells.begin(), cells.end());
  std::vector<Entry> entries;
  entries.reserve(cells.size());
  for (Index c : cells) entries.push_back({c / n2, c % n2});
  return MeasurementOperator::completion(n1, n2, std::move(entries));
}

inline MeasurementOperator make_gaussian_sensing(Index n1, Index n2, Index n,
                                                 std::uint64_t seed) {
  Rng rng(seed);
  return MeasurementOperator::gaussian_sensing(n1, n2,
                                               gaussian_matrix(n, n1 * n2, rng));
}

inline MeasurementOperator make_rank_one(Index n1, Index n2, Index n,
                                         std::uint64_t seed) {
  Rng rng(seed);
  Matrix a = gaussian_matrix(n, n1, rng);
  Matrix b = gaussian_matrix(n, n2, rng);
  return MeasurementOperator::rank_one(n1, n2, std::move(a), std::move(b));
}

}  // namespace halsx

#endif  // HALSX_OPERATORS_HPP_
