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

#ifndef HALSX_LINKMODELS_HPP_
#define HALSX_LINKMODELS_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "halsx/common.hpp"
#include "halsx/splines.hpp"

namespace halsx {

enum class LinkFamily { kIdentity, kLinear, kSpline, kKernelRidge };

inline const char* to_string(LinkFamily f) {
  switch (f) {
    case LinkFamily::kIdentity: return "identity";
    case LinkFamily::kLinear: return "linear";
    case LinkFamily::kSpline: return "spline";
    case LinkFamily::kKernelRidge: return "kernel";
  }
  return "unknown";
}

inline LinkFamily link_family_from_string(const std::string& s) {
  for (LinkFamily f : {LinkFamily::kIdentity, LinkFamily::kLinear,
                       LinkFamily::kSpline, LinkFamily::kKernelRidge})
    if (s == to_string(f)) return f;
  throw Error(ErrorCode::kBadInput, "unknown link family '" + s + "'");
}

/// Side information for one axis. Identity features mean "no side
/// information": every row is its own individual.
struct Features {
  Matrix X;
  bool identity = false;

  static Features identity_of(Index n) { return {Matrix::Identity(n, n), true}; }
  static Features numeric(Matrix x) { return {std::move(x), false}; }

  Index rows() const { return X.rows(); }
  Index dims() const { return X.cols(); }

  Features top_rows(Index m) const {
    return identity ? identity_of(m) : numeric(X.topRows(m));
  }
};

struct FeatureSet {
  Features row;
  Features col;
};

struct KernelSpec {
  enum class Type { kRbf, kLinear };
  Type type = Type::kRbf;
  double bandwidth = 0.0;  // RBF only; 0 selects the median heuristic
};

struct LinkOptions {
  LinkFamily family = LinkFamily::kIdentity;
  Index spline_dim = 10;
  int gcv_grid_size = 30;
  double gcv_lambda_min = 1e-8;
  double gcv_lambda_max = 1e4;
  std::optional<double> fixed_lambda;  // skips GCV when set
  KernelSpec kernel;
  double ridge = 1e-8;
};

inline Vector log_grid(double lo, double hi, int n) {
  Vector g(n);
  if (n == 1) {
    g(0) = lo;
    return g;
  }
  const double a = std::log10(lo), b = std::log10(hi);
  for (int i = 0; i < n; ++i) g(i) = std::pow(10.0, a + (b - a) * i / (n - 1));
  return g;
}

// ---------------------------------------------------------------------------
// Column subproblem reduction.

/// ||R - f g^T||_F^2 = weight * ||f - target||^2 + const, with
/// target = R g / ||g||^2 and weight = ||g||^2.
struct Subproblem {
  Vector target;
  double weight = 0.0;
};

inline std::optional<Subproblem> reduce_subproblem(const Matrix& r, const Vector& g) {
  require(r.cols() == g.size(), ErrorCode::kBadInput,
          "reduce_subproblem: partner length does not match residual");
  const double w = g.squaredNorm();
  if (w <= 0.0) return std::nullopt;
  return Subproblem{r * g / w, w};
}

/// Same reduction for the column side: target = R^T f / ||f||^2.
inline std::optional<Subproblem> reduce_subproblem_transposed(const Matrix& r,
                                                              const Vector& f) {
  require(r.rows() == f.size(), ErrorCode::kBadInput,
          "reduce_subproblem: partner length does not match residual");
  const double w = f.squaredNorm();
  if (w <= 0.0) return std::nullopt;
  return Subproblem{r.transpose() * f / w, w};
}

// ---------------------------------------------------------------------------
// Additive spline design: intercept plus one centred cubic smooth per feature.

class AdditiveSplineDesign {
 public:
  AdditiveSplineDesign(const Matrix& x, Index dim) {
    require(x.rows() > 0 && x.cols() > 0, ErrorCode::kBadInput,
            "spline design needs a nonempty feature matrix");
    const double n = static_cast<double>(x.rows());
    for (Index j = 0; j < x.cols(); ++j) {
      SplineBasis basis = build_spline_basis(x.col(j), dim);
      // Sum-to-zero reparametrisation keeps the intercept identifiable.
      Vector means = basis.design.colwise().sum().transpose() / n;
      Eigen::HouseholderQR<Matrix> qr(means);
      Matrix q = qr.householderQ();
      Matrix z = q.rightCols(dim - 1);
      Matrix bz = basis.design * z;
      Matrix s = z.transpose() * basis.penalty * z;
      const double s_norm = s.norm();
      const double scale = s_norm > 0.0 ? (bz.transpose() * bz).norm() / s_norm : 1.0;
      splines_.push_back(std::move(basis.spline));
      constraints_.push_back(std::move(z));
      penalties_.push_back(scale * s);
    }
  }

  Index inputs() const { return static_cast<Index>(splines_.size()); }
  Index params() const {
    Index p = 1;
    for (const Matrix& z : constraints_) p += z.cols();
    return p;
  }
  const std::vector<CubicBSpline>& splines() const { return splines_; }
  const std::vector<Matrix>& constraints() const { return constraints_; }
  const std::vector<Matrix>& term_penalties() const { return penalties_; }

  Matrix design(const Matrix& x) const {
    require(x.cols() == inputs(), ErrorCode::kBadInput,
            "spline design expects " + std::to_string(inputs()) +
                " feature columns, got " + std::to_string(x.cols()));
    Matrix d(x.rows(), params());
    d.col(0).setOnes();
    Index offset = 1;
    for (size_t j = 0; j < splines_.size(); ++j) {
      const Index w = constraints_[j].cols();
      d.middleCols(offset, w) =
          splines_[j].design(x.col(static_cast<Index>(j))) * constraints_[j];
      offset += w;
    }
    return d;
  }

  Matrix penalty() const {
    Matrix s = Matrix::Zero(params(), params());
    Index offset = 1;
    for (const Matrix& pj : penalties_) {
      s.block(offset, offset, pj.rows(), pj.cols()) = pj;
      offset += pj.rows();
    }
    return s;
  }

  // Rebuilt from serialized parts.
  AdditiveSplineDesign(std::vector<CubicBSpline> splines, std::vector<Matrix> z,
                       std::vector<Matrix> penalties)
      : splines_(std::move(splines)),
        constraints_(std::move(z)),
        penalties_(std::move(penalties)) {}

 private:
  std::vector<CubicBSpline> splines_;
  std::vector<Matrix> constraints_;
  std::vector<Matrix> penalties_;
};

struct KernelData {
  KernelSpec spec;  // bandwidth resolved (> 0 for RBF)
  Matrix train;     // n x d

  Matrix gram(const Matrix& a, const Matrix& b) const {
    if (spec.type == KernelSpec::Type::kLinear) return a * b.transpose();
    Matrix k(a.rows(), b.rows());
    const double denom = 2.0 * spec.bandwidth * spec.bandwidth;
    for (Index i = 0; i < a.rows(); ++i)
      for (Index j = 0; j < b.rows(); ++j)
        k(i, j) = std::exp(-(a.row(i) - b.row(j)).squaredNorm() / denom);
    return k;
  }
};

inline double median_pairwise_distance(const Matrix& x) {
  std::vector<double> d;
  for (Index i = 0; i < x.rows(); ++i)
    for (Index j = i + 1; j < x.rows(); ++j) d.push_back((x.row(i) - x.row(j)).norm());
  if (d.empty()) return 1.0;
  std::nth_element(d.begin(), d.begin() + static_cast<long>(d.size() / 2), d.end());
  const double m = d[d.size() / 2];
  return m > 0.0 ? m : 1.0;
}

// ---------------------------------------------------------------------------
// Fitted link functions.

struct IdentityLink {
  Vector values;
};
struct LinearLink {
  Vector coef;
};
struct SplineLink {
  std::shared_ptr<const AdditiveSplineDesign> design;
  Vector coef;
  double lambda = 0.0;             // selected grid value
  double effective_penalty = 0.0;  // lambda / weight
};
struct KernelLink {
  std::shared_ptr<const KernelData> data;
  Vector weights;
  double ridge = 0.0;
};

/// A fitted per-column regressor f. Predictions handed to the solver are
/// always ramped: evaluate() returns max(0, f(x)).
class LinkModel {
 public:
  using Payload = std::variant<IdentityLink, LinearLink, SplineLink, KernelLink>;

  LinkModel() : payload_(IdentityLink{}) {}
  explicit LinkModel(Payload p) : payload_(std::move(p)) {}

  LinkFamily family() const {
    switch (payload_.index()) {
      case 0: return LinkFamily::kIdentity;
      case 1: return LinkFamily::kLinear;
      case 2: return LinkFamily::kSpline;
      default: return LinkFamily::kKernelRidge;
    }
  }
  const Payload& payload() const { return payload_; }

  /// Unramped f(X) on new feature rows.
  Vector predict_raw(const Matrix& x) const {
    return std::visit(
        [&](const auto& link) -> Vector {
          using T = std::decay_t<decltype(link)>;
          if constexpr (std::is_same_v<T, IdentityLink>) {
            throw Error(ErrorCode::kNoSideInformation,
                        "identity-feature link cannot predict new individuals: "
                        "no side information");
          } else if constexpr (std::is_same_v<T, LinearLink>) {
            require(x.cols() == link.coef.size(), ErrorCode::kBadInput,
                    "linear link expects " + std::to_string(link.coef.size()) +
                        " features, got " + std::to_string(x.cols()));
            return x * link.coef;
          } else if constexpr (std::is_same_v<T, SplineLink>) {
            return link.design->design(x) * link.coef;
          } else {
            require(x.cols() == link.data->train.cols(), ErrorCode::kBadInput,
                    "kernel link expects " + std::to_string(link.data->train.cols()) +
                        " features, got " + std::to_string(x.cols()));
            return link.data->gram(x, link.data->train) * link.weights;
          }
        },
        payload_);
  }

  /// Unramped f on the training individuals of `features`.
  Vector predict_raw(const Features& features) const {
    if (const auto* id = std::get_if<IdentityLink>(&payload_)) {
      require(features.identity && features.rows() == id->values.size(),
              ErrorCode::kNoSideInformation,
              "identity-feature link can only be evaluated on its training "
              "individuals");
      return id->values;
    }
    return predict_raw(features.X);
  }

  Vector evaluate(const Matrix& x) const { return ramp(predict_raw(x)); }
  Vector evaluate(const Features& features) const {
    return ramp(predict_raw(features));
  }

 private:
  Payload payload_;
};

// ---------------------------------------------------------------------------
// Fitters: one per axis, caching everything that depends only on X.

class LinkFitter {
 public:
  virtual ~LinkFitter() = default;
  virtual LinkFamily family() const = 0;
  /// Minimises weight * ||f(X) - target||^2 (+ the family's penalty).
  virtual LinkModel fit(const Vector& target, double weight) const = 0;
  /// D^T v, where D is the Jacobian of the fitted values in parameter space.
  virtual Vector design_transpose_times(const Vector& v) const = 0;
  virtual Index rows() const = 0;
};

class IdentityFitter final : public LinkFitter {
 public:
  explicit IdentityFitter(Index n) : n_(n) {}
  LinkFamily family() const override { return LinkFamily::kIdentity; }
  LinkModel fit(const Vector& target, double) const override {
    return LinkModel(IdentityLink{target});
  }
  Vector design_transpose_times(const Vector& v) const override { return v; }
  Index rows() const override { return n_; }

 private:
  Index n_;
};

/// Least squares through a QR factorisation of X computed once.
class LinearFitter final : public LinkFitter {
 public:
  explicit LinearFitter(const Matrix& x) : x_(x), qr_(x) {
    require(full_column_rank(x, 1e-10), ErrorCode::kRankDeficient,
            "linear link needs full-column-rank features (" +
                shape_str(x.rows(), x.cols()) + ")");
  }
  LinkFamily family() const override { return LinkFamily::kLinear; }
  LinkModel fit(const Vector& target, double) const override {
    return LinkModel(LinearLink{qr_.solve(target)});
  }
  Vector design_transpose_times(const Vector& v) const override {
    return x_.transpose() * v;
  }
  Index rows() const override { return x_.rows(); }

 private:
  Matrix x_;
  Eigen::HouseholderQR<Matrix> qr_;
};

/// Penalised regression spline with the smoothing parameter picked by GCV.
///
/// The reduced objective weight * ||t - D b||^2 + lambda b^T S b has the
/// same minimiser as ||t - D b||^2 + (lambda / weight) b^T S b. D^T D and S
/// are diagonalised simultaneously once, so each grid point costs O(p).
class SplineFitter final : public LinkFitter {
 public:
  SplineFitter(const Matrix& x, const LinkOptions& opts)
      : design_(std::make_shared<AdditiveSplineDesign>(x, opts.spline_dim)),
        fixed_lambda_(opts.fixed_lambda),
        grid_(log_grid(opts.gcv_lambda_min, opts.gcv_lambda_max, opts.gcv_grid_size)) {
    d_ = design_->design(x);
    s_ = design_->penalty();
    require(d_.rows() >= d_.cols() && full_column_rank(d_, 1e-10),
            ErrorCode::kRankDeficient,
            "spline design is rank deficient: " + std::to_string(d_.rows()) +
                " rows for " + std::to_string(d_.cols()) +
                " parameters; lower the basis dimension");
    Eigen::LLT<Matrix> llt(d_.transpose() * d_);
    require(llt.info() == Eigen::Success, ErrorCode::kRankDeficient,
            "spline normal matrix is not positive definite");
    const Matrix l = llt.matrixL();
    const Matrix linv = l.triangularView<Eigen::Lower>().solve(
        Matrix::Identity(l.rows(), l.cols()));
    Eigen::SelfAdjointEigenSolver<Matrix> eig(linv * s_ * linv.transpose());
    eigen_ = eig.eigenvalues().cwiseMax(0.0);
    basis_ = linv.transpose() * eig.eigenvectors();
  }

  LinkFamily family() const override { return LinkFamily::kSpline; }

  LinkModel fit(const Vector& target, double weight) const override {
    require(weight > 0.0, ErrorCode::kBadInput, "spline fit needs weight > 0");
    require(target.size() == d_.rows(), ErrorCode::kBadInput,
            "spline target has wrong length");
    const Vector z = basis_.transpose() * (d_.transpose() * target);
    double lambda = 0.0;
    if (fixed_lambda_) {
      lambda = *fixed_lambda_;
    } else {
      const Vector scores = gcv_scores(target, weight);
      Index best = 0;
      for (Index g = 1; g < scores.size(); ++g)
        if (scores(g) < scores(best)) best = g;
      lambda = grid_(best);
    }
    const double mu = lambda / weight;
    const Vector shrink = (1.0 + mu * eigen_.array()).inverse().matrix();
    SplineLink link{design_, basis_ * shrink.cwiseProduct(z), lambda, mu};
    return LinkModel(std::move(link));
  }

  /// GCV(lambda) = n RSS / (n - tr H)^2 on the grid, for effective penalty
  /// lambda / weight. Non-finite where tr H reaches n.
  Vector gcv_scores(const Vector& target, double weight) const {
    const double n = static_cast<double>(d_.rows());
    const Vector z = basis_.transpose() * (d_.transpose() * target);
    const double yy = target.squaredNorm();
    Vector scores(grid_.size());
    for (Index g = 0; g < grid_.size(); ++g) {
      const double mu = grid_(g) / weight;
      double trace = 0.0, explained = 0.0;
      for (Index i = 0; i < eigen_.size(); ++i) {
        const double a = 1.0 / (1.0 + mu * eigen_(i));
        trace += a;
        explained += z(i) * z(i) * (2.0 * a - a * a);
      }
      const double rss = std::max(yy - explained, 0.0);
      const double dof = n - trace;
      scores(g) = dof > 1e-9 ? n * rss / (dof * dof)
                             : std::numeric_limits<double>::infinity();
    }
    return scores;
  }

  Vector design_transpose_times(const Vector& v) const override {
    return d_.transpose() * v;
  }
  Index rows() const override { return d_.rows(); }

  const Matrix& design() const { return d_; }
  const Matrix& penalty() const { return s_; }
  const Vector& lambda_grid() const { return grid_; }
  const std::shared_ptr<const AdditiveSplineDesign>& spline_design() const {
    return design_;
  }

 private:
  std::shared_ptr<const AdditiveSplineDesign> design_;
  std::optional<double> fixed_lambda_;
  Vector grid_;
  Matrix d_, s_;
  Vector eigen_;
  Matrix basis_;
};

/// Kernel ridge regression: weights = (K + (ridge / weight) I)^{-1} t.
class KernelRidgeFitter final : public LinkFitter {
 public:
  KernelRidgeFitter(const Matrix& x, KernelSpec spec, double ridge) : ridge_(ridge) {
    require(ridge >= 0.0, ErrorCode::kBadInput, "kernel ridge must be >= 0");
    if (spec.type == KernelSpec::Type::kRbf && spec.bandwidth <= 0.0)
      spec.bandwidth = median_pairwise_distance(x);
    data_ = std::make_shared<KernelData>(KernelData{spec, x});
    k_ = data_->gram(x, x);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(k_);
    values_ = eig.eigenvalues();
    vectors_ = eig.eigenvectors();
    const double top = values_.cwiseAbs().maxCoeff();
    require(values_.minCoeff() >= -1e-10 * std::max(top, 1.0),
            ErrorCode::kRankDeficient, "kernel Gram matrix is not PSD");
    if (ridge_ == 0.0)
      require(values_.minCoeff() > 1e-12 * top, ErrorCode::kRankDeficient,
              "kernel Gram matrix is not positive definite; adjust the "
              "bandwidth or use a positive ridge");
  }

  LinkFamily family() const override { return LinkFamily::kKernelRidge; }

  LinkModel fit(const Vector& target, double weight) const override {
    require(weight > 0.0, ErrorCode::kBadInput, "kernel fit needs weight > 0");
    const double mu = ridge_ / weight;
    const Vector proj = vectors_.transpose() * target;
    const Vector scaled = proj.array() / (values_.array() + mu);
    return LinkModel(KernelLink{data_, vectors_ * scaled, ridge_});
  }

  Vector design_transpose_times(const Vector& v) const override {
    return k_.transpose() * v;
  }
  Index rows() const override { return k_.rows(); }
  const Matrix& gram() const { return k_; }

 private:
  double ridge_;
  std::shared_ptr<const KernelData> data_;
  Matrix k_;
  Vector values_;
  Matrix vectors_;
};

inline std::unique_ptr<LinkFitter> make_link_fitter(const Features& features,
                                                    const LinkOptions& opts) {
  switch (opts.family) {
    case LinkFamily::kIdentity:
      require(features.identity, ErrorCode::kBadInput,
              "identity link family requires identity features");
      return std::make_unique<IdentityFitter>(features.rows());
    case LinkFamily::kLinear:
      return std::make_unique<LinearFitter>(features.X);
    case LinkFamily::kSpline:
      require(!features.identity, ErrorCode::kBadInput,
              "spline links need numeric features");
      return std::make_unique<SplineFitter>(features.X, opts);
    case LinkFamily::kKernelRidge:
      return std::make_unique<KernelRidgeFitter>(features.X, opts.kernel, opts.ridge);
  }
  throw Error(ErrorCode::kBadInput, "unknown link family");
}

// Convenience one-shot fits.

inline LinkModel fit_linear(const Matrix& x, const Vector& target) {
  return LinearFitter(x).fit(target, 1.0);
}

inline LinkModel fit_spline(const Matrix& x, const Vector& target, double weight,
                            const LinkOptions& opts = {}) {
  return SplineFitter(x, opts).fit(target, weight);
}

inline LinkModel fit_kernel_ridge(const Matrix& x, const Vector& target,
                                  KernelSpec kernel, double ridge,
                                  double weight = 1.0) {
  return KernelRidgeFitter(x, kernel, ridge).fit(target, weight);
}

}  // namespace halsx

#endif  // HALSX_LINKMODELS_HPP_
