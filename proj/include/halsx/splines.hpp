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

#ifndef HALSX_SPLINES_HPP_
#define HALSX_SPLINES_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "halsx/common.hpp"

namespace halsx {

/// Cubic B-spline basis on a clamped knot vector. Outside [lo, hi] the basis
/// is continued linearly from the boundary value and slope.
class CubicBSpline {
 public:
  static constexpr int kDegree = 3;

  CubicBSpline() = default;

  explicit CubicBSpline(Vector knots) : knots_(std::move(knots)) {
    require(knots_.size() >= 2 * (kDegree + 1), ErrorCode::kBadInput,
            "cubic B-spline needs at least 8 knots");
    for (Index i = 1; i < knots_.size(); ++i)
      require(knots_(i) >= knots_(i - 1), ErrorCode::kBadInput,
              "knots must be nondecreasing");
    require(hi() > lo(), ErrorCode::kBadInput, "degenerate knot range");
  }

  /// Clamped knots: boundary knots at min/max of x, L - 4 interior knots at
  /// evenly spaced quantiles of the distinct values of x.
  static CubicBSpline from_quantiles(const Vector& x, Index dim) {
    require(dim >= 4, ErrorCode::kBadInput, "spline basis dimension must be >= 4");
    std::vector<double> u(x.data(), x.data() + x.size());
    std::sort(u.begin(), u.end());
    u.erase(std::unique(u.begin(), u.end()), u.end());
    require(static_cast<Index>(u.size()) >= dim, ErrorCode::kBadInput,
            "spline basis of dimension " + std::to_string(dim) + " needs at least " +
                std::to_string(dim) + " distinct feature values, got " +
                std::to_string(u.size()));
    const Index interior = dim - 4;
    Vector knots(dim + 4);
    for (int i = 0; i <= kDegree; ++i) {
      knots(i) = u.front();
      knots(dim + i) = u.back();
    }
    const double m = static_cast<double>(u.size() - 1);
    for (Index j = 1; j <= interior; ++j) {
      const double pos = m * static_cast<double>(j) / static_cast<double>(interior + 1);
      const auto lo_i = static_cast<size_t>(std::floor(pos));
      const size_t hi_i = std::min(lo_i + 1, u.size() - 1);
      const double frac = pos - static_cast<double>(lo_i);
      knots(kDegree + j) = (1.0 - frac) * u[lo_i] + frac * u[hi_i];
    }
    return CubicBSpline(std::move(knots));
  }

  const Vector& knots() const { return knots_; }
  Index dim() const { return knots_.size() - kDegree - 1; }
  double lo() const { return knots_(kDegree); }
  double hi() const { return knots_(knots_.size() - kDegree - 1); }

  /// Values (deriv = 0) or derivatives (deriv = 1, 2) of all basis functions
  /// at x.
  Vector row(double x, int deriv = 0) const {
    if (x < lo() || x > hi()) {
      const double edge = x < lo() ? lo() : hi();
      if (deriv == 0) return row(edge, 0) + (x - edge) * row(edge, 1);
      if (deriv == 1) return row(edge, 1);
      return Vector::Zero(dim());
    }
    return row_in_span(find_span(x), x, deriv);
  }

  Matrix design(const Vector& x, int deriv = 0) const {
    Matrix out(x.size(), dim());
    for (Index i = 0; i < x.size(); ++i) out.row(i) = row(x(i), deriv).transpose();
    return out;
  }

  /// Integral over [lo, hi] of B_i''(x) B_j''(x). Second derivatives are
  /// piecewise linear, so Simpson's rule per knot interval is exact.
  Matrix penalty() const {
    const Index n = dim();
    Matrix s = Matrix::Zero(n, n);
    for (Index span = kDegree; span < n; ++span) {
      const double a = knots_(span), b = knots_(span + 1);
      if (b <= a) continue;
      const Vector da = row_in_span(span, a, 2);
      const Vector dm = row_in_span(span, 0.5 * (a + b), 2);
      const Vector db = row_in_span(span, b, 2);
      s.noalias() += (b - a) / 6.0 *
                     (da * da.transpose() + 4.0 * dm * dm.transpose() +
                      db * db.transpose());
    }
    return 0.5 * (s + s.transpose());
  }

  /// Coefficients reproducing the identity function x (Greville abscissae).
  Vector greville() const {
    Vector g(dim());
    for (Index i = 0; i < dim(); ++i)
      g(i) = (knots_(i + 1) + knots_(i + 2) + knots_(i + 3)) / 3.0;
    return g;
  }

 private:
  Index find_span(double x) const {
    const Index n = dim() - 1;
    if (x >= knots_(n + 1)) {
      // Last nonempty interval.
      Index s = n;
      while (s > kDegree && knots_(s) >= knots_(s + 1)) --s;
      return s;
    }
    Index low = kDegree, high = n + 1;
    Index mid = (low + high) / 2;
    while (x < knots_(mid) || x >= knots_(mid + 1)) {
      if (x < knots_(mid)) high = mid; else low = mid;
      mid = (low + high) / 2;
    }
    return mid;
  }

  // Derivatives of the p+1 nonzero basis functions on a span, after the
  // classical triangular recurrence (Piegl & Tiller, algorithm A2.3).
  Vector row_in_span(Index span, double x, int deriv) const {
    constexpr int p = kDegree;
    std::array<std::array<double, p + 1>, p + 1> ndu{};
    std::array<double, p + 1> left{}, right{};
    ndu[0][0] = 1.0;
    for (int j = 1; j <= p; ++j) {
      left[j] = x - knots_(span + 1 - j);
      right[j] = knots_(span + j) - x;
      double saved = 0.0;
      for (int r = 0; r < j; ++r) {
        ndu[j][r] = right[r + 1] + left[j - r];
        const double temp = ndu[r][j - 1] / ndu[j][r];
        ndu[r][j] = saved + right[r + 1] * temp;
        saved = left[j - r] * temp;
      }
      ndu[j][j] = saved;
    }
    std::array<double, p + 1> ders{};
    if (deriv == 0) {
      for (int j = 0; j <= p; ++j) ders[j] = ndu[j][p];
    } else {
      std::array<std::array<double, p + 1>, 2> a{};
      for (int r = 0; r <= p; ++r) {
        int s1 = 0, s2 = 1;
        a[0].fill(0.0);
        a[1].fill(0.0);
        a[0][0] = 1.0;
        double d = 0.0;
        for (int k = 1; k <= deriv; ++k) {
          d = 0.0;
          const int rk = r - k, pk = p - k;
          if (r >= k) {
            a[s2][0] = a[s1][0] / ndu[pk + 1][rk];
            d = a[s2][0] * ndu[rk][pk];
          }
          const int j1 = rk >= -1 ? 1 : -rk;
          const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
          for (int j = j1; j <= j2; ++j) {
            a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][rk + j];
            d += a[s2][j] * ndu[rk + j][pk];
          }
          if (r <= pk) {
            a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
            d += a[s2][k] * ndu[r][pk];
          }
          std::swap(s1, s2);
        }
        ders[r] = d;
      }
      double factor = p;
      for (int k = 1; k < deriv; ++k) factor *= (p - k);
      for (double& v : ders) v *= factor;
    }
    Vector out = Vector::Zero(dim());
    for (int j = 0; j <= p; ++j) out(span - p + j) = ders[j];
    return out;
  }

  Vector knots_;
};

/// One smooth term: basis, its design on the training values and the
/// wiggliness penalty (integrated squared second derivative).
struct SplineBasis {
  CubicBSpline spline;
  Matrix design;   // n x L
  Matrix penalty;  // L x L, symmetric PSD
};

inline SplineBasis build_spline_basis(const Vector& x, Index dim) {
  SplineBasis basis;
  basis.spline = CubicBSpline::from_quantiles(x, dim);
  basis.design = basis.spline.design(x);
  basis.penalty = basis.spline.penalty();
  return basis;
}

}  // namespace halsx

#endif  // HALSX_SPLINES_HPP_
