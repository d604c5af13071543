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

// Brute-force reference computations shared by the unit and acceptance
// tests. Nothing here calls into the library's numerical code paths.

#ifndef HALSX_TESTS_ORACLES_HPP_
#define HALSX_TESTS_ORACLES_HPP_

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <vector>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// min ||v - w||^2 s.t. A v = b, v >= 0, by enumerating zero sets. Only for
/// a handful of unknowns (2^p subsets).
inline Vector polytope_qp(const Matrix& a, const Vector& b, const Vector& w) {
  const Index p = w.size();
  double best = std::numeric_limits<double>::infinity();
  Vector best_v = Vector::Constant(p, std::numeric_limits<double>::quiet_NaN());
  for (unsigned mask = 0; mask < (1u << p); ++mask) {
    std::vector<Index> free;
    for (Index j = 0; j < p; ++j)
      if (!(mask & (1u << j))) free.push_back(j);
    Vector v = Vector::Zero(p);
    if (!free.empty()) {
      Matrix af(a.rows(), static_cast<Index>(free.size()));
      Vector wf(static_cast<Index>(free.size()));
      for (size_t t = 0; t < free.size(); ++t) {
        af.col(static_cast<Index>(t)) = a.col(free[t]);
        wf(static_cast<Index>(t)) = w(free[t]);
      }
      // Closest point of the affine set {A_F v = b} to w_F.
      Eigen::JacobiSVD<Matrix> svd(af, Eigen::ComputeFullU | Eigen::ComputeFullV);
      svd.setThreshold(1e-12);
      const Vector vf = wf + svd.solve(b - af * wf);
      for (size_t t = 0; t < free.size(); ++t) v(free[t]) = vf(static_cast<Index>(t));
    }
    if ((a * v - b).cwiseAbs().maxCoeff() > 1e-9) continue;
    if (v.minCoeff() < -1e-12) continue;
    const double d = (v - w).squaredNorm();
    if (d < best) {
      best = d;
      best_v = v;
    }
  }
  return best_v;
}

/// Sum over i of <M, A_i> b_i computed from explicit dense masks.
inline double mask_inner(const std::vector<Matrix>& masks, const Matrix& m,
                         const Vector& b) {
  double s = 0.0;
  for (size_t i = 0; i < masks.size(); ++i) {
    double t = 0.0;
    for (Index r = 0; r < m.rows(); ++r)
      for (Index c = 0; c < m.cols(); ++c) t += m(r, c) * masks[i](r, c);
    s += t * b(static_cast<Index>(i));
  }
  return s;
}

/// Plain HALS on a fully observed matrix, written with scalar loops.
/// Returns the objective ||V - F_r F_c^T||^2 before each outer iteration.
inline std::vector<double> plain_hals(const Matrix& v, Matrix f_r, Matrix f_c,
                                      int iterations) {
  const Index n1 = v.rows(), n2 = v.cols(), k = f_r.cols();
  auto objective = [&] {
    double s = 0.0;
    for (Index i = 0; i < n1; ++i)
      for (Index j = 0; j < n2; ++j) {
        double p = 0.0;
        for (Index l = 0; l < k; ++l) p += f_r(i, l) * f_c(j, l);
        s += (v(i, j) - p) * (v(i, j) - p);
      }
    return s;
  };
  std::vector<double> trace;
  for (int it = 0; it < iterations; ++it) {
    trace.push_back(objective());
    Matrix r(n1, n2);
    for (Index i = 0; i < n1; ++i)
      for (Index j = 0; j < n2; ++j) {
        double p = 0.0;
        for (Index l = 0; l < k; ++l) p += f_r(i, l) * f_c(j, l);
        r(i, j) = v(i, j) - p;
      }
    for (int side = 0; side < 2; ++side) {
      Matrix& a = side == 0 ? f_r : f_c;
      Matrix& g = side == 0 ? f_c : f_r;
      for (Index l = 0; l < k; ++l) {
        double gg = 0.0;
        for (Index j = 0; j < g.rows(); ++j) gg += g(j, l) * g(j, l);
        for (Index i = 0; i < a.rows(); ++i) {
          double num = 0.0;
          for (Index j = 0; j < g.rows(); ++j) {
            const double rij = side == 0 ? r(i, j) : r(j, i);
            num += (rij + a(i, l) * g(j, l)) * g(j, l);
          }
          const double updated = std::max(0.0, num / gg);
          for (Index j = 0; j < g.rows(); ++j) {
            double& rij = side == 0 ? r(i, j) : r(j, i);
            rij += (a(i, l) - updated) * g(j, l);
          }
          a(i, l) = updated;
        }
      }
    }
  }
  trace.push_back(objective());
  return trace;
}

/// Nonnegative least squares min ||D c - t||^2 s.t. D c >= 0 over small
/// designs, by enumerating which fitted entries sit on the boundary D_i c = 0.
/// Returns the optimal objective value.
inline double nonneg_output_ls(const Matrix& d, const Vector& t) {
  const Index n = d.rows();
  double best = std::numeric_limits<double>::infinity();
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    // Rows in `mask` are constrained to D_i c = 0.
    std::vector<Index> eq;
    for (Index i = 0; i < n; ++i)
      if (mask & (1u << i)) eq.push_back(i);
    Matrix c_eq(static_cast<Index>(eq.size()), d.cols());
    for (size_t s = 0; s < eq.size(); ++s) c_eq.row(static_cast<Index>(s)) = d.row(eq[s]);
    // Null-space parametrisation c = N z of the equality rows.
    Matrix basis;
    if (eq.empty()) {
      basis = Matrix::Identity(d.cols(), d.cols());
    } else {
      Eigen::FullPivLU<Matrix> lu(c_eq);
      basis = lu.kernel();
      if (basis.cols() == 1 && basis.norm() == 0.0) basis = Matrix::Zero(d.cols(), 0);
    }
    Vector c = Vector::Zero(d.cols());
    if (basis.cols() > 0) {
      const Matrix dn = d * basis;
      Eigen::JacobiSVD<Matrix> svd(dn, Eigen::ComputeThinU | Eigen::ComputeThinV);
      svd.setThreshold(1e-12);
      c = basis * svd.solve(t);
    }
    const Vector fit = d * c;
    if (fit.minCoeff() < -1e-9) continue;
    best = std::min(best, (fit - t).squaredNorm());
  }
  return best;
}

}  // namespace oracle

#endif  // HALSX_TESTS_ORACLES_HPP_
