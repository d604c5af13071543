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

#ifndef HALSX_COMMON_HPP_
#define HALSX_COMMON_HPP_

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace halsx {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Failure categories. The CLI maps each one to a distinct exit code.
enum class ErrorCode {
  kBadInput,
  kInfeasible,
  kRankDeficient,
  kNonConvergence,
  kDivergence,
  kNoSideInformation,
  kSearchTooLarge,
  kUnsupported,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) throw Error(code, what);
}

inline std::string shape_str(Index r, Index c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

// Entrywise max(0, x).
template <typename Derived>
auto ramp(const Eigen::MatrixBase<Derived>& x) {
  return x.cwiseMax(0.0);
}

// Entrywise min(0, x), the negative part kept with its sign.
template <typename Derived>
auto negative_part(const Eigen::MatrixBase<Derived>& x) {
  return x.cwiseMin(0.0);
}

using Rng = std::mt19937_64;

inline Matrix uniform_matrix(Index rows, Index cols, Rng& rng, double lo = 0.0,
                             double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Matrix m(rows, cols);
  // Fill column by column so results do not depend on Eigen's traversal.
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = dist(rng);
  return m;
}

inline Matrix gaussian_matrix(Index rows, Index cols, Rng& rng,
                              double sd = 1.0) {
  std::normal_distribution<double> dist(0.0, sd);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = dist(rng);
  return m;
}

// Row-major vectorization: entry (i, j) lands at i * cols + j.
inline Vector vec_rowmajor(const Matrix& m) {
  Vector v(m.size());
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) v(i * m.cols() + j) = m(i, j);
  return v;
}

inline Matrix unvec_rowmajor(const Vector& v, Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = v(i * cols + j);
  return m;
}

// Smallest-over-largest singular value test for numerical full column rank.
inline bool full_column_rank(const Matrix& m, double tol) {
  if (m.cols() == 0) return true;
  if (m.rows() < m.cols()) return false;
  Eigen::JacobiSVD<Matrix> svd(m);
  const Vector& s = svd.singularValues();
  if (s(0) <= 0.0) return false;
  return s(s.size() - 1) > tol * s(0);
}

}  // namespace halsx

#endif  // HALSX_COMMON_HPP_
