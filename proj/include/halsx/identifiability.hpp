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

#ifndef HALSX_IDENTIFIABILITY_HPP_
#define HALSX_IDENTIFIABILITY_HPP_

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "halsx/common.hpp"

namespace halsx {

enum class Verdict { kTrue, kFalse, kInconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::kTrue: return "true";
    case Verdict::kFalse: return "false";
    case Verdict::kInconclusive: return "inconclusive";
  }
  return "unknown";
}

struct SeparabilityReport {
  bool separable = false;
  std::vector<Index> witness_rows;  // row carrying column j's lone positive entry
  double tol = 0.0;
  std::string reason;
};

struct PairWitness {
  Index zero_col, positive_col, row;
};

struct BoundaryCloseReport {
  Verdict verdict = Verdict::kFalse;
  bool condition1 = false;
  std::vector<PairWitness> pair_witnesses;
  std::optional<bool> condition2;  // unset when the search was not decided
  std::vector<Index> permutation;  // column order, 0-based
  // facet_rows[i]: the n - 1 - i rows vanishing at permutation[i].
  std::vector<std::vector<Index>> facet_rows;
  double tol = 0.0;
  std::string reason;
};

struct BoundaryCloseOptions {
  double tol = 1e-9;
  Index exhaustive_limit = 8;  // exact search up to this many columns
  Index cap = 16;              // beyond this the check refuses to run
};

namespace detail {

/// Columns scaled to unit max; an entry is zero iff it is <= tol after
/// scaling. Columns that are identically zero stay zero.
inline Matrix column_normalised(const Matrix& m) {
  Matrix out = m;
  for (Index j = 0; j < m.cols(); ++j) {
    const double top = m.col(j).maxCoeff();
    if (top > 0.0) out.col(j) /= top;
  }
  return out;
}

inline bool is_full_rank_square(const Matrix& m, double tol) {
  if (m.rows() == 0) return true;
  Eigen::JacobiSVD<Matrix> svd(m);
  const Vector& s = svd.singularValues();
  return s(0) > 0.0 && s(s.size() - 1) > tol * s(0);
}

/// Rows of z (already normalised) that vanish at column c and have positive
/// mass on `rest`; picks a maximal independent subset on the `rest` columns.
inline std::optional<std::vector<Index>> facet_witness(const Matrix& z, Index c,
                                                       const std::vector<Index>& rest,
                                                       double tol) {
  const Index need = static_cast<Index>(rest.size());
  std::vector<Index> chosen;
  Matrix basis(0, need);
  for (Index r = 0; r < z.rows() && static_cast<Index>(chosen.size()) < need; ++r) {
    if (z(r, c) > tol) continue;
    Vector row(need);
    double mass = 0.0;
    for (Index s = 0; s < need; ++s) {
      row(s) = z(r, rest[static_cast<size_t>(s)]);
      mass += row(s) > tol ? row(s) : 0.0;
    }
    if (mass <= 0.0) continue;
    Matrix trial(basis.rows() + 1, need);
    trial << basis, row.transpose();
    Eigen::JacobiSVD<Matrix> svd(trial);
    const Vector& sv = svd.singularValues();
    if (sv(sv.size() - 1) > tol * sv(0)) {
      basis = trial;
      chosen.push_back(r);
    }
  }
  if (static_cast<Index>(chosen.size()) < need) return std::nullopt;
  if (!is_full_rank_square(basis, tol)) return std::nullopt;
  return chosen;
}

}  // namespace detail

/// Separability: every column owns a row whose only positive entry sits in
/// that column. Entries count as zero when <= tol * column max.
inline SeparabilityReport is_separable(const Matrix& m, double tol = 1e-9) {
  SeparabilityReport rep;
  rep.tol = tol;
  if (m.rows() < m.cols()) {
    rep.reason = "fewer rows than columns";
    return rep;
  }
  require(m.minCoeff() >= 0.0, ErrorCode::kBadInput,
          "separability is defined for nonnegative matrices");
  const Matrix z = detail::column_normalised(m);
  for (Index j = 0; j < m.cols(); ++j) {
    std::optional<Index> found;
    for (Index r = 0; r < m.rows() && !found; ++r) {
      if (z(r, j) <= tol) continue;
      bool lone = true;
      for (Index s = 0; s < m.cols() && lone; ++s)
        if (s != j && z(r, s) > tol) lone = false;
      if (lone) found = r;
    }
    if (!found) {
      rep.witness_rows.clear();
      rep.reason = "column " + std::to_string(j) + " has no isolating row";
      return rep;
    }
    rep.witness_rows.push_back(*found);
  }
  rep.separable = true;
  return rep;
}

/// Strong boundary closeness. Condition 2 is searched over column orders:
/// exactly (all orders, via memoised subsets) up to exhaustive_limit
/// columns, greedily beyond that, where a failed greedy search is reported
/// as inconclusive. More than `cap` columns throws kSearchTooLarge.
inline BoundaryCloseReport is_strongly_boundary_close(const Matrix& m,
                                                      BoundaryCloseOptions opts = {}) {
  const Index n = m.cols();
  BoundaryCloseReport rep;
  rep.tol = opts.tol;
  require(n <= opts.cap, ErrorCode::kSearchTooLarge,
          "search too large: " + std::to_string(n) + " columns exceeds the cap of " +
              std::to_string(opts.cap));
  require(m.minCoeff() >= 0.0, ErrorCode::kBadInput,
          "boundary closeness is defined for nonnegative matrices");
  const Matrix z = detail::column_normalised(m);
  const double tol = opts.tol;

  rep.condition1 = true;
  for (Index i = 0; i < n && rep.condition1; ++i)
    for (Index j = 0; j < n && rep.condition1; ++j) {
      if (i == j) continue;
      std::optional<Index> row;
      for (Index r = 0; r < z.rows() && !row; ++r)
        if (z(r, i) <= tol && z(r, j) > tol) row = r;
      if (!row) {
        rep.condition1 = false;
        rep.reason = "condition 1 fails: no row with column " + std::to_string(i) +
                     " zero and column " + std::to_string(j) + " positive";
      } else {
        rep.pair_witnesses.push_back({i, j, *row});
      }
    }

  // Condition 2 only depends on (column at position i, set of later
  // columns), so orders are explored as paths through column subsets.
  using Mask = std::uint32_t;
  const Mask full = n >= 32 ? ~Mask(0) : ((Mask(1) << n) - 1);
  auto columns_of = [&](Mask s) {
    std::vector<Index> out;
    for (Index j = 0; j < n; ++j)
      if (s & (Mask(1) << j)) out.push_back(j);
    return out;
  };
  auto witness = [&](Index c, Mask rest) {
    return detail::facet_witness(z, c, columns_of(rest), tol);
  };

  std::vector<Index> order;
  std::vector<std::vector<Index>> rows;
  bool found = false;
  if (n <= opts.exhaustive_limit) {
    // dead[s]: no valid completion from remaining set s.
    std::vector<char> dead(static_cast<size_t>(full) + 1, 0);
    std::function<bool(Mask)> search = [&](Mask remaining) -> bool {
      if (__builtin_popcount(remaining) <= 1) {
        if (remaining) order.push_back(static_cast<Index>(__builtin_ctz(remaining)));
        return true;
      }
      if (dead[remaining]) return false;
      for (Index c = 0; c < n; ++c) {
        if (!(remaining & (Mask(1) << c))) continue;
        const Mask rest = remaining & ~(Mask(1) << c);
        auto w = witness(c, rest);
        if (!w) continue;
        order.push_back(c);
        rows.push_back(*w);
        if (search(rest)) return true;
        order.pop_back();
        rows.pop_back();
      }
      dead[remaining] = 1;
      return false;
    };
    found = search(full);
  } else {
    // Greedy: at each position take the column with the most zero rows
    // among those that admit a witness.
    Mask remaining = full;
    found = true;
    while (__builtin_popcount(remaining) > 1) {
      std::optional<Index> pick;
      std::vector<Index> pick_rows;
      Index best_zeros = -1;
      for (Index c = 0; c < n; ++c) {
        if (!(remaining & (Mask(1) << c))) continue;
        auto w = witness(c, remaining & ~(Mask(1) << c));
        if (!w) continue;
        const Index zeros = (z.col(c).array() <= tol).count();
        if (zeros > best_zeros) {
          best_zeros = zeros;
          pick = c;
          pick_rows = *w;
        }
      }
      if (!pick) {
        found = false;
        break;
      }
      order.push_back(*pick);
      rows.push_back(pick_rows);
      remaining &= ~(Mask(1) << *pick);
    }
    if (found && remaining) order.push_back(static_cast<Index>(__builtin_ctz(remaining)));
  }

  if (found) {
    rep.condition2 = true;
    rep.permutation = order;
    rep.facet_rows = rows;
  } else if (n <= opts.exhaustive_limit) {
    rep.condition2 = false;
    if (rep.reason.empty())
      rep.reason = "condition 2 fails for every column order";
  } else if (rep.reason.empty()) {
    rep.reason = "greedy column-order search failed for " + std::to_string(n) +
                 " columns (exhaustive limit " + std::to_string(opts.exhaustive_limit) +
                 ")";
  }

  if (!rep.condition1 || (rep.condition2 && !*rep.condition2))
    rep.verdict = Verdict::kFalse;
  else if (!rep.condition2)
    rep.verdict = Verdict::kInconclusive;
  else
    rep.verdict = Verdict::kTrue;
  return rep;
}

inline nlohmann::json to_json(const SeparabilityReport& r) {
  return {{"separable", r.separable},
          {"witness_rows", r.witness_rows},
          {"tol", r.tol},
          {"reason", r.reason}};
}

inline nlohmann::json to_json(const BoundaryCloseReport& r) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const PairWitness& w : r.pair_witnesses)
    pairs.push_back({{"zero_col", w.zero_col}, {"positive_col", w.positive_col},
                     {"row", w.row}});
  nlohmann::json j = {{"verdict", to_string(r.verdict)},
                      {"condition1", r.condition1},
                      {"pair_witnesses", pairs},
                      {"permutation", r.permutation},
                      {"facet_rows", r.facet_rows},
                      {"tol", r.tol},
                      {"reason", r.reason}};
  j["condition2"] = r.condition2 ? nlohmann::json(*r.condition2) : nlohmann::json();
  return j;
}

// ---------------------------------------------------------------------------
// Feature matrices whose column space holds a strongly boundary close,
// full-rank nonnegative factor.

struct CertifiedFeatures {
  Matrix X_r;  // rows x d, full column rank
  Matrix B_r;  // d x k, 0 / positive block pattern
  Matrix F_r;  // X_r B_r
};

/// Sizes of the coefficient blocks feeding factor columns 1..k: (1, 1, 2,
/// ..., k - 1), so d = 1 + k(k - 1) / 2.
inline std::vector<Index> certified_block_sizes(Index k) {
  std::vector<Index> s = {1};
  for (Index i = 2; i <= k; ++i) s.push_back(i - 1);
  return s;
}

namespace detail {

/// Row pattern over the k factor columns; true = positive entries on that
/// column's coefficient block.
inline std::vector<std::vector<bool>> certified_row_patterns(Index k) {
  std::vector<std::vector<bool>> rows;
  std::vector<bool> first(static_cast<size_t>(k), true);
  first[0] = false;
  rows.push_back(first);
  for (Index i = 2; i <= k; ++i)
    for (Index r = 0; r < i - 1; ++r) {
      std::vector<bool> p(static_cast<size_t>(k), false);
      for (Index c = 0; c < i - 1; ++c) p[static_cast<size_t>(c)] = true;
      rows.push_back(p);
    }
  // Rows vanishing on one middle column only: these supply the pairs
  // (zero at i, positive at j > i) of boundary closeness.
  for (Index i = 2; i <= k - 1; ++i) {
    std::vector<bool> p(static_cast<size_t>(k), true);
    p[static_cast<size_t>(i - 1)] = false;
    rows.push_back(p);
  }
  return rows;
}

inline Matrix certified_b(Index k, const std::vector<Index>& sizes,
                          const std::function<double()>& draw) {
  const Index d = std::accumulate(sizes.begin(), sizes.end(), Index(0));
  Matrix b = Matrix::Zero(d, k);
  Index offset = 0;
  for (Index c = 0; c < k; ++c) {
    for (Index t = 0; t < sizes[static_cast<size_t>(c)]; ++t) b(offset + t, c) = draw();
    offset += sizes[static_cast<size_t>(c)];
  }
  return b;
}

inline Matrix rows_from_patterns(const std::vector<std::vector<bool>>& patterns,
                                 const std::vector<Index>& sizes,
                                 const std::function<double()>& draw) {
  const Index d = std::accumulate(sizes.begin(), sizes.end(), Index(0));
  Matrix x = Matrix::Zero(static_cast<Index>(patterns.size()), d);
  for (size_t r = 0; r < patterns.size(); ++r) {
    Index offset = 0;
    for (size_t c = 0; c < sizes.size(); ++c) {
      if (patterns[r][c])
        for (Index t = 0; t < sizes[c]; ++t) x(static_cast<Index>(r), offset + t) = draw();
      offset += sizes[c];
    }
  }
  return x;
}

}  // namespace detail

/// Random member of the certified family for rank k (integer entries in
/// [1, 16] where positivity is prescribed), resampled until F_r = X_r B_r
/// passes the strong boundary closeness check and X_r has full column rank.
inline CertifiedFeatures construct_certified_features(Index k, std::uint64_t seed = 0,
                                                      int max_tries = 200) {
  require(k >= 2, ErrorCode::kBadInput, "certified features need k >= 2");
  require(k <= 16, ErrorCode::kSearchTooLarge, "certified features limited to k <= 16");
  const auto sizes = certified_block_sizes(k);
  const auto patterns = detail::certified_row_patterns(k);
  Rng rng(seed);
  std::uniform_int_distribution<int> ints(1, 16);
  std::uniform_real_distribution<double> unit(0.5, 1.5);
  std::function<double()> draw_x = [&] { return static_cast<double>(ints(rng)); };
  std::function<double()> draw_b = [&] { return unit(rng); };
  for (int attempt = 0; attempt < max_tries; ++attempt) {
    CertifiedFeatures out;
    out.X_r = detail::rows_from_patterns(patterns, sizes, draw_x);
    out.B_r = detail::certified_b(k, sizes, draw_b);
    out.F_r = out.X_r * out.B_r;
    if (!full_column_rank(out.X_r, 1e-9)) continue;
    if (is_strongly_boundary_close(out.F_r).verdict != Verdict::kTrue) continue;
    return out;
  }
  throw Error(ErrorCode::kNonConvergence,
              "could not draw certified features for k = " + std::to_string(k));
}

/// The k = 4 coefficient matrix and the seven feature rows displayed for the
/// certified family, exactly as printed.
inline Matrix paper_k4_B_r() {
  Matrix b = Matrix::Zero(7, 4);
  b(0, 0) = 1;
  b(1, 1) = 1;
  b(2, 2) = b(3, 2) = 1;
  b(4, 3) = b(5, 3) = b(6, 3) = 1;
  return b;
}

inline Matrix paper_k4_X_r() {
  Matrix x(7, 7);
  x << 0, 5, 14, 7, 9, 15, 13,  //
      10, 0, 0, 0, 0, 0, 0,     //
      4, 5, 0, 0, 0, 0, 0,      //
      12, 4, 0, 0, 0, 0, 0,     //
      10, 7, 10, 7, 0, 0, 0,    //
      13, 10, 12, 9, 0, 0, 0,   //
      12, 10, 16, 8, 0, 0, 0;
  return x;
}

inline Matrix paper_k4_F_r() {
  Matrix f(7, 4);
  f << 0, 5, 21, 37,  //
      10, 0, 0, 0,    //
      4, 5, 0, 0,     //
      12, 4, 0, 0,    //
      10, 7, 17, 0,   //
      13, 10, 21, 0,  //
      12, 10, 24, 0;
  return f;
}

/// The printed k = 4 rows followed by the extra rows of the certified
/// family (zero on one middle column), drawn from `seed`.
inline CertifiedFeatures paper_k4_completed(std::uint64_t seed = 0) {
  const auto sizes = certified_block_sizes(4);
  const auto all = detail::certified_row_patterns(4);
  const std::vector<std::vector<bool>> extras(all.begin() + 7, all.end());
  Rng rng(seed);
  std::uniform_int_distribution<int> ints(1, 16);
  std::function<double()> draw = [&] { return static_cast<double>(ints(rng)); };
  const Matrix tail = detail::rows_from_patterns(extras, sizes, draw);
  CertifiedFeatures out;
  out.X_r.resize(7 + tail.rows(), 7);
  out.X_r << paper_k4_X_r(), tail;
  out.B_r = paper_k4_B_r();
  out.F_r = out.X_r * out.B_r;
  return out;
}

}  // namespace halsx

#endif  // HALSX_IDENTIFIABILITY_HPP_
