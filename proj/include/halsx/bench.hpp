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

#ifndef HALSX_BENCH_HPP_
#define HALSX_BENCH_HPP_

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "halsx/common.hpp"
#include "halsx/linkmodels.hpp"
#include "halsx/operators.hpp"
#include "halsx/solver.hpp"
#include "halsx/solver2.hpp"
#include "halsx/splines.hpp"

namespace halsx::bench {

// ---------------------------------------------------------------------------
// Synthetic data.

enum class WeightLaw { kGaussian, kUniform, kRectifiedGaussian };

struct SyntheticSpec {
  Index n1 = 60, n2 = 72, k = 5, d1 = 3, d2 = 4;
  // Per feature coordinate. 11 matches the paper-scale 33/44-term bases;
  // a 40 x 48 training block cannot identify that many, so desk scale uses 5.
  Index row_basis_dim = 5;
  Index col_basis_dim = 5;
  // Gaussian weights truncate part of each factor at zero; uniform(0, 1)
  // weights give strictly positive links.
  WeightLaw weights = WeightLaw::kGaussian;
  double noise = 0.0;  // sd of Gaussian noise added to measurements
  std::uint64_t seed = 0;

  static SyntheticSpec paper_scale() {
    SyntheticSpec s;
    s.n1 = 150;
    s.n2 = 180;
    s.k = 20;
    s.row_basis_dim = s.col_basis_dim = 11;
    return s;
  }
};

/// Additive random-weight spline map R^d -> R^k (before the ramp).
struct TrueLink {
  std::vector<CubicBSpline> splines;  // one per coordinate
  std::vector<Matrix> weights;        // L_j x k each

  Matrix raw(const Matrix& x) const {
    Matrix out = Matrix::Zero(x.rows(), weights.front().cols());
    for (size_t j = 0; j < splines.size(); ++j)
      out += splines[j].design(x.col(static_cast<Index>(j))) * weights[j];
    return out;
  }
  Matrix evaluate(const Matrix& x) const { return ramp(raw(x)); }
};

struct Synthetic {
  Matrix V;  // n1 x n2 ground truth
  Matrix X_r, X_c;
  Matrix F_r, F_c;
  TrueLink row_link, col_link;
};

inline TrueLink random_link(const Matrix& x, Index dim, Index k, WeightLaw law, Rng& rng) {
  TrueLink link;
  for (Index j = 0; j < x.cols(); ++j) {
    link.splines.push_back(CubicBSpline::from_quantiles(x.col(j), dim));
    Matrix w = law == WeightLaw::kUniform ? uniform_matrix(dim, k, rng)
                                          : gaussian_matrix(dim, k, rng);
    if (law == WeightLaw::kRectifiedGaussian) w = ramp(w);
    link.weights.push_back(std::move(w));
  }
  return link;
}

inline Synthetic simulate(const SyntheticSpec& spec) {
  require(spec.k >= 1 && spec.k <= std::min(spec.n1, spec.n2), ErrorCode::kBadInput,
          "synthetic rank must satisfy 1 <= k <= min(n1, n2)");
  require(spec.d1 >= 1 && spec.d2 >= 1, ErrorCode::kBadInput,
          "feature dimensions must be >= 1");
  Rng rng(spec.seed);
  Synthetic s;
  s.X_r = gaussian_matrix(spec.n1, spec.d1, rng);
  s.X_c = gaussian_matrix(spec.n2, spec.d2, rng);
  s.row_link = random_link(s.X_r, spec.row_basis_dim, spec.k, spec.weights, rng);
  s.col_link = random_link(s.X_c, spec.col_basis_dim, spec.k, spec.weights, rng);
  s.F_r = s.row_link.evaluate(s.X_r);
  s.F_c = s.col_link.evaluate(s.X_c);
  s.V = s.F_r * s.F_c.transpose();
  return s;
}

inline Vector measure(const MeasurementOperator& op, const Matrix& v, double noise,
                      std::uint64_t seed) {
  Vector b = op.apply(v);
  if (noise > 0.0) {
    Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
    b += gaussian_matrix(b.size(), 1, rng, noise);
  }
  return b;
}

// ---------------------------------------------------------------------------
// Errors.

inline double rrmse(const Matrix& v, const Matrix& ref) {
  require(v.rows() == ref.rows() && v.cols() == ref.cols(), ErrorCode::kBadInput,
          "rrmse: shapes differ (" + shape_str(v.rows(), v.cols()) + " vs " +
              shape_str(ref.rows(), ref.cols()) + ")");
  const double den = ref.norm();
  require(den > 0.0, ErrorCode::kBadInput, "rrmse: reference has zero norm");
  return (v - ref).norm() / den;
}

struct Block {
  Index row, col, rows, cols;
};

/// The four evaluation blocks of an n1 x n2 matrix with an m1 x m2 training
/// corner: training (upper left), row (lower left), column (upper right),
/// row-column (lower right).
struct Blocks {
  Block train, row, col, rowcol;
};

inline Blocks split_blocks(Index n1, Index n2, Index m1, Index m2) {
  require(m1 >= 1 && m1 <= n1 && m2 >= 1 && m2 <= n2, ErrorCode::kBadInput,
          "training block must fit inside the matrix");
  return {{0, 0, m1, m2}, {m1, 0, n1 - m1, m2}, {0, m2, m1, n2 - m2},
          {m1, m2, n1 - m1, n2 - m2}};
}

inline Matrix block_of(const Matrix& m, const Block& b) {
  return m.block(b.row, b.col, b.rows, b.cols);
}

/// Full-matrix RRMSE from per-block RRMSEs: the blocks partition the matrix,
/// so squared errors add.
inline double recombine(const std::vector<double>& block_rrmse,
                        const std::vector<double>& block_ref_norm) {
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < block_rrmse.size(); ++i) {
    num += std::pow(block_rrmse[i] * block_ref_norm[i], 2);
    den += block_ref_norm[i] * block_ref_norm[i];
  }
  return std::sqrt(num / den);
}

// ---------------------------------------------------------------------------
// Masks for the training block.

inline MeasurementOperator make_mask(MaskKind kind, Index m1, Index m2, double rate,
                                     std::uint64_t seed, bool periodic = true) {
  require(rate > 0.0 && rate <= 1.0, ErrorCode::kBadInput, "rate must be in (0, 1]");
  switch (kind) {
    case MaskKind::kComplete:
      return MeasurementOperator::complete(m1, m2);
    case MaskKind::kCompletion:
      return make_random_completion(m1, m2, rate, seed);
    case MaskKind::kGaussianSensing:
      return make_gaussian_sensing(
          m1, m2, std::max<Index>(1, std::lround(rate * m1 * m2)), seed);
    case MaskKind::kRankOne:
      return make_rank_one(m1, m2, std::max<Index>(1, std::lround(rate * m1 * m2)), seed);
    case MaskKind::kTemporalAggregate:
      if (periodic) {
        const Index period = std::clamp<Index>(std::lround(1.0 / rate), 1, m1);
        return make_periodic_aggregates(m1, m2, period);
      }
      return make_random_aggregates(m1, m2, rate, seed);
  }
  throw Error(ErrorCode::kBadInput, "unknown mask kind");
}

/// Spreads each aggregate evenly over its covered cells; uncovered cells
/// stay 0 and are counted in `uncovered`.
inline Matrix interpolation_baseline(const MeasurementOperator& op, const Vector& b,
                                     Index* uncovered = nullptr) {
  require(op.kind() == MaskKind::kTemporalAggregate, ErrorCode::kBadInput,
          "interpolation baseline needs a temporal-aggregate operator");
  require(b.size() == op.size(), ErrorCode::kBadInput,
          "measurement vector length does not match operator");
  Matrix v = Matrix::Zero(op.rows(), op.cols());
  const auto& spans = op.spans();
  for (size_t i = 0; i < spans.size(); ++i) {
    const AggregateSpan& s = spans[i];
    v.col(s.col).segment(s.start, s.length).setConstant(
        b(static_cast<Index>(i)) / static_cast<double>(s.length));
  }
  if (uncovered) *uncovered = (!op.coverage().array()).count();
  return v;
}

// ---------------------------------------------------------------------------
// Methods.

enum class Method {
  kInterpolation,   // aggregates spread evenly, then per-column/row spline regression
  kHals,            // identity features, then spline regression on the factors
  kHalsxLinear,
  kHalsxSpline,
  kHalsxKernel,
  kHals2,           // sampling-error variant, identity features
};

inline const char* to_string(Method m) {
  switch (m) {
    case Method::kInterpolation: return "interpolation";
    case Method::kHals: return "hals";
    case Method::kHalsxLinear: return "halsx_linear";
    case Method::kHalsxSpline: return "halsx_spline";
    case Method::kHalsxKernel: return "halsx_kernel";
    case Method::kHals2: return "hals2";
  }
  return "unknown";
}

inline Method method_from_string(const std::string& s) {
  for (Method m : {Method::kInterpolation, Method::kHals, Method::kHalsxLinear,
                   Method::kHalsxSpline, Method::kHalsxKernel, Method::kHals2})
    if (s == to_string(m)) return m;
  throw Error(ErrorCode::kBadInput, "unknown bench method '" + s + "'");
}

inline bool rank_free(Method m) { return m == Method::kInterpolation; }

struct MethodOptions {
  Index spline_dim = 5;  // per coordinate, for fitted links and regressions
  double kernel_ridge = 1e-3;
  int max_iter = 200;
  double kkt_epsilon = 1e-4;
  std::uint64_t seed = 0;
};

struct Estimate {
  Matrix recovered;                     // training block
  std::optional<Matrix> row, col, rowcol;
  int iters = 0;
  StopReason stop = StopReason::kConverged;
};

inline Matrix with_intercept(const Matrix& x) {
  Matrix out(x.rows(), x.cols() + 1);
  out.col(0).setOnes();
  out.rightCols(x.cols()) = x;
  return out;
}

namespace detail {

/// Ramped spline regression of every column of `targets` on `x_train`,
/// evaluated at `x_new`.
inline Matrix regress_columns(const Matrix& x_train, const Matrix& targets,
                              const Matrix& x_new, const MethodOptions& mo) {
  LinkOptions lo;
  lo.spline_dim = mo.spline_dim;
  SplineFitter fitter(x_train, lo);
  Matrix out(x_new.rows(), targets.cols());
  for (Index j = 0; j < targets.cols(); ++j)
    out.col(j) = fitter.fit(targets.col(j), 1.0).evaluate(x_new);
  return out;
}

}  // namespace detail

struct Problem {
  const Synthetic* sim = nullptr;
  Blocks blocks;
  const MeasurementOperator* op = nullptr;
  Vector b;
};

inline Estimate run_method(Method method, const Problem& p, Index rank,
                           const MethodOptions& mo) {
  const Synthetic& s = *p.sim;
  const Index m1 = p.blocks.train.rows, m2 = p.blocks.train.cols;
  const Matrix xr = s.X_r.topRows(m1), xc = s.X_c.topRows(m2);
  const Matrix xr_new = s.X_r.bottomRows(s.X_r.rows() - m1);
  const Matrix xc_new = s.X_c.bottomRows(s.X_c.rows() - m2);
  const bool has_rows = xr_new.rows() > 0, has_cols = xc_new.rows() > 0;
  Estimate est;

  if (method == Method::kInterpolation) {
    est.recovered = interpolation_baseline(*p.op, p.b);
    // Each training column regressed on row features predicts new rows, each
    // training row regressed on column features predicts new columns.
    if (has_rows) est.row = detail::regress_columns(xr, est.recovered, xr_new, mo);
    if (has_cols)
      est.col = detail::regress_columns(xc, est.recovered.transpose(), xc_new, mo)
                    .transpose();
    if (has_rows && has_cols)
      est.rowcol =
          detail::regress_columns(xc, est.row->transpose(), xc_new, mo).transpose();
    est.iters = 0;
    return est;
  }

  SolverConfig cfg;
  cfg.rank = rank;
  cfg.max_iter = mo.max_iter;
  cfg.kkt_epsilon = mo.kkt_epsilon;
  cfg.seed = mo.seed;
  FeatureSet feats{Features::identity_of(m1), Features::identity_of(m2)};
  switch (method) {
    case Method::kHalsxLinear:
      feats = {Features::numeric(with_intercept(xr)), Features::numeric(with_intercept(xc))};
      cfg.row_link.family = cfg.col_link.family = LinkFamily::kLinear;
      break;
    case Method::kHalsxSpline:
      feats = {Features::numeric(xr), Features::numeric(xc)};
      cfg.row_link.family = cfg.col_link.family = LinkFamily::kSpline;
      cfg.row_link.spline_dim = cfg.col_link.spline_dim = mo.spline_dim;
      break;
    case Method::kHalsxKernel:
      feats = {Features::numeric(xr), Features::numeric(xc)};
      cfg.row_link.family = cfg.col_link.family = LinkFamily::kKernelRidge;
      cfg.row_link.ridge = cfg.col_link.ridge = mo.kernel_ridge;
      break;
    default:
      break;
  }

  FactorModel model = method == Method::kHals2 ? fit2(*p.op, p.b, feats, cfg)
                                               : fit(*p.op, p.b, feats, cfg);
  est.iters = model.iterations;
  est.stop = model.stop;
  est.recovered = model.V.size() > 0 ? model.V : model.product();

  if (method == Method::kHals || method == Method::kHals2) {
    // Post-hoc regression of the fitted factors on the features.
    std::optional<Matrix> g_r, g_c;
    if (has_rows) g_r = detail::regress_columns(xr, model.F_r, xr_new, mo);
    if (has_cols) g_c = detail::regress_columns(xc, model.F_c, xc_new, mo);
    if (g_r) est.row = *g_r * model.F_c.transpose();
    if (g_c) est.col = model.F_r * g_c->transpose();
    if (g_r && g_c) est.rowcol = *g_r * g_c->transpose();
    return est;
  }

  const Matrix pr = method == Method::kHalsxLinear ? with_intercept(xr_new) : xr_new;
  const Matrix pc = method == Method::kHalsxLinear ? with_intercept(xc_new) : xc_new;
  Prediction pred = predict(model, has_rows ? std::optional<Matrix>(pr) : std::nullopt,
                            has_cols ? std::optional<Matrix>(pc) : std::nullopt);
  est.row = pred.row_block;
  est.col = pred.col_block;
  est.rowcol = pred.rowcol_block;
  return est;
}

// ---------------------------------------------------------------------------
// Experiment sweep.

struct SplitSpec {
  Index m1 = 40, m2 = 48;
  MaskKind mask = MaskKind::kTemporalAggregate;
  bool periodic = true;  // aggregates only
};

struct ReportRow {
  std::string method;
  std::string mask;
  double rate = 0.0;
  Index rank = 0;
  std::uint64_t seed = 0;
  double recovery = std::numeric_limits<double>::quiet_NaN();
  double row = std::numeric_limits<double>::quiet_NaN();
  double col = std::numeric_limits<double>::quiet_NaN();
  double rowcol = std::numeric_limits<double>::quiet_NaN();
  double seconds = 0.0;
  int iters = 0;
  std::string error;  // nonempty when the run failed
};

inline std::string mask_label(const SplitSpec& split) {
  if (split.mask == MaskKind::kTemporalAggregate)
    return split.periodic ? "periodic_aggregate" : "random_aggregate";
  return to_string(split.mask);
}

struct ExperimentOptions {
  std::vector<Method> methods = {Method::kInterpolation, Method::kHals,
                                 Method::kHalsxSpline};
  std::vector<Index> ranks = {5};
  std::vector<double> rates = {0.3, 0.5};
  std::vector<std::uint64_t> seeds = {0};
  MethodOptions method;
  bool keep_all_ranks = false;  // otherwise one best-rank row per (method, rate, seed)
};

/// Fits every method on measurements of the training block and scores it on
/// all four blocks. The best rank is the one with the lowest recovery error.
inline std::vector<ReportRow> run_experiment(const SyntheticSpec& spec,
                                             const SplitSpec& split,
                                             const ExperimentOptions& opts) {
  std::vector<ReportRow> rows;
  for (std::uint64_t seed : opts.seeds) {
    SyntheticSpec sp = spec;
    sp.seed = seed;
    const Synthetic sim = simulate(sp);
    const Blocks blocks = split_blocks(sp.n1, sp.n2, split.m1, split.m2);
    const Matrix v_train = block_of(sim.V, blocks.train);
    for (double rate : opts.rates) {
      const MeasurementOperator op =
          make_mask(split.mask, split.m1, split.m2, rate, seed, split.periodic);
      Problem problem{&sim, blocks, &op, measure(op, v_train, sp.noise, seed)};
      for (Method method : opts.methods) {
        std::vector<ReportRow> candidates;
        const std::vector<Index> ranks =
            rank_free(method) ? std::vector<Index>{0} : opts.ranks;
        for (Index rank : ranks) {
          ReportRow row;
          row.method = to_string(method);
          row.mask = mask_label(split);
          row.rate = rate;
          row.rank = rank;
          row.seed = seed;
          const auto t0 = std::chrono::steady_clock::now();
          try {
            MethodOptions mo = opts.method;
            mo.seed = seed;
            Estimate est = run_method(method, problem, std::max<Index>(rank, 1), mo);
            row.recovery = rrmse(est.recovered, v_train);
            if (est.row) row.row = rrmse(*est.row, block_of(sim.V, blocks.row));
            if (est.col) row.col = rrmse(*est.col, block_of(sim.V, blocks.col));
            if (est.rowcol) row.rowcol = rrmse(*est.rowcol, block_of(sim.V, blocks.rowcol));
            row.iters = est.iters;
          } catch (const std::exception& e) {
            row.error = e.what();
          }
          row.seconds =
              std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
          candidates.push_back(row);
        }
        if (opts.keep_all_ranks) {
          rows.insert(rows.end(), candidates.begin(), candidates.end());
          continue;
        }
        auto best = candidates.begin();
        for (auto it = candidates.begin(); it != candidates.end(); ++it) {
          const bool better = it->error.empty() &&
                              (!best->error.empty() || it->recovery < best->recovery);
          if (better) best = it;
        }
        rows.push_back(*best);
      }
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const ReportRow& a, const ReportRow& b) {
    return std::tie(a.method, a.mask, a.rate, a.seed, a.rank) <
           std::tie(b.method, b.mask, b.rate, b.seed, b.rank);
  });
  return rows;
}

inline void write_report_csv(std::ostream& out, const std::vector<ReportRow>& rows,
                             bool with_timing = true) {
  out << "method,mask,rate,rank,recovery_rrmse,row_rrmse,col_rrmse,rowcol_rrmse,"
         "seconds,iters\n";
  out << std::setprecision(10);
  for (const ReportRow& r : rows) {
    auto num = [](double v) {
      std::ostringstream s;
      if (std::isnan(v)) return std::string();
      s << std::setprecision(10) << v;
      return s.str();
    };
    out << r.method << ',' << r.mask << ',' << r.rate << ',' << r.rank << ','
        << num(r.recovery) << ',' << num(r.row) << ',' << num(r.col) << ','
        << num(r.rowcol) << ',' << (with_timing ? num(r.seconds) : std::string("0"))
        << ',' << r.iters << '\n';
  }
}

// ---------------------------------------------------------------------------
// Timing.

struct TimingRow {
  std::string solver;
  Index n1 = 0, n2 = 0, rank = 0, measurements = 0;
  double rate = 0.0;
  int iters = 0;
  double per_iter = 0.0;  // median wall time of one outer iteration
  double total = 0.0;
  double recovery = 0.0;
};

struct TimingOptions {
  std::vector<std::pair<Index, Index>> dims = {{60, 72}};
  std::vector<Index> ranks = {5};
  std::vector<double> rates = {0.1, 0.2, 0.4, 0.8};
  MaskKind mask = MaskKind::kCompletion;
  bool periodic = true;
  int iterations = 10;  // fixed iteration budget per run
  std::uint64_t seed = 0;
};

inline double median_iteration_seconds(const FactorModel& m) {
  std::vector<double> t;
  for (const TraceRow& r : m.trace)
    if (r.seconds > 0.0) t.push_back(r.seconds);
  if (t.empty()) return 0.0;
  std::sort(t.begin(), t.end());
  return t[t.size() / 2];
}

inline std::vector<TimingRow> timing_sweep(const TimingOptions& opts) {
  std::vector<TimingRow> rows;
  for (const auto& [n1, n2] : opts.dims) {
    for (Index rank : opts.ranks) {
      SyntheticSpec spec;
      spec.n1 = n1;
      spec.n2 = n2;
      spec.k = std::min<Index>(rank, std::min(n1, n2));
      spec.seed = opts.seed;
      const Synthetic sim = simulate(spec);
      for (double rate : opts.rates) {
        const MeasurementOperator op =
            make_mask(opts.mask, n1, n2, rate, opts.seed, opts.periodic);
        const Vector b = op.apply(sim.V);
        const FeatureSet feats{Features::identity_of(n1), Features::identity_of(n2)};
        SolverConfig cfg;
        cfg.rank = rank;
        cfg.max_iter = opts.iterations;
        cfg.kkt_epsilon = 1e-300;
        cfg.divergence_window = opts.iterations + 1;
        cfg.seed = opts.seed;
        for (int which = 0; which < 2; ++which) {
          FactorModel m = which == 0 ? fit(op, b, feats, cfg) : fit2(op, b, feats, cfg);
          TimingRow row;
          row.solver = which == 0 ? "halsx" : "halsx2";
          row.n1 = n1;
          row.n2 = n2;
          row.rank = rank;
          row.measurements = op.size();
          row.rate = rate;
          row.iters = m.iterations;
          row.per_iter = median_iteration_seconds(m);
          row.total = m.seconds;
          row.recovery = rrmse(m.V.size() > 0 ? m.V : m.product(), sim.V);
          rows.push_back(row);
        }
      }
    }
  }
  return rows;
}

inline void write_timing_csv(std::ostream& out, const std::vector<TimingRow>& rows) {
  out << "solver,n1,n2,rank,rate,N,iters,seconds_per_iter,seconds_total,recovery_rrmse\n";
  out << std::setprecision(10);
  for (const TimingRow& r : rows)
    out << r.solver << ',' << r.n1 << ',' << r.n2 << ',' << r.rank << ',' << r.rate << ','
        << r.measurements << ',' << r.iters << ',' << r.per_iter << ',' << r.total << ','
        << r.recovery << '\n';
}

// ---------------------------------------------------------------------------
// SVG line chart of one error column against the sampling rate.

inline void write_svg_chart(std::ostream& out, const std::vector<ReportRow>& rows,
                            const std::string& metric, const std::string& title) {
  auto value = [&](const ReportRow& r) {
    if (metric == "row_rrmse") return r.row;
    if (metric == "col_rrmse") return r.col;
    if (metric == "rowcol_rrmse") return r.rowcol;
    return r.recovery;
  };
  // Mean over seeds per (method, rate).
  std::map<std::string, std::map<double, std::pair<double, int>>> series;
  double vmax = 0.0, rmin = 1.0, rmax = 0.0;
  for (const ReportRow& r : rows) {
    const double v = value(r);
    if (!r.error.empty() || std::isnan(v)) continue;
    auto& cell = series[r.method][r.rate];
    cell.first += v;
    cell.second += 1;
  }
  for (auto& [m, pts] : series)
    for (auto& [rate, acc] : pts) {
      vmax = std::max(vmax, acc.first / acc.second);
      rmin = std::min(rmin, rate);
      rmax = std::max(rmax, rate);
    }
  if (vmax <= 0.0) vmax = 1.0;
  if (rmax <= rmin) rmax = rmin + 1.0;
  const double w = 640, h = 400, pad = 60;
  auto px = [&](double rate) { return pad + (rate - rmin) / (rmax - rmin) * (w - 2 * pad); };
  auto py = [&](double v) { return h - pad - v / vmax * (h - 2 * pad); };
  const char* palette[] = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02"};
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << w / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
      << title << "</text>\n";
  out << "<line x1=\"" << pad << "\" y1=\"" << h - pad << "\" x2=\"" << w - pad
      << "\" y2=\"" << h - pad << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << pad << "\" y1=\"" << pad << "\" x2=\"" << pad << "\" y2=\""
      << h - pad << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << w / 2 << "\" y=\"" << h - 20
      << "\" text-anchor=\"middle\" font-size=\"12\">sampling rate</text>\n";
  out << "<text x=\"16\" y=\"" << h / 2 << "\" font-size=\"12\" transform=\"rotate(-90 16 "
      << h / 2 << ")\" text-anchor=\"middle\">" << metric << "</text>\n";
  out << "<text x=\"" << pad - 6 << "\" y=\"" << pad << "\" text-anchor=\"end\" "
      << "font-size=\"10\">" << vmax << "</text>\n";
  int c = 0;
  for (const auto& [method, pts] : series) {
    const char* color = palette[c % 6];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& [rate, acc] : pts) out << px(rate) << ',' << py(acc.first / acc.second) << ' ';
    out << "\"/>\n";
    for (const auto& [rate, acc] : pts) {
      (void)acc;
      out << "<text x=\"" << px(rate) << "\" y=\"" << h - pad + 14
          << "\" text-anchor=\"middle\" font-size=\"10\">" << rate << "</text>\n";
    }
    out << "<text x=\"" << w - pad + 4 << "\" y=\"" << pad + 16 * c << "\" fill=\"" << color
        << "\" font-size=\"11\">" << method << "</text>\n";
    ++c;
  }
  out << "</svg>\n";
}

}  // namespace halsx::bench

#endif  // HALSX_BENCH_HPP_
