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

// Batch front end: simulate, sample, fit, predict, check, bench.
//
// One JSON config per run, with a few flag overrides. Every command writes
// the resolved config to <out_dir>/config.json next to its outputs.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "halsx/halsx.hpp"

namespace {

using namespace halsx;
using nlohmann::json;
namespace fs = std::filesystem;

// Exit codes.
enum Exit : int {
  kOk = 0,
  kInternal = 1,
  kMaxIter = 2,
  kInfeasibleExit = 3,
  kBadInputExit = 4,
  kDivergenceExit = 5,
  kRankDeficientExit = 6,
  kTimeLimitExit = 7,
  kNoSideInfoExit = 8,
  kUnsupportedExit = 9,
  kSearchTooLargeExit = 10,
};

int exit_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::kBadInput: return kBadInputExit;
    case ErrorCode::kInfeasible: return kInfeasibleExit;
    case ErrorCode::kRankDeficient: return kRankDeficientExit;
    case ErrorCode::kNonConvergence: return kMaxIter;
    case ErrorCode::kDivergence: return kDivergenceExit;
    case ErrorCode::kNoSideInformation: return kNoSideInfoExit;
    case ErrorCode::kSearchTooLarge: return kSearchTooLargeExit;
    case ErrorCode::kUnsupported: return kUnsupportedExit;
  }
  return kInternal;
}

int exit_code(StopReason r) {
  switch (r) {
    case StopReason::kConverged: return kOk;
    case StopReason::kMaxIter: return kMaxIter;
    case StopReason::kDiverged: return kDivergenceExit;
    case StopReason::kTimeLimit: return kTimeLimitExit;
  }
  return kInternal;
}

// ---------------------------------------------------------------------------
// Config.

// Reads keys from one JSON object and rejects whatever was not read.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    require(j_.is_object(), ErrorCode::kBadInput, path_ + ": expected an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw Error(ErrorCode::kBadInput,
                  path_ + "." + key + ": wrong type (" + j_.at(key).dump() + ")");
    }
  }
  Section child(const char* key) {
    seen_.insert(key);
    static const json empty = json::object();
    return Section(j_.contains(key) ? j_.at(key) : empty, path_ + "." + key);
  }
  void finish() const {
    for (const auto& [k, v] : j_.items())
      require(seen_.count(k) > 0, ErrorCode::kBadInput, "unknown config key " + path_ + "." + k);
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

struct RunConfig {
  std::string command;
  std::uint64_t seed = 0;
  std::string out_dir = "halsx_out";

  // simulate (also the data source of bench)
  std::string preset = "desk";
  bench::SyntheticSpec synth;
  std::string weights = "gaussian";

  // sample
  std::string sample_matrix;  // default <out_dir>/V.csv
  std::string sample_mask = "temporal_aggregate";
  double sample_rate = 0.3;
  bool sample_periodic = true;
  double sample_noise = 0.0;
  Index sample_rows = 0, sample_cols = 0;  // upper-left block; 0 = everything

  // fit
  std::string fit_mask, fit_measurements, fit_row_features, fit_col_features;
  std::string solver = "halsx";
  std::string link_row = "identity", link_col = "identity";
  SolverConfig solver_cfg;
  Index spline_dim = 5;
  double ridge = 1e-3;
  std::string kernel = "rbf";
  double bandwidth = 0.0;

  // predict
  std::string model_dir;  // default <out_dir>/model
  std::string predict_row_features, predict_col_features;
  Index row_offset = 0, row_count = 0, col_offset = 0, col_count = 0;

  // check
  std::string check_matrix;
  BoundaryCloseOptions check_opts;

  // bench
  bench::SplitSpec split;
  std::string split_mask = "temporal_aggregate";
  std::vector<std::string> methods = {"interpolation", "hals", "halsx_spline"};
  std::vector<Index> ranks = {5};
  std::vector<double> rates = {0.3, 0.5};
  std::vector<std::uint64_t> seeds = {0};
  int bench_max_iter = 200;
  bool timing = false;
  bool svg = true;

  fs::path out() const { return fs::path(out_dir); }
};

const char* weights_name(bench::WeightLaw w) {
  switch (w) {
    case bench::WeightLaw::kGaussian: return "gaussian";
    case bench::WeightLaw::kUniform: return "uniform";
    case bench::WeightLaw::kRectifiedGaussian: return "rectified_gaussian";
  }
  return "unknown";
}

bench::WeightLaw weights_from(const std::string& s) {
  for (auto w : {bench::WeightLaw::kGaussian, bench::WeightLaw::kUniform,
                 bench::WeightLaw::kRectifiedGaussian})
    if (s == weights_name(w)) return w;
  throw Error(ErrorCode::kBadInput, "unknown weight law '" + s + "'");
}

void parse_config(const json& j, RunConfig& c) {
  Section top(j, "config");
  top.get("seed", c.seed);
  top.get("out_dir", c.out_dir);
  {
    Section s = top.child("simulate");
    s.get("preset", c.preset);
    require(c.preset == "desk" || c.preset == "paper", ErrorCode::kBadInput,
            "simulate.preset must be 'desk' or 'paper'");
    if (c.preset == "paper") c.synth = bench::SyntheticSpec::paper_scale();
    s.get("n1", c.synth.n1);
    s.get("n2", c.synth.n2);
    s.get("k", c.synth.k);
    s.get("d1", c.synth.d1);
    s.get("d2", c.synth.d2);
    s.get("row_basis_dim", c.synth.row_basis_dim);
    s.get("col_basis_dim", c.synth.col_basis_dim);
    s.get("weights", c.weights);
    c.synth.weights = weights_from(c.weights);
    s.get("noise", c.synth.noise);
    s.finish();
  }
  {
    Section s = top.child("sample");
    s.get("matrix", c.sample_matrix);
    s.get("mask", c.sample_mask);
    s.get("rate", c.sample_rate);
    s.get("periodic", c.sample_periodic);
    s.get("noise", c.sample_noise);
    s.get("rows", c.sample_rows);
    s.get("cols", c.sample_cols);
    mask_kind_from_string(c.sample_mask);
    s.finish();
  }
  {
    Section s = top.child("fit");
    s.get("mask", c.fit_mask);
    s.get("measurements", c.fit_measurements);
    s.get("row_features", c.fit_row_features);
    s.get("col_features", c.fit_col_features);
    s.get("solver", c.solver);
    s.get("link_row", c.link_row);
    s.get("link_col", c.link_col);
    s.get("rank", c.solver_cfg.rank);
    s.get("max_iter", c.solver_cfg.max_iter);
    s.get("kkt_epsilon", c.solver_cfg.kkt_epsilon);
    s.get("inner_passes", c.solver_cfg.inner_passes);
    s.get("max_seconds", c.solver_cfg.max_seconds);
    s.get("monotone_safeguard", c.solver_cfg.monotone_safeguard);
    s.get("spline_dim", c.spline_dim);
    s.get("ridge", c.ridge);
    s.get("kernel", c.kernel);
    s.get("bandwidth", c.bandwidth);
    s.finish();
  }
  {
    Section s = top.child("predict");
    s.get("model", c.model_dir);
    s.get("row_features", c.predict_row_features);
    s.get("col_features", c.predict_col_features);
    s.get("row_offset", c.row_offset);
    s.get("row_count", c.row_count);
    s.get("col_offset", c.col_offset);
    s.get("col_count", c.col_count);
    s.finish();
  }
  {
    Section s = top.child("check");
    s.get("matrix", c.check_matrix);
    s.get("tol", c.check_opts.tol);
    s.get("exhaustive_limit", c.check_opts.exhaustive_limit);
    s.get("cap", c.check_opts.cap);
    s.finish();
  }
  {
    Section s = top.child("bench");
    s.get("m1", c.split.m1);
    s.get("m2", c.split.m2);
    s.get("mask", c.split_mask);
    s.get("periodic", c.split.periodic);
    s.get("methods", c.methods);
    s.get("ranks", c.ranks);
    s.get("rates", c.rates);
    s.get("seeds", c.seeds);
    s.get("max_iter", c.bench_max_iter);
    s.get("timing", c.timing);
    s.get("svg", c.svg);
    c.split.mask = mask_kind_from_string(c.split_mask);
    for (const auto& m : c.methods) bench::method_from_string(m);
    s.finish();
  }
  top.finish();
}

void validate(const RunConfig& c) {
  require(c.solver == "halsx" || c.solver == "halsx2" || c.solver == "hals",
          ErrorCode::kBadInput, "solver must be halsx, halsx2 or hals");
  link_family_from_string(c.link_row);
  link_family_from_string(c.link_col);
  require(c.kernel == "rbf" || c.kernel == "linear", ErrorCode::kBadInput,
          "fit.kernel must be rbf or linear");
  require(c.solver_cfg.rank >= 1, ErrorCode::kBadInput, "rank must be at least 1");
  require(c.solver_cfg.max_iter >= 0, ErrorCode::kBadInput, "max_iter must be >= 0");
  require(c.sample_rate > 0.0 && c.sample_rate <= 1.0, ErrorCode::kBadInput,
          "sample.rate must be in (0, 1]");
}

json echo(const RunConfig& c) {
  return {
      {"command", c.command},
      {"seed", c.seed},
      {"out_dir", c.out_dir},
      {"simulate",
       {{"preset", c.preset}, {"n1", c.synth.n1}, {"n2", c.synth.n2}, {"k", c.synth.k},
        {"d1", c.synth.d1}, {"d2", c.synth.d2}, {"row_basis_dim", c.synth.row_basis_dim},
        {"col_basis_dim", c.synth.col_basis_dim}, {"weights", weights_name(c.synth.weights)},
        {"noise", c.synth.noise}}},
      {"sample",
       {{"matrix", c.sample_matrix}, {"mask", c.sample_mask}, {"rate", c.sample_rate},
        {"periodic", c.sample_periodic}, {"noise", c.sample_noise}, {"rows", c.sample_rows},
        {"cols", c.sample_cols}}},
      {"fit",
       {{"mask", c.fit_mask}, {"measurements", c.fit_measurements},
        {"row_features", c.fit_row_features}, {"col_features", c.fit_col_features},
        {"solver", c.solver}, {"link_row", c.link_row}, {"link_col", c.link_col},
        {"rank", c.solver_cfg.rank}, {"max_iter", c.solver_cfg.max_iter},
        {"kkt_epsilon", c.solver_cfg.kkt_epsilon}, {"inner_passes", c.solver_cfg.inner_passes},
        {"max_seconds", c.solver_cfg.max_seconds},
        {"monotone_safeguard", c.solver_cfg.monotone_safeguard}, {"spline_dim", c.spline_dim},
        {"ridge", c.ridge}, {"kernel", c.kernel}, {"bandwidth", c.bandwidth}}},
      {"predict",
       {{"model", c.model_dir}, {"row_features", c.predict_row_features},
        {"col_features", c.predict_col_features}, {"row_offset", c.row_offset},
        {"row_count", c.row_count}, {"col_offset", c.col_offset}, {"col_count", c.col_count}}},
      {"check",
       {{"matrix", c.check_matrix}, {"tol", c.check_opts.tol},
        {"exhaustive_limit", c.check_opts.exhaustive_limit}, {"cap", c.check_opts.cap}}},
      {"bench",
       {{"m1", c.split.m1}, {"m2", c.split.m2}, {"mask", c.split_mask},
        {"periodic", c.split.periodic}, {"methods", c.methods}, {"ranks", c.ranks},
        {"rates", c.rates}, {"seeds", c.seeds}, {"max_iter", c.bench_max_iter},
        {"timing", c.timing}, {"svg", c.svg}}},
  };
}

void write_json(const fs::path& p, const json& j) {
  std::ofstream out(p);
  require(out.good(), ErrorCode::kBadInput, "cannot write " + p.string());
  out << j.dump(2) << '\n';
}

std::string or_default(const std::string& path, const fs::path& fallback) {
  return path.empty() ? fallback.string() : path;
}

// ---------------------------------------------------------------------------
// Commands.

int cmd_simulate(const RunConfig& c) {
  bench::SyntheticSpec spec = c.synth;
  spec.seed = c.seed;
  const bench::Synthetic s = bench::simulate(spec);
  io::save_matrix(c.out() / "V.csv", s.V);
  io::save_matrix(c.out() / "X_r.csv", s.X_r);
  io::save_matrix(c.out() / "X_c.csv", s.X_c);
  io::save_matrix(c.out() / "F_r.csv", s.F_r);
  io::save_matrix(c.out() / "F_c.csv", s.F_c);
  auto link_json = [](const bench::TrueLink& l) {
    json terms = json::array();
    for (size_t j = 0; j < l.splines.size(); ++j) {
      const Vector& kn = l.splines[j].knots();
      const Matrix& w = l.weights[j];
      json wj = json::array();
      for (Index r = 0; r < w.rows(); ++r) {
        std::vector<double> row(static_cast<size_t>(w.cols()));
        for (Index q = 0; q < w.cols(); ++q) row[static_cast<size_t>(q)] = w(r, q);
        wj.push_back(row);
      }
      terms.push_back({{"knots", std::vector<double>(kn.data(), kn.data() + kn.size())},
                       {"weights", wj}});
    }
    return terms;
  };
  write_json(c.out() / "true_links.json",
             {{"config", echo(c)},
              {"ramped", true},
              {"row", link_json(s.row_link)},
              {"col", link_json(s.col_link)}});
  std::cout << "simulate: V " << shape_str(s.V.rows(), s.V.cols()) << " rank " << spec.k
            << " -> " << c.out_dir << "\n";
  return kOk;
}

int cmd_sample(const RunConfig& c) {
  Matrix v = io::load_matrix(or_default(c.sample_matrix, c.out() / "V.csv"));
  const Index rows = c.sample_rows > 0 ? c.sample_rows : v.rows();
  const Index cols = c.sample_cols > 0 ? c.sample_cols : v.cols();
  require(rows <= v.rows() && cols <= v.cols(), ErrorCode::kBadInput,
          "sample block larger than the matrix");
  v = v.topLeftCorner(rows, cols).eval();
  const MeasurementOperator op = bench::make_mask(mask_kind_from_string(c.sample_mask), rows,
                                                  cols, c.sample_rate, c.seed,
                                                  c.sample_periodic);
  const Vector b = bench::measure(op, v, c.sample_noise, c.seed);
  io::save_mask(c.out() / "mask.txt", op);
  io::save_measurements(c.out() / "b.csv", b);
  std::cout << "sample: " << op.size() << " " << c.sample_mask << " measurements of a "
            << shape_str(rows, cols) << " block -> " << c.out_dir << "\n";
  return kOk;
}

Features load_features(const std::string& path, Index rows, LinkFamily family,
                       const char* side) {
  if (family == LinkFamily::kIdentity) return Features::identity_of(rows);
  require(!path.empty(), ErrorCode::kBadInput,
          std::string(side) + " link '" + to_string(family) + "' needs a feature file");
  const Matrix x = io::load_matrix(path);
  require(x.rows() >= rows, ErrorCode::kBadInput,
          std::string(side) + " features have " + std::to_string(x.rows()) +
              " rows, the mask needs " + std::to_string(rows));
  // Extra rows are held-out individuals; the fit uses the leading ones.
  return Features::numeric(x.topRows(rows));
}

int cmd_fit(const RunConfig& c) {
  const MeasurementOperator op = io::load_mask(or_default(c.fit_mask, c.out() / "mask.txt"));
  const Vector b = io::load_measurements(or_default(c.fit_measurements, c.out() / "b.csv"));
  require(b.size() == op.size(), ErrorCode::kBadInput,
          "measurement count " + std::to_string(b.size()) + " does not match the mask (" +
              std::to_string(op.size()) + ")");
  SolverConfig cfg = c.solver_cfg;
  cfg.seed = c.seed;
  const bool plain = c.solver == "hals";
  for (auto [opts, name] : {std::pair{&cfg.row_link, &c.link_row},
                            std::pair{&cfg.col_link, &c.link_col}}) {
    opts->family = plain ? LinkFamily::kIdentity : link_family_from_string(*name);
    opts->spline_dim = c.spline_dim;
    opts->ridge = c.ridge;
    opts->kernel.type = c.kernel == "linear" ? KernelSpec::Type::kLinear : KernelSpec::Type::kRbf;
    opts->kernel.bandwidth = c.bandwidth;
  }
  const FeatureSet feats{
      load_features(c.fit_row_features, op.rows(), cfg.row_link.family, "row"),
      load_features(c.fit_col_features, op.cols(), cfg.col_link.family, "column")};
  const FactorModel m = c.solver == "halsx2" ? fit2(op, b, feats, cfg) : fit(op, b, feats, cfg);

  const fs::path dir = c.model_dir.empty() ? c.out() / "model" : fs::path(c.model_dir);
  io::save_model(dir, m, {{"solver", c.solver}, {"config", echo(c)}});
  const double residual = (op.apply(m.product()) - b).norm() / std::max(b.norm(), 1e-300);
  std::cout << "fit: " << c.solver << " rank " << m.rank << " stop " << to_string(m.stop)
            << " after " << m.iterations << " iterations, relative measurement residual "
            << residual << " -> " << dir.string() << "\n";
  if (c.solver == "halsx2" && m.stop != StopReason::kConverged)
    std::cerr << "warning: halsx2 stopped without converging (" << to_string(m.stop)
              << "); its recovery error can be much worse than halsx on sparse samples\n";
  return exit_code(m.stop);
}

std::optional<Matrix> slice_features(const std::string& path, Index offset, Index count) {
  if (path.empty()) return std::nullopt;
  const Matrix x = io::load_matrix(path);
  require(offset >= 0 && offset <= x.rows(), ErrorCode::kBadInput, "offset past the end of " + path);
  const Index n = count > 0 ? count : x.rows() - offset;
  require(n >= 1 && offset + n <= x.rows(), ErrorCode::kBadInput,
          "feature slice out of range in " + path);
  return x.middleRows(offset, n);
}

int cmd_predict(const RunConfig& c) {
  const fs::path dir = c.model_dir.empty() ? c.out() / "model" : fs::path(c.model_dir);
  const FactorModel m = io::load_model(dir);
  const auto xr = slice_features(c.predict_row_features, c.row_offset, c.row_count);
  const auto xc = slice_features(c.predict_col_features, c.col_offset, c.col_count);
  const Prediction p = predict(m, xr, xc);
  fs::create_directories(c.out());
  if (p.row_block) io::save_matrix(c.out() / "predict_row.csv", *p.row_block);
  if (p.col_block) io::save_matrix(c.out() / "predict_col.csv", *p.col_block);
  if (p.rowcol_block) io::save_matrix(c.out() / "predict_rowcol.csv", *p.rowcol_block);
  std::cout << "predict:";
  if (p.row_block) std::cout << " row " << shape_str(p.row_block->rows(), p.row_block->cols());
  if (p.col_block) std::cout << " col " << shape_str(p.col_block->rows(), p.col_block->cols());
  if (p.rowcol_block)
    std::cout << " rowcol " << shape_str(p.rowcol_block->rows(), p.rowcol_block->cols());
  std::cout << " -> " << c.out_dir << "\n";
  return kOk;
}

int cmd_check(const RunConfig& c) {
  require(!c.check_matrix.empty(), ErrorCode::kBadInput, "check.matrix is required");
  const Matrix m = io::load_matrix(c.check_matrix);
  json report = {{"config", echo(c)},
                 {"shape", {m.rows(), m.cols()}},
                 {"full_column_rank", full_column_rank(m, c.check_opts.tol)}};
  report["separability"] = to_json(is_separable(m, c.check_opts.tol));
  try {
    report["strong_boundary_closeness"] = to_json(is_strongly_boundary_close(m, c.check_opts));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kSearchTooLarge) throw;
    report["strong_boundary_closeness"] = {{"verdict", "inconclusive"}, {"reason", e.what()}};
  }
  write_json(c.out() / "check.json", report);
  std::cout << "check: strongly boundary close "
            << report["strong_boundary_closeness"]["verdict"].get<std::string>()
            << ", separable " << report["separability"]["separable"] << " -> "
            << (c.out() / "check.json").string() << "\n";
  return kOk;
}

int cmd_bench(const RunConfig& c) {
  bench::ExperimentOptions opts;
  opts.methods.clear();
  for (const auto& m : c.methods) opts.methods.push_back(bench::method_from_string(m));
  opts.ranks = c.ranks;
  opts.rates = c.rates;
  opts.seeds = c.seeds;
  opts.method.max_iter = c.bench_max_iter;
  opts.method.spline_dim = c.spline_dim;
  opts.method.kernel_ridge = c.ridge;
  const auto rows = bench::run_experiment(c.synth, c.split, opts);
  {
    std::ofstream out(c.out() / "report.csv");
    bench::write_report_csv(out, rows);
  }
  json failures = json::array();
  for (const auto& r : rows)
    if (!r.error.empty())
      failures.push_back({{"method", r.method}, {"rate", r.rate}, {"seed", r.seed},
                          {"error", r.error}});
  write_json(c.out() / "report.json", {{"config", echo(c)}, {"failures", failures}});
  if (c.svg) {
    for (const char* metric : {"recovery_rrmse", "row_rrmse", "col_rrmse", "rowcol_rrmse"}) {
      std::ofstream out(c.out() / (std::string(metric) + ".svg"));
      bench::write_svg_chart(out, rows, metric, metric);
    }
  }
  if (c.timing) {
    bench::TimingOptions to;
    to.dims = {{c.synth.n1, c.synth.n2}};
    to.ranks = c.ranks;
    to.rates = c.rates;
    to.mask = c.split.mask;
    to.periodic = c.split.periodic;
    to.seed = c.seed;
    std::ofstream out(c.out() / "timing.csv");
    bench::write_timing_csv(out, bench::timing_sweep(to));
  }
  std::cout << "bench: " << rows.size() << " rows (" << failures.size() << " failed) -> "
            << (c.out() / "report.csv").string() << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonnegative matrix factorisation with side information"};
  app.require_subcommand(1, 1);
  // Global options may follow the command name.
  app.fallthrough();
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> solver, link_row, link_col, out_dir;
  std::optional<Index> rank;
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--solver", solver, "halsx | halsx2 | hals");
  app.add_option("--link-row", link_row, "row link family: identity | linear | spline | kernel");
  app.add_option("--link-col", link_col, "column link family");
  app.add_option("--rank", rank, "factorisation rank");
  app.add_option("--out-dir", out_dir, "output directory");
  for (const char* name : {"simulate", "sample", "fit", "predict", "check", "bench"})
    app.add_subcommand(name, std::string("run ") + name);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kBadInputExit;
  }

  RunConfig c;
  c.command = app.get_subcommands().front()->get_name();
  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      require(in.good(), ErrorCode::kBadInput, "cannot open config " + config_path);
      json j;
      try {
        j = json::parse(in);
      } catch (const json::exception& e) {
        throw Error(ErrorCode::kBadInput, "config " + config_path + ": " + e.what());
      }
      parse_config(j, c);
    }
    if (seed) c.seed = *seed;
    if (solver) c.solver = *solver;
    if (link_row) c.link_row = *link_row;
    if (link_col) c.link_col = *link_col;
    if (rank) {
      c.solver_cfg.rank = *rank;
      c.ranks = {*rank};
    }
    if (out_dir) c.out_dir = *out_dir;
    validate(c);

    fs::create_directories(c.out());
    write_json(c.out() / "config.json", echo(c));
    if (c.command == "simulate") return cmd_simulate(c);
    if (c.command == "sample") return cmd_sample(c);
    if (c.command == "fit") return cmd_fit(c);
    if (c.command == "predict") return cmd_predict(c);
    if (c.command == "check") return cmd_check(c);
    return cmd_bench(c);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
}
