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

// Text formats:
//   matrix CSV       "rows,cols" header, then one comma-separated line per row
//   measurement CSV  "index,value" header, then "i,b_i"
//   mask             "halsx-mask v1" records, one line per measurement
//   link models      "halsx-link v1" keyword/array records
// Doubles are written with 17 significant digits so files round-trip.

#ifndef HALSX_IO_HPP_
#define HALSX_IO_HPP_

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "halsx/common.hpp"
#include "halsx/linkmodels.hpp"
#include "halsx/operators.hpp"
#include "halsx/solver.hpp"

namespace halsx::io {

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p);
  require(out.good(), ErrorCode::kBadInput, "cannot write " + p.string());
  out << std::setprecision(17);
  return out;
}

inline std::ifstream open_in(const std::filesystem::path& p) {
  std::ifstream in(p);
  require(in.good(), ErrorCode::kBadInput, "cannot read " + p.string());
  return in;
}

inline std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

inline double parse_double(const std::string& s, const std::string& where) {
  try {
    size_t used = 0;
    const double v = std::stod(s, &used);
    while (used < s.size() && std::isspace(static_cast<unsigned char>(s[used]))) ++used;
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::kBadInput, where + ": not a number '" + s + "'");
}

inline Index parse_index(const std::string& s, const std::string& where) {
  const double v = parse_double(s, where);
  require(v >= 0 && v == std::floor(v), ErrorCode::kBadInput,
          where + ": not a nonnegative integer '" + s + "'");
  return static_cast<Index>(v);
}

inline void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Matrices and measurement vectors.

inline void write_matrix(std::ostream& out, const Matrix& m) {
  out << std::setprecision(17);
  out << m.rows() << ',' << m.cols() << '\n';
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << m(i, j);
    out << '\n';
  }
}

inline Matrix read_matrix(std::istream& in, const std::string& name = "matrix") {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::kBadInput,
          name + ": empty file");
  detail::strip_cr(line);
  const auto head = detail::split(line, ',');
  require(head.size() == 2, ErrorCode::kBadInput,
          name + ": header must be 'rows,cols', got '" + line + "'");
  const Index rows = detail::parse_index(head[0], name);
  const Index cols = detail::parse_index(head[1], name);
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    require(static_cast<bool>(std::getline(in, line)), ErrorCode::kBadInput,
            name + ": expected " + std::to_string(rows) + " rows, got " +
                std::to_string(i));
    detail::strip_cr(line);
    const auto cells = detail::split(line, ',');
    require(static_cast<Index>(cells.size()) == cols, ErrorCode::kBadInput,
            name + ": row " + std::to_string(i) + " has " +
                std::to_string(cells.size()) + " values, expected " +
                std::to_string(cols));
    for (Index j = 0; j < cols; ++j)
      m(i, j) = detail::parse_double(cells[static_cast<size_t>(j)], name);
  }
  return m;
}

inline void save_matrix(const std::filesystem::path& p, const Matrix& m) {
  auto out = detail::open_out(p);
  write_matrix(out, m);
}

inline Matrix load_matrix(const std::filesystem::path& p) {
  auto in = detail::open_in(p);
  return read_matrix(in, p.string());
}

inline void write_measurements(std::ostream& out, const Vector& b) {
  out << std::setprecision(17) << "index,value\n";
  for (Index i = 0; i < b.size(); ++i) out << i << ',' << b(i) << '\n';
}

inline Vector read_measurements(std::istream& in, const std::string& name = "measurements") {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::kBadInput,
          name + ": empty file");
  detail::strip_cr(line);
  require(line == "index,value", ErrorCode::kBadInput,
          name + ": header must be 'index,value'");
  std::vector<double> values;
  while (std::getline(in, line)) {
    detail::strip_cr(line);
    if (line.empty()) continue;
    const auto cells = detail::split(line, ',');
    require(cells.size() == 2, ErrorCode::kBadInput, name + ": bad line '" + line + "'");
    const Index i = detail::parse_index(cells[0], name);
    require(i == static_cast<Index>(values.size()), ErrorCode::kBadInput,
            name + ": indices must run 0, 1, 2, ...");
    values.push_back(detail::parse_double(cells[1], name));
  }
  return Eigen::Map<Vector>(values.data(), static_cast<Index>(values.size()));
}

inline void save_measurements(const std::filesystem::path& p, const Vector& b) {
  auto out = detail::open_out(p);
  write_measurements(out, b);
}

inline Vector load_measurements(const std::filesystem::path& p) {
  auto in = detail::open_in(p);
  return read_measurements(in, p.string());
}

// ---------------------------------------------------------------------------
// Masks.
//
//   halsx-mask v1
//   kind <complete|completion|gaussian_sensing|rank_one|temporal_aggregate>
//   shape <n1> <n2>
//   count <N>
//   <N records>
// Records: completion "row col"; aggregate "col start length"; gaussian the
// n1*n2 row-major mask entries; rank_one the n1 entries of a, then the n2
// entries of b. The complete family has no records.

inline void write_mask(std::ostream& out, const MeasurementOperator& op) {
  out << std::setprecision(17);
  out << "halsx-mask v1\n"
      << "kind " << to_string(op.kind()) << '\n'
      << "shape " << op.rows() << ' ' << op.cols() << '\n'
      << "count " << op.size() << '\n';
  auto row_out = [&](const auto& v) {
    for (Index j = 0; j < v.size(); ++j) out << (j ? " " : "") << v(j);
  };
  switch (op.kind()) {
    case MaskKind::kComplete:
      break;
    case MaskKind::kCompletion:
      for (const Entry& e : op.entries()) out << e.row << ' ' << e.col << '\n';
      break;
    case MaskKind::kTemporalAggregate:
      for (const AggregateSpan& s : op.spans())
        out << s.col << ' ' << s.start << ' ' << s.length << '\n';
      break;
    case MaskKind::kGaussianSensing:
      for (Index i = 0; i < op.size(); ++i) {
        row_out(op.sensing_masks().row(i));
        out << '\n';
      }
      break;
    case MaskKind::kRankOne:
      for (Index i = 0; i < op.size(); ++i) {
        row_out(op.alphas().row(i));
        out << ' ';
        row_out(op.betas().row(i));
        out << '\n';
      }
      break;
  }
}

inline MeasurementOperator read_mask(std::istream& in, const std::string& name = "mask") {
  std::string line, key;
  auto expect_line = [&](const std::string& what) {
    require(static_cast<bool>(std::getline(in, line)), ErrorCode::kBadInput,
            name + ": missing " + what);
    detail::strip_cr(line);
    return std::istringstream(line);
  };
  expect_line("header");
  require(line == "halsx-mask v1", ErrorCode::kBadInput,
          name + ": not a halsx-mask v1 file");
  std::string kind_name;
  auto ks = expect_line("kind");
  ks >> key >> kind_name;
  require(key == "kind", ErrorCode::kBadInput, name + ": expected 'kind'");
  const MaskKind kind = mask_kind_from_string(kind_name);
  Index n1 = 0, n2 = 0, n = 0;
  auto ss = expect_line("shape");
  ss >> key >> n1 >> n2;
  require(key == "shape" && !ss.fail(), ErrorCode::kBadInput, name + ": bad 'shape'");
  auto cs = expect_line("count");
  cs >> key >> n;
  require(key == "count" && !cs.fail() && n >= 0, ErrorCode::kBadInput,
          name + ": bad 'count'");

  auto record = [&](Index i, Index width) {
    auto rs = expect_line("record " + std::to_string(i));
    Vector v(width);
    for (Index j = 0; j < width; ++j) {
      std::string tok;
      require(static_cast<bool>(rs >> tok), ErrorCode::kBadInput,
              name + ": record " + std::to_string(i) + " too short");
      v(j) = detail::parse_double(tok, name);
    }
    std::string extra;
    require(!(rs >> extra), ErrorCode::kBadInput,
            name + ": record " + std::to_string(i) + " too long");
    return v;
  };

  switch (kind) {
    case MaskKind::kComplete:
      require(n == n1 * n2, ErrorCode::kBadInput, name + ": complete mask count must be n1*n2");
      return MeasurementOperator::complete(n1, n2);
    case MaskKind::kCompletion: {
      std::vector<Entry> entries;
      for (Index i = 0; i < n; ++i) {
        const Vector r = record(i, 2);
        entries.push_back({static_cast<Index>(r(0)), static_cast<Index>(r(1))});
      }
      return MeasurementOperator::completion(n1, n2, std::move(entries));
    }
    case MaskKind::kTemporalAggregate: {
      std::vector<AggregateSpan> spans;
      for (Index i = 0; i < n; ++i) {
        const Vector r = record(i, 3);
        spans.push_back({static_cast<Index>(r(0)), static_cast<Index>(r(1)),
                         static_cast<Index>(r(2))});
      }
      return MeasurementOperator::temporal_aggregate(n1, n2, std::move(spans));
    }
    case MaskKind::kGaussianSensing: {
      Matrix flat(n, n1 * n2);
      for (Index i = 0; i < n; ++i) flat.row(i) = record(i, n1 * n2).transpose();
      return MeasurementOperator::gaussian_sensing(n1, n2, std::move(flat));
    }
    case MaskKind::kRankOne: {
      Matrix a(n, n1), b(n, n2);
      for (Index i = 0; i < n; ++i) {
        const Vector r = record(i, n1 + n2);
        a.row(i) = r.head(n1).transpose();
        b.row(i) = r.tail(n2).transpose();
      }
      return MeasurementOperator::rank_one(n1, n2, std::move(a), std::move(b));
    }
  }
  throw Error(ErrorCode::kBadInput, name + ": unsupported mask kind");
}

inline void save_mask(const std::filesystem::path& p, const MeasurementOperator& op) {
  auto out = detail::open_out(p);
  write_mask(out, op);
}

inline MeasurementOperator load_mask(const std::filesystem::path& p) {
  auto in = detail::open_in(p);
  return read_mask(in, p.string());
}

// ---------------------------------------------------------------------------
// Link models.
//
//   halsx-link v1
//   family <identity|linear|spline|kernel>
//   then family-specific records; vectors as "name <n> v...", matrices as
//   "name <rows> <cols> v..." (row-major), scalars as "name v".

namespace detail {

class TokenReader {
 public:
  TokenReader(std::istream& in, std::string name) : in_(in), name_(std::move(name)) {}

  std::string word() {
    std::string t;
    require(static_cast<bool>(in_ >> t), ErrorCode::kBadInput,
            name_ + ": unexpected end of link data");
    return t;
  }
  void expect(const std::string& key) {
    const std::string t = word();
    require(t == key, ErrorCode::kBadInput,
            name_ + ": expected '" + key + "', got '" + t + "'");
  }
  double number() { return parse_double(word(), name_); }
  Index count() { return parse_index(word(), name_); }
  double scalar(const std::string& key) {
    expect(key);
    return number();
  }
  Vector vector(const std::string& key) {
    expect(key);
    Vector v(count());
    for (Index i = 0; i < v.size(); ++i) v(i) = number();
    return v;
  }
  Matrix matrix(const std::string& key) {
    expect(key);
    const Index r = count();
    const Index c = count();
    Matrix m(r, c);
    for (Index i = 0; i < r; ++i)
      for (Index j = 0; j < c; ++j) m(i, j) = number();
    return m;
  }

 private:
  std::istream& in_;
  std::string name_;
};

inline void put_vector(std::ostream& out, const char* key, const Vector& v) {
  out << key << ' ' << v.size();
  for (Index i = 0; i < v.size(); ++i) out << ' ' << v(i);
  out << '\n';
}

inline void put_matrix(std::ostream& out, const char* key, const Matrix& m) {
  out << key << ' ' << m.rows() << ' ' << m.cols();
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) out << ' ' << m(i, j);
  out << '\n';
}

}  // namespace detail

inline void write_link(std::ostream& out, const LinkModel& link) {
  out << std::setprecision(17);
  out << "halsx-link v1\nfamily " << to_string(link.family()) << '\n';
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, IdentityLink>) {
          detail::put_vector(out, "values", p.values);
        } else if constexpr (std::is_same_v<T, LinearLink>) {
          detail::put_vector(out, "coef", p.coef);
        } else if constexpr (std::is_same_v<T, SplineLink>) {
          out << "lambda " << p.lambda << '\n'
              << "effective_penalty " << p.effective_penalty << '\n'
              << "terms " << p.design->inputs() << '\n';
          for (Index j = 0; j < p.design->inputs(); ++j) {
            const auto u = static_cast<size_t>(j);
            detail::put_vector(out, "knots", p.design->splines()[u].knots());
            detail::put_matrix(out, "constraint", p.design->constraints()[u]);
            detail::put_matrix(out, "penalty", p.design->term_penalties()[u]);
          }
          detail::put_vector(out, "coef", p.coef);
        } else {
          out << "kernel "
              << (p.data->spec.type == KernelSpec::Type::kRbf ? "rbf" : "linear") << '\n'
              << "bandwidth " << p.data->spec.bandwidth << '\n'
              << "ridge " << p.ridge << '\n';
          detail::put_matrix(out, "train", p.data->train);
          detail::put_vector(out, "weights", p.weights);
        }
      },
      link.payload());
}

inline LinkModel read_link(std::istream& in, const std::string& name = "link") {
  detail::TokenReader r(in, name);
  r.expect("halsx-link");
  r.expect("v1");
  r.expect("family");
  const LinkFamily family = link_family_from_string(r.word());
  switch (family) {
    case LinkFamily::kIdentity:
      return LinkModel(IdentityLink{r.vector("values")});
    case LinkFamily::kLinear:
      return LinkModel(LinearLink{r.vector("coef")});
    case LinkFamily::kSpline: {
      SplineLink s;
      s.lambda = r.scalar("lambda");
      s.effective_penalty = r.scalar("effective_penalty");
      r.expect("terms");
      const Index terms = r.count();
      std::vector<CubicBSpline> splines;
      std::vector<Matrix> z, pen;
      for (Index j = 0; j < terms; ++j) {
        splines.emplace_back(r.vector("knots"));
        z.push_back(r.matrix("constraint"));
        pen.push_back(r.matrix("penalty"));
        require(z.back().rows() == splines.back().dim(), ErrorCode::kBadInput,
                name + ": constraint does not match spline dimension");
      }
      s.design = std::make_shared<const AdditiveSplineDesign>(std::move(splines),
                                                              std::move(z), std::move(pen));
      s.coef = r.vector("coef");
      require(s.coef.size() == s.design->params(), ErrorCode::kBadInput,
              name + ": spline coefficient count does not match the design");
      return LinkModel(std::move(s));
    }
    case LinkFamily::kKernelRidge: {
      auto data = std::make_shared<KernelData>();
      r.expect("kernel");
      const std::string type = r.word();
      require(type == "rbf" || type == "linear", ErrorCode::kBadInput,
              name + ": unknown kernel '" + type + "'");
      data->spec.type = type == "rbf" ? KernelSpec::Type::kRbf : KernelSpec::Type::kLinear;
      data->spec.bandwidth = r.scalar("bandwidth");
      KernelLink k;
      k.ridge = r.scalar("ridge");
      data->train = r.matrix("train");
      k.weights = r.vector("weights");
      require(k.weights.size() == data->train.rows(), ErrorCode::kBadInput,
              name + ": kernel weights do not match the training rows");
      k.data = std::move(data);
      return LinkModel(std::move(k));
    }
  }
  throw Error(ErrorCode::kBadInput, name + ": unsupported link family");
}

/// A side's k links in one file: "links <k>" followed by k link records.
inline void write_links(std::ostream& out, const std::vector<LinkModel>& links) {
  out << "links " << links.size() << '\n';
  for (const LinkModel& l : links) write_link(out, l);
}

inline std::vector<LinkModel> read_links(std::istream& in, const std::string& name = "links") {
  detail::TokenReader r(in, name);
  r.expect("links");
  const Index k = r.count();
  std::vector<LinkModel> links;
  for (Index i = 0; i < k; ++i)
    links.push_back(read_link(in, name + " #" + std::to_string(i)));
  return links;
}

// ---------------------------------------------------------------------------
// Fitted models: a directory holding F_r.csv, F_c.csv, V.csv (HALSX only),
// row_links.txt, col_links.txt, trace.csv and model.json.

inline void write_trace(std::ostream& out, const std::vector<TraceRow>& trace) {
  out << std::setprecision(17) << "iter,objective,kkt_residual,seconds\n";
  for (const TraceRow& t : trace)
    out << t.iter << ',' << t.objective << ',' << t.kkt << ',' << t.seconds << '\n';
}

inline std::vector<TraceRow> read_trace(std::istream& in, const std::string& name = "trace") {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::kBadInput, name + ": empty");
  std::vector<TraceRow> rows;
  while (std::getline(in, line)) {
    detail::strip_cr(line);
    if (line.empty()) continue;
    const auto c = detail::split(line, ',');
    require(c.size() == 4, ErrorCode::kBadInput, name + ": bad line '" + line + "'");
    TraceRow t;
    t.iter = static_cast<int>(detail::parse_index(c[0], name));
    t.objective = detail::parse_double(c[1], name);
    t.kkt = detail::parse_double(c[2], name);
    t.seconds = detail::parse_double(c[3], name);
    rows.push_back(t);
  }
  return rows;
}

inline void save_model(const std::filesystem::path& dir, const FactorModel& m,
                       const nlohmann::json& extra = nlohmann::json::object()) {
  std::filesystem::create_directories(dir);
  save_matrix(dir / "F_r.csv", m.F_r);
  save_matrix(dir / "F_c.csv", m.F_c);
  if (m.V.size() > 0) save_matrix(dir / "V.csv", m.V);
  {
    auto out = detail::open_out(dir / "row_links.txt");
    write_links(out, m.row_links);
  }
  {
    auto out = detail::open_out(dir / "col_links.txt");
    write_links(out, m.col_links);
  }
  {
    auto out = detail::open_out(dir / "trace.csv");
    write_trace(out, m.trace);
  }
  nlohmann::json meta = {{"rank", m.rank},
                         {"stop", to_string(m.stop)},
                         {"iterations", m.iterations},
                         {"kkt_initial", m.kkt_initial},
                         {"seconds", m.seconds}};
  for (const auto& [k, v] : extra.items()) meta[k] = v;
  auto out = detail::open_out(dir / "model.json");
  out << meta.dump(2) << '\n';
}

inline FactorModel load_model(const std::filesystem::path& dir) {
  FactorModel m;
  m.F_r = load_matrix(dir / "F_r.csv");
  m.F_c = load_matrix(dir / "F_c.csv");
  if (std::filesystem::exists(dir / "V.csv")) m.V = load_matrix(dir / "V.csv");
  for (const char* side : {"row_links.txt", "col_links.txt"}) {
    require(std::filesystem::exists(dir / side), ErrorCode::kBadInput,
            "model directory lacks " + std::string(side) + " (link serialization)");
  }
  {
    auto in = detail::open_in(dir / "row_links.txt");
    m.row_links = read_links(in, "row_links.txt");
  }
  {
    auto in = detail::open_in(dir / "col_links.txt");
    m.col_links = read_links(in, "col_links.txt");
  }
  if (std::filesystem::exists(dir / "trace.csv")) {
    auto in = detail::open_in(dir / "trace.csv");
    m.trace = read_trace(in);
  }
  auto in = detail::open_in(dir / "model.json");
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kBadInput, "model.json: " + std::string(e.what()));
  }
  m.rank = meta.value("rank", static_cast<Index>(m.F_r.cols()));
  m.iterations = meta.value("iterations", 0);
  m.kkt_initial = meta.value("kkt_initial", 0.0);
  m.seconds = meta.value("seconds", 0.0);
  const std::string stop = meta.value("stop", std::string("max_iter"));
  for (StopReason r : {StopReason::kConverged, StopReason::kMaxIter, StopReason::kDiverged,
                       StopReason::kTimeLimit})
    if (stop == to_string(r)) m.stop = r;
  require(static_cast<Index>(m.row_links.size()) == m.F_r.cols() &&
              static_cast<Index>(m.col_links.size()) == m.F_c.cols(),
          ErrorCode::kBadInput, "model link counts do not match the factor ranks");
  return m;
}

}  // namespace halsx::io

#endif  // HALSX_IO_HPP_
