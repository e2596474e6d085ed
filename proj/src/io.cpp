#include "graphlim/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace graphlim {

namespace {

std::vector<double> doubles_from(const json& j, const char* what) {
  if (!j.is_array()) throw ValidationError(std::string(what) + " must be an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& x : j) {
    if (!x.is_number()) throw ValidationError(std::string(what) + " must contain numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

Mat matrix_from(const json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw ValidationError(std::string(what) + " must be a matrix");
  int rows = static_cast<int>(j.size());
  int cols = static_cast<int>(j[0].size());
  Mat m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    if (!j[r].is_array() || static_cast<int>(j[r].size()) != cols)
      throw ValidationError(std::string(what) + " must be rectangular");
    for (int c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

json matrix_to(const Mat& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json finite_or_null(double x) {
  if (std::isfinite(x)) return json(x);
  return json();
}

}  // namespace

WeightedGraph graph_from_json(const json& j) {
  if (!j.contains("vertex_weights")) throw ValidationError("graph JSON needs vertex_weights");
  std::vector<double> w = doubles_from(j.at("vertex_weights"), "vertex_weights");
  int n = static_cast<int>(w.size());
  Mat b = Mat::square(n, 0.0);
  std::set<std::pair<int, int>> seen;
  if (j.contains("edges")) {
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 3)
        throw ValidationError("edges must be [u, v, beta] triples");
      int u = e[0].get<int>(), v = e[1].get<int>();
      double beta = e[2].get<double>();
      if (u < 0 || v < 0 || u >= n || v >= n) throw ValidationError("edge index out of range");
      auto key = std::minmax(u, v);
      if (!seen.insert(key).second)
        throw ValidationError("duplicate edge entry for (" + std::to_string(u) + "," +
                              std::to_string(v) + ")");
      b(u, v) = beta;
      b(v, u) = beta;  // symmetric closure
    }
  }
  return WeightedGraph(std::move(w), std::move(b));
}

json graph_to_json(const WeightedGraph& g) {
  json j;
  j["vertex_weights"] = g.vertex_weights();
  json edges = json::array();
  for (int u = 0; u < g.n(); ++u)
    for (int v = u; v < g.n(); ++v)
      if (g.beta(u, v) != 0.0) edges.push_back(json::array({u, v, g.beta(u, v)}));
  j["edges"] = std::move(edges);
  return j;
}

StepGraphon graphon_from_json(const json& j) {
  if (!j.contains("step_lengths") || !j.contains("values"))
    throw ValidationError("graphon JSON needs step_lengths and values");
  return StepGraphon(doubles_from(j.at("step_lengths"), "step_lengths"),
                     matrix_from(j.at("values"), "values"));
}

json graphon_to_json(const StepGraphon& w) {
  json j;
  j["step_lengths"] = w.step_lengths();
  j["values"] = matrix_to(w.values());
  return j;
}

CouplingModel model_from_json(const json& j) {
  if (!j.contains("J") || !j.contains("a") || !j.contains("eps"))
    throw ValidationError("model JSON needs J, a and eps");
  Mat jm = matrix_from(j.at("J"), "J");
  std::vector<double> h;
  if (j.contains("h") && !j.at("h").is_null()) h = doubles_from(j.at("h"), "h");
  std::vector<double> a = doubles_from(j.at("a"), "a");
  return CouplingModel(std::move(jm), std::move(h), std::move(a), j.at("eps").get<double>());
}

json model_to_json(const CouplingModel& m) {
  json j;
  j["J"] = matrix_to(m.j);
  j["h"] = m.h;
  j["a"] = m.a;
  j["eps"] = m.eps;
  return j;
}

Quotient quotient_from_json(const json& j) {
  Quotient s;
  s.alpha = doubles_from(j.at("alpha"), "alpha");
  s.beta = matrix_from(j.at("beta"), "beta");
  if (s.beta.rows() != static_cast<int>(s.alpha.size()) || s.beta.cols() != s.beta.rows())
    throw ValidationError("quotient beta must be q x q");
  return s;
}

json quotient_to_json(const Quotient& s) {
  json j;
  j["alpha"] = s.alpha;
  j["beta"] = matrix_to(s.beta);
  return j;
}

QuotientSet quotient_set_from_json(const json& j) {
  QuotientSet out;
  for (const auto& p : j.at("points")) out.points.push_back(quotient_from_json(p));
  if (j.contains("meta")) {
    const json& m = j.at("meta");
    out.meta.q = m.value("q", 0);
    out.meta.mesh = m.value("mesh", 0.0);
    out.meta.samples = m.value("samples", 0LL);
    out.meta.seed = m.value("seed", 0ULL);
    out.meta.covering_radius =
        m.contains("covering_radius") && m.at("covering_radius").is_number()
            ? m.at("covering_radius").get<double>()
            : std::numeric_limits<double>::infinity();
    out.meta.winf_used = m.value("winf_used", 0.0);
  }
  return out;
}

json quotient_set_to_json(const QuotientSet& s) {
  json j;
  json pts = json::array();
  for (const auto& p : s.points) pts.push_back(quotient_to_json(p));
  j["points"] = std::move(pts);
  j["meta"] = {{"q", s.meta.q},
               {"mesh", s.meta.mesh},
               {"samples", s.meta.samples},
               {"seed", s.meta.seed},
               {"covering_radius", finite_or_null(s.meta.covering_radius)},
               {"winf_used", s.meta.winf_used}};
  return j;
}

json distance_bound_to_json(const DistanceBound& b) {
  return json{{"lower", b.lower}, {"upper", b.upper}, {"exact", b.exact}};
}

json partition_to_json(const VertexPartition& p) {
  return json{{"assignment", p.assignment}, {"q", p.q}};
}

json energy_result_to_json(const EnergyResult& r) {
  json j;
  j["value"] = r.value;
  j["exact"] = r.exact_flag;
  j["method"] = r.method;
  j["resolution"] = finite_or_null(r.resolution);
  if (r.opt_map) j["optimizer"] = partition_to_json(*r.opt_map);
  if (r.opt_rho) {
    j["optimizer"] = {{"step_lengths", r.opt_rho->step_lengths()},
                      {"weights", matrix_to(r.opt_rho->weights())}};
  }
  return j;
}

json rate_estimate_to_json(const RateEstimate& r) {
  const char* method = r.method == LdMethod::kExactEnumeration ? "exact_enumeration"
                       : r.method == LdMethod::kExactMultinomial ? "exact_multinomial"
                                                                  : "monte_carlo";
  json j;
  j["value"] = finite_or_null(r.value);
  j["n"] = r.n;
  j["eps"] = r.eps;
  j["method"] = method;
  j["probability"] = r.probability;
  j["stderr"] = r.stderr_value;
  j["samples"] = r.samples;
  return j;
}

json regularity_report_to_json(const RegularityReport& r) {
  const char* kind = r.kind == RegKind::kLp          ? "Lp"
                     : r.kind == RegKind::kUniform   ? "uniform"
                                                     : "equipartition";
  json j;
  j["kind"] = kind;
  j["verdict"] = r.pass ? "pass" : "fail";
  j["certified"] = r.certified;
  j["note"] = r.note;
  if (r.witness) j["witness"] = partition_to_json(*r.witness);
  if (!r.pass) {
    j["witness_value"] = r.witness_value;
    j["witness_threshold"] = r.witness_threshold;
    j["witness_eps"] = r.witness_eps;
  }
  return j;
}

json weak_regularity_to_json(const WeakRegularityResult& r) {
  json j;
  j["partition"] = partition_to_json(r.partition);
  j["lower_evidence"] = r.lower_evidence;
  j["upper_evidence"] = r.upper_evidence;
  j["upper_exact"] = r.upper_exact;
  j["rounds"] = r.rounds;
  j["target"] = r.target;
  return j;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file: " + path);
  json j;
  in >> j;
  return j;
}

void save_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write file: " + path);
  out << j.dump(2) << "\n";
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return std::string(buf);
}

CsvWriter::CsvWriter(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void CsvWriter::add_row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_.size()) throw ValidationError("csv row width mismatch");
  rows_.push_back(cells);
}

void CsvWriter::add_row_values(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_double(v));
  add_row(cells);
}

std::string CsvWriter::str() const {
  std::ostringstream out;
  out << "# graphlim-report v1\n";
  for (size_t i = 0; i < columns_.size(); ++i)
    out << columns_[i] << (i + 1 < columns_.size() ? "," : "\n");
  for (const auto& row : rows_) {
    for (size_t i = 0; i < row.size(); ++i) out << row[i] << (i + 1 < row.size() ? "," : "\n");
  }
  return out.str();
}

void CsvWriter::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write file: " + path);
  out << str();
}

}  // namespace graphlim
