#pragma once

// JSON and CSV for forms, curvature data and path reports.
//
// Form documents use 1-based indices:
//   {"n":3, "r":2, "p":1, "q":1,
//    "terms":[{"I":[1], "J":[2], "re":[[..],[..]], "im":[[..],[..]]}],
//    "omega_weights":[1,1,1]}          (optional)
// A curvature document is the (1,1)-form i F itself.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mvf/continuation.hpp"
#include "mvf/ellipticity.hpp"
#include "mvf/error.hpp"
#include "mvf/forms.hpp"
#include "mvf/models.hpp"
#include "mvf/report.hpp"

namespace mvf {

using json = nlohmann::json;

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline json matrix_part(const CMatrix& m, bool imag) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(imag ? m(i, j).imag() : m(i, j).real());
    rows.push_back(std::move(row));
  }
  return rows;
}

inline CMatrix matrix_from(const json& re, const json* im, int r, const std::string& where) {
  auto read = [&](const json& part, const char* what) {
    if (!part.is_array() || static_cast<int>(part.size()) != r)
      throw ParseError(where + ": '" + what + "' must be an array of " + std::to_string(r) + " rows");
    Eigen::MatrixXd m(r, r);
    for (int i = 0; i < r; ++i) {
      const json& row = part[i];
      if (!row.is_array() || static_cast<int>(row.size()) != r)
        throw ParseError(where + ": row " + std::to_string(i) + " of '" + what + "' must have " + std::to_string(r) + " entries");
      for (int j = 0; j < r; ++j) {
        if (!row[j].is_number()) throw ParseError(where + ": non-numeric entry in '" + what + "'");
        m(i, j) = row[j].get<double>();
      }
    }
    return m;
  };
  CMatrix out = read(re, "re").cast<cplx>();
  if (im) out += kI * read(*im, "im").cast<cplx>();
  return out;
}

inline std::vector<int> indices_from(const json& v, int n, const std::string& where) {
  if (!v.is_array()) throw ParseError(where + ": index list must be an array");
  std::vector<int> out;
  for (const json& x : v) {
    if (!x.is_number_integer()) throw ParseError(where + ": indices must be integers");
    const int i = x.get<int>();
    if (i < 1 || i > n) throw ParseError(where + ": index " + std::to_string(i) + " outside 1.." + std::to_string(n));
    out.push_back(i - 1);
  }
  return out;
}

inline json get_field(const json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
  return doc.at(key);
}

}  // namespace detail

inline json form_to_json(const MatrixForm& f) {
  json terms = json::array();
  for (const auto& [k, m] : f.terms()) {
    json I = json::array(), J = json::array();
    for (int i : indices_of(k.dz)) I.push_back(i + 1);
    for (int j : indices_of(k.dzbar)) J.push_back(j + 1);
    terms.push_back({{"I", I}, {"J", J}, {"re", detail::matrix_part(m, false)}, {"im", detail::matrix_part(m, true)}});
  }
  return {{"n", f.dim()}, {"r", f.rank()}, {"p", f.p()}, {"q", f.q()}, {"terms", terms}};
}

inline MatrixForm form_from_json(const json& doc) {
  const json jn = detail::get_field(doc, "n"), jr = detail::get_field(doc, "r");
  if (!jn.is_number_integer() || !jr.is_number_integer()) throw ParseError("'n' and 'r' must be integers");
  const int n = jn.get<int>(), r = jr.get<int>();
  if (n < 1 || n > kMaxDim) throw ParseError("'n' must lie in 1.." + std::to_string(kMaxDim));
  if (r < 1) throw ParseError("'r' must be positive");
  const json terms = detail::get_field(doc, "terms");
  if (!terms.is_array()) throw ParseError("'terms' must be an array");

  int p = doc.contains("p") ? doc.at("p").get<int>() : -1;
  int q = doc.contains("q") ? doc.at("q").get<int>() : -1;
  if (p < 0 || q < 0) {
    if (terms.empty()) throw ParseError("an empty form needs explicit 'p' and 'q'");
    p = static_cast<int>(terms[0].at("I").size());
    q = static_cast<int>(terms[0].at("J").size());
  }
  MatrixForm f(n, r, p, q);
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const std::string where = "terms[" + std::to_string(t) + "]";
    const json& term = terms[t];
    const auto I = detail::indices_from(detail::get_field(term, "I"), n, where);
    const auto J = detail::indices_from(detail::get_field(term, "J"), n, where);
    if (static_cast<int>(I.size()) != p || static_cast<int>(J.size()) != q)
      throw ParseError(where + ": degree differs from (" + std::to_string(p) + "," + std::to_string(q) + ")");
    const json re = detail::get_field(term, "re");
    const json* im = term.contains("im") ? &term.at("im") : nullptr;
    try {
      f.add(I, J, detail::matrix_from(re, im, r, where));
    } catch (const ContractError& e) {
      throw ParseError(where + ": " + e.what());
    }
  }
  return f;
}

/// A curvature input: the (1,1)-form iF and the Kahler weights (ones by default).
struct CurvatureInput {
  CurvatureData data;
  std::vector<double> omega_weights;
};

inline json curvature_to_json(const CurvatureData& c, const std::vector<double>& omega_weights = {}) {
  json doc = form_to_json(assemble(c));
  if (!omega_weights.empty()) doc["omega_weights"] = omega_weights;
  return doc;
}

inline CurvatureInput curvature_from_json(const json& doc) {
  CurvatureInput in;
  MatrixForm f = form_from_json(doc);
  if (f.p() != 1 || f.q() != 1) throw ParseError("curvature must be a (1,1)-form");
  try {
    in.data = disassemble(f);
  } catch (const ContractError& e) {
    throw ParseError(std::string("curvature is not of the form iF with F skew-Hermitian: ") + e.what());
  }
  if (doc.contains("omega_weights")) {
    const json& w = doc.at("omega_weights");
    if (!w.is_array() || static_cast<int>(w.size()) != in.data.n)
      throw ParseError("'omega_weights' must list one weight per direction");
    for (const json& x : w) {
      if (!x.is_number() || !(x.get<double>() > 0.0)) throw ParseError("'omega_weights' must be positive numbers");
      in.omega_weights.push_back(x.get<double>());
    }
  } else {
    in.omega_weights.assign(in.data.n, 1.0);
  }
  return in;
}

inline json read_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ParseError("cannot open " + path);
  try {
    return json::parse(is);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << text;
}

// Non-finite values become null so the document stays valid JSON.
inline json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

inline json checks_to_json(const std::vector<Check>& checks) {
  json out = json::array();
  for (const auto& c : checks) {
    json j = {{"name", c.name}, {"value", num(c.value)}, {"tolerance", num(c.tolerance)},
              {"relation", c.relation}, {"pass", c.pass}, {"gating", c.gating}};
    if (c.relation == "|x-target|<=") j["target"] = num(c.target);
    out.push_back(std::move(j));
  }
  return out;
}

inline json probe_to_json(const RankOneMinimum& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.probe.a.size(); ++i) a.push_back({m.probe.a(i).real(), m.probe.a(i).imag()});
  return {{"value", num(m.value)},
          {"starts", m.starts},
          {"a", a},
          {"g", {{"re", detail::matrix_part(m.probe.g, false)}, {"im", detail::matrix_part(m.probe.g, true)}}}};
}

inline json path_report_to_json(const PathReport& rep) {
  json rows = json::array();
  for (const auto& row : rep.rows) {
    json labels = json::object();
    for (const auto& [k, v] : row.labels) labels[k] = num(v);
    rows.push_back({{"t", row.t},
                    {"labels", labels},
                    {"unknowns", row.unknowns},
                    {"residual_norm", num(row.residual_norm)},
                    {"offdiag_max", num(row.offdiag_max)},
                    {"K", num(row.K)},
                    {"alpha", num(row.triple.alpha)},
                    {"beta", num(row.triple.beta)},
                    {"gamma", num(row.triple.gamma)},
                    {"witness", num(row.witness)},
                    {"symbol_scan_min", num(row.symbol_scan_min)},
                    {"jacobian_condition", num(row.jacobian_condition)},
                    {"newton_iterations", row.newton_iterations}});
  }
  return {{"equation", rep.equation},
          {"k", rep.k},
          {"n", rep.n},
          {"eps", rep.eps},
          {"theta", rep.theta},
          {"delta", rep.delta},
          {"theta_hat", rep.theta_hat},
          {"seed", rep.seed},
          {"unknowns", rep.unknown_names},
          {"amplitude_fit",
           {{"amp_sq", num(rep.fit.amp_sq)},
            {"intercept", num(rep.fit.intercept)},
            {"slope", num(rep.fit.slope)},
            {"affine_residual", num(rep.fit.affine_residual)}}},
          {"rows", rows}};
}

inline std::string csv_number(double x) {
  if (std::isnan(x)) return "nan";
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

/// t,p,q,r,s,u,v,x,y,z,a,b,c, one row per point.
inline std::string path_table_csv(const std::vector<PathPoint>& pts) {
  std::ostringstream os;
  os << "t";
  for (const char* c : kPathColumns) os << ',' << c;
  os << '\n';
  for (const auto& pt : pts) {
    os << csv_number(pt.t);
    for (const char* c : kPathColumns) os << ',' << csv_number(pt.labels.at(c));
    os << '\n';
  }
  return os.str();
}

/// Path table columns followed by
/// residual_norm,offdiag_max,K,alpha,beta,gamma,witness,symbol_scan_min,jacobian_condition,newton_iterations.
inline std::string path_report_csv(const PathReport& rep) {
  std::ostringstream os;
  os << "t";
  for (const char* c : kPathColumns) os << ',' << c;
  os << ",residual_norm,offdiag_max,K,alpha,beta,gamma,witness,symbol_scan_min,jacobian_condition,newton_iterations\n";
  for (const auto& row : rep.rows) {
    os << csv_number(row.t);
    for (const char* c : kPathColumns) os << ',' << csv_number(row.labels.at(c));
    for (double x : {row.residual_norm, row.offdiag_max, row.K, row.triple.alpha, row.triple.beta, row.triple.gamma,
                     row.witness, row.symbol_scan_min, row.jacobian_condition})
      os << ',' << csv_number(x);
    os << ',' << row.newton_iterations << '\n';
  }
  return os.str();
}

}  // namespace mvf
