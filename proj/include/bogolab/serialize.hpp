#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bogolab/harness.hpp"
#include "bogolab/model.hpp"

// JSON and CSV interchange. Numbers are written with enough digits to
// round-trip exactly; keys are sorted by the json library, so output is
// byte-stable across runs.

namespace bogolab {

using nlohmann::json;

inline json json_of_cx(const Cx& z) { return json::array({z.real(), z.imag()}); }

inline Cx cx_of_json(const json& j) {
  if (!j.is_array() || j.size() != 2) fail(ErrorCode::IoError, "complex entries are [re, im]");
  return Cx(j[0].get<double>(), j[1].get<double>());
}

inline json json_of_vec(const Vec& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(json_of_cx(v[i]));
  return out;
}

inline Vec vec_of_json(const json& j) {
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = cx_of_json(j[i]);
  return v;
}

inline json json_of_mat(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(json_of_cx(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Mat mat_of_json(const json& j) {
  const auto nr = static_cast<Eigen::Index>(j.size());
  const auto nc = nr > 0 ? static_cast<Eigen::Index>(j[0].size()) : 0;
  Mat m(nr, nc);
  for (Eigen::Index r = 0; r < nr; ++r) {
    if (static_cast<Eigen::Index>(j[static_cast<std::size_t>(r)].size()) != nc)
      fail(ErrorCode::IoError, "ragged matrix rows");
    for (Eigen::Index c = 0; c < nc; ++c)
      m(r, c) = cx_of_json(j[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]);
  }
  return m;
}

// Interaction tensor as a flat list in index order m*d^3 + n*d^2 + p*d + q.
inline json json_of_tensor(const Tensor4& w) {
  const int d = w.dim();
  json out = json::array();
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n)
      for (int p = 0; p < d; ++p)
        for (int q = 0; q < d; ++q) out.push_back(json_of_cx(w.at(m, n, p, q)));
  return out;
}

inline Tensor4 tensor_of_json(const json& j, int d) {
  if (j.size() != static_cast<std::size_t>(d) * d * d * d)
    fail(ErrorCode::IoError, "tensor length does not match d^4");
  Tensor4 w(d);
  std::size_t i = 0;
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n)
      for (int p = 0; p < d; ++p)
        for (int q = 0; q < d; ++q) w.at(m, n, p, q) = cx_of_json(j[i++]);
  return w;
}

inline json to_json(const ModeProblem& p) {
  json j;
  j["d"] = p.d;
  j["name"] = p.name;
  j["shift"] = p.shift;
  j["T"] = json_of_mat(p.T);
  j["W"] = json_of_tensor(p.W);
  if (p.W2) j["W2"] = json_of_tensor(*p.W2);
  return j;
}

// The stored "shift" is derived data and is recomputed by the validator.
inline ModeProblem problem_of_json(const json& j) {
  const int d = j.at("d").get<int>();
  const Mat T = mat_of_json(j.at("T"));
  if (T.rows() != d || T.cols() != d) fail(ErrorCode::IoError, "T shape is not d x d");
  const Tensor4 W = tensor_of_json(j.at("W"), d);
  std::optional<Tensor4> W2;
  if (j.contains("W2")) W2 = tensor_of_json(j.at("W2"), d);
  return validate_problem(T, W, std::move(W2), j.value("name", "unnamed"));
}

inline json to_json(const HartreeState& st) {
  json j;
  j["c"] = json_of_vec(st.c);
  j["mu"] = st.mu;
  j["energy"] = st.energy;
  j["residual"] = st.residual;
  j["kind"] = st.kind;
  j["hessian_min_eig"] = st.hessian_min_eig;
  return j;
}

inline HartreeState state_of_json(const json& j) {
  HartreeState st;
  st.c = vec_of_json(j.at("c"));
  st.mu = j.at("mu").get<double>();
  st.energy = j.at("energy").get<double>();
  st.residual = j.at("residual").get<double>();
  st.kind = j.value("kind", "unknown");
  st.hessian_min_eig = j.value("hessian_min_eig", 0.0);
  return st;
}

inline json to_json(const BogoliubovSpectrum& s) {
  json j;
  json e = json::array();
  for (Eigen::Index i = 0; i < s.e.size(); ++i) e.push_back(s.e[i]);
  j["e"] = std::move(e);
  j["E0"] = s.E0;
  j["stability"] = s.stability;
  j["eta"] = s.eta;
  j["zero_modes"] = s.zero_modes;
  if (std::isfinite(s.depletion)) j["depletion"] = s.depletion;
  if (s.U.size() > 0) {
    j["U"] = json_of_mat(s.U);
    j["V"] = json_of_mat(s.V);
  }
  return j;
}

inline BogoliubovSpectrum spectrum_of_json(const json& j) {
  BogoliubovSpectrum s;
  const auto& e = j.at("e");
  s.e.resize(static_cast<Eigen::Index>(e.size()));
  for (std::size_t i = 0; i < e.size(); ++i) s.e[static_cast<Eigen::Index>(i)] = e[i].get<double>();
  s.E0 = j.value("E0", std::numeric_limits<double>::quiet_NaN());
  s.stability = j.at("stability").get<std::string>();
  s.eta = j.value("eta", 0.0);
  s.zero_modes = j.value("zero_modes", 0);
  s.depletion = j.value("depletion", std::numeric_limits<double>::quiet_NaN());
  if (j.contains("U")) {
    s.U = mat_of_json(j.at("U"));
    s.V = mat_of_json(j.at("V"));
  }
  return s;
}

// ---- reports ---------------------------------------------------------------

inline json to_json(const ComparisonReport& rep) {
  json j;
  j["model"] = rep.model;
  j["condensate"] = rep.condensate;
  j["e_hartree"] = rep.e_hartree;
  j["stability"] = rep.stability;
  if (!rep.note.empty()) j["note"] = rep.note;
  json rows = json::array();
  for (const auto& r : rep.rows) {
    json jr;
    jr["N"] = r.N;
    jr["l"] = r.l;
    jr["exact_excitation"] = r.exact_excitation;
    jr["bog_level"] = r.bog_level;
    jr["gap"] = r.gap;
    jr["nplus"] = r.nplus;
    rows.push_back(std::move(jr));
  }
  j["rows"] = std::move(rows);
  return j;
}

inline std::string report_csv(const ComparisonReport& rep) {
  std::ostringstream os;
  os << "N,l,exact_excitation,bog_level,gap,nplus\n";
  for (const auto& r : rep.rows)
    os << r.N << ',' << r.l << ',' << fmt17(r.exact_excitation) << ',' << fmt17(r.bog_level) << ','
       << fmt17(r.gap) << ',' << fmt17(r.nplus) << '\n';
  return os.str();
}

inline ComparisonReport report_of_csv(std::istream& is) {
  ComparisonReport rep;
  std::string line;
  if (!std::getline(is, line) || line != "N,l,exact_excitation,bog_level,gap,nplus")
    fail(ErrorCode::IoError, "unrecognized report header");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string tok;
    std::vector<std::string> toks;
    while (std::getline(ss, tok, ',')) toks.push_back(tok);
    if (toks.size() != 6) fail(ErrorCode::IoError, "bad report row: " + line);
    ComparisonRow r;
    r.N = std::stoi(toks[0]);
    r.l = std::stoi(toks[1]);
    r.exact_excitation = std::stod(toks[2]);
    r.bog_level = std::stod(toks[3]);
    r.gap = std::stod(toks[4]);
    r.nplus = std::stod(toks[5]);
    rep.rows.push_back(r);
  }
  return rep;
}

// Gnuplot script plotting |gap| against N per level, reading the csv written
// next to it.
inline std::string report_gnuplot(const std::string& csv_name, const ComparisonReport& rep) {
  std::vector<int> ls;
  for (const auto& r : rep.rows)
    if (std::find(ls.begin(), ls.end(), r.l) == ls.end()) ls.push_back(r.l);
  std::sort(ls.begin(), ls.end());
  std::ostringstream os;
  os << "set datafile separator ','\n"
     << "set logscale xy\n"
     << "set xlabel 'N'\n"
     << "set ylabel '|gap|'\n"
     << "set key left bottom\n"
     << "plot ";
  for (std::size_t i = 0; i < ls.size(); ++i) {
    if (i) os << ", \\\n     ";
    os << "'" << csv_name << "' using 1:(($2==" << ls[i] << ")?abs($5):1/0) with linespoints title 'l="
       << ls[i] << "'";
  }
  os << '\n';
  return os.str();
}

inline json to_json(const Thm1Scan& s) {
  json j;
  if (!s.note.empty()) j["note"] = s.note;
  json rows = json::array();
  for (const auto& r : s.rows) {
    json jr;
    jr["N"] = r.N;
    jr["quanta"] = r.quanta;
    jr["norm"] = r.norm;
    rows.push_back(std::move(jr));
  }
  j["rows"] = std::move(rows);
  json fits = json::array();
  for (const auto& [q, f] : s.fits) {
    json jf;
    jf["quanta"] = q;
    jf["slope"] = f.slope;
    jf["intercept"] = f.intercept;
    jf["r2"] = f.r2;
    jf["points"] = f.points;
    fits.push_back(std::move(jf));
  }
  j["fits"] = std::move(fits);
  return j;
}

inline json to_json(const Thm2Check& c) {
  json j;
  j["lambda"] = c.lambda;
  j["m"] = c.m;
  j["delta"] = c.delta;
  j["epsilon"] = c.epsilon;
  j["C_cal"] = c.c_cal;
  j["found"] = c.found;
  j["pass"] = c.pass;
  j["nplus_max"] = c.nplus_max;
  j["cutoff"] = c.cutoff;
  j["note"] = c.note;
  return j;
}

inline json to_json(const std::vector<Thm3Check>& rows) {
  json j = json::array();
  for (const auto& r : rows) {
    json jr;
    jr["N"] = r.N;
    jr["lambda_N"] = r.lambda_N;
    jr["nplus_N"] = r.nplus_N;
    jr["M"] = r.M;
    jr["residual"] = r.residual;
    jr["norm_kept"] = r.norm_kept;
    j.push_back(std::move(jr));
  }
  return j;
}

inline json to_json(const MultiReport& rep) {
  json j;
  j["report"] = to_json(rep.report);
  j["J"] = rep.J;
  json th = json::array();
  for (const auto& t : rep.thetas) {
    json jt;
    jt["N"] = t.N;
    jt["l"] = t.l;
    jt["j"] = t.j;
    jt["m"] = t.m;
    jt["theta"] = json_of_cx(t.theta);
    th.push_back(std::move(jt));
  }
  j["thetas"] = std::move(th);
  json su = json::array();
  for (const auto& s : rep.summaries) {
    json js;
    js["N"] = s.N;
    js["l"] = s.l;
    js["sum_sq"] = s.sum_sq;
    js["residual"] = s.residual;
    su.push_back(std::move(js));
  }
  j["summaries"] = std::move(su);
  return j;
}

inline json to_json(const std::vector<GapFit>& fits) {
  json j = json::array();
  for (const auto& g : fits) {
    json jg;
    jg["l"] = g.l;
    jg["slope"] = g.fit.slope;
    jg["intercept"] = g.fit.intercept;
    jg["r2"] = g.fit.r2;
    jg["points"] = g.fit.points;
    jg["excluded"] = g.excluded;
    j.push_back(std::move(jg));
  }
  return j;
}

// ---- files -----------------------------------------------------------------

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorCode::IoError, "cannot open for write: " + path);
  os << text;
  if (!os) fail(ErrorCode::IoError, "short write: " + path);
}

inline void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

inline json read_json(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorCode::IoError, "cannot open: " + path);
  json j;
  try {
    is >> j;
  } catch (const std::exception& e) {
    fail(ErrorCode::IoError, std::string("json parse: ") + e.what());
  }
  return j;
}

}  // namespace bogolab
