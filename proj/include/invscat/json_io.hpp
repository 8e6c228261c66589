#pragma once

// JSON encoding of the data types (complex numbers as [re, im], full double precision) and CSV output.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "types.hpp"

namespace invscat::io {

using json = nlohmann::json;

namespace detail {

inline const json& field(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) fail(ErrorKind::ConfigError, path + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(ErrorKind::ConfigError, path + "." + key + ": missing");
  return *it;
}

inline double number(const json& v, const std::string& path) {
  if (v.is_null()) return std::nan("");
  if (!v.is_number()) fail(ErrorKind::ConfigError, path + ": expected a number");
  return v.get<double>();
}

inline RVec reals(const json& v, const std::string& path) {
  if (!v.is_array()) fail(ErrorKind::ConfigError, path + ": expected an array of numbers");
  RVec out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

inline cplx complex_value(const json& v, const std::string& path) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (!v.is_array() || v.size() != 2) fail(ErrorKind::ConfigError, path + ": expected [re, im]");
  return {number(v[0], path + "[0]"), number(v[1], path + "[1]")};
}

inline CVec complexes(const json& v, const std::string& path) {
  if (!v.is_array()) fail(ErrorKind::ConfigError, path + ": expected an array of [re, im] pairs");
  CVec out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(complex_value(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

inline json encode(const CVec& v) {
  json a = json::array();
  for (const auto& z : v) a.push_back({z.real(), z.imag()});
  return a;
}

inline RVec optional_reals(const json& j, const std::string& key, const std::string& path) {
  auto it = j.find(key);
  return it == j.end() || it->is_null() ? RVec{} : reals(*it, path + "." + key);
}

inline CVec optional_complexes(const json& j, const std::string& key, const std::string& path) {
  auto it = j.find(key);
  return it == j.end() || it->is_null() ? CVec{} : complexes(*it, path + "." + key);
}

inline bool optional_bool(const json& j, const std::string& key, const std::string& path, bool dflt = false) {
  auto it = j.find(key);
  if (it == j.end()) return dflt;
  if (!it->is_boolean()) fail(ErrorKind::ConfigError, path + "." + key + ": expected true or false");
  return it->get<bool>();
}

inline void check_type(const json& j, const char* name, const std::string& path) {
  auto it = j.find("type");
  if (it != j.end() && (!it->is_string() || it->get<std::string>() != name))
    fail(ErrorKind::ConfigError, path + ".type: expected \"" + std::string(name) + "\"");
}

}  // namespace detail

inline json encode(const PotentialGrid& q) {
  json j{{"type", "PotentialGrid"}, {"xs", q.xs}, {"qs", q.qs}, {"decay_class", to_string(q.decay_class)}};
  j["support_radius"] = q.support_radius ? json(*q.support_radius) : json(nullptr);
  return j;
}

inline PotentialGrid decode_potential(const json& j, const std::string& path = "$") {
  detail::check_type(j, "PotentialGrid", path);
  PotentialGrid q;
  q.xs = detail::reals(detail::field(j, "xs", path), path + ".xs");
  q.qs = detail::reals(detail::field(j, "qs", path), path + ".qs");
  if (q.qs.size() != q.xs.size()) fail(ErrorKind::ConfigError, path + ".qs: length differs from xs");
  auto a = j.find("support_radius");
  if (a != j.end() && !a->is_null()) q.support_radius = detail::number(*a, path + ".support_radius");
  auto c = j.find("decay_class");
  if (c != j.end()) {
    if (!c->is_string()) fail(ErrorKind::ConfigError, path + ".decay_class: expected a string");
    try {
      q.decay_class = decay_class_from_string(c->get<std::string>());
    } catch (const Error& e) {
      fail(ErrorKind::ConfigError, path + ".decay_class: " + e.what());
    }
  }
  return q;
}

inline json encode(const ScatteringData& sd) {
  return {{"type", "ScatteringData"}, {"ks", sd.ks},           {"S", detail::encode(sd.S)},
          {"bound_ks", sd.bound_ks},  {"norming", sd.norming}, {"index", sd.index}};
}

inline ScatteringData decode_scattering(const json& j, const std::string& path = "$") {
  detail::check_type(j, "ScatteringData", path);
  ScatteringData sd;
  sd.ks = detail::reals(detail::field(j, "ks", path), path + ".ks");
  sd.S = detail::complexes(detail::field(j, "S", path), path + ".S");
  if (sd.S.size() != sd.ks.size()) fail(ErrorKind::ConfigError, path + ".S: length differs from ks");
  sd.bound_ks = detail::optional_reals(j, "bound_ks", path);
  sd.norming = detail::optional_reals(j, "norming", path);
  if (sd.norming.size() != sd.bound_ks.size())
    fail(ErrorKind::ConfigError, path + ".norming: length differs from bound_ks");
  auto it = j.find("index");
  if (it != j.end()) {
    if (!it->is_number_integer()) fail(ErrorKind::ConfigError, path + ".index: expected an integer");
    sd.index = it->get<int>();
  } else {
    sd.index = -2 * static_cast<int>(sd.J());
  }
  return sd;
}

inline json encode(const JostData& jd) {
  return {{"type", "JostData"},
          {"ks", jd.ks},
          {"f", detail::encode(jd.f)},
          {"fprime0", detail::encode(jd.fprime0)},
          {"bound_ks", jd.bound_ks},
          {"fdot_at_bound", detail::encode(jd.fdot_at_bound)},
          {"fprime_at_bound", jd.fprime_at_bound},
          {"resonance", jd.resonance}};
}

inline JostData decode_jost(const json& j, const std::string& path = "$") {
  detail::check_type(j, "JostData", path);
  JostData jd;
  jd.ks = detail::reals(detail::field(j, "ks", path), path + ".ks");
  jd.f = detail::complexes(detail::field(j, "f", path), path + ".f");
  if (jd.f.size() != jd.ks.size()) fail(ErrorKind::ConfigError, path + ".f: length differs from ks");
  jd.fprime0 = detail::optional_complexes(j, "fprime0", path);
  jd.bound_ks = detail::optional_reals(j, "bound_ks", path);
  jd.fdot_at_bound = detail::optional_complexes(j, "fdot_at_bound", path);
  jd.fprime_at_bound = detail::optional_reals(j, "fprime_at_bound", path);
  jd.resonance = detail::optional_bool(j, "resonance", path);
  return jd;
}

inline json encode(const SpectralFunction& sf) {
  json d = json::array();
  for (const auto& p : sf.discrete_points) d.push_back({{"lambda", p.lambda}, {"c", p.c}});
  return {{"type", "SpectralFunction"}, {"lambdas", sf.lambdas}, {"density", sf.density},
          {"discrete_points", d},       {"resonance", sf.resonance}};
}

inline SpectralFunction decode_spectral(const json& j, const std::string& path = "$") {
  detail::check_type(j, "SpectralFunction", path);
  SpectralFunction sf;
  sf.lambdas = detail::reals(detail::field(j, "lambdas", path), path + ".lambdas");
  sf.density = detail::reals(detail::field(j, "density", path), path + ".density");
  if (sf.density.size() != sf.lambdas.size())
    fail(ErrorKind::ConfigError, path + ".density: length differs from lambdas");
  auto it = j.find("discrete_points");
  if (it != j.end()) {
    if (!it->is_array()) fail(ErrorKind::ConfigError, path + ".discrete_points: expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string p = path + ".discrete_points[" + std::to_string(i) + "]";
      sf.discrete_points.push_back({detail::number(detail::field((*it)[i], "lambda", p), p + ".lambda"),
                                    detail::number(detail::field((*it)[i], "c", p), p + ".c")});
    }
  }
  sf.resonance = detail::optional_bool(j, "resonance", path);
  return sf;
}

inline json encode(const IFunction& f) {
  return {{"type", "IFunction"},  {"ks", f.ks},
          {"I", detail::encode(f.I)}, {"poles", f.poles},
          {"residues", detail::encode(f.residues)}, {"resonance", f.resonance},
          {"a0", {f.a0.real(), f.a0.imag()}}};
}

inline IFunction decode_ifunction(const json& j, const std::string& path = "$") {
  detail::check_type(j, "IFunction", path);
  IFunction f;
  f.ks = detail::reals(detail::field(j, "ks", path), path + ".ks");
  f.I = detail::complexes(detail::field(j, "I", path), path + ".I");
  if (f.I.size() != f.ks.size()) fail(ErrorKind::ConfigError, path + ".I: length differs from ks");
  f.poles = detail::optional_reals(j, "poles", path);
  f.residues = detail::optional_complexes(j, "residues", path);
  if (f.residues.size() != f.poles.size()) fail(ErrorKind::ConfigError, path + ".residues: length differs from poles");
  f.resonance = detail::optional_bool(j, "resonance", path);
  auto it = j.find("a0");
  if (it != j.end()) f.a0 = detail::complex_value(*it, path + ".a0");
  return f;
}

inline json encode(const TransformationKernel& K) {
  json rows = json::array();
  for (const auto& r : K.values) rows.push_back(r);
  return {{"type", "TransformationKernel"}, {"kind", to_string(K.kind)}, {"xs", K.xs},
          {"dy", K.dy},                     {"diagonal", K.diagonal},    {"values", rows}};
}

inline TransformationKernel decode_kernel(const json& j, const std::string& path = "$") {
  detail::check_type(j, "TransformationKernel", path);
  TransformationKernel K;
  const json& kind = detail::field(j, "kind", path);
  const std::string k = kind.is_string() ? kind.get<std::string>() : "";
  if (k == "marchenko_A")
    K.kind = KernelKind::MarchenkoA;
  else if (k == "gl_K")
    K.kind = KernelKind::GlK;
  else if (k == "fixed_energy_K")
    K.kind = KernelKind::FixedEnergyK;
  else
    fail(ErrorKind::ConfigError, path + ".kind: expected marchenko_A, gl_K or fixed_energy_K");
  K.xs = detail::reals(detail::field(j, "xs", path), path + ".xs");
  K.diagonal = detail::reals(detail::field(j, "diagonal", path), path + ".diagonal");
  K.dy = detail::number(detail::field(j, "dy", path), path + ".dy");
  const json& rows = detail::field(j, "values", path);
  if (!rows.is_array()) fail(ErrorKind::ConfigError, path + ".values: expected an array of rows");
  for (std::size_t i = 0; i < rows.size(); ++i)
    K.values.push_back(detail::reals(rows[i], path + ".values[" + std::to_string(i) + "]"));
  return K;
}

inline json encode(const KreinKernel& H) {
  return {{"type", "KreinKernel"}, {"ts", H.ts}, {"H", H.H}, {"Htilde_min", H.Htilde_min}};
}

inline KreinKernel decode_krein_kernel(const json& j, const std::string& path = "$") {
  detail::check_type(j, "KreinKernel", path);
  KreinKernel H;
  H.ts = detail::reals(detail::field(j, "ts", path), path + ".ts");
  H.H = detail::reals(detail::field(j, "H", path), path + ".H");
  if (H.H.size() != H.ts.size()) fail(ErrorKind::ConfigError, path + ".H: length differs from ts");
  auto it = j.find("Htilde_min");
  if (it != j.end()) H.Htilde_min = detail::number(*it, path + ".Htilde_min");
  return H;
}

inline json encode(const PhaseShiftSequence& ps) {
  return {{"type", "PhaseShiftSequence"}, {"ells", ps.ells}, {"deltas", ps.deltas}, {"a_ells", detail::encode(ps.a_ells)}};
}

inline PhaseShiftSequence decode_phase_shifts(const json& j, const std::string& path = "$") {
  detail::check_type(j, "PhaseShiftSequence", path);
  PhaseShiftSequence ps;
  const json& ells = detail::field(j, "ells", path);
  if (!ells.is_array()) fail(ErrorKind::ConfigError, path + ".ells: expected an array of integers");
  for (std::size_t i = 0; i < ells.size(); ++i) {
    if (!ells[i].is_number_integer())
      fail(ErrorKind::ConfigError, path + ".ells[" + std::to_string(i) + "]: expected an integer");
    ps.ells.push_back(ells[i].get<int>());
  }
  ps.deltas = detail::reals(detail::field(j, "deltas", path), path + ".deltas");
  if (ps.deltas.size() != ps.ells.size()) fail(ErrorKind::ConfigError, path + ".deltas: length differs from ells");
  ps.a_ells = detail::optional_complexes(j, "a_ells", path);
  return ps;
}

inline json encode(const QuarkoniumData& d) {
  return {{"type", "QuarkoniumData"}, {"energies", d.energies}, {"slopes", d.slopes}};
}

inline QuarkoniumData decode_quarkonium(const json& j, const std::string& path = "$") {
  detail::check_type(j, "QuarkoniumData", path);
  QuarkoniumData d;
  d.energies = detail::reals(detail::field(j, "energies", path), path + ".energies");
  d.slopes = detail::reals(detail::field(j, "slopes", path), path + ".slopes");
  if (d.slopes.size() != d.energies.size()) fail(ErrorKind::ConfigError, path + ".slopes: length differs from energies");
  return d;
}

inline json read_json(const std::string& file) {
  std::ifstream in(file);
  if (!in) fail(ErrorKind::ConfigError, file + ": cannot open");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::ConfigError, file + ": " + e.what());
  }
}

inline void write_json(const std::string& file, const json& j) {
  std::ofstream out(file);
  if (!out) fail(ErrorKind::ConfigError, file + ": cannot write");
  out << j.dump(1) << '\n';
}

// Columns of equal length written with 17 significant digits.
inline void write_csv(const std::string& file, const std::vector<std::string>& header, const std::vector<RVec>& cols) {
  std::ofstream out(file);
  if (!out) fail(ErrorKind::ConfigError, file + ": cannot write");
  out.precision(17);
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
  out << '\n';
  const std::size_t n = cols.empty() ? 0 : cols[0].size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c][i];
    out << '\n';
  }
}

}  // namespace invscat::io
