#pragma once

// Named pipelines driven by one JSON configuration: input resolution (closed-form families, files or
// inline objects), the inversion chains, artifacts (JSON and CSV) and a report of every check.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "core.hpp"
#include "families.hpp"
#include "fixed_energy.hpp"
#include "forward.hpp"
#include "gelfand_levitan.hpp"
#include "json_io.hpp"
#include "krein.hpp"
#include "marchenko.hpp"
#include "quarkonium.hpp"
#include "riemann.hpp"
#include "wave_reduction.hpp"

namespace invscat::pipeline {

using io::json;

struct CheckResult {
  std::string name;
  bool passed = true;
  double value = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct Report {
  std::string pipeline;
  std::vector<CheckResult> checks;
  json results = json::object();
  std::vector<std::string> artifacts;

  // passes when value <= tolerance (NaN fails)
  void bound(const std::string& name, double value, double tolerance, const std::string& detail = "") {
    checks.push_back({name, value <= tolerance, value, tolerance, detail});
  }
  void flag(const std::string& name, bool ok, const std::string& detail = "") {
    checks.push_back({name, ok, ok ? 1.0 : 0.0, 1.0, detail});
  }
  bool all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
  }
  json to_json() const {
    json c = json::array();
    for (const auto& k : checks)
      c.push_back({{"name", k.name}, {"passed", k.passed}, {"value", k.value}, {"tolerance", k.tolerance},
                   {"detail", k.detail}});
    return {{"pipeline", pipeline}, {"all_passed", all_passed()}, {"checks", c}, {"results", results},
            {"artifacts", artifacts}};
  }
};

// Path-aware access to configuration sections.
class Section {
 public:
  Section(const json& j, std::string path, std::set<std::string> allowed) : j_(j), path_(std::move(path)) {
    if (j_.is_null()) return;
    if (!j_.is_object()) fail(ErrorKind::ConfigError, path_ + ": expected an object");
    for (const auto& [k, v] : j_.items())
      if (!allowed.count(k)) fail(ErrorKind::ConfigError, path_ + "." + k + ": unknown field");
  }

  bool has(const std::string& key) const { return j_.is_object() && j_.contains(key) && !j_.at(key).is_null(); }
  std::string path(const std::string& key) const { return path_ + "." + key; }
  const json& raw(const std::string& key) const { return j_.at(key); }

  double number(const std::string& key, double dflt, bool positive = false) const {
    if (!has(key)) return dflt;
    const json& v = j_.at(key);
    if (!v.is_number()) fail(ErrorKind::ConfigError, path(key) + ": expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x) || (positive && !(x > 0))) fail(ErrorKind::ConfigError, path(key) + ": must be positive");
    return x;
  }
  std::optional<double> optional_number(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return number(key, 0.0);
  }
  int integer(const std::string& key, int dflt, int min_value = 0) const {
    if (!has(key)) return dflt;
    const json& v = j_.at(key);
    if (!v.is_number_integer() || v.get<int>() < min_value)
      fail(ErrorKind::ConfigError, path(key) + ": expected an integer >= " + std::to_string(min_value));
    return v.get<int>();
  }
  bool boolean(const std::string& key, bool dflt) const {
    if (!has(key)) return dflt;
    if (!j_.at(key).is_boolean()) fail(ErrorKind::ConfigError, path(key) + ": expected true or false");
    return j_.at(key).get<bool>();
  }
  std::string text(const std::string& key, const std::string& dflt, const std::set<std::string>& choices = {}) const {
    if (!has(key)) return dflt;
    if (!j_.at(key).is_string()) fail(ErrorKind::ConfigError, path(key) + ": expected a string");
    std::string s = j_.at(key).get<std::string>();
    if (!choices.empty() && !choices.count(s)) {
      std::string list;
      for (const auto& c : choices) list += (list.empty() ? "" : ", ") + c;
      fail(ErrorKind::ConfigError, path(key) + ": expected one of " + list);
    }
    return s;
  }

 private:
  const json& j_;
  std::string path_;
};

inline const json& sub(const json& cfg, const std::string& key) {
  static const json null_value;
  return cfg.is_object() && cfg.contains(key) ? cfg.at(key) : null_value;
}

struct GridSettings {
  double X = 5.0;           // inversion interval [0, X]
  double dx = 0.01;
  double k_max = 200.0;
  double k_h0 = 0.004;
  double q_X = 20.0;        // sampling of closed-form potentials
  double q_dx = 1e-3;
  double closure_X = 12.0;  // inversion interval used before recomputing S
  RVec ks() const { return graded_k_grid(k_max, k_h0); }
};

inline GridSettings grid_settings(const json& cfg) {
  Section s(sub(cfg, "grid"), "$.grid", {"X", "dx", "k_max", "k_h0", "q_X", "q_dx", "closure_X"});
  GridSettings g;
  g.X = s.number("X", g.X, true);
  g.dx = s.number("dx", g.dx, true);
  g.k_max = s.number("k_max", g.k_max, true);
  g.k_h0 = s.number("k_h0", g.k_h0, true);
  g.q_X = s.number("q_X", g.q_X, true);
  g.q_dx = s.number("q_dx", g.q_dx, true);
  g.closure_X = s.number("closure_X", std::max(g.closure_X, g.X), true);
  if (g.dx >= g.X) fail(ErrorKind::ConfigError, "$.grid.dx: must be smaller than X");
  return g;
}

struct Tolerances {
  double unitarity = 1e-8;
  double wronskian = 1e-6;
  double reference_q = 2e-3;   // relative to max |q_ref|
  double roundtrip_q = 1e-3;   // absolute
  double closure_S = 5e-3;
  double compare = 2e-3;       // relative to max |q_Marchenko|
  double gl_residual = 1e-6;
  double krein_symmetry = 1e-10;
  double eigenvalues = 1e-3;
  std::optional<double> expected_radius;
  double radius_rel = 0.1;
};

inline Tolerances tolerances(const json& cfg) {
  Section s(sub(cfg, "checks"), "$.checks",
            {"unitarity", "wronskian", "reference_q", "roundtrip_q", "closure_S", "compare", "gl_residual",
             "krein_symmetry", "eigenvalues", "expected_radius", "radius_rel"});
  Tolerances t;
  t.unitarity = s.number("unitarity", t.unitarity, true);
  t.wronskian = s.number("wronskian", t.wronskian, true);
  t.reference_q = s.number("reference_q", t.reference_q, true);
  t.roundtrip_q = s.number("roundtrip_q", t.roundtrip_q, true);
  t.closure_S = s.number("closure_S", t.closure_S, true);
  t.compare = s.number("compare", t.compare, true);
  t.gl_residual = s.number("gl_residual", t.gl_residual, true);
  t.krein_symmetry = s.number("krein_symmetry", t.krein_symmetry, true);
  t.eigenvalues = s.number("eigenvalues", t.eigenvalues, true);
  t.expected_radius = s.optional_number("expected_radius");
  t.radius_rel = s.number("radius_rel", t.radius_rel, true);
  return t;
}

// Closed-form families: S(k), bound states and the potential.
struct Family {
  std::string name;
  std::function<cplx(double)> S;  // empty for potential-only families
  RVec bound_ks, norming;
  int index = 0;
  std::function<double(double)> q;
  DecayClass decay_class = DecayClass::L11;
  std::optional<double> support;
};

inline Family family(const json& spec, const std::string& path) {
  Section s(spec, path, {"family", "nu", "k1", "r1", "nu1", "height", "a"});
  const std::string name = s.text("family", "", {"free", "sech2", "bargmann", "nobound", "step"});
  Family f;
  f.name = name;
  if (name == "free") {
    f.S = [](double) { return cplx(1.0); };
    f.q = [](double) { return 0.0; };
  } else if (name == "sech2") {
    families::Resonance r{s.number("nu", 1.0, true)};
    f.S = [r](double k) { return r.S(k); };
    f.q = [r](double x) { return r.q(x); };
    f.index = -1;
  } else if (name == "bargmann") {
    families::Bargmann b{s.number("k1", 1.0, true), s.number("r1", 1.0, true)};
    f.S = [b](double k) { return b.S(k); };
    f.q = [b](double x) { return b.q(x); };
    f.bound_ks = {b.k1};
    f.norming = {b.s1()};
    f.index = -2;
  } else if (name == "nobound") {
    families::NoBound n{s.number("nu1", 1.0, true), s.number("k1", 2.0, true)};
    if (!(n.k1 > n.nu1)) fail(ErrorKind::ConfigError, path + ".k1: must exceed nu1");
    f.S = [n](double k) { return n.S(k); };
    f.q = [n](double x) { return n.q(x); };
  } else {
    const double h = s.number("height", 1.0), a = s.number("a", 1.0, true);
    f.q = [h, a](double x) { return x <= a ? h : 0.0; };
    f.decay_class = DecayClass::Compact;
    f.support = a;
  }
  return f;
}

inline bool is_family(const json& j) { return j.is_object() && j.contains("family"); }

inline json load_source(const json& j, const std::string& path) {
  if (j.is_string()) return io::read_json(j.get<std::string>());
  if (j.is_object() && j.contains("file") && j.size() == 1) {
    if (!j.at("file").is_string()) fail(ErrorKind::ConfigError, path + ".file: expected a path");
    return io::read_json(j.at("file").get<std::string>());
  }
  if (!j.is_object()) fail(ErrorKind::ConfigError, path + ": expected an object, a file name or {\"file\": ...}");
  return j;
}

// Inputs of a run with their closed-form reference (when the source is a family).
struct Inputs {
  const json& cfg;
  GridSettings grid;
  std::function<double(double)> reference_q;

  const json& input() const { return sub(cfg, "input"); }
  bool has(const std::string& key) const { return input().is_object() && input().contains(key); }

  PotentialGrid potential(const std::string& dflt_family = "") {
    Section(input(), "$.input", {"potential", "scattering", "spectral", "ifunction", "absf", "phase_shifts",
                                 "quarkonium", "response"});
    json src;
    if (has("potential"))
      src = load_source(input().at("potential"), "$.input.potential");
    else if (!dflt_family.empty())
      src = json{{"family", dflt_family}};
    else
      fail(ErrorKind::ConfigError, "$.input.potential: missing");
    if (is_family(src)) {
      Family f = family(src, "$.input.potential");
      reference_q = f.q;
      const double X = f.support ? std::max(*f.support, grid.dx) : grid.q_X;
      const double dx = f.support ? grid.dx * 0.1 : grid.q_dx;
      return make_potential(f.q, X, dx, f.decay_class, f.support);
    }
    PotentialGrid q = io::decode_potential(src, "$.input.potential");
    validate_potential(q);
    return q;
  }

  ScatteringData scattering(const forward::ForwardOptions& fo = {}) {
    if (has("scattering")) {
      json src = load_source(input().at("scattering"), "$.input.scattering");
      if (is_family(src)) {
        Family f = family(src, "$.input.scattering");
        if (!f.S) fail(ErrorKind::ConfigError, "$.input.scattering.family: no closed-form S for " + f.name);
        reference_q = f.q;
        return families::sample_S(grid.ks(), f.S, f.bound_ks, f.norming, f.index);
      }
      return io::decode_scattering(src, "$.input.scattering");
    }
    if (has("potential")) return forward::scattering_data(potential(), grid.ks(), fo);
    fail(ErrorKind::ConfigError, "$.input.scattering: missing");
  }

  SpectralFunction spectral() {
    if (has("spectral")) return io::decode_spectral(load_source(input().at("spectral"), "$.input.spectral"), "$.input.spectral");
    return riemann::spectral_from_scattering(scattering());
  }
};

class Artifacts {
 public:
  Artifacts(std::string dir, Report& rep) : dir_(std::move(dir)), rep_(rep) {
    if (!dir_.empty()) std::filesystem::create_directories(dir_);
  }
  void json_file(const std::string& name, const json& j) {
    if (dir_.empty()) return;
    io::write_json(dir_ + "/" + name, j);
    rep_.artifacts.push_back(name);
  }
  void csv(const std::string& name, const std::vector<std::string>& header, const std::vector<RVec>& cols) {
    if (dir_.empty()) return;
    io::write_csv(dir_ + "/" + name, header, cols);
    rep_.artifacts.push_back(name);
  }
  void potential(const std::string& name, const PotentialGrid& q) { csv(name, {"x", "q"}, {q.xs, q.qs}); }
  void scattering(const ScatteringData& sd) {
    RVec re, im;
    for (auto s : sd.S) {
      re.push_back(s.real());
      im.push_back(s.imag());
    }
    csv("S.csv", {"k", "ReS", "ImS"}, {sd.ks, re, im});
  }
  void report() {
    if (!dir_.empty()) io::write_json(dir_ + "/report.json", rep_.to_json());
  }

 private:
  std::string dir_;
  Report& rep_;
};

inline double max_unitarity_defect(const ScatteringData& sd) {
  double d = 0.0;
  for (auto s : sd.S) d = std::max(d, std::abs(std::abs(s) - 1.0));
  return d;
}

// max |q - q_ref| / max |q_ref| on the grid of q, restricted to x <= X
inline void reference_check(Report& rep, const std::string& name, const PotentialGrid& q,
                            const std::function<double(double)>& ref, double tol, double X) {
  if (!ref) return;
  double e = 0.0, m = 0.0;
  for (std::size_t i = 0; i < q.xs.size() && q.xs[i] <= X + 1e-12; ++i) {
    e = std::max(e, std::abs(q.qs[i] - ref(q.xs[i])));
    m = std::max(m, std::abs(ref(q.xs[i])));
  }
  rep.bound(name, m > 0 ? e / m : e, tol, "max|q - q_ref| / max|q_ref|");
}

inline void validation_checks(Report& rep, const ScatteringData& sd) {
  core::ValidationOptions vo;
  auto v = core::validate_scattering_data(sd, vo);
  for (const auto& c : v.checks) rep.checks.push_back({"data." + c.name, c.passed, c.value, std::nan(""), c.detail});
}

inline forward::ForwardOptions forward_options(const json& cfg) {
  Section s(sub(cfg, "forward"), "$.forward", {"richardson", "tail_tol", "resonance_tol"});
  forward::ForwardOptions o;
  o.richardson = s.boolean("richardson", o.richardson);
  o.tail_tol = s.number("tail_tol", o.tail_tol, true);
  o.resonance_tol = s.number("resonance_tol", o.resonance_tol, true);
  return o;
}

inline marchenko::MarchenkoOptions marchenko_options(const json& cfg) {
  Section s(sub(cfg, "marchenko"), "$.marchenko", {"z_tol", "z_max", "dz", "row_stride", "k_max"});
  marchenko::MarchenkoOptions o;
  o.z_tol = s.number("z_tol", o.z_tol, true);
  o.z_max = s.number("z_max", o.z_max, true);
  o.dz = s.number("dz", o.dz, true);
  o.row_stride = s.integer("row_stride", o.row_stride, 0);
  return o;
}

// data restricted to k <= k_max (the --kmax flag of invert-marchenko)
inline ScatteringData truncate_k(ScatteringData sd, std::optional<double> kmax) {
  if (!kmax) return sd;
  std::size_t n = 0;
  while (n < sd.ks.size() && sd.ks[n] <= *kmax) ++n;
  if (n < 5) fail(ErrorKind::ConfigError, "$.marchenko.k_max: fewer than 5 nodes remain");
  sd.ks.resize(n);
  sd.S.resize(n);
  return sd;
}

inline Report run_forward(const json& cfg, const std::string& out) {
  Report rep{"forward"};
  Artifacts art(out, rep);
  Inputs in{cfg, grid_settings(cfg)};
  Tolerances tol = tolerances(cfg);
  PotentialGrid q = in.potential();
  auto fr = forward::forward_data(q, in.grid.ks(), forward_options(cfg));
  rep.bound("unitarity", max_unitarity_defect(fr.scattering), tol.unitarity, "max ||S| - 1|");
  rep.bound("wronskian", forward::wronskian_residual(fr.jost), tol.wronskian, "max |W - 2ik| / (1 + |k|)");
  rep.results["bound_ks"] = fr.scattering.bound_ks;
  rep.results["norming"] = fr.scattering.norming;
  rep.results["index"] = fr.scattering.index;
  rep.results["resonance"] = fr.jost.resonance;
  auto sf = forward::spectral_function(fr);
  auto ifn = forward::i_function(fr.jost);
  art.json_file("scattering.json", io::encode(fr.scattering));
  art.json_file("jost.json", io::encode(fr.jost));
  art.json_file("spectral.json", io::encode(sf));
  art.json_file("ifunction.json", io::encode(ifn));
  art.scattering(fr.scattering);
  art.csv("delta.csv", {"k", "delta"}, {fr.scattering.ks, forward::phase_shift(fr.scattering)});
  art.csv("density.csv", {"lambda", "density"}, {sf.lambdas, sf.density});
  art.report();
  return rep;
}

inline Report run_marchenko(const json& cfg, const std::string& out) {
  Report rep{"marchenko"};
  Artifacts art(out, rep);
  Inputs in{cfg, grid_settings(cfg)};
  Tolerances tol = tolerances(cfg);
  Section ms(sub(cfg, "marchenko"), "$.marchenko", {"z_tol", "z_max", "dz", "row_stride", "k_max"});
  ScatteringData sd = truncate_k(in.scattering(forward_options(cfg)), ms.optional_number("k_max"));
  validation_checks(rep, sd);
  auto inv = marchenko::invert_detailed(sd, in.grid.X, in.grid.dx, marchenko_options(cfg));
  reference_check(rep, "reference_q", inv.q, in.reference_q, tol.reference_q, in.grid.X);
  rep.results["z_cut"] = inv.F.z_cut;
  art.potential("q.csv", inv.q);
  art.json_file("potential.json", io::encode(inv.q));
  art.json_file("kernel.json", io::encode(inv.A));
  art.csv("F.csv", {"z", "F"}, {uniform_grid(inv.F.dz * static_cast<double>(inv.F.values.size() - 1), inv.F.dz), inv.F.values});
  art.report();
  return rep;
}

inline Report run_gl(const json& cfg, const std::string& out) {
  Report rep{"gl"};
  Artifacts art(out, rep);
  Inputs in{cfg, grid_settings(cfg)};
  Tolerances tol = tolerances(cfg);
  SpectralFunction sf = in.spectral();
  auto L = gl::build_L(sf, in.grid.X, in.grid.dx);
  auto K = gl::solve_gl(L);
  auto q = gl::q_from_K(K);
  rep.bound("gl_residual", gl::gl_residual(K, L), tol.gl_residual, "max |K + L + int K L|");
  reference_check(rep, "reference_q", q, in.reference_q, tol.reference_q, in.grid.X);
  art.potential("q.csv", q);
  art.json_file("potential.json", io::encode(q));
  art.csv("K_diagonal.csv", {"x", "K"}, {K.xs, K.diagonal});
  art.report();
  return rep;
}

inline Report run_krein(const json& cfg, const std::string& out) {
  Report rep{"krein"};
  Artifacts art(out, rep);
  Inputs in{cfg, grid_settings(cfg)};
  Tolerances tol = tolerances(cfg);
  Section ks(sub(cfg, "krein"), "$.krein", {"hybrid", "x0", "gamma"});
  ScatteringData sd = in.scattering(forward_options(cfg));
  validation_checks(rep, sd);
  if (sd.index != 0) {
    auto red = krein::reduce_bound_states(sd, ks.number("gamma", 1.0, true));
    rep.results["reduced_bound_ks"] = red.removed_ks;
    rep.results["reduced_index"] = sd.index;
    sd = red.reduced;
    in.reference_q = nullptr;  // the reduced data belong to a different potential
  }
  PotentialGrid q;
  if (ks.boolean("hybrid", false)) {
    auto h = krein::invert_hybrid(sd, in.grid.X, in.grid.dx, ks.optional_number("x0"));
    q = h.q;
    rep.results["x0"] = h.x0;
    rep.results["seam"] = h.seam;
  } else {
    auto r = krein::invert_detailed(sd, in.grid.X, in.grid.dx);
    q = r.q.q;
    const std::size_t n = std::min<std::size_t>(r.family.ys.size() - 1, 400);
    rep.bound("corner_symmetry", krein::corner_symmetry_residual(r.H, n), tol.krein_symmetry,
              "|Gamma(y,0) - Gamma(0,y)| on the dense operator");
    rep.bound("a0", r.q.a0_error, 1e-10, "|a(0) - 2H(0)|");
    rep.results["q_alt_discrepancy"] = r.q.discrepancy;
    art.csv("H.csv", {"t", "H"}, {r.H.ts, r.H.H});
    art.csv("a.csv", {"x", "a"}, {q.xs, r.q.a});
  }
  reference_check(rep, "reference_q", q, in.reference_q, tol.reference_q, in.grid.X);
  art.potential("q.csv", q);
  art.json_file("potential.json", io::encode(q));
  art.report();
  return rep;
}

inline Report run_roundtrip(const json& cfg, const std::string& out) {
  Report rep{"roundtrip"};
  Artifacts art(out, rep);
  Inputs in{cfg, grid_settings(cfg)};
  Tolerances tol = tolerances(cfg);
  forward::ForwardOptions fo = forward_options(cfg);
  PotentialGrid q_in = in.potential("sech2");
  auto ks = in.grid.ks();
  auto fr = forward::forward_data(q_in, ks, fo);
  rep.bound("unitarity", max_unitarity_defect(fr.scattering), tol.unitarity, "max ||S| - 1| of the forward data");
  auto inv = marchenko::invert(fr.scattering, in.grid.closure_X, in.grid.dx, marchenko_options(cfg));
  double e = 0.0;
  for (std::size_t i = 0; i < inv.xs.size() && inv.xs[i] <= in.grid.X + 1e-12; ++i)
    e = std::max(e, std::abs(inv.qs[i] - q_in.at(inv.xs[i])));
  rep.bound("roundtrip_q", e, tol.roundtrip_q, "max |q_out - q_in| on [0, X]");
  forward::ForwardOptions fo2 = fo;
  fo2.tail_tol = std::max(fo.tail_tol, 1e-2);
  auto fr2 = forward::forward_data(inv, ks, fo2);
  double es = 0.0;
  for (std::size_t i = 0; i < ks.size(); ++i) es = std::max(es, std::abs(fr2.scattering.S[i] - fr.scattering.S[i]));
  rep.bound("closure_S", es, tol.closure_S, "max |S(q_out) - S(q_in)|");
  rep.flag("closure_bound_states", fr2.scattering.J() == fr.scattering.J(),
           std::to_string(fr2.scattering.J()) + " bound states after inversion, " +
               std::to_string(fr.scattering.J()) + " before");
  rep.results["bound_ks_in"] = fr.scattering.bound_ks;
  rep.results["bound_ks_out"] = fr2.scattering.bound_ks;
  art.potential("q_out.csv", inv);
  art.scattering(fr2.scattering);
  art.json_file("scattering_in.json", io::encode(fr.scattering));
  art.json_file("scattering_out.json", io::encode(fr2.scattering));
  art.report();
  return rep;
}

inline Report run_compare(const json& cfg, const std::string& out) {
  Report rep{"compare"};
  Artifacts art(out, rep);
  Inputs in{cfg, grid_settings(cfg)};
  Tolerances tol = tolerances(cfg);
  ScatteringData sd = in.scattering(forward_options(cfg));
  validation_checks(rep, sd);
  const double X = in.grid.X, dx = in.grid.dx;
  PotentialGrid qm = marchenko::invert(sd, X, dx, marchenko_options(cfg));
  const double qmax = max_abs(qm.qs);
  auto diff = [&](const PotentialGrid& q) {
    double e = 0.0;
    for (std::size_t i = 0; i < qm.xs.size() && i < q.xs.size(); ++i) e = std::max(e, std::abs(q.qs[i] - qm.qs[i]));
    return qmax > 0 ? e / qmax : e;
  };
  PotentialGrid qg = gl::invert(riemann::spectral_from_scattering(sd), X, dx);
  rep.bound("gl_vs_marchenko", diff(qg), tol.compare, "max |q_GL - q_M| / max |q_M|");
  RVec kcol(qm.xs.size(), std::nan(""));
  if (sd.index == 0) {
    PotentialGrid qk = krein::invert(sd, X, dx);
    rep.bound("krein_vs_marchenko", diff(qk), tol.compare, "max |q_K - q_M| / max |q_M|");
    for (std::size_t i = 0; i < kcol.size() && i < qk.qs.size(); ++i) kcol[i] = qk.qs[i];
  } else {
    rep.results["krein"] = "skipped: index " + std::to_string(sd.index) + " data need bound-state reduction";
  }
  reference_check(rep, "reference_q", qm, in.reference_q, tol.reference_q, X);
  art.csv("compare.csv", {"x", "q_marchenko", "q_gl", "q_krein"}, {qm.xs, qm.qs, qg.qs, kcol});
  art.report();
  return rep;
}

inline Report run_convert(const json& cfg, const std::string& out) {
  Report rep{"convert"};
  Artifacts art(out, rep);
  Section cs(sub(cfg, "convert"), "$.convert", {"from", "to"});
  const std::string from = cs.text("from", "S", {"S", "rho", "I", "absf"});
  const std::string to = cs.text("to", "f", {"f", "S", "rho"});
  Inputs in{cfg, grid_settings(cfg)};
  ScatteringData sd;
  if (from == "S") {
    sd = in.scattering();
  } else if (from == "rho") {
    sd = riemann::s_from_spectral(in.spectral());
  } else if (from == "I") {
    if (!in.has("ifunction")) fail(ErrorKind::ConfigError, "$.input.ifunction: missing");
    sd = riemann::scattering_from_ifunction(
        io::decode_ifunction(load_source(in.input().at("ifunction"), "$.input.ifunction"), "$.input.ifunction"));
  } else {
    if (!in.has("absf")) fail(ErrorKind::ConfigError, "$.input.absf: missing");
    json src = load_source(in.input().at("absf"), "$.input.absf");
    Section a(src, "$.input.absf", {"type", "ks", "absf", "bound_ks", "norming", "resonance"});
    RVec ks = io::detail::reals(io::detail::field(src, "ks", "$.input.absf"), "$.input.absf.ks");
    RVec absf = io::detail::reals(io::detail::field(src, "absf", "$.input.absf"), "$.input.absf.absf");
    RVec bound = io::detail::optional_reals(src, "bound_ks", "$.input.absf");
    RVec norming = io::detail::optional_reals(src, "norming", "$.input.absf");
    if (norming.size() != bound.size()) fail(ErrorKind::ConfigError, "$.input.absf.norming: one value per bound state");
    auto jd = riemann::jost_from_modulus(ks, absf, bound, a.boolean("resonance", false));
    sd = riemann::scattering_from_jost(jd, norming);
  }
  validation_checks(rep, sd);
  if (to == "f") {
    JostData jd = riemann::jost_from_S(sd);
    rep.bound("jump_residual", riemann::jump_residual(jd, sd.S), 1e-8, "max |f(k) - S(-k) f(-k)| / max|f|");
    RVec re, im;
    for (auto f : jd.f) {
      re.push_back(f.real());
      im.push_back(f.imag());
    }
    art.json_file("jost.json", io::encode(jd));
    art.csv("f.csv", {"k", "Ref", "Imf"}, {jd.ks, re, im});
  } else if (to == "S") {
    art.json_file("scattering.json", io::encode(sd));
    art.scattering(sd);
  } else {
    SpectralFunction sf = riemann::spectral_from_scattering(sd);
    art.json_file("spectral.json", io::encode(sf));
    art.csv("density.csv", {"lambda", "density"}, {sf.lambdas, sf.density});
  }
  art.report();
  return rep;
}

inline PhaseShiftSequence phase_shift_input(Inputs& in, const json& cfg, Report& rep, Artifacts& art) {
  if (in.has("phase_shifts"))
    return io::decode_phase_shifts(load_source(in.input().at("phase_shifts"), "$.input.phase_shifts"),
                                   "$.input.phase_shifts");
  Section fs(sub(cfg, "fixed_energy"), "$.fixed_energy", {"L"});
  PotentialGrid q = in.potential();
  fixed_energy::PartialWaveOptions po;
  po.L = fs.integer("L", po.L, 0);
  auto res = fixed_energy::partial_wave_forward(q, po);
  double e = 0.0;
  for (std::size_t l = 0; l < res.ps.deltas.size(); ++l) {
    const cplx ad = std::exp(kI * res.ps.deltas[l]) * std::sin(res.ps.deltas[l]);
    const double scale = std::abs(res.ps.a_ells[l]);
    if (scale > 0) e = std::max(e, std::abs(res.ps.a_ells[l] - ad) / scale);
  }
  rep.bound("amplitude_consistency", e, 1e-8, "max |a_l - e^{i delta} sin delta| / |a_l|");
  RVec ells(res.ps.ells.begin(), res.ps.ells.end());
  art.json_file("phase_shifts.json", io::encode(res.ps));
  art.csv("phase_shifts.csv", {"ell", "delta_ell"}, {ells, res.ps.deltas});
  return res.ps;
}

inline Report run_phase_shifts(const json& cfg, const std::string& out) {
  Report rep{"phase-shifts"};
  Artifacts art(out, rep);
  Inputs in{cfg, grid_settings(cfg)};
  phase_shift_input(in, cfg, rep, art);
  art.report();
  return rep;
}

inline Report run_radius(const json& cfg, const std::string& out) {
  Report rep{"radius"};
  Artifacts art(out, rep);
  Inputs in{cfg, grid_settings(cfg)};
  Tolerances tol = tolerances(cfg);
  PhaseShiftSequence ps = phase_shift_input(in, cfg, rep, art);
  auto est = fixed_energy::radius_estimate(ps);
  rep.results["a_hat"] = est.a_hat;
  rep.results["fit_range"] = {est.fit_lo, est.fit_hi};
  rep.results["fit_rms"] = est.fit_rms;
  if (tol.expected_radius)
    rep.bound("radius", std::abs(est.a_hat / *tol.expected_radius - 1.0), tol.radius_rel, "|a_hat / a - 1|");
  RVec ells(est.ells.begin(), est.ells.end());
  art.csv("radius_t.csv", {"ell", "t"}, {ells, est.t});
  art.report();
  return rep;
}

inline Report run_quarkonium(const json& cfg, const std::string& out) {
  Report rep{"quarkonium"};
  Artifacts art(out, rep);
  Inputs in{cfg, grid_settings(cfg)};
  Tolerances tol = tolerances(cfg);
  Section qs(sub(cfg, "quarkonium"), "$.quarkonium", {"levels", "X", "dx"});
  if (!in.has("quarkonium")) fail(ErrorKind::ConfigError, "$.input.quarkonium: missing");
  QuarkoniumData d =
      io::decode_quarkonium(load_source(in.input().at("quarkonium"), "$.input.quarkonium"), "$.input.quarkonium");
  const int J = qs.integer("levels", static_cast<int>(d.J()), 1);
  if (static_cast<std::size_t>(J) > d.J())
    fail(ErrorKind::ConfigError, "$.quarkonium.levels: exceeds the " + std::to_string(d.J()) + " given levels");
  d.energies.resize(static_cast<std::size_t>(J));
  d.slopes.resize(static_cast<std::size_t>(J));
  RVec xs = uniform_grid(qs.number("X", 10.0, true), qs.number("dx", 1e-3, true));
  auto ref = quarkonium::airy_reference(J);
  auto rec = quarkonium::recover_potential(d, ref, xs);
  RVec E = quarkonium::bound_state_energies(rec.q, d.J());
  double e = 0.0;
  for (std::size_t j = 0; j < d.J(); ++j) e = std::max(e, std::abs(E[j] - d.energies[j]));
  rep.bound("eigenvalues", e, tol.eigenvalues, "max |E_j(shooting) - E_j|");
  rep.results["shooting_energies"] = E;
  RVec ref_E;
  for (const auto& L : ref) ref_E.push_back(L.E);
  rep.results["reference_energies"] = ref_E;
  art.csv("q.csv", {"x", "q", "p"}, {xs, rec.q.qs, rec.p});
  art.json_file("potential.json", io::encode(rec.q));
  art.report();
  return rep;
}

// {"family": "sech2" | "nobound", ...} builds the closed-form response delta(t - 1) + regular part.
inline wave::WaveResponse response_input(const json& src, const std::string& path) {
  wave::WaveResponse r;
  if (is_family(src)) {
    Section s(src, path, {"family", "nu", "nu1", "k1", "T", "dt"});
    const std::string name = s.text("family", "", {"sech2", "nobound", "free"});
    const double T = s.number("T", 40.0, true), dt = s.number("dt", 1e-3, true);
    r.impulses.push_back({1.0, 1.0});
    if (name == "free") return r;
    std::function<double(double)> a;
    if (name == "sech2") {
      const double nu = s.number("nu", 1.0, true);
      a = [nu](double) { return nu; };
    } else {
      const double nu1 = s.number("nu1", 1.0, true), k1 = s.number("k1", 2.0, true);
      a = [nu1, k1](double t) { return (k1 - nu1) * std::exp(-nu1 * (t - 1)); };
    }
    r.ts = linspace(1.0, 1.0 + T, static_cast<std::size_t>(std::llround(T / dt)) + 1);
    for (double t : r.ts) r.a.push_back(a(t));
    return r;
  }
  Section s(src, path, {"type", "ts", "a", "impulses"});
  if (s.has("ts")) {
    r.ts = io::detail::reals(src.at("ts"), path + ".ts");
    r.a = io::detail::reals(io::detail::field(src, "a", path), path + ".a");
  }
  if (s.has("impulses")) {
    const json& im = src.at("impulses");
    if (!im.is_array()) fail(ErrorKind::ConfigError, path + ".impulses: expected an array");
    for (std::size_t i = 0; i < im.size(); ++i) {
      const std::string p = path + ".impulses[" + std::to_string(i) + "]";
      r.impulses.push_back({io::detail::number(io::detail::field(im[i], "t", p), p + ".t"),
                            io::detail::number(io::detail::field(im[i], "weight", p), p + ".weight")});
    }
  }
  return r;
}

inline Report run_wave_reduce(const json& cfg, const std::string& out) {
  Report rep{"wave-reduce"};
  Artifacts art(out, rep);
  Inputs in{cfg, grid_settings(cfg)};
  Tolerances tol = tolerances(cfg);
  Section ws(sub(cfg, "wave"), "$.wave", {"invert"});
  if (!in.has("response")) fail(ErrorKind::ConfigError, "$.input.response: missing");
  auto r = response_input(load_source(in.input().at("response"), "$.input.response"), "$.input.response");
  auto w = wave::wave_reduction(r, in.grid.ks());
  ScatteringData sd = wave::scattering_from_response(w);
  rep.results["resonance"] = w.jost.resonance;
  rep.results["tail_level"] = w.tail_level;
  rep.bound("unitarity", max_unitarity_defect(sd), tol.unitarity, "max ||S| - 1|");
  RVec re, im;
  for (auto f : w.jost.f) {
    re.push_back(f.real());
    im.push_back(f.imag());
  }
  art.json_file("jost.json", io::encode(w.jost));
  art.json_file("scattering.json", io::encode(sd));
  art.csv("f.csv", {"k", "Ref", "Imf"}, {w.jost.ks, re, im});
  if (ws.boolean("invert", false)) {
    auto q = marchenko::invert(sd, in.grid.X, in.grid.dx, marchenko_options(cfg));
    art.potential("q.csv", q);
  }
  art.report();
  return rep;
}

inline const std::vector<std::string>& pipeline_names() {
  static const std::vector<std::string> names{"forward", "marchenko", "gl", "krein", "roundtrip", "compare",
                                              "convert", "phase-shifts", "radius", "quarkonium", "wave-reduce"};
  return names;
}

// Runs cfg["pipeline"]; artifacts and report.json go to out_dir (nothing is written when it is empty).
inline Report run_pipeline(const json& cfg, const std::string& out_dir = "") {
  Section top(cfg, "$",
              {"pipeline", "output_dir", "input", "grid", "forward", "marchenko", "gl", "krein", "checks",
               "fixed_energy", "quarkonium", "wave", "convert"});
  std::set<std::string> names(pipeline_names().begin(), pipeline_names().end());
  const std::string name = top.text("pipeline", "", names);
  if (name.empty()) fail(ErrorKind::ConfigError, "$.pipeline: missing");
  const std::string out = out_dir.empty() ? top.text("output_dir", "") : out_dir;
  if (name == "forward") return run_forward(cfg, out);
  if (name == "marchenko") return run_marchenko(cfg, out);
  if (name == "gl") return run_gl(cfg, out);
  if (name == "krein") return run_krein(cfg, out);
  if (name == "roundtrip") return run_roundtrip(cfg, out);
  if (name == "compare") return run_compare(cfg, out);
  if (name == "convert") return run_convert(cfg, out);
  if (name == "phase-shifts") return run_phase_shifts(cfg, out);
  if (name == "radius") return run_radius(cfg, out);
  if (name == "quarkonium") return run_quarkonium(cfg, out);
  return run_wave_reduce(cfg, out);
}

}  // namespace invscat::pipeline
