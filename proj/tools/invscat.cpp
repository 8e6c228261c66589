#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "invscat/json_io.hpp"
#include "invscat/pipeline.hpp"

using invscat::io::json;

namespace {

struct Common {
  std::string input;
  std::string out;
  std::string config;
  std::optional<double> xmax, dx, kmax;
};

void add_common(CLI::App* app, Common& c, bool input_required = true) {
  auto* in = app->add_option("input", c.input, "Input JSON: a data object or a {\"family\": ...} specification");
  if (input_required) in->required();
  app->add_option("-o,--out", c.out, "Directory for artifacts and report.json");
  app->add_option("-c,--config", c.config, "Base configuration JSON (flags override it)");
}

void add_grid(CLI::App* app, Common& c) {
  app->add_option("--xmax", c.xmax, "Inversion interval [0, X]")->check(CLI::PositiveNumber);
  app->add_option("--dx", c.dx, "Step of the x-grid")->check(CLI::PositiveNumber);
}

json base_config(const Common& c, const std::string& pipeline) {
  json cfg = c.config.empty() ? json::object() : invscat::io::read_json(c.config);
  cfg["pipeline"] = pipeline;
  if (c.xmax) cfg["grid"]["X"] = *c.xmax;
  if (c.dx) cfg["grid"]["dx"] = *c.dx;
  return cfg;
}

json load_input(const Common& c) { return invscat::io::read_json(c.input); }

int report(const invscat::pipeline::Report& rep, const std::string& out) {
  for (const auto& ch : rep.checks) {
    std::printf("%s %s value=%.6g", ch.passed ? "PASS" : "FAIL", ch.name.c_str(), ch.value);
    if (!std::isnan(ch.tolerance)) std::printf(" tol=%.3g", ch.tolerance);
    std::printf(" %s\n", ch.detail.c_str());
  }
  if (!rep.results.empty()) std::printf("%s\n", rep.results.dump().c_str());
  if (!out.empty()) std::printf("artifacts in %s\n", out.c_str());
  return rep.all_passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Direct and inverse scattering on the half-line"};
  app.require_subcommand(1);
  Common c;
  std::string from = "S", to = "f";
  bool hybrid = false, invert = false;
  std::optional<double> x0, expected;
  std::optional<int> levels, L;

  auto* fwd = app.add_subcommand("forward", "Scattering, Jost, spectral and I-function data of a potential");
  add_common(fwd, c);
  fwd->add_option("--kmax", c.kmax, "Largest wavenumber")->check(CLI::PositiveNumber);

  auto* conv = app.add_subcommand("convert", "Convert between S, rho, I and |f| representations");
  add_common(conv, c);
  conv->add_option("--from", from, "Input representation")->check(CLI::IsMember({"S", "rho", "I", "absf"}));
  conv->add_option("--to", to, "Output representation")->check(CLI::IsMember({"f", "S", "rho"}));

  auto* mar = app.add_subcommand("invert-marchenko", "Potential from scattering data (Marchenko)");
  add_common(mar, c);
  add_grid(mar, c);
  mar->add_option("--kmax", c.kmax, "Use data up to this wavenumber")->check(CLI::PositiveNumber);

  auto* gl = app.add_subcommand("invert-gl", "Potential from a spectral function (Gel'fand-Levitan)");
  add_common(gl, c);
  add_grid(gl, c);

  auto* kr = app.add_subcommand("invert-krein", "Potential from scattering data (Krein)");
  add_common(kr, c);
  add_grid(kr, c);
  kr->add_flag("--hybrid", hybrid, "Switch to Marchenko beyond the contraction point");
  kr->add_option("--x0", x0, "Seam of the hybrid solver")->check(CLI::PositiveNumber);

  auto* ps = app.add_subcommand("phase-shifts", "Fixed-energy phase shifts of a compactly supported potential");
  add_common(ps, c);
  ps->add_option("--L", L, "Largest angular momentum")->check(CLI::NonNegativeNumber);

  auto* rad = app.add_subcommand("radius", "Support radius from fixed-energy phase shifts");
  add_common(rad, c);
  rad->add_option("--L", L, "Largest angular momentum")->check(CLI::NonNegativeNumber);
  rad->add_option("--expected", expected, "Check the estimate against this radius (10%)")->check(CLI::PositiveNumber);

  auto* qk = app.add_subcommand("quarkonium", "Confining potential from levels {E_j, s_j}");
  add_common(qk, c);
  add_grid(qk, c);
  qk->add_option("--levels", levels, "Number of levels J used")->check(CLI::PositiveNumber);

  auto* wr = app.add_subcommand("wave-reduce", "Jost function from a boundary response a(t)");
  add_common(wr, c);
  add_grid(wr, c);
  wr->add_flag("--invert", invert, "Continue with the Marchenko inversion");

  auto* rt = app.add_subcommand("roundtrip", "Potential => S => potential => S");
  add_common(rt, c, false);
  add_grid(rt, c);

  auto* cmp = app.add_subcommand("compare", "Marchenko, Gel'fand-Levitan and Krein on the same data");
  add_common(cmp, c);
  add_grid(cmp, c);

  auto* run = app.add_subcommand("run", "Run the pipeline named in a configuration file");
  std::string config_file, run_out;
  run->add_option("config", config_file, "Configuration JSON")->required();
  run->add_option("-o,--out", run_out, "Directory for artifacts and report.json");

  CLI11_PARSE(app, argc, argv);

  try {
    json cfg;
    if (run->parsed()) {
      cfg = invscat::io::read_json(config_file);
      c.out = run_out.empty() && cfg.contains("output_dir") && cfg["output_dir"].is_string()
                  ? cfg["output_dir"].get<std::string>()
                  : run_out;
    } else if (fwd->parsed()) {
      cfg = base_config(c, "forward");
      cfg["input"]["potential"] = load_input(c);
      if (c.kmax) cfg["grid"]["k_max"] = *c.kmax;
    } else if (conv->parsed()) {
      cfg = base_config(c, "convert");
      cfg["convert"] = {{"from", from}, {"to", to}};
      const char* slot = from == "S" ? "scattering" : from == "rho" ? "spectral" : from == "I" ? "ifunction" : "absf";
      cfg["input"][slot] = load_input(c);
    } else if (mar->parsed()) {
      cfg = base_config(c, "marchenko");
      cfg["input"]["scattering"] = load_input(c);
      if (c.kmax) cfg["marchenko"]["k_max"] = *c.kmax;
    } else if (gl->parsed()) {
      cfg = base_config(c, "gl");
      json in = load_input(c);
      cfg["input"][in.contains("family") ? "scattering" : "spectral"] = in;
    } else if (kr->parsed()) {
      cfg = base_config(c, "krein");
      cfg["input"]["scattering"] = load_input(c);
      if (hybrid) cfg["krein"]["hybrid"] = true;
      if (x0) cfg["krein"]["x0"] = *x0;
    } else if (ps->parsed() || rad->parsed()) {
      cfg = base_config(c, ps->parsed() ? "phase-shifts" : "radius");
      json in = load_input(c);
      cfg["input"][in.contains("deltas") ? "phase_shifts" : "potential"] = in;
      if (L) cfg["fixed_energy"]["L"] = *L;
      if (expected) cfg["checks"]["expected_radius"] = *expected;
    } else if (qk->parsed()) {
      cfg = base_config(c, "quarkonium");
      cfg["input"]["quarkonium"] = load_input(c);
      if (levels) cfg["quarkonium"]["levels"] = *levels;
      if (c.xmax) cfg["quarkonium"]["X"] = *c.xmax;
      if (c.dx) cfg["quarkonium"]["dx"] = *c.dx;
      if (cfg.contains("grid")) {
        cfg["grid"].erase("X");
        cfg["grid"].erase("dx");
        if (cfg["grid"].empty()) cfg.erase("grid");
      }
    } else if (wr->parsed()) {
      cfg = base_config(c, "wave-reduce");
      cfg["input"]["response"] = load_input(c);
      if (invert) cfg["wave"]["invert"] = true;
    } else if (rt->parsed()) {
      cfg = base_config(c, "roundtrip");
      if (!c.input.empty()) cfg["input"]["potential"] = load_input(c);
    } else if (cmp->parsed()) {
      cfg = base_config(c, "compare");
      cfg["input"]["scattering"] = load_input(c);
    }
    return report(invscat::pipeline::run_pipeline(cfg, c.out), c.out);
  } catch (const invscat::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
