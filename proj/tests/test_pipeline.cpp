#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "invscat/invscat.hpp"

using namespace invscat;
using pipeline::json;

namespace {

std::string temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("invscat_test_" + name);
  std::filesystem::remove_all(p);
  return p.string();
}

void expect_config_error(const json& cfg, const std::string& path) {
  try {
    pipeline::run_pipeline(cfg);
    FAIL() << "no error for " << path;
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ConfigError);
    EXPECT_NE(std::string(e.what()).find(path), std::string::npos) << e.what();
  }
}

const pipeline::CheckResult* find(const pipeline::Report& r, const std::string& name) {
  for (const auto& c : r.checks)
    if (c.name == name) return &c;
  return nullptr;
}

}  // namespace

TEST(Serialization, LosslessRoundTrip) {
  PotentialGrid q = make_potential([](double x) { return std::exp(-x) / 3.0; }, 2.0, 0.1, DecayClass::Compact, 2.0);
  auto q2 = io::decode_potential(json::parse(io::encode(q).dump()));
  EXPECT_EQ(q2.xs, q.xs);
  EXPECT_EQ(q2.qs, q.qs);
  EXPECT_EQ(*q2.support_radius, 2.0);
  EXPECT_EQ(q2.decay_class, DecayClass::Compact);

  families::Bargmann b{1.0, 1.0};
  auto sd = families::sample_S(linspace(0.0, 3.0, 31), [&](double k) { return b.S(k); }, {1.0}, {b.s1()}, -2);
  auto sd2 = io::decode_scattering(json::parse(io::encode(sd).dump()));
  EXPECT_EQ(sd2.ks, sd.ks);
  EXPECT_EQ(sd2.S, sd.S);
  EXPECT_EQ(sd2.bound_ks, sd.bound_ks);
  EXPECT_EQ(sd2.norming, sd.norming);
  EXPECT_EQ(sd2.index, sd.index);

  auto fr = forward::forward_data(make_potential([&](double x) { return b.q(x); }, 12.0, 1e-2), linspace(0.0, 3.0, 7));
  auto jd = io::decode_jost(json::parse(io::encode(fr.jost).dump()));
  EXPECT_EQ(jd.f, fr.jost.f);
  EXPECT_EQ(jd.fprime0, fr.jost.fprime0);
  EXPECT_EQ(jd.fdot_at_bound, fr.jost.fdot_at_bound);
  EXPECT_EQ(jd.fprime_at_bound, fr.jost.fprime_at_bound);
  auto sf = forward::spectral_function(fr);
  auto sf2 = io::decode_spectral(json::parse(io::encode(sf).dump()));
  EXPECT_EQ(sf2.density, sf.density);
  ASSERT_EQ(sf2.discrete_points.size(), 1u);
  EXPECT_EQ(sf2.discrete_points[0].c, sf.discrete_points[0].c);
  auto ifn = forward::i_function(fr.jost);
  auto ifn2 = io::decode_ifunction(json::parse(io::encode(ifn).dump()));
  EXPECT_EQ(ifn2.I, ifn.I);
  EXPECT_EQ(ifn2.residues, ifn.residues);

  TransformationKernel K;
  K.kind = KernelKind::MarchenkoA;
  K.xs = {0.0, 0.1};
  K.dy = 0.1;
  K.diagonal = {1.0 / 7, 2.0 / 7};
  K.values = {{1.0 / 7, 1e-300}, {}};
  auto K2 = io::decode_kernel(json::parse(io::encode(K).dump()));
  EXPECT_EQ(K2.values, K.values);
  EXPECT_EQ(K2.kind, K.kind);

  PhaseShiftSequence ps{{0, 1}, {0.1 / 3, 1e-200}, {cplx(0.1, 0.2), cplx(1e-200, 0.0)}};
  auto ps2 = io::decode_phase_shifts(json::parse(io::encode(ps).dump()));
  EXPECT_EQ(ps2.deltas, ps.deltas);
  EXPECT_EQ(ps2.a_ells, ps.a_ells);

  QuarkoniumData d{{2.1, 4.0}, {1.0 / 3, 1.0}};
  auto d2 = io::decode_quarkonium(json::parse(io::encode(d).dump()));
  EXPECT_EQ(d2.energies, d.energies);
  EXPECT_EQ(d2.slopes, d.slopes);

  KreinKernel H{{0.0, 0.5}, {1.0 / 3, 0.25}, 1.0};
  auto H2 = io::decode_krein_kernel(json::parse(io::encode(H).dump()));
  EXPECT_EQ(H2.H, H.H);
}

TEST(Serialization, ErrorsCarryFieldPaths) {
  json j = {{"ks", {0.0, 1.0}}, {"S", {{1.0, 0.0}, "x"}}};
  try {
    io::decode_scattering(j);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ConfigError);
    EXPECT_NE(std::string(e.what()).find("$.S[1]"), std::string::npos) << e.what();
  }
}

TEST(WaveReduction, FreeTravelTime) {
  wave::WaveResponse r;
  r.impulses.push_back({1.0, 1.0});
  auto w = wave::wave_reduction(r, linspace(0.0, 20.0, 41));
  for (std::size_t i = 0; i < w.A.size(); ++i) {
    EXPECT_LT(std::abs(w.A[i] - std::polar(1.0, w.jost.ks[i])), 1e-14);
    EXPECT_LT(std::abs(w.jost.f[i] - 1.0), 1e-14);
  }
  EXPECT_FALSE(w.jost.resonance);
}

TEST(WaveReduction, SyntheticResponses) {
  RVec ks = graded_k_grid(50.0);
  // f = (k + i)/(k + 2i): a(t) = delta(t - 1) + e^{-(t-1)} for t > 1
  families::NoBound nb{1.0, 2.0};
  auto r1 = pipeline::response_input(json{{"family", "nobound"}, {"nu1", 1.0}, {"k1", 2.0}}, "$");
  auto w1 = wave::wave_reduction(r1, ks);
  EXPECT_FALSE(w1.jost.resonance);
  double e1 = 0.0;
  for (std::size_t i = 0; i < ks.size(); ++i) e1 = std::max(e1, std::abs(w1.jost.f[i] / nb.f(ks[i]) - 1.0));
  EXPECT_LT(e1, 1e-3);

  // sech^2: f = k/(k + i), a(t) = delta(t - 1) + 1 for t > 1
  families::Resonance res{1.0};
  auto r2 = pipeline::response_input(json{{"family", "sech2"}}, "$");
  auto w2 = wave::wave_reduction(r2, ks);
  EXPECT_TRUE(w2.jost.resonance);
  EXPECT_EQ(w2.jost.f[0], cplx(0.0));
  double e2 = 0.0;
  for (std::size_t i = 1; i < ks.size(); ++i) e2 = std::max(e2, std::abs(w2.jost.f[i] / res.f(ks[i]) - 1.0));
  EXPECT_LT(e2, 1e-3);
  auto sd = wave::scattering_from_response(w2);
  EXPECT_EQ(sd.index, -1);
}

TEST(WaveReduction, ZeroResponseAndGrowth) {
  wave::WaveResponse r;
  r.impulses = {{1.0, 1.0}, {2.0, 1.0}};
  try {
    wave::wave_reduction(r, {0.0, kPi});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ZeroResponse);
  }
  wave::WaveResponse g;
  g.ts = linspace(1.0, 11.0, 1001);
  for (double t : g.ts) g.a.push_back(std::exp(0.5 * (t - 1)));
  try {
    wave::wave_reduction(g, {0.0, 1.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DivergentTail);
  }
}

TEST(SpectralConversion, ScatteringToSpectralAndBack) {
  families::Bargmann b{0.5, 1.0};
  RVec ks = graded_k_grid(200.0);
  auto sd = families::sample_S(ks, [&](double k) { return b.S(k); }, {b.k1}, {b.s1()}, -2);
  auto sf = riemann::spectral_from_scattering(sd);
  ASSERT_EQ(sf.discrete_points.size(), 1u);
  EXPECT_NEAR(sf.discrete_points[0].c / b.c1(), 1.0, 1e-4);
  for (std::size_t i = 1; i < sf.lambdas.size(); i += 37)
    EXPECT_LT(std::abs(sf.density[i] / b.density(sf.lambdas[i]) - 1.0), 1e-3) << sf.lambdas[i];
  auto back = riemann::s_from_spectral(sf);
  ASSERT_EQ(back.norming.size(), 1u);
  EXPECT_NEAR(back.norming[0] / b.s1(), 1.0, 1e-3);
}

TEST(Pipeline, ForwardOnZeroPotential) {
  const std::string dir = temp_dir("forward");
  auto rep = pipeline::run_pipeline(
      {{"pipeline", "forward"}, {"input", {{"potential", {{"family", "free"}}}}}, {"grid", {{"q_X", 5.0}, {"q_dx", 0.01}, {"k_max", 20.0}}}},
      dir);
  EXPECT_TRUE(rep.all_passed());
  auto sd = io::decode_scattering(io::read_json(dir + "/scattering.json"));
  for (auto s : sd.S) EXPECT_EQ(s, cplx(1.0));
  EXPECT_TRUE(std::filesystem::exists(dir + "/S.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir + "/delta.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir + "/density.csv"));
  auto r = io::read_json(dir + "/report.json");
  EXPECT_TRUE(r.at("all_passed").get<bool>());
  std::ifstream csv(dir + "/S.csv");
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "k,ReS,ImS");
}

TEST(Pipeline, RoundTripOnSech2) {
  auto rep = pipeline::run_pipeline({{"pipeline", "roundtrip"}, {"input", {{"potential", {{"family", "sech2"}}}}}});
  const auto* c = find(rep, "roundtrip_q");
  ASSERT_NE(c, nullptr);
  EXPECT_LT(c->value, 1e-3);
  EXPECT_TRUE(rep.all_passed()) << rep.to_json().dump(1);
}

TEST(Pipeline, CompareProducesThreeColumns) {
  const std::string dir = temp_dir("compare");
  auto rep = pipeline::run_pipeline(
      {{"pipeline", "compare"}, {"input", {{"scattering", {{"family", "nobound"}}}}}}, dir);
  EXPECT_TRUE(rep.all_passed()) << rep.to_json().dump(1);
  std::ifstream csv(dir + "/compare.csv");
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "x,q_marchenko,q_gl,q_krein");
  ASSERT_NE(find(rep, "krein_vs_marchenko"), nullptr);
  ASSERT_NE(find(rep, "gl_vs_marchenko"), nullptr);
}

TEST(Pipeline, DeterministicReports) {
  json cfg = {{"pipeline", "quarkonium"},
              {"input", {{"quarkonium", {{"energies", {2.0, 4.08794944}}, {"slopes", {1.2, 1.0}}}}}},
              {"quarkonium", {{"X", 9.0}}}};
  auto a = pipeline::run_pipeline(cfg).to_json().dump();
  auto b = pipeline::run_pipeline(cfg).to_json().dump();
  EXPECT_EQ(a, b);
  EXPECT_TRUE(json::parse(a).at("all_passed").get<bool>()) << a;
}

TEST(Pipeline, ConfigErrorsNameTheField) {
  expect_config_error({{"pipeline", "nonsense"}}, "$.pipeline");
  expect_config_error({{"pipeline", "forward"}, {"grid", {{"dx", -1.0}}}}, "$.grid.dx");
  expect_config_error({{"pipeline", "forward"}, {"grid", {{"spacing", 1.0}}}}, "$.grid.spacing");
  expect_config_error({{"pipeline", "marchenko"}, {"input", {{"scattering", {{"family", "sech2"}, {"nu", "one"}}}}}},
                      "$.input.scattering.nu");
  expect_config_error({{"pipeline", "forward"}}, "$.input.potential");
}
