#include <gtest/gtest.h>

#include <cmath>

#include "invscat/core.hpp"
#include "invscat/families.hpp"
#include "invscat/forward.hpp"
#include "invscat/riemann.hpp"

using namespace invscat;
using namespace invscat::riemann;

namespace {

const RVec& kgrid() {
  static const RVec ks = graded_k_grid(200.0);
  return ks;
}

ScatteringData bargmann_sd() {
  families::Bargmann b{1.0, 1.0};
  return families::sample_S(kgrid(), [&](double k) { return b.S(k); }, {1.0}, {b.s1()}, -2);
}

ScatteringData resonance_sd() {
  families::Resonance r{1.0};
  return families::sample_S(kgrid(), [&](double k) { return r.S(k); }, {}, {}, -1);
}

template <class Fn>
double max_rel_error(const JostData& jd, Fn exact, double lo, double hi) {
  double e = 0.0;
  for (std::size_t i = 0; i < jd.ks.size(); ++i) {
    const double k = jd.ks[i];
    if (k < lo || k > hi) continue;
    const cplx ex = exact(k);
    e = std::max(e, std::abs(jd.f[i] - ex) / std::abs(ex));
  }
  return e;
}

}  // namespace

TEST(Blaschke, Basics) {
  RVec ks = linspace(0.0, 5.0, 51);
  for (auto w : blaschke_product(ks, {})) EXPECT_EQ(w, cplx(1.0));
  EXPECT_LT(std::abs(blaschke(1.0, {1.0}) - cplx(0.0, -1.0)), 1e-15);
  for (auto w : blaschke_product(ks, {0.3, 1.0, 2.5})) EXPECT_NEAR(std::abs(w), 1.0, 1e-15);
  try {
    blaschke_product(ks, {1.0}, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::KappaCollision);
  }
}

TEST(JostFromS, IdentityData) {
  auto sd = families::sample_S(kgrid(), [](double) { return cplx(1.0); });
  auto jd = jost_from_S(sd);
  for (auto f : jd.f) EXPECT_LT(std::abs(f - 1.0), 1e-12);
}

TEST(JostFromS, BargmannBoundState) {
  families::Bargmann b{1.0, 1.0};
  auto sd = bargmann_sd();
  EXPECT_EQ(core::winding_index(sd.ks, sd.S), -2);
  auto jd = jost_from_S(sd);
  EXPECT_LT(max_rel_error(jd, [&](double k) { return b.f(k); }, 0.2, 10.0), 1e-3);
  ASSERT_EQ(jd.fdot_at_bound.size(), 1u);
  EXPECT_LT(std::abs(jd.fdot_at_bound[0] - b.fdot()), 1e-4);
  EXPECT_LT(jump_residual(jd, sd.S), 5e-3);
}

TEST(JostFromS, ResonanceKappaIndependent) {
  families::Resonance r{1.0};
  auto sd = resonance_sd();
  FactorizationOptions o1, o2;
  o1.kappa = 1.0;
  o2.kappa = 2.0;
  auto j1 = jost_from_S(sd, o1);
  auto j2 = jost_from_S(sd, o2);
  EXPECT_TRUE(j1.resonance);
  EXPECT_LT(max_rel_error(j1, [&](double k) { return r.f(k); }, 0.2, 10.0), 1e-3);
  double d = 0.0;
  for (std::size_t i = 0; i < j1.ks.size(); ++i) d = std::max(d, std::abs(j1.f[i] - j2.f[i]));
  EXPECT_LT(d, 1e-3);
  EXPECT_EQ(j1.f[0], cplx(0.0));
  EXPECT_LT(jump_residual(j1, sd.S), 5e-3);
}

TEST(JostFromS, IndexMismatchDetected) {
  auto sd = bargmann_sd();
  sd.bound_ks.clear();
  sd.norming.clear();
  try {
    jost_from_S(sd);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IndexMismatch);
  }
  sd.index = 0;
  try {
    jost_from_S(sd);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IndexMismatch);
  }
}

TEST(JostFromModulus, Cases) {
  const RVec& ks = kgrid();
  RVec ones(ks.size(), 1.0);
  for (auto f : jost_from_modulus(ks, ones, {}).f) EXPECT_LT(std::abs(f - 1.0), 1e-12);

  families::Bargmann b{1.0, 1.0};
  RVec ab(ks.size());
  for (std::size_t i = 0; i < ks.size(); ++i) ab[i] = std::abs(b.f(ks[i]));
  auto jb = jost_from_modulus(ks, ab, {1.0});
  EXPECT_LT(max_rel_error(jb, [&](double k) { return b.f(k); }, 0.2, 10.0), 1e-3);
  for (std::size_t i = 0; i < ks.size(); ++i) EXPECT_LT(std::abs(std::abs(jb.f[i]) - ab[i]), 1e-6);

  families::Resonance r{1.0};
  RVec ar(ks.size());
  for (std::size_t i = 0; i < ks.size(); ++i) ar[i] = std::abs(r.f(ks[i]));
  auto jr = jost_from_modulus(ks, ar, {}, true);
  EXPECT_LT(max_rel_error(jr, [&](double k) { return r.f(k); }, 0.2, 10.0), 1e-3);
}

TEST(SFromSpectral, FreeAndBargmann) {
  JostData free;
  free.ks = kgrid();
  free.f.assign(free.ks.size(), 1.0);
  auto sf0 = forward::spectral_function(free, {});
  auto s0 = s_from_spectral(sf0);
  for (auto s : s0.S) EXPECT_LT(std::abs(s - 1.0), 1e-10);

  // third family: k1 = 1/2, r1 = 1
  families::Bargmann b{0.5, 1.0};
  SpectralFunction sf;
  for (double k : kgrid()) {
    sf.lambdas.push_back(k * k);
    sf.density.push_back(b.density(k * k));
  }
  sf.discrete_points.push_back({-0.25, b.c1()});
  auto sd = s_from_spectral(sf);
  ASSERT_EQ(sd.bound_ks.size(), 1u);
  EXPECT_NEAR(sd.bound_ks[0], 0.5, 1e-14);
  EXPECT_NEAR(sd.norming[0] / b.s1(), 1.0, 1e-3);
  EXPECT_EQ(sd.index, -2);
  for (std::size_t i = 0; i < sd.ks.size(); ++i) EXPECT_LT(std::abs(sd.S[i] - b.S(sd.ks[i])), 1e-3);

  // round trip back to the density
  auto jd = jost_from_S(sd);
  auto sf2 = forward::spectral_function(jd, sf.discrete_points);
  for (std::size_t i = 1; i < sf2.lambdas.size(); ++i)
    EXPECT_LT(std::abs(sf2.density[i] - sf.density[i]), 1e-3 * sf.density[i]) << sf.lambdas[i];
}

TEST(SFromIFunction, Cases) {
  IFunction i0;
  i0.ks = kgrid();
  for (double k : i0.ks) i0.I.push_back(kI * k);
  for (auto s : scattering_from_ifunction(i0).S) EXPECT_LT(std::abs(s - 1.0), 1e-10);

  families::Bargmann b{1.0, 1.0};
  IFunction ib;
  ib.ks = kgrid();
  for (double k : ib.ks) ib.I.push_back(b.I(k));
  ib.poles = {1.0};
  ib.residues = {kI * b.r1};
  auto sb = scattering_from_ifunction(ib);
  EXPECT_EQ(sb.index, -2);
  EXPECT_NEAR(sb.norming[0] / b.s1(), 1.0, 1e-3);
  for (std::size_t i = 0; i < sb.ks.size(); ++i) EXPECT_LT(std::abs(sb.S[i] - b.S(sb.ks[i])), 1e-3);

  families::Resonance r{1.0};
  IFunction ir;
  ir.resonance = true;
  ir.a0 = kI;
  for (double k : kgrid())
    if (k > 0) {
      ir.ks.push_back(k);
      ir.I.push_back(r.I(k));
    }
  auto sr = scattering_from_ifunction(ir);
  EXPECT_EQ(sr.index, -1);
  EXPECT_EQ(sr.S[0], cplx(-1.0));
  for (std::size_t i = 1; i < sr.ks.size(); ++i) EXPECT_LT(std::abs(sr.S[i] - r.S(sr.ks[i])), 1e-3);

  IFunction bad = i0;
  bad.I[10] = cplx(0.0, -1.0);
  try {
    scattering_from_ifunction(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonHerglotz);
  }
}
