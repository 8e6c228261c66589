#include <gtest/gtest.h>

#include <cmath>

#include "invscat/families.hpp"
#include "invscat/forward.hpp"

using namespace invscat;
using namespace invscat::forward;

namespace {

PotentialGrid sech2(double dx = 1e-3, double X = 20.0) {
  families::Resonance r{1.0};
  return make_potential([&](double x) { return r.q(x); }, X, dx);
}

PotentialGrid bargmann(double dx = 1e-3) {
  families::Bargmann b{1.0, 1.0};
  return make_potential([&](double x) { return b.q(x); }, 20.0, dx);
}

PotentialGrid zero_potential() { return make_potential([](double) { return 0.0; }, 5.0, 1e-2); }

const RVec& test_ks() {
  static const RVec ks = linspace(0.0, 10.0, 201);
  return ks;
}

}  // namespace

TEST(JostSolution, FreeCaseIsExactPlaneWave) {
  auto t = jost_solution(zero_potential(), {0.0, 0.5, 3.0});
  for (std::size_t m = 0; m < t.ks.size(); ++m)
    for (std::size_t i = 0; i < t.xs.size(); ++i) {
      EXPECT_NEAR(std::abs(t.values[m][i] - std::polar(1.0, t.ks[m] * t.xs[i])), 0.0, 1e-14);
      EXPECT_NEAR(std::abs(t.derivatives[m][i] - kI * t.ks[m] * std::polar(1.0, t.ks[m] * t.xs[i])), 0.0, 1e-13);
    }
}

TEST(JostSolution, Sech2MatchesRationalJostFunction) {
  JostEvaluator J(sech2());
  families::Resonance r{1.0};
  for (double k = 0.1; k <= 10.0; k += 0.1) {
    cplx f = J.f(k);
    EXPECT_LT(std::abs(f - r.f(k)) / std::abs(r.f(k)), 1e-4) << k;
  }
}

TEST(JostSolution, TableAgreesWithBoundaryEvaluator) {
  PotentialGrid q = sech2(2e-3, 12.0);
  auto t = jost_solution(q, {0.7, 2.0});
  ForwardOptions raw;
  raw.richardson = false;
  JostEvaluator J(q, raw);
  for (std::size_t m = 0; m < 2; ++m) {
    auto b = J(t.ks[m]);
    EXPECT_NEAR(std::abs(t.values[m][0] - b.f0), 0.0, 1e-13);
    EXPECT_NEAR(std::abs(t.derivatives[m][0] - b.fp0), 0.0, 1e-13);
  }
}

TEST(JostSolution, VolterraResidualSmall) {
  // f(x,k) - e^{ikx} - int_x^X sin(k(t-x))/k q f dt, evaluated by trapezoid on the same grid
  PotentialGrid q = sech2(1e-3, 12.0);
  const double k = 1.3;
  auto t = jost_solution(q, {k});
  const auto& f = t.values[0];
  const std::size_t n = q.xs.size();
  double worst = 0.0;
  for (std::size_t i = 0; i < n; i += 500) {
    cplx acc = 0.0;
    for (std::size_t j = i; j < n; ++j) {
      double w = (j == i || j + 1 == n) ? 0.5e-3 : 1e-3;
      acc += w * std::sin(k * (q.xs[j] - q.xs[i])) / k * q.qs[j] * f[j];
    }
    worst = std::max(worst, std::abs(f[i] - std::polar(1.0, k * q.xs[i]) - acc));
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(JostSolution, SecondOrderRefinement) {
  ForwardOptions raw;
  raw.richardson = false;
  families::Resonance r{1.0};
  auto err = [&](double dx) {
    JostEvaluator J(sech2(dx), raw);
    double e = 0.0;
    for (double k = 0.1; k <= 10.0; k += 0.3) e = std::max(e, std::abs(J.f(k) - r.f(k)));
    return e;
  };
  double e1 = err(0.02), e2 = err(0.01);
  EXPECT_GE(e1 / e2, 3.0) << e1 << " " << e2;
}

TEST(JostSolution, NoDecayRaised) {
  PotentialGrid q = make_potential([](double) { return 1.0; }, 2.0, 1e-2);
  try {
    JostEvaluator J(q);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoDecay);
  }
}

TEST(RegularSolution, FreeCase) {
  PotentialGrid q = zero_potential();
  auto t = regular_solution(q, {0.0, 0.5, 4.0});
  for (std::size_t i = 0; i < q.xs.size(); ++i) {
    const double x = q.xs[i];
    EXPECT_NEAR(t.values[0][i].real(), x, 1e-13);
    EXPECT_NEAR(t.values[1][i].real(), std::sin(0.5 * x) / 0.5, 1e-13);
    EXPECT_NEAR(t.values[2][i].real(), std::sin(4 * x) / 4, 1e-13);
    EXPECT_NEAR(t.derivatives[2][i].real(), std::cos(4 * x), 1e-12);
  }
  auto th = regular_solution(q, {2.0}, WaveKind::Theta);
  for (std::size_t i = 0; i < q.xs.size(); ++i) EXPECT_NEAR(th.values[0][i].real(), std::cos(2 * q.xs[i]), 1e-13);
}

TEST(RegularSolution, ConsistentWithJostRepresentation) {
  PotentialGrid q = sech2(1e-3, 12.0);
  RVec ks{0.5, 1.0, 3.0};
  auto phi = regular_solution(q, ks);
  auto f = jost_solution(q, ks);
  for (std::size_t m = 0; m < ks.size(); ++m) {
    const cplx f0 = f.values[m][0];
    for (std::size_t i = 0; i < q.xs.size(); i += 400) {
      // phi = (f(x,k) f(-k) - f(x,-k) f(k)) / (2ik)
      double rep = std::imag(f.values[m][i] * std::conj(f0)) / ks[m];
      EXPECT_NEAR(phi.values[m][i].real(), rep, 1e-5) << ks[m] << " " << q.xs[i];
      // Wronskian f phi' - f' phi = f(k)
      cplx W = f.values[m][i] * phi.derivatives[m][i] - f.derivatives[m][i] * phi.values[m][i];
      EXPECT_LT(std::abs(W - f0), 1e-5);
    }
  }
}

TEST(BoundStates, FreeHasNone) {
  auto b = bound_states(zero_potential());
  EXPECT_TRUE(b.states.empty());
  EXPECT_FALSE(b.resonance);
}

TEST(BoundStates, BargmannSingleLevel) {
  families::Bargmann fam{1.0, 1.0};
  auto b = bound_states(bargmann());
  ASSERT_EQ(b.states.size(), 1u);
  EXPECT_NEAR(b.states[0].k, 1.0, 1e-4);
  EXPECT_NEAR(b.states[0].s / fam.s1(), 1.0, 1e-4);
  EXPECT_NEAR(b.states[0].c / fam.c1(), 1.0, 1e-4);
  EXPECT_NEAR(b.states[0].fprime, fam.fprime_at_bound(), 1e-6);
  EXPECT_LT(std::abs(b.states[0].fdot - fam.fdot()), 1e-6);
  EXPECT_FALSE(b.resonance);
}

TEST(BoundStates, Sech2IsAResonance) {
  auto b = bound_states(sech2());
  EXPECT_TRUE(b.states.empty());
  EXPECT_TRUE(b.resonance);
  EXPECT_LT(std::abs(b.f_at_zero), 1e-6);
}

TEST(ScatteringData, FreeIsIdentity) {
  auto sd = scattering_data(zero_potential(), test_ks());
  for (auto s : sd.S) EXPECT_LT(std::abs(s - 1.0), 1e-14);
  EXPECT_EQ(sd.index, 0);
  EXPECT_TRUE(sd.bound_ks.empty());
}

TEST(ScatteringData, Sech2Resonance) {
  families::Resonance r{1.0};
  auto fr = forward_data(sech2(), test_ks());
  const auto& sd = fr.scattering;
  EXPECT_EQ(sd.index, -1);
  EXPECT_EQ(sd.S[0], cplx(-1.0));
  for (std::size_t m = 1; m < sd.ks.size(); ++m) {
    EXPECT_LT(std::abs(sd.S[m] - r.S(sd.ks[m])), 1e-4) << sd.ks[m];
    EXPECT_LT(std::abs(std::abs(sd.S[m]) - 1.0), 1e-8);
  }
  EXPECT_LT(wronskian_residual(fr.jost), 1e-6);
}

TEST(ScatteringData, BargmannMatchesClosedForm) {
  families::Bargmann b{1.0, 1.0};
  auto fr = forward_data(bargmann(), test_ks());
  const auto& sd = fr.scattering;
  EXPECT_EQ(sd.index, -2);
  ASSERT_EQ(sd.bound_ks.size(), 1u);
  for (std::size_t m = 0; m < sd.ks.size(); ++m) {
    EXPECT_LT(std::abs(sd.S[m] - b.S(sd.ks[m])), 1e-4) << sd.ks[m];
    EXPECT_LT(std::abs(fr.jost.f[m] - b.f(sd.ks[m])), 1e-4);
  }
  EXPECT_LT(wronskian_residual(fr.jost), 1e-6);
}

TEST(PhaseShift, Cases) {
  auto free_sd = families::sample_S(test_ks(), [](double) { return cplx(1.0); });
  for (double d : phase_shift(free_sd)) EXPECT_EQ(d, 0.0);
  families::Resonance r{1.0};
  auto sd = families::sample_S(linspace(0.01, 200.0, 20000), [&](double k) { return r.S(k); }, {}, {}, -1);
  RVec d = phase_shift(sd);
  std::size_t i1 = locate(sd.ks, 1.0);
  EXPECT_NEAR(lagrange_interp(sd.ks, d, 1.0), kPi / 4, 1e-9);
  EXPECT_NEAR(d[i1], std::atan(1.0 / sd.ks[i1]), 1e-12);
  EXPECT_LT(std::abs(d.back()), 1e-2);
}

TEST(SpectralFunction, FreeAndBargmann) {
  JostData jd;
  jd.ks = test_ks();
  jd.f.assign(jd.ks.size(), 1.0);
  auto sf = spectral_function(jd, {});
  for (std::size_t i = 0; i < sf.lambdas.size(); ++i) EXPECT_NEAR(sf.density[i], std::sqrt(sf.lambdas[i]) / kPi, 1e-15);

  families::Bargmann b{1.0, 1.0};
  auto fr = forward_data(bargmann(), test_ks());
  auto sb = spectral_function(fr);
  ASSERT_EQ(sb.discrete_points.size(), 1u);
  EXPECT_NEAR(sb.discrete_points[0].lambda, -1.0, 2e-4);
  EXPECT_NEAR(sb.discrete_points[0].c, b.c1(), 1e-4);
  const double nu2 = b.nu1() * b.nu1();
  for (std::size_t i = 0; i < sb.lambdas.size(); ++i) {
    double l = sb.lambdas[i];
    EXPECT_NEAR(sb.density[i], std::sqrt(l) * (l + nu2) / (kPi * (l + 1.0)), 1e-5 * (1 + std::sqrt(l)));
  }
}

TEST(SpectralFunction, ThirdFamilyDensity) {
  // k1 = 1/2, r1 = 1, so that 2 k1 r1 = 1
  families::Bargmann b{0.5, 1.0};
  PotentialGrid q = make_potential([&](double x) { return b.q(x); }, 25.0, 1e-3);
  auto fr = forward_data(q, test_ks());
  auto sf = spectral_function(fr);
  ASSERT_EQ(sf.discrete_points.size(), 1u);
  EXPECT_NEAR(sf.discrete_points[0].c, 1.0, 1e-4);
  for (std::size_t i = 0; i < sf.lambdas.size(); ++i)
    EXPECT_NEAR(sf.density[i], b.density(sf.lambdas[i]), 1e-5 * (1 + sf.lambdas[i]));
}

TEST(IFunctionTest, Cases) {
  auto fz = forward_data(zero_potential(), test_ks());
  auto i0 = i_function(fz.jost);
  for (std::size_t m = 0; m < i0.ks.size(); ++m) EXPECT_LT(std::abs(i0.I[m] - kI * i0.ks[m]), 1e-14);

  families::Bargmann b{1.0, 1.0};
  auto ib = i_function(forward_data(bargmann(), test_ks()).jost);
  for (std::size_t m = 0; m < ib.ks.size(); ++m) EXPECT_LT(std::abs(ib.I[m] - b.I(ib.ks[m])), 1e-4);
  ASSERT_EQ(ib.residues.size(), 1u);
  EXPECT_LT(std::abs(ib.residues[0] - kI * b.r1), 1e-5);

  families::Resonance r{1.0};
  auto ir = i_function(forward_data(sech2(), test_ks()).jost);
  EXPECT_TRUE(ir.resonance);
  EXPECT_NE(ir.ks.front(), 0.0);
  for (std::size_t m = 0; m < ir.ks.size(); ++m) EXPECT_LT(std::abs(ir.I[m] - r.I(ir.ks[m])), 1e-4 * (1 + 1 / ir.ks[m]));
  EXPECT_LT(std::abs(ir.a0 - kI * 1.0), 1e-3);
}
