#include <gtest/gtest.h>

#include <chrono>
#include <cmath>

#include "invscat/core.hpp"
#include "invscat/families.hpp"
#include "invscat/krein.hpp"
#include "invscat/marchenko.hpp"
#include "invscat/riemann.hpp"

using namespace invscat;
using namespace invscat::krein;

namespace {

const RVec& kgrid() {
  static const RVec ks = graded_k_grid(200.0);
  return ks;
}

const families::NoBound& nb() {
  static const families::NoBound f{1.0, 2.0};
  return f;
}

ScatteringData nobound_sd() {
  return families::sample_S(kgrid(), [](double k) { return nb().S(k); });
}

JostData nobound_jost(const RVec& ks) {
  JostData jd;
  jd.ks = ks;
  jd.f.resize(ks.size());
  for (std::size_t i = 0; i < ks.size(); ++i) jd.f[i] = nb().f(ks[i]);
  return jd;
}

KreinKernel nobound_H(std::size_t n, double delta) {
  return H_from_jost(nobound_jost(kgrid()), uniform_grid(delta * static_cast<double>(n), delta));
}

// a' = q - a^2 stepped from a(0) = 2 H(0) by RK4 with q interpolated at half steps
RVec riccati_a(const PotentialGrid& q, double a0) {
  const double h = q.xs[1] - q.xs[0];
  UniformInterpolator qi{q.xs[0], h, q.qs, 5};
  RVec a(q.xs.size());
  a[0] = a0;
  auto rhs = [](double qv, double av) { return qv - av * av; };
  for (std::size_t i = 0; i + 1 < a.size(); ++i) {
    const double qm = qi(q.xs[i] + 0.5 * h);
    const double k1 = rhs(q.qs[i], a[i]);
    const double k2 = rhs(qm, a[i] + 0.5 * h * k1);
    const double k3 = rhs(qm, a[i] + 0.5 * h * k2);
    const double k4 = rhs(q.qs[i + 1], a[i] + h * k3);
    a[i + 1] = a[i] + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return a;
}

}  // namespace

TEST(KreinH, FreeJostGivesZero) {
  JostData jd;
  jd.ks = kgrid();
  jd.f.assign(jd.ks.size(), cplx{1.0, 0.0});
  auto Hk = H_from_jost(jd, uniform_grid(4.0, 0.1));
  for (double h : Hk.H) EXPECT_EQ(h, 0.0);
  EXPECT_DOUBLE_EQ(Hk.Htilde_min, 1.0);
  EXPECT_DOUBLE_EQ(gl_relation_check(Hk, jd), 0.0);
}

TEST(KreinH, ExponentialClosedForm) {
  auto jd = nobound_jost(kgrid());
  auto Hk = H_from_jost(jd, uniform_grid(10.0, 0.05));
  for (std::size_t i = 0; i < Hk.ts.size(); ++i)
    EXPECT_LT(std::abs(Hk.H[i] / nb().H(Hk.ts[i]) - 1.0), 1e-5) << Hk.ts[i];
  EXPECT_GE(Hk.Htilde_min, 1.0);
  EXPECT_LT(Hk.Htilde_min, 1.0 + 1e-3);
}

TEST(KreinH, RejectsBoundStates) {
  JostData jd = nobound_jost(kgrid());
  jd.bound_ks = {1.0};
  try {
    H_from_jost(jd, uniform_grid(1.0, 0.1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IndexMismatch);
  }
}

TEST(KreinH, GlRelation) {
  auto jd = nobound_jost(kgrid());
  auto Hk = H_from_jost(jd, uniform_grid(10.0, 0.05));
  EXPECT_LT(gl_relation_check(Hk, jd), 1e-8);

  // the error against the closed form shrinks when the k-step is halved
  auto err = [&](double h0) {
    auto jd2 = nobound_jost(graded_k_grid(200.0, h0));
    auto H2 = H_from_jost(jd2, uniform_grid(10.0, 0.05));
    double e = 0.0;
    for (std::size_t i = 0; i < H2.ts.size(); ++i) e = std::max(e, std::abs(H2.H[i] - nb().H(H2.ts[i])));
    return e;
  };
  EXPECT_LT(err(0.004), err(0.008));
}

TEST(KreinFamily, ZeroKernel) {
  KreinKernel Hk;
  Hk.ts = uniform_grid(2.0, 0.01);
  Hk.H.assign(Hk.ts.size(), 0.0);
  auto fam = solve_krein_family(Hk, Hk.ts.size() - 1);
  for (std::size_t i = 0; i < fam.ys.size(); ++i) {
    EXPECT_EQ(fam.corner[i], 0.0);
    EXPECT_EQ(fam.origin[i], 0.0);
  }
  auto q = q_from_gamma(fam, 0.0);
  for (double v : q.q.qs) EXPECT_EQ(v, 0.0);
}

TEST(KreinFamily, MatchesDenseOracle) {
  const std::size_t n = 1000;
  auto Hk = nobound_H(n, 0.01);
  auto fam = solve_krein_family(Hk, n);
  for (double e : fam.reflection) EXPECT_LT(std::abs(e), 1.0);
  for (std::size_t m : {1u, 2u, 3u, 7u, 50u, 123u, 300u, 555u, 800u, 1000u}) {
    RVec g = gamma_dense(Hk, m, 0);
    EXPECT_LT(std::abs(fam.corner[m] - g[m]), 1e-8) << m;
    EXPECT_LT(std::abs(fam.origin[m] - g[0]), 1e-8) << m;
  }
}

TEST(KreinFamily, CornerSymmetry) {
  auto Hk = nobound_H(400, 0.01);
  for (std::size_t m : {1u, 10u, 99u, 400u}) EXPECT_LT(corner_symmetry_residual(Hk, m), 1e-12) << m;
  // Gamma_x(0, x) = Gamma_x(x, 0)
  RVec a = gamma_dense(Hk, 250, 0), b = gamma_dense(Hk, 250, 250);
  EXPECT_NEAR(a[250], b[0], 1e-12);
}

TEST(KreinFamily, BreakdownOnIndefiniteKernel) {
  KreinKernel Hk;
  Hk.ts = uniform_grid(4.0, 0.1);
  Hk.H.assign(Hk.ts.size(), -10.0);
  try {
    solve_krein_family(Hk, Hk.ts.size() - 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::RecursionBreakdown);
  }
}

TEST(KreinFamily, FasterThanDense) {
  const std::size_t n = 2000;
  auto Hk = nobound_H(n, 0.005);
  auto t0 = std::chrono::steady_clock::now();
  auto fam = solve_krein_family(Hk, n);
  auto t1 = std::chrono::steady_clock::now();
  RVec g = gamma_dense(Hk, n, 0);
  auto t2 = std::chrono::steady_clock::now();
  const double lev = std::chrono::duration<double>(t1 - t0).count();
  const double dense = std::chrono::duration<double>(t2 - t1).count();
  EXPECT_GE(dense / lev, 10.0) << "levinson " << lev << " s, one dense solve " << dense << " s";
  EXPECT_LT(std::abs(fam.corner[n] - g[n]), 1e-8);
}

TEST(KreinInversion, AgreesWithMarchenko) {
  auto sd = nobound_sd();
  auto kr = invert_detailed(sd, 5.0, 0.01);
  auto qm = marchenko::invert(sd, 5.0, 0.01);
  ASSERT_EQ(kr.q.q.xs.size(), qm.xs.size());
  double qmax = 0.0, e = 0.0, ex = 0.0;
  for (std::size_t i = 0; i < qm.xs.size(); ++i) {
    qmax = std::max(qmax, std::abs(nb().q(qm.xs[i])));
    e = std::max(e, std::abs(kr.q.q.qs[i] - qm.qs[i]));
    ex = std::max(ex, std::abs(kr.q.q.qs[i] - nb().q(qm.xs[i])));
  }
  EXPECT_LT(e, 2e-3 * qmax);
  EXPECT_LT(ex, 2e-3 * qmax);
  EXPECT_LT(kr.q.a0_error, 1e-12);
  EXPECT_LT(kr.q.discrepancy, 2e-3 * qmax);
}

TEST(KreinInversion, RiccatiConsistency) {
  auto kr = invert_detailed(nobound_sd(), 5.0, 0.01);
  RVec a = riccati_a(kr.q.q, 2 * kr.H.H[0]);
  double e = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - kr.q.a[i]));
  EXPECT_LT(e, 1e-3);
}

TEST(KreinESystem, FreeCase) {
  RVec xs = uniform_grid(5.0, 0.002);
  RVec ks{0.0, 0.5, 2.0, 7.0};
  auto sys = E_system(xs, RVec(xs.size(), 0.0), ks);
  auto psi = sys.psi();
  for (std::size_t m = 0; m < ks.size(); ++m)
    for (std::size_t i = 0; i < xs.size(); i += 37) {
      EXPECT_LT(std::abs(sys.E.values[m][i] - std::exp(kI * ks[m] * xs[i])), 1e-7);
      EXPECT_LT(std::abs(psi.values[m][i] - std::sin(ks[m] * xs[i])), 1e-7);
    }
}

TEST(KreinESystem, SchrodingerAndAsymptotics) {
  const double dx = 0.005;
  auto kr = invert_detailed(nobound_sd(), 8.0, dx);
  RVec ks{0.3, 1.0, 2.5, 4.0};
  const RVec& xs = kr.q.q.xs;
  auto sys = E_system(xs, kr.q.a, ks);
  auto psi = sys.psi();
  for (std::size_t m = 0; m < ks.size(); ++m) {
    const double k = ks[m];
    EXPECT_LT(std::abs(psi.values[m][0]), 1e-14);
    EXPECT_LT(std::abs(psi.derivatives[m][0] - k), 1e-14);
    RVec re(xs.size()), im(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      re[i] = psi.derivatives[m][i].real();
      im[i] = psi.derivatives[m][i].imag();
    }
    RVec re2 = diff4(re, dx), im2 = diff4(im, dx);
    double r = 0.0;
    for (std::size_t i = 2; i + 2 < xs.size(); ++i) {
      const cplx p2{re2[i], im2[i]};
      r = std::max(r, std::abs(-p2 + (kr.q.q.qs[i] - k * k) * psi.values[m][i]));
    }
    EXPECT_LT(r, 1e-5) << k;
    const cplx lim = sys.E.values[m].back() * std::exp(-kI * k * xs.back());
    EXPECT_LT(std::abs(lim - nb().f(-k)), 1e-3) << k;
  }
}

TEST(KreinReduce, IndexZeroUnchanged) {
  auto sd = nobound_sd();
  auto r = reduce_bound_states(sd);
  EXPECT_TRUE(r.removed_ks.empty());
  for (std::size_t i = 0; i < sd.ks.size(); ++i) EXPECT_EQ(r.reduced.S[i], sd.S[i]);
}

TEST(KreinReduce, BoundStateRemoved) {
  families::Bargmann b{1.0, 1.0};
  auto sd = families::sample_S(kgrid(), [&](double k) { return b.S(k); }, {1.0}, {b.s1()}, -2);
  auto r = reduce_bound_states(sd);
  EXPECT_EQ(core::winding_index(r.reduced.ks, r.reduced.S), 0);
  ASSERT_EQ(r.removed_ks.size(), 1u);
  EXPECT_DOUBLE_EQ(r.removed_norming[0], b.s1());
  // the reduced data belong to f1 = (k + i k1)/(k + i nu1), which Krein inverts
  families::NoBound f1{b.k1, b.nu1()};
  for (std::size_t i = 0; i < sd.ks.size(); i += 50) EXPECT_LT(std::abs(r.reduced.S[i] - f1.S(sd.ks[i])), 1e-12);
  auto q = invert(r.reduced, 4.0, 0.01);
  double e = 0.0, qmax = 0.0;
  for (std::size_t i = 0; i < q.xs.size(); ++i) {
    e = std::max(e, std::abs(q.qs[i] - f1.q(q.xs[i])));
    qmax = std::max(qmax, std::abs(f1.q(q.xs[i])));
  }
  EXPECT_LT(e, 2e-3 * qmax);
}

TEST(KreinReduce, ResonanceCase) {
  families::Resonance res{1.0};
  auto sd = families::sample_S(kgrid(), [&](double k) { return res.S(k); }, {}, {}, -1);
  auto r = reduce_bound_states(sd, 1.0);
  ASSERT_TRUE(r.gamma.has_value());
  EXPECT_EQ(core::winding_index(r.reduced.ks, r.reduced.S), 0);
  EXPECT_EQ(r.reduced.index, 0);

  auto sd2 = families::sample_S(kgrid(), [](double k) { return std::exp(2.0 * kI * std::atan(k)); }, {1.0}, {1.0}, -3);
  try {
    reduce_bound_states(sd2, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::GammaCollision);
  }
}

TEST(KreinHybrid, SeamAgreement) {
  auto sd = nobound_sd();
  auto h = invert_hybrid(sd, 5.0, 0.01);
  EXPECT_GT(h.x0, 0.5);
  EXPECT_LT(h.x0, std::log(3.0));
  double qmax = 0.0, e = 0.0;
  for (std::size_t i = 0; i < h.q.xs.size(); ++i) {
    qmax = std::max(qmax, std::abs(nb().q(h.q.xs[i])));
    e = std::max(e, std::abs(h.q.qs[i] - nb().q(h.q.xs[i])));
  }
  EXPECT_LT(h.seam, 2e-3);
  EXPECT_LT(e, 2e-3 * qmax);
}
