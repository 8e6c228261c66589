// One PASS/FAIL line per acceptance criterion; exit code 0 iff all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

#include "invscat/invscat.hpp"

using namespace invscat;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

const RVec& kgrid() {
  static const RVec ks = graded_k_grid(200.0);
  return ks;
}

struct Line {
  bool ok = true;
  std::string text;
  void add(const std::string& name, double value, double tol) {
    const bool pass = value <= tol;
    ok = ok && pass;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s%s=%.3g(<%.3g)", text.empty() ? "" : " ", name.c_str(), value, tol);
    text += buf;
  }
  void require(const std::string& name, bool pass) {
    ok = ok && pass;
    text += (text.empty() ? "" : " ") + name + (pass ? "=yes" : "=no");
  }
};

int failures = 0;

void emit(int id, const char* title, const std::function<Line()>& body) {
  Line l;
  try {
    l = body();
  } catch (const std::exception& e) {
    l.ok = false;
    l.text = std::string("exception: ") + e.what();
  }
  if (!l.ok) ++failures;
  std::printf("%s criterion %d (%s): %s\n", l.ok ? "PASS" : "FAIL", id, title, l.text.c_str());
  std::fflush(stdout);
}

ScatteringData resonance_sd() {
  families::Resonance r{1.0};
  return families::sample_S(kgrid(), [r](double k) { return r.S(k); }, {}, {}, -1);
}

}  // namespace

int main() {
  emit(1, "resonance Bargmann round trip", [] {
    Line l;
    families::Resonance r{1.0};
    auto t0 = Clock::now();
    auto sd = resonance_sd();
    auto inv = marchenko::invert_detailed(sd, 5.0, 1e-2);
    const double secs = seconds_since(t0);
    double eF = 0.0;
    for (double x = 0.05; x <= 10.0; x += 0.05) eF = std::max(eF, std::abs(inv.F.at(x) / r.F(x) - 1.0));
    double eA = 0.0, eq = 0.0;
    for (std::size_t i = 0; i < inv.A.xs.size(); ++i) {
      const double x = inv.A.xs[i];
      eA = std::max(eA, std::abs(inv.A.diagonal[i] - r.A(x, x)));
      if (!inv.A.values[i].empty())
        for (double y = x; y <= x + 5.0; y += 0.1) eA = std::max(eA, std::abs(inv.A.marchenko_at(i, y) - r.A(x, y)));
      eq = std::max(eq, std::abs(inv.q.qs[i] / r.q(x) - 1.0));
    }
    l.add("F_rel", eF, 1e-4);
    l.add("A_abs", eA, 1e-5);
    l.add("q_rel", eq, 1e-3);
    l.add("seconds", secs, 10.0);
    return l;
  });

  emit(2, "bound-state Bargmann factorization", [] {
    Line l;
    families::Bargmann b{1.0, 1.0};
    auto sd = families::sample_S(kgrid(), [b](double k) { return b.S(k); }, {1.0}, {b.s1()}, -2);
    auto jd = riemann::jost_from_S(sd);
    double e = 0.0;
    for (std::size_t i = 0; i < jd.ks.size(); ++i)
      if (jd.ks[i] >= 0.2 && jd.ks[i] <= 10.0) e = std::max(e, std::abs(jd.f[i] / b.f(jd.ks[i]) - 1.0));
    l.add("f_rel", e, 1e-3);
    l.require("winding_is_-2", core::winding_index(sd.ks, sd.S) == -2);
    return l;
  });

  emit(3, "Gel'fand-Levitan kernel closed form", [] {
    Line l;
    families::Bargmann b{0.5, 1.0};
    SpectralFunction sf;
    for (double k : kgrid()) {
      sf.lambdas.push_back(k * k);
      sf.density.push_back(b.density(k * k));
    }
    sf.discrete_points.push_back({-0.25, b.c1()});
    auto L = gl::build_L(sf, 3.0, 0.01);
    double eL = 0.0;
    for (std::size_t i = 0; i < L.size(); ++i)
      for (std::size_t j = 0; j <= i; ++j)
        eL = std::max(eL, std::abs(L(i, j) - b.L(0.01 * static_cast<double>(i), 0.01 * static_cast<double>(j))));
    auto q = gl::q_from_K(gl::solve_gl(L));
    auto sd = families::sample_S(kgrid(), [b](double k) { return b.S(k); }, {b.k1}, {b.s1()}, -2);
    auto qm = marchenko::invert(sd, 3.0, 0.01);
    double e = 0.0, m = 0.0;
    for (std::size_t i = 0; i < q.xs.size(); ++i) {
      e = std::max(e, std::abs(q.qs[i] - qm.qs[i]));
      m = std::max(m, std::abs(qm.qs[i]));
    }
    l.add("L_abs", eL, 1e-4);
    l.add("q_gl_vs_marchenko/max|q|", e / m, 2e-3);
    return l;
  });

  emit(4, "Krein vs Marchenko", [] {
    Line l;
    families::NoBound nb{1.0, 2.0};
    auto sd = families::sample_S(kgrid(), [nb](double k) { return nb.S(k); });
    auto kr = krein::invert_detailed(sd, 5.0, 0.01);
    auto qm = marchenko::invert(sd, 5.0, 0.01);
    double e = 0.0, m = 0.0;
    for (std::size_t i = 0; i < qm.xs.size(); ++i) {
      e = std::max(e, std::abs(kr.q.q.qs[i] - qm.qs[i]));
      m = std::max(m, std::abs(qm.qs[i]));
    }
    l.add("q_krein_vs_marchenko/max|q|", e / m, 2e-3);

    JostData jd;
    jd.ks = kgrid();
    for (double k : jd.ks) jd.f.push_back(nb.f(k));
    const std::size_t n = 2000;
    auto Hk = krein::H_from_jost(jd, uniform_grid(0.005 * n, 0.005));
    auto t0 = Clock::now();
    auto fam = krein::solve_krein_family(Hk, n);
    const double lev = seconds_since(t0);
    auto t1 = Clock::now();
    RVec g = krein::gamma_dense(Hk, n, 0);
    const double dense = seconds_since(t1);
    double eo = std::abs(fam.corner[n] - g[n]);
    for (std::size_t mm : {10u, 500u, 1200u}) {
      RVec gm = krein::gamma_dense(Hk, mm, 0);
      eo = std::max({eo, std::abs(fam.corner[mm] - gm[mm]), std::abs(fam.origin[mm] - gm[0])});
    }
    l.add("fast_vs_dense", eo, 1e-8);
    l.require("levinson_10x_faster(ratio=" + std::to_string(dense / lev) + ")", dense >= 10.0 * lev);
    l.add("M_minus_H", krein::gl_relation_check(Hk, jd), 1e-8);
    return l;
  });

  emit(5, "forward/inverse closure", [] {
    Line l;
    families::Resonance r{1.0};
    auto q0 = make_potential([r](double x) { return r.q(x); }, 20.0, 1e-3);
    auto sd = forward::scattering_data(q0, kgrid());
    auto q = marchenko::invert(sd, 12.0, 1e-2);
    forward::ForwardOptions fo;
    fo.tail_tol = 1e-2;
    auto sd2 = forward::scattering_data(q, kgrid(), fo);
    double e = 0.0;
    for (std::size_t i = 0; i < sd.ks.size(); ++i) e = std::max(e, std::abs(sd2.S[i] - sd.S[i]));
    l.add("S_abs", e, 5e-3);
    l.require("no_bound_states", sd2.bound_ks.empty());
    return l;
  });

  emit(6, "radius estimator", [] {
    Line l;
    auto t0 = Clock::now();
    for (double a : {1.0, 2.0}) {
      auto q = make_potential([a](double x) { return x <= a ? 1.0 : 0.0; }, a, 1e-3, DecayClass::Compact, a);
      auto est = fixed_energy::radius_estimate(fixed_energy::partial_wave_forward(q, {.L = 40}).ps);
      l.add("a=" + std::to_string(static_cast<int>(a)) + "_rel", std::abs(est.a_hat / a - 1.0), 0.1);
    }
    l.add("seconds", seconds_since(t0), 30.0);
    return l;
  });

  emit(7, "quarkonium single level and perturbed levels", [] {
    Line l;
    RVec xs = uniform_grid(10.0, 1e-3);
    auto ref = quarkonium::airy_reference(3);
    QuarkoniumData d;
    d.energies = {1.2};
    d.slopes = {1.3};
    for (const auto& L : ref) {
      d.energies.push_back(L.E);
      d.slopes.push_back(L.s);
    }
    auto rec = quarkonium::recover_potential(d, ref, xs);
    RVec pc = quarkonium::single_level_p(1.2, 1.3, xs);
    double e = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) e = std::max(e, std::abs(rec.p[i] - pc[i]));
    l.add("p_abs", e, 1e-6);

    QuarkoniumData pert;
    for (const auto& L : ref) {
      pert.energies.push_back(L.E);
      pert.slopes.push_back(L.s);
    }
    pert.energies[0] += 0.25;
    pert.slopes[0] = 1.2;
    auto rp = quarkonium::recover_potential(pert, ref, xs);
    RVec E = quarkonium::bound_state_energies(rp.q, 3);
    double eE = 0.0;
    for (std::size_t j = 0; j < 3; ++j) eE = std::max(eE, std::abs(E[j] - pert.energies[j]));
    l.add("E_abs", eE, 1e-3);
    return l;
  });

  emit(8, "property suites", [] {
    Line l;
    families::Bargmann b{1.0, 1.0};
    auto q = make_potential([b](double x) { return b.q(x); }, 20.0, 1e-3);
    auto fr = forward::forward_data(q, kgrid());
    double du = 0.0;
    for (auto s : fr.scattering.S) du = std::max(du, std::abs(std::abs(s) - 1.0));
    l.add("unitarity", du, 1e-8);
    l.add("wronskian", forward::wronskian_residual(fr.jost), 1e-6);

    families::Resonance r{1.0};
    auto qs = make_potential([r](double x) { return r.q(x); }, 4.0, 0.01);
    auto gk = gl::goursat_kernel(qs);
    RVec half = cumint4(qs.xs, qs.qs);
    double ed = 0.0;
    for (std::size_t i = 0; i < qs.xs.size(); ++i) ed = std::max(ed, std::abs(gk.K.diagonal[i] - 0.5 * half[i]));
    l.add("gl_diagonal", ed, 1e-8);

    families::NoBound nb{1.0, 2.0};
    JostData jd;
    jd.ks = kgrid();
    for (double k : jd.ks) jd.f.push_back(nb.f(k));
    auto Hk = krein::H_from_jost(jd, uniform_grid(4.0, 0.01));
    l.add("krein_corner_symmetry", krein::corner_symmetry_residual(Hk, 400), 1e-10);

    auto rep = marchenko::marchenko_type_residual([r](double y) { return r.A(0, y); },
                                                  [r](double y) { return y < 0 ? 0.0 : r.F(y); }, 5.0, 0.05, 40.0);
    l.add("marchenko_type", std::max(rep.max_negative, rep.max_positive), 1e-4);

    forward::ForwardOptions raw;
    raw.richardson = false;
    auto err = [&](double dx) {
      forward::JostEvaluator J(make_potential([r](double x) { return r.q(x); }, 20.0, dx), raw);
      double e = 0.0;
      for (double k = 0.1; k <= 10.0; k += 0.3) e = std::max(e, std::abs(J.f(k) - r.f(k)));
      return e;
    };
    const double ratio = err(0.02) / err(0.01);
    l.add("jost_order2_inverse_ratio", 1.0 / ratio, 1.0 / 3.0);
    return l;
  });

  return failures == 0 ? 0 : 1;
}
