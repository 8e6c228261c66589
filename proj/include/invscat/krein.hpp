#pragma once

// Krein inversion S => f => H => Gamma => a => q with a Levinson recursion over the whole family of
// truncated equations, the E(x,k) system, bound-state index reduction and the hybrid Krein/Marchenko
// scheme.

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <vector>

#include "errors.hpp"
#include "fourier.hpp"
#include "marchenko.hpp"
#include "numerics.hpp"
#include "riemann.hpp"
#include "types.hpp"

namespace invscat::krein {

struct HOptions {
  double tail_fraction = 0.25;
  double positivity_floor = 0.0;
};

// H(t) = (1/pi) int_0^inf (1/|f|^2 - 1) cos(kt) dk on a uniform t-grid.
inline KreinKernel H_from_jost(const JostData& jd, const RVec& ts, const HOptions& opt = {}) {
  require_grid(jd.ks, "k-grid", 4);
  require_grid(ts, "t-grid", 2);
  if (!jd.bound_ks.empty() || jd.resonance)
    fail(ErrorKind::IndexMismatch, "Krein inversion needs index-0 data; reduce the bound states first");
  KreinKernel Hk;
  Hk.ts = ts;
  CVec g(jd.ks.size());
  double mn = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double m2 = std::norm(jd.f[i]);
    if (!(m2 > 0)) fail(ErrorKind::ZeroModulus, "f vanishes at k = " + std::to_string(jd.ks[i]));
    g[i] = 1.0 / m2 - 1.0;
    mn = std::min(mn, 1.0 / m2);
  }
  Hk.Htilde_min = mn;
  if (!(mn > opt.positivity_floor))
    fail(ErrorKind::PositivityViolated, "1 + H~(k) reaches " + std::to_string(mn));
  PowerTail tail;
  if (std::abs(g.back()) > 1e-14) tail = fit_power_tail(jd.ks, g, {2, 4}, {}, opt.tail_fraction);
  HalfLineFourier F(jd.ks, g, tail);
  Hk.H.resize(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) Hk.H[i] = F(ts[i]).real() / kPi;
  return Hk;
}

// Max |M - H| where M(x) = (1/pi) int_0^inf (|f|^-2 - 1) cos(kx) dk is computed by the generic cosine
// transform instead of the Krein-side code.
inline double gl_relation_check(const KreinKernel& Hk, const JostData& jd) {
  RVec g(jd.ks.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = 1.0 / std::norm(jd.f[i]) - 1.0;
  RVec M = fourier_cos_transform(jd.ks, g, Hk.ts);
  double r = 0.0;
  for (std::size_t i = 0; i < M.size(); ++i) r = std::max(r, std::abs(M[i] / kPi - Hk.H[i]));
  return r;
}

struct FamilyResult {
  RVec ys;        // y = n delta
  RVec corner;    // Gamma_y(y, 0)
  RVec origin;    // Gamma_y(0, 0)
  RVec reflection;  // Levinson reflection coefficients
};

namespace detail {

// Trapezoid discretisation on [0, n delta]: A = I + delta H(t_i - t_j) w_j, w = (1/2, 1, ..., 1, 1/2).
inline Eigen::MatrixXd dense_operator(const RVec& H, std::size_t n, double delta) {
  const auto m = static_cast<Eigen::Index>(n + 1);
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(m, m);
  if (n == 0) return A;
  for (std::size_t i = 0; i <= n; ++i)
    for (std::size_t j = 0; j <= n; ++j) {
      const double w = (j == 0 || j == n) ? 0.5 : 1.0;
      A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += delta * w * H[i > j ? i - j : j - i];
    }
  return A;
}

}  // namespace detail

// Gamma_y(t, s_index) on the grid of [0, n delta] by a dense LU solve (oracle).
inline RVec gamma_dense(const KreinKernel& Hk, std::size_t n, std::size_t s_index = 0) {
  const double delta = Hk.ts[1] - Hk.ts[0];
  if (n >= Hk.ts.size()) fail(ErrorKind::MalformedGrid, "family size exceeds the H grid");
  Eigen::MatrixXd A = detail::dense_operator(Hk.H, n, delta);
  Eigen::VectorXd b(static_cast<Eigen::Index>(n + 1));
  for (std::size_t i = 0; i <= n; ++i) b(static_cast<Eigen::Index>(i)) = Hk.H[i > s_index ? i - s_index : s_index - i];
  Eigen::VectorXd x = A.partialPivLu().solve(b);
  return RVec(x.data(), x.data() + x.size());
}

// max_i |Gamma_x(t_i, 0) - Gamma_x(x - t_i, x)| for x = n delta, from two dense solves.
inline double corner_symmetry_residual(const KreinKernel& Hk, std::size_t n) {
  RVec a = gamma_dense(Hk, n, 0), b = gamma_dense(Hk, n, n);
  double r = 0.0;
  for (std::size_t i = 0; i <= n; ++i) r = std::max(r, std::abs(a[i] - b[n - i]));
  return r;
}

// Corner values for every n <= n_max. The Toeplitz part T = I + delta H_{|i-j|} is handled by the
// Levinson recursion; the half end weights are a rank-two correction, which by persymmetry needs only
// the first and last entries of T^{-1} H_col0.
inline FamilyResult solve_krein_family(const KreinKernel& Hk, std::size_t n_max) {
  require_grid(Hk.ts, "t-grid", 2);
  if (!is_uniform(Hk.ts)) fail(ErrorKind::MalformedGrid, "Krein family needs a uniform t-grid");
  if (n_max >= Hk.ts.size()) fail(ErrorKind::MalformedGrid, "family size exceeds the H grid");
  const double delta = Hk.ts[1] - Hk.ts[0];
  const RVec& H = Hk.H;
  auto t = [&](std::size_t k) { return (k == 0 ? 1.0 : 0.0) + delta * H[k]; };
  FamilyResult res;
  res.ys.reserve(n_max + 1);
  RVec f{1.0 / t(0)}, g{H[0] / t(0)}, fn;
  f.reserve(n_max + 1);
  g.reserve(n_max + 1);
  const double d = 0.5 * delta;
  for (std::size_t n = 0;; ++n) {
    res.ys.push_back(delta * static_cast<double>(n));
    if (n == 0) {
      res.corner.push_back(H[0]);
      res.origin.push_back(H[0]);
    } else {
      // A = T - d (c0 e0^T + cn en^T), c0 = H col, cn = J c0, T^{-1} c0 = g, T^{-1} cn = J g
      const double g0 = g.front(), gN = g.back();
      Eigen::Matrix2d S;
      S << 1 - d * g0, -d * gN, -d * gN, 1 - d * g0;
      const Eigen::Vector2d pr = S.inverse() * Eigen::Vector2d(g0, gN);
      res.origin.push_back(g0 + d * (g0 * pr(0) + gN * pr(1)));
      res.corner.push_back(gN + d * (gN * pr(0) + g0 * pr(1)));
    }
    if (n == n_max) break;
    // extend f and g to size n + 2
    double eps = 0.0, eta = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      eps += t(n + 1 - i) * f[i];
      eta += t(n + 1 - i) * g[i];
    }
    const double den = 1.0 - eps * eps;
    if (!(den > 1e-14)) fail(ErrorKind::RecursionBreakdown, "Levinson step " + std::to_string(n + 1) + " is singular");
    res.reflection.push_back(eps);
    fn.assign(n + 2, 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      fn[i] += f[i] / den;
      fn[i + 1] -= eps * f[n - i] / den;
    }
    f.swap(fn);
    const double c = H[n + 1] - eta;
    g.push_back(0.0);
    for (std::size_t i = 0; i <= n + 1; ++i) g[i] += c * f[n + 1 - i];
  }
  return res;
}

struct QResult {
  PotentialGrid q;   // a^2 + a'
  RVec q_alt;        // 2 d/dx [Gamma(2x,0) - Gamma(0,0)]
  RVec a;
  double discrepancy = 0.0;  // max |q - q_alt|
  double a0_error = 0.0;     // |a(0) - 2 H(0)|
};

// xs are the points x = y/2 of the family, y = 2x.
inline QResult q_from_gamma(const FamilyResult& fam, double H0) {
  QResult r;
  const std::size_t n = fam.ys.size();
  if (n < 5) fail(ErrorKind::MalformedGrid, "too few family members for differentiation");
  RVec xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = 0.5 * fam.ys[i];
  const double dx = xs[1] - xs[0];
  r.a.resize(n);
  RVec diffc(n);
  for (std::size_t i = 0; i < n; ++i) {
    r.a[i] = 2 * fam.corner[i];
    diffc[i] = fam.corner[i] - fam.origin[i];
  }
  r.a0_error = std::abs(r.a[0] - 2 * H0);
  RVec ap = diff4(r.a, dx), dp = diff4(diffc, dx);
  r.q.xs = xs;
  r.q.qs.resize(n);
  r.q_alt.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    r.q.qs[i] = r.a[i] * r.a[i] + ap[i];
    r.q_alt[i] = 2 * dp[i];
    r.discrepancy = std::max(r.discrepancy, std::abs(r.q.qs[i] - r.q_alt[i]));
  }
  return r;
}

// E' = ik E - a E_-, E_-' = -ik E_- - a E, E(0) = E_-(0) = 1, by RK4 on the grid of a.
struct ESystem {
  WaveFunctionTable E, Em;
  // psi = (E - E_-)/(2i) and its derivative
  WaveFunctionTable psi() const {
    WaveFunctionTable p;
    p.xs = E.xs;
    p.ks = E.ks;
    p.kind = WaveKind::RegularPhi;
    p.values.resize(E.ks.size());
    p.derivatives.resize(E.ks.size());
    for (std::size_t m = 0; m < E.ks.size(); ++m) {
      p.values[m].resize(E.xs.size());
      p.derivatives[m].resize(E.xs.size());
      for (std::size_t i = 0; i < E.xs.size(); ++i) {
        p.values[m][i] = (E.values[m][i] - Em.values[m][i]) / (2.0 * kI);
        p.derivatives[m][i] = (E.derivatives[m][i] - Em.derivatives[m][i]) / (2.0 * kI);
      }
    }
    return p;
  }
};

inline ESystem E_system(const RVec& xs, const RVec& a, const RVec& ks) {
  require_grid(xs, "x-grid", 4);
  if (!is_uniform(xs)) fail(ErrorKind::MalformedGrid, "E_system needs a uniform grid");
  const double h = xs[1] - xs[0];
  UniformInterpolator ai{xs[0], h, a, 5};
  RVec amid(xs.size() - 1);
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) amid[i] = ai(xs[i] + 0.5 * h);
  ESystem sys;
  for (WaveFunctionTable* w : {&sys.E, &sys.Em}) {
    w->xs = xs;
    w->ks = ks;
    w->kind = WaveKind::JostF;
    w->values.assign(ks.size(), CVec(xs.size()));
    w->derivatives.assign(ks.size(), CVec(xs.size()));
  }
  for (std::size_t m = 0; m < ks.size(); ++m) {
    const cplx ik = kI * ks[m];
    auto rhs = [&](double av, cplx e, cplx em) { return std::pair<cplx, cplx>{ik * e - av * em, -ik * em - av * e}; };
    cplx e = 1.0, em = 1.0;
    for (std::size_t i = 0;; ++i) {
      auto [de, dem] = rhs(a[i], e, em);
      sys.E.values[m][i] = e;
      sys.Em.values[m][i] = em;
      sys.E.derivatives[m][i] = de;
      sys.Em.derivatives[m][i] = dem;
      if (i + 1 == xs.size()) break;
      auto [k2e, k2m] = rhs(amid[i], e + 0.5 * h * de, em + 0.5 * h * dem);
      auto [k3e, k3m] = rhs(amid[i], e + 0.5 * h * k2e, em + 0.5 * h * k2m);
      auto [k4e, k4m] = rhs(a[i + 1], e + h * k3e, em + h * k3m);
      e += h / 6 * (de + 2.0 * k2e + 2.0 * k3e + k4e);
      em += h / 6 * (dem + 2.0 * k2m + 2.0 * k3m + k4m);
    }
  }
  return sys;
}

struct Reduction {
  ScatteringData reduced;
  RVec removed_ks;
  RVec removed_norming;
  std::optional<double> gamma;
};

// S1 = S w^2, w = prod (k - i k_j)/(k + i k_j); with a zero-energy resonance also times
// (k - i gamma)/(k + i gamma), which removes the remaining unit of index.
inline Reduction reduce_bound_states(const ScatteringData& sd, double gamma = 1.0) {
  Reduction r;
  r.reduced = sd;
  r.removed_ks = sd.bound_ks;
  r.removed_norming = sd.norming;
  const bool odd = sd.resonance();
  if (odd) {
    if (!(gamma > 0)) fail(ErrorKind::ConfigError, "gamma must be positive");
    for (double kj : sd.bound_ks)
      if (std::abs(kj - gamma) <= 1e-12 * std::max(1.0, kj))
        fail(ErrorKind::GammaCollision, "gamma coincides with bound state k = " + std::to_string(kj));
    r.gamma = gamma;
  }
  for (std::size_t i = 0; i < sd.ks.size(); ++i) {
    const double k = sd.ks[i];
    const cplx w = riemann::blaschke(k, sd.bound_ks);
    cplx s = sd.S[i] * w * w;
    if (odd) s *= (k - kI * gamma) / (k + kI * gamma);
    r.reduced.S[i] = s;
  }
  r.reduced.bound_ks.clear();
  r.reduced.norming.clear();
  r.reduced.index = 0;
  return r;
}

struct KreinOptions {
  riemann::FactorizationOptions factorization{};
  HOptions h{};
};

struct InversionResult {
  KreinKernel H;
  FamilyResult family;
  QResult q;
};

// Index-0 data on [0, X] with step dx (the family runs on delta = 2 dx up to y = 2X).
inline InversionResult invert_detailed(const ScatteringData& sd, double X, double dx, const KreinOptions& opt = {}) {
  if (sd.index != 0 || !sd.bound_ks.empty())
    fail(ErrorKind::IndexMismatch, "Krein inversion needs index 0; call reduce_bound_states first");
  JostData jd = riemann::jost_from_S(sd, opt.factorization);
  const auto n = static_cast<std::size_t>(std::llround(X / dx));
  InversionResult r;
  r.H = H_from_jost(jd, uniform_grid(2 * dx * static_cast<double>(n), 2 * dx), opt.h);
  r.family = solve_krein_family(r.H, n);
  r.q = q_from_gamma(r.family, r.H.H[0]);
  return r;
}

inline PotentialGrid invert(const ScatteringData& sd, double X, double dx, const KreinOptions& opt = {}) {
  return invert_detailed(sd, X, dx, opt).q.q;
}

struct HybridResult {
  PotentialGrid q;
  double x0 = 0.0;
  double seam = 0.0;  // |q_Krein(x0) - q_Marchenko(x0)|
};

// Largest grid point x0 with int_0^{x0} |H| < 1.
inline double contraction_point(const KreinKernel& Hk) {
  RVec absH(Hk.H.size());
  for (std::size_t i = 0; i < absH.size(); ++i) absH[i] = std::abs(Hk.H[i]);
  RVec c = cumint4(Hk.ts, absH);
  double x0 = 0.0;
  for (std::size_t i = 0; i < c.size() && c[i] < 1.0; ++i) x0 = Hk.ts[i];
  return x0;
}

// Krein on [0, x0], Marchenko by fixed-point iteration on [x0, X].
inline HybridResult invert_hybrid(const ScatteringData& sd, double X, double dx, std::optional<double> x0 = std::nullopt,
                                  const KreinOptions& opt = {}) {
  auto kr = invert_detailed(sd, X, dx, opt);
  HybridResult h;
  h.x0 = x0 ? *x0 : contraction_point(kr.H);
  const auto i0 = static_cast<std::size_t>(std::llround(h.x0 / dx));
  h.x0 = dx * static_cast<double>(i0);
  marchenko::MarchenkoSolver ms(marchenko::sample_F(sd));
  const std::size_t N = kr.q.q.xs.size();
  // Marchenko diagonal on [x0 - 3dx, X] so that the 5-point derivative is centred at the seam
  const std::size_t start = i0 >= 3 ? i0 - 3 : 0;
  RVec diag;
  for (std::size_t i = start; i < N; ++i) {
    const double x = dx * static_cast<double>(i);
    diag.push_back(ms.value(ms.solve_iterative(x), 0.0));
  }
  RVec qm = diff4(diag, dx);
  h.q = kr.q.q;
  for (std::size_t i = i0; i < N; ++i) h.q.qs[i] = -2 * qm[i - start];
  h.seam = std::abs(kr.q.q.qs[i0] - h.q.qs[i0]);
  return h;
}

}  // namespace invscat::krein
