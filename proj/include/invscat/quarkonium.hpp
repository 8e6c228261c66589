#pragma once

// Recovery of a confining potential q(r) = r + p(r) from finitely many levels {E_j, s_j}: Airy reference
// data for q0 = r, the degenerate-kernel Gel'fand-Levitan system and a shooting eigenvalue solver.

#include <Eigen/Dense>
#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "errors.hpp"
#include "numerics.hpp"
#include "special.hpp"
#include "types.hpp"

namespace invscat::quarkonium {

// phi_j(r) = c Ai(r - E), c = 1/Ai'(-E), s = [c^2 int_0^inf Ai^2(r - E) dr]^{-1/2}
struct ReferenceLevel {
  double E = 0.0;
  double s = 0.0;
  double c = 0.0;
  double phi(double r) const { return c * special::airy(r - E).ai; }
  double dphi(double r) const { return c * special::airy(r - E).aip; }
};

namespace detail {

inline double bracket_root(const std::function<double(double)>& f, double a, double b) {
  std::uintmax_t it = 200;
  auto r = boost::math::tools::toms748_solve(f, a, b, boost::math::tools::eps_tolerance<double>(52), it);
  return 0.5 * (r.first + r.second);
}

// int_0^inf Ai^2(r - E) dr = Ai'(-E)^2 + E Ai(-E)^2, evaluated by quadrature as an independent check
inline double airy_norm_quadrature(double E) {
  RVec gx, gw;
  gauss_legendre(20, gx, gw);
  double s = 0.0;
  const double top = E + 12.0;
  for (double a = 0.0; a < top; a += 0.5) {
    const double b = std::min(a + 0.5, top);
    for (std::size_t g = 0; g < gx.size(); ++g) {
      const double r = 0.5 * (a + b) + 0.5 * (b - a) * gx[g];
      const double v = special::airy(r - E).ai;
      s += 0.5 * (b - a) * gw[g] * v * v;
    }
  }
  return s;
}

}  // namespace detail

// The first J roots of Ai(-E) = 0 by a scan in steps of 0.1 and bracketed refinement.
inline std::vector<ReferenceLevel> airy_reference(int J) {
  if (J < 1) fail(ErrorKind::ConfigError, "J must be at least 1");
  std::vector<ReferenceLevel> out;
  auto f = [](double E) { return special::airy(-E).ai; };
  double a = 0.0, fa = f(a);
  while (static_cast<int>(out.size()) < J) {
    const double b = a + 0.1, fb = f(b);
    if (fa == 0.0 || fa * fb < 0) {
      ReferenceLevel L;
      L.E = fa == 0.0 ? a : detail::bracket_root(f, a, b);
      L.c = 1.0 / special::airy(-L.E).aip;
      L.s = 1.0 / std::sqrt(L.c * L.c * detail::airy_norm_quadrature(L.E));
      out.push_back(L);
    }
    a = b;
    fa = fb;
  }
  return out;
}

struct Solution {
  RVec phi;
  RVec dphi;
};

// -phi'' + r phi = E phi, phi(0) = 0, phi'(0) = 1 by RK4 on a uniform grid from 0 (q = r is linear, so
// the midpoint values are exact).
inline Solution unperturbed_solution(double E, const RVec& xs) {
  require_grid(xs, "x-grid", 2);
  if (xs.front() != 0.0 || !is_uniform(xs)) fail(ErrorKind::MalformedGrid, "need a uniform grid from 0");
  const double h = xs[1] - xs[0];
  Solution s;
  s.phi.resize(xs.size());
  s.dphi.resize(xs.size());
  double y = 0.0, yp = 1.0;
  auto acc = [E](double r, double v) { return (r - E) * v; };
  for (std::size_t i = 0;; ++i) {
    s.phi[i] = y;
    s.dphi[i] = yp;
    if (i + 1 == xs.size()) break;
    const double r = xs[i];
    const double k1y = yp, k1p = acc(r, y);
    const double k2y = yp + 0.5 * h * k1p, k2p = acc(r + 0.5 * h, y + 0.5 * h * k1y);
    const double k3y = yp + 0.5 * h * k2p, k3p = acc(r + 0.5 * h, y + 0.5 * h * k2y);
    const double k4y = yp + h * k3p, k4p = acc(r + h, y + h * k3y);
    y += h / 6 * (k1y + 2 * k2y + 2 * k3y + k4y);
    yp += h / 6 * (k1p + 2 * k2p + 2 * k3p + k4p);
  }
  return s;
}

struct RecoveryOptions {
  double cond_cap = 1e14;
  double same_level_tol = 1e-13;  // data levels this close to a reference level reuse its Airy form
};

struct Recovery {
  PotentialGrid q;           // r + p
  RVec p;
  RVec Kdiag;                // K(x, x)
  std::vector<RVec> coeff;   // K(x, y) = sum_m coeff[m][i] Psi_m(y) at x = xs[i]
  std::vector<RVec> Psi;     // Psi_m on the grid
  RVec c;                    // c_m: s_j^2 for data, -(s_j^0)^2 for reference
};

namespace detail {

inline void build_terms(const QuarkoniumData& data, const std::vector<ReferenceLevel>& ref, const RVec& xs,
                        const RecoveryOptions& opt, std::vector<RVec>& Psi, RVec& c) {
  if (data.slopes.size() != data.energies.size()) fail(ErrorKind::ConfigError, "energies and slopes differ in length");
  for (std::size_t j = 0; j < data.J(); ++j) {
    if (j > 0 && !(data.energies[j] > data.energies[j - 1]))
      fail(ErrorKind::ConfigError, "energies must be strictly increasing");
    if (data.slopes[j] == 0.0) fail(ErrorKind::ConfigError, "slopes must be nonzero");
  }
  auto airy_samples = [&](const ReferenceLevel& L) {
    RVec v(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) v[i] = L.phi(xs[i]);
    return v;
  };
  for (std::size_t j = 0; j < data.J(); ++j) {
    const double E = data.energies[j];
    const ReferenceLevel* same = nullptr;
    for (const auto& L : ref)
      if (std::abs(L.E - E) <= opt.same_level_tol * std::max(1.0, std::abs(E))) same = &L;
    Psi.push_back(same ? airy_samples(*same) : unperturbed_solution(E, xs).phi);
    c.push_back(data.slopes[j] * data.slopes[j]);
  }
  for (const auto& L : ref) {
    Psi.push_back(airy_samples(L));
    c.push_back(-L.s * L.s);
  }
}

}  // namespace detail

// Degenerate-kernel solve of K(x,y) + sum_m c_m Psi_m(y) int_0^x K(x,t) Psi_m(t) dt = -sum_m c_m Psi_m(x) Psi_m(y):
// with K(x,y) = sum_m a_m(x) Psi_m(y) and G_jm(x) = int_0^x Psi_j Psi_m, (I + C G) a = -C Psi(x).
// p = 2 dK(r,r)/dr by 4th-order differences.
inline Recovery recover_potential(const QuarkoniumData& data, const std::vector<ReferenceLevel>& ref, const RVec& xs,
                                  const RecoveryOptions& opt = {}) {
  require_grid(xs, "x-grid", 5);
  if (xs.front() != 0.0 || !is_uniform(xs)) fail(ErrorKind::MalformedGrid, "need a uniform grid from 0");
  Recovery r;
  detail::build_terms(data, ref, xs, opt, r.Psi, r.c);
  const std::size_t m = r.Psi.size(), n = xs.size();
  std::vector<std::vector<RVec>> G(m, std::vector<RVec>(m));
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a; b < m; ++b) {
      RVec prod(n);
      for (std::size_t i = 0; i < n; ++i) prod[i] = r.Psi[a][i] * r.Psi[b][i];
      G[a][b] = cumint4(xs, prod);
      if (b != a) G[b][a] = G[a][b];
    }
  r.coeff.assign(m, RVec(n, 0.0));
  r.Kdiag.assign(n, 0.0);
  const auto M = static_cast<Eigen::Index>(m);
  // solved in the symmetric form (C^{-1} + G) a = -Psi(x), equilibrated by the diagonal of G
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::MatrixXd A(M, M);
    Eigen::VectorXd rhs(M), d(M);
    for (std::size_t a = 0; a < m; ++a) d(static_cast<Eigen::Index>(a)) = std::sqrt(1.0 + G[a][a][i]);
    for (std::size_t a = 0; a < m; ++a) {
      const auto ia = static_cast<Eigen::Index>(a);
      rhs(ia) = -r.Psi[a][i] / d(ia);
      for (std::size_t b = 0; b < m; ++b) {
        const auto ib = static_cast<Eigen::Index>(b);
        A(ia, ib) = (G[a][b][i] + (a == b ? 1.0 / r.c[a] : 0.0)) / (d(ia) * d(ib));
      }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    if (lu.rcond() < 1.0 / opt.cond_cap)
      fail(ErrorKind::SingularSystem, "degenerate system is singular at x = " + std::to_string(xs[i]));
    Eigen::VectorXd sol = lu.solve(rhs).cwiseQuotient(d);
    double k = 0.0;
    for (std::size_t a = 0; a < m; ++a) {
      r.coeff[a][i] = sol(static_cast<Eigen::Index>(a));
      k += r.coeff[a][i] * r.Psi[a][i];
    }
    r.Kdiag[i] = k;
  }
  RVec dK = diff4(r.Kdiag, xs[1] - xs[0]);
  r.p.resize(n);
  r.q.xs = xs;
  r.q.qs.resize(n);
  r.q.decay_class = DecayClass::Confining;
  for (std::size_t i = 0; i < n; ++i) {
    r.p[i] = 2 * dK[i];
    r.q.qs[i] = xs[i] + r.p[i];
  }
  return r;
}

inline Recovery recover_potential(const QuarkoniumData& data, const RVec& xs, const RecoveryOptions& opt = {}) {
  return recover_potential(data, airy_reference(static_cast<int>(data.J())), xs, opt);
}

// K(x_i, x_i) from the Nystrom discretisation of the same integral equation on [0, x_i] (Gregory weights).
inline double nystrom_diagonal(const Recovery& rec, const RVec& xs, std::size_t i) {
  const std::size_t n = i + 1, m = rec.Psi.size();
  RVec w = gregory_weights(n, xs[1] - xs[0]);
  const auto N = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(N, N);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(N);
  for (std::size_t a = 0; a < m; ++a) {
    const RVec& P = rec.Psi[a];
    for (std::size_t y = 0; y < n; ++y) {
      b(static_cast<Eigen::Index>(y)) -= rec.c[a] * P[i] * P[y];
      for (std::size_t t = 0; t < n; ++t)
        A(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(t)) += rec.c[a] * P[y] * w[t] * P[t];
    }
  }
  Eigen::VectorXd K = A.partialPivLu().solve(b);
  return K(N - 1);
}

// p = -2 d/dx [s^2 phi^2 / (1 + s^2 int_0^x phi^2)] for one added level, with the derivative taken
// analytically from phi and phi'.
inline RVec single_level_p(double E0, double s0, const RVec& xs) {
  Solution sol = unperturbed_solution(E0, xs);
  RVec sq(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) sq[i] = sol.phi[i] * sol.phi[i];
  RVec I = cumint4(xs, sq);
  const double s2 = s0 * s0;
  RVec p(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double N = s2 * sq[i], Np = 2 * s2 * sol.phi[i] * sol.dphi[i];
    const double D = 1 + s2 * I[i], Dp = s2 * sq[i];
    p[i] = -2 * (Np * D - N * Dp) / (D * D);
  }
  return p;
}

struct ShootingOptions {
  double dE = 0.05;
  double E_max = 0.0;  // scan limit; 0 = grow until count levels are found
};

// Lowest eigenvalues of -u'' + q u = E u on [0, inf), u(0) = 0, with q continued as r beyond the grid:
// roots in E of phi'(X) Ai(X - E) - phi(X) Ai'(X - E).
inline RVec bound_state_energies(const PotentialGrid& q, std::size_t count, const ShootingOptions& opt = {}) {
  require_grid(q.xs, "potential grid", 5);
  if (q.xs.front() != 0.0 || !is_uniform(q.xs)) fail(ErrorKind::MalformedGrid, "need a uniform grid from 0");
  const double h = q.h(), X = q.xs.back();
  UniformInterpolator qi{0.0, h, q.qs, 5};
  RVec qm(q.xs.size() - 1);
  for (std::size_t i = 0; i + 1 < q.xs.size(); ++i) qm[i] = qi(q.xs[i] + 0.5 * h);
  auto mismatch = [&](double E) {
    double y = 0.0, yp = 1.0;
    for (std::size_t i = 0; i + 1 < q.xs.size(); ++i) {
      const double a0 = q.qs[i] - E, am = qm[i] - E, a1 = q.qs[i + 1] - E;
      const double k1y = yp, k1p = a0 * y;
      const double k2y = yp + 0.5 * h * k1p, k2p = am * (y + 0.5 * h * k1y);
      const double k3y = yp + 0.5 * h * k2p, k3p = am * (y + 0.5 * h * k2y);
      const double k4y = yp + h * k3p, k4p = a1 * (y + h * k3y);
      y += h / 6 * (k1y + 2 * k2y + 2 * k3y + k4y);
      yp += h / 6 * (k1p + 2 * k2p + 2 * k3p + k4p);
      const double s = std::max(std::abs(y), std::abs(yp));
      if (s > 1e100) {
        y /= s;
        yp /= s;
      }
    }
    const auto A = special::airy(X - E);
    return yp * A.ai - y * A.aip;
  };
  double qmin = q.qs[0];
  for (double v : q.qs) qmin = std::min(qmin, v);
  RVec out;
  double a = qmin - 1.0, fa = mismatch(a);
  while (out.size() < count) {
    if (opt.E_max > 0 && a > opt.E_max) break;
    if (a > X) fail(ErrorKind::ConfigError, "grid too short to hold the requested levels");
    const double b = a + opt.dE, fb = mismatch(b);
    if (fa * fb < 0) out.push_back(detail::bracket_root(mismatch, a, b));
    a = b;
    fa = fb;
  }
  return out;
}

}  // namespace invscat::quarkonium
