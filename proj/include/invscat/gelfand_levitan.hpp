#pragma once

// Gel'fand-Levitan inversion rho => L => K => q, the converse K => L, and the Goursat construction
// q => K.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "errors.hpp"
#include "fourier.hpp"
#include "numerics.hpp"
#include "types.hpp"

namespace invscat::gl {

// L(x,y) = L(x+y) - L(|x-y|) on a uniform grid x_i = i h, from the profile sampled at m h, m <= 2N.
struct LKernel {
  double h = 0.0;
  RVec profile;

  std::size_t size() const { return (profile.size() + 1) / 2; }
  RVec xs() const { return uniform_grid(h * static_cast<double>(size() - 1), h); }
  double operator()(std::size_t i, std::size_t j) const {
    return profile[i + j] - profile[i > j ? i - j : j - i];
  }
};

struct BuildLOptions {
  double asymptote_tol = 1e-2;  // |rho'/rho0' - 1| allowed at lambda_max
  double tail_fraction = 0.25;
  double tail_fit_rtol = 5e-2;
};

// Profile L(x) = (1/pi) int_0^inf (1 - cos kx) g(k) dk + sum_j c_j (cosh k_j x - 1) / (2 k_j^2),
// g = pi rho'(k^2) / k - 1 = 1/|f|^2 - 1. A zero-energy resonance (g ~ a/k^2) is split off analytically.
class Profile {
 public:
  explicit Profile(const SpectralFunction& sf, const BuildLOptions& opt = {}) : discrete_(sf.discrete_points) {
    require_grid(sf.lambdas, "lambda grid", 5);
    if (sf.lambdas.front() < 0) fail(ErrorKind::MalformedGrid, "lambda grid must lie in [0, inf)");
    RVec ks, gr;
    for (std::size_t i = 0; i < sf.lambdas.size(); ++i) {
      const double k = std::sqrt(sf.lambdas[i]);
      if (k == 0.0) continue;
      ks.push_back(k);
      gr.push_back(kPi * sf.density[i] / k - 1.0);
    }
    auto head = [&](const RVec& v) { return RVec(v.begin(), v.begin() + 4); };
    if (sf.resonance) {
      // g ~ a / k^2 at k -> 0; the a/k^2 part integrates to a |x| / 2
      RVec u(gr.size());
      for (std::size_t i = 0; i < u.size(); ++i) u[i] = ks[i] * ks[i] * gr[i];
      resonance_a_ = lagrange_interp(head(ks), head(u), 0.0, 3);
      for (std::size_t i = 0; i < u.size(); ++i) gr[i] -= resonance_a_ / (ks[i] * ks[i]);
    }
    const double g0 = lagrange_interp(head(ks), head(gr), 0.0, 3);
    ks.insert(ks.begin(), 0.0);
    gr.insert(gr.begin(), g0);
    CVec g(gr.begin(), gr.end());
    if (std::abs(g.back()) > opt.asymptote_tol)
      fail(ErrorKind::DivergentTail, "density differs from the free one by " + std::to_string(std::abs(g.back())) +
                                         " (relative) at lambda_max");
    PowerTail tail;
    double mag = 0.0;
    for (std::size_t i = 0; i < ks.size(); ++i)
      if (ks[i] >= opt.tail_fraction * ks.back()) mag = std::max(mag, std::abs(g[i]));
    if (mag > 1e-14) {
      tail = fit_power_tail(ks, g, {2, 4}, {}, opt.tail_fraction);
      double mis = 0.0;
      for (std::size_t i = 0; i < ks.size(); ++i)
        if (ks[i] >= opt.tail_fraction * ks.back()) mis = std::max(mis, std::abs(g[i] - tail.value(ks[i])));
      if (mis > opt.tail_fit_rtol * mag)
        fail(ErrorKind::DivergentTail, "rho - rho0 has no integrable power tail at lambda_max");
    }
    fourier_ = std::make_unique<HalfLineFourier>(ks, g, tail);
    total_ = (*fourier_)(0.0).real();
  }

  double continuous(double x) const {
    return (total_ - (*fourier_)(x).real()) / kPi + 0.5 * resonance_a_ * std::abs(x);
  }
  double resonance_coefficient() const { return resonance_a_; }
  double discrete(double x) const {
    double s = 0.0;
    for (const auto& d : discrete_) {
      const double k = std::sqrt(-d.lambda);
      s += d.c * (std::cosh(k * x) - 1.0) / (2 * k * k);
    }
    return s;
  }
  double operator()(double x) const { return x == 0.0 ? 0.0 : continuous(std::abs(x)) + discrete(x); }

 private:
  std::vector<DiscretePoint> discrete_;
  std::unique_ptr<HalfLineFourier> fourier_;
  double total_ = 0.0;
  double resonance_a_ = 0.0;
};

inline LKernel build_L(const SpectralFunction& sf, double X, double h, const BuildLOptions& opt = {}) {
  Profile P(sf, opt);
  LKernel L;
  L.h = h;
  const auto n = static_cast<std::size_t>(std::llround(X / h));
  L.profile.resize(2 * n + 1);
  for (std::size_t m = 0; m <= 2 * n; ++m) L.profile[m] = P(h * static_cast<double>(m));
  return L;
}

namespace detail {

// One-sided derivative of the profile at 0+, i.e. half the jump of d/ds L(s,y) across s = y.
inline double profile_slope0(const LKernel& L) {
  const RVec& P = L.profile;
  if (P.size() < 5) return P.size() >= 2 ? (P[1] - P[0]) / L.h : 0.0;
  return (-25 * P[0] + 48 * P[1] - 36 * P[2] + 16 * P[3] - 3 * P[4]) / (12 * L.h);
}

// Row m of the Nystrom operator for int_0^{x_i} K(x_i,s) L(s,y_m) ds: row-independent Gregory
// weights plus the Euler-Maclaurin term for the kink of L(., y_m) at s = y_m (interior rows only).
struct GlQuadrature {
  RVec w;
  double kink = 0.0;
  GlQuadrature(std::size_t i, const LKernel& L)
      : w(gregory_weights(i + 1, L.h)), kink(-L.h * L.h / 6 * profile_slope0(L)) {}
  double diag_correction(std::size_t m, std::size_t i) const { return (m > 0 && m < i) ? kink : 0.0; }
};

}  // namespace detail

struct GlOptions {
  double cond_cap = 1e12;
};

// K(x,y) + int_0^x K(x,s) L(s,y) ds + L(x,y) = 0 for each grid x; values[i][m] = K(x_i, x_m).
inline TransformationKernel solve_gl(const LKernel& L, const GlOptions& opt = {}) {
  const std::size_t N = L.size();
  if (N < 2) fail(ErrorKind::MalformedGrid, "GL grid needs at least two points");
  TransformationKernel K;
  K.kind = KernelKind::GlK;
  K.xs = L.xs();
  K.dy = L.h;
  K.values.resize(N);
  K.diagonal.assign(N, 0.0);
  K.values[0] = {0.0};
  for (std::size_t i = 1; i < N; ++i) {
    const auto n = static_cast<Eigen::Index>(i + 1);
    detail::GlQuadrature Q(i, L);
    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd rhs(n);
    for (std::size_t m = 0; m <= i; ++m) {
      const auto r = static_cast<Eigen::Index>(m);
      rhs(r) = -L(i, m);
      for (std::size_t s = 0; s <= i; ++s) M(r, static_cast<Eigen::Index>(s)) += Q.w[s] * L(s, m);
      M(r, r) += Q.diag_correction(m, i);
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
    if (!(lu.rcond() * opt.cond_cap > 1.0))
      fail(ErrorKind::SingularOperator, "GL system singular at x = " + std::to_string(K.xs[i]));
    Eigen::VectorXd k = lu.solve(rhs);
    K.values[i].assign(k.data(), k.data() + n);
    K.diagonal[i] = k(n - 1);
  }
  return K;
}

// Max over the grid of |K(x,y) + int_0^x K(x,s) L(s,y) ds + L(x,y)| with the solver's quadrature.
inline double gl_residual(const TransformationKernel& K, const LKernel& L) {
  double r = 0.0;
  for (std::size_t i = 1; i < K.xs.size(); ++i) {
    detail::GlQuadrature Q(i, L);
    for (std::size_t m = 0; m <= i; ++m) {
      double v = K.values[i][m] * (1.0 + Q.diag_correction(m, i)) + L(i, m);
      for (std::size_t s = 0; s <= i; ++s) v += Q.w[s] * K.values[i][s] * L(s, m);
      r = std::max(r, std::abs(v));
    }
  }
  return r;
}

// q(x) = 2 d/dx K(x,x).
inline PotentialGrid q_from_K(const TransformationKernel& K) {
  require_grid(K.xs, "x-grid", 2);
  if (!is_uniform(K.xs)) fail(ErrorKind::MalformedGrid, "q_from_K needs a uniform grid");
  PotentialGrid q;
  q.xs = K.xs;
  q.qs = diff4(K.diagonal, K.xs[1] - K.xs[0]);
  for (auto& v : q.qs) v *= 2.0;
  return q;
}

// Profile L(z), z = m h, m <= 2N, from K by the diagonal equation
// L(2x) + int_0^x K(x,s) [L(x+s) - L(x-s)] ds = -K(x,x).
// Even nodes are unknowns; odd nodes are cubic interpolants of their even neighbours.
inline RVec L_from_K(const TransformationKernel& K) {
  if (K.kind == KernelKind::MarchenkoA) fail(ErrorKind::ConfigError, "L_from_K needs a GL kernel");
  const std::size_t N = K.xs.size();
  const double h = K.dy;
  RVec P(2 * N - 1, 0.0);
  // interpolation of odd node j from up to four even nodes within [0, top]; returns (node, weight) pairs
  auto odd_stencil = [](std::size_t j, std::size_t top) {
    std::vector<std::pair<std::size_t, double>> st;
    const long avail = static_cast<long>(top / 2) + 1;  // even nodes 0, 2, ..., top
    const long npts = std::min<long>(4, avail);
    long first = static_cast<long>(j / 2) - (npts / 2 - 1);  // centred around j
    first = std::clamp<long>(first, 0, avail - npts);
    for (long a = 0; a < npts; ++a) {
      double w = 1.0;
      const double xa = static_cast<double>(2 * (first + a));
      for (long b = 0; b < npts; ++b)
        if (a != b) {
          const double xb = static_cast<double>(2 * (first + b));
          w *= (static_cast<double>(j) - xb) / (xa - xb);
        }
      st.emplace_back(static_cast<std::size_t>(2 * (first + a)), w);
    }
    return st;
  };
  for (std::size_t i = 1; i < N; ++i) {
    const std::size_t top = 2 * i;
    RVec w = gregory_weights(i + 1, h);
    // equation: P[top] (1 + coef) + known = -K(x_i, x_i)
    double coef = 0.0, known = 0.0;
    auto add_term = [&](std::size_t j, double c) {
      if (j == top) {
        coef += c;
      } else if (j % 2 == 0) {
        known += c * P[j];
      } else {
        for (auto [node, wt] : odd_stencil(j, top)) {
          if (node == top)
            coef += c * wt;
          else
            known += c * wt * P[node];
        }
      }
    };
    for (std::size_t s = 0; s <= i; ++s) {
      const double c = w[s] * K.values[i][s];
      add_term(i + s, c);
      add_term(i - s, -c);
    }
    P[top] = (-K.diagonal[i] - known) / (1.0 + coef);
  }
  for (std::size_t j = 1; j + 1 < P.size(); j += 2) {
    double v = 0.0;
    for (auto [node, wt] : odd_stencil(j, P.size() - 1)) v += wt * P[node];
    P[j] = v;
  }
  return P;
}

struct GoursatOptions {
  double tol = 1e-12;
  int max_iter = 50;
};

struct GoursatResult {
  TransformationKernel K;
  int iterations = 0;
  double last_change = 0.0;
};

// B(xi, eta) = K((xi+eta)/2, (xi-eta)/2) solving
// B = 1/4 int_eta^xi q(s/2) ds + 1/4 int_eta^xi int_0^eta q((s+tau)/2) B(s,tau) dtau ds by Picard iteration.
inline GoursatResult goursat_kernel(const PotentialGrid& q, const GoursatOptions& opt = {}) {
  require_grid(q.xs, "potential grid", 4);
  if (!is_uniform(q.xs) || q.xs[0] != 0.0) fail(ErrorKind::MalformedGrid, "goursat_kernel needs a uniform grid from 0");
  const double h = q.xs[1] - q.xs[0];
  const std::size_t N = q.xs.size();
  const std::size_t M = 2 * N - 1;  // xi, eta indices 0..M-1, step h
  // q on the half grid: qh[j] = q(j h / 2)
  RVec qh(M);
  UniformInterpolator qi{q.xs[0], h, q.qs, 5};
  for (std::size_t j = 0; j < M; ++j) qh[j] = (j % 2 == 0) ? q.qs[j / 2] : qi(0.5 * h * static_cast<double>(j));
  // Q0(xi) = 1/4 int_0^xi q(s/2) ds = 1/2 int_0^{xi/2} q
  RVec Q0 = cumint4(uniform_grid(0.5 * h * static_cast<double>(M - 1), 0.5 * h), qh);
  for (auto& v : Q0) v *= 0.5;
  // B[a][b] on b <= min(a, M-1-a), i.e. x = (xi+eta)/2 <= X
  auto bmax = [&](std::size_t a) { return std::min(a, M - 1 - a); };
  std::vector<RVec> B(M), Bn(M);
  for (std::size_t a = 0; a < M; ++a) {
    B[a].resize(bmax(a) + 1);
    for (std::size_t b = 0; b <= bmax(a); ++b) B[a][b] = Q0[a] - Q0[b];
    Bn[a] = B[a];
  }
  GoursatResult res;
  std::vector<RVec> I(M);  // I[a][b] = int_0^{eta_b} q((s_a+tau)/2) B(s_a,tau) dtau
  for (res.iterations = 1; res.iterations <= opt.max_iter; ++res.iterations) {
    for (std::size_t a = 0; a < M; ++a) {
      I[a].assign(bmax(a) + 1, 0.0);
      for (std::size_t b = 1; b <= bmax(a); ++b)
        I[a][b] = I[a][b - 1] + 0.5 * h * (qh[a + b - 1] * B[a][b - 1] + qh[a + b] * B[a][b]);
    }
    double change = 0.0;
    // G(xi_a, eta_b) = int_{eta_b}^{xi_a} I(s, eta_b) ds, accumulated in a for each b
    for (std::size_t b = 0; 2 * b <= M - 1; ++b) {
      double G = 0.0;
      for (std::size_t a = b; a + b <= M - 1; ++a) {
        if (a > b) G += 0.5 * h * (I[a - 1][b] + I[a][b]);
        const double v = Q0[a] - Q0[b] + 0.25 * G;
        change = std::max(change, std::abs(v - B[a][b]));
        Bn[a][b] = v;
      }
    }
    std::swap(B, Bn);
    res.last_change = change;
    if (!std::isfinite(change)) fail(ErrorKind::IterationDiverged, "Goursat iteration produced non-finite values");
    if (change < opt.tol) break;
  }
  res.iterations = std::min(res.iterations, opt.max_iter);
  TransformationKernel& K = res.K;
  K.kind = KernelKind::GlK;
  K.xs = q.xs;
  K.dy = h;
  K.values.resize(N);
  K.diagonal.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    K.values[i].resize(i + 1);
    for (std::size_t m = 0; m <= i; ++m) K.values[i][m] = B[i + m][i - m];
    K.diagonal[i] = K.values[i][i];
  }
  return res;
}

// Full chain rho => L => K => q on [0, X] with step h.
inline PotentialGrid invert(const SpectralFunction& sf, double X, double h, const BuildLOptions& lopt = {}) {
  return q_from_K(solve_gl(build_L(sf, X, h, lopt)));
}

}  // namespace invscat::gl
