#pragma once

// Fixed-energy (k = 1) partial waves of a compactly supported potential: phase shifts from the
// Lippmann-Schwinger equation, the radius-of-support estimator and the l-independent transformation
// kernel K(r, rho) from its Volterra equation in logarithmic variables.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "errors.hpp"
#include "numerics.hpp"
#include "special.hpp"
#include "types.hpp"

namespace invscat::fixed_energy {

namespace detail {

// Integrals of f over [r_0, r_i] and [r_i, r_{n-1}] for every i, with the Gregory rule on each piece.
template <class T>
void gregory_split(const std::vector<T>& f, double h, std::vector<T>& lower, std::vector<T>& upper) {
  const std::size_t n = f.size();
  std::vector<T> P(n + 1, T{});
  for (std::size_t i = 0; i < n; ++i) P[i + 1] = P[i] + f[i];
  auto piece = [&](std::size_t a, std::size_t b) {  // nodes a..b inclusive
    const std::size_t m = b - a + 1;
    if (m >= 6)
      return h * (P[b + 1] - P[a] - 5.0 / 8 * (f[a] + f[b]) + 1.0 / 6 * (f[a + 1] + f[b - 1]) -
                  1.0 / 24 * (f[a + 2] + f[b - 2]));
    RVec w = gregory_weights(m, h);
    T s{};
    for (std::size_t k = 0; k < m; ++k) s += w[k] * f[a + k];
    return s;
  };
  lower.assign(n, T{});
  upper.assign(n, T{});
  for (std::size_t i = 0; i < n; ++i) {
    lower[i] = piece(0, i);
    upper[i] = piece(i, n - 1);
  }
}

inline std::size_t support_end(const PotentialGrid& q) {
  require_grid(q.xs, "potential grid", 6);
  if (!is_uniform(q.xs) || q.xs.front() != 0.0)
    fail(ErrorKind::MalformedGrid, "partial waves need a uniform grid starting at r = 0");
  if (q.support_radius) {
    const auto i = static_cast<std::size_t>(std::llround(*q.support_radius / q.h()));
    if (i >= q.xs.size() || std::abs(q.xs[i] - *q.support_radius) > 1e-9 * (1 + *q.support_radius))
      fail(ErrorKind::MalformedGrid, "support radius is not a grid node");
    return i;
  }
  std::size_t last = 0;
  for (std::size_t i = 0; i < q.qs.size(); ++i)
    if (q.qs[i] != 0.0) last = i;
  return std::max<std::size_t>(last, 5);
}

// int_a^c s q(s) ds by 8-point Gauss-Legendre on each piece between breakpoints
struct MomentIntegral {
  std::function<double(double)> q;
  RVec breakpoints;
  RVec gx, gw;

  MomentIntegral() = default;
  MomentIntegral(std::function<double(double)> qf, RVec bps) : q(std::move(qf)), breakpoints(std::move(bps)) {
    gauss_legendre(8, gx, gw);
  }

  double operator()(double a, double c) const {
    double s = 0.0;
    RVec cuts{a};
    for (double bp : breakpoints)
      if (bp > a && bp < c) cuts.push_back(bp);
    cuts.push_back(c);
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t m = 0; m + 1 < cuts.size(); ++m) {
      const double mid = 0.5 * (cuts[m] + cuts[m + 1]), hw = 0.5 * (cuts[m + 1] - cuts[m]);
      for (std::size_t g = 0; g < gx.size(); ++g) {
        const double x = mid + hw * gx[g];
        s += hw * gw[g] * x * q(x);
      }
    }
    return s;
  }
};

}  // namespace detail

struct PartialWaveOptions {
  int L = 40;
  double tol = 1e-14;
  int max_iter = 200;
  bool keep_waves = false;
};

struct PartialWaveResult {
  PhaseShiftSequence ps;
  RVec rs;                       // grid on [0, a]
  std::vector<CVec> psi;         // psi_l(r), filled when keep_waves
  std::vector<RVec> u;           // u_l(r), filled when keep_waves
  std::vector<int> iterations;   // Picard iterations per l, -1 when the dense solve was used
};

// psi_l = u_l + int g_l(r,s) q(s) psi_l(s) ds, g_l = -u_l(r<) w_l(r>), w_l = i u_l - n_l (n_l = r y_l),
// then a_l = -int u_l q psi_l and exp(2 i delta_l) = 1 + 2 i a_l.
inline PartialWaveResult partial_wave_forward(const PotentialGrid& q, const PartialWaveOptions& opt = {}) {
  if (opt.L < 0) fail(ErrorKind::ConfigError, "L must be nonnegative");
  const std::size_t n = detail::support_end(q) + 1;
  const double h = q.h();
  PartialWaveResult res;
  res.rs.assign(q.xs.begin(), q.xs.begin() + static_cast<std::ptrdiff_t>(n));
  const RVec qv(q.qs.begin(), q.qs.begin() + static_cast<std::ptrdiff_t>(n));
  const auto Lc = static_cast<std::size_t>(opt.L) + 1;
  std::vector<RVec> U(Lc, RVec(n, 0.0)), N(Lc, RVec(n, 0.0));
  for (std::size_t i = 1; i < n; ++i) {
    RVec uj = special::riccati_j(opt.L, res.rs[i]), yj = special::riccati_y(opt.L, res.rs[i]);
    for (std::size_t l = 0; l < Lc; ++l) {
      U[l][i] = uj[l];
      N[l][i] = yj[l];
    }
  }
  RVec wq = gregory_weights(n, h);
  for (std::size_t l = 0; l < Lc; ++l) {
    const RVec& u = U[l];
    CVec w(n);
    for (std::size_t i = 1; i < n; ++i) w[i] = kI * u[i] - N[l][i];
    CVec psi(u.begin(), u.end()), fl(n), fu(n), lo, up, next(n);
    int iters = -1;
    double prev = std::numeric_limits<double>::infinity();
    int growth = 0;
    for (int it = 1; it <= opt.max_iter; ++it) {
      for (std::size_t i = 0; i < n; ++i) {
        fl[i] = u[i] * qv[i] * psi[i];
        fu[i] = w[i] * qv[i] * psi[i];
      }
      detail::gregory_split(fl, h, lo, up);
      CVec lo2 = lo;
      detail::gregory_split(fu, h, lo, up);
      double change = 0.0, scale = 0.0;
      for (std::size_t i = 1; i < n; ++i) {
        next[i] = u[i] - w[i] * lo2[i] - u[i] * up[i];
        change = std::max(change, std::abs(next[i] - psi[i]));
        scale = std::max(scale, std::abs(next[i]));
      }
      next[0] = 0.0;
      psi.swap(next);
      if (!std::isfinite(change)) break;
      if (change <= opt.tol * scale) {
        iters = it;
        break;
      }
      growth = change > prev ? growth + 1 : 0;
      if (growth >= 3) break;
      prev = change;
    }
    if (iters < 0) {
      // Nystrom system with the Gregory rule split at the diagonal
      const auto m = static_cast<Eigen::Index>(n);
      Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(m, m);
      Eigen::VectorXcd b(m);
      for (std::size_t i = 0; i < n; ++i) {
        b(static_cast<Eigen::Index>(i)) = u[i];
        if (i == 0) continue;
        RVec wl = gregory_weights(i + 1, h), wu = gregory_weights(n - i, h);
        for (std::size_t j = 0; j <= i; ++j)
          A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += w[i] * wl[j] * u[j] * qv[j];
        for (std::size_t j = i; j < n; ++j)
          A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += u[i] * wu[j - i] * w[j] * qv[j];
      }
      Eigen::VectorXcd x = A.partialPivLu().solve(b);
      if (!x.allFinite()) fail(ErrorKind::IterationDiverged, "partial wave l = " + std::to_string(l) + " has no solution");
      for (std::size_t i = 0; i < n; ++i) psi[i] = x(static_cast<Eigen::Index>(i));
    }
    cplx a = 0.0;
    for (std::size_t i = 0; i < n; ++i) a -= wq[i] * u[i] * qv[i] * psi[i];
    res.ps.ells.push_back(static_cast<int>(l));
    res.ps.a_ells.push_back(a);
    res.ps.deltas.push_back(0.5 * std::atan2(2 * a.real(), 1 - 2 * a.imag()));
    res.iterations.push_back(iters);
    if (opt.keep_waves) {
      res.psi.push_back(psi);
      res.u.push_back(u);
    }
  }
  return res;
}

// Leading large-l amplitude -(e/(2l+1))^{2l+1}/(4l+2) int_0^a q r^{2l+2} dr.
inline double asymptotic_amplitude(const PotentialGrid& q, int l) {
  const std::size_t n = detail::support_end(q) + 1;
  RVec w = gregory_weights(n, q.h());
  double s = 0.0;
  for (std::size_t i = 1; i < n; ++i) s += w[i] * q.qs[i] * std::exp((2.0 * l + 2) * std::log(q.xs[i]));
  const double L2 = 2.0 * l + 1;
  return -s * std::exp(L2 * std::log(std::exp(1.0) / L2)) / (2 * L2);
}

struct RadiusOptions {
  double floor = 1e-290;         // |delta_l| below this counts as underflow
  std::size_t min_points = 4;    // fitted tail length
};

struct RadiusEstimate {
  double a_hat = 0.0;
  std::vector<int> ells;  // usable l (nonzero delta)
  RVec t;                 // ((2l+1)/e) |delta_l|^{1/(2l)}
  int fit_lo = 0, fit_hi = 0;
  double fit_rms = 0.0;   // rms of the log-fit residual over the tail
  RVec coefficients;      // log t = c0 + c1/l + c2 ln(l)/l
};

// Extrapolates t_l to l = infinity with log t_l = log a + (c1 + c2 ln l)/l fitted over the upper half
// of the usable range.
inline RadiusEstimate radius_estimate(const PhaseShiftSequence& ps, const RadiusOptions& opt = {}) {
  RadiusEstimate r;
  for (std::size_t i = 0; i < ps.ells.size(); ++i) {
    const int l = ps.ells[i];
    if (l < 1) continue;
    const double d = std::abs(ps.deltas[i]);
    if (!(d > opt.floor)) break;
    r.ells.push_back(l);
    r.t.push_back((2.0 * l + 1) / std::exp(1.0) * std::exp(std::log(d) / (2.0 * l)));
  }
  const std::size_t m = r.ells.size();
  if (m < opt.min_points + 1)
    fail(ErrorKind::Underflow, m == 0 ? std::string("no nonzero phase shift with l >= 1")
                                      : "usable l range is 1.." + std::to_string(r.ells.back()));
  std::size_t start = std::min(m / 2, m - opt.min_points);
  RVec ls, ys;
  for (std::size_t i = start; i < m; ++i) {
    ls.push_back(r.ells[i]);
    ys.push_back(std::log(r.t[i]));
  }
  r.fit_lo = r.ells[start];
  r.fit_hi = r.ells.back();
  r.coefficients = lsq_fit(ls, ys, {[](double) { return 1.0; }, [](double l) { return 1.0 / l; },
                                    [](double l) { return std::log(l) / l; }});
  double ss = 0.0;
  for (std::size_t i = 0; i < ls.size(); ++i) {
    const double f = r.coefficients[0] + r.coefficients[1] / ls[i] + r.coefficients[2] * std::log(ls[i]) / ls[i];
    ss += (f - ys[i]) * (f - ys[i]);
  }
  r.fit_rms = std::sqrt(ss / static_cast<double>(ls.size()));
  r.a_hat = std::exp(r.coefficients[0]);
  return r;
}

struct KernelOptions {
  double h = 0.02;        // step in xi and eta
  double eta_max = 24.0;  // rho >= r exp(-eta_max) at r = R
  double gamma = 1.0;     // initial weight exponent of the norm sup exp(-gamma eta)|L|
  double tol = 1e-13;
  int max_iter = 200;
  double gamma_max = 1e6;
  RVec breakpoints;       // discontinuities of q, used when integrating b
};

// L(xi, eta) on the lattice xi = xi_min + i h, eta = j h, i + j <= M, where xi + eta = 2 ln r <= 2 ln R.
class FixedEnergyKernel {
 public:
  double R = 0.0, h = 0.0, xi_min = 0.0;
  std::size_t M = 0;
  std::vector<RVec> L;   // L[i][j]
  RVec b;                // b(xi_i)
  double gamma = 0.0;
  int iterations = 0;
  int gamma_doublings = 0;
  detail::MomentIntegral sq;

  double xi(std::size_t i) const { return xi_min + h * static_cast<double>(i); }
  double eta(std::size_t j) const { return h * static_cast<double>(j); }

  // K(r, rho) = L(xi, eta) exp(xi/2); zero below the truncated range of rho.
  double K(double r, double rho) const {
    if (!(r > 0) || r > R * (1 + 1e-12) || rho > r * (1 + 1e-12) || rho < 0)
      fail(ErrorKind::ConfigError, "K(r, rho) needs 0 < rho <= r <= R");
    if (rho <= 0) return 0.0;
    // on the diagonal K(r, r) = (r/2) int_0^r s q(s) ds
    if (std::abs(rho - r) <= 1e-12 * r && sq.q) return 0.5 * r * sq(0.0, r);
    const double x = std::log(r * rho), e = std::max(0.0, std::log(r / rho));
    return Lat(x, e) * std::exp(0.5 * x);
  }

  // L by cubic Lagrange interpolation in (p, j) = (i + j, j), which maps the lattice onto 0 <= j <= p <= M.
  double Lat(double x, double e) const {
    const double p = (x + e - xi_min) / h, jj = e / h;
    if (p < 0 || jj > p + 1e-9) return 0.0;
    const auto Mi = static_cast<std::ptrdiff_t>(M);
    std::ptrdiff_t ps = std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(std::floor(p)) - 1, 0, Mi - 3);
    std::ptrdiff_t js = std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(std::floor(jj)) - 1, 0, Mi - 3);
    if (js + 3 > ps) {
      if (ps < 3) return 0.0;
      js = ps - 3;
    }
    auto lag = [](double t, std::ptrdiff_t s, double* c) {
      for (int a = 0; a < 4; ++a) {
        double w = 1.0;
        for (int bb = 0; bb < 4; ++bb)
          if (a != bb) w *= (t - static_cast<double>(s + bb)) / static_cast<double>(a - bb);
        c[a] = w;
      }
    };
    double cp[4], cj[4];
    lag(p, ps, cp);
    lag(jj, js, cj);
    double v = 0.0;
    for (int a = 0; a < 4; ++a)
      for (int bb = 0; bb < 4; ++bb) {
        const std::ptrdiff_t j = js + bb, i = ps + a - j;
        v += cp[a] * cj[bb] * L[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      }
    return v;
  }

  // K on a grid of r in (0, R]: values[i][m] = K(xs[i], xs[m]), m <= i.
  TransformationKernel table(const RVec& xs) const {
    TransformationKernel t;
    t.kind = KernelKind::FixedEnergyK;
    t.xs = xs;
    t.values.resize(xs.size());
    t.diagonal.resize(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      t.values[i].resize(i + 1);
      for (std::size_t m = 0; m <= i; ++m) t.values[i][m] = xs[i] > 0 ? K(xs[i], xs[m]) : 0.0;
      t.diagonal[i] = t.values[i][i];
    }
    return t;
  }
};

// Solves L = b - int_{-inf}^xi ds int_0^eta dt Q(s,t) L(s,t),
// Q = (1/4)[e^{s+t}(1 - q(e^{(s+t)/2})) - e^{s-t}], b(xi) = (1/2) int_0^{e^{xi/2}} s q(s) ds,
// by Picard iteration with the trapezoid rule in both variables.
inline FixedEnergyKernel fixed_energy_kernel(const std::function<double(double)>& q, double R,
                                             const KernelOptions& opt = {}) {
  if (!(R > 0) || !(opt.h > 0) || !(opt.eta_max > 4 * opt.h)) fail(ErrorKind::ConfigError, "bad kernel grid");
  FixedEnergyKernel k;
  k.R = R;
  k.h = opt.h;
  k.M = static_cast<std::size_t>(std::llround(opt.eta_max / opt.h));
  k.xi_min = 2 * std::log(R) - opt.h * static_cast<double>(k.M);
  const std::size_t M = k.M;
  const double h = opt.h;

  // q on r_p = exp((xi_min + p h)/2) and b(xi_i) by Gauss-Legendre on [r_{i-1}, r_i] split at breakpoints
  RVec qp(M + 1), rp(M + 1);
  for (std::size_t p = 0; p <= M; ++p) {
    rp[p] = std::exp(0.5 * k.xi(p));
    qp[p] = q(rp[p]);
  }
  k.sq = detail::MomentIntegral(q, opt.breakpoints);
  const auto& seg = k.sq;
  k.b.resize(M + 1);
  double acc = seg(0.0, rp[0]);
  k.b[0] = 0.5 * acc;
  for (std::size_t i = 1; i <= M; ++i) {
    acc += seg(rp[i - 1], rp[i]);
    k.b[i] = 0.5 * acc;
  }

  auto Q = [&](std::size_t i, std::size_t j) {
    const double e1 = rp[i + j] * rp[i + j];
    return 0.25 * (e1 * (1 - qp[i + j]) - std::exp(k.xi_min + h * (static_cast<double>(i) - static_cast<double>(j))));
  };
  std::vector<RVec> Qv(M + 1), L(M + 1), C(M + 1), next(M + 1);
  for (std::size_t i = 0; i <= M; ++i) {
    Qv[i].resize(M - i + 1);
    for (std::size_t j = 0; j <= M - i; ++j) Qv[i][j] = Q(i, j);
    L[i].assign(M - i + 1, k.b[i]);
    C[i].assign(M - i + 1, 0.0);
    next[i].assign(M - i + 1, 0.0);
  }
  double gamma = opt.gamma;
  auto wnorm = [&](const std::vector<RVec>& A, const std::vector<RVec>& B) {
    double m = 0.0;
    for (std::size_t i = 0; i <= M; ++i)
      for (std::size_t j = 0; j < A[i].size(); ++j)
        m = std::max(m, std::exp(-gamma * k.eta(j)) * std::abs(A[i][j] - B[i][j]));
    return m;
  };
  double prev = std::numeric_limits<double>::infinity();
  for (int it = 1;; ++it) {
    if (it > opt.max_iter) fail(ErrorKind::IterationDiverged, "Picard iteration did not converge");
    // C(i, j) = int_0^{eta_j} Q L dt, then D(i, j) = int_{xi_0}^{xi_i} C(s, j) ds
    for (std::size_t i = 0; i <= M; ++i) {
      C[i][0] = 0.0;
      for (std::size_t j = 1; j < L[i].size(); ++j)
        C[i][j] = C[i][j - 1] + 0.5 * h * (Qv[i][j - 1] * L[i][j - 1] + Qv[i][j] * L[i][j]);
    }
    for (std::size_t j = 0; j <= M; ++j) {
      double D = 0.0;
      next[0][j] = k.b[0];
      for (std::size_t i = 1; i + j <= M; ++i) {
        D += 0.5 * h * (C[i - 1][j] + C[i][j]);
        next[i][j] = k.b[i] - D;
      }
    }
    const double change = wnorm(next, L);
    L.swap(next);
    if (!std::isfinite(change)) fail(ErrorKind::IterationDiverged, "Picard iterate is not finite");
    double scale = 0.0;
    for (std::size_t i = 0; i <= M; ++i)
      for (std::size_t j = 0; j < L[i].size(); ++j) scale = std::max(scale, std::exp(-gamma * k.eta(j)) * std::abs(L[i][j]));
    k.iterations = it;
    if (change <= opt.tol * std::max(scale, 1e-300)) break;
    if (change > prev && it > 1) {
      // not contracting in this norm: a larger gamma is needed
      gamma *= 2;
      ++k.gamma_doublings;
      if (gamma > opt.gamma_max) fail(ErrorKind::IterationDiverged, "gamma exceeded its cap");
      prev = std::numeric_limits<double>::infinity();
      continue;
    }
    prev = change;
  }
  k.gamma = gamma;
  k.L = std::move(L);
  return k;
}

inline FixedEnergyKernel fixed_energy_kernel(const PotentialGrid& q, double R, const KernelOptions& opt = {}) {
  require_grid(q.xs, "potential grid", 4);
  UniformInterpolator ip{q.xs.front(), q.h(), q.qs, 4};
  const double xe = q.xs.back();
  return fixed_energy_kernel([ip, xe](double r) { return r > xe ? 0.0 : ip(r); }, R, opt);
}

// Growth bound |L| <= c0 exp(2 sqrt(eta mu1(xi + eta))), mu1(x) = e^x/2 + int_0^{e^{x/2}} s|q(s)| ds,
// c0 = sup |b|. Returns max over the lattice of |L| / bound (<= 1 when the bound holds).
inline double growth_bound_ratio(const FixedEnergyKernel& k, const std::function<double(double)>& q) {
  const std::size_t M = k.M;
  double c0 = 0.0;
  for (double v : k.b) c0 = std::max(c0, std::abs(v));
  if (c0 == 0.0) return 0.0;
  RVec rp(M + 1), sq(M + 1);
  for (std::size_t p = 0; p <= M; ++p) {
    rp[p] = std::exp(0.5 * k.xi(p));
    sq[p] = rp[p] * std::abs(q(rp[p]));
  }
  RVec cum = cumtrapz(rp, sq);
  const double head = 0.5 * rp[0] * sq[0];
  double worst = 0.0;
  for (std::size_t i = 0; i <= M; ++i)
    for (std::size_t j = 0; j < k.L[i].size(); ++j) {
      const double mu1 = 0.5 * rp[i + j] * rp[i + j] + head + cum[i + j];
      worst = std::max(worst, std::abs(k.L[i][j]) / (c0 * std::exp(2 * std::sqrt(k.eta(j) * mu1))));
    }
  return worst;
}

}  // namespace invscat::fixed_energy
