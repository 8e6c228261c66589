#pragma once

// Marchenko inversion S => F => A => q, the converse step A => F, and diagnostics built on the
// Marchenko-type equation and the small-sigma estimates.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "core.hpp"
#include "errors.hpp"
#include "numerics.hpp"
#include "types.hpp"

namespace invscat::marchenko {

// F(x) on the given abscissas.
inline RVec build_F(const ScatteringData& sd, const RVec& xs, const core::FOptions& opt = {}) {
  core::KernelF F(sd, opt);
  RVec out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = F(xs[i]);
  return out;
}

struct MarchenkoOptions {
  double z_tol = 1e-10;       // F truncation: |F| < z_tol * max|F| beyond Z_cut
  double z_max = 40.0;        // largest argument of F ever considered
  double dz = 0.005;          // sampling step of F for interpolation
  int interp_order = 7;
  int gl_nodes = 16;          // Gauss-Legendre nodes per panel
  double panel = 2.0;         // panel length
  int row_stride = 10;        // store A(x_i, .) for every row_stride-th x (0: diagonal only)
  double cond_cap = 1e12;
};

// F sampled on the uniform grid z_m = m dz, m = 0..M, with the truncation point Z_cut.
struct FSamples {
  double dz = 0.0;
  RVec values;
  double z_cut = 0.0;
  double at(double z, int order = 7) const {
    if (z > z_cut || z < 0) return 0.0;
    return UniformInterpolator{0.0, dz, values, order}(z);
  }
};

inline double truncation_point(const RVec& zs, const RVec& Fz, double tol) {
  double mx = max_abs(Fz);
  if (mx == 0.0) return 0.0;
  for (std::size_t i = zs.size(); i-- > 0;)
    if (std::abs(Fz[i]) >= tol * mx) return std::min(zs.back(), zs[std::min(i + 1, zs.size() - 1)]);
  return 0.0;
}

// Sample F from scattering data, locating Z_cut on a coarse pass first.
inline FSamples sample_F(const std::function<double(double)>& F, const MarchenkoOptions& opt = {}) {
  RVec zc = uniform_grid(opt.z_max, 0.25), Fc(zc.size());
  for (std::size_t i = 0; i < zc.size(); ++i) Fc[i] = F(zc[i]);
  FSamples s;
  s.dz = opt.dz;
  double zcut = truncation_point(zc, Fc, opt.z_tol);
  s.z_cut = zcut;
  const std::size_t m = static_cast<std::size_t>(std::ceil(zcut / opt.dz)) + 8;
  s.values.resize(m + 1);
  for (std::size_t i = 0; i <= m; ++i) s.values[i] = F(static_cast<double>(i) * opt.dz);
  return s;
}

inline FSamples sample_F(const ScatteringData& sd, const MarchenkoOptions& opt = {}, const core::FOptions& fo = {}) {
  core::KernelF F(sd, fo);
  return sample_F([&](double z) { return F(z); }, opt);
}

// Nystrom solution of A(x, x+t) + F(2x+t) + int_0^inf A(x, x+s) F(2x+s+t) ds = 0 for one x.
class MarchenkoSolver {
 public:
  MarchenkoSolver(FSamples F, MarchenkoOptions opt = {}) : F_(std::move(F)), opt_(opt) {
    gauss_legendre(opt_.gl_nodes, gl_x_, gl_w_);
    bary_.resize(gl_x_.size());
    for (std::size_t g = 0; g < gl_x_.size(); ++g)
      bary_[g] = ((g & 1) ? -1.0 : 1.0) * std::sqrt((1 - gl_x_[g] * gl_x_[g]) * gl_w_[g]);
  }

  struct Solution {
    double x = 0.0;
    RVec s, w, a;  // quadrature nodes in t = y - x, weights, A(x, x + s)
    double panel = 0.0;
    int panels = 0;
    double rcond = 1.0;
  };

  Solution solve(double x) const {
    Solution sol;
    sol.x = x;
    const double L = F_.z_cut - 2 * x;
    if (L <= 0) return sol;
    const int np = std::max(1, static_cast<int>(std::ceil(L / opt_.panel)));
    const double hp = L / np;
    const auto ng = static_cast<Eigen::Index>(gl_x_.size());
    sol.panel = hp;
    sol.panels = np;
    for (int p = 0; p < np; ++p)
      for (Eigen::Index g = 0; g < ng; ++g) {
        sol.s.push_back(hp * (p + 0.5 * (gl_x_[static_cast<std::size_t>(g)] + 1)));
        sol.w.push_back(0.5 * hp * gl_w_[static_cast<std::size_t>(g)]);
      }
    const auto n = static_cast<Eigen::Index>(sol.s.size());
    // F(2x + s_i + s_j) only depends on the panel sum and the node pair
    std::vector<Eigen::MatrixXd> table(static_cast<std::size_t>(2 * np - 1), Eigen::MatrixXd(ng, ng));
    for (int P = 0; P < 2 * np - 1; ++P)
      for (Eigen::Index g = 0; g < ng; ++g)
        for (Eigen::Index h = g; h < ng; ++h) {
          const double u = 0.5 * (gl_x_[static_cast<std::size_t>(g)] + gl_x_[static_cast<std::size_t>(h)]) + 1;
          const double v = Fat(2 * x + hp * (P + u));
          table[static_cast<std::size_t>(P)](g, h) = v;
          table[static_cast<std::size_t>(P)](h, g) = v;
        }
    // symmetric form in b_p = sqrt(w_p) a_p
    Eigen::VectorXd sw(n), rhs(n);
    for (Eigen::Index i = 0; i < n; ++i) sw(i) = std::sqrt(sol.w[static_cast<std::size_t>(i)]);
    Eigen::MatrixXd M(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      rhs(j) = -sw(j) * Fat(2 * x + sol.s[static_cast<std::size_t>(j)]);
      for (Eigen::Index i = j; i < n; ++i)
        M(i, j) = (i == j ? 1.0 : 0.0) + sw(i) * sw(j) * table[static_cast<std::size_t>(i / ng + j / ng)](i % ng, j % ng);
    }
    Eigen::LDLT<Eigen::MatrixXd, Eigen::Lower> ldlt(M);
    sol.rcond = ldlt.info() == Eigen::Success ? ldlt.rcond() : 0.0;
    if (!(sol.rcond * opt_.cond_cap > 1.0))
      fail(ErrorKind::SingularOperator, "Marchenko system singular at x = " + std::to_string(x));
    Eigen::VectorXd b = ldlt.solve(rhs);
    sol.a.resize(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) sol.a[static_cast<std::size_t>(i)] = b(i) / sw(i);
    return sol;
  }

  // Same system by fixed-point iteration a <- -F - F^ a; only valid while the operator norm is below 1.
  Solution solve_iterative(double x, double tol = 1e-12, int max_iter = 200) const {
    Solution sol;
    sol.x = x;
    const double L = F_.z_cut - 2 * x;
    if (L <= 0) return sol;
    const int np = std::max(1, static_cast<int>(std::ceil(L / opt_.panel)));
    const double hp = L / np;
    sol.panel = hp;
    sol.panels = np;
    for (int p = 0; p < np; ++p)
      for (std::size_t g = 0; g < gl_x_.size(); ++g) {
        sol.s.push_back(hp * (p + 0.5 * (gl_x_[g] + 1)));
        sol.w.push_back(0.5 * hp * gl_w_[g]);
      }
    const std::size_t n = sol.s.size();
    Eigen::MatrixXd Fm(n, n);
    Eigen::VectorXd f(n);
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      f(static_cast<Eigen::Index>(i)) = Fat(2 * x + sol.s[i]);
      double row = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double v = sol.w[j] * Fat(2 * x + sol.s[i] + sol.s[j]);
        Fm(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
        row += std::abs(v);
      }
      norm = std::max(norm, row);
    }
    if (norm >= 1.0)
      fail(ErrorKind::ContractionFailed, "Marchenko operator norm " + std::to_string(norm) + " at x = " + std::to_string(x));
    Eigen::VectorXd a = -f;
    for (int it = 0; it < max_iter; ++it) {
      Eigen::VectorXd next = -f - Fm * a;
      const double d = (next - a).lpNorm<Eigen::Infinity>();
      a = next;
      if (d < tol) break;
    }
    sol.a.assign(a.data(), a.data() + n);
    return sol;
  }

  // A(x, x + t) from a solved system, by the Nystrom formula.
  double value(const Solution& sol, double t) const {
    double v = -Fat(2 * sol.x + t);
    for (std::size_t q = 0; q < sol.s.size(); ++q) v -= sol.w[q] * sol.a[q] * Fat(2 * sol.x + sol.s[q] + t);
    return v;
  }

  // A(x, x + t) by polynomial interpolation of the node values within each panel.
  double interpolate(const Solution& sol, double t) const {
    if (sol.s.empty() || t >= sol.panel * sol.panels) return 0.0;
    const std::size_t ng = gl_x_.size();
    const int p = std::clamp(static_cast<int>(std::floor(t / sol.panel)), 0, sol.panels - 1);
    const double u = 2 * (t / sol.panel - p) - 1;
    double num = 0.0, den = 0.0;
    for (std::size_t g = 0; g < ng; ++g) {
      const double d = u - gl_x_[g];
      const double av = sol.a[static_cast<std::size_t>(p) * ng + g];
      if (std::abs(d) < 1e-15) return av;
      const double w = bary_[g] / d;
      num += w * av;
      den += w;
    }
    return num / den;
  }

  double diagonal(double x) const { return value(solve(x), 0.0); }

  const FSamples& F() const { return F_; }
  const MarchenkoOptions& options() const { return opt_; }

 private:
  double Fat(double z) const { return F_.at(z, opt_.interp_order); }

  FSamples F_;
  MarchenkoOptions opt_;
  RVec gl_x_, gl_w_, bary_;
};

// Kernel on a uniform x-grid: the diagonal everywhere, full rows at the stored stride with dy = dx.
inline TransformationKernel solve_marchenko(const FSamples& F, const RVec& xs, const MarchenkoOptions& opt = {}) {
  require_grid(xs, "x-grid", 2);
  MarchenkoSolver solver(F, opt);
  TransformationKernel K;
  K.kind = KernelKind::MarchenkoA;
  K.xs = xs;
  K.dy = xs[1] - xs[0];
  K.values.resize(xs.size());
  K.diagonal.resize(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    auto sol = solver.solve(xs[i]);
    K.diagonal[i] = solver.value(sol, 0.0);
    if (opt.row_stride > 0 && i % static_cast<std::size_t>(opt.row_stride) == 0) {
      const double L = F.z_cut - 2 * xs[i];
      const std::size_t m = L > 0 ? static_cast<std::size_t>(std::floor(L / K.dy)) + 1 : 1;
      RVec& row = K.values[i];
      row.resize(m);
      row[0] = K.diagonal[i];
      for (std::size_t j = 1; j < m; ++j) row[j] = solver.interpolate(sol, static_cast<double>(j) * K.dy);
    }
  }
  return K;
}

// q(x) = -2 d/dx A(x,x).
inline PotentialGrid q_from_A(const TransformationKernel& A) {
  require_grid(A.xs, "x-grid", 2);
  if (!is_uniform(A.xs)) fail(ErrorKind::MalformedGrid, "q_from_A needs a uniform grid");
  PotentialGrid q;
  q.xs = A.xs;
  q.qs = diff4(A.diagonal, A.xs[1] - A.xs[0]);
  for (auto& v : q.qs) v *= -2.0;
  q.decay_class = DecayClass::L11;
  return q;
}

struct InversionResult {
  FSamples F;
  TransformationKernel A;
  PotentialGrid q;
};

inline InversionResult invert_detailed(const ScatteringData& sd, double X, double dx, MarchenkoOptions opt = {},
                                       const core::FOptions& fo = {}) {
  InversionResult r;
  r.F = sample_F(sd, opt, fo);
  r.A = solve_marchenko(r.F, uniform_grid(X, dx), opt);
  r.q = q_from_A(r.A);
  return r;
}

inline PotentialGrid invert(const ScatteringData& sd, double X, double dx = 1e-2, MarchenkoOptions opt = {}) {
  opt.row_stride = 0;
  return invert_detailed(sd, X, dx, opt).q;
}

struct FFromAOptions {
  double norm_limit = 0.9;  // accept a row x0 as contraction base when int |A(x0, x0+t)| dt < norm_limit
  double tol = 1e-13;
  int max_iter = 500;
};

struct FFromAResult {
  double dz = 0.0;
  RVec values;  // F(m dz)
  double x0 = 0.0;
  double contraction_norm = 0.0;
  int iterations = 0;
};

// Recover F on [0, Z] from stored rows of A: contraction on z >= 2 x0, then the Volterra equation
// of the x = 0 row for z < 2 x0.
inline FFromAResult F_from_A(const TransformationKernel& A, const FFromAOptions& opt = {}) {
  if (A.kind != KernelKind::MarchenkoA) fail(ErrorKind::ConfigError, "F_from_A needs a Marchenko kernel");
  if (A.values.empty() || A.values[0].empty()) fail(ErrorKind::ConfigError, "row x = 0 of A is required");
  const double dy = A.dy;
  const std::size_t step0 = static_cast<std::size_t>(std::llround(A.xs[0] / dy));
  if (step0 != 0) fail(ErrorKind::ConfigError, "the x-grid must start at 0");
  const double dx = A.xs[1] - A.xs[0];
  const std::size_t xstride = static_cast<std::size_t>(std::llround(dx / dy));
  FFromAResult res;
  res.dz = dy;
  const RVec& row0 = A.values[0];
  const std::size_t M = row0.size();  // F on z = m dy, m < M
  res.values.assign(M, 0.0);

  // choose the contraction row
  std::size_t i0 = A.xs.size();
  double norm = 0.0;
  for (std::size_t i = 1; i < A.xs.size(); ++i) {
    if (A.values[i].size() < 3) continue;
    RVec w = simpson_weights(uniform_grid(dy * static_cast<double>(A.values[i].size() - 1), dy));
    double nrm = 0.0;
    for (std::size_t j = 0; j < A.values[i].size(); ++j) nrm += w[j] * std::abs(A.values[i][j]);
    if (nrm < opt.norm_limit) {
      i0 = i;
      norm = nrm;
      break;
    }
  }
  if (i0 == A.xs.size()) fail(ErrorKind::ContractionFailed, "no stored row of A gives a contraction");
  res.x0 = A.xs[i0];
  res.contraction_norm = norm;
  const RVec& row = A.values[i0];
  const std::size_t m0 = i0 * xstride * 2;  // index of z = 2 x0
  // F(z) + int_z^inf A(x0, x0 + v - z) F(v) dv = -A(x0, z - x0), z = (m0 + m) dy
  const std::size_t Mz = M > m0 ? M - m0 : 0;
  RVec Fz(Mz, 0.0), Fn(Mz);
  const std::size_t R = row.size();
  for (res.iterations = 0; res.iterations < opt.max_iter; ++res.iterations) {
    double diff = 0.0;
    for (std::size_t m = 0; m < Mz; ++m) {
      const std::size_t len = std::min(R, Mz - m);
      double acc = 0.0;
      if (len >= 2) {
        RVec w = simpson_weights(uniform_grid(dy * static_cast<double>(len - 1), dy));
        for (std::size_t l = 0; l < len; ++l) acc += w[l] * row[l] * Fz[m + l];
      }
      const double rhs = m < R ? -row[m] : 0.0;
      Fn[m] = rhs - acc;
      diff = std::max(diff, std::abs(Fn[m] - Fz[m]));
    }
    Fz.swap(Fn);
    if (diff < opt.tol) break;
  }
  if (res.iterations >= opt.max_iter) fail(ErrorKind::ContractionFailed, "contraction did not converge");
  for (std::size_t m = 0; m < Mz; ++m) res.values[m0 + m] = Fz[m];

  // backward Volterra on the x = 0 row: F(y) + int_0^inf A(0,s) F(s+y) ds = -A(0,y)
  for (std::size_t m = std::min(m0, M); m-- > 0;) {
    const std::size_t len = std::min(R == 0 ? 0 : row0.size(), M - m);
    RVec w = len >= 2 ? simpson_weights(uniform_grid(dy * static_cast<double>(len - 1), dy)) : RVec(len, 0.0);
    double acc = 0.0;
    for (std::size_t l = 1; l < len; ++l) acc += w[l] * row0[l] * res.values[m + l];
    res.values[m] = (-row0[m] - acc) / (1.0 + w[0] * row0[0]);
  }
  return res;
}

struct ResidualReport {
  RVec ys;
  RVec residual;
  double max_negative = 0.0;  // max over y < 0
  double max_positive = 0.0;  // max over y > 0
};

// F(y) + A(y) + int_0^inf A(t) F(t+y) dt - A(-y), with A(y) = 0 for y < 0, on y in [-Y, Y].
// F is needed at negative arguments too. It jumps at 0, so for y < 0 the integral is split at t = -y
// (dt is adjusted to divide dy).
inline ResidualReport marchenko_type_residual(const std::function<double(double)>& A0,
                                              const std::function<double(double)>& F, double Y, double dy,
                                              double T, double dt = 0.005) {
  ResidualReport rep;
  const long per = std::max(1L, static_cast<long>(std::llround(dy / dt)));
  dt = dy / static_cast<double>(per);
  const long nt = static_cast<long>(std::ceil(T / dt));
  RVec At(static_cast<std::size_t>(nt + 1));
  for (long i = 0; i <= nt; ++i) At[static_cast<std::size_t>(i)] = A0(static_cast<double>(i) * dt);
  auto Aext = [&](double y) { return y < 0 ? 0.0 : A0(y); };
  constexpr double eps = 1e-12;
  // Simpson over t in [t_a, t_b] (grid indices), F evaluated with one-sided limits at the ends
  auto piece = [&](long ia, long ib, double y) {
    if (ib <= ia) return 0.0;
    RVec w = simpson_weights(uniform_grid(static_cast<double>(ib - ia) * dt, dt));
    double acc = 0.0;
    for (long i = ia; i <= ib; ++i) {
      double z = static_cast<double>(i) * dt + y;
      if (i == ia) z += eps;
      if (i == ib) z -= eps;
      acc += w[static_cast<std::size_t>(i - ia)] * At[static_cast<std::size_t>(i)] * F(z);
    }
    return acc;
  };
  const long n = static_cast<long>(std::llround(Y / dy));
  for (long j = -n; j <= n; ++j) {
    if (j == 0) continue;  // F and A are one-sided limits at 0
    const double y = static_cast<double>(j) * dy;
    const long split = j < 0 ? std::min(-j * per, nt) : 0;
    double acc = piece(0, split, y) + piece(split, nt, y);
    const double r = F(y) + Aext(y) + acc - Aext(-y);
    rep.ys.push_back(y);
    rep.residual.push_back(r);
    if (y < 0)
      rep.max_negative = std::max(rep.max_negative, std::abs(r));
    else
      rep.max_positive = std::max(rep.max_positive, std::abs(r));
  }
  return rep;
}

struct EstimateReport {
  double c_F = 0.0;     // sup |F(2x)| / sigma(x)
  double c_FA = 0.0;    // sup |F(2x) + A(x,x)| / sigma(x)
  double c_Fp = 0.0;    // sup |F'(2x) - q(x)/4| / sigma(x)^2
  double x_max = 0.0;   // largest x included
};

// Ratios behind the small-sigma estimates, sigma(x) = int_x^X |q|. Only x <= x_fraction * X is used so
// that the part of sigma beyond X stays negligible; the sigma^2 ratio also stops once sigma falls below
// sigma2_floor * sigma(0), where the error of the sampled q dominates.
inline EstimateReport estimate_suite(const FSamples& F, const TransformationKernel& A, const PotentialGrid& q,
                                     double x_fraction = 0.5, double sigma2_floor = 1e-3) {
  EstimateReport rep;
  const std::size_t n = q.xs.size();
  RVec absq(n);
  for (std::size_t i = 0; i < n; ++i) absq[i] = std::abs(q.qs[i]);
  RVec cum = cumint4(q.xs, absq);
  RVec dF = diff4(F.values, F.dz);
  FSamples dFs{F.dz, dF, F.z_cut};
  for (std::size_t i = 0; i < n && i < A.diagonal.size(); ++i) {
    const double sigma = cum.back() - cum[i];
    const double x = q.xs[i];
    if (x > x_fraction * q.xs.back() || sigma <= 0.0) break;
    const double F2 = F.at(2 * x);
    rep.c_F = std::max(rep.c_F, std::abs(F2) / sigma);
    rep.c_FA = std::max(rep.c_FA, std::abs(F2 + A.diagonal[i]) / sigma);
    if (sigma >= sigma2_floor * (cum.back() - cum.front()))
      rep.c_Fp = std::max(rep.c_Fp, std::abs(dFs.at(2 * x) - q.qs[i] / 4) / (sigma * sigma));
    rep.x_max = x;
  }
  return rep;
}

}  // namespace invscat::marchenko
