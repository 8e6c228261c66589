#pragma once

// Direct problem: Jost and regular solutions of -y'' + q y = k^2 y on the half-line, bound states,
// scattering data, phase shift, spectral function and I-function.

#include <algorithm>
#include <cmath>
#include <vector>

#include "errors.hpp"
#include "numerics.hpp"
#include "types.hpp"

namespace invscat::forward {

struct ForwardOptions {
  bool richardson = true;        // one extrapolation step on the x = 0 boundary values
  double tail_tol = 1e-5;        // |q(X)| / max|q| above this raises NoDecay
  double resonance_tol = 1e-3;   // |f(0)| < tol * max|f| flags a zero-energy resonance
  double fdot_rel_step = 1e-5;   // centered-difference step for d/dkappa f(i kappa), relative to k_j
  double nonsimple_tol = 1e-10;
  int kappa_scan = 400;
};

namespace detail {

// Step coefficients of the backward march for m(x) = f(x,k) e^{-ikx}:
//   E = e^{2ikh}, Dh = D(h), w0 = int_0^h D(u)(1-u/h) du, w1 = int_0^h D(u) u/h du,
// with D(u) = (e^{2iku} - 1)/(2ik).
struct JostStep {
  cplx E, Dh, w0, w1;
};

inline JostStep jost_step(cplx k, double h) {
  const cplx z = 2.0 * kI * k;
  const cplx zh = z * h;
  JostStep s;
  s.E = std::exp(zh);
  cplx I0, I1;
  if (std::abs(zh) < 0.5) {
    // int_0^h D(u) u^p du = sum_{n>=1} z^{n-1} h^{n+p+1} / (n! (n+p+1))
    cplx zp = 1.0;
    double fact = 1.0;
    s.Dh = I0 = I1 = 0.0;
    double hn = h;
    for (int n = 1; n < 30; ++n) {
      fact *= n;
      cplx t = zp * hn / fact;  // z^{n-1} h^n / n!
      s.Dh += t;
      I0 += t * h / double(n + 1);
      I1 += t * h * h / double(n + 2);
      if (std::abs(t) < 1e-18 * std::abs(s.Dh)) break;
      zp *= z;
      hn *= h;
    }
  } else {
    const cplx em1 = s.E - 1.0;
    s.Dh = em1 / z;
    I0 = (s.Dh - h) / z;
    I1 = (h * s.E / z - em1 / (z * z) - 0.5 * h * h) / z;
  }
  s.w1 = I1 / h;
  s.w0 = I0 - s.w1;
  return s;
}

// Boundary data of the Jost solution from a march over nodes 0, stride, 2*stride, ... of (xs, qs).
struct JostBoundary {
  cplx f0, fp0;
};

struct JostMarch {
  CVec m, R, P;  // filled only when requested
};

inline JostBoundary march_jost(const RVec& xs, const RVec& qs, cplx k, std::size_t stride, bool uniform,
                               JostMarch* out = nullptr) {
  const std::size_t n = xs.size();
  const std::size_t last = ((n - 1) / stride) * stride;
  JostStep st{};
  if (uniform) st = jost_step(k, xs[stride] - xs[0]);
  cplx m_next = 1.0, R_next = 0.0, P_next = 0.0;
  if (out) {
    const std::size_t cnt = last / stride + 1;
    out->m.assign(cnt, 1.0);
    out->R.assign(cnt, 0.0);
    out->P.assign(cnt, 0.0);
  }
  for (std::size_t i = last; i >= stride; i -= stride) {
    const std::size_t j = i - stride;
    if (!uniform) st = jost_step(k, xs[i] - xs[j]);
    const double h = xs[i] - xs[j];
    const cplx Q_next = qs[i] * m_next;
    const cplx known = st.w1 * Q_next + st.E * R_next + st.Dh * P_next;
    const cplx m = (1.0 + known) / (1.0 - st.w0 * qs[j]);
    const cplx R = m - 1.0;
    const cplx P = P_next + 0.5 * h * (qs[j] * m + Q_next);
    m_next = m;
    R_next = R;
    P_next = P;
    if (out) {
      out->m[j / stride] = m;
      out->R[j / stride] = R;
      out->P[j / stride] = P;
    }
  }
  return {m_next, kI * k * (1.0 - R_next) - P_next};
}

// Make the interval count even by appending one zero node when needed.
inline void pad_even(RVec& xs, RVec& qs) {
  if ((xs.size() - 1) % 2 == 1) {
    double h = xs[xs.size() - 1] - xs[xs.size() - 2];
    xs.push_back(xs.back() + h);
    qs.push_back(0.0);
  }
}

// Regular-solution step weights for linear Q on [0,h]:
//   a0 = (1/h) int v sin(kv)/k dv, a1 = int sin(kv)/k (1 - v/h) dv,
//   b0 = (1/h) int v cos(kv) dv,   b1 = int cos(kv) (1 - v/h) dv.
struct RegularStep {
  cplx c, s, ks;  // cos(kh), sin(kh)/k, k sin(kh)
  cplx a0, a1, b0, b1;
};

inline RegularStep regular_step(cplx k, double h) {
  RegularStep r;
  const cplx kh = k * h;
  r.c = std::cos(kh);
  cplx Isin, Ivsin, Icos, Ivcos;  // int_0^h sin(kv)/k, v sin(kv)/k, cos(kv), v cos(kv)
  if (std::abs(kh) < 1.0) {
    // sin(kv)/k = sum (-1)^n k^{2n} v^{2n+1}/(2n+1)!, cos(kv) = sum (-1)^n k^{2n} v^{2n}/(2n)!
    const cplx k2 = k * k;
    cplx kp = 1.0;
    double fodd = 1.0, feven = 1.0;
    double hp = 1.0;  // h^{2n}
    r.s = Isin = Ivsin = Icos = Ivcos = 0.0;
    for (int n = 0; n < 30; ++n) {
      if (n > 0) {
        feven = fodd * (2 * n);
        fodd = feven * (2 * n + 1);
      }
      const double sg = (n % 2 == 0) ? 1.0 : -1.0;
      const cplx ts = sg * kp / fodd;   // coefficient of v^{2n+1} in sin(kv)/k
      const cplx tc = sg * kp / feven;  // coefficient of v^{2n} in cos(kv)
      r.s += ts * hp * h;
      Isin += ts * hp * h * h / double(2 * n + 2);
      Ivsin += ts * hp * h * h * h / double(2 * n + 3);
      Icos += tc * hp * h / double(2 * n + 1);
      Ivcos += tc * hp * h * h / double(2 * n + 2);
      kp *= k2;
      hp *= h * h;
      if (std::abs(kp) * hp < 1e-20) break;
    }
    r.ks = k * k * r.s;
  } else {
    const cplx sn = std::sin(kh), cs = r.c;
    r.s = sn / k;
    r.ks = k * sn;
    Isin = (1.0 - cs) / (k * k);
    Ivsin = (sn - kh * cs) / (k * k * k);
    Icos = sn / k;
    Ivcos = (cs + kh * sn - 1.0) / (k * k);
  }
  r.a0 = Ivsin / h;
  r.a1 = Isin - r.a0;
  r.b0 = Ivcos / h;
  r.b1 = Icos - r.b0;
  return r;
}

}  // namespace detail

inline void check_decay(const PotentialGrid& q, const ForwardOptions& opt) {
  require_grid(q.xs, "potential grid", 3);
  if (q.qs.size() != q.xs.size()) fail(ErrorKind::MalformedGrid, "qs and xs differ in length");
  if (q.decay_class == DecayClass::Compact && q.support_radius && *q.support_radius <= q.xs.back() * (1 + 1e-12))
    return;
  const double scale = std::max(max_abs(q.qs), 1e-300);
  if (std::abs(q.qs.back()) > opt.tail_tol * scale)
    fail(ErrorKind::NoDecay, "q(x_max) = " + std::to_string(q.qs.back()) + " has not decayed");
}

// f(0,k) and f'(0,k) for arbitrary complex k with Im k >= 0.
class JostEvaluator {
 public:
  explicit JostEvaluator(const PotentialGrid& q, ForwardOptions opt = {}) : opt_(opt) {
    check_decay(q, opt_);
    xs_ = q.xs;
    qs_ = q.qs;
    detail::pad_even(xs_, qs_);
    uniform_ = is_uniform(xs_);
  }

  detail::JostBoundary operator()(cplx k) const {
    auto fine = detail::march_jost(xs_, qs_, k, 1, uniform_);
    if (!opt_.richardson) return fine;
    auto coarse = detail::march_jost(xs_, qs_, k, 2, uniform_);
    return {(4.0 * fine.f0 - coarse.f0) / 3.0, (4.0 * fine.fp0 - coarse.fp0) / 3.0};
  }

  cplx f(cplx k) const { return (*this)(k).f0; }
  // f(i kappa) is real for real potentials
  double f_imag_axis(double kappa) const { return f(cplx(0.0, kappa)).real(); }

  const RVec& xs() const { return xs_; }
  const RVec& qs() const { return qs_; }
  const ForwardOptions& options() const { return opt_; }

 private:
  ForwardOptions opt_;
  RVec xs_, qs_;
  bool uniform_ = true;
};

// Jost solution table f(x_i, k_m) and f'(x_i, k_m) by backward marching from x_max.
inline WaveFunctionTable jost_solution(const PotentialGrid& q, const RVec& ks, const ForwardOptions& opt = {}) {
  check_decay(q, opt);
  const bool uniform = is_uniform(q.xs);
  WaveFunctionTable t;
  t.xs = q.xs;
  t.ks = ks;
  t.kind = WaveKind::JostF;
  t.values.resize(ks.size());
  t.derivatives.resize(ks.size());
  detail::JostMarch mr;
  for (std::size_t m = 0; m < ks.size(); ++m) {
    const double k = ks[m];
    detail::march_jost(q.xs, q.qs, k, 1, uniform, &mr);
    CVec& v = t.values[m];
    CVec& d = t.derivatives[m];
    v.resize(q.xs.size());
    d.resize(q.xs.size());
    for (std::size_t i = 0; i < q.xs.size(); ++i) {
      const cplx e = std::polar(1.0, k * q.xs[i]);
      v[i] = mr.m[i] * e;
      d[i] = e * (kI * k * (1.0 - mr.R[i]) - mr.P[i]);
    }
  }
  return t;
}

// Solutions with prescribed Cauchy data at x = 0 (phi: 0,1; theta: 1,0), marched forward.
inline WaveFunctionTable regular_solution(const PotentialGrid& q, const RVec& ks,
                                          WaveKind kind = WaveKind::RegularPhi) {
  require_grid(q.xs, "potential grid", 2);
  if (kind == WaveKind::JostF) fail(ErrorKind::ConfigError, "regular_solution expects RegularPhi or Theta");
  const double y0 = kind == WaveKind::Theta ? 1.0 : 0.0;
  const double yp0 = kind == WaveKind::Theta ? 0.0 : 1.0;
  const std::size_t n = q.xs.size();
  const bool uniform = is_uniform(q.xs);
  WaveFunctionTable t;
  t.xs = q.xs;
  t.ks = ks;
  t.kind = kind;
  t.values.resize(ks.size());
  t.derivatives.resize(ks.size());
  for (std::size_t m = 0; m < ks.size(); ++m) {
    const cplx k = ks[m];
    CVec& y = t.values[m];
    CVec& yp = t.derivatives[m];
    y.assign(n, 0.0);
    yp.assign(n, 0.0);
    y[0] = y0;
    yp[0] = yp0;
    detail::RegularStep st{};
    if (uniform) st = detail::regular_step(k, q.xs[1] - q.xs[0]);
    cplx Sn = 0.0, C = 0.0;
    // the free solution c(x) y0 + s(x) yp0 is advanced by the same rotation
    cplx fr = y0, frp = yp0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (!uniform) st = detail::regular_step(k, q.xs[i + 1] - q.xs[i]);
      const cplx Qi = q.qs[i] * y[i];
      const cplx fr_n = st.c * fr + st.s * frp;
      const cplx frp_n = st.c * frp - st.ks * fr;
      const cplx Sn_known = st.c * Sn + st.s * C + st.a0 * Qi;
      const cplx C_known = st.c * C - st.ks * Sn + st.b0 * Qi;
      const cplx yn = (fr_n + Sn_known) / (1.0 - st.a1 * q.qs[i + 1]);
      const cplx Qn = q.qs[i + 1] * yn;
      Sn = Sn_known + st.a1 * Qn;
      C = C_known + st.b1 * Qn;
      fr = fr_n;
      frp = frp_n;
      y[i + 1] = yn;
      yp[i + 1] = frp + C;
    }
  }
  return t;
}

struct BoundState {
  double k = 0.0;
  double s = 0.0;      // norming constant of the Jost solution
  double c = 0.0;      // spectral weight of the regular solution
  cplx fdot = 0.0;     // df/dk at i k
  double fprime = 0.0; // f'(0, i k)
};

struct BoundStateResult {
  std::vector<BoundState> states;
  bool resonance = false;
  double f_at_zero = 1.0;
};

inline BoundStateResult bound_states(const JostEvaluator& J) {
  const ForwardOptions& opt = J.options();
  BoundStateResult res;
  res.f_at_zero = J.f_imag_axis(0.0);
  double qmin = 0.0;
  for (double v : J.qs()) qmin = std::min(qmin, v);
  double fmax = std::max(1.0, std::abs(res.f_at_zero));
  if (qmin < 0.0) {
    const double kmax = std::sqrt(-qmin) + 1.0;
    RVec scan;
    const int ng = 60;
    for (int i = 0; i < ng; ++i) scan.push_back(kmax * std::pow(10.0, -5.0 + 3.0 * i / ng));
    for (int i = 1; i <= opt.kappa_scan; ++i) {
      double v = kmax * i / opt.kappa_scan;
      if (v > scan.back()) scan.push_back(v);
    }
    RVec fv(scan.size());
    for (std::size_t i = 0; i < scan.size(); ++i) {
      fv[i] = J.f_imag_axis(scan[i]);
      fmax = std::max(fmax, std::abs(fv[i]));
    }
    for (std::size_t i = 0; i + 1 < scan.size(); ++i) {
      if ((fv[i] < 0) == (fv[i + 1] < 0)) continue;
      const double kj = bisect([&](double kap) { return J.f_imag_axis(kap); }, scan[i], scan[i + 1], 1e-14);
      const double hstep = opt.fdot_rel_step * kj;
      const double Fk = (J.f_imag_axis(kj + hstep) - J.f_imag_axis(kj - hstep)) / (2 * hstep);
      if (std::abs(Fk) < opt.nonsimple_tol)
        fail(ErrorKind::NonSimpleZero, "f'(i k) vanishes at k = " + std::to_string(kj));
      const double fp = J(cplx(0.0, kj)).fp0.real();
      BoundState b;
      b.k = kj;
      b.fdot = -kI * Fk;
      b.fprime = fp;
      b.s = 2 * kj / (fp * Fk);
      b.c = 2 * kj * fp / Fk;
      if (!(b.s > 0) || !(b.c > 0))
        fail(ErrorKind::NonSimpleZero, "non-positive norming constant at k = " + std::to_string(kj));
      res.states.push_back(b);
    }
  }
  res.resonance = std::abs(res.f_at_zero) < opt.resonance_tol * fmax;
  std::sort(res.states.begin(), res.states.end(), [](auto& a, auto& b) { return a.k < b.k; });
  return res;
}

inline BoundStateResult bound_states(const PotentialGrid& q, const ForwardOptions& opt = {}) {
  return bound_states(JostEvaluator(q, opt));
}

struct ForwardResult {
  JostData jost;
  ScatteringData scattering;
  BoundStateResult bound;
};

inline ForwardResult forward_data(const PotentialGrid& q, const RVec& ks, const ForwardOptions& opt = {}) {
  require_grid(ks, "k-grid", 2);
  JostEvaluator J(q, opt);
  ForwardResult r;
  r.bound = bound_states(J);
  JostData& jd = r.jost;
  jd.ks = ks;
  jd.f.resize(ks.size());
  jd.fprime0.resize(ks.size());
  for (std::size_t m = 0; m < ks.size(); ++m) {
    auto b = J(ks[m]);
    jd.f[m] = b.f0;
    jd.fprime0[m] = b.fp0;
  }
  jd.resonance = r.bound.resonance;
  for (const auto& b : r.bound.states) {
    jd.bound_ks.push_back(b.k);
    jd.fdot_at_bound.push_back(b.fdot);
    jd.fprime_at_bound.push_back(b.fprime);
  }
  ScatteringData& sd = r.scattering;
  sd.ks = ks;
  sd.S.resize(ks.size());
  for (std::size_t m = 0; m < ks.size(); ++m) sd.S[m] = std::conj(jd.f[m]) / jd.f[m];
  if (jd.resonance && ks.front() == 0.0) {
    jd.f[0] = 0.0;
    sd.S[0] = -1.0;
  }
  for (const auto& b : r.bound.states) {
    sd.bound_ks.push_back(b.k);
    sd.norming.push_back(b.s);
  }
  const int J2 = 2 * static_cast<int>(sd.bound_ks.size());
  sd.index = jd.resonance ? -J2 - 1 : -J2;
  return r;
}

inline ScatteringData scattering_data(const PotentialGrid& q, const RVec& ks, const ForwardOptions& opt = {}) {
  return forward_data(q, ks, opt).scattering;
}

inline JostData jost_data(const PotentialGrid& q, const RVec& ks, const ForwardOptions& opt = {}) {
  return forward_data(q, ks, opt).jost;
}

// delta(k) = arg S / 2 on a continuous branch with delta(k_max) taken as the principal value.
inline RVec phase_shift(const ScatteringData& sd) {
  require_grid(sd.ks, "k-grid", 2);
  RVec ph = unwrap_from_end(sd.S, kPi, ErrorKind::UnwrapAmbiguity);
  for (auto& v : ph) v *= 0.5;
  return ph;
}

// Density sqrt(lambda)/(pi |f(sqrt(lambda))|^2) on lambda = k^2, plus discrete points (-k_j^2, c_j).
// With a zero-energy resonance the lambda = 0 node is omitted (the density diverges there).
inline SpectralFunction spectral_function(const JostData& jd, const std::vector<DiscretePoint>& discrete) {
  require_grid(jd.ks, "k-grid", 2);
  SpectralFunction sf;
  sf.resonance = jd.resonance;
  for (std::size_t m = 0; m < jd.ks.size(); ++m) {
    const double k = jd.ks[m];
    const double a2 = std::norm(jd.f[m]);
    if (jd.resonance && k == 0.0) continue;
    if (a2 == 0.0) fail(ErrorKind::ZeroModulus, "f vanishes at k = " + std::to_string(k));
    sf.lambdas.push_back(k * k);
    sf.density.push_back(k / (kPi * a2));
  }
  sf.discrete_points = discrete;
  return sf;
}

inline SpectralFunction spectral_function(const ForwardResult& fr) {
  std::vector<DiscretePoint> d;
  for (const auto& b : fr.bound.states) d.push_back({-b.k * b.k, b.c});
  return spectral_function(fr.jost, d);
}

struct IFunctionOptions {
  double herglotz_tol = 1e-6;
};

// I(k) = f'(0,k)/f(k), residues a_j = f'(0,ik_j)/fdot(ik_j), and for a resonance a_0 = lim k I(k).
inline IFunction i_function(const JostData& jd, const IFunctionOptions& opt = {}) {
  if (jd.fprime0.size() != jd.ks.size()) fail(ErrorKind::ConfigError, "JostData lacks f'(0,k) samples");
  IFunction ifn;
  ifn.resonance = jd.resonance;
  for (std::size_t m = 0; m < jd.ks.size(); ++m) {
    const double k = jd.ks[m];
    if (jd.resonance && k == 0.0) continue;
    const cplx I = jd.fprime0[m] / jd.f[m];
    const double dev = std::abs(I.imag() * std::norm(jd.f[m]) - k);
    if (k > 0 && (I.imag() <= 0 || dev > opt.herglotz_tol * (1 + k)))
      fail(ErrorKind::NonHerglotz, "Im I(k)|f|^2 != k at k = " + std::to_string(k));
    ifn.ks.push_back(k);
    ifn.I.push_back(I);
  }
  ifn.poles = jd.bound_ks;
  for (std::size_t j = 0; j < jd.bound_ks.size(); ++j)
    ifn.residues.push_back(jd.fprime_at_bound[j] / jd.fdot_at_bound[j]);
  if (jd.resonance && ifn.ks.size() >= 3) {
    // quadratic extrapolation of k I(k) to k = 0
    const double k0 = ifn.ks[0], k1 = ifn.ks[1], k2 = ifn.ks[2];
    const cplx g0 = k0 * ifn.I[0], g1 = k1 * ifn.I[1], g2 = k2 * ifn.I[2];
    const double L0 = k1 * k2 / ((k0 - k1) * (k0 - k2));
    const double L1 = k0 * k2 / ((k1 - k0) * (k1 - k2));
    const double L2 = k0 * k1 / ((k2 - k0) * (k2 - k1));
    ifn.a0 = L0 * g0 + L1 * g1 + L2 * g2;
  }
  return ifn;
}

// Wronskian residual |f'(0,k) f(-k) - f'(0,-k) f(k) - 2ik| / (1+|k|), maximised over the grid.
inline double wronskian_residual(const JostData& jd) {
  double r = 0.0;
  for (std::size_t m = 0; m < jd.ks.size(); ++m) {
    const double k = jd.ks[m];
    const cplx w = jd.fprime0[m] * std::conj(jd.f[m]) - std::conj(jd.fprime0[m]) * jd.f[m] - 2.0 * kI * k;
    r = std::max(r, std::abs(w) / (1 + std::abs(k)));
  }
  return r;
}

}  // namespace invscat::forward
