#pragma once

// Scalar Riemann problems on the real axis: recovering the Jost function from S, from |f|, from the
// spectral density, or from the I-function, through the Hilbert-transform pair of log f0 where
// f0 has no zeros in the upper half-plane.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "errors.hpp"
#include "numerics.hpp"
#include "types.hpp"

namespace invscat::riemann {

struct FactorizationOptions {
  double kappa = 1.0;                 // auxiliary factor k/(k + i kappa) in the resonance case
  double tail_fraction = 0.25;        // model fit window [tail_fraction*K, K]
  double branch_guard = 0.75 * kPi;   // largest accepted phase step between nodes
  double index_guard = 0.5;           // |arg f0(0)| above this signals an inconsistent index
};

// w(k) = prod (k - i k_j)/(k + i k_j), times k/(k + i kappa) when kappa is given.
inline cplx blaschke(cplx k, const RVec& bound_ks, std::optional<double> kappa = std::nullopt) {
  cplx w = 1.0;
  for (double kj : bound_ks) w *= (k - kI * kj) / (k + kI * kj);
  if (kappa) w *= k / (k + kI * *kappa);
  return w;
}

inline void check_kappa(const RVec& bound_ks, std::optional<double> kappa) {
  if (!kappa) return;
  if (!(*kappa > 0)) fail(ErrorKind::ConfigError, "kappa must be positive");
  for (double kj : bound_ks)
    if (std::abs(kj - *kappa) <= 1e-12 * std::max(1.0, kj))
      fail(ErrorKind::KappaCollision, "kappa coincides with bound state k = " + std::to_string(kj));
}

inline CVec blaschke_product(const RVec& ks, const RVec& bound_ks, std::optional<double> kappa = std::nullopt) {
  check_kappa(bound_ks, kappa);
  CVec w(ks.size());
  for (std::size_t i = 0; i < ks.size(); ++i) w[i] = blaschke(ks[i], bound_ks, kappa);
  return w;
}

// d/dk w at k = i k_j.
inline cplx blaschke_derivative_at_zero(const RVec& bound_ks, std::size_t j, std::optional<double> kappa) {
  const double kj = bound_ks[j];
  double prod = 1.0;
  for (std::size_t l = 0; l < bound_ks.size(); ++l)
    if (l != j) prod *= (kj - bound_ks[l]) / (kj + bound_ks[l]);
  if (kappa) prod *= kj / (kj + *kappa);
  return prod / (2.0 * kI * kj);
}

// log f0 = u + i theta with f0 analytic and zero-free in C+, f0(inf) = 1, f0(-k) = conj f0(k).
// The large-k behaviour is carried by an analytic model sum_c a_c i/(k + i c), c in {1, 2}; the
// remainder is sampled on [0, K] and transformed by principal-value quadrature.
class HalfPlaneLog {
 public:
  enum class Known { Phase, LogModulus };

  HalfPlaneLog(RVec ks, RVec values, Known known, double tail_fraction)
      : ks_(std::move(ks)), known_(known) {
    require_grid(ks_, "factorization grid", 5);
    if (ks_.front() != 0.0) fail(ErrorKind::MalformedGrid, "factorization grid must start at k = 0");
    const double K = ks_.back();
    // fit the model on the tail window; multiply through by the leading power for conditioning
    RVec tt, yy;
    for (std::size_t i = 0; i < ks_.size(); ++i)
      if (ks_[i] >= tail_fraction * K) {
        tt.push_back(ks_[i]);
        yy.push_back(known == Known::Phase ? values[i] * ks_[i] : values[i] * ks_[i] * ks_[i]);
      }
    std::vector<std::function<double(double)>> basis;
    for (double c : cs_) {
      if (known == Known::Phase)
        basis.push_back([c](double t) { return t * t / (t * t + c * c); });
      else
        basis.push_back([c](double t) { return c * t * t / (t * t + c * c); });
    }
    coef_ = tt.size() >= 2 ? lsq_fit(tt, yy, basis) : RVec(cs_.size(), 0.0);
    resid_.resize(ks_.size());
    for (std::size_t i = 0; i < ks_.size(); ++i) resid_[i] = values[i] - model_known(ks_[i]);
    wts_ = simpson_weights(ks_);
    dres_ = diff3(ks_, resid_);
    if (known == Known::Phase && ks_.size() >= 3) {
      // odd remainder: r ~ a t + b t^3 near 0
      const double t1 = ks_[1], t2 = ks_[2];
      const double r1 = resid_[1] / t1, r2 = resid_[2] / t2;
      dres_[0] = (r1 * t2 * t2 - r2 * t1 * t1) / (t2 * t2 - t1 * t1);
    } else {
      dres_[0] = 0.0;
    }
    values_ = std::move(values);
  }

  // The conjugate component on the grid nodes. The remainder r is extended to the whole line by
  // parity (odd for the phase, even for the log-modulus) and PV int_{-K}^{K} r(t)/(t-k) dt is
  // split as int (r(t)-r(k))/(t-k) + r(k) log((K-k)/(K+k)), which keeps the integrand smooth near 0.
  RVec conjugate() const {
    const std::size_t n = ks_.size();
    const double K = ks_.back();
    const double p = known_ == Known::Phase ? -1.0 : 1.0;
    RVec out(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double k = ks_[i];
      const double rk = resid_[i];
      double pv = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double t = ks_[j];
        const double gm = (j == i) ? dres_[i] : (resid_[j] - rk) / (t - k);
        const double gp = (t + k == 0.0) ? (p < 0 ? dres_[0] : 0.0) : (p * resid_[j] - rk) / (-t - k);
        pv += wts_[j] * (gm + gp);
      }
      if (i + 1 < n) pv += rk * std::log((K - k) / (K + k));
      out[i] = (known_ == Known::Phase ? pv : -pv) / kPi + model_conjugate(k);
    }
    return out;
  }

  // log f0(i kappa), real.
  double at_imaginary(double kappa) const {
    double acc = 0.0;
    for (std::size_t j = 0; j < ks_.size(); ++j) {
      const double t = ks_[j];
      const double ker = known_ == Known::Phase ? 2 * t / (t * t + kappa * kappa) : 2 * kappa / (t * t + kappa * kappa);
      acc += wts_[j] * ker * resid_[j];
    }
    acc /= kPi;
    for (std::size_t c = 0; c < cs_.size(); ++c) acc += coef_[c] / (kappa + cs_[c]);
    return acc;
  }

  // log f0 on the grid nodes.
  CVec log_f0() const {
    RVec conj = conjugate();
    CVec out(ks_.size());
    for (std::size_t i = 0; i < ks_.size(); ++i)
      out[i] = known_ == Known::Phase ? cplx(conj[i], values_[i]) : cplx(values_[i], conj[i]);
    return out;
  }

  const RVec& ks() const { return ks_; }
  const RVec& model_coefficients() const { return coef_; }

 private:
  double model_known(double t) const {
    double s = 0.0;
    for (std::size_t c = 0; c < cs_.size(); ++c) {
      const double cc = cs_[c];
      s += coef_[c] * (known_ == Known::Phase ? t : cc) / (t * t + cc * cc);
    }
    return s;
  }
  double model_conjugate(double t) const {
    double s = 0.0;
    for (std::size_t c = 0; c < cs_.size(); ++c) {
      const double cc = cs_[c];
      s += coef_[c] * (known_ == Known::Phase ? cc : t) / (t * t + cc * cc);
    }
    return s;
  }

  RVec ks_;
  Known known_;
  RVec cs_{1.0, 2.0};
  RVec coef_, resid_, wts_, dres_, values_;
};

namespace detail {

// Grid with k = 0 prepended when missing; `added` records whether that happened.
inline RVec with_origin(const RVec& ks, bool& added) {
  added = ks.front() > 0.0;
  if (!added) return ks;
  RVec out{0.0};
  out.insert(out.end(), ks.begin(), ks.end());
  return out;
}

template <class T>
std::vector<T> drop_front_if(std::vector<T> v, bool drop) {
  if (drop) v.erase(v.begin());
  return v;
}

inline void fill_bound(JostData& jd, const HalfPlaneLog& lf, const RVec& bound_ks, std::optional<double> kappa) {
  jd.bound_ks = bound_ks;
  for (std::size_t j = 0; j < bound_ks.size(); ++j) {
    const double f0 = std::exp(lf.at_imaginary(bound_ks[j]));
    jd.fdot_at_bound.push_back(f0 * blaschke_derivative_at_zero(bound_ks, j, kappa));
  }
}

}  // namespace detail

// f from S: theta = arg f0 = -arg(S w0^2)/2 with the phase unwrapped from k_max, then the Hilbert
// transform gives log|f0|, and f = f0 w0.
inline JostData jost_from_S(const ScatteringData& sd, const FactorizationOptions& opt = {}) {
  require_grid(sd.ks, "scattering k-grid", 5);
  if (sd.S.size() != sd.ks.size()) fail(ErrorKind::MalformedGrid, "S and ks differ in length");
  const int J = static_cast<int>(sd.J());
  if (sd.index != -2 * J && sd.index != -2 * J - 1)
    fail(ErrorKind::IndexMismatch, "index " + std::to_string(sd.index) + " inconsistent with J = " + std::to_string(J));
  const bool odd = sd.resonance();
  std::optional<double> kappa;
  if (odd) kappa = opt.kappa;
  check_kappa(sd.bound_ks, kappa);

  bool added = false;
  RVec ks = detail::with_origin(sd.ks, added);
  CVec g(ks.size());
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const double k = ks[i];
    cplx S = (added && i == 0) ? cplx(odd ? -1.0 : 1.0) : sd.S[added ? i - 1 : i];
    cplx w = blaschke(k, sd.bound_ks);
    g[i] = S * w * w;
    if (odd) g[i] *= (k - kI * opt.kappa) / (k + kI * opt.kappa);
  }
  RVec ph = unwrap_from_end(g, opt.branch_guard, ErrorKind::BranchError);
  RVec theta(ks.size());
  for (std::size_t i = 0; i < ks.size(); ++i) theta[i] = -0.5 * ph[i];
  if (std::abs(theta[0]) > opt.index_guard)
    fail(ErrorKind::IndexMismatch, "arg f0(0) = " + std::to_string(theta[0]) + "; the bound-state count does not match S");
  theta[0] = 0.0;

  HalfPlaneLog lf(ks, theta, HalfPlaneLog::Known::Phase, opt.tail_fraction);
  CVec lg = lf.log_f0();
  JostData jd;
  jd.ks = ks;
  jd.f.resize(ks.size());
  for (std::size_t i = 0; i < ks.size(); ++i) jd.f[i] = std::exp(lg[i]) * blaschke(ks[i], sd.bound_ks, kappa);
  jd.resonance = odd;
  detail::fill_bound(jd, lf, sd.bound_ks, kappa);
  jd.ks = detail::drop_front_if(jd.ks, added);
  jd.f = detail::drop_front_if(jd.f, added);
  return jd;
}

// f from |f| by the Schwarz formula: log|f0| is known, arg f0 follows by the Hilbert transform.
// With a resonance, |f0| = |f| |k + i kappa| / k is used and its value at k = 0 extrapolated.
inline JostData jost_from_modulus(const RVec& ks_in, const RVec& absf_in, const RVec& bound_ks, bool resonance = false,
                                  const FactorizationOptions& opt = {}) {
  require_grid(ks_in, "modulus k-grid", 5);
  if (absf_in.size() != ks_in.size()) fail(ErrorKind::MalformedGrid, "|f| and ks differ in length");
  std::optional<double> kappa;
  if (resonance) kappa = opt.kappa;
  check_kappa(bound_ks, kappa);
  bool added = false;
  RVec ks = detail::with_origin(ks_in, added);
  const std::size_t off = added ? 1 : 0;
  RVec u(ks.size(), 0.0);
  for (std::size_t i = 0; i < ks_in.size(); ++i) {
    const double k = ks_in[i];
    const double a = absf_in[i];
    if (resonance && k == 0.0) continue;
    if (!(a > 0.0)) fail(ErrorKind::ZeroModulus, "|f| vanishes at k = " + std::to_string(k));
    double a0 = a;
    if (resonance) a0 *= std::hypot(k, opt.kappa) / k;
    u[i + off] = std::log(a0);
  }
  if (resonance || added) {
    // log|f0| is even in k: quadratic extrapolation in k^2 from the first three positive nodes
    const double x1 = ks[1] * ks[1], x2 = ks[2] * ks[2], x3 = ks[3] * ks[3];
    const double y1 = u[1], y2 = u[2], y3 = u[3];
    u[0] = y1 * x2 * x3 / ((x1 - x2) * (x1 - x3)) + y2 * x1 * x3 / ((x2 - x1) * (x2 - x3)) +
           y3 * x1 * x2 / ((x3 - x1) * (x3 - x2));
  }
  HalfPlaneLog lf(ks, u, HalfPlaneLog::Known::LogModulus, opt.tail_fraction);
  CVec lg = lf.log_f0();
  JostData jd;
  jd.ks = ks;
  jd.f.resize(ks.size());
  for (std::size_t i = 0; i < ks.size(); ++i) jd.f[i] = std::exp(lg[i]) * blaschke(ks[i], bound_ks, kappa);
  // the modulus is data: keep it exactly and take only the phase from the factorization
  for (std::size_t i = 0; i < ks_in.size(); ++i)
    if (std::abs(jd.f[i + off]) > 0) jd.f[i + off] *= absf_in[i] / std::abs(jd.f[i + off]);
  jd.resonance = resonance;
  detail::fill_bound(jd, lf, bound_ks, kappa);
  jd.ks = detail::drop_front_if(jd.ks, added);
  jd.f = detail::drop_front_if(jd.f, added);
  return jd;
}

// S(k) = f(-k)/f(k) on the real axis; S(0) = -1 at a resonance.
inline CVec s_from_jost(const JostData& jd) {
  CVec S(jd.ks.size());
  for (std::size_t i = 0; i < S.size(); ++i) {
    if (jd.resonance && jd.ks[i] == 0.0)
      S[i] = -1.0;
    else
      S[i] = std::conj(jd.f[i]) / jd.f[i];
  }
  return S;
}

inline ScatteringData scattering_from_jost(const JostData& jd, const RVec& norming) {
  ScatteringData sd;
  sd.ks = jd.ks;
  sd.S = s_from_jost(jd);
  sd.bound_ks = jd.bound_ks;
  sd.norming = norming;
  const int J2 = 2 * static_cast<int>(jd.bound_ks.size());
  sd.index = jd.resonance ? -J2 - 1 : -J2;
  return sd;
}

// Spectral density => |f|^2 = sqrt(lambda)/(pi rho') => f => S; c_j => s_j = -4 k_j^2/(fdot^2 c_j).
inline ScatteringData s_from_spectral(const SpectralFunction& sf, const FactorizationOptions& opt = {}) {
  require_grid(sf.lambdas, "lambda grid", 5);
  RVec ks(sf.lambdas.size()), absf(sf.lambdas.size());
  for (std::size_t i = 0; i < ks.size(); ++i) {
    ks[i] = std::sqrt(sf.lambdas[i]);
    if (sf.density[i] < 0) fail(ErrorKind::ZeroModulus, "negative spectral density");
    absf[i] = ks[i] == 0.0 ? 1.0 : std::sqrt(ks[i] / (kPi * sf.density[i]));
  }
  RVec bound, weights;
  for (const auto& d : sf.discrete_points) {
    if (!(d.lambda < 0) || !(d.c > 0)) fail(ErrorKind::ConfigError, "discrete points need lambda < 0 and c > 0");
    bound.push_back(std::sqrt(-d.lambda));
    weights.push_back(d.c);
  }
  std::vector<std::size_t> order(bound.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return bound[a] < bound[b]; });
  RVec b2, w2;
  for (auto i : order) {
    b2.push_back(bound[i]);
    w2.push_back(weights[i]);
  }
  if (!sf.resonance && ks.front() == 0.0 && ks.size() > 3) {
    // |f(0)| from the density at lambda = 0 is 0/0; extrapolate in k^2
    const double x1 = ks[1] * ks[1], x2 = ks[2] * ks[2], x3 = ks[3] * ks[3];
    absf[0] = absf[1] * x2 * x3 / ((x1 - x2) * (x1 - x3)) + absf[2] * x1 * x3 / ((x2 - x1) * (x2 - x3)) +
              absf[3] * x1 * x2 / ((x3 - x1) * (x3 - x2));
  }
  JostData jd = jost_from_modulus(ks, absf, b2, sf.resonance, opt);
  RVec s;
  for (std::size_t j = 0; j < b2.size(); ++j) {
    const cplx fd = jd.fdot_at_bound[j];
    s.push_back((-4.0 * b2[j] * b2[j] / (fd * fd * w2[j])).real());
  }
  ScatteringData sd = scattering_from_jost(jd, s);
  return sd;
}

// S => f by factorisation => density sqrt(lambda)/(pi |f|^2) on lambda = k^2; s_j => c_j = -4 k_j^2/(fdot^2 s_j).
inline SpectralFunction spectral_from_scattering(const ScatteringData& sd, const FactorizationOptions& opt = {}) {
  JostData jd = jost_from_S(sd, opt);
  SpectralFunction sf;
  sf.resonance = jd.resonance;
  for (std::size_t m = 0; m < jd.ks.size(); ++m) {
    if (jd.resonance && jd.ks[m] == 0.0) continue;
    const double a2 = std::norm(jd.f[m]);
    if (!(a2 > 0)) fail(ErrorKind::ZeroModulus, "f vanishes at k = " + std::to_string(jd.ks[m]));
    sf.lambdas.push_back(jd.ks[m] * jd.ks[m]);
    sf.density.push_back(jd.ks[m] / (kPi * a2));
  }
  for (std::size_t j = 0; j < sd.J(); ++j) {
    const cplx fd = jd.fdot_at_bound[j];
    const double kj = sd.bound_ks[j];
    sf.discrete_points.push_back({-kj * kj, (-4.0 * kj * kj / (fd * fd * sd.norming[j])).real()});
  }
  return sf;
}

// I(k) => |f|^2 = k / Im I(k) => f => S; s_j = -2 i k_j / (a_j fdot^2).
inline ScatteringData scattering_from_ifunction(const IFunction& ifn, const FactorizationOptions& opt = {}) {
  require_grid(ifn.ks, "I-function grid", 5);
  RVec ks = ifn.ks, absf(ks.size());
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const double k = ks[i];
    const double im = ifn.I[i].imag();
    if (k > 0 && !(im > 0)) fail(ErrorKind::NonHerglotz, "Im I <= 0 at k = " + std::to_string(k));
    absf[i] = k == 0.0 ? 1.0 : std::sqrt(k / im);
  }
  if (!ifn.resonance && ks.front() == 0.0) {
    const double x1 = ks[1] * ks[1], x2 = ks[2] * ks[2], x3 = ks[3] * ks[3];
    absf[0] = absf[1] * x2 * x3 / ((x1 - x2) * (x1 - x3)) + absf[2] * x1 * x3 / ((x2 - x1) * (x2 - x3)) +
              absf[3] * x1 * x2 / ((x3 - x1) * (x3 - x2));
  }
  if (ifn.resonance && ks.front() == 0.0) {
    ks.erase(ks.begin());
    absf.erase(absf.begin());
  }
  JostData jd = jost_from_modulus(ks, absf, ifn.poles, ifn.resonance, opt);
  if (ifn.resonance) {
    jd.ks.insert(jd.ks.begin(), 0.0);
    jd.f.insert(jd.f.begin(), 0.0);
  }
  RVec s;
  for (std::size_t j = 0; j < ifn.poles.size(); ++j) {
    const cplx fd = jd.fdot_at_bound[j];
    s.push_back((-2.0 * kI * ifn.poles[j] / (ifn.residues[j] * fd * fd)).real());
  }
  return scattering_from_jost(jd, s);
}

// max |f(k) - S(-k) f(-k)| / max|f| over the grid.
inline double jump_residual(const JostData& jd, const CVec& S) {
  double r = 0.0, m = 0.0;
  for (std::size_t i = 0; i < jd.ks.size(); ++i) {
    r = std::max(r, std::abs(jd.f[i] - std::conj(S[i] * jd.f[i])));
    m = std::max(m, std::abs(jd.f[i]));
  }
  return m > 0 ? r / m : r;
}

}  // namespace invscat::riemann
