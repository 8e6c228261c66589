#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "errors.hpp"
#include "numerics.hpp"
#include "special.hpp"

namespace invscat {

namespace detail {

// M_m = int_0^L u^m e^{i w u} du for m = 0,1,2.
inline void filon_moments(double w, double L, cplx M[3]) {
  const double wl = w * L;
  if (std::abs(wl) < 1.0) {
    // power series in (i w)
    cplx z = kI * w;
    cplx term = 1.0;  // (iw)^n / n!
    double Lp = L;    // L^{n+1}
    M[0] = M[1] = M[2] = 0.0;
    for (int n = 0; n < 40; ++n) {
      M[0] += term * Lp / double(n + 1);
      M[1] += term * Lp * L / double(n + 2);
      M[2] += term * Lp * L * L / double(n + 3);
      term *= z / double(n + 1);
      Lp *= L;
      if (std::abs(term) * Lp < 1e-18 * std::abs(M[0]) && n > 3) break;
    }
    return;
  }
  const cplx e = std::polar(1.0, wl);
  const cplx iw = kI * w;
  M[0] = (e - 1.0) / iw;
  M[1] = (L * e - M[0]) / iw;
  M[2] = (L * L * e - 2.0 * M[1]) / iw;
}

// int_{K}^{inf} k^{-n} e^{ikx} dk for n = 1..nmax, x != 0 handled; x == 0 gives the right limit.
inline std::vector<cplx> power_tail_integrals(double K, double x, int nmax) {
  std::vector<cplx> I(static_cast<std::size_t>(nmax) + 1, 0.0);
  if (x == 0.0) {
    // n = 1: real part diverges (never used with a real coefficient); imaginary part is the
    // right-hand limit pi/2.
    I[1] = cplx(0.0, kPi / 2);
    for (int n = 2; n <= nmax; ++n) I[static_cast<std::size_t>(n)] = std::pow(K, 1.0 - n) / (n - 1.0);
    return I;
  }
  const double ax = std::abs(x);
  auto [si, ci] = special::sici(K * ax);
  cplx I1(-ci, kPi / 2 - si);
  I[1] = I1;
  const cplx e = std::polar(1.0, K * ax);
  for (int n = 2; n <= nmax; ++n) {
    auto in = static_cast<std::size_t>(n);
    I[in] = (e * std::pow(K, 1.0 - n) + kI * ax * I[in - 1]) / (n - 1.0);
  }
  if (x < 0)
    for (auto& v : I) v = std::conj(v);
  return I;
}

}  // namespace detail

// Power-law model for the large-k behaviour of sampled data: g(k) ~ sum_n c_n k^{-n}.
// Real parts and imaginary parts are fitted separately with their own power sets.
struct PowerTail {
  double K = 0.0;
  std::vector<int> re_powers, im_powers;
  RVec re_coef, im_coef;

  bool empty() const { return re_coef.empty() && im_coef.empty(); }

  cplx value(double k) const {
    double re = 0, im = 0;
    for (std::size_t j = 0; j < re_coef.size(); ++j) re += re_coef[j] * std::pow(k, -re_powers[j]);
    for (std::size_t j = 0; j < im_coef.size(); ++j) im += im_coef[j] * std::pow(k, -im_powers[j]);
    return {re, im};
  }

  // int_K^inf model(k) e^{ikx} dk
  cplx integral(double x) const {
    int nmax = 1;
    for (int p : re_powers) nmax = std::max(nmax, p);
    for (int p : im_powers) nmax = std::max(nmax, p);
    auto I = detail::power_tail_integrals(K, x, nmax);
    cplx acc = 0.0;
    for (std::size_t j = 0; j < re_coef.size(); ++j) {
      auto p = static_cast<std::size_t>(re_powers[j]);
      if (p == 1 && x == 0.0) fail(ErrorKind::DivergentTail, "1/k real tail at x = 0");
      acc += re_coef[j] * I[p];
    }
    for (std::size_t j = 0; j < im_coef.size(); ++j) {
      auto p = static_cast<std::size_t>(im_powers[j]);
      cplx v = I[p];
      if (p == 1 && x == 0.0) v = cplx(0.0, v.imag());  // only the bounded sine part survives
      acc += kI * im_coef[j] * v;
    }
    return acc;
  }
};

// Fit a power tail over k in [frac*K, K] to samples g on the grid ks.
inline PowerTail fit_power_tail(const RVec& ks, const CVec& g, std::vector<int> re_powers,
                                std::vector<int> im_powers, double frac = 0.25) {
  PowerTail t;
  t.K = ks.back();
  t.re_powers = std::move(re_powers);
  t.im_powers = std::move(im_powers);
  RVec kk, re, im;
  for (std::size_t i = 0; i < ks.size(); ++i)
    if (ks[i] >= frac * t.K && ks[i] > 0) {
      kk.push_back(ks[i]);
      re.push_back(g[i].real());
      im.push_back(g[i].imag());
    }
  auto fit = [&](const std::vector<int>& pw, const RVec& y) {
    if (pw.empty() || kk.size() < pw.size()) return RVec{};
    // scale the basis by the leading power for conditioning
    int p0 = pw.front();
    RVec ys(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) ys[i] = y[i] * std::pow(kk[i], p0);
    std::vector<std::function<double(double)>> basis;
    for (int p : pw) basis.push_back([p, p0](double k) { return std::pow(k, p0 - p); });
    return lsq_fit(kk, ys, basis);
  };
  t.re_coef = fit(t.re_powers, re);
  t.im_coef = fit(t.im_powers, im);
  return t;
}

// Filon-type quadrature of int_{k0}^{kN} g(k) e^{ikx} dk on a (possibly nonuniform) grid using
// piecewise-quadratic interpolation of g on consecutive node triples.
class FilonTransform {
 public:
  FilonTransform(RVec ks, CVec g) : ks_(std::move(ks)), g_(std::move(g)) {
    require_grid(ks_, "k-grid", 3);
    if (g_.size() != ks_.size()) fail(ErrorKind::MalformedGrid, "sample count differs from grid size");
    build_panels();
  }

  cplx operator()(double x) const {
    cplx acc = 0.0;
    cplx M[3];
    for (const auto& p : panels_) {
      detail::filon_moments(x, p.L, M);
      cplx inner = p.a * M[0] + p.b * M[1] + p.c * M[2];
      if (p.skip > 0.0) {
        cplx Ms[3];
        detail::filon_moments(x, p.skip, Ms);
        inner -= p.a * Ms[0] + p.b * Ms[1] + p.c * Ms[2];
      }
      acc += std::polar(1.0, x * p.k0) * inner;
    }
    return acc;
  }

 private:
  struct Panel {
    double k0, L, skip;
    cplx a, b, c;  // g(k0+u) = a + b u + c u^2
  };

  void add_panel(std::size_t i0, double skip) {
    const double t0 = ks_[i0], t1 = ks_[i0 + 1], t2 = ks_[i0 + 2];
    const cplx g0 = g_[i0], g1 = g_[i0 + 1], g2 = g_[i0 + 2];
    const double h1 = t1 - t0, h2 = t2 - t0;
    const cplx d1 = (g1 - g0) / h1;
    const cplx d2 = (g2 - g0) / h2;
    const cplx c = (d2 - d1) / (t2 - t1);
    const cplx b = d1 - c * h1;
    panels_.push_back({t0, h2, skip, g0, b, c});
  }

  void build_panels() {
    const std::size_t n = ks_.size() - 1;  // intervals
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) add_panel(i, 0.0);
    if (i < n) add_panel(n - 2, ks_[n - 1] - ks_[n - 2]);
  }

  RVec ks_;
  CVec g_;
  std::vector<Panel> panels_;
};

// int_0^inf g(k) e^{ikx} dk where g is sampled on [0, K] and continued by a power tail.
class HalfLineFourier {
 public:
  HalfLineFourier(const RVec& ks, const CVec& g, PowerTail tail) : filon_(ks, g), tail_(std::move(tail)) {}
  cplx operator()(double x) const { return filon_(x) + (tail_.empty() ? cplx(0.0) : tail_.integral(x)); }
  const PowerTail& tail() const { return tail_; }

 private:
  FilonTransform filon_;
  PowerTail tail_;
};

enum class CosDirection { Forward, Inverse };

// Cosine transform int_0^inf cos(k t) g(k) dk on the output points. The inverse direction
// multiplies by 2/pi so that Inverse(Forward(g)) = g. A c/k^2 (+ d/k^4) tail beyond the last node
// is fitted when the last sample exceeds tail_tol; pass fit_tail = false to forbid that.
struct CosTransformOptions {
  double tail_tol = 1e-10;
  bool fit_tail = true;
  double fit_fraction = 0.1;
};

inline RVec fourier_cos_transform(const RVec& ks, const RVec& samples, const RVec& ts,
                                  CosDirection dir = CosDirection::Forward,
                                  const CosTransformOptions& opt = {}) {
  require_grid(ks, "transform grid", 3);
  if (samples.size() != ks.size()) fail(ErrorKind::MalformedGrid, "sample count differs from grid size");
  CVec g(samples.begin(), samples.end());
  PowerTail tail;
  if (std::abs(samples.back()) > opt.tail_tol) {
    if (!opt.fit_tail)
      fail(ErrorKind::TailNotResolved, "integrand at the last node is " + std::to_string(samples.back()));
    tail = fit_power_tail(ks, g, {2, 4}, {}, opt.fit_fraction);
  }
  HalfLineFourier F(ks, g, tail);
  const double scale = dir == CosDirection::Inverse ? 2.0 / kPi : 1.0;
  RVec out(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) out[i] = scale * F(ts[i]).real();
  return out;
}

}  // namespace invscat
