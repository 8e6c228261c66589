#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <utility>
#include <vector>

#include "numerics.hpp"

namespace invscat::special {

// Sine and cosine integrals Si(x), Ci(x) for x > 0 (Si is odd; Ci(0) = -inf).
inline std::pair<double, double> sici(double x) {
  constexpr double euler = 0.57721566490153286061;
  constexpr double eps = 1e-16;
  constexpr double fpmin = 1e-300;
  const double t = std::abs(x);
  double si = 0.0, ci = 0.0;
  if (t == 0.0) return {0.0, -std::numeric_limits<double>::infinity()};
  if (t > 2.0) {
    // continued fraction for E1(it) (modified Lentz)
    std::complex<double> b(1.0, t), c(1.0 / fpmin, 0.0), d = 1.0 / b, h = d;
    for (int i = 2; i <= 400; ++i) {
      double a = -static_cast<double>((i - 1) * (i - 1));
      b += 2.0;
      d = 1.0 / (a * d + b);
      c = b + a / c;
      std::complex<double> del = c * d;
      h *= del;
      if (std::abs(del.real() - 1.0) + std::abs(del.imag()) < eps) break;
    }
    h *= std::complex<double>(std::cos(t), -std::sin(t));
    ci = -h.real();
    si = kPi / 2 + h.imag();
  } else {
    double sum = 0.0, sums = 0.0, sumc = 0.0, sign = 1.0, fact = 1.0;
    bool odd = true;
    for (int k = 1; k <= 200; ++k) {
      fact *= t / k;
      double term = fact / k;
      sum += sign * term;
      double err = term / std::abs(sum);
      if (odd) {
        sign = -sign;
        sums = sum;
        sum = sumc;
      } else {
        sumc = sum;
        sum = sums;
      }
      if (err < eps) break;
      odd = !odd;
    }
    si = sums;
    ci = sumc + std::log(t) + euler;
  }
  if (x < 0) si = -si;
  return {si, ci};
}

struct AiryValue {
  double ai;
  double aip;
};

namespace detail {

inline AiryValue airy_series(double zd) {
  using ld = long double;
  const ld z = zd;
  const ld c1 = 0.355028053887817239260063186004L;
  const ld c2 = 0.258819403792806798405183560189L;
  const ld z3 = z * z * z;
  ld f = 0, g = 0, fp = 0, gp = 0;
  ld a = 1.0L;  // coefficient of z^{3k} in f
  ld b = 1.0L;  // coefficient of z^{3k+1} in g
  ld zp = 1.0L;  // z^{3k}
  ld zprev = 0.0L;
  for (int k = 0; k < 200; ++k) {
    const ld tf = a * zp;
    const ld tg = b * zp * z;
    f += tf;
    g += tg;
    if (k > 0) fp += a * 3 * k * zprev * z * z;
    gp += b * (3 * k + 1) * zp;
    if (k > 2 && std::fabs(tf) + std::fabs(tg) < 1e-22L * (std::fabs(f) + std::fabs(g) + 1e-300L)) break;
    a /= static_cast<ld>((3 * k + 2) * (3 * k + 3));
    b /= static_cast<ld>((3 * k + 3) * (3 * k + 4));
    zprev = zp;
    zp *= z3;
  }
  return {static_cast<double>(c1 * f - c2 * g), static_cast<double>(c1 * fp - c2 * gp)};
}

inline AiryValue airy_asymptotic(double z) {
  const double x = std::abs(z);
  const double zeta = 2.0 / 3.0 * x * std::sqrt(x);
  // u_k, v_k coefficients
  std::vector<double> u{1.0}, v{1.0};
  for (int k = 1; k < 60; ++k) {
    double uk = u.back() * (6.0 * k - 5) * (6.0 * k - 3) * (6.0 * k - 1) / ((2.0 * k - 1) * 216.0 * k);
    u.push_back(uk);
    v.push_back(-(6.0 * k + 1) / (6.0 * k - 1) * uk);
  }
  const double sp = std::sqrt(kPi);
  const double q = std::pow(x, 0.25);
  if (z > 0) {
    double su = 0.0, sv = 0.0, zk = 1.0, prev = 1e300;
    for (std::size_t k = 0; k < u.size(); ++k) {
      double t = u[k] / zk;
      if (std::abs(t) > prev) break;
      prev = std::abs(t);
      double s = (k % 2) ? -1.0 : 1.0;
      su += s * t;
      sv += s * v[k] / zk;
      if (prev < 1e-18) break;
      zk *= zeta;
    }
    double e = std::exp(-zeta);
    return {e / (2 * sp * q) * su, -q * e / (2 * sp) * sv};
  }
  // oscillatory side
  double pe = 0, po = 0, qe = 0, qo = 0, zk = 1.0, prev = 1e300;
  for (std::size_t k = 0; k < u.size(); ++k) {
    double t = u[k] / zk;
    if (std::abs(t) > prev) break;
    prev = std::abs(t);
    std::size_t half = k / 2;
    double s = (half % 2) ? -1.0 : 1.0;
    if (k % 2 == 0) {
      pe += s * t;
      qe += s * v[k] / zk;
    } else {
      po += s * t;
      qo += s * v[k] / zk;
    }
    if (prev < 1e-18) break;
    zk *= zeta;
  }
  const double ph = zeta - kPi / 4;
  const double ai = (std::cos(ph) * pe + std::sin(ph) * po) / (sp * q);
  const double aip = q / sp * (std::sin(ph) * qe - std::cos(ph) * qo);
  return {ai, aip};
}

}  // namespace detail

// Airy function Ai and its derivative.
inline AiryValue airy(double z) {
  if (std::abs(z) <= 8.0) return detail::airy_series(z);
  return detail::airy_asymptotic(z);
}

// Riccati-Bessel u_l(r) = r j_l(r) for l = 0..L (Miller backward recurrence).
inline RVec riccati_j(int L, double r) {
  RVec u(static_cast<std::size_t>(L) + 1, 0.0);
  if (r == 0.0) return u;
  int N = L + 30 + static_cast<int>(2.0 * r);
  std::vector<double> v(static_cast<std::size_t>(N) + 2, 0.0);
  v[static_cast<std::size_t>(N) + 1] = 0.0;
  v[static_cast<std::size_t>(N)] = 1e-200;
  for (int l = N; l >= 1; --l) {
    auto il = static_cast<std::size_t>(l);
    v[il - 1] = (2.0 * l + 1.0) / r * v[il] - v[il + 1];
    if (std::abs(v[il - 1]) > 1e200) {
      for (std::size_t m = il - 1; m < v.size(); ++m) v[m] *= 1e-200;
    }
  }
  // normalise with sum (2l+1) u_l^2 = r^2
  long double s = 0.0L;
  for (int l = 0; l <= N; ++l) {
    long double t = v[static_cast<std::size_t>(l)];
    s += (2.0L * l + 1.0L) * t * t;
  }
  double scale = r / static_cast<double>(std::sqrt(s));
  double ref = std::sin(r);
  double ref1 = std::sin(r) / r - std::cos(r);
  bool flip = (std::abs(ref) > std::abs(ref1)) ? (ref * v[0] < 0) : (ref1 * v[1] < 0);
  if (flip) scale = -scale;
  for (int l = 0; l <= L; ++l) u[static_cast<std::size_t>(l)] = v[static_cast<std::size_t>(l)] * scale;
  return u;
}

// Riccati-Neumann n_l(r) = r y_l(r) for l = 0..L (upward recurrence).
inline RVec riccati_y(int L, double r) {
  RVec n(static_cast<std::size_t>(L) + 1, 0.0);
  n[0] = -std::cos(r);
  if (L >= 1) n[1] = -std::cos(r) / r - std::sin(r);
  for (int l = 1; l < L; ++l) {
    auto il = static_cast<std::size_t>(l);
    n[il + 1] = (2.0 * l + 1.0) / r * n[il] - n[il - 1];
  }
  return n;
}

}  // namespace invscat::special
