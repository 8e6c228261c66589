#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "errors.hpp"

namespace invscat {

using cplx = std::complex<double>;
using RVec = std::vector<double>;
using CVec = std::vector<cplx>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr cplx kI{0.0, 1.0};

inline RVec linspace(double a, double b, std::size_t n) {
  RVec v(n);
  if (n == 1) {
    v[0] = a;
    return v;
  }
  for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

// Uniform grid 0, h, 2h, ... covering [0, X] with X rounded to a whole number of steps.
inline RVec uniform_grid(double X, double h) {
  auto n = static_cast<std::size_t>(std::llround(X / h));
  RVec v(n + 1);
  for (std::size_t i = 0; i <= n; ++i) v[i] = static_cast<double>(i) * h;
  return v;
}

// Wavenumber grid on [0, kmax] with local step h0*(1 + k/kscale).
// The number of intervals is forced to be even so Simpson/Filon panels tile it.
inline RVec graded_k_grid(double kmax, double h0 = 0.004, double kscale = 2.0) {
  // k(s) = kscale*(exp(h0*s/kscale) - 1) gives dk/ds = h0*(1+k/kscale)
  double smax = kscale / h0 * std::log1p(kmax / kscale);
  auto n = static_cast<std::size_t>(std::ceil(smax));
  if (n % 2) ++n;
  RVec k(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    double s = smax * static_cast<double>(i) / static_cast<double>(n);
    k[i] = kscale * std::expm1(h0 * s / kscale);
  }
  k.front() = 0.0;
  k.back() = kmax;
  return k;
}

inline bool strictly_increasing(const RVec& x) {
  for (std::size_t i = 1; i < x.size(); ++i)
    if (!(x[i] > x[i - 1])) return false;
  return true;
}

inline void require_grid(const RVec& x, const std::string& name, std::size_t min_size = 2) {
  if (x.size() < min_size) fail(ErrorKind::MalformedGrid, name + " has too few nodes");
  if (!strictly_increasing(x)) fail(ErrorKind::MalformedGrid, name + " is not strictly increasing");
  for (double v : x)
    if (!std::isfinite(v)) fail(ErrorKind::MalformedGrid, name + " has a non-finite node");
}

inline bool is_uniform(const RVec& x, double rtol = 1e-9) {
  if (x.size() < 3) return true;
  double h = (x.back() - x.front()) / static_cast<double>(x.size() - 1);
  for (std::size_t i = 1; i < x.size(); ++i)
    if (std::abs((x[i] - x[i - 1]) - h) > rtol * std::max(1.0, std::abs(h))) return false;
  return true;
}

// Index of the interval [x[i], x[i+1]] containing t (clamped).
inline std::size_t locate(const RVec& x, double t) {
  if (t <= x.front()) return 0;
  if (t >= x.back()) return x.size() - 2;
  auto it = std::upper_bound(x.begin(), x.end(), t);
  return static_cast<std::size_t>(it - x.begin()) - 1;
}

// Local Lagrange interpolation of the given order (number of points = order+1).
template <class T>
T lagrange_interp(const RVec& x, const std::vector<T>& y, double t, int order = 3) {
  const std::size_t n = x.size();
  const std::size_t m = std::min<std::size_t>(static_cast<std::size_t>(order) + 1, n);
  std::size_t i = locate(x, t);
  std::ptrdiff_t start = static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>((m - 1) / 2);
  start = std::clamp<std::ptrdiff_t>(start, 0, static_cast<std::ptrdiff_t>(n - m));
  T acc{};
  for (std::size_t a = 0; a < m; ++a) {
    const std::size_t ia = static_cast<std::size_t>(start) + a;
    double w = 1.0;
    for (std::size_t b = 0; b < m; ++b) {
      if (a == b) continue;
      const std::size_t ib = static_cast<std::size_t>(start) + b;
      w *= (t - x[ib]) / (x[ia] - x[ib]);
    }
    acc += w * y[ia];
  }
  return acc;
}

// Fast interpolation on a uniform grid x0 + i*h.
struct UniformInterpolator {
  double x0 = 0.0, h = 1.0;
  RVec y;
  int order = 7;

  double operator()(double t) const {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(y.size());
    const std::ptrdiff_t m = std::min<std::ptrdiff_t>(order + 1, n);
    double s = (t - x0) / h;
    std::ptrdiff_t i = static_cast<std::ptrdiff_t>(std::floor(s));
    std::ptrdiff_t start = std::clamp<std::ptrdiff_t>(i - (m - 1) / 2, 0, n - m);
    double r = s - static_cast<double>(start);
    // barycentric form on equispaced nodes: w_a = (-1)^a C(m-1, a)
    double num = 0.0, den = 0.0, binom = 1.0;
    for (std::ptrdiff_t a = 0; a < m; ++a) {
      const double d = r - static_cast<double>(a);
      if (std::abs(d) < 1e-14) return y[static_cast<std::size_t>(start + a)];
      const double w = ((a & 1) ? -binom : binom) / d;
      num += w * y[static_cast<std::size_t>(start + a)];
      den += w;
      binom = binom * static_cast<double>(m - 1 - a) / static_cast<double>(a + 1);
    }
    return num / den;
  }
};

// Derivative of samples on a uniform grid: 4th-order central differences, one-sided at the ends.
inline RVec diff4(const RVec& f, double h) {
  const std::size_t n = f.size();
  RVec d(n, 0.0);
  if (n < 5) {
    for (std::size_t i = 0; i < n; ++i) {
      if (n < 2) break;
      if (i == 0) d[i] = (f[1] - f[0]) / h;
      else if (i == n - 1) d[i] = (f[n - 1] - f[n - 2]) / h;
      else d[i] = (f[i + 1] - f[i - 1]) / (2 * h);
    }
    return d;
  }
  for (std::size_t i = 2; i + 2 < n; ++i)
    d[i] = (-f[i + 2] + 8 * f[i + 1] - 8 * f[i - 1] + f[i - 2]) / (12 * h);
  d[0] = (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]) / (12 * h);
  d[1] = (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]) / (12 * h);
  d[n - 1] = (25 * f[n - 1] - 48 * f[n - 2] + 36 * f[n - 3] - 16 * f[n - 4] + 3 * f[n - 5]) / (12 * h);
  d[n - 2] = (3 * f[n - 1] + 10 * f[n - 2] - 18 * f[n - 3] + 6 * f[n - 4] - f[n - 5]) / (12 * h);
  return d;
}

// Cumulative integral from x[0] by the trapezoid rule (any grid).
template <class T>
std::vector<T> cumtrapz(const RVec& x, const std::vector<T>& y) {
  std::vector<T> c(x.size(), T{});
  for (std::size_t i = 1; i < x.size(); ++i) c[i] = c[i - 1] + 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
  return c;
}

// Composite Simpson weights on a nonuniform grid; an odd trailing interval is integrated with the
// quadratic through the last three nodes.
inline RVec simpson_weights(const RVec& x) {
  const std::size_t n = x.size();
  RVec w(n, 0.0);
  if (n == 2) {
    w[0] = w[1] = 0.5 * (x[1] - x[0]);
    return w;
  }
  std::size_t i = 0;
  for (; i + 2 < n; i += 2) {
    const double h1 = x[i + 1] - x[i], h2 = x[i + 2] - x[i + 1], H = h1 + h2;
    w[i] += H / 6 * (2 - h2 / h1);
    w[i + 1] += H * H * H / (6 * h1 * h2);
    w[i + 2] += H / 6 * (2 - h1 / h2);
  }
  if (i + 1 < n) {
    const double h1 = x[i] - x[i - 1], h2 = x[i + 1] - x[i];
    w[i - 1] += -h2 * h2 * h2 / (6 * h1 * (h1 + h2));
    w[i] += h2 * (h2 + 3 * h1) / (6 * h1);
    w[i + 1] += h2 * (2 * h2 + 3 * h1) / (6 * (h1 + h2));
  }
  return w;
}

// Weights for n equispaced nodes with step h: trapezoid with 4th-order end corrections
// (3/8, 7/6, 23/24) when n >= 6, Newton-Cotes below that. Unlike composite Simpson the error
// does not alternate with the parity of n.
inline RVec gregory_weights(std::size_t n, double h) {
  RVec w(n, h);
  switch (n) {
    case 0: return w;
    case 1: w[0] = 0.0; return w;
    case 2: w[0] = w[1] = 0.5 * h; return w;
    case 3: w = {h / 3, 4 * h / 3, h / 3}; return w;
    case 4: w = {3 * h / 8, 9 * h / 8, 9 * h / 8, 3 * h / 8}; return w;
    case 5: w = {14 * h / 45, 64 * h / 45, 24 * h / 45, 64 * h / 45, 14 * h / 45}; return w;
    default: break;
  }
  const double c[3] = {3.0 / 8, 7.0 / 6, 23.0 / 24};
  for (std::size_t i = 0; i < 3; ++i) {
    w[i] = c[i] * h;
    w[n - 1 - i] = c[i] * h;
  }
  return w;
}

// Three-point derivative on a nonuniform grid (one-sided at the ends).
inline RVec diff3(const RVec& x, const RVec& y) {
  const std::size_t n = x.size();
  RVec d(n, 0.0);
  if (n < 3) {
    if (n == 2) d[0] = d[1] = (y[1] - y[0]) / (x[1] - x[0]);
    return d;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h1 = x[i] - x[i - 1], h2 = x[i + 1] - x[i];
    d[i] = -h2 / (h1 * (h1 + h2)) * y[i - 1] + (h2 - h1) / (h1 * h2) * y[i] + h1 / (h2 * (h1 + h2)) * y[i + 1];
  }
  auto end = [&](std::size_t a, std::size_t b, std::size_t c) {
    const double h1 = x[b] - x[a], h2 = x[c] - x[b];
    return std::pair{-(2 * h1 + h2) / (h1 * (h1 + h2)) * y[a] + (h1 + h2) / (h1 * h2) * y[b] - h1 / (h2 * (h1 + h2)) * y[c],
                     h2 / (h1 * (h1 + h2)) * y[a] - (h1 + h2) / (h1 * h2) * y[b] + (2 * h2 + h1) / (h2 * (h1 + h2)) * y[c]};
  };
  d[0] = end(0, 1, 2).first;
  d[n - 1] = end(n - 3, n - 2, n - 1).second;
  return d;
}

// Cumulative integral with local cubic interpolation on each interval (4th order, any grid).
inline RVec cumint4(const RVec& x, const RVec& y) {
  const std::size_t n = x.size();
  RVec c(n, 0.0);
  if (n < 4) return cumtrapz(x, y);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    std::size_t s = (i == 0) ? 0 : std::min(i - 1, n - 4);
    double a = x[i], b = x[i + 1];
    // two-point Gauss on [a,b] applied to the cubic through x[s..s+3] is exact
    double m = 0.5 * (a + b), r = 0.5 * (b - a) / std::sqrt(3.0);
    double acc = 0.0;
    for (double t : {m - r, m + r}) {
      double v = 0.0;
      for (std::size_t p = 0; p < 4; ++p) {
        double w = 1.0;
        for (std::size_t q = 0; q < 4; ++q)
          if (p != q) w *= (t - x[s + q]) / (x[s + p] - x[s + q]);
        v += w * y[s + p];
      }
      acc += v;
    }
    c[i + 1] = c[i] + 0.5 * (b - a) * acc;
  }
  return c;
}

// Gauss-Legendre nodes and weights on [-1,1].
inline void gauss_legendre(int n, RVec& nodes, RVec& weights) {
  nodes.assign(static_cast<std::size_t>(n), 0.0);
  weights.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    nodes[static_cast<std::size_t>(i)] = -z;
    nodes[static_cast<std::size_t>(n - 1 - i)] = z;
    double w = 2.0 / ((1.0 - z * z) * pp * pp);
    weights[static_cast<std::size_t>(i)] = w;
    weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
}

// Least-squares fit y ~ sum_j c_j * basis_j(x) via normal equations (tiny systems only).
inline RVec lsq_fit(const RVec& x, const RVec& y, const std::vector<std::function<double(double)>>& basis) {
  const std::size_t m = basis.size();
  std::vector<RVec> A(m, RVec(m, 0.0));
  RVec b(m, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    RVec phi(m);
    for (std::size_t j = 0; j < m; ++j) phi[j] = basis[j](x[i]);
    for (std::size_t j = 0; j < m; ++j) {
      b[j] += phi[j] * y[i];
      for (std::size_t l = 0; l < m; ++l) A[j][l] += phi[j] * phi[l];
    }
  }
  // Gaussian elimination with partial pivoting
  for (std::size_t c = 0; c < m; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < m; ++r)
      if (std::abs(A[r][c]) > std::abs(A[p][c])) p = r;
    std::swap(A[c], A[p]);
    std::swap(b[c], b[p]);
    if (A[c][c] == 0.0) return RVec(m, 0.0);
    for (std::size_t r = c + 1; r < m; ++r) {
      double f = A[r][c] / A[c][c];
      for (std::size_t l = c; l < m; ++l) A[r][l] -= f * A[c][l];
      b[r] -= f * b[c];
    }
  }
  RVec sol(m, 0.0);
  for (std::size_t c = m; c-- > 0;) {
    double s = b[c];
    for (std::size_t l = c + 1; l < m; ++l) s -= A[c][l] * sol[l];
    sol[c] = s / A[c][c];
  }
  return sol;
}

template <class F>
double bisect(F&& f, double a, double b, double tol = 1e-14, int maxit = 200) {
  double fa = f(a);
  for (int it = 0; it < maxit && (b - a) > tol * std::max(1.0, std::abs(a)); ++it) {
    double m = 0.5 * (a + b);
    double fm = f(m);
    if ((fm < 0) == (fa < 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

inline double max_abs(const RVec& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Principal argument differences accumulated into a continuous phase, anchored at the last node.
// Throws when a single step exceeds `guard` radians.
inline RVec unwrap_from_end(const CVec& g, double guard, ErrorKind kind) {
  const std::size_t n = g.size();
  RVec ph(n, 0.0);
  if (n == 0) return ph;
  ph[n - 1] = std::arg(g[n - 1]);
  for (std::size_t i = n - 1; i-- > 0;) {
    double d = std::arg(g[i] / g[i + 1]);
    if (std::abs(d) > guard)
      fail(kind, "phase step of " + std::to_string(d) + " rad between adjacent nodes exceeds guard");
    ph[i] = ph[i + 1] + d;
  }
  return ph;
}

}  // namespace invscat
