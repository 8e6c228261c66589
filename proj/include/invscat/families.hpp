#pragma once

// Closed-form rational Jost functions and the quantities derived from them. Used as oracles in
// tests, as demo inputs for the CLI, and as synthetic data generators.

#include <cmath>
#include <functional>

#include "numerics.hpp"
#include "types.hpp"

namespace invscat::families {

// f(k) = k/(k + i nu): resonance at zero, potential -2 nu^2 sech^2(nu x).
struct Resonance {
  double nu = 1.0;
  cplx f(cplx k) const { return k / (k + kI * nu); }
  cplx S(double k) const { return (k + kI * nu) / (k - kI * nu); }
  double F(double x) const { return 2 * nu * std::exp(-nu * x); }
  double A(double x, double y) const { return -2 * nu * std::exp(-nu * (x + y)) / (1 + std::exp(-2 * nu * x)); }
  double q(double x) const {
    double c = std::cosh(nu * x);
    return -2 * nu * nu / (c * c);
  }
  cplx I(double k) const { return kI * k + kI * nu * nu / k; }
};

// Single-exponential F(x) = C e^{-beta x}: kernel and potential in closed form.
struct SingleExponential {
  double C = 1.0, beta = 1.0;
  double gamma() const { return C / (2 * beta); }
  double F(double x) const { return C * std::exp(-beta * x); }
  double A(double x, double y) const {
    return -C * std::exp(-beta * (x + y)) / (1 + gamma() * std::exp(-2 * beta * x));
  }
  double x0() const { return std::log(gamma()) / (2 * beta); }
  double q(double x) const {
    double c = std::cosh(beta * (x - x0()));
    return -2 * beta * beta / (c * c);
  }
};

// f(k) = (k - i k1)/(k + i nu1), nu1^2 = k1^2 + r1: one bound state at i k1.
struct Bargmann {
  double k1 = 1.0, r1 = 1.0;
  double nu1() const { return std::sqrt(k1 * k1 + r1); }
  cplx f(cplx k) const { return (k - kI * k1) / (k + kI * nu1()); }
  cplx S(double k) const {
    return (k + kI * k1) * (k + kI * nu1()) / ((k - kI * k1) * (k - kI * nu1()));
  }
  double s1() const { return 2 * k1 * (k1 + nu1()) * (k1 + nu1()) / r1; }
  double c1() const { return 2 * k1 * r1; }
  cplx fdot() const { return -kI / (k1 + nu1()); }
  double fprime_at_bound() const { return nu1() - k1; }
  cplx I(double k) const { return kI * k + kI * r1 / (k - kI * k1); }
  double density(double lambda) const {
    double s = std::sqrt(std::max(lambda, 0.0));
    return (s + r1 * s / (lambda + k1 * k1)) / kPi;
  }
  SingleExponential F_exact() const {
    double n = nu1();
    return {2 * n * (n + k1) / (n - k1), n};
  }
  double q(double x) const { return F_exact().q(x); }
  // Gel'fand-Levitan kernel L(x,y) for this family (continuous + discrete parts).
  double L_continuous(double x, double y) const {
    return r1 / (2 * k1) * (std::exp(-k1 * std::abs(x - y)) - std::exp(-k1 * (x + y)));
  }
  double L(double x, double y) const {
    return L_continuous(x, y) + c1() * std::sinh(k1 * x) * std::sinh(k1 * y) / (k1 * k1);
  }
};

// f(k) = (k + i nu1)/(k + i k1): no zeros in the upper half-plane; 1/|f|^2 - 1 = (k1^2-nu1^2)/(k^2+nu1^2).
struct NoBound {
  double nu1 = 1.0, k1 = 2.0;
  cplx f(cplx k) const { return (k + kI * nu1) / (k + kI * k1); }
  cplx S(double k) const { return std::conj(f(k)) / f(k); }
  double H(double t) const { return (k1 * k1 - nu1 * nu1) / (2 * nu1) * std::exp(-nu1 * std::abs(t)); }
  // 1 - S has a single pole in the upper half-plane, at i k1
  double F_coef() const { return 2 * k1 * (k1 - nu1) / (k1 + nu1); }
  SingleExponential F_exact() const { return {F_coef(), k1}; }
  double q(double x) const { return F_exact().q(x); }
};

// Sample a closed-form S on a grid into ScatteringData.
inline ScatteringData sample_S(const RVec& ks, const std::function<cplx(double)>& S, RVec bound = {},
                               RVec norming = {}, int index = 0) {
  ScatteringData sd;
  sd.ks = ks;
  sd.S.resize(ks.size());
  for (std::size_t i = 0; i < ks.size(); ++i) sd.S[i] = S(ks[i]);
  sd.bound_ks = std::move(bound);
  sd.norming = std::move(norming);
  sd.index = index;
  return sd;
}

}  // namespace invscat::families
