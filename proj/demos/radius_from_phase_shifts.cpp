// Estimates the radius of a square well at k = 1 from its partial-wave phase shifts.

#include <cstdio>

#include "invscat/invscat.hpp"

int main() {
  using namespace invscat;
  for (double a : {0.5, 1.0, 2.0, 3.0}) {
    auto q = make_potential([a](double x) { return x <= a ? 1.0 : 0.0; }, a, 1e-3, DecayClass::Compact, a);
    auto ps = fixed_energy::partial_wave_forward(q, {.L = 40}).ps;
    auto est = fixed_energy::radius_estimate(ps);
    std::printf("a = %.2f  a_hat = %.4f\n", a, est.a_hat);
  }
}
