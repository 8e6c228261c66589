// Inverts the scattering matrix of a zero-energy resonance with the Marchenko solver and prints q(x)
// next to the closed form.

#include <cmath>
#include <cstdio>

#include "invscat/invscat.hpp"

int main() {
  using namespace invscat;
  families::Resonance r{1.0};
  const RVec ks = graded_k_grid(200.0);
  auto sd = families::sample_S(ks, [r](double k) { return r.S(k); }, {}, {}, -1);
  auto q = marchenko::invert(sd, 5.0, 0.01);

  std::printf("%6s %14s %14s\n", "x", "q_recovered", "q_exact");
  for (std::size_t i = 0; i < q.xs.size(); i += 50) std::printf("%6.2f %14.8f %14.8f\n", q.xs[i], q.qs[i], r.q(q.xs[i]));
}
