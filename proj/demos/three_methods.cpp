// Recovers a potential without bound states three ways (Marchenko, Gel'fand-Levitan, Krein) from the
// same S(k) and reports how far apart the answers are.

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "invscat/invscat.hpp"

int main() {
  using namespace invscat;
  families::NoBound nb{1.0, 2.0};
  const RVec ks = graded_k_grid(200.0);
  auto sd = families::sample_S(ks, [nb](double k) { return nb.S(k); });

  auto qm = marchenko::invert(sd, 5.0, 0.01);
  auto sf = riemann::spectral_from_scattering(sd);
  auto qg = gl::q_from_K(gl::solve_gl(gl::build_L(sf, 5.0, 0.01)));
  auto qk = krein::invert_detailed(sd, 5.0, 0.01).q.q;

  double dg = 0.0, dk = 0.0;
  for (std::size_t i = 0; i < qm.xs.size(); ++i) {
    dg = std::max(dg, std::abs(qg.qs[i] - qm.qs[i]));
    dk = std::max(dk, std::abs(qk.qs[i] - qm.qs[i]));
  }
  std::printf("max |q_GL - q_M|    = %.3e\n", dg);
  std::printf("max |q_Krein - q_M| = %.3e\n", dk);
  std::printf("%6s %12s %12s %12s %12s\n", "x", "marchenko", "gl", "krein", "exact");
  for (std::size_t i = 0; i < qm.xs.size(); i += 50)
    std::printf("%6.2f %12.6f %12.6f %12.6f %12.6f\n", qm.xs[i], qm.qs[i], qg.qs[i], qk.qs[i], nb.q(qm.xs[i]));
}
