// Moves the lowest level of the linear potential up by 0.25, rebuilds the potential and checks the new
// spectrum by shooting.

#include <cstdio>

#include "invscat/invscat.hpp"

int main() {
  using namespace invscat;
  auto ref = quarkonium::airy_reference(3);
  QuarkoniumData d;
  for (const auto& L : ref) {
    d.energies.push_back(L.E);
    d.slopes.push_back(L.s);
  }
  d.energies[0] += 0.25;
  auto rec = quarkonium::recover_potential(d, ref, uniform_grid(10.0, 1e-3));
  auto E = quarkonium::bound_state_energies(rec.q, 3);
  for (std::size_t j = 0; j < 3; ++j)
    std::printf("level %zu: requested %.6f  found %.6f  (Airy %.6f)\n", j, d.energies[j], E[j], ref[j].E);
}
