#include <gtest/gtest.h>

#include <cmath>

#include "invscat/quarkonium.hpp"

using namespace invscat;
using namespace invscat::quarkonium;

namespace {

QuarkoniumData reference_data(const std::vector<ReferenceLevel>& ref) {
  QuarkoniumData d;
  for (const auto& L : ref) {
    d.energies.push_back(L.E);
    d.slopes.push_back(L.s);
  }
  return d;
}

double max_diff(const RVec& a, const RVec& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST(Airy, ReferenceLevels) {
  auto ref = airy_reference(5);
  ASSERT_EQ(ref.size(), 5u);
  EXPECT_NEAR(ref[0].E, 2.33810741, 1e-8);
  EXPECT_NEAR(ref[1].E, 4.08794944, 1e-8);
  for (const auto& L : ref) {
    EXPECT_LT(std::abs(special::airy(-L.E).ai), 1e-12);
    EXPECT_NEAR(L.c * L.c * detail::airy_norm_quadrature(L.E) * L.s * L.s, 1.0, 1e-12);
    // int Ai^2(r - E) = Ai'(-E)^2 at a zero, so the reference slopes are all one
    EXPECT_NEAR(L.s, 1.0, 1e-10);
  }
}

TEST(Airy, UnperturbedSolution) {
  RVec xs = uniform_grid(8.0, 1e-3);
  auto ref = airy_reference(3);
  for (const auto& L : ref) {
    Solution s = unperturbed_solution(L.E, xs);
    for (std::size_t i = 0; i < xs.size(); i += 50) EXPECT_NEAR(s.phi[i], L.phi(xs[i]), 1e-6) << xs[i];
  }
  Solution s = unperturbed_solution(3.0, xs);
  EXPECT_NEAR(s.phi[1], xs[1], 1e-9);
  EXPECT_GT(std::abs(s.phi.back()), 100 * std::abs(s.phi[xs.size() / 2]));
  EXPECT_LT(std::abs(ref[0].phi(12.0)), 1e-9);
}

TEST(Quarkonium, ReferenceDataGivesZero) {
  RVec xs = uniform_grid(10.0, 1e-3);
  auto ref = airy_reference(3);
  auto rec = recover_potential(reference_data(ref), ref, xs);
  EXPECT_LT(max_abs(rec.p), 1e-12);
  for (std::size_t i = 0; i < xs.size(); ++i) EXPECT_EQ(rec.q.qs[i], xs[i] + rec.p[i]);
}

TEST(Quarkonium, SingleAddedLevelClosedForm) {
  RVec xs = uniform_grid(10.0, 1e-3);
  const double E0 = 1.2, s0 = 1.3;
  RVec pc = single_level_p(E0, s0, xs);

  QuarkoniumData one;
  one.energies = {E0};
  one.slopes = {s0};
  auto rec1 = recover_potential(one, {}, xs);
  EXPECT_LT(max_diff(rec1.p, pc), 1e-6);

  auto ref = airy_reference(3);
  QuarkoniumData d = reference_data(ref);
  d.energies.insert(d.energies.begin(), E0);
  d.slopes.insert(d.slopes.begin(), s0);
  auto rec = recover_potential(d, ref, xs);
  EXPECT_LT(max_diff(rec.p, pc), 1e-6);
  EXPECT_GT(max_abs(pc), 0.1);

  RVec E = bound_state_energies(rec.q, 4);
  EXPECT_NEAR(E[0], E0, 1e-3);
  for (int j = 0; j < 3; ++j) EXPECT_NEAR(E[j + 1], ref[j].E, 1e-3);
}

TEST(Quarkonium, NystromAgreesWithDegenerateSolve) {
  RVec xs = uniform_grid(3.0, 2e-3);
  auto ref = airy_reference(2);
  QuarkoniumData d = reference_data(ref);
  d.energies[0] += 0.3;
  d.slopes[0] = 1.4;
  auto rec = recover_potential(d, ref, xs);
  for (std::size_t i : {250u, 500u, 1000u, 1500u}) {
    EXPECT_NEAR(nystrom_diagonal(rec, xs, i), rec.Kdiag[i], 1e-8) << xs[i];
  }
}

TEST(Quarkonium, PerturbedLevelsReproduced) {
  RVec xs = uniform_grid(10.0, 1e-3);
  auto ref = airy_reference(3);
  for (auto [dE, s1] : std::vector<std::pair<double, double>>{{0.25, 1.2}, {-0.3, 0.8}}) {
    QuarkoniumData d = reference_data(ref);
    d.energies[0] += dE;
    d.slopes[0] = s1;
    auto rec = recover_potential(d, ref, xs);
    RVec E = bound_state_energies(rec.q, 3);
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(E[j], d.energies[j], 1e-3) << dE << " " << j;
  }
}

TEST(Quarkonium, ShootingOnUnperturbedPotential) {
  PotentialGrid q;
  q.xs = uniform_grid(10.0, 1e-3);
  q.qs = q.xs;
  auto ref = airy_reference(4);
  RVec E = bound_state_energies(q, 4);
  for (int j = 0; j < 4; ++j) EXPECT_NEAR(E[j], ref[j].E, 1e-8);
}

TEST(Quarkonium, SlopeOnlyPerturbationIsLocal) {
  RVec xs = uniform_grid(12.0, 1e-3);
  auto ref = airy_reference(3);
  QuarkoniumData d = reference_data(ref);
  d.slopes[0] = 1.5;
  auto rec = recover_potential(d, ref, xs);
  EXPECT_GT(max_abs(rec.p), 0.1);
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (xs[i] > ref[0].E + 4.0) EXPECT_LT(std::abs(rec.p[i]), 1e-4) << xs[i];
}

TEST(Quarkonium, RejectsBadData) {
  RVec xs = uniform_grid(2.0, 1e-2);
  QuarkoniumData d;
  d.energies = {3.0, 2.0};
  d.slopes = {1.0, 1.0};
  try {
    recover_potential(d, xs);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ConfigError);
  }
}
