#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "numerics.hpp"

namespace invscat {

enum class DecayClass { Compact, L11, Confining };

inline const char* to_string(DecayClass c) {
  switch (c) {
    case DecayClass::Compact: return "compact";
    case DecayClass::L11: return "L11";
    case DecayClass::Confining: return "confining";
  }
  return "L11";
}

inline DecayClass decay_class_from_string(const std::string& s) {
  if (s == "compact") return DecayClass::Compact;
  if (s == "L11") return DecayClass::L11;
  if (s == "confining") return DecayClass::Confining;
  fail(ErrorKind::ConfigError, "unknown decay class '" + s + "'");
}

struct PotentialGrid {
  RVec xs;
  RVec qs;
  std::optional<double> support_radius;
  DecayClass decay_class = DecayClass::L11;

  double h() const { return xs.size() > 1 ? xs[1] - xs[0] : 0.0; }
  double at(double x) const {
    if (x > xs.back()) return 0.0;
    return lagrange_interp(xs, qs, x, 3);
  }
};

// Sample q on a uniform grid of [0, X].
inline PotentialGrid make_potential(const std::function<double(double)>& q, double X, double dx,
                                    DecayClass cls = DecayClass::L11,
                                    std::optional<double> support = std::nullopt) {
  PotentialGrid p;
  p.xs = uniform_grid(X, dx);
  p.qs.resize(p.xs.size());
  for (std::size_t i = 0; i < p.xs.size(); ++i) p.qs[i] = q(p.xs[i]);
  p.decay_class = cls;
  p.support_radius = support;
  return p;
}

struct PotentialCheck {
  bool ok = true;
  double weighted_norm = 0.0;
  std::string message;
};

// Invariants of PotentialGrid; throws MalformedGrid for structural problems.
inline PotentialCheck validate_potential(const PotentialGrid& p, double l11_cap = 1e8) {
  require_grid(p.xs, "potential grid");
  if (p.qs.size() != p.xs.size()) fail(ErrorKind::MalformedGrid, "qs and xs differ in length");
  if (p.xs.front() != 0.0) fail(ErrorKind::MalformedGrid, "potential grid must start at x = 0");
  PotentialCheck c;
  for (double q : p.qs)
    if (!std::isfinite(q)) fail(ErrorKind::MalformedGrid, "non-finite potential sample");
  if (p.decay_class == DecayClass::Compact) {
    if (!p.support_radius || *p.support_radius <= 0)
      fail(ErrorKind::MalformedGrid, "compact potential requires a positive support radius");
    for (std::size_t i = 0; i < p.xs.size(); ++i)
      if (p.xs[i] > *p.support_radius * (1 + 1e-12) && p.qs[i] != 0.0) {
        c.ok = false;
        c.message = "nonzero sample beyond the support radius";
      }
  }
  for (std::size_t i = 0; i + 1 < p.xs.size(); ++i) {
    double dx = p.xs[i + 1] - p.xs[i];
    c.weighted_norm += 0.5 * dx * ((1 + p.xs[i]) * std::abs(p.qs[i]) + (1 + p.xs[i + 1]) * std::abs(p.qs[i + 1]));
  }
  if (p.decay_class == DecayClass::L11 && !(c.weighted_norm < l11_cap)) {
    c.ok = false;
    c.message = "weighted L1 norm exceeds cap";
  }
  return c;
}

struct ScatteringData {
  RVec ks;           // nonnegative, increasing; ks[0] = 0 recommended
  CVec S;
  RVec bound_ks;     // ascending
  RVec norming;      // s_j, same order as bound_ks
  int index = 0;

  std::size_t J() const { return bound_ks.size(); }
  bool resonance() const { return index == -2 * static_cast<int>(J()) - 1; }
};

struct JostData {
  RVec ks;
  CVec f;
  CVec fprime0;      // optional (empty when absent)
  RVec bound_ks;
  CVec fdot_at_bound;
  RVec fprime_at_bound;  // f'(0, i k_j), optional
  bool resonance = false;
};

struct DiscretePoint {
  double lambda;  // -k_j^2
  double c;
};

struct SpectralFunction {
  RVec lambdas;
  RVec density;
  std::vector<DiscretePoint> discrete_points;
  bool resonance = false;
};

struct IFunction {
  RVec ks;
  CVec I;
  RVec poles;       // k_j (poles at i k_j)
  CVec residues;    // a_j
  bool resonance = false;
  cplx a0 = 0.0;
};

enum class KernelKind { MarchenkoA, GlK, FixedEnergyK };

inline const char* to_string(KernelKind k) {
  switch (k) {
    case KernelKind::MarchenkoA: return "marchenko_A";
    case KernelKind::GlK: return "gl_K";
    case KernelKind::FixedEnergyK: return "fixed_energy_K";
  }
  return "gl_K";
}

// Kernel samples. For MarchenkoA, values[i][m] = A(xs[i], xs[i] + m*dy).
// For GlK / FixedEnergyK, values[i][m] = K(xs[i], xs[m]) for m <= i.
struct TransformationKernel {
  RVec xs;
  std::vector<RVec> values;
  RVec diagonal;
  KernelKind kind = KernelKind::GlK;
  double dy = 0.0;

  double marchenko_at(std::size_t i, double y) const {
    const RVec& row = values[i];
    if (row.empty()) fail(ErrorKind::ConfigError, "row " + std::to_string(i) + " of A was not stored");
    double s = (y - xs[i]) / dy;
    if (s < 0) s = 0;
    if (s >= static_cast<double>(row.size() - 1)) return 0.0;
    UniformInterpolator ip{0.0, 1.0, row, 5};
    return ip(s);
  }
};

enum class WaveKind { JostF, RegularPhi, Theta };

struct WaveFunctionTable {
  RVec xs;
  RVec ks;
  std::vector<CVec> values;       // values[m][i] = psi(xs[i], ks[m])
  std::vector<CVec> derivatives;  // same layout, psi'(x, k)
  WaveKind kind = WaveKind::JostF;
};

struct KreinKernel {
  RVec ts;
  RVec H;
  double Htilde_min = 1.0;
};

struct PhaseShiftSequence {
  std::vector<int> ells;
  RVec deltas;
  CVec a_ells;
};

struct QuarkoniumData {
  RVec energies;
  RVec slopes;
  std::size_t J() const { return energies.size(); }
};

}  // namespace invscat
