#pragma once

// Boundary response of u_tt = u_xx - q u (q = 0 beyond x = 1) to a unit impulse at x = 0, measured at
// x = 1, converted to the Jost function f(k) = e^{ik} / A(k), A(k) = int_0^inf a(t) e^{ikt} dt.

#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "fourier.hpp"
#include "numerics.hpp"
#include "types.hpp"

namespace invscat::wave {

struct Impulse {
  double t = 0.0;
  double weight = 0.0;
};

// a(t) = sum of impulses + the sampled regular part on [ts.front(), ts.back()]; beyond the last sample
// the regular part is taken as constant at its settled level (zero unless a resonance is present).
struct WaveResponse {
  RVec ts;
  RVec a;
  std::vector<Impulse> impulses;
};

struct WaveReductionOptions {
  double zero_tol = 1e-10;     // |A(k)| below this raises ZeroResponse
  double level_tol = 1e-6;     // |tail level| above this (relative to max|a|) means f(0) = 0
  double settle_tol = 1e-3;    // allowed relative spread of the tail samples around their level
  double tail_fraction = 0.05;
};

struct WaveReduction {
  JostData jost;
  CVec A;
  double tail_level = 0.0;
};

inline WaveReduction wave_reduction(const WaveResponse& r, const RVec& ks, const WaveReductionOptions& opt = {}) {
  require_grid(ks, "k-grid", 2);
  if (ks.front() < 0) fail(ErrorKind::MalformedGrid, "k-grid must be nonnegative");
  const bool sampled = !r.ts.empty();
  if (sampled) {
    require_grid(r.ts, "response time grid", 3);
    if (r.a.size() != r.ts.size()) fail(ErrorKind::MalformedGrid, "a and ts differ in length");
  }
  if (!sampled && r.impulses.empty()) fail(ErrorKind::ZeroResponse, "empty response");

  WaveReduction out;
  double amax = sampled ? max_abs(r.a) : 0.0;
  if (sampled && amax > 0) {
    const auto n = r.a.size();
    const auto m = std::max<std::size_t>(3, static_cast<std::size_t>(opt.tail_fraction * static_cast<double>(n)));
    double level = 0.0;
    for (std::size_t i = n - m; i < n; ++i) level += r.a[i];
    level /= static_cast<double>(m);
    double spread = 0.0;
    for (std::size_t i = n - m; i < n; ++i) spread = std::max(spread, std::abs(r.a[i] - level));
    if (spread > opt.settle_tol * amax)
      fail(ErrorKind::DivergentTail, "the response has not settled by t = " + std::to_string(r.ts.back()) +
                                         " (growing responses from bound states are not supported)");
    if (std::abs(level) > opt.level_tol * amax) out.tail_level = level;
  }

  CVec regular(sampled ? r.ts.size() : 0);
  for (std::size_t i = 0; i < regular.size(); ++i) regular[i] = r.a[i];
  std::optional<FilonTransform> filon;
  if (sampled) filon.emplace(r.ts, regular);

  JostData& jd = out.jost;
  jd.ks = ks;
  jd.resonance = out.tail_level != 0.0;
  jd.f.resize(ks.size());
  out.A.resize(ks.size());
  for (std::size_t m = 0; m < ks.size(); ++m) {
    const double k = ks[m];
    if (jd.resonance && k == 0.0) {
      out.A[m] = cplx(std::numeric_limits<double>::infinity(), 0.0);
      jd.f[m] = 0.0;
      continue;
    }
    cplx A = 0.0;
    for (const auto& p : r.impulses) A += p.weight * std::polar(1.0, k * p.t);
    if (filon) A += (*filon)(k);
    if (jd.resonance) A += out.tail_level * kI * std::polar(1.0, k * r.ts.back()) / k;
    if (std::abs(A) < opt.zero_tol) fail(ErrorKind::ZeroResponse, "|A(k)| vanishes at k = " + std::to_string(k));
    out.A[m] = A;
    jd.f[m] = std::polar(1.0, k) / A;
  }
  return out;
}

// S = f(-k)/f(k) with the index set by the resonance flag; no bound states.
inline ScatteringData scattering_from_response(const WaveReduction& w) {
  ScatteringData sd;
  sd.ks = w.jost.ks;
  sd.S.resize(sd.ks.size());
  for (std::size_t i = 0; i < sd.ks.size(); ++i)
    sd.S[i] = w.jost.resonance && sd.ks[i] == 0.0 ? cplx(-1.0) : std::conj(w.jost.f[i]) / w.jost.f[i];
  sd.index = w.jost.resonance ? -1 : 0;
  return sd;
}

}  // namespace invscat::wave
