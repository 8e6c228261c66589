#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "errors.hpp"
#include "fourier.hpp"
#include "numerics.hpp"
#include "types.hpp"

namespace invscat::core {

struct WindingResult {
  int index = 0;
  double raw = 0.0;
};

// Winding number of g over the whole real axis, using g(-k) = conj(g(k)) to extend the half-line
// samples. When the grid does not start at 0 the phase at 0 is snapped to the nearest multiple of pi.
inline WindingResult winding_index_detail(const RVec& ks, const CVec& g, double zero_tol = 1e-10,
                                          double guard = 0.1) {
  require_grid(ks, "winding grid");
  if (g.size() != ks.size()) fail(ErrorKind::MalformedGrid, "sample count differs from grid size");
  for (std::size_t i = 0; i < g.size(); ++i)
    if (std::abs(g[i]) < zero_tol)
      fail(ErrorKind::ZeroCrossing, "|g| vanishes at k = " + std::to_string(ks[i]));
  RVec ph(g.size());
  ph.back() = std::arg(g.back());
  for (std::size_t i = g.size() - 1; i-- > 0;) ph[i] = ph[i + 1] + std::arg(g[i] / g[i + 1]);
  double ph0 = ph.front();
  if (ks.front() > 0) ph0 = kPi * std::round(ph0 / kPi);
  WindingResult r;
  r.raw = (ph.back() - ph0) / kPi;
  r.index = static_cast<int>(std::lround(r.raw));
  if (std::abs(r.raw - r.index) > guard)
    fail(ErrorKind::NonIntegerWinding, "winding " + std::to_string(r.raw) + " is not close to an integer");
  return r;
}

inline int winding_index(const RVec& ks, const CVec& g, double zero_tol = 1e-10) {
  return winding_index_detail(ks, g, zero_tol).index;
}

struct FOptions {
  double tail_fraction = 0.25;
  double tail_fit_rtol = 1e-2;
};

// F(x) = (1/2pi) int (1 - S) e^{ikx} dk + sum s_j e^{-k_j x}, evaluated with the half-line symmetry
// as (1/pi) Re int_0^inf (1 - S) e^{ikx} dk. At x = 0 the right-hand limit is returned.
class KernelF {
 public:
  KernelF(const ScatteringData& sd, const FOptions& opt = {}) : sd_(sd) {
    require_grid(sd.ks, "scattering k-grid", 3);
    CVec g(sd.S.size());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = 1.0 - sd.S[i];
    PowerTail tail = fit_power_tail(sd.ks, g, {2, 4}, {1, 3}, opt.tail_fraction);
    // tail diagnostics: relative misfit on the fit window
    double mis = 0.0, mag = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (sd.ks[i] >= opt.tail_fraction * sd.ks.back()) {
        mis = std::max(mis, std::abs(g[i] - tail.value(sd.ks[i])));
        mag = std::max(mag, std::abs(g[i]));
      }
    tail_misfit_ = mag > 0 ? mis / mag : 0.0;
    if (mag > 1e-12 && tail_misfit_ > opt.tail_fit_rtol)
      fail(ErrorKind::TailNotResolved,
           "1 - S is not described by a power tail near k_max (misfit " + std::to_string(tail_misfit_) + ")");
    fourier_ = std::make_unique<HalfLineFourier>(sd.ks, g, tail);
  }

  double continuous(double x) const { return (*fourier_)(x).real() / kPi; }
  double discrete(double x) const {
    double s = 0.0;
    for (std::size_t j = 0; j < sd_.bound_ks.size(); ++j) s += sd_.norming[j] * std::exp(-sd_.bound_ks[j] * x);
    return s;
  }
  double operator()(double x) const { return continuous(x) + discrete(x); }
  double tail_misfit() const { return tail_misfit_; }

 private:
  ScatteringData sd_;
  std::unique_ptr<HalfLineFourier> fourier_;
  double tail_misfit_ = 0.0;
};

struct Check {
  std::string name;
  bool passed = true;
  double value = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<Check> checks;
  int index = 0;
  bool all_passed() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }
  const Check* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

struct ValidationOptions {
  double unitarity_tol = 1e-6;
  double infinity_tol = 0.05;
  double norm_cap = 1e12;
  double F_xmax = 20.0;
  double F_dx = 0.01;
};

// Characterisation checks on scattering data. Condition failures are reported, not thrown.
inline ValidationReport validate_scattering_data(const ScatteringData& sd, const ValidationOptions& opt = {}) {
  require_grid(sd.ks, "scattering k-grid", 3);
  if (sd.S.size() != sd.ks.size()) fail(ErrorKind::MalformedGrid, "S and ks differ in length");
  if (sd.ks.front() < 0) fail(ErrorKind::MalformedGrid, "k-grid must be nonnegative");
  ValidationReport rep;

  double dev = 0.0;
  for (auto s : sd.S) dev = std::max(dev, std::abs(std::abs(s) - 1.0));
  rep.checks.push_back({"unitarity", dev < opt.unitarity_tol, dev, "max ||S|-1|"});

  double inf_dev = std::abs(sd.S.back() - 1.0);
  rep.checks.push_back({"S_at_infinity", inf_dev < opt.infinity_tol, inf_dev, "|S(k_max)-1|"});

  bool order_ok = sd.bound_ks.size() == sd.norming.size();
  for (std::size_t j = 0; j < sd.bound_ks.size() && order_ok; ++j) {
    if (!(sd.bound_ks[j] > 0)) order_ok = false;
    if (j > 0 && !(sd.bound_ks[j] > sd.bound_ks[j - 1])) order_ok = false;
    if (!(sd.norming[j] > 0)) order_ok = false;
  }
  rep.checks.push_back({"bound_state_order", order_ok, static_cast<double>(sd.J()), "ascending k_j, s_j > 0"});

  const int J = static_cast<int>(sd.J());
  try {
    auto w = winding_index_detail(sd.ks, sd.S);
    rep.index = w.index;
    bool ok = (w.index == -2 * J || w.index == -2 * J - 1) && w.index == sd.index;
    rep.checks.push_back({"index", ok, static_cast<double>(w.index), "winding vs -2J / -2J-1 and stored index"});
  } catch (const Error& e) {
    rep.checks.push_back({"index", false, 0.0, e.what()});
  }

  try {
    KernelF F(sd);
    RVec xs = uniform_grid(opt.F_xmax, opt.F_dx);
    RVec Fv(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) Fv[i] = F(xs[i]);
    RVec dF = diff4(Fv, opt.F_dx);
    double l1 = 0, l2 = 0, linf = 0, xl1 = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      double w = (i == 0 || i + 1 == xs.size()) ? 0.5 * opt.F_dx : opt.F_dx;
      l1 += w * std::abs(Fv[i]);
      l2 += w * Fv[i] * Fv[i];
      linf = std::max(linf, std::abs(Fv[i]));
      xl1 += w * xs[i] * std::abs(dF[i]);
    }
    double total = l1 + std::sqrt(l2) + linf + xl1;
    rep.checks.push_back({"F_norms", std::isfinite(total) && total < opt.norm_cap, total,
                          "||F||_2 + ||F||_1 + ||F||_inf + ||xF'||_1"});
  } catch (const Error& e) {
    rep.checks.push_back({"F_norms", false, 0.0, e.what()});
  }
  return rep;
}

}  // namespace invscat::core
