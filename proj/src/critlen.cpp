#include "critlen/critlen.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "critlen/error.hpp"

namespace critlen {

Verdict probe_length(const RootSet& roots, double h, int pieces, const TestConfig& cfg) {
  std::vector<double> knots;
  for (int j = 1; j < pieces; ++j) knots.push_back(h * j / pieces);
  // Every probe keeps its sections below the critical length, so each one is
  // EC on its own and the sections are used as they are.
  TestConfig probe = cfg;
  probe.subdivide = false;
  try {
    return ec_test(make_uniform(roots, 0.0, knots, h), probe).verdict;
  } catch (const Error&) {
    return Verdict::Inconclusive;
  }
}

int rough_estimate(const RootSet& roots, double ell0, int k_max, const TestConfig& cfg,
                   std::vector<Probe>* trace) {
  const double m = roots.max_imag();
  if (!(ell0 > 0.0) || (m > 0.0 && !(ell0 < std::numbers::pi / m)))
    throw Error(ErrorKind::InvalidInput, "ell0 must lie in ]0, pi / M_L[");
  for (int k = 1; k <= k_max; ++k) {
    const double h = (k + 1) * ell0;
    const Verdict v = probe_length(roots, h, k + 1, cfg);
    if (trace) trace->push_back({h, v});
    if (v != Verdict::EC) return k;
  }
  throw Error(ErrorKind::Exhausted,
              fmt::format("no failure up to [0, {}]; the critical length may be infinite",
                          (k_max + 1) * ell0));
}

CriticalLengthResult dichotomy(const RootSet& roots, int mu, double ell0, double tol,
                               const TestConfig& cfg, bool keep_trace) {
  if (mu < 1) throw Error(ErrorKind::InvalidInput, "dichotomy needs mu >= 1");
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidInput, "dichotomy tolerance must be > 0");
  CriticalLengthResult res;
  res.mu = mu;
  res.ell0 = ell0;
  res.h_pass = mu * ell0;
  res.h_fail = (mu + 1) * ell0;
  double step = ell0 / 2.0;
  double h = res.h_pass + step;
  while (res.h_fail - res.h_pass > tol) {
    const Verdict v = probe_length(roots, h, 2, cfg);
    if (keep_trace) res.trace.push_back({h, v});
    if (v == Verdict::EC)
      res.h_pass = h;
    else
      res.h_fail = h;
    step /= 2.0;
    h = v == Verdict::EC ? h + step : h - step;
    if (step == 0.0) break;
  }
  res.value = 0.5 * (res.h_pass + res.h_fail);
  return res;
}

CriticalLengthResult critical_length(const RootSet& roots, const CritLenConfig& cfg) {
  roots.validate();
  if (roots.degree() < 2) throw Error(ErrorKind::InvalidInput, "critical length needs degree >= 2");
  if (!(cfg.ell0_factor > 0.0 && cfg.ell0_factor < 1.0))
    throw Error(ErrorKind::InvalidInput, "ell0 factor must lie in ]0, 1[");
  const double m = roots.max_imag();
  if (m == 0.0) {
    CriticalLengthResult res;
    res.status = CriticalLengthResult::Status::Infinite;
    res.value = std::numeric_limits<double>::infinity();
    res.h_pass = std::numeric_limits<double>::infinity();
    res.h_fail = std::numeric_limits<double>::infinity();
    return res;
  }
  const double ell0 = cfg.ell0_factor * std::numbers::pi / m;
  std::vector<Probe> rough;
  const int mu = rough_estimate(roots, ell0, cfg.k_max, cfg.test, &rough);
  CriticalLengthResult res = dichotomy(roots, mu, ell0, cfg.tol_dicho, cfg.test, cfg.keep_trace);
  if (cfg.keep_trace) res.trace.insert(res.trace.begin(), rough.begin(), rough.end());
  return res;
}

CriticalLengthResult critical_length(const CharPoly& p, const CritLenConfig& cfg) {
  return critical_length(find_roots(p), cfg);
}

CriticalLengthResult critical_length_for_design(const RootSet& roots, const CritLenConfig& cfg) {
  if (roots.zero_multiplicity() == 0)
    throw Error(ErrorKind::NotDesignSpace, "p(0) != 0: the kernel has no constants");
  CriticalLengthResult res = critical_length(roots.deflated(), cfg);
  res.design = true;
  return res;
}

CriticalLengthResult critical_length_for_design(const CharPoly& p, const CritLenConfig& cfg) {
  p.validate();
  if (p.coeffs.front() != 0.0)
    throw Error(ErrorKind::NotDesignSpace, "p(0) != 0: the kernel has no constants");
  return critical_length_for_design(find_roots(p), cfg);
}

}  // namespace critlen
