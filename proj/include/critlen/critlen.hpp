#pragma once

// Critical length of a constant-coefficient operator:
//   ell_L = sup { h > 0 : ker L is an EC-space on [0, h] }.
// Computed in two phases: a rough estimate mu with mu*ell0 < ell_L <= (mu+1)*ell0
// from tests on [0, (k+1) ell0] with knots at multiples of ell0, then a
// dichotomy where each probe [0, h] is split into two equal sections.

#include <vector>

#include "critlen/ectest.hpp"

namespace critlen {

/// Thresholds used by the length search.  Entries that touch zero at the
/// critical length vanish quadratically there, so a relative threshold tau
/// shifts the result by roughly sqrt(tau); the search therefore decides on
/// sign alone.
inline constexpr double kSearchTolZero = 1e-30;
inline constexpr double kSearchTolDet = 1e-30;

inline TestConfig search_test_config() {
  TestConfig t;
  t.tol_zero = kSearchTolZero;
  t.tol_det = kSearchTolDet;
  return t;
}

struct CritLenConfig {
  TestConfig test = search_test_config();
  double tol_dicho = 1e-10;
  double ell0_factor = 0.95;  // ell0 = factor * pi / M_L
  int k_max = 64;
  bool keep_trace = true;
};

struct Probe {
  double h = 0.0;
  Verdict verdict = Verdict::Inconclusive;
};

struct CriticalLengthResult {
  enum class Status { Finite, Infinite };
  Status status = Status::Finite;
  double value = 0.0;   // midpoint of the final bracket
  double h_pass = 0.0;  // certified EC length
  double h_fail = 0.0;  // NotEC or Inconclusive length
  int mu = 0;
  double ell0 = 0.0;
  std::vector<Probe> trace;
  bool design = false;
};

/// Largest imaginary part of the roots (M_L); zero when all roots are real.
inline double max_imag(const RootSet& r) { return r.max_imag(); }

/// Verdict of the uniform space of `roots` on [0, h] cut into `pieces` equal
/// sections.
Verdict probe_length(const RootSet& roots, double h, int pieces, const TestConfig& cfg);

/// First k >= 1 for which [0, (k+1) ell0] with knots at j*ell0 is not EC.
/// Throws Exhausted when every k <= k_max passes.
int rough_estimate(const RootSet& roots, double ell0, int k_max, const TestConfig& cfg = search_test_config(),
                   std::vector<Probe>* trace = nullptr);

/// Bisection on ]mu*ell0, (mu+1)*ell0] with two equal sections per probe.
CriticalLengthResult dichotomy(const RootSet& roots, int mu, double ell0, double tol,
                               const TestConfig& cfg = search_test_config(), bool keep_trace = true);

CriticalLengthResult critical_length(const RootSet& roots, const CritLenConfig& cfg = {});
CriticalLengthResult critical_length(const CharPoly& p, const CritLenConfig& cfg = {});

/// Critical length of p(x) / x; the kernel of p must contain the constants.
CriticalLengthResult critical_length_for_design(const RootSet& roots,
                                                const CritLenConfig& cfg = {});
CriticalLengthResult critical_length_for_design(const CharPoly& p,
                                                const CritLenConfig& cfg = {});

}  // namespace critlen
