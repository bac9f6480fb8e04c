#pragma once

// Independent reference values: Bessel zeros, closed-form critical-length
// equations of four-dimensional kernels, Wronskian zero scans and a
// brute-force determinant check of the EC property.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "critlen/ectest.hpp"

namespace critlen {

struct OracleValue {
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  std::string method;
};

/// Bisection of a continuous f on [lo, hi] with f(lo) f(hi) < 0, down to
/// hi - lo <= 1e-12 max(1, |x|).  Throws NoSignChange otherwise.
OracleValue bisect_root(const std::function<double(double)>& f, double lo, double hi,
                        const std::string& method);

/// J_nu(x) / (x/2)^nu from its power series.
double bessel_j_scaled(double nu, double x);

/// First positive zero of J_nu, 0 <= nu <= 10: scan with step pi/64, then
/// bisection.
OracleValue bessel_first_zero(double nu);

enum class ClosedForm {
  ZH3,         // (b^2 - a^2) sinh(ax) sin(bx) = 2ab (1 - cosh(ax) cos(bx)) on ]pi/b, 2pi/b[
  DTRIG_LOW,   // b sin(ax) = a sin(bx) on [pi/b floor(b/a), pi/b ceil(b/a)], a < b <= 3a
  DTRIG_HIGH,  // (b-a) sin((b+a)x/2) + (b+a) sin((b-a)x/2) = 0 on ]2pi/b, 2pi/(b-a)[, b >= 3a
  ZS9,         // b tanh(ax) = a tan(bx) on ]pi/b, 3pi/(2b)[
  HT1,         // cot T + coth H = 0 solved for H, with T = a in ]3pi/4, pi[
};

const char* to_string(ClosedForm c);
std::optional<ClosedForm> closed_form_from_string(const std::string& s);

/// Throws OutOfRegime when the parameters leave the validity region.
OracleValue solve_closed_form(ClosedForm c, double a, double b = 0.0);

/// S^{(0..max_order)}(h) for the kernel element S with S^{(j)}(0) = 0 for
/// j < n and S^{(n)}(0) = 1.
std::vector<double> normalized_solution_derivatives(const CharPoly& p, double h, int max_order);

/// W(S, S', ..., S^{(k)})(h).
double wronskian(const CharPoly& p, int k, double h);

/// First positive zero of W(S, ..., S^{(k)}) below h_max, scanning with the
/// given step.  Zeros where W touches 0 without changing sign are located as
/// minima of |W| below 1e-9 times the largest |W| seen so far.
std::optional<OracleValue> wronskian_scan(const CharPoly& p, int k, double h_max,
                                          double step = 0.0);

/// Smallest first zero over k = 0..floor((n-1)/2) (reflection-invariant
/// kernels) or k = 0..n-1 (general case).
std::optional<OracleValue> wronskian_critical_length(const CharPoly& p, double h_max,
                                                     bool symmetric = true);

struct BruteForceResult {
  Verdict verdict = Verdict::EC;
  int det_i = -1;           // offending determinant, if any
  double x = 0.0, y = 0.0;  // where it was found
  double min_ratio = 0.0;   // smallest |normalized det| / largest, over all i
  bool sign_change = false; // some determinant takes both signs on the grid
};

/// Definition-level check: every determinant
///   det(U(x), ..., U^{(i-1)}(x), U(y), ..., U^{(j-1)}(y)),  i + j = n + 1,
/// keeps a strict sign over all grid pairs x < y of [a, b] (grid + 1 points).
/// Determinants are divided by (y - x)^{ij} so that they stay bounded away
/// from 0 along the diagonal; a value below `near_zero` times the largest one
/// counts as a zero.  A sampled, necessary check only.
BruteForceResult brute_force_ec(const PiecewiseSpace& sp, int grid = 200,
                                double near_zero = 1e-4);
BruteForceResult brute_force_ec_serial(const PiecewiseSpace& sp, int grid = 200,
                                       double near_zero = 1e-4);

}  // namespace critlen
