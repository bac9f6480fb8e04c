#pragma once

// Design-side objects of an EC-space on [a, b]: expansion of the constant
// function in a Bernstein-like basis, the Bernstein basis and its transition
// functions, the derived basis, the weight system produced by the test, and
// curves.

#include <vector>

#include "critlen/ectest.hpp"
#include "critlen/jet.hpp"

namespace critlen {

/// Bernstein basis B_i = alpha_i V_i of a space containing the constants.
struct NormalizedBasis {
  PiecewiseSpace space;
  BernsteinLikeBasis base;
  std::vector<double> alphas;

  int dim() const { return static_cast<int>(alphas.size()); }
  double a() const { return space.a(); }
  double b() const { return space.b(); }
  PiecewiseFunction function(int i) const;
  /// B_0^{(order)}(x), ..., B_n^{(order)}(x).
  std::vector<double> eval(double x, int order = 0) const;
};

/// Coefficients of 1 = sum alpha_i V_i.  Throws ConstantsAbsent when the
/// constant function is not in the space and NotGoodForDesign when some
/// alpha_i <= tol_zero * max |alpha|.
std::vector<double> expand_unity(const PiecewiseSpace& sp, const BernsteinLikeBasis& blb,
                                 double tol_zero = kDefaultTolZero);

/// Throws RankDeficient when no Bernstein-like basis exists, the errors of
/// expand_unity, and NotPositive if some B_i is negative at one of 128
/// interior samples.
NormalizedBasis bernstein_basis(const PiecewiseSpace& sp, double tol_det = kDefaultTolDet,
                                double tol_zero = kDefaultTolZero);
NormalizedBasis bernstein_basis(const RootSet& roots, double a, double b);

/// B_i^* = B_i + ... + B_n, i = 0..n.
std::vector<PiecewiseFunction> transition_functions(const NormalizedBasis& nb);

/// Vbar_i = D B_{i+1}^*, i = 0..n-1: a Bernstein-like basis of the derived
/// space.  Columns are coordinates in the families of the original space
/// (n + 1 rows, n columns per section).
BernsteinLikeBasis derived_basis(const NormalizedBasis& nb);

/// Weights w_0..w_n read off the global bases of the successive levels of the
/// test: w_p is the sum of the level-p global basis.
class WeightSystem {
 public:
  WeightSystem(PiecewiseSpace sp, BernsteinLikeBasis global);

  int order() const { return sp_.order(); }
  double a() const { return sp_.a(); }
  double b() const { return sp_.b(); }
  const PiecewiseSpace& space() const { return sp_; }

  /// Level-p global basis V_0^{p}..V_{n-p}^{p} at x.
  std::vector<double> level_basis(int p, double x) const;
  /// Bernstein basis of L_p E at x (level-p basis divided by its sum).
  std::vector<double> bernstein(int p, double x) const;
  /// w_p(x), scaled so that w_p(a) = 1.
  double weight(int p, double x) const;

  /// Jets of the level-p global basis at x, of order n - p.
  std::vector<Jet> level_jets(int p, double x) const;

 private:
  PiecewiseSpace sp_;
  std::vector<PiecewiseFunction> v0_;
  std::vector<double> scale_;
};

/// Requires an EC report built with TestConfig::keep_levels; throws
/// LevelsMissing otherwise and NotPositive if some w_p is not positive at 128
/// samples of [a, b].
WeightSystem weight_system(const ECTestReport& report, const PiecewiseSpace& sp);

/// Points sum_i B_i(x) P_i at `samples` equally spaced abscissae of [a, b].
std::vector<std::vector<double>> eval_curve(const NormalizedBasis& nb,
                                            const std::vector<std::vector<double>>& control,
                                            int samples);

/// Rebuilds each level-(p-1) Bernstein basis from level p by the integral
/// recurrence and returns the largest deviation from the direct evaluation,
/// over `samples` equally spaced abscissae and all levels.  Integrals use
/// adaptive Gauss-Kronrod quadrature (tolerance 1e-9); throws
/// QuadratureFailure when an error estimate stays above 1e-7.
double irr_check(const WeightSystem& ws, int samples = 33);

}  // namespace critlen
