#pragma once

#include <variant>
#include <vector>

#include "critlen/space.hpp"

namespace critlen {

/// Bernstein-like basis relative to (c, d): V_i vanishes exactly i times at c
/// and exactly n - i times at d, with V_i^{(i)}(c) > 0.
///
/// `columns[k]` holds, column by column, the coordinates of V_0..V_n on
/// section k of the space the basis was built in.  Columns are scaled to unit
/// Euclidean norm in section-0 coordinates.
struct BernsteinLikeBasis {
  double c = 0.0;
  double d = 0.0;
  std::vector<Eigen::MatrixXd> columns;

  int dim() const { return columns.empty() ? 0 : static_cast<int>(columns.front().cols()); }
  PiecewiseFunction column(int i) const;
};

struct NoBasisEvidence {
  int i = 0;  // derivatives taken at a
  int j = 0;  // derivatives taken at b
  double det = 0.0;
};

/// Expansion coefficients gamma[i][k][r] of global basis function i on
/// section k in the local basis of that section, at one level of dimension
/// diminishing.  Indices i, r run over 0..size-1 with size = n + 1 - level.
struct GammaTensor {
  int level = 0;
  int size = 0;
  int sections = 0;
  std::vector<double> data;

  GammaTensor() = default;
  GammaTensor(int level_, int size_, int sections_)
      : level(level_), size(size_), sections(sections_),
        data(static_cast<std::size_t>(size_) * size_ * sections_, 0.0) {}

  double& operator()(int i, int k, int r) { return data[index(i, k, r)]; }
  double operator()(int i, int k, int r) const { return data[index(i, k, r)]; }

  /// Entries forced to zero by the endpoint multiplicities of the global basis:
  /// r < i on the first section and r > i on the last one.
  bool is_pattern_zero(int i, int k, int r) const {
    return (k == 0 && r < i) || (k == sections - 1 && r > i);
  }

 private:
  std::size_t index(int i, int k, int r) const {
    return (static_cast<std::size_t>(i) * sections + k) * size + r;
  }
};

/// Default relative tolerances for determinant and positivity decisions.
inline constexpr double kDefaultTolDet = 1e-12;
inline constexpr double kDefaultTolZero = 1e-9;

/// Normalized Step-0 determinants
///   det(U(a), ..., U^{(i-1)}(a), U(b), ..., U^{(j-1)}(b)),  i + j = n + 1,
/// for i = 1..n (entry i-1).  Each functional row is scaled to unit norm after
/// a common column equilibration, so |det| <= 1.
std::vector<double> step0_determinants(const PiecewiseSpace& sp);

/// Local basis on one section, in that section's coordinates.  Throws
/// RankDeficient when the endpoint multiplicities cannot be met exactly and,
/// when `verify_positive` is set, NotPositive if a column changes sign on a
/// 64-point interior sample.
BernsteinLikeBasis local_bernstein_like(const Section& section, bool verify_positive = false,
                                        double tol_det = kDefaultTolDet,
                                        double tol_zero = kDefaultTolZero);
BernsteinLikeBasis local_bernstein_like(const FamilyBasis& fam, double c, double d,
                                        bool verify_positive = false);

/// Global basis relative to (a, b) of the whole piecewise space, or the first
/// Step-0 determinant (in increasing i) found to vanish.
std::variant<BernsteinLikeBasis, NoBasisEvidence> global_bernstein_like(
    const PiecewiseSpace& sp, double tol_det = kDefaultTolDet);

/// Expansion of the global basis in the local bases, one exact square solve
/// per section.  Pattern entries are returned as computed (not zeroed).
GammaTensor level0_expansions(const PiecewiseSpace& sp, const BernsteinLikeBasis& global,
                              const std::vector<BernsteinLikeBasis>& locals);

}  // namespace critlen
