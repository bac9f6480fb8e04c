#pragma once

// Numerical EC-space test for a piecewise space: Step-0 determinants, then
// positivity of the local expansions of the global Bernstein-like basis,
// propagated level by level through the dimension-diminishing recursion on
// the expansion coefficients.

#include <optional>
#include <string>
#include <vector>

#include "critlen/bernlike.hpp"

namespace critlen {

enum class Verdict { EC, NotEC, Inconclusive };

const char* to_string(Verdict v);

struct TestConfig {
  double tol_zero = kDefaultTolZero;
  double tol_det = kDefaultTolDet;
  bool keep_levels = false;
  /// Cut sections that are too long to be EC on their own (see
  /// safe_section_length) before testing.  Callers that already keep every
  /// section below its critical length may switch this off.
  bool subdivide = true;
};

struct PositivityVerdict {
  enum class Kind { Pass, Fail, Deadband };
  Kind kind = Kind::Pass;
  int i = -1, k = -1, r = -1;
  /// Smallest scaled non-pattern entry (entry / max |row|).
  double margin = 0.0;
};

/// Non-pattern entries are scaled by the largest |gamma[i][k][.]|; a scaled
/// value above 10*tol passes, one below tol/10 fails, anything in between is
/// in the dead-band.  The first failing entry in (i, k, r) order wins over any
/// dead-band entry.
PositivityVerdict positivity_verdict(const GammaTensor& g, double tol);

/// Coefficients at level p + 1 from those at level p, using the weight equal
/// to the sum of the level-p global basis.  Throws ZeroDenominator when a
/// column sum is not positive.
GammaTensor gamma_step(const GammaTensor& g);

struct TestFailure {
  enum class Stage { Step0, Level, Section };
  Stage stage = Stage::Step0;
  int level = 0;
  int i = -1, k = -1, r = -1;  // gamma witness (Level)
  int det_i = -1, det_j = -1;  // determinant witness (Step0)
  double value = 0.0;
};

struct ECTestReport {
  Verdict verdict = Verdict::Inconclusive;
  std::optional<TestFailure> failure;
  std::vector<double> margins;            // per level reached
  std::vector<double> step0;              // normalized Step-0 determinants
  double pattern_residual = 0.0;          // largest scaled level-0 pattern entry
  std::vector<GammaTensor> levels;        // kept when TestConfig::keep_levels
  std::optional<BernsteinLikeBasis> global;
  std::vector<BernsteinLikeBasis> locals;
  /// Space actually tested when sections were cut; global, locals and levels
  /// refer to its sections.
  std::optional<PiecewiseSpace> tested;
  std::string note;
};

/// Requires every section to be EC on its own interval.  With
/// TestConfig::subdivide this holds by construction; otherwise a section
/// without a local Bernstein-like basis yields Inconclusive.
ECTestReport ec_test(const PiecewiseSpace& sp, const TestConfig& cfg = {});

}  // namespace critlen
