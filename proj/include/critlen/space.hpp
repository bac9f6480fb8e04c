#pragma once

// A space E on [t_0, t_{q+1}] whose restriction to each [t_k, t_{k+1}] is the
// kernel E_k of some operator, glued with C^n continuity at interior knots.
//
// Each section stores coordinates relative to its own origin (the section
// midpoint): a member F restricted to section k is
//   F(x) = sum_t c_t * term_t(x - origin_k).
// Transfer matrices map section-k coordinates to section-(k+1) coordinates of
// the same global member.

#include <string>
#include <utility>
#include <vector>

#include "critlen/expfam.hpp"

namespace critlen {

struct Section {
  FamilyBasis fam;
  double left = 0.0;
  double right = 0.0;

  double origin() const { return 0.5 * (left + right); }
  double length() const { return right - left; }

  /// Derivatives 0..max_order of every family term at global abscissa x.
  Eigen::MatrixXd derivative_matrix(double x, int max_order) const {
    return fam.derivative_matrix(x - origin(), max_order);
  }
};

/// One coordinate vector per section.
struct PiecewiseFunction {
  std::vector<CoefVec> coefs;
};

class PiecewiseSpace {
 public:
  PiecewiseSpace(std::vector<Section> sections, std::vector<Eigen::MatrixXd> transfer,
                 std::vector<double> conditions, std::vector<std::string> warnings);

  /// n + 1
  int dim() const { return sections_.front().fam.dim(); }
  int order() const { return dim() - 1; }
  int num_sections() const { return static_cast<int>(sections_.size()); }
  double a() const { return sections_.front().left; }
  double b() const { return sections_.back().right; }
  std::vector<double> knots() const;  // t_0 .. t_{q+1}

  const Section& section(int k) const { return sections_[k]; }
  const std::vector<Section>& sections() const { return sections_; }
  const Eigen::MatrixXd& transfer(int k) const { return transfer_[k]; }
  const std::vector<double>& transfer_conditions() const { return conditions_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  /// Section owning x; a knot belongs to the section on its left.
  int section_of(double x) const;

  /// Maps section-0 coordinates to coordinates on every section.
  PiecewiseFunction propagate(const CoefVec& c0) const;
  /// Same for each column of C0.
  std::vector<Eigen::MatrixXd> propagate_columns(const Eigen::MatrixXd& c0) const;

  /// F^{(order)}(x) evaluated on section k (no continuity restriction).
  double eval_on(const PiecewiseFunction& f, int k, double x, int order) const;
  /// F^{(order)}(x) on the owning section.
  double eval(const PiecewiseFunction& f, double x, int order) const;
  /// Derivatives 0..max_order at x on the owning section.
  std::vector<double> derivatives(const PiecewiseFunction& f, double x, int max_order) const;
  /// Derivative of f, section by section.
  PiecewiseFunction differentiate(const PiecewiseFunction& f) const;

 private:
  std::vector<Section> sections_;
  std::vector<Eigen::MatrixXd> transfer_;
  std::vector<double> conditions_;
  std::vector<std::string> warnings_;
};

/// Member of the global space, determined by its section-0 coordinates.
/// Propagated coordinates are computed on demand and cached.
class GlobalMember {
 public:
  explicit GlobalMember(CoefVec c0) : c0_(std::move(c0)) {}

  const CoefVec& c0() const { return c0_; }
  const CoefVec& on_section(const PiecewiseSpace& sp, int k) const;

 private:
  CoefVec c0_;
  mutable std::vector<CoefVec> cache_;
};

/// Restriction of a single kernel to [a, b] with the given interior knots.
PiecewiseSpace make_uniform(const RootSet& roots, double a, const std::vector<double>& knots,
                            double b);

struct SectionSpec {
  RootSet roots;
  double length = 0.0;
};

/// C^n splice of kernels of equal dimension, starting at `start`.
PiecewiseSpace make_spliced(const std::vector<SectionSpec>& sections, double start = 0.0);

/// Same space with section k cut into pieces[k] equal sections.
PiecewiseSpace subdivide(const PiecewiseSpace& sp, const std::vector<int>& pieces);

/// Length below which a section of this kernel is EC on its own: pi / M for
/// the largest imaginary part M of the roots, infinite for real roots.
double safe_section_length(const FamilyBasis& fam);

/// Threshold above which a matching matrix is reported as ill-conditioned.
inline constexpr double kTransferConditionWarning = 1e12;

/// F^{(order)}(x) for a global member; order must not exceed n.
double eval_member(const PiecewiseSpace& sp, const GlobalMember& m, double x, int order);

}  // namespace critlen
