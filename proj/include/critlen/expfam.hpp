#pragma once

// Exponential-polynomial kernels of constant-coefficient operators
//   L = D^{n+1} + a_n D^n + ... + a_0.
// The kernel is spanned by x^j e^{ax} cos(bx), x^j e^{ax} sin(bx) (complex
// roots a +/- ib) and x^j e^{ax} (real roots a), j below the multiplicity.

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace critlen {

using CoefVec = Eigen::VectorXd;

struct Root {
  double re = 0.0;
  double im = 0.0;  // >= 0; a positive value stands for the pair re +/- i*im
  int mult = 1;

  bool is_real() const { return im == 0.0; }
  friend bool operator==(const Root&, const Root&) = default;
};

/// Root multiset of a real polynomial, conjugate pairs stored once.
struct RootSet {
  std::vector<Root> entries;

  /// Degree of the polynomial the roots come from.
  int degree() const;
  /// Largest imaginary part over all roots (0 when every root is real).
  double max_imag() const;
  bool all_real() const { return max_imag() == 0.0; }
  /// Multiplicity of the root 0.
  int zero_multiplicity() const;
  /// Same roots with 0 removed once (p(x) / x).  Requires p(0) = 0.
  RootSet deflated() const;
  /// Roots multiplied by s > 0, i.e. the kernel after x -> s x.
  RootSet scaled(double s) const;

  void validate() const;
};

/// Monic characteristic polynomial x^{n+1} + a_n x^n + ... + a_0.
struct CharPoly {
  std::vector<double> coeffs;  // a_0 .. a_n

  int degree() const { return static_cast<int>(coeffs.size()); }
  std::complex<double> eval(std::complex<double> z) const;
  void validate() const;

  static CharPoly from_roots(const RootSet& roots);
};

/// Companion-matrix eigenvalues with one Newton polish per root, exact
/// extraction of zero roots (trailing zero coefficients) and clustering of
/// nearby roots into multiplicities.  `cluster_tol` is relative to the
/// largest root magnitude.
RootSet find_roots(const CharPoly& p, double cluster_tol = 1e-8);

enum class TermKind { Exp = 0, Cos = 1, Sin = 2 };

struct Term {
  int power = 0;
  double alpha = 0.0;
  double beta = 0.0;
  TermKind kind = TermKind::Exp;

  /// x^power e^{alpha x} {1, cos, sin}(beta x)
  double eval(double x) const;
  friend bool operator==(const Term&, const Term&) = default;
};

/// Canonical real basis of ker L together with the exact matrix of D in that
/// basis: if v holds the coordinates of F, diff_op() * v holds those of F'.
///
/// Terms are ordered by (beta, alpha, kind, power): polynomial and real
/// exponential parts first, then oscillating pairs by increasing frequency.
class FamilyBasis {
 public:
  FamilyBasis() = default;
  explicit FamilyBasis(const RootSet& roots);

  int dim() const { return static_cast<int>(terms_.size()); }
  const std::vector<Term>& terms() const { return terms_; }
  const Eigen::MatrixXd& diff_op() const { return diff_op_; }
  const RootSet& roots() const { return roots_; }

  /// Index of the constant term (power 0, alpha = beta = 0), if present.
  std::optional<int> constant_index() const;

  /// Values of all terms at x.
  Eigen::RowVectorXd term_values(double x) const;

  /// Row r holds the r-th derivative of every term at x, r = 0..max_order.
  Eigen::MatrixXd derivative_matrix(double x, int max_order) const;

  /// F(x), F'(x), ..., F^{(max_order)}(x) for F with coordinates v, using
  /// powers of diff_op().  max_order is capped at 2 * dim().
  std::vector<double> eval_derivatives(const CoefVec& v, double x,
                                       int max_order) const;

  /// Coordinates of the translate x -> F(x + shift).
  CoefVec translate(const CoefVec& v, double shift) const;

 private:
  RootSet roots_;
  std::vector<Term> terms_;
  Eigen::MatrixXd diff_op_;
};

inline FamilyBasis build_family(const RootSet& roots) {
  return FamilyBasis(roots);
}

}  // namespace critlen
