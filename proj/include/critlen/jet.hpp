#pragma once

// Truncated Taylor expansions at a point.  c[k] holds f^{(k)}(x0) / k!, so
// products and quotients are plain Cauchy products and series divisions.

#include <vector>

namespace critlen {

class Jet {
 public:
  Jet() = default;
  explicit Jet(int order, double value = 0.0);
  /// From plain derivatives f(x0), f'(x0), ..., f^{(m)}(x0).
  static Jet from_derivatives(const std::vector<double>& d);

  int order() const { return static_cast<int>(c_.size()) - 1; }
  double value() const { return c_.front(); }
  double operator[](int k) const { return c_[k]; }
  double& operator[](int k) { return c_[k]; }
  /// k-th derivative at x0.
  double derivative(int k) const;

  /// Derivative; the order drops by one.
  Jet diff() const;
  Jet truncated(int order) const;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(double s);
  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(const Jet& a, const Jet& b);
  /// Throws ZeroDenominator when b(x0) == 0.
  friend Jet operator/(const Jet& a, const Jet& b);

 private:
  std::vector<double> c_;
};

/// One step of dimension diminishing on a Bernstein-like basis given by jets:
/// with w = sum alpha_j V_j and B_j = alpha_j V_j / w, returns
/// Vbar_i = D(B_{i+1} + ... + B_m) for i = 0..m-1.
std::vector<Jet> diminish(const std::vector<Jet>& basis, const std::vector<double>& alphas);

/// Same with all weights equal to one.
std::vector<Jet> diminish(const std::vector<Jet>& basis);

}  // namespace critlen
