#include "critlen/jet.hpp"

#include <algorithm>

#include "critlen/error.hpp"

namespace critlen {

Jet::Jet(int order, double value) : c_(static_cast<std::size_t>(order) + 1, 0.0) {
  c_[0] = value;
}

Jet Jet::from_derivatives(const std::vector<double>& d) {
  if (d.empty()) throw Error(ErrorKind::InvalidInput, "empty derivative list");
  Jet j(static_cast<int>(d.size()) - 1);
  double fact = 1.0;
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (k > 0) fact *= static_cast<double>(k);
    j.c_[k] = d[k] / fact;
  }
  return j;
}

double Jet::derivative(int k) const {
  double fact = 1.0;
  for (int i = 2; i <= k; ++i) fact *= i;
  return c_[k] * fact;
}

Jet Jet::diff() const {
  if (order() < 1) throw Error(ErrorKind::InvalidInput, "cannot differentiate an order-0 jet");
  Jet d(order() - 1);
  for (int k = 0; k < d.order() + 1; ++k) d.c_[k] = (k + 1) * c_[k + 1];
  return d;
}

Jet Jet::truncated(int order) const {
  Jet t(std::min(order, this->order()));
  std::copy_n(c_.begin(), t.c_.size(), t.c_.begin());
  return t;
}

Jet& Jet::operator+=(const Jet& o) {
  if (o.order() < order()) c_.resize(o.c_.size());
  for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  if (o.order() < order()) c_.resize(o.c_.size());
  for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
  return *this;
}

Jet& Jet::operator*=(double s) {
  for (double& v : c_) v *= s;
  return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
  const int m = std::min(a.order(), b.order());
  Jet r(m);
  for (int k = 0; k <= m; ++k) {
    double s = 0.0;
    for (int i = 0; i <= k; ++i) s += a.c_[i] * b.c_[k - i];
    r.c_[k] = s;
  }
  return r;
}

Jet operator/(const Jet& a, const Jet& b) {
  if (b.c_[0] == 0.0) throw Error(ErrorKind::ZeroDenominator, "jet division by zero value");
  const int m = std::min(a.order(), b.order());
  Jet q(m);
  for (int k = 0; k <= m; ++k) {
    double s = a.c_[k];
    for (int i = 1; i <= k; ++i) s -= b.c_[i] * q.c_[k - i];
    q.c_[k] = s / b.c_[0];
  }
  return q;
}

std::vector<Jet> diminish(const std::vector<Jet>& basis, const std::vector<double>& alphas) {
  const int m = static_cast<int>(basis.size()) - 1;
  if (m < 1) throw Error(ErrorKind::InvalidInput, "diminishing needs at least two functions");
  if (static_cast<int>(alphas.size()) != m + 1)
    throw Error(ErrorKind::InvalidInput, "one weight per basis function required");
  Jet w = basis[0] * alphas[0];
  for (int j = 1; j <= m; ++j) w += basis[j] * alphas[j];
  std::vector<Jet> out(m);
  Jet tail = (basis[m] * alphas[m]) / w;
  for (int i = m - 1; i >= 0; --i) {
    out[i] = tail.diff();
    if (i > 0) tail += (basis[i] * alphas[i]) / w;
  }
  return out;
}

std::vector<Jet> diminish(const std::vector<Jet>& basis) {
  return diminish(basis, std::vector<double>(basis.size(), 1.0));
}

}  // namespace critlen
