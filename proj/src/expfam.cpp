#include "critlen/expfam.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "critlen/error.hpp"

namespace critlen {

int RootSet::degree() const {
  int d = 0;
  for (const auto& r : entries) d += r.mult * (r.is_real() ? 1 : 2);
  return d;
}

double RootSet::max_imag() const {
  double m = 0.0;
  for (const auto& r : entries) m = std::max(m, r.im);
  return m;
}

int RootSet::zero_multiplicity() const {
  for (const auto& r : entries)
    if (r.re == 0.0 && r.im == 0.0) return r.mult;
  return 0;
}

RootSet RootSet::deflated() const {
  RootSet out;
  bool removed = false;
  for (const auto& r : entries) {
    if (!removed && r.re == 0.0 && r.im == 0.0) {
      removed = true;
      if (r.mult > 1) out.entries.push_back({0.0, 0.0, r.mult - 1});
      continue;
    }
    out.entries.push_back(r);
  }
  if (!removed)
    throw Error(ErrorKind::NotDesignSpace, "p(0) != 0: the kernel has no constants");
  return out;
}

RootSet RootSet::scaled(double s) const {
  if (!(s > 0.0) || !std::isfinite(s))
    throw Error(ErrorKind::InvalidInput, "root scaling factor must be positive");
  RootSet out = *this;
  for (auto& r : out.entries) {
    r.re *= s;
    r.im *= s;
  }
  return out;
}

void RootSet::validate() const {
  if (entries.empty()) throw Error(ErrorKind::InvalidInput, "empty root set");
  for (const auto& r : entries) {
    if (!std::isfinite(r.re) || !std::isfinite(r.im))
      throw Error(ErrorKind::NonFinite, "root is not finite");
    if (r.im < 0.0)
      throw Error(ErrorKind::InvalidInput,
                  "negative imaginary part; store the pair representative with im > 0");
    if (r.mult < 1) throw Error(ErrorKind::InvalidInput, "multiplicity must be >= 1");
  }
  for (std::size_t i = 0; i < entries.size(); ++i)
    for (std::size_t j = i + 1; j < entries.size(); ++j)
      if (entries[i].re == entries[j].re && entries[i].im == entries[j].im)
        throw Error(ErrorKind::InvalidInput, "duplicate root entries; merge multiplicities");
}

std::complex<double> CharPoly::eval(std::complex<double> z) const {
  std::complex<double> acc = 1.0;
  for (int i = degree() - 1; i >= 0; --i) acc = acc * z + coeffs[i];
  return acc;
}

void CharPoly::validate() const {
  if (coeffs.empty()) throw Error(ErrorKind::InvalidInput, "degree-0 polynomial");
  for (double c : coeffs)
    if (!std::isfinite(c)) throw Error(ErrorKind::NonFinite, "non-finite coefficient");
}

CharPoly CharPoly::from_roots(const RootSet& roots) {
  roots.validate();
  // ascending coefficients including the leading one
  std::vector<double> c{1.0};
  auto multiply = [&c](const std::vector<double>& f) {
    std::vector<double> out(c.size() + f.size() - 1, 0.0);
    for (std::size_t i = 0; i < c.size(); ++i)
      for (std::size_t j = 0; j < f.size(); ++j) out[i + j] += c[i] * f[j];
    c = std::move(out);
  };
  for (const auto& r : roots.entries) {
    for (int m = 0; m < r.mult; ++m) {
      if (r.is_real())
        multiply({-r.re, 1.0});
      else
        multiply({r.re * r.re + r.im * r.im, -2.0 * r.re, 1.0});
    }
  }
  c.pop_back();
  return CharPoly{c};
}

namespace {

using cplx = std::complex<double>;

cplx newton_polish(const std::vector<double>& a, cplx z) {
  // a: ascending coefficients of a monic polynomial without the leading 1
  const int n = static_cast<int>(a.size());
  cplx p = 1.0, dp = 0.0;
  for (int i = n - 1; i >= 0; --i) {
    dp = dp * z + p;
    p = p * z + a[i];
  }
  if (std::abs(dp) == 0.0) return z;
  cplx step = p / dp;
  cplx next = z - step;
  if (!std::isfinite(next.real()) || !std::isfinite(next.imag())) return z;
  // accept only if the residual does not grow
  cplx q = 1.0;
  for (int i = n - 1; i >= 0; --i) q = q * next + a[i];
  return std::abs(q) <= std::abs(p) ? next : z;
}

}  // namespace

RootSet find_roots(const CharPoly& p, double cluster_tol) {
  p.validate();
  if (!(cluster_tol > 0.0)) throw Error(ErrorKind::InvalidInput, "cluster_tol must be > 0");

  int zeros = 0;
  while (zeros < p.degree() && p.coeffs[zeros] == 0.0) ++zeros;
  std::vector<double> reduced(p.coeffs.begin() + zeros, p.coeffs.end());
  const int d = static_cast<int>(reduced.size());

  std::vector<cplx> z;
  if (d > 0) {
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(d, d);
    for (int i = 1; i < d; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < d; ++i) companion(i, d - 1) = -reduced[i];
    Eigen::EigenSolver<Eigen::MatrixXd> es(companion, false);
    if (es.info() != Eigen::Success)
      throw Error(ErrorKind::NonFinite, "companion eigenvalue iteration failed");
    for (int i = 0; i < d; ++i) {
      cplx root = es.eigenvalues()(i);
      if (!std::isfinite(root.real()) || !std::isfinite(root.imag()))
        throw Error(ErrorKind::NonFinite, "companion eigenvalue iteration diverged");
      z.push_back(newton_polish(reduced, root));
    }
  }

  double scale = 1.0;
  for (const auto& r : z) scale = std::max(scale, std::abs(r));

  // Agglomerative clustering.  A cluster of m roots may spread like
  // eps^{1/m} around a multiple root, so the merge radius widens with the
  // merged size; cluster_tol is the floor.
  struct Cluster {
    cplx sum;
    int size;
    cplx center() const { return sum / static_cast<double>(size); }
  };
  std::vector<Cluster> clusters;
  for (const auto& r : z) clusters.push_back({r, 1});
  const double eps = std::numeric_limits<double>::epsilon();
  bool merged = true;
  while (merged) {
    merged = false;
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < clusters.size(); ++i)
      for (std::size_t j = i + 1; j < clusters.size(); ++j) {
        const int m = clusters[i].size + clusters[j].size;
        const double radius = std::max(cluster_tol, 8.0 * std::pow(eps, 1.0 / m)) * scale;
        const double dist = std::abs(clusters[i].center() - clusters[j].center());
        if (dist <= radius && dist / radius < best) {
          best = dist / radius;
          bi = i;
          bj = j;
        }
      }
    if (best < std::numeric_limits<double>::infinity()) {
      clusters[bi].sum += clusters[bj].sum;
      clusters[bi].size += clusters[bj].size;
      clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bj));
      merged = true;
    }
  }

  RootSet out;
  if (zeros > 0) out.entries.push_back({0.0, 0.0, zeros});
  int lower_half = 0;
  for (const auto& c : clusters) {
    const cplx center = c.center();
    if (std::abs(center.imag()) <= cluster_tol * scale) {
      const double re = center.real();
      auto it = std::find_if(out.entries.begin(), out.entries.end(), [&](const Root& r) {
        return r.is_real() && std::abs(r.re - re) <= cluster_tol * scale;
      });
      if (it != out.entries.end())
        it->mult += c.size;
      else
        out.entries.push_back({re, 0.0, c.size});
    } else if (center.imag() > 0.0) {
      out.entries.push_back({center.real(), center.imag(), c.size});
    } else {
      lower_half += c.size;
    }
  }
  int upper_half = 0;
  for (const auto& r : out.entries)
    if (!r.is_real()) upper_half += r.mult;
  if (upper_half != lower_half || out.degree() != p.degree())
    throw Error(ErrorKind::NonFinite,
                fmt::format("root clustering inconsistent with degree {}", p.degree()));
  std::sort(out.entries.begin(), out.entries.end(), [](const Root& a, const Root& b) {
    return std::tie(a.im, a.re) < std::tie(b.im, b.re);
  });
  return out;
}

double Term::eval(double x) const {
  double v = std::exp(alpha * x);
  if (power > 0) v *= std::pow(x, power);
  switch (kind) {
    case TermKind::Exp: return v;
    case TermKind::Cos: return v * std::cos(beta * x);
    case TermKind::Sin: return v * std::sin(beta * x);
  }
  return v;
}

FamilyBasis::FamilyBasis(const RootSet& roots) : roots_(roots) {
  roots_.validate();
  for (const auto& r : roots_.entries) {
    for (int j = 0; j < r.mult; ++j) {
      if (r.is_real()) {
        terms_.push_back({j, r.re, 0.0, TermKind::Exp});
      } else {
        terms_.push_back({j, r.re, r.im, TermKind::Cos});
        terms_.push_back({j, r.re, r.im, TermKind::Sin});
      }
    }
  }
  std::sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) {
    return std::tie(a.beta, a.alpha, a.kind, a.power) <
           std::tie(b.beta, b.alpha, b.kind, b.power);
  });

  const int n = dim();
  auto index_of = [&](int power, double alpha, double beta, TermKind kind) {
    for (int t = 0; t < n; ++t) {
      const Term& s = terms_[t];
      if (s.power == power && s.alpha == alpha && s.beta == beta && s.kind == kind)
        return t;
    }
    return -1;
  };
  // column t holds the coordinates of the derivative of term t
  diff_op_ = Eigen::MatrixXd::Zero(n, n);
  for (int t = 0; t < n; ++t) {
    const Term& s = terms_[t];
    diff_op_(t, t) += s.alpha;
    if (s.power > 0)
      diff_op_(index_of(s.power - 1, s.alpha, s.beta, s.kind), t) += s.power;
    if (s.kind == TermKind::Cos)
      diff_op_(index_of(s.power, s.alpha, s.beta, TermKind::Sin), t) -= s.beta;
    else if (s.kind == TermKind::Sin)
      diff_op_(index_of(s.power, s.alpha, s.beta, TermKind::Cos), t) += s.beta;
  }
}

std::optional<int> FamilyBasis::constant_index() const {
  for (int t = 0; t < dim(); ++t) {
    const Term& s = terms_[t];
    if (s.power == 0 && s.alpha == 0.0 && s.beta == 0.0 && s.kind == TermKind::Exp) return t;
  }
  return std::nullopt;
}

Eigen::RowVectorXd FamilyBasis::term_values(double x) const {
  Eigen::RowVectorXd v(dim());
  for (int t = 0; t < dim(); ++t) v(t) = terms_[t].eval(x);
  return v;
}

Eigen::MatrixXd FamilyBasis::derivative_matrix(double x, int max_order) const {
  Eigen::MatrixXd m(max_order + 1, dim());
  m.row(0) = term_values(x);
  for (int r = 1; r <= max_order; ++r) m.row(r) = m.row(r - 1) * diff_op_;
  return m;
}

std::vector<double> FamilyBasis::eval_derivatives(const CoefVec& v, double x,
                                                  int max_order) const {
  if (v.size() != dim()) throw Error(ErrorKind::InvalidInput, "coefficient size mismatch");
  if (max_order < 0 || max_order > 2 * dim())
    throw Error(ErrorKind::InvalidInput,
                fmt::format("derivative order {} outside [0, {}]", max_order, 2 * dim()));
  if (!std::isfinite(x)) throw Error(ErrorKind::NonFinite, "evaluation point not finite");
  const Eigen::RowVectorXd vals = term_values(x);
  std::vector<double> out;
  out.reserve(max_order + 1);
  CoefVec w = v;
  for (int k = 0; k <= max_order; ++k) {
    const double f = vals.dot(w);
    if (!std::isfinite(f))
      throw Error(ErrorKind::Overflow, fmt::format("derivative {} overflows at x = {}", k, x));
    out.push_back(f);
    if (k < max_order) w = diff_op_ * w;
  }
  return out;
}

CoefVec FamilyBasis::translate(const CoefVec& v, double shift) const {
  // (x+s)^j e^{a(x+s)} cos(b(x+s)) expanded back onto the terms
  const int n = dim();
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
  auto index_of = [&](int power, double alpha, double beta, TermKind kind) {
    for (int i = 0; i < n; ++i) {
      const Term& s = terms_[i];
      if (s.power == power && s.alpha == alpha && s.beta == beta && s.kind == kind) return i;
    }
    return -1;
  };
  for (int col = 0; col < n; ++col) {
    const Term& s = terms_[col];
    const double e = std::exp(s.alpha * shift);
    const double c = std::cos(s.beta * shift), sn = std::sin(s.beta * shift);
    double binom = 1.0;  // C(power, m)
    for (int m = s.power; m >= 0; --m) {
      const double coef = e * binom * std::pow(shift, s.power - m);
      switch (s.kind) {
        case TermKind::Exp:
          t(index_of(m, s.alpha, s.beta, TermKind::Exp), col) += coef;
          break;
        case TermKind::Cos:
          t(index_of(m, s.alpha, s.beta, TermKind::Cos), col) += coef * c;
          t(index_of(m, s.alpha, s.beta, TermKind::Sin), col) -= coef * sn;
          break;
        case TermKind::Sin:
          t(index_of(m, s.alpha, s.beta, TermKind::Sin), col) += coef * c;
          t(index_of(m, s.alpha, s.beta, TermKind::Cos), col) += coef * sn;
          break;
      }
      // C(p, m-1) = C(p, m) * m / (p - m + 1)
      binom = binom * m / (s.power - m + 1);
    }
  }
  return t * v;
}

}  // namespace critlen
