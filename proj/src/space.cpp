#include "critlen/space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/SVD>
#include <fmt/format.h>

#include "critlen/error.hpp"

namespace critlen {

PiecewiseSpace::PiecewiseSpace(std::vector<Section> sections,
                               std::vector<Eigen::MatrixXd> transfer,
                               std::vector<double> conditions,
                               std::vector<std::string> warnings)
    : sections_(std::move(sections)),
      transfer_(std::move(transfer)),
      conditions_(std::move(conditions)),
      warnings_(std::move(warnings)) {
  if (sections_.empty()) throw Error(ErrorKind::InvalidInput, "space without sections");
  if (transfer_.size() + 1 != sections_.size())
    throw Error(ErrorKind::InvalidInput, "need one transfer map per interior knot");
}

std::vector<double> PiecewiseSpace::knots() const {
  std::vector<double> t;
  for (const auto& s : sections_) t.push_back(s.left);
  t.push_back(b());
  return t;
}

int PiecewiseSpace::section_of(double x) const {
  const double tol = 1e-12 * std::max({1.0, std::abs(a()), std::abs(b())});
  if (!(x >= a() - tol && x <= b() + tol))
    throw Error(ErrorKind::OutOfDomain, fmt::format("x = {} outside [{}, {}]", x, a(), b()));
  for (int k = 0; k < num_sections(); ++k)
    if (x <= sections_[k].right) return k;
  return num_sections() - 1;
}

PiecewiseFunction PiecewiseSpace::propagate(const CoefVec& c0) const {
  PiecewiseFunction f;
  f.coefs.reserve(sections_.size());
  f.coefs.push_back(c0);
  for (const auto& t : transfer_) f.coefs.push_back(t * f.coefs.back());
  return f;
}

std::vector<Eigen::MatrixXd> PiecewiseSpace::propagate_columns(const Eigen::MatrixXd& c0) const {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(sections_.size());
  out.push_back(c0);
  for (const auto& t : transfer_) out.push_back(t * out.back());
  return out;
}

double PiecewiseSpace::eval_on(const PiecewiseFunction& f, int k, double x, int order) const {
  const Section& s = sections_[k];
  const Eigen::MatrixXd m = s.derivative_matrix(x, order);
  return m.row(order).dot(f.coefs[k]);
}

double PiecewiseSpace::eval(const PiecewiseFunction& f, double x, int order) const {
  return eval_on(f, section_of(x), x, order);
}

std::vector<double> PiecewiseSpace::derivatives(const PiecewiseFunction& f, double x,
                                                int max_order) const {
  const int k = section_of(x);
  const Eigen::VectorXd d = sections_[k].derivative_matrix(x, max_order) * f.coefs[k];
  return {d.data(), d.data() + d.size()};
}

PiecewiseFunction PiecewiseSpace::differentiate(const PiecewiseFunction& f) const {
  PiecewiseFunction g;
  for (int k = 0; k < num_sections(); ++k)
    g.coefs.push_back(sections_[k].fam.diff_op() * f.coefs[k]);
  return g;
}

const CoefVec& GlobalMember::on_section(const PiecewiseSpace& sp, int k) const {
  if (cache_.empty()) cache_.push_back(c0_);
  while (static_cast<int>(cache_.size()) <= k)
    cache_.push_back(sp.transfer(static_cast<int>(cache_.size()) - 1) * cache_.back());
  return cache_[k];
}

double eval_member(const PiecewiseSpace& sp, const GlobalMember& m, double x, int order) {
  if (order < 0 || order > sp.order())
    throw Error(ErrorKind::InvalidInput,
                fmt::format("derivative order {} exceeds the continuity order {}", order,
                            sp.order()));
  const int k = sp.section_of(x);
  const Eigen::MatrixXd d = sp.section(k).derivative_matrix(x, order);
  return d.row(order).dot(m.on_section(sp, k));
}

namespace {

struct Transfer {
  Eigen::MatrixXd map;
  double condition;
};

double condition_number(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  return sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1)
                                 : std::numeric_limits<double>::infinity();
}

// Row-equilibrated derivative matrix of `to` at t, and the same scaling applied
// to `from`.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> matching_system(const Section& from,
                                                            const Section& to, double t) {
  const int n = from.fam.dim() - 1;
  Eigen::MatrixXd lhs = to.derivative_matrix(t, n);
  Eigen::MatrixXd rhs = from.derivative_matrix(t, n);
  for (int r = 0; r <= n; ++r) {
    const double s = lhs.row(r).norm();
    if (s > 0.0) {
      lhs.row(r) /= s;
      rhs.row(r) /= s;
    }
  }
  return {std::move(lhs), std::move(rhs)};
}

// Solve M_{k+1}(t) T = M_k(t): the member with section-k coordinates c has the
// same derivatives 0..n at t as the member with section-(k+1) coordinates T c.
Transfer solve_transfer(const Section& from, const Section& to, double t) {
  auto [lhs, rhs] = matching_system(from, to, t);
  const double cond = condition_number(lhs);
  if (!(cond < 1e15))
    throw Error(ErrorKind::SingularTransfer,
                fmt::format("matching matrix at t = {} is numerically singular", t));
  return {lhs.colPivHouseholderQr().solve(rhs), cond};
}

Eigen::MatrixXd translation(const FamilyBasis& fam, double shift) {
  const int n = fam.dim();
  Eigen::MatrixXd m(n, n);
  for (int c = 0; c < n; ++c) m.col(c) = fam.translate(CoefVec::Unit(n, c), shift);
  return m;
}

PiecewiseSpace assemble(std::vector<Section> sections) {
  std::vector<Eigen::MatrixXd> transfer;
  std::vector<double> conds;
  std::vector<std::string> warnings;
  for (std::size_t k = 0; k + 1 < sections.size(); ++k) {
    auto tr = solve_transfer(sections[k], sections[k + 1], sections[k].right);
    if (tr.condition > kTransferConditionWarning)
      warnings.push_back(fmt::format("matching matrix at knot {} has condition number {:.3e}",
                                     sections[k].right, tr.condition));
    transfer.push_back(std::move(tr.map));
    conds.push_back(tr.condition);
  }
  return PiecewiseSpace(std::move(sections), std::move(transfer), std::move(conds),
                        std::move(warnings));
}

}  // namespace

PiecewiseSpace make_uniform(const RootSet& roots, double a, const std::vector<double>& knots,
                            double b) {
  if (!(a < b)) throw Error(ErrorKind::InvalidInput, "need a < b");
  std::vector<double> t{a};
  for (double k : knots) {
    if (!(k > t.back()) || !(k < b))
      throw Error(ErrorKind::InvalidInput, "knots must increase strictly inside (a, b)");
    t.push_back(k);
  }
  t.push_back(b);
  const FamilyBasis fam(roots);
  std::vector<Section> sections;
  for (std::size_t k = 0; k + 1 < t.size(); ++k) sections.push_back({fam, t[k], t[k + 1]});

  // Same kernel on both sides: the transfer is an exact translation between
  // section origins.
  std::vector<Eigen::MatrixXd> transfer;
  std::vector<double> conds;
  for (std::size_t k = 0; k + 1 < sections.size(); ++k) {
    transfer.push_back(translation(fam, sections[k + 1].origin() - sections[k].origin()));
    const double t_k = sections[k].right;
    conds.push_back(condition_number(matching_system(sections[k], sections[k + 1], t_k).first));
  }
  return PiecewiseSpace(std::move(sections), std::move(transfer), std::move(conds), {});
}

PiecewiseSpace make_spliced(const std::vector<SectionSpec>& specs, double start) {
  if (specs.empty()) throw Error(ErrorKind::InvalidInput, "splice needs at least one section");
  std::vector<Section> sections;
  double left = start;
  for (const auto& s : specs) {
    if (!(s.length > 0.0) || !std::isfinite(s.length))
      throw Error(ErrorKind::InvalidInput, "section length must be positive");
    FamilyBasis fam(s.roots);
    if (!sections.empty() && fam.dim() != sections.front().fam.dim())
      throw Error(ErrorKind::InvalidInput, "spliced kernels must share one dimension");
    sections.push_back({std::move(fam), left, left + s.length});
    left += s.length;
  }
  return assemble(std::move(sections));
}

PiecewiseSpace subdivide(const PiecewiseSpace& sp, const std::vector<int>& pieces) {
  if (static_cast<int>(pieces.size()) != sp.num_sections())
    throw Error(ErrorKind::InvalidInput, "one piece count per section required");
  std::vector<Section> sections;
  std::vector<int> parent;
  for (int k = 0; k < sp.num_sections(); ++k) {
    if (pieces[k] < 1) throw Error(ErrorKind::InvalidInput, "piece counts must be >= 1");
    const Section& s = sp.section(k);
    for (int j = 0; j < pieces[k]; ++j) {
      const double lo = j == 0 ? s.left : s.left + s.length() * j / pieces[k];
      const double hi = j + 1 == pieces[k] ? s.right : s.left + s.length() * (j + 1) / pieces[k];
      sections.push_back({s.fam, lo, hi});
      parent.push_back(k);
    }
  }
  // Inside an original section the map is a translation; across an original
  // knot it is the original map conjugated by the translations to and from
  // the original origins.
  std::vector<Eigen::MatrixXd> transfer;
  std::vector<double> conds;
  for (std::size_t m = 0; m + 1 < sections.size(); ++m) {
    const Section& from = sections[m];
    const Section& to = sections[m + 1];
    if (parent[m] == parent[m + 1]) {
      transfer.push_back(translation(from.fam, to.origin() - from.origin()));
      conds.push_back(condition_number(matching_system(from, to, from.right).first));
    } else {
      const int k = parent[m];
      const Section& old_from = sp.section(k);
      const Section& old_to = sp.section(k + 1);
      transfer.push_back(translation(to.fam, to.origin() - old_to.origin()) * sp.transfer(k) *
                         translation(from.fam, old_from.origin() - from.origin()));
      conds.push_back(sp.transfer_conditions()[k]);
    }
  }
  return PiecewiseSpace(std::move(sections), std::move(transfer), std::move(conds),
                        sp.warnings());
}

double safe_section_length(const FamilyBasis& fam) {
  const double m = fam.roots().max_imag();
  return m > 0.0 ? std::numbers::pi / m : std::numeric_limits<double>::infinity();
}

}  // namespace critlen
