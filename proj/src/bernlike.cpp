#include "critlen/bernlike.hpp"

#include <cmath>
#include <limits>

#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <fmt/format.h>

#include "critlen/error.hpp"

namespace critlen {

PiecewiseFunction BernsteinLikeBasis::column(int i) const {
  PiecewiseFunction f;
  for (const auto& m : columns) f.coefs.push_back(m.col(i));
  return f;
}

namespace {

// Derivatives 0..n-1 of the global basis (section-0 coordinates) at both ends,
// with a common column scaling so that determinants are comparable.
struct EndpointData {
  Eigen::MatrixXd at_a;  // n x (n+1)
  Eigen::MatrixXd at_b;  // n x (n+1)
  Eigen::VectorXd col_scale;
};

EndpointData endpoint_data(const PiecewiseSpace& sp) {
  const int n = sp.order();
  const int q = sp.num_sections() - 1;
  EndpointData e;
  const Eigen::MatrixXd full_a = sp.section(0).derivative_matrix(sp.a(), n);
  const Eigen::MatrixXd to_last =
      sp.propagate_columns(Eigen::MatrixXd::Identity(n + 1, n + 1)).back();
  const Eigen::MatrixXd full_b = sp.section(q).derivative_matrix(sp.b(), n) * to_last;
  e.at_a = full_a.topRows(n);
  e.at_b = full_b.topRows(n);
  e.col_scale.resize(n + 1);
  for (int t = 0; t <= n; ++t) {
    const double norm = std::sqrt(e.at_a.col(t).squaredNorm() + e.at_b.col(t).squaredNorm());
    // A column that nearly vanishes at both ends while its order-n derivative
    // does not holds rounding noise only; do not blow it up.
    const double ref = std::sqrt(full_a.col(t).squaredNorm() + full_b.col(t).squaredNorm());
    e.col_scale(t) = 1.0 / std::max(norm, 1e-3 * ref);
  }
  e.at_a = e.at_a * e.col_scale.asDiagonal();
  e.at_b = e.at_b * e.col_scale.asDiagonal();
  return e;
}

Eigen::MatrixXd stack_rows(const EndpointData& e, int rows_a, int rows_b) {
  Eigen::MatrixXd m(rows_a + rows_b, e.at_a.cols());
  if (rows_a > 0) m.topRows(rows_a) = e.at_a.topRows(rows_a);
  if (rows_b > 0) m.bottomRows(rows_b) = e.at_b.topRows(rows_b);
  for (int r = 0; r < m.rows(); ++r) {
    const double s = m.row(r).norm();
    if (s > 0.0) m.row(r) /= s;
  }
  return m;
}

std::vector<double> determinants(const EndpointData& e, int n) {
  std::vector<double> dets;
  for (int i = 1; i <= n; ++i) {
    const Eigen::MatrixXd m = stack_rows(e, i, n + 1 - i);
    dets.push_back(m.fullPivLu().determinant());
  }
  return dets;
}

// V_0..V_n in section-0 coordinates.  Column i spans the null space of the
// i conditions at a and n - i conditions at b; its i-th derivative at a is
// made positive.
Eigen::MatrixXd bernstein_like_coordinates(const EndpointData& e, int n,
                                           const Eigen::MatrixXd& full_at_a) {
  Eigen::MatrixXd cols(n + 1, n + 1);
  for (int i = 0; i <= n; ++i) {
    Eigen::VectorXd v;
    if (n == 0) {
      v = Eigen::VectorXd::Ones(1);
    } else {
      const Eigen::MatrixXd m = stack_rows(e, i, n - i);
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
      const auto& sv = svd.singularValues();
      if (!(sv(n - 1) > 1e-14 * sv(0)))
        throw Error(ErrorKind::RankDeficient,
                    fmt::format("endpoint conditions for V_{} are rank deficient", i));
      v = svd.matrixV().col(n);
    }
    Eigen::VectorXd c = e.col_scale.asDiagonal() * v;
    if (full_at_a.row(i).dot(c) < 0.0) c = -c;
    cols.col(i) = c / c.norm();
  }
  return cols;
}

}  // namespace

std::vector<double> step0_determinants(const PiecewiseSpace& sp) {
  return determinants(endpoint_data(sp), sp.order());
}

std::variant<BernsteinLikeBasis, NoBasisEvidence> global_bernstein_like(const PiecewiseSpace& sp,
                                                                        double tol_det) {
  const int n = sp.order();
  const EndpointData e = endpoint_data(sp);
  const std::vector<double> dets = determinants(e, n);
  for (int i = 1; i <= n; ++i)
    if (!(std::abs(dets[i - 1]) > tol_det)) return NoBasisEvidence{i, n + 1 - i, dets[i - 1]};

  const Eigen::MatrixXd full_at_a = sp.section(0).derivative_matrix(sp.a(), n);
  BernsteinLikeBasis basis;
  basis.c = sp.a();
  basis.d = sp.b();
  basis.columns = sp.propagate_columns(bernstein_like_coordinates(e, n, full_at_a));
  return basis;
}

BernsteinLikeBasis local_bernstein_like(const Section& section, bool verify_positive,
                                        double tol_det, double tol_zero) {
  if (!(section.right > section.left))
    throw Error(ErrorKind::InvalidInput, "local basis needs d > c");
  const PiecewiseSpace single({section}, {}, {}, {});
  auto result = global_bernstein_like(single, tol_det);
  if (auto* none = std::get_if<NoBasisEvidence>(&result))
    throw Error(ErrorKind::RankDeficient,
                fmt::format("no Bernstein-like basis on [{}, {}]: determinant ({}, {}) = {:.3e}",
                            section.left, section.right, none->i, none->j, none->det));
  BernsteinLikeBasis basis = std::get<BernsteinLikeBasis>(std::move(result));

  if (verify_positive) {
    constexpr int kSamples = 64;
    const int n = single.order();
    for (int i = 0; i <= n; ++i) {
      const PiecewiseFunction f = basis.column(i);
      std::vector<double> vals;
      double scale = 0.0;
      for (int s = 1; s <= kSamples; ++s) {
        const double x = section.left + section.length() * s / (kSamples + 1.0);
        vals.push_back(single.eval_on(f, 0, x, 0));
        scale = std::max(scale, std::abs(vals.back()));
      }
      for (double v : vals)
        if (v < -tol_zero * scale)
          throw Error(ErrorKind::NotPositive,
                      fmt::format("V_{} takes negative values on ({}, {})", i, section.left,
                                  section.right));
    }
  }
  return basis;
}

BernsteinLikeBasis local_bernstein_like(const FamilyBasis& fam, double c, double d,
                                        bool verify_positive) {
  return local_bernstein_like(Section{fam, c, d}, verify_positive);
}

GammaTensor level0_expansions(const PiecewiseSpace& sp, const BernsteinLikeBasis& global,
                              const std::vector<BernsteinLikeBasis>& locals) {
  const int n1 = sp.dim();
  const int sections = sp.num_sections();
  if (static_cast<int>(locals.size()) != sections ||
      static_cast<int>(global.columns.size()) != sections)
    throw Error(ErrorKind::InvalidInput, "one local basis per section required");
  GammaTensor g(0, n1, sections);
  for (int k = 0; k < sections; ++k) {
    const Eigen::MatrixXd& local = locals[k].columns.front();
    const Eigen::MatrixXd& target = global.columns[k];
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(local);
    const double diag_max = std::abs(qr.matrixR()(0, 0));
    const double diag_min = std::abs(qr.matrixR()(n1 - 1, n1 - 1));
    if (!(diag_min > 1e-14 * diag_max))
      throw Error(ErrorKind::SingularExpansion,
                  fmt::format("local basis on section {} is numerically singular", k));
    const Eigen::MatrixXd x = qr.solve(target);
    const double residual = (local * x - target).norm() / std::max(1.0, target.norm());
    // Short sections make the local columns nearly parallel; allow the
    // residual that backward-stable solves reach at that conditioning.
    const double allowed = std::max(1e-10, 1e3 * std::numeric_limits<double>::epsilon() *
                                               diag_max / diag_min);
    if (!(residual <= allowed))
      throw Error(ErrorKind::SingularExpansion,
                  fmt::format("re-expansion residual {:.3e} on section {}", residual, k));
    for (int i = 0; i < n1; ++i)
      for (int r = 0; r < n1; ++r) g(i, k, r) = x(r, i);
  }
  return g;
}

}  // namespace critlen
