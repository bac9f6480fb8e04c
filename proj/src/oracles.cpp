#include "critlen/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/LU>
#include <fmt/format.h>

#include "critlen/error.hpp"

namespace critlen {

using std::numbers::pi;

OracleValue bisect_root(const std::function<double(double)>& f, double lo, double hi,
                        const std::string& method) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return {lo, lo, lo, method};
  if (fhi == 0.0) return {hi, hi, hi, method};
  if (!(flo * fhi < 0.0))
    throw Error(ErrorKind::NoSignChange,
                fmt::format("{}: no sign change on [{}, {}]", method, lo, hi));
  while (hi - lo > 1e-12 * std::max(1.0, std::abs(lo))) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return {mid, mid, mid, method};
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return {0.5 * (lo + hi), lo, hi, method};
}

double bessel_j_scaled(double nu, double x) {
  const double q = -0.25 * x * x;
  double term = 1.0 / std::tgamma(nu + 1.0);
  double sum = term;
  for (int m = 1; m < 500; ++m) {
    term *= q / (m * (m + nu));
    sum += term;
    if (m > 0.5 * std::abs(x) && std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

OracleValue bessel_first_zero(double nu) {
  if (!(nu >= 0.0 && nu <= 10.0))
    throw Error(ErrorKind::InvalidInput, "Bessel order must lie in [0, 10]");
  constexpr double kStep = pi / 64.0;
  constexpr double kMax = 30.0;
  auto f = [nu](double x) { return bessel_j_scaled(nu, x); };
  double prev = f(kStep);
  for (double x = 2 * kStep; x <= kMax; x += kStep) {
    const double cur = f(x);
    if (prev * cur <= 0.0) return bisect_root(f, x - kStep, x, "bessel-series");
    prev = cur;
  }
  throw Error(ErrorKind::NoSignChange, fmt::format("J_{} has no zero below {}", nu, kMax));
}

const char* to_string(ClosedForm c) {
  switch (c) {
    case ClosedForm::ZH3: return "ZH3";
    case ClosedForm::DTRIG_LOW: return "DTRIG_LOW";
    case ClosedForm::DTRIG_HIGH: return "DTRIG_HIGH";
    case ClosedForm::ZS9: return "ZS9";
    case ClosedForm::HT1: return "HT1";
  }
  return "?";
}

std::optional<ClosedForm> closed_form_from_string(const std::string& s) {
  for (ClosedForm c : {ClosedForm::ZH3, ClosedForm::DTRIG_LOW, ClosedForm::DTRIG_HIGH,
                       ClosedForm::ZS9, ClosedForm::HT1})
    if (s == to_string(c)) return c;
  return std::nullopt;
}

OracleValue solve_closed_form(ClosedForm c, double a, double b) {
  auto regime = [&](bool ok, const char* what) {
    if (!ok)
      throw Error(ErrorKind::OutOfRegime,
                  fmt::format("{} needs {} (a = {}, b = {})", to_string(c), what, a, b));
  };
  switch (c) {
    case ClosedForm::ZH3: {
      regime(a > 0.0 && b > 0.0, "a, b > 0");
      auto f = [a, b](double x) {
        return (b * b - a * a) * std::sinh(a * x) * std::sin(b * x) -
               2.0 * a * b * (1.0 - std::cosh(a * x) * std::cos(b * x));
      };
      return bisect_root(f, pi / b, 2.0 * pi / b, "ZH3");
    }
    case ClosedForm::DTRIG_LOW: {
      regime(a > 0.0 && a < b && b <= 3.0 * a, "0 < a < b <= 3a");
      const double lo = pi / b * std::floor(b / a);
      const double hi = pi / b * std::ceil(b / a);
      if (lo == hi) return {lo, lo, hi, "DTRIG_LOW"};
      auto f = [a, b](double x) { return b * std::sin(a * x) - a * std::sin(b * x); };
      return bisect_root(f, lo, hi, "DTRIG_LOW");
    }
    case ClosedForm::DTRIG_HIGH: {
      regime(a > 0.0 && b >= 3.0 * a, "0 < a, b >= 3a");
      auto f = [a, b](double x) {
        return (b - a) * std::sin(0.5 * (b + a) * x) + (b + a) * std::sin(0.5 * (b - a) * x);
      };
      return bisect_root(f, 2.0 * pi / b, 2.0 * pi / (b - a), "DTRIG_HIGH");
    }
    case ClosedForm::ZS9: {
      regime(a > 0.0 && b > 0.0, "a, b > 0");
      // b tanh(ax) cos(bx) - a sin(bx): same zeros, no pole at 3pi/(2b).
      auto f = [a, b](double x) {
        return b * std::tanh(a * x) * std::cos(b * x) - a * std::sin(b * x);
      };
      return bisect_root(f, pi / b, 1.5 * pi / b, "ZS9");
    }
    case ClosedForm::HT1: {
      const double t = a;
      regime(t > 0.75 * pi && t < pi, "T in ]3pi/4, pi[");
      const double h = std::atanh(-std::tan(t));
      return {h, h, h, "HT1"};
    }
  }
  throw Error(ErrorKind::InvalidInput, "unknown closed form");
}

namespace {

// S and its derivatives: Taylor series near 0, family coordinates elsewhere.
class NormalizedSolution {
 public:
  explicit NormalizedSolution(const CharPoly& p) : p_(p) {
    p.validate();
    const RootSet roots = find_roots(p);
    for (const Root& r : roots.entries) radius_ = std::max(radius_, std::hypot(r.re, r.im));
    fam_ = FamilyBasis(roots);
    const int n1 = fam_.dim();
    const Eigen::MatrixXd m = fam_.derivative_matrix(0.0, n1 - 1);
    coords_ = m.fullPivLu().solve(Eigen::VectorXd::Unit(n1, n1 - 1));
  }

  std::vector<double> derivatives(double h, int max_order) const {
    if (radius_ * h <= kSeriesRadius) return series(h, max_order);
    return fam_.eval_derivatives(coords_, h, max_order);
  }

 private:
  static constexpr double kSeriesRadius = 8.0;

  std::vector<double> series(double h, int max_order) const {
    const int n1 = p_.degree();
    const int terms = 60 + static_cast<int>(std::ceil(3.0 * radius_ * std::abs(h)));
    const int total = max_order + terms + 1;
    // s_j = S^{(j)}(0) from p(D) S = 0.
    std::vector<long double> s(total, 0.0L);
    s[n1 - 1] = 1.0L;
    for (int j = n1; j < total; ++j) {
      long double acc = 0.0L;
      for (int i = 0; i < n1; ++i) acc -= static_cast<long double>(p_.coeffs[i]) * s[j - n1 + i];
      s[j] = acc;
    }
    std::vector<double> out(max_order + 1);
    for (int m = 0; m <= max_order; ++m) {
      long double sum = 0.0L, pw = 1.0L;
      for (int j = 0; m + j < total; ++j) {
        sum += s[m + j] * pw;
        pw *= static_cast<long double>(h) / (j + 1);
      }
      out[m] = static_cast<double>(sum);
    }
    return out;
  }

  CharPoly p_;
  FamilyBasis fam_;
  CoefVec coords_;
  double radius_ = 0.0;
};

double wronskian_det(const std::vector<double>& d, int k, bool derivative) {
  Eigen::MatrixXd m(k + 1, k + 1);
  for (int r = 0; r <= k; ++r)
    for (int c = 0; c <= k; ++c) m(r, c) = d[r + c + (derivative && r == k ? 1 : 0)];
  return m.fullPivLu().determinant();
}

}  // namespace

std::vector<double> normalized_solution_derivatives(const CharPoly& p, double h, int max_order) {
  return NormalizedSolution(p).derivatives(h, max_order);
}

double wronskian(const CharPoly& p, int k, double h) {
  return wronskian_det(NormalizedSolution(p).derivatives(h, 2 * k), k, false);
}

std::optional<OracleValue> wronskian_scan(const CharPoly& p, int k, double h_max, double step) {
  const int n = p.degree() - 1;
  if (k < 0 || k > n - 1)
    throw Error(ErrorKind::InvalidInput, fmt::format("Wronskian order {} outside 0..{}", k, n - 1));
  if (!(h_max > 0.0)) throw Error(ErrorKind::InvalidInput, "h_max must be positive");
  if (!(step > 0.0)) step = h_max / 4096.0;
  const NormalizedSolution sol(p);
  auto w = [&](double h) { return wronskian_det(sol.derivatives(h, 2 * k + 1), k, false); };
  auto dw = [&](double h) { return wronskian_det(sol.derivatives(h, 2 * k + 1), k, true); };

  double h_prev = step;
  double w_prev = w(h_prev), dw_prev = dw(h_prev);
  double peak = std::abs(w_prev);
  const int count = static_cast<int>(std::floor(h_max / step));
  for (int j = 2; j <= count; ++j) {
    const double h = j * step;
    const double wc = w(h), dwc = dw(h);
    if (w_prev * wc <= 0.0) {
      OracleValue v = bisect_root(w, h_prev, h, fmt::format("wronskian-{}", k));
      return v;
    }
    // |W| stops decreasing: look for a zero it only touches.
    if (dw_prev * dwc < 0.0 && (dw_prev < 0.0) == (w_prev > 0.0)) {
      const OracleValue m = bisect_root(dw, h_prev, h, fmt::format("wronskian-{}-touch", k));
      if (std::abs(w(m.value)) <= 1e-9 * std::max(peak, std::abs(w_prev))) return m;
    }
    peak = std::max(peak, std::abs(wc));
    h_prev = h;
    w_prev = wc;
    dw_prev = dwc;
  }
  return std::nullopt;
}

std::optional<OracleValue> wronskian_critical_length(const CharPoly& p, double h_max,
                                                     bool symmetric) {
  const int n = p.degree() - 1;
  const int k_top = symmetric ? (n - 1) / 2 : n - 1;
  std::optional<OracleValue> best;
  for (int k = 0; k <= k_top; ++k) {
    const auto z = wronskian_scan(p, k, h_max);
    if (z && (!best || z->value < best->value)) best = z;
  }
  return best;
}

namespace {

struct GridRows {
  std::vector<double> t;
  std::vector<Eigen::MatrixXd> rows;  // derivatives 0..n-1 of the global basis at t
};

GridRows grid_rows(const PiecewiseSpace& sp, int grid) {
  const int n = sp.order();
  const std::vector<Eigen::MatrixXd> basis =
      sp.propagate_columns(Eigen::MatrixXd::Identity(n + 1, n + 1));
  GridRows g;
  for (int s = 0; s <= grid; ++s) {
    const double t = s == grid ? sp.b() : sp.a() + (sp.b() - sp.a()) * s / grid;
    const int k = sp.section_of(t);
    g.t.push_back(t);
    g.rows.push_back(sp.section(k).derivative_matrix(t, n - 1) * basis[k]);
  }
  return g;
}

// Extremes of one determinant family along one row of the grid.
struct RowStats {
  double min_val = std::numeric_limits<double>::infinity();
  double max_val = -std::numeric_limits<double>::infinity();
  double min_abs = std::numeric_limits<double>::infinity();
  double max_abs = 0.0;
  double x = 0.0, y = 0.0;  // argmin |value|
};

void merge(RowStats& into, const RowStats& s) {
  into.min_val = std::min(into.min_val, s.min_val);
  into.max_val = std::max(into.max_val, s.max_val);
  into.max_abs = std::max(into.max_abs, s.max_abs);
  if (s.min_abs < into.min_abs) {
    into.min_abs = s.min_abs;
    into.x = s.x;
    into.y = s.y;
  }
}

std::vector<RowStats> scan_row(const GridRows& g, int xi, int n) {
  std::vector<RowStats> out(n);
  Eigen::MatrixXd m(n + 1, n + 1);
  for (int yi = xi + 1; yi < static_cast<int>(g.t.size()); ++yi) {
    const double dist = g.t[yi] - g.t[xi];
    for (int i = 1; i <= n; ++i) {
      const int j = n + 1 - i;
      m.topRows(i) = g.rows[xi].topRows(i);
      m.bottomRows(j) = g.rows[yi].topRows(j);
      for (int r = 0; r <= n; ++r) {
        const double nr = m.row(r).norm();
        if (nr > 0.0) m.row(r) /= nr;
      }
      const double v = m.fullPivLu().determinant() / std::pow(dist, i * j);
      RowStats& s = out[i - 1];
      s.min_val = std::min(s.min_val, v);
      s.max_val = std::max(s.max_val, v);
      s.max_abs = std::max(s.max_abs, std::abs(v));
      if (std::abs(v) < s.min_abs) {
        s.min_abs = std::abs(v);
        s.x = g.t[xi];
        s.y = g.t[yi];
      }
    }
  }
  return out;
}

BruteForceResult conclude(const std::vector<RowStats>& stats, double near_zero) {
  BruteForceResult res;
  res.min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < stats.size(); ++i) {
    const RowStats& s = stats[i];
    const double ratio = s.max_abs > 0.0 ? s.min_abs / s.max_abs : 0.0;
    const bool changes = !(s.min_val > 0.0 || s.max_val < 0.0);
    const bool bad = changes || ratio < near_zero;
    if (ratio < res.min_ratio) res.min_ratio = ratio;
    if (changes) res.sign_change = true;
    if (bad && res.verdict == Verdict::EC) {
      res.verdict = Verdict::NotEC;
      res.det_i = static_cast<int>(i) + 1;
      res.x = s.x;
      res.y = s.y;
    }
  }
  return res;
}

void check_brute_force_args(const PiecewiseSpace& sp, int grid) {
  if (sp.order() < 1 || sp.order() > 4)
    throw Error(ErrorKind::InvalidInput, "brute-force check limited to 1 <= n <= 4");
  if (grid < 2 || grid > 400) throw Error(ErrorKind::InvalidInput, "grid must lie in [2, 400]");
}

}  // namespace

BruteForceResult brute_force_ec_serial(const PiecewiseSpace& sp, int grid, double near_zero) {
  check_brute_force_args(sp, grid);
  const int n = sp.order();
  const GridRows g = grid_rows(sp, grid);
  std::vector<RowStats> total(n);
  for (int xi = 0; xi < grid; ++xi) {
    const std::vector<RowStats> row = scan_row(g, xi, n);
    for (int i = 0; i < n; ++i) merge(total[i], row[i]);
  }
  return conclude(total, near_zero);
}

BruteForceResult brute_force_ec(const PiecewiseSpace& sp, int grid, double near_zero) {
  check_brute_force_args(sp, grid);
  const int n = sp.order();
  const GridRows g = grid_rows(sp, grid);
  std::vector<std::vector<RowStats>> rows(grid);
#pragma omp parallel for schedule(dynamic)
  for (int xi = 0; xi < grid; ++xi) rows[xi] = scan_row(g, xi, n);
  // Merge in grid order so the witness matches the serial scan.
  std::vector<RowStats> total(n);
  for (const auto& row : rows)
    for (int i = 0; i < n; ++i) merge(total[i], row[i]);
  return conclude(total, near_zero);
}

}  // namespace critlen
