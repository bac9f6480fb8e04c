#include "critlen/design.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/QR>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include "critlen/error.hpp"

namespace critlen {

namespace {

constexpr int kPositivitySamples = 128;

double interior_sample(double a, double b, int s, int count) {
  return a + (b - a) * (s + 1.0) / (count + 1.0);
}

}  // namespace

PiecewiseFunction NormalizedBasis::function(int i) const {
  PiecewiseFunction f = base.column(i);
  for (auto& c : f.coefs) c *= alphas[i];
  return f;
}

std::vector<double> NormalizedBasis::eval(double x, int order) const {
  std::vector<double> out(dim());
  const int k = space.section_of(x);
  for (int i = 0; i < dim(); ++i)
    out[i] = alphas[i] * space.eval_on(base.column(i), k, x, order);
  return out;
}

std::vector<double> expand_unity(const PiecewiseSpace& sp, const BernsteinLikeBasis& blb,
                                 double tol_zero) {
  const int n1 = sp.dim();
  std::vector<CoefVec> unit;
  for (int k = 0; k < sp.num_sections(); ++k) {
    const auto idx = sp.section(k).fam.constant_index();
    if (!idx)
      throw Error(ErrorKind::ConstantsAbsent,
                  fmt::format("section {} does not contain the constants", k));
    unit.push_back(CoefVec::Unit(n1, *idx));
  }
  const Eigen::VectorXd alpha = blb.columns.front().colPivHouseholderQr().solve(unit.front());
  double residual = 0.0;
  for (int k = 0; k < sp.num_sections(); ++k)
    residual = std::max(residual, (blb.columns[k] * alpha - unit[k]).norm());
  if (!(residual <= 1e-9))
    throw Error(ErrorKind::ConstantsAbsent,
                fmt::format("the constant function is not in the space (residual {:.3e})",
                            residual));
  const double scale = alpha.cwiseAbs().maxCoeff();
  for (int i = 0; i < n1; ++i)
    if (!(alpha(i) > tol_zero * scale))
      throw Error(ErrorKind::NotGoodForDesign,
                  fmt::format("alpha_{} = {:.6e} is not positive", i, alpha(i)));
  return {alpha.data(), alpha.data() + n1};
}

NormalizedBasis bernstein_basis(const PiecewiseSpace& sp, double tol_det, double tol_zero) {
  auto result = global_bernstein_like(sp, tol_det);
  if (auto* none = std::get_if<NoBasisEvidence>(&result))
    throw Error(ErrorKind::RankDeficient,
                fmt::format("no Bernstein-like basis on [{}, {}]: determinant ({}, {}) vanishes",
                            sp.a(), sp.b(), none->i, none->j));
  BernsteinLikeBasis base = std::get<BernsteinLikeBasis>(std::move(result));
  std::vector<double> alphas = expand_unity(sp, base, tol_zero);
  NormalizedBasis nb{sp, std::move(base), std::move(alphas)};
  for (int s = 0; s < kPositivitySamples; ++s) {
    const double x = interior_sample(sp.a(), sp.b(), s, kPositivitySamples);
    const std::vector<double> v = nb.eval(x);
    for (int i = 0; i < nb.dim(); ++i)
      if (v[i] < -tol_zero)
        throw Error(ErrorKind::NotPositive,
                    fmt::format("B_{}({}) = {:.3e} is negative", i, x, v[i]));
  }
  return nb;
}

NormalizedBasis bernstein_basis(const RootSet& roots, double a, double b) {
  return bernstein_basis(make_uniform(roots, a, {}, b));
}

std::vector<PiecewiseFunction> transition_functions(const NormalizedBasis& nb) {
  const int n1 = nb.dim();
  std::vector<PiecewiseFunction> out(n1);
  PiecewiseFunction acc = nb.function(n1 - 1);
  out[n1 - 1] = acc;
  for (int i = n1 - 2; i >= 0; --i) {
    const PiecewiseFunction bi = nb.function(i);
    for (std::size_t k = 0; k < acc.coefs.size(); ++k) acc.coefs[k] += bi.coefs[k];
    out[i] = acc;
  }
  return out;
}

BernsteinLikeBasis derived_basis(const NormalizedBasis& nb) {
  const std::vector<PiecewiseFunction> star = transition_functions(nb);
  const int n = nb.dim() - 1;
  BernsteinLikeBasis d;
  d.c = nb.a();
  d.d = nb.b();
  for (int k = 0; k < nb.space.num_sections(); ++k) d.columns.emplace_back(n + 1, n);
  for (int i = 0; i < n; ++i) {
    const PiecewiseFunction g = nb.space.differentiate(star[i + 1]);
    for (int k = 0; k < nb.space.num_sections(); ++k) d.columns[k].col(i) = g.coefs[k];
  }
  return d;
}

WeightSystem::WeightSystem(PiecewiseSpace sp, BernsteinLikeBasis global)
    : sp_(std::move(sp)) {
  for (int i = 0; i < global.dim(); ++i) v0_.push_back(global.column(i));
  if (static_cast<int>(v0_.size()) != sp_.dim())
    throw Error(ErrorKind::InvalidInput, "global basis does not match the space");
  scale_.assign(sp_.dim(), 1.0);
  for (int p = 0; p <= order(); ++p) {
    const std::vector<double> v = level_basis(p, a());
    double w = 0.0;
    for (double x : v) w += x;
    scale_[p] = 1.0 / w;
  }
}

std::vector<Jet> WeightSystem::level_jets(int p, double x) const {
  const int n = order();
  if (p < 0 || p > n) throw Error(ErrorKind::InvalidInput, fmt::format("no level {}", p));
  std::vector<Jet> jets;
  for (const auto& f : v0_) jets.push_back(Jet::from_derivatives(sp_.derivatives(f, x, n)));
  for (int level = 0; level < p; ++level) jets = diminish(jets);
  return jets;
}

std::vector<double> WeightSystem::level_basis(int p, double x) const {
  std::vector<double> out;
  for (const Jet& j : level_jets(p, x)) out.push_back(j.value());
  return out;
}

std::vector<double> WeightSystem::bernstein(int p, double x) const {
  std::vector<double> v = level_basis(p, x);
  double w = 0.0;
  for (double e : v) w += e;
  for (double& e : v) e /= w;
  return v;
}

double WeightSystem::weight(int p, double x) const {
  double w = 0.0;
  for (double e : level_basis(p, x)) w += e;
  return w * scale_[p];
}

WeightSystem weight_system(const ECTestReport& report, const PiecewiseSpace& sp) {
  if (report.verdict != Verdict::EC || !report.global)
    throw Error(ErrorKind::LevelsMissing,
                "weight system needs an EC report computed with keep_levels");
  WeightSystem ws(report.tested ? *report.tested : sp, *report.global);
  for (int p = 0; p <= ws.order(); ++p)
    for (int s = 0; s < kPositivitySamples; ++s) {
      const double x = ws.a() + (ws.b() - ws.a()) * s / (kPositivitySamples - 1.0);
      const double w = ws.weight(p, x);
      if (!(w > 0.0))
        throw Error(ErrorKind::NotPositive, fmt::format("w_{}({}) = {:.3e}", p, x, w));
    }
  return ws;
}

std::vector<std::vector<double>> eval_curve(const NormalizedBasis& nb,
                                            const std::vector<std::vector<double>>& control,
                                            int samples) {
  if (static_cast<int>(control.size()) != nb.dim())
    throw Error(ErrorKind::InvalidInput,
                fmt::format("{} control points given, {} expected", control.size(), nb.dim()));
  if (samples < 2) throw Error(ErrorKind::InvalidInput, "need at least two samples");
  const std::size_t d = control.front().size();
  for (const auto& p : control)
    if (p.size() != d) throw Error(ErrorKind::InvalidInput, "control points differ in dimension");
  std::vector<std::vector<double>> curve;
  for (int s = 0; s < samples; ++s) {
    const double x = s + 1 == samples ? nb.b() : nb.a() + (nb.b() - nb.a()) * s / (samples - 1.0);
    const std::vector<double> b = nb.eval(x);
    std::vector<double> pt(d, 0.0);
    for (int i = 0; i < nb.dim(); ++i)
      for (std::size_t c = 0; c < d; ++c) pt[c] += b[i] * control[i][c];
    curve.push_back(std::move(pt));
  }
  return curve;
}

namespace {

// Integral of V_i^{p} over [lo, hi], split at the knots.
double integrate_level(const WeightSystem& ws, int p, int i, double lo, double hi) {
  using boost::math::quadrature::gauss_kronrod;
  std::vector<double> cuts{lo};
  for (double t : ws.space().knots())
    if (t > lo && t < hi) cuts.push_back(t);
  cuts.push_back(hi);
  double total = 0.0;
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    double err = 0.0;
    auto f = [&](double t) { return ws.level_basis(p, t)[i]; };
    const double v = gauss_kronrod<double, 15>::integrate(f, cuts[s], cuts[s + 1], 12, 1e-9, &err);
    if (!(err <= 1e-7 * std::max(1.0, std::abs(v))))
      throw Error(ErrorKind::QuadratureFailure,
                  fmt::format("error estimate {:.3e} on [{}, {}]", err, cuts[s], cuts[s + 1]));
    total += v;
  }
  return total;
}

}  // namespace

double irr_check(const WeightSystem& ws, int samples) {
  if (samples < 2) throw Error(ErrorKind::InvalidInput, "need at least two samples");
  const int n = ws.order();
  const double a = ws.a(), b = ws.b();
  double worst = 0.0;
  for (int p = n; p >= 1; --p) {
    const int m = n - p;  // level-p basis has m + 1 functions
    // Running integrals of w_p B_i^{p} = V_i^{p} from a.
    std::vector<double> run(m + 1, 0.0), total(m + 1, 0.0);
    for (int i = 0; i <= m; ++i) total[i] = integrate_level(ws, p, i, a, b);
    double prev = a;
    for (int s = 1; s < samples; ++s) {
      const double x = s + 1 == samples ? b : a + (b - a) * s / (samples - 1.0);
      for (int i = 0; i <= m; ++i) run[i] += integrate_level(ws, p, i, prev, x);
      prev = x;
      std::vector<double> rebuilt(m + 2);
      rebuilt[0] = 1.0 - run[0] / total[0];
      for (int i = 1; i <= m; ++i) rebuilt[i] = run[i - 1] / total[i - 1] - run[i] / total[i];
      rebuilt[m + 1] = run[m] / total[m];
      const std::vector<double> direct = ws.bernstein(p - 1, x);
      for (int i = 0; i <= m + 1; ++i) worst = std::max(worst, std::abs(rebuilt[i] - direct[i]));
    }
  }
  return worst;
}

}  // namespace critlen
