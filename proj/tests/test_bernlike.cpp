#include <gtest/gtest.h>

#include <cmath>

#include "critlen/bernlike.hpp"
#include "critlen/error.hpp"
#include "critlen/operator_spec.hpp"
#include "support.hpp"

using namespace critlen;
using namespace critlen::test;

namespace {

double value(const Section& s, const CoefVec& c, double x, int order = 0) {
  return s.derivative_matrix(x, order).row(order).dot(c);
}

// V_i vanishes i times at c and n - i times at d, with V_i^{(i)}(c) > 0.
void expect_multiplicities(const Section& s, const Eigen::MatrixXd& cols, double tol) {
  const int n = static_cast<int>(cols.cols()) - 1;
  const Eigen::MatrixXd at_c = s.derivative_matrix(s.left, n) * cols;
  const Eigen::MatrixXd at_d = s.derivative_matrix(s.right, n) * cols;
  for (int i = 0; i <= n; ++i) {
    const double scale = std::max(at_c.col(i).cwiseAbs().maxCoeff(), at_d.col(i).cwiseAbs().maxCoeff());
    for (int o = 0; o < i; ++o) EXPECT_LT(std::abs(at_c(o, i)), tol * scale) << i << " " << o;
    EXPECT_GT(at_c(i, i), tol * scale) << i;
    for (int o = 0; o < n - i; ++o) EXPECT_LT(std::abs(at_d(o, i)), tol * scale) << i << " " << o;
    EXPECT_GT(std::abs(at_d(n - i, i)), tol * scale) << i;
    EXPECT_NEAR(cols.col(i).norm(), 1.0, 1e-14);
  }
}

}  // namespace

TEST(LocalBasis, CosSinIsLagrangeLike) {
  const double a = 0.3, b = 2.1;
  const Section s{FamilyBasis(cyclo(1)), a, b};
  const BernsteinLikeBasis blb = local_bernstein_like(s.fam, a, b);
  const CoefVec& v0 = blb.columns[0].col(0);
  const CoefVec& v1 = blb.columns[0].col(1);
  // V_0 proportional to sin(b - x), V_1 to sin(x - a)
  const double r0 = value(s, v0, 1.0) / std::sin(b - 1.0);
  const double r1 = value(s, v1, 1.0) / std::sin(1.0 - a);
  EXPECT_GT(r0, 0.0);
  EXPECT_GT(r1, 0.0);
  for (double x = a; x <= b; x += 0.1) {
    EXPECT_NEAR(value(s, v0, x), r0 * std::sin(b - x), 1e-13);
    EXPECT_NEAR(value(s, v1, x), r1 * std::sin(x - a), 1e-13);
  }
}

TEST(LocalBasis, Linear) {
  const Section s{FamilyBasis(roots({{0, 0, 2}})), 0.0, 1.0};
  const BernsteinLikeBasis blb = local_bernstein_like(s.fam, 0.0, 1.0);
  const double r0 = value(s, blb.columns[0].col(0), 0.0);
  const double r1 = value(s, blb.columns[0].col(1), 1.0);
  for (double x = 0.0; x <= 1.0; x += 0.125) {
    EXPECT_NEAR(value(s, blb.columns[0].col(0), x), r0 * (1 - x), 1e-14);
    EXPECT_NEAR(value(s, blb.columns[0].col(1), x), r1 * x, 1e-14);
  }
}

TEST(LocalBasis, RankDeficientAtPi) {
  try {
    local_bernstein_like(FamilyBasis(cyclo(1)), 0.0, kPi);
    FAIL() << "expected RankDeficient";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::RankDeficient);
  }
}

TEST(LocalBasis, PositivityCheck) {
  // {cos, sin} on [0, 4]: V_0 ~ sin(4 - x) changes sign.
  try {
    local_bernstein_like(FamilyBasis(cyclo(1)), 0.0, 4.0, true);
    FAIL() << "expected NotPositive";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotPositive);
  }
  EXPECT_NO_THROW(local_bernstein_like(FamilyBasis(cyclo(1)), 0.0, 3.0, true));
}

TEST(LocalBasis, EndpointMultiplicities) {
  for (const RootSet& r : {cyclo(3), cyclo(4), hyp_roots(4), roots({{-0.4, 1.3, 1}, {0.5, 0, 2}})}) {
    const Section s{FamilyBasis(r), -0.5, 1.7};
    const BernsteinLikeBasis blb = local_bernstein_like(s);
    expect_multiplicities(s, blb.columns[0], 1e-9);
  }
}

TEST(GlobalBasis, DeterminantFollowsSine) {
  // For {cos, sin} on [0, h] the single Step-0 determinant is
  // det[[cos 0, sin 0], [cos h, sin h]] = sin h up to positive scalings.
  for (double h : {0.5, 1.5, 2.5, 3.0, 3.14}) {
    const PiecewiseSpace sp = uniform(cyclo(1), 0.0, h, 2);
    const auto dets = step0_determinants(sp);
    ASSERT_EQ(dets.size(), 1u);
    EXPECT_GT(dets[0], 0.0) << h;
    EXPECT_LE(std::abs(dets[0]), 1.0);
    EXPECT_TRUE(std::holds_alternative<BernsteinLikeBasis>(global_bernstein_like(sp)));
  }
  const double near_pi = step0_determinants(uniform(cyclo(1), 0.0, kPi - 1e-6, 2))[0];
  EXPECT_GT(near_pi, 0.0);
  EXPECT_LT(near_pi, 1e-5);
  EXPECT_LT(step0_determinants(uniform(cyclo(1), 0.0, 3.5, 2))[0], 0.0);
}

TEST(GlobalBasis, NoBasisAtPi) {
  const PiecewiseSpace sp = uniform(cyclo(1), 0.0, kPi, 2);
  const auto r = global_bernstein_like(sp);
  ASSERT_TRUE(std::holds_alternative<NoBasisEvidence>(r));
  EXPECT_EQ(std::get<NoBasisEvidence>(r).i, 1);
  EXPECT_EQ(std::get<NoBasisEvidence>(r).j, 1);
}

TEST(GlobalBasis, ShortIntervalHighOrder) {
  const PiecewiseSpace sp = uniform(cyclo(4), 0.0, 0.1, 2);
  EXPECT_TRUE(std::holds_alternative<BernsteinLikeBasis>(global_bernstein_like(sp)));
}

TEST(GlobalBasis, MultiplicitiesAcrossSections) {
  const PiecewiseSpace sp = make_spliced({{trig_roots(3), 1.5}, {hyp_roots(3), 1.0}});
  const BernsteinLikeBasis g = std::get<BernsteinLikeBasis>(global_bernstein_like(sp));
  const int n = sp.order();
  for (int i = 0; i <= n; ++i) {
    const PiecewiseFunction f = g.column(i);
    const auto at_a = sp.derivatives(f, sp.a(), n);
    std::vector<double> at_b;
    for (int o = 0; o <= n; ++o) at_b.push_back(sp.eval_on(f, 1, sp.b(), o));
    double scale = 0.0;
    for (double v : at_a) scale = std::max(scale, std::abs(v));
    for (double v : at_b) scale = std::max(scale, std::abs(v));
    for (int o = 0; o < i; ++o) EXPECT_LT(std::abs(at_a[o]), 1e-9 * scale);
    EXPECT_GT(at_a[i], 0.0);
    for (int o = 0; o < n - i; ++o) EXPECT_LT(std::abs(at_b[o]), 1e-9 * scale);
  }
}

TEST(LevelZero, QuarterPiExample) {
  // {cos, sin} on [0, pi/2] with knot pi/4; global V_0 ~ cos x.  In the
  // first section's Lagrange-normalized basis (sin(pi/4 - x), sin x) / sin(pi/4)
  // cos x has coefficients (cos 0, cos(pi/4)) = (1, 1/sqrt 2), i.e. ratio sqrt 2.
  const PiecewiseSpace sp = make_uniform(cyclo(1), 0.0, {kPi / 4}, kPi / 2);
  const BernsteinLikeBasis g = std::get<BernsteinLikeBasis>(global_bernstein_like(sp));
  std::vector<BernsteinLikeBasis> locals;
  for (int k = 0; k < 2; ++k) locals.push_back(local_bernstein_like(sp.section(k)));
  const GammaTensor gam = level0_expansions(sp, g, locals);
  // Undo the unit-norm scaling: multiply by the local basis values at the
  // interpolation nodes.
  const Section& s0 = sp.section(0);
  const double l0 = value(s0, locals[0].columns[0].col(0), 0.0);
  const double l1 = value(s0, locals[0].columns[0].col(1), kPi / 4);
  const double c0 = gam(0, 0, 0) * l0;
  const double c1 = gam(0, 0, 1) * l1;
  EXPECT_NEAR(c0 / c1, std::sqrt(2.0), 1e-12);
  EXPECT_GT(c0, 0.0);
}

TEST(LevelZero, SingleSectionIsIdentity) {
  const PiecewiseSpace sp = uniform(cyclo(2), 0.0, 2.0);
  const BernsteinLikeBasis g = std::get<BernsteinLikeBasis>(global_bernstein_like(sp));
  const GammaTensor gam = level0_expansions(sp, g, {local_bernstein_like(sp.section(0))});
  for (int i = 0; i < 3; ++i)
    for (int r = 0; r < 3; ++r) EXPECT_NEAR(gam(i, 0, r), i == r ? 1.0 : 0.0, 1e-12);
}

TEST(LevelZero, PatternAndReexpansion) {
  for (const PiecewiseSpace& sp :
       {uniform(cyclo(3), 0.0, 5.0, 3), make_spliced({{trig_roots(2), 2.0}, {hyp_roots(2), 1.0}}),
        uniform(cyclo(4), 0.0, 7.0, 2)}) {
    const int n1 = sp.dim();
    const BernsteinLikeBasis g = std::get<BernsteinLikeBasis>(global_bernstein_like(sp));
    std::vector<BernsteinLikeBasis> locals;
    for (int k = 0; k < sp.num_sections(); ++k) locals.push_back(local_bernstein_like(sp.section(k)));
    const GammaTensor gam = level0_expansions(sp, g, locals);
    for (int i = 0; i < n1; ++i)
      for (int k = 0; k < sp.num_sections(); ++k) {
        double scale = 0.0;
        for (int r = 0; r < n1; ++r) scale = std::max(scale, std::abs(gam(i, k, r)));
        for (int r = 0; r < n1; ++r) {
          if (gam.is_pattern_zero(i, k, r))
            EXPECT_LT(std::abs(gam(i, k, r)), 1e-9 * scale);
          else
            EXPECT_GT(gam(i, k, r), 0.0) << i << k << r;  // all these spaces are EC
        }
        // Re-expansion at 33 points
        const Section& s = sp.section(k);
        for (int m = 0; m <= 32; ++m) {
          const double x = s.left + s.length() * m / 32.0;
          double sum = 0.0;
          for (int r = 0; r < n1; ++r) sum += gam(i, k, r) * value(s, locals[k].columns[0].col(r), x);
          const double direct = value(s, g.columns[k].col(i), x);
          EXPECT_NEAR(sum, direct, 1e-9 * std::max(1.0, std::abs(direct)));
        }
      }
  }
}

TEST(LevelZero, FirstRowHasNoForcedZeros) {
  const PiecewiseSpace sp = uniform(cyclo(2), 0.0, 3.0, 2);
  const BernsteinLikeBasis g = std::get<BernsteinLikeBasis>(global_bernstein_like(sp));
  const GammaTensor gam = level0_expansions(
      sp, g, {local_bernstein_like(sp.section(0)), local_bernstein_like(sp.section(1))});
  for (int r = 0; r < 3; ++r) EXPECT_GT(gam(0, 0, r), 0.0);
}

TEST(LevelZero, LocalCountMismatch) {
  const PiecewiseSpace sp = uniform(cyclo(1), 0.0, 2.0, 2);
  const BernsteinLikeBasis g = std::get<BernsteinLikeBasis>(global_bernstein_like(sp));
  EXPECT_THROW(level0_expansions(sp, g, {local_bernstein_like(sp.section(0))}), Error);
}
