#include <gtest/gtest.h>

#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <functional>

#include "critlen/error.hpp"
#include "critlen/operator_spec.hpp"
#include "critlen/oracles.hpp"
#include "support.hpp"

using namespace critlen;
using namespace critlen::test;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::InvalidInput;
}

// Plain bisection used as an independent reference.
double bisect(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

void expect_bracket(const OracleValue& v) {
  EXPECT_LE(v.lo, v.value);
  EXPECT_LE(v.value, v.hi);
  EXPECT_LE(v.hi - v.lo, 1e-12 * std::max(1.0, std::abs(v.value)));
}

}  // namespace

TEST(Bisect, FindsRoot) {
  const OracleValue v = bisect_root([](double x) { return x * x - 2.0; }, 0.0, 2.0, "sqrt2");
  EXPECT_NEAR(v.value, std::sqrt(2.0), 1e-12);
  EXPECT_EQ(v.method, "sqrt2");
  expect_bracket(v);
}

TEST(Bisect, NoSignChange) {
  EXPECT_EQ(kind_of([] { bisect_root([](double x) { return x * x + 1.0; }, -1.0, 1.0, "none"); }),
            ErrorKind::NoSignChange);
}

TEST(Bessel, ScaledSeriesAgreesWithLibrary) {
  for (double nu : {0.0, 0.5, 1.5, 3.5, 7.0})
    for (double x : {0.3, 2.0, 6.0, 11.0}) {
      const double ref = boost::math::cyl_bessel_j(nu, x) / std::pow(x / 2, nu);
      EXPECT_NEAR(bessel_j_scaled(nu, x), ref, 1e-12 * std::max(1.0, std::abs(ref))) << nu << " " << x;
    }
}

TEST(Bessel, HalfOrderIsPi) {
  const OracleValue v = bessel_first_zero(0.5);
  EXPECT_NEAR(v.value, kPi, 1e-12 * kPi);
  expect_bracket(v);
}

TEST(Bessel, ThreeHalvesSolvesTanXEqualsX) {
  const double ref = bisect([](double x) { return std::sin(x) - x * std::cos(x); }, 4.0, 4.7);
  EXPECT_NEAR(bessel_first_zero(1.5).value, ref, 1e-11);
  EXPECT_NEAR(2 * ref, 8.9868, 1e-4);
}

TEST(Bessel, AgreesWithLibraryZeros) {
  for (double nu : {0.0, 1.0, 2.5, 3.5, 6.0, 10.0})
    EXPECT_NEAR(bessel_first_zero(nu).value, boost::math::cyl_bessel_j_zero(nu, 1), 1e-10) << nu;
  EXPECT_NEAR(2 * bessel_first_zero(2.5).value, 11.5269, 1e-4);
}

TEST(Bessel, OrderOutOfRange) {
  EXPECT_THROW(bessel_first_zero(-0.5), Error);
  EXPECT_THROW(bessel_first_zero(10.5), Error);
}

TEST(ClosedForm, DoubleTrigLowIsPi) {
  const OracleValue v = solve_closed_form(ClosedForm::DTRIG_LOW, 1.0, 2.0);
  EXPECT_NEAR(v.value, kPi, 1e-10);
}

TEST(ClosedForm, DoubleTrigLowGeneric) {
  const double a = 1.0, b = 2.5;
  const OracleValue v = solve_closed_form(ClosedForm::DTRIG_LOW, a, b);
  EXPECT_NEAR(b * std::sin(a * v.value), a * std::sin(b * v.value), 1e-10);
  EXPECT_GE(v.value, kPi / b * std::floor(b / a) - 1e-12);
  EXPECT_LE(v.value, kPi / b * std::ceil(b / a) + 1e-12);
}

TEST(ClosedForm, DoubleTrigHigh) {
  const double a = 1.0, b = 4.0;
  const double x = solve_closed_form(ClosedForm::DTRIG_HIGH, a, b).value;
  EXPECT_NEAR((b - a) * std::sin((b + a) * x / 2) + (b + a) * std::sin((b - a) * x / 2), 0.0, 1e-10);
  EXPECT_GT(x, 2 * kPi / b);
  EXPECT_LT(x, 2 * kPi / (b - a));
}

TEST(ClosedForm, ZS9) {
  const double ref = bisect([](double x) { return std::sin(x) - std::tanh(x) * std::cos(x); },
                            kPi + 0.1, 1.5 * kPi - 0.1);
  const OracleValue v = solve_closed_form(ClosedForm::ZS9, 1.0, 1.0);
  EXPECT_NEAR(v.value, ref, 1e-11);
  EXPECT_NEAR(v.value, 3.927, 1e-3);
}

TEST(ClosedForm, ZH3InBracket) {
  for (double b : {0.5, 1.0, 2.0}) {
    const double x = solve_closed_form(ClosedForm::ZH3, 1.0, b).value;
    EXPECT_GT(x, kPi / b);
    EXPECT_LT(x, 2 * kPi / b);
    const double lhs = (b * b - 1) * std::sinh(x) * std::sin(b * x);
    const double rhs = 2 * b * (1 - std::cosh(x) * std::cos(b * x));
    EXPECT_NEAR(lhs, rhs, 1e-9 * std::max(1.0, std::abs(rhs))) << b;
  }
}

TEST(ClosedForm, HT1) {
  const OracleValue v = solve_closed_form(ClosedForm::HT1, 2.5);
  EXPECT_NEAR(v.value, std::atanh(-std::tan(2.5)), 1e-10);
  EXPECT_NEAR(v.value, 0.966183, 1e-6);
  EXPECT_NEAR(1.0 / std::tan(2.5) + 1.0 / std::tanh(v.value), 0.0, 1e-10);
}

TEST(ClosedForm, OutOfRegime) {
  EXPECT_EQ(kind_of([] { solve_closed_form(ClosedForm::DTRIG_LOW, 1.0, 4.0); }), ErrorKind::OutOfRegime);
  EXPECT_EQ(kind_of([] { solve_closed_form(ClosedForm::DTRIG_HIGH, 1.0, 2.0); }),
            ErrorKind::OutOfRegime);
  EXPECT_EQ(kind_of([] { solve_closed_form(ClosedForm::HT1, 2.2); }), ErrorKind::OutOfRegime);
}

TEST(ClosedForm, NamesRoundTrip) {
  for (ClosedForm c : {ClosedForm::ZH3, ClosedForm::DTRIG_LOW, ClosedForm::DTRIG_HIGH,
                       ClosedForm::ZS9, ClosedForm::HT1})
    EXPECT_EQ(closed_form_from_string(to_string(c)), c);
  EXPECT_FALSE(closed_form_from_string("nope"));
}

TEST(Wronskian, NormalizedSolution) {
  // x^2 + 1: S = sin.
  const auto d = normalized_solution_derivatives(CharPoly{{1.0, 0.0}}, 0.7, 2);
  EXPECT_NEAR(d[0], std::sin(0.7), 1e-14);
  EXPECT_NEAR(d[1], std::cos(0.7), 1e-14);
  EXPECT_NEAR(d[2], -std::sin(0.7), 1e-14);
  // x^4 + x^2: S = x - sin x.
  const auto e = normalized_solution_derivatives(CharPoly{{0.0, 0.0, 1.0, 0.0}}, 2.0, 1);
  EXPECT_NEAR(e[0], 2.0 - std::sin(2.0), 1e-13);
  EXPECT_NEAR(e[1], 1.0 - std::cos(2.0), 1e-13);
}

TEST(Wronskian, SineFirstZeroIsPi) {
  const auto v = wronskian_scan(CharPoly{{1.0, 0.0}}, 0, 10.0);
  ASSERT_TRUE(v);
  EXPECT_NEAR(v->value, kPi, 1e-10);
}

TEST(Wronskian, QuarticCycloidalIsTwoPi) {
  const auto v = wronskian_scan(CharPoly{{0.0, 0.0, 1.0, 0.0}}, 1, 10.0);
  ASSERT_TRUE(v);
  EXPECT_NEAR(v->value, 2 * kPi, 1e-8);
}

TEST(Wronskian, HyperbolicTrigQuartic) {
  // (x^2 - 1)(x^2 + 1) = x^4 - 1
  const CharPoly p{{-1.0, 0.0, 0.0, 0.0}};
  EXPECT_FALSE(wronskian_scan(p, 0, 10.0));
  const auto v = wronskian_scan(p, 1, 10.0);
  ASSERT_TRUE(v);
  EXPECT_NEAR(v->value, solve_closed_form(ClosedForm::ZH3, 1.0, 1.0).value, 1e-8);
}

TEST(Wronskian, MinimumOverK) {
  const auto v = wronskian_critical_length(CharPoly{{0.0, 0.0, 1.0, 0.0}}, 12.0);
  ASSERT_TRUE(v);
  EXPECT_NEAR(v->value, 2 * kPi, 1e-8);
}

TEST(BruteForce, CosSinBelowPi) {
  const BruteForceResult ok = brute_force_ec(uniform(cyclo(1), 0.0, 3.0));
  EXPECT_EQ(ok.verdict, Verdict::EC);
  EXPECT_FALSE(ok.sign_change);
  const BruteForceResult r = brute_force_ec(uniform(cyclo(1), 0.0, 3.5));
  EXPECT_EQ(r.verdict, Verdict::NotEC);
  EXPECT_TRUE(r.sign_change);
  EXPECT_EQ(r.det_i, 1);
}

TEST(BruteForce, Polynomials) {
  EXPECT_EQ(brute_force_ec(uniform(roots({{0, 0, 3}}), 0.0, 10.0)).verdict, Verdict::EC);
}

TEST(BruteForce, TrigThree) {
  EXPECT_EQ(brute_force_ec(uniform(trig_roots(3), 0.0, 6.0, 2)).verdict, Verdict::EC);
  EXPECT_EQ(brute_force_ec(uniform(trig_roots(3), 0.0, 6.5, 2)).verdict, Verdict::NotEC);
}

TEST(BruteForce, ParallelMatchesSerial) {
  for (double h : {2.0, 3.5, 6.0}) {
    const PiecewiseSpace sp = uniform(trig_roots(2), 0.0, h, 2);
    const BruteForceResult p = brute_force_ec(sp, 120);
    const BruteForceResult s = brute_force_ec_serial(sp, 120);
    EXPECT_EQ(p.verdict, s.verdict);
    EXPECT_EQ(p.det_i, s.det_i);
    EXPECT_EQ(p.x, s.x);
    EXPECT_EQ(p.y, s.y);
    EXPECT_EQ(p.min_ratio, s.min_ratio);
    EXPECT_EQ(p.sign_change, s.sign_change);
  }
}
