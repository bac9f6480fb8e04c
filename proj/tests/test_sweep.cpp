#include <gtest/gtest.h>

#include <cmath>

#include "critlen/error.hpp"
#include "critlen/sweep.hpp"
#include "support.hpp"

using namespace critlen;
using namespace critlen::test;

namespace {

RegionSpec ht_spec(int n, int grid) {
  RegionSpec s;
  s.splice = SpliceTemplate::parse({"trig:T", "hyp:H"}, n);
  s.grid = grid;
  s.y_hi = 6.0;
  return s;
}

RootFamily scaled_cyclo(int n) {
  return [n](double b) { return cyclo(n, b); };
}

}  // namespace

TEST(Linspace, Endpoints) {
  const auto v = linspace(1.0, 2.0, 5);
  ASSERT_EQ(v.size(), 5u);
  EXPECT_DOUBLE_EQ(v.front(), 1.0);
  EXPECT_DOUBLE_EQ(v.back(), 2.0);
  EXPECT_DOUBLE_EQ(v[2], 1.5);
  EXPECT_EQ(linspace(3.0, 4.0, 1), std::vector<double>{3.0});
  EXPECT_THROW(linspace(0.0, 1.0, 0), Error);
}

TEST(Sweep, ScalingLawAndOrder) {
  const auto params = linspace(0.5, 2.5, 5);
  const auto pts = sweep(scaled_cyclo(2), params, CritLenConfig{});
  ASSERT_EQ(pts.size(), params.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    EXPECT_EQ(pts[i].param, params[i]);
    EXPECT_TRUE(pts[i].error.empty());
    EXPECT_NEAR(pts[i].result.value * params[i], 2 * kPi, 1e-6);
  }
  for (std::size_t i = 1; i < pts.size(); ++i) EXPECT_LT(pts[i].result.value, pts[i - 1].result.value);
}

TEST(Sweep, ParallelMatchesSerial) {
  const auto params = linspace(0.3, 3.0, 7);
  CritLenConfig cfg;
  cfg.keep_trace = false;
  const auto p = sweep(scaled_cyclo(3), params, cfg);
  const auto s = sweep_serial(scaled_cyclo(3), params, cfg);
  ASSERT_EQ(p.size(), s.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    EXPECT_EQ(p[i].result.value, s[i].result.value);
    EXPECT_EQ(p[i].result.mu, s[i].result.mu);
    EXPECT_EQ(p[i].error, s[i].error);
  }
}

TEST(Sweep, FailuresAreRecorded) {
  // A family that throws is recorded per point.
  const RootFamily bad = [](double b) {
    if (b > 1.5) throw Error(ErrorKind::InvalidInput, "bad point");
    return cyclo(1, b);
  };
  const auto pts = sweep(bad, {1.0, 2.0}, CritLenConfig{});
  EXPECT_TRUE(pts[0].error.empty());
  EXPECT_FALSE(pts[1].error.empty());
}

TEST(Sweep, DesignDeflates) {
  const auto pts = sweep(scaled_cyclo(2), {1.0, 2.0}, CritLenConfig{}, true);
  EXPECT_NEAR(pts[0].result.value, kPi, 1e-8);
  EXPECT_NEAR(pts[1].result.value, kPi / 2, 1e-8);
  EXPECT_TRUE(pts[0].result.design);
}

TEST(Region, CellVerdicts) {
  const RegionSpec s = ht_spec(1, 10);
  EXPECT_EQ(region_cell(s, 2.5, 0.8, {}).verdict, Verdict::EC);
  const RegionCell above = region_cell(s, 2.5, 1.1, {});
  EXPECT_EQ(above.verdict, Verdict::NotEC);
  EXPECT_TRUE(above.admissible);
  const RegionCell long_trig = region_cell(s, 3.2, 1.1, {});
  EXPECT_NE(long_trig.verdict, Verdict::EC);
  EXPECT_FALSE(long_trig.admissible);
}

TEST(Region, BoundarySatisfiesClosedForm) {
  const RegionSpec s = ht_spec(1, 10);
  for (double t : {2.5, 2.8}) {
    const BoundaryPoint b = boundary_at(s, t);
    EXPECT_EQ(b.status, BoundaryPoint::Status::Interior);
    EXPECT_LT(b.y_pass, b.y_fail);
    EXPECT_NEAR(1.0 / std::tan(t) + 1.0 / std::tanh(b.y), 0.0, 1e-5) << t;
  }
}

TEST(Region, CeilingAndFloor) {
  const RegionSpec s = ht_spec(1, 10);
  // |cot T| < 1: EC for every H.
  EXPECT_EQ(boundary_at(s, 2.2).status, BoundaryPoint::Status::Ceiling);
  // T > pi: the trig section alone is not EC.
  EXPECT_EQ(boundary_at(s, 3.2).status, BoundaryPoint::Status::Floor);
}

TEST(Region, RasterParallelMatchesSerial) {
  const RegionSpec s = ht_spec(2, 6);
  const auto p = region_raster(s);
  const auto q = region_raster_serial(s);
  ASSERT_EQ(p.size(), 36u);
  ASSERT_EQ(p.size(), q.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    EXPECT_EQ(p[i].x, q[i].x);
    EXPECT_EQ(p[i].y, q[i].y);
    EXPECT_EQ(p[i].verdict, q[i].verdict);
    EXPECT_EQ(p[i].admissible, q[i].admissible);
    EXPECT_EQ(p[i].det_index, q[i].det_index);
  }
}

TEST(Region, BoundaryParallelMatchesSerial) {
  const RegionSpec s = ht_spec(3, 6);
  const auto p = region_boundary(s);
  const auto q = region_boundary_serial(s);
  ASSERT_EQ(p.size(), q.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    EXPECT_EQ(p[i].y, q[i].y);
    EXPECT_EQ(p[i].status, q[i].status);
    EXPECT_EQ(p[i].det_index, q[i].det_index);
    EXPECT_EQ(p[i].cusp, q[i].cusp);
  }
}

TEST(Region, BoundaryDecreasesInT) {
  const auto b = region_boundary(ht_spec(2, 8));
  double prev = 1e9;
  for (const BoundaryPoint& p : b)
    if (p.status == BoundaryPoint::Status::Interior) {
      EXPECT_LT(p.y, prev) << p.x;
      prev = p.y;
    }
}
