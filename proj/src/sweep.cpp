#include "critlen/sweep.hpp"

#include <algorithm>
#include <cmath>

#include "critlen/error.hpp"

namespace critlen {

std::vector<double> linspace(double lo, double hi, int steps) {
  if (steps < 1) throw Error(ErrorKind::InvalidInput, "need at least one step");
  std::vector<double> v(steps);
  for (int i = 0; i < steps; ++i)
    v[i] = steps == 1 ? lo : (i + 1 == steps ? hi : lo + (hi - lo) * i / (steps - 1.0));
  return v;
}

namespace {

SweepPoint sweep_one(const RootFamily& family, double param, const CritLenConfig& cfg,
                     bool design) {
  SweepPoint pt;
  pt.param = param;
  try {
    const RootSet r = family(param);
    pt.result = design ? critical_length_for_design(r, cfg) : critical_length(r, cfg);
  } catch (const std::exception& e) {
    pt.error = e.what();
  }
  return pt;
}

}  // namespace

std::vector<SweepPoint> sweep(const RootFamily& family, const std::vector<double>& params,
                              const CritLenConfig& cfg, bool design) {
  std::vector<SweepPoint> out(params.size());
  const int count = static_cast<int>(params.size());
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < count; ++i) out[i] = sweep_one(family, params[i], cfg, design);
  return out;
}

std::vector<SweepPoint> sweep_serial(const RootFamily& family, const std::vector<double>& params,
                                     const CritLenConfig& cfg, bool design) {
  std::vector<SweepPoint> out;
  for (double p : params) out.push_back(sweep_one(family, p, cfg, design));
  return out;
}

const char* to_string(BoundaryPoint::Status s) {
  switch (s) {
    case BoundaryPoint::Status::Interior: return "interior";
    case BoundaryPoint::Status::Ceiling: return "ceiling";
    case BoundaryPoint::Status::Floor: return "floor";
  }
  return "?";
}

RegionCell region_cell(const RegionSpec& spec, double x, double y, const TestConfig& cfg) {
  RegionCell c;
  c.x = x;
  c.y = y;
  ECTestReport rep;
  std::vector<SectionSpec> parts;
  try {
    parts = spec.splice.sections(x, y);
    rep = ec_test(make_spliced(parts), cfg);
  } catch (const Error&) {
    c.verdict = Verdict::Inconclusive;
    return c;
  }
  c.verdict = rep.verdict;
  if (rep.failure && rep.failure->stage == TestFailure::Stage::Step0)
    c.det_index = rep.failure->det_i;
  // An EC splice restricts to EC sections; otherwise test each one alone.
  if (c.verdict != Verdict::EC) {
    for (const SectionSpec& p : parts) {
      try {
        if (ec_test(make_uniform(p.roots, 0.0, {}, p.length), cfg).verdict != Verdict::EC)
          c.admissible = false;
      } catch (const Error&) {
        c.admissible = false;
      }
    }
  }
  return c;
}

namespace {

std::vector<std::pair<double, double>> raster_points(const RegionSpec& spec) {
  if (spec.grid < 2) throw Error(ErrorKind::InvalidInput, "region grid must be >= 2");
  const std::vector<double> xs = linspace(spec.x_lo, spec.x_hi, spec.grid);
  const std::vector<double> ys = linspace(spec.y_lo, spec.y_hi, spec.grid);
  std::vector<std::pair<double, double>> pts;
  for (double x : xs)
    for (double y : ys) pts.emplace_back(x, y);
  return pts;
}

int closest_det(const RegionSpec& spec, double x, double y) {
  try {
    const std::vector<double> d = step0_determinants(make_spliced(spec.splice.sections(x, y)));
    if (d.empty()) return -1;
    const auto it = std::min_element(d.begin(), d.end(),
                                     [](double p, double q) { return std::abs(p) < std::abs(q); });
    return static_cast<int>(it - d.begin()) + 1;
  } catch (const Error&) {
    return -1;
  }
}

void flag_cusps(std::vector<BoundaryPoint>& pts) {
  int prev = -1;
  for (auto& p : pts) {
    if (p.status != BoundaryPoint::Status::Interior) continue;
    p.cusp = prev != -1 && p.det_index != prev;
    prev = p.det_index;
  }
}

}  // namespace

std::vector<RegionCell> region_raster(const RegionSpec& spec) {
  const auto pts = raster_points(spec);
  std::vector<RegionCell> out(pts.size());
  const int count = static_cast<int>(pts.size());
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < count; ++i)
    out[i] = region_cell(spec, pts[i].first, pts[i].second, spec.raster_test);
  return out;
}

std::vector<RegionCell> region_raster_serial(const RegionSpec& spec) {
  std::vector<RegionCell> out;
  for (const auto& [x, y] : raster_points(spec))
    out.push_back(region_cell(spec, x, y, spec.raster_test));
  return out;
}

BoundaryPoint boundary_at(const RegionSpec& spec, double x) {
  auto is_ec = [&](double y) {
    return region_cell(spec, x, y, spec.search_test).verdict == Verdict::EC;
  };
  BoundaryPoint b;
  b.x = x;
  if (!is_ec(spec.y_lo)) {
    b.status = BoundaryPoint::Status::Floor;
    b.y = b.y_pass = b.y_fail = spec.y_lo;
    return b;
  }
  if (is_ec(spec.y_hi)) {
    b.status = BoundaryPoint::Status::Ceiling;
    b.y = b.y_pass = b.y_fail = spec.y_hi;
    return b;
  }
  double lo = spec.y_lo, hi = spec.y_hi;
  while (hi - lo > spec.tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (is_ec(mid) ? lo : hi) = mid;
  }
  b.y_pass = lo;
  b.y_fail = hi;
  b.y = 0.5 * (lo + hi);
  b.det_index = closest_det(spec, x, hi);
  return b;
}

std::vector<BoundaryPoint> region_boundary(const RegionSpec& spec) {
  const std::vector<double> xs = linspace(spec.x_lo, spec.x_hi, spec.grid);
  std::vector<BoundaryPoint> out(xs.size());
  const int count = static_cast<int>(xs.size());
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < count; ++i) out[i] = boundary_at(spec, xs[i]);
  flag_cusps(out);
  return out;
}

std::vector<BoundaryPoint> region_boundary_serial(const RegionSpec& spec) {
  std::vector<BoundaryPoint> out;
  for (double x : linspace(spec.x_lo, spec.x_hi, spec.grid)) out.push_back(boundary_at(spec, x));
  flag_cusps(out);
  return out;
}

}  // namespace critlen
