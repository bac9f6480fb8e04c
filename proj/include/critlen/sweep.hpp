#pragma once

// Embarrassingly parallel drivers: critical length over a parameter range,
// and EC verdicts over a two-parameter splice family.  Each parallel driver
// has a serial twin producing identical output; results are merged in
// parameter order.

#include <functional>
#include <string>
#include <vector>

#include "critlen/critlen.hpp"
#include "critlen/operator_spec.hpp"

namespace critlen {

struct SweepPoint {
  double param = 0.0;
  CriticalLengthResult result;
  std::string error;  // non-empty when the computation failed
};

using RootFamily = std::function<RootSet(double)>;

/// `steps` equally spaced values from lo to hi inclusive (steps >= 1).
std::vector<double> linspace(double lo, double hi, int steps);

std::vector<SweepPoint> sweep(const RootFamily& family, const std::vector<double>& params,
                              const CritLenConfig& cfg, bool design = false);
std::vector<SweepPoint> sweep_serial(const RootFamily& family, const std::vector<double>& params,
                                     const CritLenConfig& cfg, bool design = false);

struct RegionSpec {
  SpliceTemplate splice;
  double x_lo = 0.05, x_hi = 7.0;
  double y_lo = 0.05, y_hi = 5.0;
  int grid = 50;
  TestConfig raster_test;                        // verdicts of the raster
  TestConfig search_test = search_test_config();  // boundary bisection
  double tol = 1e-9;                             // boundary bracket width
};

struct RegionCell {
  double x = 0.0, y = 0.0;
  Verdict verdict = Verdict::Inconclusive;
  bool admissible = true;  // every section EC on its own interval
  int det_index = -1;      // vanishing Step-0 determinant (i), if that is the failure
};

struct BoundaryPoint {
  enum class Status { Interior, Ceiling, Floor };
  double x = 0.0;
  double y = 0.0;       // midpoint of the final bracket
  double y_pass = 0.0;  // EC below
  double y_fail = 0.0;
  Status status = Status::Interior;
  int det_index = -1;   // Step-0 determinant closest to zero on the fail side
  bool cusp = false;    // det_index differs from the previous interior point
};

const char* to_string(BoundaryPoint::Status s);

/// Verdict of the splice at (x, y).
RegionCell region_cell(const RegionSpec& spec, double x, double y, const TestConfig& cfg);

std::vector<RegionCell> region_raster(const RegionSpec& spec);
std::vector<RegionCell> region_raster_serial(const RegionSpec& spec);

/// Bisection in y for one column, assuming the EC region lies below the
/// boundary.
BoundaryPoint boundary_at(const RegionSpec& spec, double x);

/// One boundary point per raster column, with cusp flags.
std::vector<BoundaryPoint> region_boundary(const RegionSpec& spec);
std::vector<BoundaryPoint> region_boundary_serial(const RegionSpec& spec);

}  // namespace critlen
