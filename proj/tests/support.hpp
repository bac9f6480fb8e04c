#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "critlen/expfam.hpp"
#include "critlen/space.hpp"

namespace critlen::test {

inline constexpr double kPi = std::numbers::pi;

inline RootSet roots(std::vector<Root> r) { return RootSet{std::move(r)}; }

/// 1, x, ..., x^{n-2}, cos(bx), sin(bx)
inline RootSet cyclo(int n, double b = 1.0) {
  RootSet r;
  if (n > 1) r.entries.push_back({0.0, 0.0, n - 1});
  r.entries.push_back({0.0, b, 1});
  return r;
}

inline PiecewiseSpace uniform(const RootSet& r, double a, double b, int pieces = 1) {
  std::vector<double> knots;
  for (int j = 1; j < pieces; ++j) knots.push_back(a + (b - a) * j / pieces);
  return make_uniform(r, a, knots, b);
}

inline std::mt19937_64& rng() {
  static std::mt19937_64 gen(20240611);
  return gen;
}

inline double uniform_real(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng());
}

}  // namespace critlen::test
