#include "critlen/ectest.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "critlen/error.hpp"

namespace critlen {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::EC: return "EC";
    case Verdict::NotEC: return "NotEC";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

PositivityVerdict positivity_verdict(const GammaTensor& g, double tol) {
  PositivityVerdict out;
  out.margin = std::numeric_limits<double>::infinity();
  std::optional<PositivityVerdict> first_deadband;
  for (int i = 0; i < g.size; ++i) {
    for (int k = 0; k < g.sections; ++k) {
      double scale = 0.0;
      for (int r = 0; r < g.size; ++r) scale = std::max(scale, std::abs(g(i, k, r)));
      for (int r = 0; r < g.size; ++r) {
        if (g.is_pattern_zero(i, k, r)) continue;
        const double s = scale > 0.0 ? g(i, k, r) / scale : 0.0;
        const bool finite = std::isfinite(s);
        out.margin = std::min(out.margin, finite ? s : -std::numeric_limits<double>::infinity());
        if (!finite || s < 0.1 * tol) {
          if (out.kind != PositivityVerdict::Kind::Fail) {
            out.kind = PositivityVerdict::Kind::Fail;
            out.i = i, out.k = k, out.r = r;
          }
        } else if (s <= 10.0 * tol && !first_deadband) {
          PositivityVerdict d;
          d.kind = PositivityVerdict::Kind::Deadband;
          d.i = i, d.k = k, d.r = r;
          first_deadband = d;
        }
      }
    }
  }
  if (out.kind == PositivityVerdict::Kind::Pass && first_deadband) {
    const double margin = out.margin;
    out = *first_deadband;
    out.margin = margin;
  }
  return out;
}

GammaTensor gamma_step(const GammaTensor& g) {
  if (g.size < 2) throw Error(ErrorKind::InvalidInput, "no level below dimension one");
  const int top = g.size - 1;  // n - p
  GammaTensor out(g.level + 1, top, g.sections);
  // Sums run in increasing j so that tails and totals share their last terms
  // bit for bit; pattern zeros then come out exactly zero.
  auto partial = [&](int k, int from, int r) {
    double s = 0.0;
    for (int j = from; j <= top; ++j) s += g(j, k, r);
    return s;
  };
  for (int k = 0; k < g.sections; ++k) {
    std::vector<double> total(g.size);
    for (int r = 0; r <= top; ++r) {
      total[r] = partial(k, 0, r);
      if (!(total[r] > 0.0) || !std::isfinite(total[r]))
        throw Error(ErrorKind::ZeroDenominator,
                    fmt::format("column sum {} on section {} at level {} is {:.3e}", r, k,
                                g.level, total[r]));
    }
    for (int i = 0; i < top; ++i)
      for (int r = 0; r < top; ++r)
        out(i, k, r) = partial(k, i + 1, r + 1) / total[r + 1] - partial(k, i + 1, r) / total[r];
  }
  return out;
}

namespace {

Verdict fold(const PositivityVerdict& v) {
  switch (v.kind) {
    case PositivityVerdict::Kind::Pass: return Verdict::EC;
    case PositivityVerdict::Kind::Fail: return Verdict::NotEC;
    case PositivityVerdict::Kind::Deadband: return Verdict::Inconclusive;
  }
  return Verdict::Inconclusive;
}

ECTestReport run_test(const PiecewiseSpace& sp, const TestConfig& cfg) {
  ECTestReport rep;
  const int n = sp.order();
  if (n == 0) {
    rep.verdict = Verdict::EC;
    rep.note = "one-dimensional space";
    return rep;
  }

  rep.step0 = step0_determinants(sp);
  auto global = global_bernstein_like(sp, cfg.tol_det);
  if (auto* none = std::get_if<NoBasisEvidence>(&global)) {
    rep.verdict = Verdict::NotEC;
    TestFailure f;
    f.stage = TestFailure::Stage::Step0;
    f.det_i = none->i;
    f.det_j = none->j;
    f.value = none->det;
    rep.failure = f;
    return rep;
  }

  std::vector<BernsteinLikeBasis> locals;
  for (int k = 0; k < sp.num_sections(); ++k) {
    try {
      locals.push_back(local_bernstein_like(sp.section(k), false, cfg.tol_det, cfg.tol_zero));
    } catch (const Error& e) {
      rep.verdict = Verdict::Inconclusive;
      TestFailure f;
      f.stage = TestFailure::Stage::Section;
      f.k = k;
      rep.failure = f;
      rep.note = fmt::format("section {} is not EC on its own interval ({})", k, e.what());
      return rep;
    }
  }

  GammaTensor g;
  try {
    g = level0_expansions(sp, std::get<BernsteinLikeBasis>(global), locals);
  } catch (const Error& e) {
    rep.verdict = Verdict::Inconclusive;
    rep.note = e.what();
    return rep;
  }
  // Pattern entries vanish in exact arithmetic; record how far they are from
  // it and clear them so the recursion keeps them exactly zero.
  for (int i = 0; i < g.size; ++i)
    for (int k = 0; k < g.sections; ++k) {
      double scale = 0.0;
      for (int r = 0; r < g.size; ++r) scale = std::max(scale, std::abs(g(i, k, r)));
      for (int r = 0; r < g.size; ++r)
        if (g.is_pattern_zero(i, k, r)) {
          if (scale > 0.0)
            rep.pattern_residual = std::max(rep.pattern_residual, std::abs(g(i, k, r)) / scale);
          g(i, k, r) = 0.0;
        }
    }

  if (cfg.keep_levels) {
    rep.global = std::get<BernsteinLikeBasis>(global);
    rep.locals = locals;
  }

  for (int level = 0; level <= n - 1; ++level) {
    if (level > 0) {
      try {
        g = gamma_step(g);
      } catch (const Error& e) {
        rep.verdict = Verdict::Inconclusive;
        rep.note = e.what();
        return rep;
      }
    }
    const PositivityVerdict pv = positivity_verdict(g, cfg.tol_zero);
    rep.margins.push_back(pv.margin);
    if (cfg.keep_levels) rep.levels.push_back(g);
    const Verdict v = fold(pv);
    if (v != Verdict::EC) {
      rep.verdict = v;
      TestFailure f;
      f.stage = TestFailure::Stage::Level;
      f.level = level;
      f.i = pv.i, f.k = pv.k, f.r = pv.r;
      f.value = g(pv.i, pv.k, pv.r);
      rep.failure = f;
      return rep;
    }
  }
  rep.verdict = Verdict::EC;
  return rep;
}

}  // namespace

ECTestReport ec_test(const PiecewiseSpace& sp, const TestConfig& cfg) {
  if (cfg.subdivide) {
    constexpr double kSafety = 0.9;
    std::vector<int> pieces;
    bool cut = false;
    for (const Section& s : sp.sections()) {
      const double limit = kSafety * safe_section_length(s.fam);
      const int m = s.length() < limit ? 1 : static_cast<int>(std::ceil(s.length() / limit));
      cut = cut || m > 1;
      pieces.push_back(m);
    }
    if (cut) {
      PiecewiseSpace fine = subdivide(sp, pieces);
      ECTestReport rep = run_test(fine, cfg);
      const std::string note = fmt::format("tested with {} sections", fine.num_sections());
      rep.note = rep.note.empty() ? note : note + "; " + rep.note;
      rep.tested = std::move(fine);
      return rep;
    }
  }
  return run_test(sp, cfg);
}

}  // namespace critlen
