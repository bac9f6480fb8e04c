#include "cli.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "critlen/critlen.hpp"
#include "critlen/design.hpp"
#include "critlen/error.hpp"
#include "critlen/operator_spec.hpp"
#include "critlen/oracles.hpp"
#include "critlen/sweep.hpp"

namespace critlen::cli {

using nlohmann::json;

namespace {

constexpr const char* kOperatorHelp =
    "Operators: trig<n> = x^(n-1)(x^2+1), hyp<n> = x^(n-1)(x^2-1), a root list\n"
    "'re[,im]:mult[xREP] ...' (a complex entry stands for the conjugate pair,\n"
    "e.g. '0:1x3 0,1:1' = 1, x, x^2, cos, sin), JSON {\"coeffs\": [a_0, ..., a_n]}\n"
    "for the monic x^(n+1) + a_n x^n + ... + a_0, JSON {\"roots\": [{\"re\", \"im\",\n"
    "\"mult\"}, ...]}, or a file holding one of the JSON forms.";

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// 12 significant digits everywhere.
std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{:.12g}", x);
}

json jnum(double x) {
  if (!std::isfinite(x)) return nullptr;
  return std::strtod(num(x).c_str(), nullptr);
}

json jnums(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(jnum(x));
  return a;
}

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::SingularTransfer:
    case ErrorKind::SingularExpansion:
    case ErrorKind::ZeroDenominator:
    case ErrorKind::LevelsMissing:
    case ErrorKind::QuadratureFailure:
    case ErrorKind::Overflow:
      return kExitInternal;
    default:
      return kExitData;
  }
}

enum class Format { Csv, Json, Svg };

struct Common {
  std::string format = "json";
  int jobs = 0;
  long seed = 0;
};

Format format_of(const Common& c, std::initializer_list<Format> allowed) {
  const Format f = c.format == "csv" ? Format::Csv : c.format == "svg" ? Format::Svg : Format::Json;
  if (std::find(allowed.begin(), allowed.end(), f) == allowed.end())
    throw UsageError(fmt::format("--format {} is not available for this command", c.format));
  return f;
}

void add_common(CLI::App* sub, Common& c, const std::string& default_format) {
  c.format = default_format;
  sub->add_option("--format", c.format, "Output format")
      ->check(CLI::IsMember({"csv", "json", "svg"}))
      ->capture_default_str();
  sub->add_option("--jobs", c.jobs, "Worker threads (0: OpenMP default)")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--seed", c.seed, "Seed recorded with the run");
}

struct OperatorArgs {
  std::string op;
  std::vector<double> coeffs;
  std::vector<std::string> roots;
};

void add_operator(CLI::App* sub, OperatorArgs& a) {
  auto* g = sub->add_option_group("operator", kOperatorHelp);
  g->add_option("--operator", a.op, "Operator text or file");
  g->add_option("--coeffs", a.coeffs, "a_0 .. a_n of the monic polynomial");
  g->add_option("--roots", a.roots, "Root tokens re[,im]:mult[xREP]");
  g->require_option(1);
}

RootSet resolve(const OperatorArgs& a) {
  if (!a.coeffs.empty()) {
    CharPoly p{a.coeffs};
    p.validate();
    return find_roots(p);
  }
  if (!a.roots.empty()) {
    std::string text;
    for (const auto& t : a.roots) text += (text.empty() ? "" : " ") + t;
    return parse_operator(text);
  }
  return parse_operator(a.op);
}

std::string describe(const OperatorArgs& a) {
  if (!a.coeffs.empty()) {
    std::string s = "coeffs";
    for (double c : a.coeffs) s += " " + num(c);
    return s;
  }
  if (!a.roots.empty()) {
    std::string s;
    for (const auto& t : a.roots) s += (s.empty() ? "" : " ") + t;
    return s;
  }
  return a.op;
}

json roots_json(const RootSet& r) {
  json a = json::array();
  for (const Root& e : r.entries)
    a.push_back({{"re", jnum(e.re)}, {"im", jnum(e.im)}, {"mult", e.mult}});
  return a;
}

struct SearchArgs {
  double tol_dicho = 1e-10;
  double ell0_factor = 0.95;
  std::optional<double> tol_test;
  int k_max = 64;
  bool design = false;
};

void add_search(CLI::App* sub, SearchArgs& s) {
  sub->add_option("--tol-dicho", s.tol_dicho, "Dichotomy bracket width")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--ell0-factor", s.ell0_factor, "ell0 = factor * pi / M_L, factor in ]0, 1[")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  sub->add_option("--tol-test", s.tol_test,
                  "Zero / determinant threshold of the test (default 1e-30: sign only)")
      ->check(CLI::PositiveNumber);
  sub->add_option("--k-max", s.k_max, "Largest rough-estimate step")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_flag("--design", s.design, "Critical length for design (of p(x) / x)");
}

CritLenConfig search_config(const SearchArgs& s) {
  if (!(s.ell0_factor > 0.0 && s.ell0_factor < 1.0))
    throw UsageError("--ell0-factor must lie strictly between 0 and 1");
  CritLenConfig cfg;
  cfg.tol_dicho = s.tol_dicho;
  cfg.ell0_factor = s.ell0_factor;
  cfg.k_max = s.k_max;
  if (s.tol_test) {
    cfg.test.tol_zero = *s.tol_test;
    cfg.test.tol_det = *s.tol_test;
  }
  return cfg;
}

json result_json(const CriticalLengthResult& r, bool trace) {
  const bool finite = r.status == CriticalLengthResult::Status::Finite;
  json j = {{"status", finite ? "Finite" : "Infinite"},
            {"value", jnum(r.value)},
            {"bracket", {jnum(r.h_pass), jnum(r.h_fail)}},
            {"mu", r.mu},
            {"ell0", jnum(r.ell0)},
            {"design", r.design}};
  if (trace) {
    json t = json::array();
    for (const Probe& p : r.trace) t.push_back({{"h", jnum(p.h)}, {"verdict", to_string(p.verdict)}});
    j["trace"] = t;
  }
  return j;
}

// critlen ------------------------------------------------------------------

struct CritlenCmd {
  Common common;
  OperatorArgs op;
  SearchArgs search;
  bool trace = false;
};

int run_critlen(const CritlenCmd& c, std::ostream& out) {
  const Format f = format_of(c.common, {Format::Json, Format::Csv});
  const RootSet roots = resolve(c.op);
  const CritLenConfig cfg = search_config(c.search);
  const CriticalLengthResult r =
      c.search.design ? critical_length_for_design(roots, cfg) : critical_length(roots, cfg);
  if (f == Format::Csv) {
    out << "value,h_pass,h_fail,mu,ell0\n";
    out << fmt::format("{},{},{},{},{}\n", num(r.value), num(r.h_pass), num(r.h_fail), r.mu,
                       num(r.ell0));
    return 0;
  }
  json j = result_json(r, c.trace);
  j["operator"] = describe(c.op);
  j["roots"] = roots_json(roots);
  j["seed"] = c.common.seed;
  out << j.dump(2) << "\n";
  return 0;
}

// ectest -------------------------------------------------------------------

struct EctestCmd {
  Common common;
  OperatorArgs op;
  std::string space;
  std::vector<double> interval;
  std::vector<double> knots;
  double tol_test = kDefaultTolZero;
  double tol_det = kDefaultTolDet;
  bool dump_gamma = false;
  bool no_subdivide = false;
};

PiecewiseSpace splice_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(read_text_or_file(text));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidInput, fmt::format("splice description: {}", e.what()));
  }
  if (!j.is_object() || !j.contains("sections") || !j["sections"].is_array())
    throw Error(ErrorKind::InvalidInput, "splice description needs a \"sections\" array");
  std::vector<SectionSpec> specs;
  for (const json& s : j["sections"]) {
    if (!s.contains("operator") || !s.contains("length") || !s["length"].is_number())
      throw Error(ErrorKind::InvalidInput, "each section needs \"operator\" and \"length\"");
    const json& o = s["operator"];
    const RootSet roots = parse_operator(o.is_string() ? o.get<std::string>() : o.dump());
    specs.push_back({roots, s["length"].get<double>()});
  }
  const double start = j.value("start", 0.0);
  return make_spliced(specs, start);
}

json gamma_json(const GammaTensor& g) {
  json levels = json::array();
  for (int i = 0; i < g.size; ++i) {
    json per_k = json::array();
    for (int k = 0; k < g.sections; ++k) {
      std::vector<double> row;
      for (int r = 0; r < g.size; ++r) row.push_back(g(i, k, r));
      per_k.push_back(jnums(row));
    }
    levels.push_back(per_k);
  }
  return {{"level", g.level}, {"gamma", levels}};
}

const char* stage_name(TestFailure::Stage s) {
  switch (s) {
    case TestFailure::Stage::Step0: return "Step0";
    case TestFailure::Stage::Level: return "Level";
    case TestFailure::Stage::Section: return "Section";
  }
  return "?";
}

int run_ectest(const EctestCmd& c, std::ostream& out) {
  const Format f = format_of(c.common, {Format::Json, Format::Csv});
  const bool have_op = !c.op.op.empty() || !c.op.coeffs.empty() || !c.op.roots.empty();
  if (c.space.empty() == !have_op)
    throw UsageError("give either --space or one operator option");
  std::optional<PiecewiseSpace> sp;
  if (!c.space.empty()) {
    if (!c.interval.empty() || !c.knots.empty())
      throw UsageError("--interval and --knots go with an operator, not with --space");
    sp = splice_from_json(c.space);
  } else {
    if (c.interval.size() != 2) throw UsageError("--interval needs a and b");
    sp = make_uniform(resolve(c.op), c.interval[0], c.knots, c.interval[1]);
  }
  TestConfig cfg;
  cfg.tol_zero = c.tol_test;
  cfg.tol_det = c.tol_det;
  cfg.keep_levels = c.dump_gamma;
  cfg.subdivide = !c.no_subdivide;
  const ECTestReport rep = ec_test(*sp, cfg);
  const int code = rep.verdict == Verdict::EC ? 0 : rep.verdict == Verdict::NotEC ? 1 : 2;

  if (f == Format::Csv) {
    out << "verdict,stage,level,i,k,r,det_i,det_j,value\n";
    if (rep.failure) {
      const TestFailure& t = *rep.failure;
      out << fmt::format("{},{},{},{},{},{},{},{},{}\n", to_string(rep.verdict),
                         stage_name(t.stage), t.level, t.i, t.k, t.r, t.det_i, t.det_j,
                         num(t.value));
    } else {
      out << fmt::format("{},,,,,,,,\n", to_string(rep.verdict));
    }
    return code;
  }
  json j = {{"verdict", to_string(rep.verdict)},
            {"interval", {jnum(sp->a()), jnum(sp->b())}},
            {"knots", jnums(sp->knots())},
            {"step0", jnums(rep.step0)},
            {"margins", jnums(rep.margins)},
            {"pattern_residual", jnum(rep.pattern_residual)},
            {"tol_test", jnum(c.tol_test)},
            {"tol_det", jnum(c.tol_det)}};
  if (rep.tested) j["tested_knots"] = jnums(rep.tested->knots());
  if (rep.failure) {
    const TestFailure& t = *rep.failure;
    json w = {{"stage", stage_name(t.stage)}, {"value", jnum(t.value)}};
    if (t.stage == TestFailure::Stage::Step0) {
      w["i"] = t.det_i;
      w["j"] = t.det_j;
    } else if (t.stage == TestFailure::Stage::Level) {
      w["level"] = t.level;
      w["i"] = t.i;
      w["k"] = t.k;
      w["r"] = t.r;
    } else {
      w["k"] = t.k;
    }
    j["failure"] = w;
  }
  if (!rep.note.empty()) j["note"] = rep.note;
  if (!sp->warnings().empty()) j["warnings"] = sp->warnings();
  if (c.dump_gamma) {
    json levels = json::array();
    for (const GammaTensor& g : rep.levels) levels.push_back(gamma_json(g));
    j["levels"] = levels;
  }
  out << j.dump(2) << "\n";
  return code;
}

// sweep --------------------------------------------------------------------

struct SweepCmd {
  Common common;
  std::string templ;
  std::vector<double> range;
  SearchArgs search;
};

int run_sweep(const SweepCmd& c, std::ostream& out, std::ostream& err) {
  const Format f = format_of(c.common, {Format::Csv, Format::Json});
  if (c.range.size() != 3) throw UsageError("--range needs b0 b1 steps");
  const double steps_d = c.range[2];
  if (!(steps_d >= 1.0) || steps_d != std::floor(steps_d))
    throw UsageError("the number of steps must be a positive integer");
  const OperatorTemplate t = OperatorTemplate::parse(c.templ);
  if (!t.has_parameter()) throw UsageError("the template has no free symbol b");
  const CritLenConfig cfg = search_config(c.search);
  const std::vector<double> params = linspace(c.range[0], c.range[1], static_cast<int>(steps_d));
  const std::vector<SweepPoint> pts =
      sweep([&t](double b) { return t.roots(b); }, params, cfg, c.search.design);

  int failures = 0;
  for (const SweepPoint& p : pts)
    if (!p.error.empty()) {
      ++failures;
      err << fmt::format("b = {}: {}\n", num(p.param), p.error);
    }
  if (f == Format::Csv) {
    out << "param,value,mu,ell0\n";
    for (const SweepPoint& p : pts) {
      if (p.error.empty())
        out << fmt::format("{},{},{},{}\n", num(p.param), num(p.result.value), p.result.mu,
                           num(p.result.ell0));
      else
        out << fmt::format("{},nan,,\n", num(p.param));
    }
  } else {
    json rows = json::array();
    for (const SweepPoint& p : pts) {
      json r = {{"param", jnum(p.param)}};
      if (p.error.empty())
        r.update(result_json(p.result, false));
      else
        r["error"] = p.error;
      rows.push_back(r);
    }
    out << json{{"template", t.describe()}, {"design", c.search.design}, {"seed", c.common.seed},
                {"points", rows}}
               .dump(2)
        << "\n";
  }
  return failures == static_cast<int>(pts.size()) ? kExitData : 0;
}

// region -------------------------------------------------------------------

struct RegionCmd {
  Common common;
  std::vector<std::string> splice;
  int n = 1;
  int grid = 50;
  std::vector<double> x_range{0.05, 7.0};
  std::vector<double> y_range{0.05, 5.0};
  double tol = 1e-9;
  double tol_test = kDefaultTolZero;
  std::string boundary_file;
  std::string emit = "raster";
};

std::string cell_verdict(const RegionCell& c) {
  if (c.verdict != Verdict::EC && !c.admissible) return "Inadmissible";
  return to_string(c.verdict);
}

std::string opt_index(int i) { return i < 0 ? "" : std::to_string(i); }

void write_boundary_csv(std::ostream& os, const RegionSpec& spec,
                        const std::vector<BoundaryPoint>& pts) {
  os << fmt::format("{},{},status,failing_det_index,cusp\n", spec.splice.vars[0],
                    spec.splice.vars[1]);
  for (const BoundaryPoint& b : pts)
    os << fmt::format("{},{},{},{},{}\n", num(b.x), num(b.y), to_string(b.status),
                      opt_index(b.det_index), b.cusp ? 1 : 0);
}

std::string region_svg(const RegionSpec& spec, const std::vector<RegionCell>& cells,
                       const std::vector<BoundaryPoint>& pts) {
  constexpr double kSize = 600.0;
  const double cw = kSize / spec.grid;
  auto sx = [&](double x) { return (x - spec.x_lo) / (spec.x_hi - spec.x_lo) * (kSize - cw) + cw / 2; };
  auto sy = [&](double y) {
    return kSize - ((y - spec.y_lo) / (spec.y_hi - spec.y_lo) * (kSize - cw) + cw / 2);
  };
  std::string s = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{0}\" viewBox=\"0 0 {0} {0}\">\n",
      kSize);
  for (const RegionCell& c : cells) {
    const char* color = c.verdict == Verdict::EC ? "#9ecae1"
                        : c.verdict == Verdict::Inconclusive ? "#dddddd"
                        : c.admissible ? "#fdd0a2" : "#bbbbbb";
    s += fmt::format("<rect x=\"{:.3f}\" y=\"{:.3f}\" width=\"{:.3f}\" height=\"{:.3f}\" fill=\"{}\"/>\n",
                     sx(c.x) - cw / 2, sy(c.y) - cw / 2, cw, cw, color);
  }
  s += "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1.5\" points=\"";
  for (const BoundaryPoint& b : pts)
    if (b.status == BoundaryPoint::Status::Interior) s += fmt::format("{:.3f},{:.3f} ", sx(b.x), sy(b.y));
  s += "\"/>\n";
  for (const BoundaryPoint& b : pts)
    if (b.cusp) s += fmt::format("<circle cx=\"{:.3f}\" cy=\"{:.3f}\" r=\"3\" fill=\"red\"/>\n", sx(b.x), sy(b.y));
  s += "</svg>\n";
  return s;
}

int run_region(const RegionCmd& c, std::ostream& out) {
  const Format f = format_of(c.common, {Format::Csv, Format::Json, Format::Svg});
  if (c.x_range.size() != 2 || c.y_range.size() != 2)
    throw UsageError("--x-range and --y-range take two values");
  RegionSpec spec;
  spec.splice = SpliceTemplate::parse(c.splice, c.n);
  if (spec.splice.vars.size() != 2) throw UsageError("a region splice needs two length variables");
  spec.x_lo = c.x_range[0];
  spec.x_hi = c.x_range[1];
  spec.y_lo = c.y_range[0];
  spec.y_hi = c.y_range[1];
  if (!(spec.x_lo > 0.0 && spec.x_lo < spec.x_hi && spec.y_lo > 0.0 && spec.y_lo < spec.y_hi))
    throw UsageError("ranges must be increasing and positive");
  spec.grid = c.grid;
  spec.tol = c.tol;
  spec.raster_test.tol_zero = c.tol_test;

  const bool want_raster = f != Format::Csv || c.emit == "raster";
  std::vector<RegionCell> cells;
  if (want_raster) cells = region_raster(spec);
  const std::vector<BoundaryPoint> pts = region_boundary(spec);
  if (!c.boundary_file.empty()) {
    std::ofstream os(c.boundary_file);
    if (!os) throw Error(ErrorKind::InvalidInput, fmt::format("cannot write {}", c.boundary_file));
    write_boundary_csv(os, spec, pts);
  }
  const std::string& vx = spec.splice.vars[0];
  const std::string& vy = spec.splice.vars[1];
  if (f == Format::Svg) {
    out << region_svg(spec, cells, pts);
  } else if (f == Format::Csv) {
    if (c.emit == "boundary") {
      write_boundary_csv(out, spec, pts);
    } else {
      out << fmt::format("{},{},verdict,failing_det_index\n", vx, vy);
      for (const RegionCell& cell : cells)
        out << fmt::format("{},{},{},{}\n", num(cell.x), num(cell.y), cell_verdict(cell),
                           opt_index(cell.det_index));
    }
  } else {
    json raster = json::array();
    for (const RegionCell& cell : cells)
      raster.push_back({{vx, jnum(cell.x)}, {vy, jnum(cell.y)}, {"verdict", cell_verdict(cell)},
                        {"failing_det_index", cell.det_index}});
    json boundary = json::array();
    for (const BoundaryPoint& b : pts)
      boundary.push_back({{vx, jnum(b.x)},
                          {vy, jnum(b.y)},
                          {"bracket", {jnum(b.y_pass), jnum(b.y_fail)}},
                          {"status", to_string(b.status)},
                          {"failing_det_index", b.det_index},
                          {"cusp", b.cusp}});
    out << json{{"splice", c.splice}, {"n", c.n}, {"seed", c.common.seed},
                {"raster", raster}, {"boundary", boundary}}
               .dump(2)
        << "\n";
  }
  return 0;
}

// curve --------------------------------------------------------------------

struct CurveCmd {
  Common common;
  OperatorArgs op;
  std::vector<double> interval;
  std::vector<double> knots;
  std::string control;
  int samples = 200;
  double tol_test = kDefaultTolZero;
};

std::vector<std::vector<double>> read_control(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorKind::InvalidInput, fmt::format("cannot read {}", path));
  std::vector<std::vector<double>> pts;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    std::vector<double> p;
    std::string tok;
    bool numeric = true;
    while (ls >> tok) {
      char* end = nullptr;
      const double v = std::strtod(tok.c_str(), &end);
      if (end == tok.c_str() || *end != '\0') {
        numeric = false;
        break;
      }
      p.push_back(v);
    }
    if (!numeric) {
      if (pts.empty()) continue;  // header
      throw Error(ErrorKind::InvalidInput, fmt::format("bad control point line '{}'", line));
    }
    if (!p.empty()) pts.push_back(std::move(p));
  }
  if (pts.empty()) throw Error(ErrorKind::InvalidInput, fmt::format("no control points in {}", path));
  return pts;
}

std::string curve_svg(const std::vector<std::vector<double>>& curve,
                      const std::vector<std::vector<double>>& control) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto* set : {&curve, &control})
    for (const auto& p : *set) {
      x0 = std::min(x0, p[0]);
      x1 = std::max(x1, p[0]);
      y0 = std::min(y0, p[1]);
      y1 = std::max(y1, p[1]);
    }
  constexpr double kSize = 600.0, kPad = 20.0;
  const double span = std::max({x1 - x0, y1 - y0, 1e-300});
  auto sx = [&](double x) { return kPad + (x - x0) / span * (kSize - 2 * kPad); };
  auto sy = [&](double y) { return kSize - kPad - (y - y0) / span * (kSize - 2 * kPad); };
  std::string s = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{0}\" viewBox=\"0 0 {0} {0}\">\n",
      kSize);
  s += "<polyline fill=\"none\" stroke=\"gray\" stroke-dasharray=\"4 3\" points=\"";
  for (const auto& p : control) s += fmt::format("{:.3f},{:.3f} ", sx(p[0]), sy(p[1]));
  s += "\"/>\n";
  for (const auto& p : control)
    s += fmt::format("<circle cx=\"{:.3f}\" cy=\"{:.3f}\" r=\"3\" fill=\"gray\"/>\n", sx(p[0]), sy(p[1]));
  s += "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1.5\" points=\"";
  for (const auto& p : curve) s += fmt::format("{:.3f},{:.3f} ", sx(p[0]), sy(p[1]));
  s += "\"/>\n</svg>\n";
  return s;
}

int run_curve(const CurveCmd& c, std::ostream& out) {
  const Format f = format_of(c.common, {Format::Csv, Format::Json, Format::Svg});
  if (c.interval.size() != 2) throw UsageError("--interval needs a and b");
  const PiecewiseSpace sp = make_uniform(resolve(c.op), c.interval[0], c.knots, c.interval[1]);
  const NormalizedBasis nb = bernstein_basis(sp, kDefaultTolDet, c.tol_test);
  const auto control = read_control(c.control);
  const auto curve = eval_curve(nb, control, c.samples);
  const std::size_t d = control.front().size();
  if (f == Format::Svg) {
    if (d < 2) throw Error(ErrorKind::InvalidInput, "SVG output needs planar control points");
    out << curve_svg(curve, control);
  } else if (f == Format::Csv) {
    std::vector<std::string> cols;
    const char* names[] = {"x", "y", "z"};
    for (std::size_t i = 0; i < d; ++i) cols.push_back(d <= 3 ? names[i] : fmt::format("p{}", i));
    out << "t," << fmt::format("{}", fmt::join(cols, ",")) << "\n";
    for (int s = 0; s < c.samples; ++s) {
      const double t = s + 1 == c.samples ? nb.b() : nb.a() + (nb.b() - nb.a()) * s / (c.samples - 1.0);
      out << num(t);
      for (double v : curve[s]) out << "," << num(v);
      out << "\n";
    }
  } else {
    json pts = json::array();
    for (const auto& p : curve) pts.push_back(jnums(p));
    out << json{{"operator", describe(c.op)}, {"alphas", jnums(nb.alphas)}, {"points", pts}}.dump(2)
        << "\n";
  }
  return 0;
}

// oracle -------------------------------------------------------------------

struct OracleCmd {
  Common common;
  std::string which;
  double a = 1.0;
  double b = 0.0;
  double nu = 0.5;
  OperatorArgs op;
  double h_max = 20.0;
  std::optional<int> k;
  bool general = false;
};

int run_oracle(const OracleCmd& c, std::ostream& out) {
  const Format f = format_of(c.common, {Format::Json, Format::Csv});
  OracleValue v;
  if (c.which == "bessel") {
    v = bessel_first_zero(c.nu);
  } else if (c.which == "wronskian") {
    const bool have_op = !c.op.op.empty() || !c.op.coeffs.empty() || !c.op.roots.empty();
    if (!have_op) throw UsageError("the wronskian oracle needs an operator");
    const CharPoly p = CharPoly::from_roots(resolve(c.op));
    const auto r = c.k ? wronskian_scan(p, *c.k, c.h_max)
                       : wronskian_critical_length(p, c.h_max, !c.general);
    if (!r) throw Error(ErrorKind::NoSignChange, fmt::format("no Wronskian zero below {}", num(c.h_max)));
    v = *r;
  } else {
    const auto cf = closed_form_from_string(c.which);
    if (!cf) throw UsageError(fmt::format("unknown oracle '{}'", c.which));
    v = solve_closed_form(*cf, c.a, c.b);
  }
  if (f == Format::Csv) {
    out << "value,lo,hi,method\n"
        << fmt::format("{},{},{},{}\n", num(v.value), num(v.lo), num(v.hi), v.method);
  } else {
    out << json{{"case", c.which}, {"value", jnum(v.value)}, {"bracket", {jnum(v.lo), jnum(v.hi)}},
                {"method", v.method}}
               .dump(2)
        << "\n";
  }
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Critical lengths of kernels of constant-coefficient linear differential "
               "operators, EC-space tests and Bernstein-type design bases."};
  app.require_subcommand(1);
  app.footer(kOperatorHelp);

  CritlenCmd cl;
  auto* s_cl = app.add_subcommand("critlen", "Critical length of an operator kernel (JSON)");
  add_common(s_cl, cl.common, "json");
  add_operator(s_cl, cl.op);
  add_search(s_cl, cl.search);
  s_cl->add_flag("--trace", cl.trace, "Include every probe");

  EctestCmd ec;
  auto* s_ec = app.add_subcommand("ectest", "EC test; exit 0 = EC, 1 = NotEC, 2 = Inconclusive");
  add_common(s_ec, ec.common, "json");
  auto* g = s_ec->add_option_group("operator", kOperatorHelp);
  g->add_option("--operator", ec.op.op, "Operator text or file");
  g->add_option("--coeffs", ec.op.coeffs, "a_0 .. a_n of the monic polynomial");
  g->add_option("--roots", ec.op.roots, "Root tokens re[,im]:mult[xREP]");
  s_ec->add_option("--space", ec.space,
                   "Splice JSON {\"sections\": [{\"operator\": ..., \"length\": L}, ...]} or file");
  s_ec->add_option("--interval", ec.interval, "a b")->expected(2);
  s_ec->add_option("--knots", ec.knots, "Interior knots");
  s_ec->add_option("--tol-test", ec.tol_test, "Zero / positivity threshold")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  s_ec->add_option("--tol-det", ec.tol_det, "Step-0 determinant threshold")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  s_ec->add_flag("--dump-gamma", ec.dump_gamma, "Include the expansion coefficients of every level");
  s_ec->add_flag("--no-subdivide", ec.no_subdivide,
                 "Test the sections as given even when they are too long to be EC alone");

  SweepCmd sw;
  auto* s_sw = app.add_subcommand("sweep", "Critical length over a parameter b (CSV param,value,mu,ell0)");
  add_common(s_sw, sw.common, "csv");
  s_sw->add_option("--template", sw.templ, "Operator with free symbol b, e.g. '0:1x2 0,b:1'")
      ->required();
  s_sw->add_option("--range", sw.range, "b0 b1 steps (steps points, ends included)")
      ->expected(3)
      ->required();
  add_search(s_sw, sw.search);

  RegionCmd rg;
  auto* s_rg = app.add_subcommand(
      "region", "EC region of a two-length splice (CSV T,H,verdict,failing_det_index)");
  add_common(s_rg, rg.common, "csv");
  s_rg->add_option("--splice", rg.splice, "Pieces kind:VAR, e.g. trig:T hyp:H")->required();
  s_rg->add_option("--n", rg.n, "Order n of the trig / hyp shorthands")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  s_rg->add_option("--grid", rg.grid, "Raster points per axis")
      ->check(CLI::Range(2, 4000))
      ->capture_default_str();
  s_rg->add_option("--x-range", rg.x_range, "First variable range")->expected(2);
  s_rg->add_option("--y-range", rg.y_range, "Second variable range")->expected(2);
  s_rg->add_option("--tol", rg.tol, "Boundary bracket width")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  s_rg->add_option("--tol-test", rg.tol_test, "Raster zero / positivity threshold")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  s_rg->add_option("--boundary", rg.boundary_file, "Also write the boundary CSV to this file");
  s_rg->add_option("--emit", rg.emit, "CSV on stdout: raster or boundary")
      ->check(CLI::IsMember({"raster", "boundary"}))
      ->capture_default_str();

  CurveCmd cv;
  auto* s_cv = app.add_subcommand("curve", "Curve from control points in the normalized Bernstein basis");
  add_common(s_cv, cv.common, "csv");
  add_operator(s_cv, cv.op);
  s_cv->add_option("--interval", cv.interval, "a b")->expected(2)->required();
  s_cv->add_option("--knots", cv.knots, "Interior knots");
  s_cv->add_option("--control", cv.control, "CSV of n + 1 control points")->required();
  s_cv->add_option("--samples", cv.samples, "Curve samples")
      ->check(CLI::Range(2, 1000000))
      ->capture_default_str();
  s_cv->add_option("--tol-test", cv.tol_test, "Positivity threshold")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  OracleCmd orc;
  auto* s_or = app.add_subcommand("oracle", "Independent reference values");
  add_common(s_or, orc.common, "json");
  s_or->add_option("--case", orc.which,
                   "bessel, wronskian, ZH3, DTRIG_LOW, DTRIG_HIGH, ZS9 or HT1")
      ->required();
  s_or->add_option("--a", orc.a, "First parameter (T for HT1)")->capture_default_str();
  s_or->add_option("--b", orc.b, "Second parameter")->capture_default_str();
  s_or->add_option("--nu", orc.nu, "Bessel order")->capture_default_str();
  auto* og = s_or->add_option_group("operator", "Operator for the wronskian case");
  og->add_option("--operator", orc.op.op, "Operator text or file");
  og->add_option("--coeffs", orc.op.coeffs, "a_0 .. a_n of the monic polynomial");
  og->add_option("--roots", orc.op.roots, "Root tokens");
  og->require_option(0, 1);
  s_or->add_option("--h-max", orc.h_max, "Scan limit")->capture_default_str();
  s_or->add_option("--k", orc.k, "Single Wronskian order");
  s_or->add_flag("--general", orc.general, "Scan k = 0..n-1 instead of the symmetric range");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    for (auto* sub : app.get_subcommands())
      if (sub->parsed()) err << "see: critlen " << sub->get_name() << " --help\n";
    return kExitUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  const Common* common = sub == s_cl ? &cl.common
                         : sub == s_ec ? &ec.common
                         : sub == s_sw ? &sw.common
                         : sub == s_rg ? &rg.common
                         : sub == s_cv ? &cv.common
                                       : &orc.common;
  if (common->jobs > 0) omp_set_num_threads(common->jobs);

  try {
    if (sub == s_cl) return run_critlen(cl, out);
    if (sub == s_ec) return run_ectest(ec, out);
    if (sub == s_sw) return run_sweep(sw, out, err);
    if (sub == s_rg) return run_region(rg, out);
    if (sub == s_cv) return run_curve(cv, out);
    return run_oracle(orc, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"critlen"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace critlen::cli
