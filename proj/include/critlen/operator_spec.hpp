#pragma once

// Textual descriptions of operators, templates with a free parameter b, and
// splice templates for region scans.
//
// Accepted operator forms:
//   trig<n>                      x^{n-1} (x^2 + 1): 1, x, ..., x^{n-2}, cos, sin
//   hyp<n>                       x^{n-1} (x^2 - 1): same with cosh, sinh
//   re[,im]:mult[xREP] ...       root list, e.g. "0:1x3 0,1:1"
//   {"coeffs": [a_0, ..., a_n]}  monic polynomial, leading coefficient implied
//   {"roots": [{"re":0,"im":1,"mult":1}, ...]}
//   path to a file holding one of the JSON forms

#include <string>
#include <vector>

#include "critlen/space.hpp"

namespace critlen {

/// Arithmetic expression in the symbol b: numbers, b, pi, + - * / ^,
/// parentheses, unary minus, sqrt(), exp(), sin(), cos().
class Expr {
 public:
  explicit Expr(std::string text);
  double eval(double b) const;
  bool uses_b() const { return uses_b_; }
  const std::string& text() const { return text_; }

 private:
  std::string text_;
  bool uses_b_ = false;
};

/// Operator whose roots or coefficients may depend on b.
class OperatorTemplate {
 public:
  static OperatorTemplate parse(const std::string& text);

  RootSet roots(double b = 0.0) const;
  bool has_parameter() const;
  std::string describe() const;

 private:
  struct RootExpr {
    Expr re{"0"};
    Expr im{"0"};
    int mult = 1;
  };
  std::vector<RootExpr> roots_;
  std::vector<Expr> coeffs_;
  bool by_roots_ = true;
  std::string label_;
};

/// Parses a fixed operator (no free symbol).
RootSet parse_operator(const std::string& text);

/// Roots of trig<n> / hyp<n>.
RootSet trig_roots(int n);
RootSet hyp_roots(int n);

/// Merges entries closer than tol (relative) into one root of summed
/// multiplicity.
RootSet merge_close_roots(const RootSet& r, double tol = 1e-12);

/// "kind:VAR ..." where kind is an operator shorthand name without its
/// dimension (trig, hyp) or any operator form, and VAR names the section
/// length.  `n` fixes the dimension of the shorthand kinds.
struct SpliceTemplate {
  struct Piece {
    RootSet roots;
    int var = 0;
  };
  std::vector<Piece> pieces;
  std::vector<std::string> vars;

  static SpliceTemplate parse(const std::vector<std::string>& tokens, int n);
  std::vector<SectionSpec> sections(double x, double y) const;
};

/// Reads the whole file, or returns the text itself if no such file exists.
std::string read_text_or_file(const std::string& text);

}  // namespace critlen
