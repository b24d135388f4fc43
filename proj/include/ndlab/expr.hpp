#pragma once

// Coefficient expressions in x, y.
//
// Grammar (whitespace ignored, column numbers are 1-based):
//
//   expr  := term (('+'|'-') term)*
//   term  := unary (('*'|'/') unary)*
//   unary := ('+'|'-') unary | power
//   power := atom ('^' ['+'|'-'] integer)?
//   atom  := number | 'x' | 'y' | 'pi' | func '(' args ')' | '(' expr ')'
//   func  := sin | cos | exp | abs (one argument) | min | max (two arguments)

#include <memory>
#include <string>
#include <string_view>

namespace ndlab {

/// Value with first and second partial derivatives in (x, y). Evaluating an
/// expression over Jets differentiates it exactly (forward mode).
struct Jet {
  double v = 0.0;
  double dx = 0.0;
  double dy = 0.0;
  double dxx = 0.0;
  double dxy = 0.0;
  double dyy = 0.0;

  static Jet constant(double c) { return Jet{c}; }
  static Jet var_x(double x) { return Jet{x, 1.0}; }
  static Jet var_y(double y) { return Jet{y, 0.0, 1.0}; }
};

Jet operator+(const Jet& a, const Jet& b);
Jet operator-(const Jet& a, const Jet& b);
Jet operator-(const Jet& a);
Jet operator*(const Jet& a, const Jet& b);
Jet operator/(const Jet& a, const Jet& b);

class CoeffExpr {
 public:
  struct Node;

  /// The constant 0.
  CoeffExpr();

  /// Parses `src`; throws ParseError (SyntaxError / UnknownIdentifier).
  static CoeffExpr parse(std::string_view src);
  static CoeffExpr constant(double value);

  double operator()(double x, double y) const;
  Jet jet(double x, double y) const;

  /// Fully parenthesized source text; parse(to_string()) rebuilds the same tree.
  std::string to_string() const;

  bool depends_on_x() const;
  bool depends_on_y() const;
  bool is_constant() const { return !depends_on_x() && !depends_on_y(); }
  /// False when abs, min or max occur (possible kinks).
  bool smooth() const;

  /// Structural equality of the trees.
  friend bool operator==(const CoeffExpr& a, const CoeffExpr& b);

 private:
  explicit CoeffExpr(std::shared_ptr<const Node> root) : root_(std::move(root)) {}

  std::shared_ptr<const Node> root_;
};

inline CoeffExpr parse_coeff(std::string_view src) { return CoeffExpr::parse(src); }

}  // namespace ndlab
