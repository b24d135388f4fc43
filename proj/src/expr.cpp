#include "ndlab/expr.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <vector>

#include "ndlab/error.hpp"

namespace ndlab {

// ---------------------------------------------------------------- Jet algebra

namespace {

// Chain rule for a scalar function phi applied to g.
Jet compose(const Jet& g, double phi, double dphi, double ddphi) {
  Jet r;
  r.v = phi;
  r.dx = dphi * g.dx;
  r.dy = dphi * g.dy;
  r.dxx = ddphi * g.dx * g.dx + dphi * g.dxx;
  r.dxy = ddphi * g.dx * g.dy + dphi * g.dxy;
  r.dyy = ddphi * g.dy * g.dy + dphi * g.dyy;
  return r;
}

}  // namespace

Jet operator+(const Jet& a, const Jet& b) {
  return {a.v + b.v, a.dx + b.dx, a.dy + b.dy, a.dxx + b.dxx, a.dxy + b.dxy, a.dyy + b.dyy};
}

Jet operator-(const Jet& a, const Jet& b) {
  return {a.v - b.v, a.dx - b.dx, a.dy - b.dy, a.dxx - b.dxx, a.dxy - b.dxy, a.dyy - b.dyy};
}

Jet operator-(const Jet& a) { return {-a.v, -a.dx, -a.dy, -a.dxx, -a.dxy, -a.dyy}; }

Jet operator*(const Jet& a, const Jet& b) {
  Jet r;
  r.v = a.v * b.v;
  r.dx = a.dx * b.v + a.v * b.dx;
  r.dy = a.dy * b.v + a.v * b.dy;
  r.dxx = a.dxx * b.v + 2.0 * a.dx * b.dx + a.v * b.dxx;
  r.dxy = a.dxy * b.v + a.dx * b.dy + a.dy * b.dx + a.v * b.dxy;
  r.dyy = a.dyy * b.v + 2.0 * a.dy * b.dy + a.v * b.dyy;
  return r;
}

Jet operator/(const Jet& a, const Jet& b) {
  const double inv = 1.0 / b.v;
  return a * compose(b, inv, -inv * inv, 2.0 * inv * inv * inv);
}

namespace {

double value_of(double v) { return v; }
double value_of(const Jet& j) { return j.v; }

double fn_sin(double v) { return std::sin(v); }
double fn_cos(double v) { return std::cos(v); }
double fn_exp(double v) { return std::exp(v); }
double fn_abs(double v) { return std::abs(v); }
Jet fn_sin(const Jet& g) { return compose(g, std::sin(g.v), std::cos(g.v), -std::sin(g.v)); }
Jet fn_cos(const Jet& g) { return compose(g, std::cos(g.v), -std::sin(g.v), -std::cos(g.v)); }
Jet fn_exp(const Jet& g) {
  const double e = std::exp(g.v);
  return compose(g, e, e, e);
}
Jet fn_abs(const Jet& g) {
  const double s = g.v > 0.0 ? 1.0 : (g.v < 0.0 ? -1.0 : 0.0);
  return compose(g, std::abs(g.v), s, 0.0);
}

double int_pow(double base, int n) {
  double result = 1.0;
  double b = n < 0 ? 1.0 / base : base;
  for (unsigned e = static_cast<unsigned>(n < 0 ? -n : n); e; e >>= 1) {
    if (e & 1U) result *= b;
    b *= b;
  }
  return result;
}

Jet fn_pow(const Jet& g, int n) {
  if (n == 0) return Jet::constant(1.0);
  return compose(g, int_pow(g.v, n), n * int_pow(g.v, n - 1),
                 static_cast<double>(n) * (n - 1) * int_pow(g.v, n - 2));
}
double fn_pow(double g, int n) { return int_pow(g, n); }

}  // namespace

// ---------------------------------------------------------------------- AST

enum class NodeKind { Number, VarX, VarY, Add, Sub, Mul, Div, Neg, Pow, Sin, Cos, Exp, Abs, Min, Max };

struct CoeffExpr::Node {
  NodeKind kind = NodeKind::Number;
  double value = 0.0;
  int exponent = 0;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

namespace {

using NodePtr = std::shared_ptr<const CoeffExpr::Node>;

NodePtr make_leaf(NodeKind kind, double value = 0.0) {
  auto n = std::make_shared<CoeffExpr::Node>();
  n->kind = kind;
  n->value = value;
  return n;
}

NodePtr make_node(NodeKind kind, NodePtr lhs, NodePtr rhs = nullptr, int exponent = 0) {
  auto n = std::make_shared<CoeffExpr::Node>();
  n->kind = kind;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  n->exponent = exponent;
  return n;
}

template <class T>
T eval(const CoeffExpr::Node& n, const T& x, const T& y) {
  switch (n.kind) {
    case NodeKind::Number: return T(n.value);
    case NodeKind::VarX: return x;
    case NodeKind::VarY: return y;
    case NodeKind::Add: return eval(*n.lhs, x, y) + eval(*n.rhs, x, y);
    case NodeKind::Sub: return eval(*n.lhs, x, y) - eval(*n.rhs, x, y);
    case NodeKind::Mul: return eval(*n.lhs, x, y) * eval(*n.rhs, x, y);
    case NodeKind::Div: return eval(*n.lhs, x, y) / eval(*n.rhs, x, y);
    case NodeKind::Neg: return -eval(*n.lhs, x, y);
    case NodeKind::Pow: return fn_pow(eval(*n.lhs, x, y), n.exponent);
    case NodeKind::Sin: return fn_sin(eval(*n.lhs, x, y));
    case NodeKind::Cos: return fn_cos(eval(*n.lhs, x, y));
    case NodeKind::Exp: return fn_exp(eval(*n.lhs, x, y));
    case NodeKind::Abs: return fn_abs(eval(*n.lhs, x, y));
    case NodeKind::Min: {
      T a = eval(*n.lhs, x, y);
      T b = eval(*n.rhs, x, y);
      return value_of(b) < value_of(a) ? b : a;
    }
    case NodeKind::Max: {
      T a = eval(*n.lhs, x, y);
      T b = eval(*n.rhs, x, y);
      return value_of(b) > value_of(a) ? b : a;
    }
  }
  return T(0.0);
}

bool depends_on(const CoeffExpr::Node& n, NodeKind var) {
  if (n.kind == var) return true;
  return (n.lhs && depends_on(*n.lhs, var)) || (n.rhs && depends_on(*n.rhs, var));
}

bool has_kink(const CoeffExpr::Node& n) {
  if (n.kind == NodeKind::Abs || n.kind == NodeKind::Min || n.kind == NodeKind::Max) return true;
  return (n.lhs && has_kink(*n.lhs)) || (n.rhs && has_kink(*n.rhs));
}

bool same_tree(const CoeffExpr::Node& a, const CoeffExpr::Node& b) {
  if (a.kind != b.kind || a.exponent != b.exponent) return false;
  if (a.kind == NodeKind::Number && a.value != b.value) return false;
  if (static_cast<bool>(a.lhs) != static_cast<bool>(b.lhs)) return false;
  if (static_cast<bool>(a.rhs) != static_cast<bool>(b.rhs)) return false;
  return (!a.lhs || same_tree(*a.lhs, *b.lhs)) && (!a.rhs || same_tree(*a.rhs, *b.rhs));
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void print(const CoeffExpr::Node& n, std::string& out) {
  auto binary = [&](const char* op) {
    out += '(';
    print(*n.lhs, out);
    out += op;
    print(*n.rhs, out);
    out += ')';
  };
  auto call = [&](const char* name) {
    out += name;
    out += '(';
    print(*n.lhs, out);
    if (n.rhs) {
      out += ", ";
      print(*n.rhs, out);
    }
    out += ')';
  };
  switch (n.kind) {
    case NodeKind::Number: out += format_number(n.value); break;
    case NodeKind::VarX: out += 'x'; break;
    case NodeKind::VarY: out += 'y'; break;
    case NodeKind::Add: binary(" + "); break;
    case NodeKind::Sub: binary(" - "); break;
    case NodeKind::Mul: binary(" * "); break;
    case NodeKind::Div: binary(" / "); break;
    case NodeKind::Neg:
      out += "(-";
      print(*n.lhs, out);
      out += ')';
      break;
    case NodeKind::Pow:
      out += '(';
      print(*n.lhs, out);
      out += '^';
      out += std::to_string(n.exponent);
      out += ')';
      break;
    case NodeKind::Sin: call("sin"); break;
    case NodeKind::Cos: call("cos"); break;
    case NodeKind::Exp: call("exp"); break;
    case NodeKind::Abs: call("abs"); break;
    case NodeKind::Min: call("min"); break;
    case NodeKind::Max: call("max"); break;
  }
}

// ------------------------------------------------------------------- parser

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  NodePtr parse() {
    skip_ws();
    if (at_end()) fail(ErrorCode::SyntaxError, "empty expression");
    NodePtr e = expr();
    skip_ws();
    if (!at_end()) fail(ErrorCode::SyntaxError, std::string("unexpected '") + src_[pos_] + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(ErrorCode code, const std::string& msg) const {
    throw ParseError(code, static_cast<int>(pos_) + 1, msg);
  }

  bool at_end() const { return pos_ >= src_.size(); }

  void skip_ws() {
    while (!at_end() && (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' || src_[pos_] == '\r'))
      ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (!at_end() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (at_end()) fail(ErrorCode::SyntaxError, std::string("expected '") + c + "' before end of input");
      fail(ErrorCode::SyntaxError, std::string("expected '") + c + "'");
    }
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make_node(NodeKind::Add, lhs, term());
      } else if (accept('-')) {
        lhs = make_node(NodeKind::Sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = make_node(NodeKind::Mul, lhs, unary());
      } else if (accept('/')) {
        lhs = make_node(NodeKind::Div, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) return make_node(NodeKind::Neg, unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = atom();
    if (!accept('^')) return base;
    skip_ws();
    bool negative = false;
    if (!at_end() && (src_[pos_] == '-' || src_[pos_] == '+')) {
      negative = src_[pos_] == '-';
      ++pos_;
      skip_ws();
    }
    const std::size_t start = pos_;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    if (start == pos_) fail(ErrorCode::SyntaxError, "exponent must be an integer literal");
    if (!at_end() && (src_[pos_] == '.' || src_[pos_] == 'e' || src_[pos_] == 'E')) {
      pos_ = start;
      fail(ErrorCode::SyntaxError, "exponent must be an integer literal");
    }
    int n = 0;
    auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, n);
    if (ec != std::errc() || n > 1024) {
      pos_ = start;
      fail(ErrorCode::SyntaxError, "exponent out of range");
    }
    (void)ptr;
    return make_node(NodeKind::Pow, base, nullptr, negative ? -n : n);
  }

  NodePtr atom() {
    skip_ws();
    if (at_end()) fail(ErrorCode::SyntaxError, "unexpected end of input");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = expr();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail(ErrorCode::SyntaxError, std::string("unexpected '") + c + "'");
  }

  NodePtr number() {
    const std::size_t start = pos_;
    while (!at_end() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) ++pos_;
    if (!at_end() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (!at_end() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (at_end() || !std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        pos_ = save;
      } else {
        while (!at_end() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      }
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, v);
    if (ec != std::errc() || ptr != src_.data() + pos_) {
      pos_ = start;
      fail(ErrorCode::SyntaxError, "malformed number");
    }
    return make_leaf(NodeKind::Number, v);
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
    const std::string_view name = src_.substr(start, pos_ - start);
    if (name == "x") return make_leaf(NodeKind::VarX);
    if (name == "y") return make_leaf(NodeKind::VarY);
    if (name == "pi") return make_leaf(NodeKind::Number, std::numbers::pi);

    struct Fn {
      std::string_view name;
      NodeKind kind;
      int arity;
    };
    static constexpr Fn kFunctions[] = {
        {"sin", NodeKind::Sin, 1}, {"cos", NodeKind::Cos, 1}, {"exp", NodeKind::Exp, 1},
        {"abs", NodeKind::Abs, 1}, {"min", NodeKind::Min, 2}, {"max", NodeKind::Max, 2},
    };
    for (const Fn& fn : kFunctions) {
      if (fn.name != name) continue;
      skip_ws();
      if (at_end() || src_[pos_] != '(') fail(ErrorCode::SyntaxError, "expected '(' after " + std::string(name));
      ++pos_;
      NodePtr first = expr();
      NodePtr second;
      if (fn.arity == 2) {
        expect(',');
        second = expr();
      } else if (accept(',')) {
        --pos_;
        fail(ErrorCode::SyntaxError, std::string(name) + " takes one argument");
      }
      expect(')');
      return make_node(fn.kind, first, second);
    }
    pos_ = start;
    fail(ErrorCode::UnknownIdentifier, "unknown identifier '" + std::string(name) + "'");
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

}  // namespace

// ----------------------------------------------------------------- CoeffExpr

CoeffExpr::CoeffExpr() : root_(make_leaf(NodeKind::Number, 0.0)) {}

CoeffExpr CoeffExpr::parse(std::string_view src) { return CoeffExpr(Parser(src).parse()); }

CoeffExpr CoeffExpr::constant(double value) {
  if (std::signbit(value)) return CoeffExpr(make_node(NodeKind::Neg, make_leaf(NodeKind::Number, -value)));
  return CoeffExpr(make_leaf(NodeKind::Number, value));
}

double CoeffExpr::operator()(double x, double y) const { return eval<double>(*root_, x, y); }

Jet CoeffExpr::jet(double x, double y) const { return eval<Jet>(*root_, Jet::var_x(x), Jet::var_y(y)); }

std::string CoeffExpr::to_string() const {
  std::string out;
  print(*root_, out);
  return out;
}

bool CoeffExpr::depends_on_x() const { return depends_on(*root_, NodeKind::VarX); }
bool CoeffExpr::depends_on_y() const { return depends_on(*root_, NodeKind::VarY); }
bool CoeffExpr::smooth() const { return !has_kink(*root_); }

bool operator==(const CoeffExpr& a, const CoeffExpr& b) { return same_tree(*a.root_, *b.root_); }

}  // namespace ndlab
