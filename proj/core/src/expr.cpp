#include "hoqtt/expr.hpp"

#include <cmath>
#include <cstdlib>

#include "hoqtt/special_functions.hpp"

namespace hoqtt {

namespace {

struct Parser {
  std::string_view src;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < src.size() && (src[pos] == ' ' || src[pos] == '\t')) ++pos;
  }

  bool eof() {
    skip_ws();
    return pos >= src.size();
  }

  char peek() {
    skip_ws();
    return pos < src.size() ? src[pos] : '\0';
  }

  bool accept(char c) {
    skip_ws();
    if (pos < src.size() && src[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  void expect(char c) {
    skip_ws();
    if (pos >= src.size() || src[pos] != c)
      throw ParseError(std::string("expected '") + c + "'", pos);
    ++pos;
  }

  ExprPtr make(Expr::Kind k, std::size_t at) {
    auto e = std::make_unique<Expr>();
    e->kind = k;
    e->offset = at;
    return e;
  }

  // expr := term { ('+'|'-') term }
  ExprPtr parse_expr() {
    auto lhs = parse_term();
    for (;;) {
      skip_ws();
      std::size_t at = pos;
      if (accept('+')) {
        auto e = make(Expr::Kind::Binary, at);
        e->op = BinaryOp::Add;
        e->lhs = std::move(lhs);
        e->rhs = parse_term();
        lhs = std::move(e);
      } else if (accept('-')) {
        auto e = make(Expr::Kind::Binary, at);
        e->op = BinaryOp::Sub;
        e->lhs = std::move(lhs);
        e->rhs = parse_term();
        lhs = std::move(e);
      } else {
        return lhs;
      }
    }
  }

  // term := unary { ('*'|'/') unary }
  ExprPtr parse_term() {
    auto lhs = parse_unary();
    for (;;) {
      skip_ws();
      std::size_t at = pos;
      if (accept('*')) {
        auto e = make(Expr::Kind::Binary, at);
        e->op = BinaryOp::Mul;
        e->lhs = std::move(lhs);
        e->rhs = parse_unary();
        lhs = std::move(e);
      } else if (accept('/')) {
        auto e = make(Expr::Kind::Binary, at);
        e->op = BinaryOp::Div;
        e->lhs = std::move(lhs);
        e->rhs = parse_unary();
        lhs = std::move(e);
      } else {
        return lhs;
      }
    }
  }

  // unary := '-' unary | power ; binds below '^'
  ExprPtr parse_unary() {
    skip_ws();
    std::size_t at = pos;
    if (accept('-')) {
      auto e = make(Expr::Kind::Unary, at);
      e->fn = UnaryFn::Neg;
      e->lhs = parse_unary();
      return e;
    }
    return parse_power();
  }

  // power := primary [ '^' unary ]   (right-associative)
  ExprPtr parse_power() {
    auto base = parse_primary();
    skip_ws();
    std::size_t at = pos;
    if (accept('^')) {
      auto e = make(Expr::Kind::Binary, at);
      e->op = BinaryOp::Pow;
      e->lhs = std::move(base);
      e->rhs = parse_unary();
      return e;
    }
    return base;
  }

  ExprPtr parse_primary() {
    skip_ws();
    if (pos >= src.size()) throw ParseError("unexpected end of input", pos);
    std::size_t at = pos;
    char c = src[pos];

    if (c == '(') {
      ++pos;
      auto e = parse_expr();
      expect(')');
      return e;
    }
    if ((c >= '0' && c <= '9') || c == '.') return parse_number();
    if (c >= 'a' && c <= 'z') return parse_identifier();
    throw ParseError(std::string("unexpected character '") + c + "'", at);
  }

  ExprPtr parse_number() {
    std::size_t at = pos;
    std::size_t i = pos;
    while (i < src.size() && ((src[i] >= '0' && src[i] <= '9') || src[i] == '.')) ++i;
    if (i < src.size() && (src[i] == 'e' || src[i] == 'E')) {
      std::size_t j = i + 1;
      if (j < src.size() && (src[j] == '+' || src[j] == '-')) ++j;
      if (j < src.size() && src[j] >= '0' && src[j] <= '9') {
        while (j < src.size() && src[j] >= '0' && src[j] <= '9') ++j;
        i = j;
      }
    }
    std::string text(src.substr(at, i - at));
    char* end = nullptr;
    double v = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0')
      throw ParseError("malformed number '" + text + "'", at);
    pos = i;
    auto e = make(Expr::Kind::Number, at);
    e->number = v;
    return e;
  }

  ExprPtr parse_identifier() {
    std::size_t at = pos;
    std::size_t i = pos;
    while (i < src.size() && ((src[i] >= 'a' && src[i] <= 'z') ||
                              (src[i] >= '0' && src[i] <= '9')))
      ++i;
    std::string name(src.substr(at, i - at));
    pos = i;

    if (peek() != '(') {
      auto e = make(Expr::Kind::Variable, at);
      if (name == "x") e->var = Var::X;
      else if (name == "x1") e->var = Var::X1;
      else if (name == "x2") e->var = Var::X2;
      else if (name == "x3") e->var = Var::X3;
      else if (name == "w") e->var = Var::Omega;
      else throw ParseError("unknown identifier '" + name + "'", at);
      return e;
    }

    expect('(');
    if (name == "besselj") {
      skip_ws();
      std::size_t nu_at = pos;
      auto nu = parse_expr();
      if (nu->kind != Expr::Kind::Number || nu->number != std::floor(nu->number) ||
          nu->number < 0 || nu->number > 200)
        throw ParseError("besselj order must be an integer literal in [0,200]", nu_at);
      expect(',');
      auto e = make(Expr::Kind::BesselJ, at);
      e->bessel_order = static_cast<int>(nu->number);
      e->lhs = parse_expr();
      expect(')');
      return e;
    }

    UnaryFn fn;
    if (name == "sin") fn = UnaryFn::Sin;
    else if (name == "cos") fn = UnaryFn::Cos;
    else if (name == "exp") fn = UnaryFn::Exp;
    else if (name == "sqrt") fn = UnaryFn::Sqrt;
    else if (name == "abs") fn = UnaryFn::Abs;
    else if (name == "gamma") fn = UnaryFn::Gamma;
    else throw ParseError("unknown function '" + name + "'", at);

    auto e = make(Expr::Kind::Unary, at);
    e->fn = fn;
    e->lhs = parse_expr();
    skip_ws();
    if (pos < src.size() && src[pos] == ',')
      throw ParseError("'" + name + "' takes one argument", pos);
    expect(')');
    return e;
  }
};

int precedence_of(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Binary:
      switch (e.op) {
        case BinaryOp::Add:
        case BinaryOp::Sub: return 1;
        case BinaryOp::Mul:
        case BinaryOp::Div: return 2;
        case BinaryOp::Pow: return 4;
      }
      return 0;
    case Expr::Kind::Unary:
      return e.fn == UnaryFn::Neg ? 3 : 5;
    default:
      return 5;
  }
}

void print_rec(const Expr& e, std::string& out, int parent_prec, bool rhs_of_parent) {
  int prec = precedence_of(e);
  bool parens = prec < parent_prec || (prec == parent_prec && rhs_of_parent);
  if (parens) out += '(';
  switch (e.kind) {
    case Expr::Kind::Number: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", e.number);
      out += buf;
      break;
    }
    case Expr::Kind::Variable:
      switch (e.var) {
        case Var::X: out += "x"; break;
        case Var::X1: out += "x1"; break;
        case Var::X2: out += "x2"; break;
        case Var::X3: out += "x3"; break;
        case Var::Omega: out += "w"; break;
      }
      break;
    case Expr::Kind::Unary:
      if (e.fn == UnaryFn::Neg) {
        out += '-';
        print_rec(*e.lhs, out, 3, false);
      } else {
        switch (e.fn) {
          case UnaryFn::Sin: out += "sin("; break;
          case UnaryFn::Cos: out += "cos("; break;
          case UnaryFn::Exp: out += "exp("; break;
          case UnaryFn::Sqrt: out += "sqrt("; break;
          case UnaryFn::Abs: out += "abs("; break;
          case UnaryFn::Gamma: out += "gamma("; break;
          case UnaryFn::Neg: break;
        }
        print_rec(*e.lhs, out, 0, false);
        out += ')';
      }
      break;
    case Expr::Kind::Binary: {
      const char* sym = "";
      switch (e.op) {
        case BinaryOp::Add: sym = "+"; break;
        case BinaryOp::Sub: sym = "-"; break;
        case BinaryOp::Mul: sym = "*"; break;
        case BinaryOp::Div: sym = "/"; break;
        case BinaryOp::Pow: sym = "^"; break;
      }
      // Pow is right-associative, the rest left-associative.
      bool pow = e.op == BinaryOp::Pow;
      print_rec(*e.lhs, out, prec + (pow ? 1 : 0), false);
      out += sym;
      print_rec(*e.rhs, out, prec, !pow);
      break;
    }
    case Expr::Kind::BesselJ:
      out += "besselj(" + std::to_string(e.bessel_order) + ",";
      print_rec(*e.lhs, out, 0, false);
      out += ')';
      break;
  }
  if (parens) out += ')';
}

double bound_var(const Bindings& b, Var v, std::size_t at) {
  const std::optional<double>* slot = nullptr;
  const char* name = "";
  switch (v) {
    case Var::X: slot = &b.x; name = "x"; break;
    case Var::X1: slot = &b.x1; name = "x1"; break;
    case Var::X2: slot = &b.x2; name = "x2"; break;
    case Var::X3: slot = &b.x3; name = "x3"; break;
    case Var::Omega: slot = &b.w; name = "w"; break;
  }
  if (!slot->has_value())
    throw EvalError(std::string("unbound variable '") + name + "'", at);
  return **slot;
}

double apply_unary(UnaryFn fn, double v, std::size_t at) {
  switch (fn) {
    case UnaryFn::Neg: return -v;
    case UnaryFn::Sin: return std::sin(v);
    case UnaryFn::Cos: return std::cos(v);
    case UnaryFn::Exp: {
      double r = std::exp(v);
      if (!std::isfinite(r)) throw EvalError("exp overflow", at);
      return r;
    }
    case UnaryFn::Sqrt:
      if (v < 0.0) throw EvalError("sqrt of negative value", at);
      return std::sqrt(v);
    case UnaryFn::Abs: return std::fabs(v);
    case UnaryFn::Gamma:
      if (v <= 0.0) throw EvalError("gamma argument must be positive", at);
      return gamma_fn(v);
  }
  return 0.0;
}

double apply_binary(BinaryOp op, double a, double b, std::size_t at) {
  double r = 0.0;
  switch (op) {
    case BinaryOp::Add: r = a + b; break;
    case BinaryOp::Sub: r = a - b; break;
    case BinaryOp::Mul: r = a * b; break;
    case BinaryOp::Div:
      if (b == 0.0) throw EvalError("division by zero", at);
      r = a / b;
      break;
    case BinaryOp::Pow:
      r = std::pow(a, b);
      break;
  }
  if (!std::isfinite(r)) throw EvalError("non-finite result", at);
  return r;
}

}  // namespace

ExprPtr parse_expression(std::string_view text) {
  Parser p{text};
  auto e = p.parse_expr();
  p.skip_ws();
  if (p.pos < text.size())
    throw ParseError("trailing input", p.pos);
  return e;
}

std::string print_expression(const Expr& e) {
  std::string out;
  print_rec(e, out, 0, false);
  return out;
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Expr::Kind::Number: return a.number == b.number;
    case Expr::Kind::Variable: return a.var == b.var;
    case Expr::Kind::Unary:
      return a.fn == b.fn && structurally_equal(*a.lhs, *b.lhs);
    case Expr::Kind::Binary:
      return a.op == b.op && structurally_equal(*a.lhs, *b.lhs) &&
             structurally_equal(*a.rhs, *b.rhs);
    case Expr::Kind::BesselJ:
      return a.bessel_order == b.bessel_order && structurally_equal(*a.lhs, *b.lhs);
  }
  return false;
}

ExprPtr clone_expression(const Expr& e) {
  auto c = std::make_unique<Expr>();
  c->kind = e.kind;
  c->offset = e.offset;
  c->number = e.number;
  c->var = e.var;
  c->fn = e.fn;
  c->op = e.op;
  c->bessel_order = e.bessel_order;
  if (e.lhs) c->lhs = clone_expression(*e.lhs);
  if (e.rhs) c->rhs = clone_expression(*e.rhs);
  return c;
}

double eval_expression(const Expr& e, const Bindings& b) {
  switch (e.kind) {
    case Expr::Kind::Number: return e.number;
    case Expr::Kind::Variable: return bound_var(b, e.var, e.offset);
    case Expr::Kind::Unary:
      return apply_unary(e.fn, eval_expression(*e.lhs, b), e.offset);
    case Expr::Kind::Binary:
      return apply_binary(e.op, eval_expression(*e.lhs, b),
                          eval_expression(*e.rhs, b), e.offset);
    case Expr::Kind::BesselJ:
      return bessel_j(e.bessel_order, eval_expression(*e.lhs, b));
  }
  return 0.0;
}

VarUsage variables_of(const Expr& e) {
  VarUsage u;
  auto walk = [&](auto&& self, const Expr& n) -> void {
    if (n.kind == Expr::Kind::Variable) {
      switch (n.var) {
        case Var::X: u.x = true; break;
        case Var::X1: u.x1 = true; break;
        case Var::X2: u.x2 = true; break;
        case Var::X3: u.x3 = true; break;
        case Var::Omega: u.w = true; break;
      }
    }
    if (n.lhs) self(self, *n.lhs);
    if (n.rhs) self(self, *n.rhs);
  };
  walk(walk, e);
  return u;
}

// Opcode layout for CompiledExpr. Values below 16 load operands, the rest pop.
enum : std::uint8_t {
  kConst = 0, kLoadX, kLoadX1, kLoadX2, kLoadX3, kLoadW,
  kNeg = 16, kSin, kCos, kExp, kSqrt, kAbs, kGamma, kBessel,
  kAdd = 32, kSub, kMul, kDiv, kPow,
};

CompiledExpr::CompiledExpr(const Expr& e) {
  int depth = 0;
  auto emit = [&](std::uint8_t code, std::uint32_t off, double val, int delta) {
    ops_.push_back(Op{code, off, val});
    depth += delta;
    stack_need_ = std::max(stack_need_, depth);
  };
  auto walk = [&](auto&& self, const Expr& n) -> void {
    std::uint32_t off = static_cast<std::uint32_t>(n.offset);
    switch (n.kind) {
      case Expr::Kind::Number: emit(kConst, off, n.number, +1); break;
      case Expr::Kind::Variable:
        switch (n.var) {
          case Var::X: emit(kLoadX, off, 0, +1); break;
          case Var::X1: emit(kLoadX1, off, 0, +1); break;
          case Var::X2: emit(kLoadX2, off, 0, +1); break;
          case Var::X3: emit(kLoadX3, off, 0, +1); break;
          case Var::Omega: emit(kLoadW, off, 0, +1); break;
        }
        break;
      case Expr::Kind::Unary:
        self(self, *n.lhs);
        switch (n.fn) {
          case UnaryFn::Neg: emit(kNeg, off, 0, 0); break;
          case UnaryFn::Sin: emit(kSin, off, 0, 0); break;
          case UnaryFn::Cos: emit(kCos, off, 0, 0); break;
          case UnaryFn::Exp: emit(kExp, off, 0, 0); break;
          case UnaryFn::Sqrt: emit(kSqrt, off, 0, 0); break;
          case UnaryFn::Abs: emit(kAbs, off, 0, 0); break;
          case UnaryFn::Gamma: emit(kGamma, off, 0, 0); break;
        }
        break;
      case Expr::Kind::Binary:
        self(self, *n.lhs);
        self(self, *n.rhs);
        switch (n.op) {
          case BinaryOp::Add: emit(kAdd, off, 0, -1); break;
          case BinaryOp::Sub: emit(kSub, off, 0, -1); break;
          case BinaryOp::Mul: emit(kMul, off, 0, -1); break;
          case BinaryOp::Div: emit(kDiv, off, 0, -1); break;
          case BinaryOp::Pow: emit(kPow, off, 0, -1); break;
        }
        break;
      case Expr::Kind::BesselJ:
        self(self, *n.lhs);
        emit(kBessel, off, static_cast<double>(n.bessel_order), 0);
        break;
    }
  };
  walk(walk, e);
}

double CompiledExpr::operator()(const Bindings& b) const {
  double stack[64];
  if (stack_need_ > 64) throw EvalError("expression too deep", 0);
  int top = -1;
  for (const Op& op : ops_) {
    switch (op.code) {
      case kConst: stack[++top] = op.value; break;
      case kLoadX: stack[++top] = bound_var(b, Var::X, op.offset); break;
      case kLoadX1: stack[++top] = bound_var(b, Var::X1, op.offset); break;
      case kLoadX2: stack[++top] = bound_var(b, Var::X2, op.offset); break;
      case kLoadX3: stack[++top] = bound_var(b, Var::X3, op.offset); break;
      case kLoadW: stack[++top] = bound_var(b, Var::Omega, op.offset); break;
      case kNeg: stack[top] = -stack[top]; break;
      case kSin: stack[top] = std::sin(stack[top]); break;
      case kCos: stack[top] = std::cos(stack[top]); break;
      case kExp: stack[top] = apply_unary(UnaryFn::Exp, stack[top], op.offset); break;
      case kSqrt: stack[top] = apply_unary(UnaryFn::Sqrt, stack[top], op.offset); break;
      case kAbs: stack[top] = std::fabs(stack[top]); break;
      case kGamma: stack[top] = apply_unary(UnaryFn::Gamma, stack[top], op.offset); break;
      case kBessel:
        stack[top] = bessel_j(static_cast<int>(op.value), stack[top]);
        break;
      case kAdd: --top; stack[top] = stack[top] + stack[top + 1]; break;
      case kSub: --top; stack[top] = stack[top] - stack[top + 1]; break;
      case kMul: --top; stack[top] = stack[top] * stack[top + 1]; break;
      case kDiv: --top; stack[top] = apply_binary(BinaryOp::Div, stack[top], stack[top + 1], op.offset); break;
      case kPow: --top; stack[top] = apply_binary(BinaryOp::Pow, stack[top], stack[top + 1], op.offset); break;
    }
  }
  double r = stack[0];
  if (!std::isfinite(r)) throw EvalError("non-finite result", 0);
  return r;
}

}  // namespace hoqtt
