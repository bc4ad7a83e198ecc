#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hoqtt {

// Variables of the expression language. `w` is the frequency parameter and is
// only legal in kernel-kind oscillators.
enum class Var : std::uint8_t { X, X1, X2, X3, Omega };

enum class UnaryFn : std::uint8_t { Neg, Sin, Cos, Exp, Sqrt, Abs, Gamma };
enum class BinaryOp : std::uint8_t { Add, Sub, Mul, Div, Pow };

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct Expr {
  enum class Kind : std::uint8_t { Number, Variable, Unary, Binary, BesselJ };

  Kind kind = Kind::Number;
  std::size_t offset = 0;  // byte offset in the source text, for diagnostics

  double number = 0.0;          // Kind::Number
  Var var = Var::X;             // Kind::Variable
  UnaryFn fn = UnaryFn::Neg;    // Kind::Unary
  BinaryOp op = BinaryOp::Add;  // Kind::Binary
  int bessel_order = 0;         // Kind::BesselJ

  ExprPtr lhs;  // operand of Unary, argument of BesselJ, left of Binary
  ExprPtr rhs;  // right of Binary
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " (at offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class EvalError : public std::runtime_error {
 public:
  EvalError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " (expression offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

ExprPtr parse_expression(std::string_view text);

// Canonical form: parse(print_expression(e)) is structurally equal to e.
std::string print_expression(const Expr& e);

bool structurally_equal(const Expr& a, const Expr& b);
ExprPtr clone_expression(const Expr& e);

struct Bindings {
  std::optional<double> x;
  std::optional<double> x1;
  std::optional<double> x2;
  std::optional<double> x3;
  std::optional<double> w;
};

double eval_expression(const Expr& e, const Bindings& b);

// Which variables an expression references.
struct VarUsage {
  bool x = false;
  bool x1 = false, x2 = false, x3 = false;
  bool w = false;
};
VarUsage variables_of(const Expr& e);

// Postfix program for repeated evaluation; same semantics (and the same
// domain errors) as eval_expression, a few times faster in hot loops.
class CompiledExpr {
 public:
  CompiledExpr() = default;
  explicit CompiledExpr(const Expr& e);

  double operator()(const Bindings& b) const;

 private:
  struct Op {
    std::uint8_t code;
    std::uint32_t offset;
    double value;  // constant payload / bessel order
  };
  std::vector<Op> ops_;
  int stack_need_ = 0;
};

}  // namespace hoqtt
