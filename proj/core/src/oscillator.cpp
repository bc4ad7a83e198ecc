#include "hoqtt/oscillator.hpp"

#include <cmath>
#include <stdexcept>

namespace hoqtt {

OscillatorSpec::OscillatorSpec(OscKind kind, std::string_view expr_text,
                               std::optional<Parity> declared_parity)
    : kind_(kind), declared_parity_(declared_parity) {
  expr_ = parse_expression(expr_text);
  text_ = print_expression(*expr_);
  compiled_ = CompiledExpr(*expr_);

  VarUsage u = variables_of(*expr_);
  if (kind_ == OscKind::Phase && u.w)
    throw std::invalid_argument("phase oscillator must not reference w");
  bool multi = u.x1 || u.x2 || u.x3;
  if (multi && u.x)
    throw std::invalid_argument("mixing 'x' with 'x1'..'x3' is not allowed");
  if (multi) {
    dimension_ = u.x3 ? 3 : (u.x2 ? 2 : 1);
    if (kind_ == OscKind::Kernel)
      throw std::invalid_argument("kernel oscillators are 1-D (variable x)");
  } else {
    dimension_ = 1;
  }
}

OscillatorSpec::OscillatorSpec(const OscillatorSpec& other)
    : kind_(other.kind_),
      expr_(clone_expression(*other.expr_)),
      text_(other.text_),
      compiled_(other.compiled_),
      dimension_(other.dimension_),
      declared_parity_(other.declared_parity_) {}

OscillatorSpec& OscillatorSpec::operator=(const OscillatorSpec& other) {
  if (this != &other) {
    kind_ = other.kind_;
    expr_ = clone_expression(*other.expr_);
    text_ = other.text_;
    compiled_ = other.compiled_;
    dimension_ = other.dimension_;
    declared_parity_ = other.declared_parity_;
  }
  return *this;
}

double OscillatorSpec::phase(double x) const {
  if (kind_ != OscKind::Phase)
    throw std::logic_error("phase() called on kernel oscillator");
  Bindings b;
  b.x = x;
  b.x1 = x;  // 1-D multi expressions written with x1 still evaluate
  return compiled_(b);
}

double OscillatorSpec::phase(double y1, double y2) const {
  if (kind_ != OscKind::Phase)
    throw std::logic_error("phase() called on kernel oscillator");
  Bindings b;
  b.x1 = y1;
  b.x2 = y2;
  return compiled_(b);
}

double OscillatorSpec::phase(double y1, double y2, double y3) const {
  if (kind_ != OscKind::Phase)
    throw std::logic_error("phase() called on kernel oscillator");
  Bindings b;
  b.x1 = y1;
  b.x2 = y2;
  b.x3 = y3;
  return compiled_(b);
}

double OscillatorSpec::kernel(double omega, double x) const {
  if (kind_ != OscKind::Kernel)
    throw std::logic_error("kernel() called on phase oscillator");
  Bindings b;
  b.x = x;
  b.w = omega;
  return compiled_(b);
}

Parity OscillatorSpec::parity(double tol) const {
  if (declared_parity_) return *declared_parity_;
  if (kind_ != OscKind::Phase || dimension_ != 1) return Parity::None;
  return detect_parity(*expr_, tol);
}

Parity detect_parity(const Expr& g, double tol) {
  CompiledExpr c(g);
  double even_dev = 0.0, odd_dev = 0.0;
  try {
    for (int i = 1; i <= 64; ++i) {
      double t = static_cast<double>(i) / 64.0;
      Bindings bp, bm;
      bp.x = t;
      bm.x = -t;
      double gp = c(bp), gm = c(bm);
      even_dev = std::max(even_dev, std::fabs(gp - gm));
      odd_dev = std::max(odd_dev, std::fabs(gp + gm));
    }
  } catch (const EvalError&) {
    return Parity::None;
  }
  if (even_dev <= tol) return Parity::Even;
  if (odd_dev <= tol) return Parity::Odd;
  return Parity::None;
}

}  // namespace hoqtt
