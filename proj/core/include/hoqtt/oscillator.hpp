#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "hoqtt/expr.hpp"

namespace hoqtt {

enum class OscKind : std::uint8_t { Phase, Kernel };
enum class Parity : std::uint8_t { Even, Odd, None };

// A parsed oscillator: either a phase g(x) for exp(i*w*g(x)), or a general
// real-valued kernel h_w(x) that may reference w directly.
class OscillatorSpec {
 public:
  OscillatorSpec(OscKind kind, std::string_view expr_text,
                 std::optional<Parity> declared_parity = std::nullopt);

  OscillatorSpec(const OscillatorSpec& other);
  OscillatorSpec& operator=(const OscillatorSpec& other);
  OscillatorSpec(OscillatorSpec&&) = default;
  OscillatorSpec& operator=(OscillatorSpec&&) = default;

  OscKind kind() const { return kind_; }
  int dimension() const { return dimension_; }
  const Expr& expr() const { return *expr_; }
  const std::string& text() const { return text_; }  // canonical printed form
  std::optional<Parity> declared_parity() const { return declared_parity_; }

  // Phase value g(x) (1-D) / g(y) (multi-D); throws for kernel kind.
  double phase(double x) const;
  double phase(double y1, double y2) const;
  double phase(double y1, double y2, double y3) const;

  // Kernel value h_w(x); throws for phase kind.
  double kernel(double omega, double x) const;

  // Parity of the phase in x; declared parity wins over detection. 1-D only.
  Parity parity(double tol = 1e-12) const;

 private:
  OscKind kind_;
  ExprPtr expr_;
  std::string text_;
  CompiledExpr compiled_;
  int dimension_ = 1;
  std::optional<Parity> declared_parity_;
};

// Samples g at 64 symmetric points; returns Even if max|g(x)-g(-x)| <= tol,
// Odd if max|g(x)+g(-x)| <= tol, None otherwise (or if evaluation fails).
Parity detect_parity(const Expr& g, double tol = 1e-12);

}  // namespace hoqtt
