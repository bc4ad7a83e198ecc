#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <span>

#include "hoqtt/prototype_table.hpp"

namespace hoqtt {

class OutOfGridError : public std::runtime_error {
 public:
  explicit OutOfGridError(double omega)
      : std::runtime_error("frequency outside precomputed grid (omega=" +
                           std::to_string(omega) + ")") {}
};

struct IntegralResult {
  std::complex<double> value;
  double omega_rounded = 0.0;
  double rounding_bound = 0.0;  // 2(e^{|w_rounded - w|} - 1)
  std::optional<double> interpolation_bound;
  bool flagged = false;  // a flagged table entry contributed
};

// Nearest grid index; ties round half away from zero. No extrapolation:
// omega outside [omega_min, omega_max] raises OutOfGridError.
std::pair<std::uint64_t, double> round_to_grid(double omega, const FrequencyGrid& grid);

// Rounding error bound 2(e^{h/2} - 1) for grid spacing h.
double rounding_error_bound(double h);

// Algorithm-1 evaluation: interpolate f on the CGL nodes, combine the stored
// prototype tensors at the rounded frequency. Zero entries are skipped;
// cost is O((N+1) L r^2) independent of omega.
IntegralResult integrate_1d(const PrototypeTable& table,
                            const std::function<double(double)>& f, double omega);
// Same with precomputed samples of f at cgl_points(N).
IntegralResult integrate_1d(const PrototypeTable& table,
                            std::span<const double> f_samples, double omega);

// Degree-N interpolant of f combined with the k <= N tensors of a Chebyshev
// table built at some larger degree; supports convergence studies without
// rebuilding tables per N.
IntegralResult integrate_1d_truncated(const PrototypeTable& table,
                                      const std::function<double(double)>& f,
                                      double omega, int degree);

// d-dimensional combination over the Lagrange product basis.
IntegralResult integrate_multi(const PrototypeTable& table,
                               const std::function<double(std::span<const double>)>& f,
                               double omega);

// General-kernel tables store a single real part.
IntegralResult integrate_general(const PrototypeTable& table,
                                 const std::function<double(double)>& f, double omega);

struct FourierResult {
  std::complex<double> value;
  // The frequency the result is exact at after grid rounding,
  // 2*rounded(w*(b-a)/2)/(b-a).
  double omega_effective = 0.0;
  double rounding_bound = 0.0;
  bool flagged = false;
};

// hat f(w) = int_a^b f(x) e^{-i x w} dx via a g(x) = -x table and the affine
// scaling to [-1,1]; requires w*(b-a)/2 inside the table grid.
FourierResult fourier_transform(const PrototypeTable& table,
                                const std::function<double(double)>& f, double a,
                                double b, double omega);

}  // namespace hoqtt
