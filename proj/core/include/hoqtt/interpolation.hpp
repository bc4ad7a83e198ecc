#pragma once

#include <span>
#include <vector>

namespace hoqtt {

// Chebyshev-Gauss-Lobatto nodes x_k = cos(k*pi/N), k = 0..N (decreasing).
std::vector<double> cgl_points(int N);

struct ChebyshevInterpolant {
  int degree = 0;
  std::vector<double> coeffs;  // c_0..c_N
};

// Coefficients of the interpolant through samples f(x_k) at the CGL nodes.
// DCT-I style sum, direct O(N^2) evaluation.
ChebyshevInterpolant chebyshev_coefficients(std::span<const double> samples);

// Clenshaw recurrence; x must lie in [-1,1].
double clenshaw_eval(const ChebyshevInterpolant& c, double x);

// Barycentric Lagrange basis on the CGL nodes.
class LagrangeBasis {
 public:
  explicit LagrangeBasis(int N);

  int degree() const { return degree_; }
  const std::vector<double>& nodes() const { return nodes_; }

  // L_k(x); exactly the Kronecker delta at the nodes.
  double eval(int k, double x) const;

 private:
  int degree_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

// Chebyshev interpolation error bound 4*M0*rho^{-N}/(rho-1) for f analytic and
// bounded by M0 on the Bernstein ellipse E_rho; the induced quadrature error
// bound is twice this.
double bernstein_bound(double M0, double rho, int N);

// Chebyshev polynomial T_k(x) via the three-term recurrence.
double chebyshev_t(int k, double x);

}  // namespace hoqtt
