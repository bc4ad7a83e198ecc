#include "hoqtt/interpolation.hpp"

#include <cmath>
#include <stdexcept>

namespace hoqtt {

std::vector<double> cgl_points(int N) {
  if (N < 0) throw std::invalid_argument("cgl_points: N must be >= 0");
  if (N == 0) return {1.0};
  std::vector<double> x(N + 1);
  for (int k = 0; k <= N; ++k) x[k] = std::cos(k * M_PI / N);
  x[N] = -1.0;  // cos(pi) exactly
  if (N % 2 == 0) x[N / 2] = 0.0;
  return x;
}

ChebyshevInterpolant chebyshev_coefficients(std::span<const double> samples) {
  if (samples.empty())
    throw std::invalid_argument("chebyshev_coefficients: need N+1 samples");
  int N = static_cast<int>(samples.size()) - 1;
  ChebyshevInterpolant out;
  out.degree = N;
  out.coeffs.assign(N + 1, 0.0);
  if (N == 0) {
    out.coeffs[0] = samples[0];
    return out;
  }
  // c_k = 2/(alpha_k N) * sum'' f(x_j) cos(k j pi / N); alpha_0 = alpha_N = 2.
  for (int k = 0; k <= N; ++k) {
    double s = 0.5 * samples[0];
    for (int j = 1; j < N; ++j) s += samples[j] * std::cos(k * j * M_PI / N);
    s += 0.5 * (k % 2 == 0 ? samples[N] : -samples[N]);
    double alpha = (k == 0 || k == N) ? 2.0 : 1.0;
    out.coeffs[k] = 2.0 * s / (alpha * N);
  }
  return out;
}

double clenshaw_eval(const ChebyshevInterpolant& c, double x) {
  if (!(x >= -1.0 && x <= 1.0))
    throw std::domain_error("clenshaw_eval: x outside [-1,1]");
  double b1 = 0.0, b2 = 0.0;
  for (int k = c.degree; k >= 1; --k) {
    double b0 = 2.0 * x * b1 - b2 + c.coeffs[k];
    b2 = b1;
    b1 = b0;
  }
  return x * b1 - b2 + c.coeffs[0];
}

LagrangeBasis::LagrangeBasis(int N) : degree_(N), nodes_(cgl_points(N)) {
  if (N < 0) throw std::invalid_argument("LagrangeBasis: N must be >= 0");
  weights_.assign(N + 1, 0.0);
  // Closed-form barycentric weights for CGL nodes: (-1)^k, halved at the ends.
  for (int k = 0; k <= N; ++k) {
    double w = (k % 2 == 0) ? 1.0 : -1.0;
    if (k == 0 || k == N) w *= 0.5;
    weights_[k] = w;
  }
}

double LagrangeBasis::eval(int k, double x) const {
  if (k < 0 || k > degree_) throw std::out_of_range("LagrangeBasis::eval: k");
  if (degree_ == 0) return 1.0;
  for (int j = 0; j <= degree_; ++j)
    if (x == nodes_[j]) return j == k ? 1.0 : 0.0;
  double num = weights_[k] / (x - nodes_[k]);
  double den = 0.0;
  for (int j = 0; j <= degree_; ++j) den += weights_[j] / (x - nodes_[j]);
  return num / den;
}

double bernstein_bound(double M0, double rho, int N) {
  if (!(rho > 1.0)) throw std::domain_error("bernstein_bound: rho must be > 1");
  if (!(M0 > 0.0)) throw std::domain_error("bernstein_bound: M0 must be > 0");
  return 4.0 * M0 * std::pow(rho, -N) / (rho - 1.0);
}

double chebyshev_t(int k, double x) {
  if (k == 0) return 1.0;
  if (k == 1) return x;
  double tm = 1.0, t = x;
  for (int n = 2; n <= k; ++n) {
    double tn = 2.0 * x * t - tm;
    tm = t;
    t = tn;
  }
  return t;
}

}  // namespace hoqtt
