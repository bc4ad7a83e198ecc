#include "simd_kernels.hpp"

#include <cmath>

namespace hoqtt::detail {

double weighted_cos_sum(const double* w, const double* g, std::size_t n, double omega) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += w[i] * std::cos(omega * g[i]);
  return s;
}

double weighted_sin_sum(const double* w, const double* g, std::size_t n, double omega) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += w[i] * std::sin(omega * g[i]);
  return s;
}

}  // namespace hoqtt::detail
