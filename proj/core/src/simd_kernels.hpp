#pragma once

#include <cstddef>

namespace hoqtt::detail {

// sum_i w[i] * cos(omega * g[i]) / sin(...). Compiled with -ffast-math in its
// own translation unit so the libm calls vectorize; inputs must be finite.
double weighted_cos_sum(const double* w, const double* g, std::size_t n, double omega);
double weighted_sin_sum(const double* w, const double* g, std::size_t n, double omega);

}  // namespace hoqtt::detail
