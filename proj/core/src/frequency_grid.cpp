#include "hoqtt/frequency_grid.hpp"

#include <cmath>
#include <stdexcept>

namespace hoqtt {

FrequencyGrid::FrequencyGrid(double omega_min, double omega_max, int L,
                             std::optional<double> target_rounding_error)
    : omega_min_(omega_min), omega_max_(omega_max), L_(L) {
  if (!(omega_min < omega_max))
    throw std::invalid_argument("FrequencyGrid: need omega_min < omega_max");
  if (L < 1 || L > 63)
    throw std::invalid_argument("FrequencyGrid: L must be in [1,63]");
  double points = std::ldexp(1.0, L);
  h_ = (omega_max_ - omega_min_) / (points - 1.0);
  if (target_rounding_error) check_rounding_budget(h_, *target_rounding_error);
}

std::uint64_t FrequencyGrid::point_count() const {
  return std::uint64_t(1) << L_;
}

double FrequencyGrid::omega_at(std::uint64_t index) const {
  if (index >= point_count())
    throw std::out_of_range("FrequencyGrid: index out of range");
  return omega_min_ + h_ * static_cast<double>(index);
}

void FrequencyGrid::check_rounding_budget(double h, double eps_r) {
  if (!(eps_r > 0.0))
    throw std::invalid_argument("rounding budget: eps_r must be > 0");
  if (!(h < 2.0 * std::log(eps_r / 2.0 + 1.0)))
    throw std::invalid_argument(
        "grid spacing violates the rounding budget h < 2 ln(eps_r/2 + 1)");
}

}  // namespace hoqtt
