#pragma once

#include <cstdint>
#include <optional>

namespace hoqtt {

// Uniform frequency grid with 2^L points including both endpoints,
// h = (omega_max - omega_min)/(2^L - 1).
class FrequencyGrid {
 public:
  FrequencyGrid(double omega_min, double omega_max, int L,
                std::optional<double> target_rounding_error = std::nullopt);

  double omega_min() const { return omega_min_; }
  double omega_max() const { return omega_max_; }
  int level() const { return L_; }
  std::uint64_t point_count() const;  // 2^L
  double spacing() const { return h_; }

  double omega_at(std::uint64_t index) const;

  bool operator==(const FrequencyGrid&) const = default;

  // h must satisfy h < 2 ln(eps_r/2 + 1) for the rounding error to stay
  // below eps_r; throws otherwise.
  static void check_rounding_budget(double h, double eps_r);

 private:
  double omega_min_;
  double omega_max_;
  int L_;
  double h_;
};

}  // namespace hoqtt
