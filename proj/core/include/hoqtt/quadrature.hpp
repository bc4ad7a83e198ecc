#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "hoqtt/oscillator.hpp"

namespace hoqtt {

struct GaussLegendreRule {
  std::vector<double> nodes;    // on [-1,1], increasing
  std::vector<double> weights;  // positive, sum 2
};

// n-point rule, 1 <= n <= 64. Nodes from Newton iteration on P_n.
const GaussLegendreRule& gauss_legendre(int n);

// Composite n-point Gauss-Legendre over m equal subintervals of [a,b].
double composite_integrate(const std::function<double(double)>& f, double a,
                           double b, int m, int n);

struct QuadratureConfig {
  int points_per_subinterval = 8;
  // Subintervals (per dimension) as a function of the query frequency.
  std::function<int(double)> subinterval_rule;
  int refinement_factor = 2;  // self-validation resolution multiplier
  // Floor on the subinterval count.
  int min_subintervals = 1;
  // Added on top of the omega rule; the pipeline sets ceil(deg/2)+1 so the
  // basis-polynomial factor stays resolved at small omega.
  int extra_subintervals = 0;
  double flag_threshold = 1e-9;  // self-validation disagreement limit

  int subintervals_for(double omega) const;

  // m = max(ceil|w|, 1), the 1-D default.
  static QuadratureConfig defaults_1d();
  // m = max(ceil(|w|/3), 1) per dimension, for tensorized rules.
  static QuadratureConfig defaults_multi();
  // The reproduction preset: omega_max subintervals regardless of the query.
  static QuadratureConfig paper_preset(double omega_max);
};

enum class Part : std::uint8_t { Real, Imag };

struct OscEntryResult {
  double value = 0.0;             // finer-resolution result
  double validation_delta = 0.0;  // |coarse - fine|
  bool flagged = false;           // delta exceeded cfg.flag_threshold
};

// integral_{-1}^{1} basis(x) * cos/sin(w*g(x)) dx for phase oscillators, or
// integral basis(x) * h_w(x) dx for kernels (part must be Real). Always
// computed at two resolutions (m and refinement_factor*m subintervals).
OscEntryResult oscillatory_entry(const std::function<double(double)>& basis_fn,
                                 const OscillatorSpec& osc, double omega,
                                 Part part, const QuadratureConfig& cfg);

// Full tensor-product composite rule over [-1,1]^d, d in {2,3}. The cost
// (m*n)^d must stay within budget_points.
double tensorized_integrate(
    const std::function<double(std::span<const double>)>& f, int d,
    double omega, const QuadratureConfig& cfg,
    std::uint64_t budget_points = std::uint64_t(1) << 26);

// Shared cache of phase values g(x_i) on composite grids, keyed by the
// subinterval count. One instance may serve many entry evaluators of the
// same oscillator (thread-safe).
class PhaseGridCache {
 public:
  PhaseGridCache(const OscillatorSpec& osc, int points_per_subinterval);

  // d=1 grids: g at all m*n composite nodes.
  std::shared_ptr<const std::vector<double>> grid_1d(int m);
  // d-dim grids, flattened over cells and points.
  std::shared_ptr<const std::vector<double>> grid_multi(int m, int d);

  const OscillatorSpec& oscillator() const { return osc_; }
  int points_per_subinterval() const { return n_; }

 private:
  OscillatorSpec osc_;
  int n_;
  std::mutex mu_;
  std::map<int, std::shared_ptr<const std::vector<double>>> cache_1d_;
  std::map<std::pair<int, int>, std::shared_ptr<const std::vector<double>>> cache_multi_;
  std::size_t size_1d_ = 0;
  std::size_t size_multi_ = 0;
};

// Repeated evaluation of one prototype entry omega -> integral, with cached
// node data. Not thread-safe; use one instance per thread.
class OscillatoryEntryEvaluator {
 public:
  OscillatoryEntryEvaluator(std::function<double(double)> basis_fn,
                            const OscillatorSpec& osc, Part part,
                            QuadratureConfig cfg,
                            std::shared_ptr<PhaseGridCache> shared = nullptr);

  OscEntryResult operator()(double omega);

 private:
  double integrate_once(double omega, int m);

  std::function<double(double)> basis_;
  OscillatorSpec osc_;
  Part part_;
  QuadratureConfig cfg_;
  std::shared_ptr<PhaseGridCache> cache_;
  // per-m weighted basis values w_i * basis(x_i)
  std::map<int, std::vector<double>> wb_;
  std::size_t wb_doubles_ = 0;
  // kernel path keeps plain nodes as well
  std::map<int, std::vector<double>> nodes_;
};

// d-dimensional analogue over the Lagrange product basis.
class TensorizedEntryEvaluator {
 public:
  TensorizedEntryEvaluator(std::function<double(std::span<const double>)> basis_fn,
                           const OscillatorSpec& osc, Part part,
                           QuadratureConfig cfg,
                           std::shared_ptr<PhaseGridCache> shared = nullptr);

  OscEntryResult operator()(double omega);

 private:
  double integrate_once(double omega, int m);

  std::function<double(std::span<const double>)> basis_;
  OscillatorSpec osc_;
  Part part_;
  int dim_;
  QuadratureConfig cfg_;
  std::shared_ptr<PhaseGridCache> cache_;
  std::map<int, std::vector<double>> wb_;
  std::size_t wb_doubles_ = 0;
};

}  // namespace hoqtt
