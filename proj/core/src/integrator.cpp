#include "hoqtt/integrator.hpp"

#include <cmath>

#include "hoqtt/interpolation.hpp"

namespace hoqtt {

std::pair<std::uint64_t, double> round_to_grid(double omega, const FrequencyGrid& grid) {
  if (!(omega >= grid.omega_min() && omega <= grid.omega_max()))
    throw OutOfGridError(omega);
  double pos = (omega - grid.omega_min()) / grid.spacing();
  long long idx = std::llround(pos);  // ties away from zero
  if (idx < 0) idx = 0;
  std::uint64_t u = static_cast<std::uint64_t>(idx);
  if (u >= grid.point_count()) u = grid.point_count() - 1;
  return {u, grid.omega_at(u)};
}

double rounding_error_bound(double h) {
  if (!(h > 0.0)) throw std::invalid_argument("rounding_error_bound: h must be > 0");
  return 2.0 * std::expm1(h / 2.0);
}

namespace {

// Combination coefficients for the table's 1-D basis: Chebyshev coefficients
// or plain node samples for the Lagrange form.
std::vector<double> combination_coeffs(const PrototypeTable& table,
                                       std::span<const double> f_samples) {
  int N = table.basis().degree;
  if (static_cast<int>(f_samples.size()) != N + 1)
    throw std::invalid_argument("integrate: need N+1 samples at the CGL nodes");
  if (table.basis().kind == BasisKind::Chebyshev)
    return chebyshev_coefficients(f_samples).coeffs;
  return std::vector<double>(f_samples.begin(), f_samples.end());
}

IntegralResult combine(const PrototypeTable& table, std::span<const double> coeffs,
                       double omega) {
  auto [idx, omega_r] = round_to_grid(omega, table.grid());
  DigitIndex digits = fold_index(idx, table.grid().level(), 2);

  IntegralResult res;
  res.omega_rounded = omega_r;
  res.rounding_bound = 2.0 * std::expm1(std::fabs(omega_r - omega));

  std::uint32_t upto = std::min<std::uint32_t>(table.basis().index_count(),
                                               static_cast<std::uint32_t>(coeffs.size()));
  double re = 0.0, im = 0.0;
  for (std::uint32_t k = 0; k < upto; ++k) {
    double c = coeffs[k];
    for (Part p : table.parts()) {
      const TableEntry& e = table.entry(k, p);
      if (e.status == TableEntry::Status::Zero) continue;
      if (e.status == TableEntry::Status::Flagged) res.flagged = true;
      if (!e.tensor) continue;  // aborted entry: flagged above, contributes 0
      double v = c * e.tensor->evaluate(digits);
      if (p == Part::Real)
        re += v;
      else
        im += v;
    }
  }
  res.value = {re, im};
  return res;
}

}  // namespace

IntegralResult integrate_1d(const PrototypeTable& table,
                            std::span<const double> f_samples, double omega) {
  if (table.basis().kind == BasisKind::LagrangeMulti)
    throw std::invalid_argument("integrate_1d: table holds a multi-D basis");
  if (table.oscillator().kind() != OscKind::Phase)
    throw std::invalid_argument("integrate_1d: use integrate_general for kernels");
  auto coeffs = combination_coeffs(table, f_samples);
  return combine(table, coeffs, omega);
}

IntegralResult integrate_1d(const PrototypeTable& table,
                            const std::function<double(double)>& f, double omega) {
  int N = table.basis().degree;
  std::vector<double> nodes = cgl_points(N);
  std::vector<double> samples(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) samples[i] = f(nodes[i]);
  return integrate_1d(table, std::span<const double>(samples), omega);
}

IntegralResult integrate_1d_truncated(const PrototypeTable& table,
                                      const std::function<double(double)>& f,
                                      double omega, int degree) {
  if (table.basis().kind != BasisKind::Chebyshev)
    throw std::invalid_argument("integrate_1d_truncated: Chebyshev tables only");
  if (degree < 0 || degree > table.basis().degree)
    throw std::invalid_argument("integrate_1d_truncated: degree out of range");
  std::vector<double> nodes = cgl_points(degree);
  std::vector<double> samples(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) samples[i] = f(nodes[i]);
  auto coeffs = chebyshev_coefficients(samples).coeffs;
  return combine(table, coeffs, omega);
}

IntegralResult integrate_multi(const PrototypeTable& table,
                               const std::function<double(std::span<const double>)>& f,
                               double omega) {
  if (table.basis().kind != BasisKind::LagrangeMulti)
    throw std::invalid_argument("integrate_multi: table is not multi-D");
  int N = table.basis().degree;
  int d = table.basis().dim;
  std::vector<double> nodes = cgl_points(N);
  std::uint32_t count = table.basis().index_count();
  std::vector<double> coeffs(count);
  std::vector<double> y(d);
  for (std::uint32_t idx = 0; idx < count; ++idx) {
    std::vector<int> j = table.basis().unflatten(idx);
    for (int i = 0; i < d; ++i) y[i] = nodes[j[i]];
    coeffs[idx] = f(std::span<const double>(y));
  }
  return combine(table, coeffs, omega);
}

IntegralResult integrate_general(const PrototypeTable& table,
                                 const std::function<double(double)>& f,
                                 double omega) {
  if (table.oscillator().kind() != OscKind::Kernel)
    throw std::invalid_argument("integrate_general: table is not kernel-kind");
  int N = table.basis().degree;
  std::vector<double> nodes = cgl_points(N);
  std::vector<double> samples(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) samples[i] = f(nodes[i]);
  auto coeffs = combination_coeffs(table, samples);
  return combine(table, coeffs, omega);
}

FourierResult fourier_transform(const PrototypeTable& table,
                                const std::function<double(double)>& f, double a,
                                double b, double omega) {
  if (!(a < b)) throw std::invalid_argument("fourier_transform: need a < b");
  static const ExprPtr minus_x = parse_expression("-x");
  if (table.oscillator().kind() != OscKind::Phase ||
      !structurally_equal(table.oscillator().expr(), *minus_x))
    throw std::invalid_argument("fourier_transform: table must hold g(x) = -x");

  double half = 0.5 * (b - a);
  double shift = 0.5 * (b + a);
  double omega_scaled = half * omega;
  IntegralResult inner = integrate_1d(
      table, [&](double x) { return f(half * x + shift); }, omega_scaled);

  FourierResult res;
  res.omega_effective = inner.omega_rounded / half;
  res.rounding_bound = inner.rounding_bound;
  res.flagged = inner.flagged;
  std::complex<double> prefactor =
      half * std::exp(std::complex<double>(0.0, -shift * res.omega_effective));
  res.value = prefactor * inner.value;
  return res;
}

}  // namespace hoqtt
