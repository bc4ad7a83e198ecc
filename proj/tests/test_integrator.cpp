#include <cmath>
#include <complex>

#include "doctest.h"
#include "hoqtt/integrator.hpp"

using namespace hoqtt;

namespace {

CrossConfig cross_cfg(double tol = 1e-10) {
  CrossConfig cfg;
  cfg.tolerance = tol;
  cfg.max_rank = 14;
  return cfg;
}

PrototypeTable build_table(const char* osc, OscKind kind, BasisSpec basis,
                           double wmin, double wmax, int L, double tol = 1e-10) {
  QuadratureConfig quad = basis.dim > 1 ? QuadratureConfig::defaults_multi()
                                        : QuadratureConfig::defaults_1d();
  return precompute_table(OscillatorSpec(kind, osc), basis,
                          FrequencyGrid(wmin, wmax, L), cross_cfg(tol), quad);
}

}  // namespace

TEST_CASE("round_to_grid") {
  FrequencyGrid g(0.0, 3.0, 2);  // h = 1
  auto [i1, w1] = round_to_grid(1.6, g);
  CHECK(i1 == 2);
  CHECK(w1 == 2.0);
  auto [i0, w0] = round_to_grid(0.0, g);
  CHECK(i0 == 0);
  CHECK(w0 == 0.0);
  // ties round half away from zero
  auto [it, wt] = round_to_grid(0.5, g);
  CHECK(it == 1);
  CHECK(wt == 1.0);

  FrequencyGrid big(0.0, 100.0, 20);
  auto [ip, wp] = round_to_grid(M_PI * 10.0, big);
  CHECK(std::fabs(wp - M_PI * 10.0) <= big.spacing() / 2.0);
  (void)ip;

  CHECK_THROWS_AS(round_to_grid(3.5, g), OutOfGridError);
  CHECK_THROWS_AS(round_to_grid(-0.1, g), OutOfGridError);
}

TEST_CASE("rounding_error_bound") {
  CHECK(rounding_error_bound(1e-8) / 1e-8 == doctest::Approx(1.0).epsilon(1e-6));
  double eps_r = 1e-6;
  double h = 2.0 * std::log(eps_r / 2.0 + 1.0);
  CHECK(rounding_error_bound(h) == doctest::Approx(eps_r).epsilon(1e-12));
  double h30 = 1000.0 / (std::ldexp(1.0, 30) - 1.0);
  CHECK(rounding_error_bound(h30) == doctest::Approx(9.31322792e-7).epsilon(1e-8));
  CHECK_THROWS_AS(rounding_error_bound(0.0), std::invalid_argument);
}

TEST_CASE("integrate_1d on g = x") {
  PrototypeTable t = build_table("x", OscKind::Phase,
                                 BasisSpec{BasisKind::Chebyshev, 2, 1}, 0.0, 100.0,
                                 18, 1e-11);
  auto one = [](double) { return 1.0; };

  IntegralResult r0 = integrate_1d(t, one, 0.0);
  CHECK(r0.value.real() == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(r0.value.imag() == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));

  IntegralResult r50 = integrate_1d(t, one, 50.0);
  double w = r50.omega_rounded;
  CHECK(std::fabs(w - 50.0) <= t.grid().spacing() / 2.0);
  CHECK(r50.value.real() == doctest::Approx(2.0 * std::sin(w) / w).epsilon(1e-9));
  CHECK(r50.value.imag() == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
  CHECK(r50.rounding_bound <= rounding_error_bound(t.grid().spacing()) * (1 + 1e-12));
  CHECK_FALSE(r50.flagged);

  CHECK_THROWS_AS(integrate_1d(t, one, 101.0), OutOfGridError);
}

TEST_CASE("integrate_1d matches brute force for g = x^2, f = cos") {
  PrototypeTable t = build_table("x^2", OscKind::Phase,
                                 BasisSpec{BasisKind::Chebyshev, 12, 1}, 0.0, 25.0,
                                 16, 1e-11);
  auto f = [](double x) { return std::cos(x); };
  OscillatorSpec g(OscKind::Phase, "x^2");
  QuadratureConfig quad = QuadratureConfig::defaults_1d();

  for (double w0 : {5.0, 12.7, 20.0, 24.9}) {
    IntegralResult r = integrate_1d(t, f, w0);
    auto fre = oscillatory_entry(f, g, r.omega_rounded, Part::Real, quad);
    auto fim = oscillatory_entry(f, g, r.omega_rounded, Part::Imag, quad);
    CAPTURE(w0);
    CHECK(std::abs(r.value - std::complex<double>(fre.value, fim.value)) <= 2e-9);
  }
}

TEST_CASE("integrate_1d is linear in f") {
  PrototypeTable t = build_table("sin(x+1)", OscKind::Phase,
                                 BasisSpec{BasisKind::Chebyshev, 8, 1}, 0.0, 30.0,
                                 14, 1e-10);
  auto f1 = [](double x) { return std::cos(x); };
  auto f2 = [](double x) { return x * x; };
  double a = 1.75, b = -0.4;
  auto fmix = [&](double x) { return a * f1(x) + b * f2(x); };
  for (double w : {3.0, 17.5, 29.0}) {
    auto r1 = integrate_1d(t, f1, w);
    auto r2 = integrate_1d(t, f2, w);
    auto rm = integrate_1d(t, fmix, w);
    CHECK(std::abs(rm.value - (a * r1.value + b * r2.value)) <= 1e-10);
  }
}

TEST_CASE("chebyshev and lagrange table paths agree") {
  BasisSpec cheb{BasisKind::Chebyshev, 6, 1};
  BasisSpec lagr{BasisKind::Lagrange, 6, 1};
  PrototypeTable tc = build_table("0.5*x^2+0.25*x", OscKind::Phase, cheb, 0.0,
                                  20.0, 14, 1e-10);
  PrototypeTable tl = build_table("0.5*x^2+0.25*x", OscKind::Phase, lagr, 0.0,
                                  20.0, 14, 1e-10);
  auto f = [](double x) { return std::exp(0.3 * x); };
  for (double w : {1.0, 9.5, 19.0}) {
    auto rc = integrate_1d(tc, f, w);
    auto rl = integrate_1d(tl, f, w);
    CHECK(std::abs(rc.value - rl.value) <= 5e-9);
  }
}

TEST_CASE("integrate_multi separable check") {
  PrototypeTable t = build_table("x1+x2", OscKind::Phase,
                                 BasisSpec{BasisKind::LagrangeMulti, 3, 2}, 0.0,
                                 8.0, 12, 1e-9);
  auto one = [](std::span<const double>) { return 1.0; };

  IntegralResult r5 = integrate_multi(t, one, 5.0);
  double w = r5.omega_rounded;
  double s = 2.0 * std::sin(w) / w;
  CHECK(r5.value.real() == doctest::Approx(s * s).epsilon(1e-7));
  // sin(w(y1+y2)) splits into products each holding an odd factor
  CHECK(r5.value.imag() == doctest::Approx(0.0).scale(1.0).epsilon(1e-7));

  IntegralResult r0 = integrate_multi(t, one, 0.0);
  CHECK(r0.value.real() == doctest::Approx(4.0).epsilon(1e-8));
  CHECK(r0.value.imag() == doctest::Approx(0.0).scale(1.0).epsilon(1e-8));

  auto y1 = [](std::span<const double> y) { return y[0]; };
  IntegralResult ro = integrate_multi(t, y1, 0.0);
  CHECK(ro.value.real() == doctest::Approx(0.0).scale(1.0).epsilon(1e-8));
}

TEST_CASE("fourier transform through a g = -x table") {
  PrototypeTable t = build_table("-x", OscKind::Phase,
                                 BasisSpec{BasisKind::Chebyshev, 6, 1}, 0.0, 40.0,
                                 22, 1e-10);
  auto one = [](double) { return 1.0; };

  FourierResult r0 = fourier_transform(t, one, 0.0, 1.0, 0.0);
  CHECK(std::abs(r0.value - std::complex<double>(1.0, 0.0)) <= 1e-9);

  FourierResult r10 = fourier_transform(t, one, 0.0, 1.0, 10.0);
  double we = r10.omega_effective;
  std::complex<double> expect =
      (1.0 - std::exp(std::complex<double>(0.0, -we))) /
      std::complex<double>(0.0, we);
  CHECK(std::abs(r10.value - expect) <= 1e-8);

  // scaling identity on a shifted interval
  FourierResult rs = fourier_transform(t, one, -2.0, 3.0, 7.0);
  double ws = rs.omega_effective;
  std::complex<double> iw(0.0, ws);
  std::complex<double> ref = (std::exp(-iw * -2.0) - std::exp(-iw * 3.0)) / iw;
  CHECK(std::abs(rs.value - ref) <= 1e-8);

  CHECK_THROWS_AS(fourier_transform(t, one, 0.0, 1.0, 1000.0), OutOfGridError);

  PrototypeTable wrong = build_table("x^2", OscKind::Phase,
                                     BasisSpec{BasisKind::Chebyshev, 2, 1}, 0.0,
                                     5.0, 8, 1e-8);
  CHECK_THROWS_AS(fourier_transform(wrong, one, 0.0, 1.0, 1.0),
                  std::invalid_argument);
}

TEST_CASE("integrate_general on kernel oscillators") {
  auto one = [](double) { return 1.0; };

  // h_w = cos(sin(wx)+1): at w=0 the kernel is the constant cos(1)
  PrototypeTable t1 = build_table("cos(sin(w*x)+1)", OscKind::Kernel,
                                  BasisSpec{BasisKind::Chebyshev, 4, 1}, 0.0, 5.0,
                                  10, 1e-9);
  IntegralResult r = integrate_general(t1, one, 0.0);
  CHECK(r.value.real() == doctest::Approx(2.0 * std::cos(1.0)).epsilon(1e-8));
  CHECK(r.value.imag() == 0.0);

  // h_w = J_11(w x) vanishes identically at w = 0
  PrototypeTable t2 = build_table("besselj(11,w*x)", OscKind::Kernel,
                                  BasisSpec{BasisKind::Chebyshev, 3, 1}, 0.0, 2.0,
                                  8, 1e-9);
  IntegralResult rb = integrate_general(t2, one, 0.0);
  CHECK(rb.value.real() == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));

  // gamma kernel against brute force at an interior frequency
  PrototypeTable t3 = build_table("gamma(0.5*sin(w*x)+2)", OscKind::Kernel,
                                  BasisSpec{BasisKind::Chebyshev, 6, 1}, 0.0, 5.0,
                                  10, 1e-9);
  auto f = [](double x) { return std::cos(x); };
  IntegralResult rg = integrate_general(t3, f, 3.0);
  OscillatorSpec gk(OscKind::Kernel, "gamma(0.5*sin(w*x)+2)");
  auto ref = oscillatory_entry(f, gk, rg.omega_rounded, Part::Real,
                               QuadratureConfig::defaults_1d());
  CHECK(rg.value.real() == doctest::Approx(ref.value).epsilon(1e-8));

  CHECK_THROWS_AS(integrate_1d(t1, one, 1.0), std::invalid_argument);
  PrototypeTable phase = build_table("x", OscKind::Phase,
                                     BasisSpec{BasisKind::Chebyshev, 1, 1}, 0.0,
                                     4.0, 8, 1e-8);
  CHECK_THROWS_AS(integrate_general(phase, one, 1.0), std::invalid_argument);
}
