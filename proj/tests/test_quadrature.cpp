#include <cmath>

#include "doctest.h"
#include "hoqtt/interpolation.hpp"
#include "hoqtt/quadrature.hpp"

using namespace hoqtt;

TEST_CASE("gauss-legendre rules") {
  auto& r1 = gauss_legendre(1);
  CHECK(r1.nodes[0] == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
  CHECK(r1.weights[0] == doctest::Approx(2.0).epsilon(1e-15));

  auto& r2 = gauss_legendre(2);
  CHECK(r2.nodes[0] == doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-15));
  CHECK(r2.nodes[1] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-15));
  CHECK(r2.weights[0] == doctest::Approx(1.0).epsilon(1e-15));

  // int_{-1}^{1} x^14 dx = 2/15 with the 8-point rule
  auto& r8 = gauss_legendre(8);
  double s = 0.0;
  for (int i = 0; i < 8; ++i) s += r8.weights[i] * std::pow(r8.nodes[i], 14);
  CHECK(s == doctest::Approx(2.0 / 15.0).epsilon(1e-14));

  CHECK_THROWS_AS(gauss_legendre(0), std::invalid_argument);
  CHECK_THROWS_AS(gauss_legendre(65), std::invalid_argument);
}

TEST_CASE("gauss rules are exact to degree 2n-1") {
  for (int n = 1; n <= 16; ++n) {
    auto& r = gauss_legendre(n);
    double wsum = 0.0;
    for (double w : r.weights) {
      CHECK(w > 0.0);
      wsum += w;
    }
    CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
    for (int deg = 0; deg <= 2 * n - 1; ++deg) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += r.weights[i] * std::pow(r.nodes[i], deg);
      double exact = (deg % 2 == 0) ? 2.0 / (deg + 1) : 0.0;
      CAPTURE(n);
      CAPTURE(deg);
      CHECK(s == doctest::Approx(exact).epsilon(1e-13).scale(1.0));
    }
  }
}

TEST_CASE("composite integration") {
  auto one = [](double) { return 1.0; };
  CHECK(composite_integrate(one, -2.0, 3.5, 7, 4) == doctest::Approx(5.5).epsilon(1e-14));

  // frozen: 2 sin(100)/100 = -0.010127312822195176
  auto osc = [](double x) { return std::cos(100.0 * x); };
  CHECK(composite_integrate(osc, -1.0, 1.0, 100, 8) ==
        doctest::Approx(-0.010127312822195176).epsilon(1e-12).scale(1.0));

  auto lin = [](double x) { return x; };
  CHECK(composite_integrate(lin, 0.0, 1.0, 1, 2) == doctest::Approx(0.5).epsilon(1e-15));

  auto bad = [](double x) { return 1.0 / x; };
  CHECK_THROWS_WITH_AS(composite_integrate(bad, -1.0, 1.0, 1, 1),
                       doctest::Contains("non-finite"), std::runtime_error);
  CHECK_THROWS_AS(composite_integrate(one, 1.0, 0.0, 1, 2), std::invalid_argument);
}

TEST_CASE("oscillatory entries for phase oscillators") {
  OscillatorSpec g_x(OscKind::Phase, "x");
  auto t0 = [](double) { return 1.0; };
  QuadratureConfig cfg = QuadratureConfig::defaults_1d();

  auto r = oscillatory_entry(t0, g_x, 0.0, Part::Real, cfg);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-14));
  CHECK_FALSE(r.flagged);

  for (double w : {0.0, 3.7, 41.0}) {
    auto im = oscillatory_entry(t0, g_x, w, Part::Imag, cfg);
    CHECK(im.value == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  }

  // frozen Fresnel-type oracle: int_{-1}^{1} cos(10 x^2) dx (mpmath)
  OscillatorSpec g_x2(OscKind::Phase, "x^2");
  auto fr = oscillatory_entry(t0, g_x2, 10.0, Part::Real, cfg);
  CHECK(fr.value == doctest::Approx(0.34636623238443649).epsilon(1e-12));
  CHECK(fr.validation_delta < 1e-12);
}

TEST_CASE("refinement consistency at large omega") {
  OscillatorSpec g_x2(OscKind::Phase, "x^2");
  auto t2 = [](double x) { return chebyshev_t(2, x); };
  QuadratureConfig cfg = QuadratureConfig::defaults_1d();
  for (double w : {500.0, 1234.5, 2000.0}) {
    int m = cfg.subintervals_for(w);
    double a = composite_integrate(
        [&](double x) { return t2(x) * std::cos(w * x * x); }, -1.0, 1.0, m, 8);
    double b = composite_integrate(
        [&](double x) { return t2(x) * std::cos(w * x * x); }, -1.0, 1.0, 2 * m, 8);
    CAPTURE(w);
    CHECK(std::fabs(a - b) < 1e-10);
  }
}

TEST_CASE("parity-forced zeros vanish") {
  QuadratureConfig cfg = QuadratureConfig::defaults_1d();
  OscillatorSpec g_odd(OscKind::Phase, "x");
  OscillatorSpec g_even(OscKind::Phase, "x^2");
  auto t1 = [](double x) { return x; };
  auto t2 = [](double x) { return chebyshev_t(2, x); };
  for (double w : {1.0, 17.0, 63.5}) {
    // odd k, even g: both parts vanish
    CHECK(oscillatory_entry(t1, g_even, w, Part::Real, cfg).value ==
          doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(oscillatory_entry(t1, g_even, w, Part::Imag, cfg).value ==
          doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    // odd k, odd g: real part vanishes; even k, odd g: imaginary part vanishes
    CHECK(oscillatory_entry(t1, g_odd, w, Part::Real, cfg).value ==
          doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(oscillatory_entry(t2, g_odd, w, Part::Imag, cfg).value ==
          doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  }
}

TEST_CASE("kernel oscillator entries") {
  OscillatorSpec bessel(OscKind::Kernel, "besselj(11,w*x)");
  auto t0 = [](double) { return 1.0; };
  QuadratureConfig cfg = QuadratureConfig::defaults_1d();
  auto r = oscillatory_entry(t0, bessel, 0.0, Part::Real, cfg);
  CHECK(r.value == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(oscillatory_entry(t0, bessel, 1.0, Part::Imag, cfg),
                  std::invalid_argument);

  // J_11(w x) is odd in x, so against T_0 everything cancels
  auto odd = oscillatory_entry(t0, bessel, 30.0, Part::Real, cfg);
  CHECK(odd.value == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("tensorized integration") {
  QuadratureConfig cfg = QuadratureConfig::defaults_multi();
  auto one = [](std::span<const double>) { return 1.0; };
  CHECK(tensorized_integrate(one, 2, 1.0, cfg) == doctest::Approx(4.0).epsilon(1e-13));
  CHECK(tensorized_integrate(one, 3, 1.0, cfg) == doctest::Approx(8.0).epsilon(1e-13));

  // frozen: (2 sin 5 / 5)^2 = 0.14712572232611620 (mpmath)
  auto cossum = [](std::span<const double> y) { return std::cos(5.0 * (y[0] + y[1])); };
  CHECK(tensorized_integrate(cossum, 2, 5.0, cfg) ==
        doctest::Approx(0.14712572232611620).epsilon(1e-11));

  auto oddprod = [](std::span<const double> y) { return y[0] * y[1]; };
  CHECK(tensorized_integrate(oddprod, 2, 2.0, cfg) ==
        doctest::Approx(0.0).scale(1.0).epsilon(1e-14));

  CHECK_THROWS_WITH_AS(tensorized_integrate(one, 3, 1e9, cfg),
                       doctest::Contains("budget"), std::runtime_error);
  CHECK_THROWS_AS(tensorized_integrate(one, 4, 1.0, cfg), std::invalid_argument);
}

TEST_CASE("paper preset fixes the subinterval count") {
  QuadratureConfig cfg = QuadratureConfig::paper_preset(500.0);
  CHECK(cfg.subintervals_for(1.0) == 500);
  CHECK(cfg.subintervals_for(499.0) == 500);
  QuadratureConfig d1 = QuadratureConfig::defaults_1d();
  CHECK(d1.subintervals_for(0.0) == 1);
  CHECK(d1.subintervals_for(12.3) == 13);
  d1.min_subintervals = 4;
  CHECK(d1.subintervals_for(0.0) == 4);
  CHECK(d1.subintervals_for(12.3) == 13);
}
