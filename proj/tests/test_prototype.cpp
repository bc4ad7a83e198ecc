#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "hoqtt/prototype_table.hpp"

using namespace hoqtt;

namespace {

CrossConfig quick_cross(double tol = 1e-10) {
  CrossConfig cfg;
  cfg.tolerance = tol;
  cfg.max_rank = 12;
  return cfg;
}

std::filesystem::path temp_file(const char* tag) {
  return std::filesystem::temp_directory_path() /
         (std::string("hoqtt_test_") + tag + ".qttp");
}

}  // namespace

TEST_CASE("frequency grid") {
  FrequencyGrid g(0.0, 3.0, 2);  // 4 points, h = 1
  CHECK(g.point_count() == 4);
  CHECK(g.spacing() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(g.omega_at(2) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK_THROWS_AS(g.omega_at(4), std::out_of_range);
  CHECK_THROWS_AS(FrequencyGrid(1.0, 1.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(FrequencyGrid(0.0, 1.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(FrequencyGrid(0.0, 1.0, 64), std::invalid_argument);

  // rounding budget: h < 2 ln(eps_r/2 + 1)
  CHECK_NOTHROW(FrequencyGrid(0.0, 100.0, 20, 1e-3));
  CHECK_THROWS_AS(FrequencyGrid(0.0, 100.0, 20, 1e-5), std::invalid_argument);
  CHECK_NOTHROW(FrequencyGrid::check_rounding_budget(1e-7, 1e-6));
  CHECK_THROWS_AS(FrequencyGrid::check_rounding_budget(1e-5, 1e-6),
                  std::invalid_argument);
}

TEST_CASE("parity zero classification") {
  OscillatorSpec even(OscKind::Phase, "x^2");
  OscillatorSpec odd(OscKind::Phase, "x");
  OscillatorSpec none(OscKind::Phase, "0.5*x^2+0.25*x");
  BasisSpec cheb{BasisKind::Chebyshev, 11, 1};

  for (std::uint32_t k = 0; k <= 11; ++k) {
    bool k_odd = k % 2 == 1;
    CHECK(parity_zero(even, cheb, k, Part::Real) == k_odd);
    CHECK(parity_zero(even, cheb, k, Part::Imag) == k_odd);
    CHECK(parity_zero(odd, cheb, k, Part::Real) == k_odd);
    CHECK(parity_zero(odd, cheb, k, Part::Imag) == !k_odd);
    CHECK_FALSE(parity_zero(none, cheb, k, Part::Real));
    CHECK_FALSE(parity_zero(none, cheb, k, Part::Imag));
  }
  BasisSpec lagr{BasisKind::Lagrange, 4, 1};
  CHECK_FALSE(parity_zero(even, lagr, 1, Part::Real));
}

TEST_CASE("precompute_prototype parity shortcuts") {
  FrequencyGrid grid(0.0, 10.0, 8);
  QuadratureConfig quad = QuadratureConfig::defaults_1d();

  TableEntry zero_r = precompute_prototype(OscillatorSpec(OscKind::Phase, "x^2"),
                                           BasisSpec{BasisKind::Chebyshev, 4, 1}, 1,
                                           Part::Real, grid, quick_cross(), quad);
  CHECK(zero_r.is_zero());
  CHECK_FALSE(zero_r.tensor.has_value());

  TableEntry zero_i = precompute_prototype(OscillatorSpec(OscKind::Phase, "x"),
                                           BasisSpec{BasisKind::Chebyshev, 4, 1}, 0,
                                           Part::Imag, grid, quick_cross(), quad);
  CHECK(zero_i.is_zero());
}

TEST_CASE("precompute_prototype matches the analytic antiderivative") {
  // g = x, T_0: I_R(w) = 2 sin(w)/w
  FrequencyGrid grid(0.0, 100.0, 20);
  QuadratureConfig quad = QuadratureConfig::defaults_1d();
  TableEntry e = precompute_prototype(OscillatorSpec(OscKind::Phase, "x"),
                                      BasisSpec{BasisKind::Chebyshev, 0, 1}, 0,
                                      Part::Real, grid, quick_cross(1e-11), quad);
  REQUIRE(e.tensor.has_value());
  CHECK(e.status == TableEntry::Status::Tensor);
  CHECK(e.report.converged);

  auto value_at = [&](double w_target) {
    std::uint64_t idx = static_cast<std::uint64_t>(
        std::llround((w_target - grid.omega_min()) / grid.spacing()));
    double w = grid.omega_at(idx);
    double expect = w == 0.0 ? 2.0 : 2.0 * std::sin(w) / w;
    return std::fabs(e.tensor->evaluate(fold_index(idx, grid.level(), 2)) - expect);
  };
  CHECK(value_at(50.0) < 1e-10);
  CHECK(value_at(0.0) < 1e-10);
  CHECK(value_at(99.5) < 1e-10);
}

TEST_CASE("precompute_table bookkeeping") {
  QuadratureConfig quad = QuadratureConfig::defaults_1d();

  // N=0, g=x: one tensor (R) and one parity ZERO (I)
  {
    FrequencyGrid grid(0.0, 10.0, 10);
    PrototypeTable t =
        precompute_table(OscillatorSpec(OscKind::Phase, "x"),
                         BasisSpec{BasisKind::Chebyshev, 0, 1}, grid,
                         quick_cross(), quad);
    CHECK(t.entry_count() == 2);
    CHECK(t.zero_count() == 1);
    CHECK(t.complete());
    CHECK_FALSE(t.entry(0, Part::Real).is_zero());
    CHECK(t.entry(0, Part::Imag).is_zero());
  }

  // mixed-parity oscillator: nothing is zero
  {
    FrequencyGrid grid(0.0, 8.0, 8);
    PrototypeTable t =
        precompute_table(OscillatorSpec(OscKind::Phase, "0.5*x^2+0.25*x"),
                         BasisSpec{BasisKind::Chebyshev, 4, 1}, grid,
                         quick_cross(), quad);
    CHECK(t.entry_count() == 10);
    CHECK(t.zero_count() == 0);
  }

  // d=2 Lagrange: (N+1)^2 indices, two parts each
  {
    FrequencyGrid grid(0.0, 3.0, 8);
    PrototypeTable t = precompute_table(
        OscillatorSpec(OscKind::Phase, "x1+x2"),
        BasisSpec{BasisKind::LagrangeMulti, 1, 2}, grid, quick_cross(),
        QuadratureConfig::defaults_multi());
    CHECK(t.entry_count() == 8);
    CHECK(t.zero_count() == 0);
    CHECK(t.complete());
  }
}

TEST_CASE("table build is independent of the parallelism degree") {
  FrequencyGrid grid(0.0, 12.0, 10);
  QuadratureConfig quad = QuadratureConfig::defaults_1d();
  OscillatorSpec g(OscKind::Phase, "0.5*x^2+0.25*x");
  BasisSpec basis{BasisKind::Chebyshev, 3, 1};
  PrototypeTable a = precompute_table(g, basis, grid, quick_cross(), quad, 1);
  PrototypeTable b = precompute_table(g, basis, grid, quick_cross(), quad, 8);
  REQUIRE(a.entry_count() == b.entry_count());
  for (const auto& [key, ea] : a.raw_entries()) {
    const TableEntry& eb = b.entry(key.first, key.second == 0 ? Part::Real : Part::Imag);
    REQUIRE(ea.status == eb.status);
    if (!ea.tensor) continue;
    REQUIRE(ea.tensor->ranks() == eb.tensor->ranks());
    for (int nu = 0; nu < ea.tensor->length(); ++nu)
      REQUIRE(ea.tensor->cores()[nu].data == eb.tensor->cores()[nu].data);
  }
}

TEST_CASE("entry fidelity against fresh quadrature") {
  FrequencyGrid grid(0.0, 20.0, 12);
  QuadratureConfig quad = QuadratureConfig::defaults_1d();
  OscillatorSpec g(OscKind::Phase, "sin(x+1)");
  BasisSpec basis{BasisKind::Chebyshev, 2, 1};
  double eps = 1e-10;
  PrototypeTable t = precompute_table(g, basis, grid, quick_cross(eps), quad);

  std::mt19937_64 rng(99);
  for (std::uint32_t k = 0; k <= 2; ++k) {
    for (Part p : {Part::Real, Part::Imag}) {
      const TableEntry& e = t.entry(k, p);
      REQUIRE(e.tensor.has_value());
      auto basis_fn = basis_function(basis, k);
      for (int s = 0; s < 50; ++s) {
        std::uint64_t idx = rng() % grid.point_count();
        double w = grid.omega_at(idx);
        auto ref = oscillatory_entry(basis_fn, g, w, p, quad);
        double got = e.tensor->evaluate(fold_index(idx, grid.level(), 2));
        CHECK(std::fabs(got - ref.value) <= std::max(10.0 * eps, 1e-9));
      }
    }
  }
}

TEST_CASE("zero entries really integrate to zero") {
  FrequencyGrid grid(0.0, 10.0, 8);
  QuadratureConfig quad = QuadratureConfig::defaults_1d();
  OscillatorSpec g(OscKind::Phase, "x^2");
  BasisSpec basis{BasisKind::Chebyshev, 5, 1};
  PrototypeTable t = precompute_table(g, basis, grid, quick_cross(), quad);

  std::mt19937_64 rng(7);
  for (std::uint32_t k : {1u, 3u, 5u}) {
    for (Part p : {Part::Real, Part::Imag}) {
      CHECK(t.entry(k, p).is_zero());
      auto basis_fn = basis_function(basis, k);
      for (int s = 0; s < 20; ++s) {
        double w = 10.0 * static_cast<double>(rng() >> 11) / 9007199254740992.0;
        auto r = oscillatory_entry(basis_fn, g, w, p, quad);
        CHECK(std::fabs(r.value) <= 1e-10);
      }
    }
  }
}

TEST_CASE("save and load round trip bitwise") {
  FrequencyGrid grid(0.0, 15.0, 10);
  QuadratureConfig quad = QuadratureConfig::defaults_1d();
  OscillatorSpec g(OscKind::Phase, "0.5*x^2+0.25*x");
  BasisSpec basis{BasisKind::Chebyshev, 3, 1};
  PrototypeTable t = precompute_table(g, basis, grid, quick_cross(), quad);

  auto path = temp_file("roundtrip");
  save_table(t, path);
  PrototypeTable loaded = load_table(path);

  CHECK(loaded.grid() == t.grid());
  CHECK(loaded.basis().kind == t.basis().kind);
  CHECK(loaded.basis().degree == t.basis().degree);
  CHECK(loaded.oscillator().text() == t.oscillator().text());
  CHECK(loaded.eps_cross() == t.eps_cross());
  CHECK(loaded.tool_version() == t.tool_version());
  REQUIRE(loaded.entry_count() == t.entry_count());
  for (const auto& [key, ea] : t.raw_entries()) {
    const TableEntry& eb =
        loaded.entry(key.first, key.second == 0 ? Part::Real : Part::Imag);
    REQUIRE(ea.status == eb.status);
    REQUIRE(ea.tensor.has_value() == eb.tensor.has_value());
    if (!ea.tensor) continue;
    REQUIRE(ea.tensor->ranks() == eb.tensor->ranks());
    for (int nu = 0; nu < ea.tensor->length(); ++nu) {
      const auto& da = ea.tensor->cores()[nu].data;
      const auto& db = eb.tensor->cores()[nu].data;
      REQUIRE(da.size() == db.size());
      for (std::size_t i = 0; i < da.size(); ++i)
        REQUIRE(std::memcmp(&da[i], &db[i], sizeof(double)) == 0);
    }
    CHECK(ea.report.oracle_calls == eb.report.oracle_calls);
    CHECK(ea.report.validation_error == eb.report.validation_error);
  }

  // a second save of the loaded table is byte-identical
  auto path2 = temp_file("roundtrip2");
  save_table(loaded, path2);
  std::ifstream f1(path, std::ios::binary), f2(path2, std::ios::binary);
  std::vector<char> b1((std::istreambuf_iterator<char>(f1)), {});
  std::vector<char> b2((std::istreambuf_iterator<char>(f2)), {});
  CHECK(b1 == b2);
  std::filesystem::remove(path);
  std::filesystem::remove(path2);
}

TEST_CASE("load rejects corrupted files") {
  FrequencyGrid grid(0.0, 5.0, 8);
  PrototypeTable t = precompute_table(
      OscillatorSpec(OscKind::Phase, "x"), BasisSpec{BasisKind::Chebyshev, 1, 1},
      grid, quick_cross(), QuadratureConfig::defaults_1d());
  auto path = temp_file("corrupt");
  save_table(t, path);

  // flip one byte inside the last entry payload
  {
    std::fstream f(path, std::ios::binary | std::ios::in | std::ios::out);
    f.seekg(0, std::ios::end);
    auto size = static_cast<std::streamoff>(f.tellg());
    f.seekp(size - 12);
    char c;
    f.seekg(size - 12);
    f.read(&c, 1);
    c ^= 0x5A;
    f.seekp(size - 12);
    f.write(&c, 1);
  }
  CHECK_THROWS_WITH_AS(load_table(path), doctest::Contains("checksum"),
                       std::runtime_error);

  // empty file: magic error
  {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
  }
  CHECK_THROWS_WITH_AS(load_table(path), doctest::Contains("magic"),
                       std::runtime_error);
  std::filesystem::remove(path);
}

TEST_CASE("kernel tables store a single part") {
  FrequencyGrid grid(0.0, 4.0, 8);
  PrototypeTable t = precompute_table(
      OscillatorSpec(OscKind::Kernel, "cos(sin(w*x)+1)"),
      BasisSpec{BasisKind::Chebyshev, 2, 1}, grid, quick_cross(),
      QuadratureConfig::defaults_1d());
  CHECK(t.parts() == std::vector<Part>{Part::Real});
  CHECK(t.entry_count() == 3);
  CHECK(t.complete());
}
