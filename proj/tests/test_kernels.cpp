#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>

#include "homsim/kernels.hpp"
#include "test_helpers.hpp"

using namespace homsim;
using Catch::Approx;

TEST_CASE("zero source gives vanishing kernels") {
  const auto amp = tabulated_amplitude({-0.2, -0.1, 0.0, 0.1, 0.2}, {0, 0, 0, 0, 0}, {});
  for (auto method : {EvalMethod::direct, EvalMethod::fast}) {
    const auto ks = build_kernels(amp, method);
    CHECK(ks.mean_flux() == 0.0);
    CHECK(std::abs(ks.eval_a(3.0)) == 0.0);
    CHECK(std::abs(ks.eval_c(3.0)) == 0.0);
  }
}

TEST_CASE("single nonzero bin is a pure oscillation") {
  const double r0 = 0.4, spacing = 0.1;
  const auto amp = test::single_bin_source(r0, spacing, 257, 10);
  const double nu0 = 10 * spacing;
  const double expect_mag = spacing / (2.0 * std::numbers::pi) * std::sinh(r0) * std::sinh(r0);
  const auto ks = build_kernels(amp, EvalMethod::direct);
  CHECK(ks.mean_flux() == Approx(expect_mag).epsilon(1e-12));
  for (double tau : {0.0, 1.3, -7.7, 12.0}) {
    const auto a = ks.eval_a(tau);
    CHECK(std::abs(a) == Approx(expect_mag).epsilon(1e-12));
    CHECK(std::arg(a * std::polar(1.0, nu0 * tau)) == Approx(0.0).margin(1e-12));
  }
}

TEST_CASE("gaussian low-gain flux kernel is gaussian in time") {
  const double delta = 0.1664751654799276;
  const auto ks = build_kernels(test::gaussian_source(0.001, delta, 4097), EvalMethod::fast);
  for (double tau : {0.0, 0.5, 1.0, 3.0, 7.0, 12.0}) {
    const double expect = std::exp(-delta * delta * tau * tau / 2.0);
    CHECK(std::abs(ks.eval_a(tau)) / ks.mean_flux() == Approx(expect).margin(1e-6));
  }
}

TEST_CASE("kernel structural invariants") {
  std::mt19937 rng(77);
  const auto amp = test::random_source(rng, false, 1025);
  const auto ks = build_kernels(amp, EvalMethod::fast);

  SECTION("A(0) equals the trapezoid quadrature of |alpha|^2") {
    double sum = 0.0;
    for (int k = 0; k < amp.grid().count(); ++k)
      sum += amp.weight(k) * std::norm(amp.alpha(k));
    sum *= amp.grid().spacing() / (2.0 * std::numbers::pi);
    CHECK(ks.mean_flux() == Approx(sum).epsilon(1e-12));
    CHECK(std::real(ks.eval_a(0.0)) == Approx(ks.mean_flux()).epsilon(1e-12));
    CHECK(std::imag(ks.eval_a(0.0)) == Approx(0.0).margin(1e-15));
  }

  SECTION("Hermitian symmetry and boundedness") {
    std::uniform_real_distribution<double> taus(-30.0, 30.0);
    for (int i = 0; i < 200; ++i) {
      const double tau = taus(rng);
      const auto a = ks.eval_a(tau);
      const auto am = ks.eval_a(-tau);
      REQUIRE(std::abs(am - std::conj(a)) < 1e-12 * ks.mean_flux());
      REQUIRE(std::abs(a) <= ks.mean_flux() * (1.0 + 1e-12));
      // theta = 0 source: the pair kernel is Hermitian too
      REQUIRE(std::abs(ks.eval_c(-tau) - std::conj(ks.eval_c(tau))) <
              1e-12 * std::abs(ks.eval_c(0.0)));
    }
  }

  SECTION("pair kernel has decayed at the tau-window edge") {
    CHECK(std::abs(ks.eval_c(ks.tau_window())) < 1e-6 * std::abs(ks.eval_c(0.0)));
  }
}

TEST_CASE("direct quadrature and fast transform agree") {
  std::mt19937 rng(4242);
  for (int draw = 0; draw < 4; ++draw) {
    const auto amp = test::random_source(rng, draw % 2 == 1, 1025);
    const auto direct = build_kernels(amp, EvalMethod::direct);
    const auto fast = build_kernels(amp, EvalMethod::fast);
    const double scale_a = direct.mean_flux();
    const double scale_c = std::abs(direct.eval_c(0.0));
    std::uniform_real_distribution<double> taus(-0.5 * direct.tau_window(),
                                                0.5 * direct.tau_window());
    for (int i = 0; i < 100; ++i) {
      const double tau = taus(rng);
      REQUIRE(std::abs(direct.eval_a(tau) - fast.eval_a(tau)) < 1e-9 * scale_a);
      REQUIRE(std::abs(direct.eval_c(tau) - fast.eval_c(tau)) < 1e-9 * scale_c);
    }
  }
}

TEST_CASE("evaluation outside the resolvable window is an error") {
  const auto ks = build_kernels(test::gaussian_source(0.1, 0.2, 257), EvalMethod::fast);
  CHECK_NOTHROW(ks.eval_a(0.99 * ks.tau_window()));
  CHECK_THROWS_AS(ks.eval_a(1.01 * ks.tau_window()), window_error);
  CHECK_THROWS_AS(ks.eval_c(-1.01 * ks.tau_window()), window_error);
}
