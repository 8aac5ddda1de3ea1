#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "homsim/hom.hpp"
#include "test_helpers.hpp"

using namespace homsim;
using Catch::Approx;

namespace {

KernelSet telecom_kernels(double g2_target) {
  const double flux = flux_for_target_g2(1550.0, 0.5, g2_target);
  const GaussianSourceParams p{1550.0, 0.5, flux};
  const double delta = wavelength_to_detuning_width(p);
  return build_kernels(gaussian_amplitude(p, default_grid(delta)), EvalMethod::fast);
}

ReductionConfig small_grid() {
  ReductionConfig red;
  red.dt = {-2.0, 2.0, 1.0};
  return red;
}

}  // namespace

TEST_CASE("setup and reduction validation") {
  OpticalSetup bad;
  bad.transmittance = 1.2;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.transmittance = 0.5;
  bad.eta3 = -0.1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  CHECK_NOTHROW(OpticalSetup{}.validate());

  ReductionConfig red;
  red.mode = ReductionMode::windowed;
  CHECK_THROWS_AS(red.validate(), std::invalid_argument);  // missing window width
  red.window_half_width = 1.0;
  red.quad_points = 4;
  CHECK_THROWS_AS(red.validate(), std::invalid_argument);
  red.quad_points = 16;
  CHECK_NOTHROW(red.validate());
  red.dt = {2.0, -2.0, 0.5};
  CHECK_THROWS_AS(red.validate(), std::invalid_argument);
}

TEST_CASE("gauss-legendre rule integrates polynomials exactly") {
  std::vector<double> x, w;
  detail::gauss_legendre(8, x, w);
  double s0 = 0.0, s2 = 0.0, s14 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    s0 += w[i];
    s2 += w[i] * x[i] * x[i];
    s14 += w[i] * std::pow(x[i], 14);
  }
  CHECK(s0 == Approx(2.0).epsilon(1e-14));
  CHECK(s2 == Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(s14 == Approx(2.0 / 15.0).epsilon(1e-13));
}

TEST_CASE("coincidence density symmetries") {
  std::mt19937 rng(21);
  const auto ks = build_kernels(test::random_source(rng, true), EvalMethod::fast);
  OpticalSetup setup;
  setup.transmittance = 0.37;
  setup.eta1 = 0.9;
  setup.eta2 = 0.7;
  setup.eta3 = 0.6;
  setup.eta4 = 0.8;

  SECTION("density is real-assembled and non-negative at large delay") {
    const double far = 0.5 * ks.tau_window();
    CHECK(four_fold_density(ks, ks, setup, 0.0, 0.0, 0.0, far) > 0.0);
  }

  SECTION("identical real-spectrum sources give an even dip") {
    // a spectral phase shifts/skews the dip, so use a theta = 0 source here
    std::mt19937 rng2(22);
    const auto ks0 = build_kernels(test::random_source(rng2, false), EvalMethod::fast);
    for (double dt : {0.3, 1.1, 2.7, 5.0}) {
      const double p = four_fold_density(ks0, ks0, setup, 0.0, 0.0, 0.0, dt);
      const double m = four_fold_density(ks0, ks0, setup, 0.0, 0.0, 0.0, -dt);
      REQUIRE(p == Approx(m).epsilon(1e-10));
    }
  }

  SECTION("stationarity in the common time origin") {
    const auto a = four_fold_parts(ks, ks, setup, 0.0, 0.4, -0.2, 1.5);
    const auto b = four_fold_parts(ks, ks, setup, 6.0, 0.4, -0.2, 1.5);
    CHECK(a.total == Approx(b.total).epsilon(1e-10));
    CHECK(a.multiphoton == Approx(b.multiphoton).epsilon(1e-10));
  }

  SECTION("herald-arm efficiencies scale out of the visibility") {
    const auto ks20 = telecom_kernels(20.0);
    auto red = small_grid();
    OpticalSetup ideal;
    const auto v1 = hom_trace(ks20, ks20, ideal, red).visibility.value();
    OpticalSetup lossy_heralds;
    lossy_heralds.eta1 = 0.3;
    lossy_heralds.eta4 = 0.05;
    const auto v2 = hom_trace(ks20, ks20, lossy_heralds, red).visibility.value();
    CHECK(v1 == Approx(v2).margin(1e-10));
  }
}

TEST_CASE("balanced lossless dip visibilities match the closed form") {
  auto red = small_grid();
  OpticalSetup ideal;
  // frozen from V = (P_inf - P_0)/P_inf with x = g2 - 1 and T = 1/2:
  //   P_0 = (4x + 2) / 2, P_inf = (x + 1) / 2 + 1/4 + (1 + x)^2 / 4
  CHECK(hom_trace(telecom_kernels(20.0), telecom_kernels(20.0), ideal, red).visibility.value() ==
        Approx(0.6462585034013606).epsilon(1e-3));
  CHECK(hom_trace(telecom_kernels(80.0), telecom_kernels(80.0), ideal, red).visibility.value() ==
        Approx(0.9030635847509356).epsilon(1e-3));
}

TEST_CASE("without the multiphoton background a balanced dip is perfect") {
  const auto ks = telecom_kernels(20.0);
  auto red = small_grid();
  red.include_multiphoton = false;
  const auto trace = hom_trace(ks, ks, OpticalSetup{}, red);
  CHECK(trace.p_zero == 0.0);
  CHECK(trace.visibility.value() == Approx(1.0).margin(1e-9));
  for (std::size_t i = 0; i < trace.dt.size(); ++i)
    REQUIRE(trace.p_total[i] >= 0.0);
}

TEST_CASE("windowed reduction approaches the pointwise density for small windows") {
  const auto ks = telecom_kernels(20.0);
  OpticalSetup setup;
  setup.transmittance = 0.45;
  ReductionConfig red;
  red.mode = ReductionMode::windowed;
  red.window_half_width = 0.01;
  red.quad_points = 8;
  red.dt = {0.0, 0.0, 1.0};
  const auto windowed = detail::reduced_parts(ks, ks, setup, red, 1.0);
  const double pointwise = four_fold_density(ks, ks, setup, 0.0, 0.0, 0.0, 1.0);
  const double area = 4.0 * red.window_half_width * red.window_half_width;
  CHECK(windowed.total / area == Approx(pointwise).epsilon(1e-4));
}

TEST_CASE("windowed visibility stays close to pointwise for sub-coherence windows") {
  const auto ks = telecom_kernels(20.0);
  auto red = small_grid();
  const double v_point = hom_trace(ks, ks, OpticalSetup{}, red).visibility.value();
  red.mode = ReductionMode::windowed;
  red.window_half_width = 1.0;  // well under the ~10 ps coherence time
  red.quad_points = 12;
  const double v_win = hom_trace(ks, ks, OpticalSetup{}, red).visibility.value();
  CHECK(v_win == Approx(v_point).margin(0.01));
}

TEST_CASE("trace bookkeeping") {
  const auto ks = telecom_kernels(40.0);
  auto red = small_grid();
  const auto trace = hom_trace(ks, ks, OpticalSetup{}, red, 2);
  REQUIRE(trace.dt.size() == 5);
  CHECK(trace.dt.front() == -2.0);
  CHECK(trace.dt.back() == 2.0);
  CHECK(trace.p_zero == Approx(trace.p_total[2]).epsilon(1e-12));
  CHECK(trace.p_infinity > trace.p_zero);

  HomTrace no_zero = trace;
  no_zero.dt = {0.5, 1.5};
  no_zero.p_total = {1.0, 1.0};
  CHECK_THROWS_AS(visibility(no_zero), std::invalid_argument);

  HomTrace dead = trace;
  dead.p_infinity = 0.0;
  CHECK_THROWS_AS(visibility(dead), std::domain_error);
}

TEST_CASE("delay grids beyond the kernel window are rejected") {
  const auto ks = build_kernels(test::gaussian_source(0.1, 0.2, 257), EvalMethod::fast);
  ReductionConfig red;
  red.dt = {-2.0 * ks.tau_window(), 2.0 * ks.tau_window(), ks.tau_window()};
  CHECK_THROWS_AS(hom_trace(ks, ks, OpticalSetup{}, red), window_error);
}

TEST_CASE("flux solver") {
  CHECK_THROWS_AS(flux_for_target_g2(1550.0, 0.5, 1.5), std::invalid_argument);
  for (double target : {13.0, 20.0, 80.0}) {
    const double flux = flux_for_target_g2(1550.0, 0.5, target);
    const GaussianSourceParams p{1550.0, 0.5, flux};
    const double delta = wavelength_to_detuning_width(p);
    const double g2 = cross_g2_zero(gaussian_amplitude(p, default_grid(delta)));
    REQUIRE(g2 == Approx(target).epsilon(2e-4));
  }
  // higher purity demands lower flux
  CHECK(flux_for_target_g2(1550.0, 0.5, 80.0) < flux_for_target_g2(1550.0, 0.5, 20.0));
}

TEST_CASE("visibility sweep is monotone in the cross-correlation") {
  auto red = small_grid();
  const auto sweep = visibility_sweep(1550.0, 0.5, OpticalSetup{}, red, {13.0, 20.0, 40.0, 80.0},
                                      EvalMethod::fast, 2);
  REQUIRE(sweep.size() == 4);
  for (std::size_t i = 1; i < sweep.size(); ++i) {
    REQUIRE(sweep[i].g2_target > sweep[i - 1].g2_target);
    REQUIRE(sweep[i].visibility > sweep[i - 1].visibility);
    REQUIRE(sweep[i].flux < sweep[i - 1].flux);
  }
  CHECK(sweep[0].visibility == Approx(0.4897959183673469).epsilon(2e-3));
  CHECK(sweep[0].visibility < 0.5);
  CHECK(sweep[1].visibility > 0.5);
}
