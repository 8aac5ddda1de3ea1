#pragma once

// Four-fold coincidence assembly for two heralded twin-beam sources behind a
// beam splitter: six-term coincidence density, dip traces, visibilities and
// the flux solver.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "homsim/correlations.hpp"
#include "homsim/kernels.hpp"
#include "homsim/spectral.hpp"

namespace homsim {

// Beam-splitter transmittance and the four path efficiencies of the optical
// arrangement: eta1 idler a, eta2 signal a, eta3 signal b, eta4 idler b.
struct OpticalSetup {
  double transmittance = 0.5;
  double eta1 = 1.0;
  double eta2 = 1.0;
  double eta3 = 1.0;
  double eta4 = 1.0;

  void validate() const {
    auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!in_unit(transmittance))
      throw std::invalid_argument("OpticalSetup: transmittance must lie in [0,1]");
    if (!in_unit(eta1) || !in_unit(eta2) || !in_unit(eta3) || !in_unit(eta4))
      throw std::invalid_argument("OpticalSetup: efficiencies must lie in [0,1]");
  }
};

enum class ReductionMode { pointwise, windowed };

struct DelayGrid {
  double start = -60.0;
  double stop = 60.0;
  double step = 0.5;
};

struct ReductionConfig {
  ReductionMode mode = ReductionMode::pointwise;
  double window_half_width = 0.0;  // ps, windowed mode only
  int quad_points = 16;            // Gauss-Legendre points per axis
  DelayGrid dt;
  bool include_multiphoton = true;

  void validate() const {
    if (mode == ReductionMode::windowed) {
      if (!(window_half_width > 0.0))
        throw std::invalid_argument("ReductionConfig: windowed mode needs window_half_width > 0");
      if (quad_points < 8)
        throw std::invalid_argument("ReductionConfig: windowed mode needs >= 8 quadrature points");
    }
    if (!(dt.step > 0.0) || !(dt.stop >= dt.start))
      throw std::invalid_argument("ReductionConfig: bad delay grid");
  }
};

struct HomTrace {
  std::vector<double> dt;            // ps
  std::vector<double> p_total;       // coincidence density, arbitrary units
  std::vector<double> p_multiphoton; // terms 1-2 (multiphoton background)
  double p_zero = 0.0;
  double p_infinity = 0.0;
  std::optional<double> visibility;  // empty for degenerate setups
};

struct FourFoldParts {
  double total;
  double multiphoton;
};

// Six-term coincidence density at herald times t and t+dt and beam-splitter
// output detections at t+tau1 (port c) and t+dt+tau2 (port d).
inline FourFoldParts four_fold_parts(const KernelSet& ksA, const KernelSet& ksB,
                                     const OpticalSetup& setup, double t, double tau1, double tau2,
                                     double dt, bool include_multiphoton = true) {
  const double T = setup.transmittance;
  const double ta = t, tb = t + dt, tc = t + tau1, td = t + dt + tau2;
  const double e1 = setup.eta1, e2 = setup.eta2, e3 = setup.eta3, e4 = setup.eta4;

  const double m1 =
      e1 * e2 * e2 * e4 * T * (1.0 - T) * multiphoton_six(ksA, ta, tc, td) * ksB.mean_flux();
  const double m2 =
      e1 * e3 * e3 * e4 * T * (1.0 - T) * ksA.mean_flux() * multiphoton_six(ksB, tb, tc, td);

  const double shared = e1 * e2 * e3 * e4;
  const double t3 = shared * T * T * std::real(cross_two_time(ksA, ta, td, td)) *
                    std::real(cross_two_time(ksB, tb, tc, tc));
  const double t4 = shared * (1.0 - T) * (1.0 - T) *
                    std::real(cross_two_time(ksA, ta, tc, tc)) *
                    std::real(cross_two_time(ksB, tb, td, td));
  const double t56 =
      -shared * T * (1.0 - T) * 2.0 *
      std::real(cross_two_time(ksA, ta, tc, td) * cross_two_time(ksB, tb, td, tc));

  const double mp = m1 + m2;
  return {(include_multiphoton ? mp : 0.0) + t3 + t4 + t56, mp};
}

inline double four_fold_density(const KernelSet& ksA, const KernelSet& ksB,
                                const OpticalSetup& setup, double t, double tau1, double tau2,
                                double dt, bool include_multiphoton = true) {
  return four_fold_parts(ksA, ksB, setup, t, tau1, tau2, dt, include_multiphoton).total;
}

namespace detail {

// Gauss-Legendre nodes and weights on [-1,1], by Newton iteration on the
// Legendre recurrence.
inline void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.resize(static_cast<std::size_t>(n));
  weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[static_cast<std::size_t>(i)] = x;
    weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

inline FourFoldParts reduced_parts(const KernelSet& ksA, const KernelSet& ksB,
                                   const OpticalSetup& setup, const ReductionConfig& red,
                                   double dt) {
  if (red.mode == ReductionMode::pointwise)
    return four_fold_parts(ksA, ksB, setup, 0.0, 0.0, 0.0, dt, red.include_multiphoton);
  std::vector<double> x, w;
  gauss_legendre(red.quad_points, x, w);
  const double hw = red.window_half_width;
  FourFoldParts acc{0.0, 0.0};
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) {
      const auto p = four_fold_parts(ksA, ksB, setup, 0.0, hw * x[i], hw * x[j], dt,
                                     red.include_multiphoton);
      acc.total += w[i] * w[j] * p.total;
      acc.multiphoton += w[i] * w[j] * p.multiphoton;
    }
  }
  acc.total *= hw * hw;
  acc.multiphoton *= hw * hw;
  return acc;
}

template <class F>
void parallel_for(int count, unsigned threads, F&& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max(count, 1)));
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      for (int i = static_cast<int>(w); i < count; i += static_cast<int>(threads)) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace detail

// Delay at which the asymptotic coincidence level is evaluated.
inline double asymptotic_delay(const KernelSet& ksA, const KernelSet& ksB,
                               const ReductionConfig& red) {
  const double decay = std::max(ksA.decay_time(), ksB.decay_time());
  const double span = std::max(std::abs(red.dt.start), std::abs(red.dt.stop));
  const double dt_inf = std::max(10.0 * decay, 5.0 * span);
  const double limit = 0.95 * std::min(ksA.tau_window(), ksB.tau_window());
  if (!(dt_inf < limit))
    throw window_error("asymptotic delay exceeds the kernel tau window; widen the frequency grid");
  return dt_inf;
}

inline HomTrace hom_trace(const KernelSet& ksA, const KernelSet& ksB, const OpticalSetup& setup,
                          const ReductionConfig& red, unsigned threads = 1) {
  setup.validate();
  red.validate();
  HomTrace trace;
  const int count = static_cast<int>(std::floor((red.dt.stop - red.dt.start) / red.dt.step + 0.5)) + 1;
  trace.dt.resize(static_cast<std::size_t>(count));
  trace.p_total.resize(static_cast<std::size_t>(count));
  trace.p_multiphoton.resize(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    trace.dt[static_cast<std::size_t>(i)] = red.dt.start + i * red.dt.step;
  const double window = std::min(ksA.tau_window(), ksB.tau_window());
  if (std::abs(trace.dt.front()) > window || std::abs(trace.dt.back()) > window)
    throw window_error("delay grid exceeds the kernel tau window; widen the frequency grid");

  detail::parallel_for(count, threads, [&](int i) {
    const auto p = detail::reduced_parts(ksA, ksB, setup, red, trace.dt[static_cast<std::size_t>(i)]);
    trace.p_total[static_cast<std::size_t>(i)] = p.total;
    trace.p_multiphoton[static_cast<std::size_t>(i)] = p.multiphoton;
  });

  trace.p_zero = detail::reduced_parts(ksA, ksB, setup, red, 0.0).total;
  trace.p_infinity =
      detail::reduced_parts(ksA, ksB, setup, red, asymptotic_delay(ksA, ksB, red)).total;

  // Clamp roundoff residue from the exact cancellation at the dip bottom.
  double scale = std::abs(trace.p_infinity);
  for (double v : trace.p_total) scale = std::max(scale, std::abs(v));
  for (auto& v : trace.p_total)
    if (v < 0.0 && v > -1e-10 * scale) v = 0.0;
  if (trace.p_zero < 0.0 && trace.p_zero > -1e-10 * scale) trace.p_zero = 0.0;

  if (trace.p_infinity > 0.0)
    trace.visibility = (trace.p_infinity - trace.p_zero) / trace.p_infinity;
  return trace;
}

// Visibility from a computed trace; requires a grid point at dt = 0.
inline double visibility(const HomTrace& trace) {
  if (!(trace.p_infinity > 0.0))
    throw std::domain_error("visibility: undefined, asymptotic coincidence level is zero");
  for (std::size_t i = 0; i < trace.dt.size(); ++i)
    if (std::abs(trace.dt[i]) < 1e-12)
      return (trace.p_infinity - trace.p_total[i]) / trace.p_infinity;
  throw std::invalid_argument("visibility: trace has no dt = 0 sample");
}

// g2_cross(0) from the spectrum alone (no kernel build required).
inline double cross_g2_zero(const SpectralAmplitude& src) {
  const double quad = src.grid().spacing() / (2.0 * std::numbers::pi);
  std::complex<double> c0 = 0.0;
  double n = 0.0;
  for (int k = 0; k < src.grid().count(); ++k) {
    c0 += src.weight(k) * src.alpha(k) * src.beta(k);
    n += src.weight(k) * std::norm(src.alpha(k));
  }
  c0 *= quad;
  n *= quad;
  if (!(n > 0.0)) throw std::domain_error("cross_g2_zero: zero-flux source");
  return 1.0 + std::norm(c0) / (n * n);
}

// Solves for the flux parameter F that yields a requested g2_cross(0) for a
// Gaussian source; g2_cross(0) decreases monotonically with F.
inline double flux_for_target_g2(double degeneracy_wavelength_nm, double fwhm_wavelength_nm,
                                 double target_g2, int grid_points = 4097,
                                 double grid_span_sigmas = 8.0) {
  if (!(target_g2 > 2.0))
    throw std::invalid_argument(
        "flux_for_target_g2: target must exceed the single-mode lower bound of 2");
  const GaussianSourceParams probe{degeneracy_wavelength_nm, fwhm_wavelength_nm, 1.0};
  const double delta = wavelength_to_detuning_width(probe);
  const auto grid = default_grid(delta, grid_points, grid_span_sigmas);
  auto g2_at = [&](double flux) {
    return cross_g2_zero(gaussian_amplitude(
        {degeneracy_wavelength_nm, fwhm_wavelength_nm, flux}, grid));
  };
  double lo = 1e-9, hi = 1.0;
  int guard = 0;
  while (g2_at(hi) > target_g2) {
    hi *= 2.0;
    if (++guard > 60) throw std::runtime_error("flux_for_target_g2: target unreachable (too low)");
  }
  guard = 0;
  while (g2_at(lo) < target_g2) {
    lo *= 0.5;
    if (++guard > 60) throw std::runtime_error("flux_for_target_g2: target unreachable (too high)");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = std::sqrt(lo * hi);
    const double g2 = g2_at(mid);
    if (std::abs(g2 - target_g2) < 1e-4 * target_g2) return mid;
    (g2 > target_g2 ? lo : hi) = mid;
  }
  throw std::runtime_error("flux_for_target_g2: bisection failed to converge");
}

struct SweepPoint {
  double g2_target;
  double flux;
  double visibility;
};

// Maps flux_for_target_g2 + hom_trace over a list of g2 targets.
inline std::vector<SweepPoint> visibility_sweep(double degeneracy_wavelength_nm,
                                                double fwhm_wavelength_nm,
                                                const OpticalSetup& setup,
                                                const ReductionConfig& red,
                                                const std::vector<double>& g2_targets,
                                                EvalMethod method = EvalMethod::fast,
                                                unsigned threads = 1) {
  std::vector<SweepPoint> out(g2_targets.size());
  detail::parallel_for(static_cast<int>(g2_targets.size()), threads, [&](int i) {
    const double target = g2_targets[static_cast<std::size_t>(i)];
    const double flux = flux_for_target_g2(degeneracy_wavelength_nm, fwhm_wavelength_nm, target);
    const GaussianSourceParams params{degeneracy_wavelength_nm, fwhm_wavelength_nm, flux};
    const double delta = wavelength_to_detuning_width(params);
    const auto ks = build_kernels(gaussian_amplitude(params, default_grid(delta)), method);
    const auto trace = hom_trace(ks, ks, setup, red);
    out[static_cast<std::size_t>(i)] = {target, flux, trace.visibility.value_or(
                                                          std::numeric_limits<double>::quiet_NaN())};
  });
  return out;
}

}  // namespace homsim
