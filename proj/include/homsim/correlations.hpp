#pragma once

// Expectation values and figures of merit of a single twin-beam source,
// assembled in closed form from the flux kernel A and the pair kernel C.

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "homsim/errors.hpp"
#include "homsim/kernels.hpp"

namespace homsim {

inline double mean_flux(const KernelSet& ks) { return ks.mean_flux(); }

namespace detail {

inline void require_flux(const KernelSet& ks, const char* what) {
  if (!(ks.mean_flux() > 0.0))
    throw std::domain_error(std::string(what) + ": undefined for a zero-flux source");
}

// Trapezoid plan for time integrals of kernel-squared quantities. The step
// is the Nyquist spacing for the doubled spectral support, which makes the
// trapezoid rule spectrally accurate; the window covers the kernel decay.
struct IntegrationPlan {
  double step;
  double half_width;
  int steps_per_side;
};

inline IntegrationPlan integration_plan(const KernelSet& ks, const char* what) {
  const double decay = ks.decay_time();
  if (!std::isfinite(decay))
    throw decay_error(std::string(what) +
                      ": kernel does not decay (effectively monochromatic source), the time "
                      "integral diverges with the window");
  const double nu_max = ks.source().grid().half_span();
  const double step = std::numbers::pi / (2.0 * nu_max);
  const double half_width = std::min(40.0 * decay, 0.85 * ks.tau_window());
  const double edge = std::abs(ks.eval_a(half_width)) / ks.mean_flux();
  if (edge > 1e-6)
    throw decay_error(std::string(what) + ": kernel has not decayed at the integration window (" +
                      std::to_string(edge) + " of peak); widen the frequency grid");
  return {step, half_width, static_cast<int>(std::ceil(half_width / step))};
}

// Integrates f over [-half_width, half_width] by the trapezoid rule,
// exploiting f(-tau) = conj-symmetry of |.|^2 integrands (f real, even).
template <class F>
double integrate_even(const IntegrationPlan& plan, F&& f) {
  double sum = 0.5 * f(0.0);
  for (int i = 1; i < plan.steps_per_side; ++i) sum += f(i * plan.step);
  sum += 0.5 * f(plan.steps_per_side * plan.step);
  return 2.0 * sum * plan.step;
}

}  // namespace detail

// Normalized first-order coherence A(tau)/N.
inline std::complex<double> g1(const KernelSet& ks, double tau) {
  detail::require_flux(ks, "g1");
  return ks.eval_a(tau) / ks.mean_flux();
}

// Coherence time, evaluated in the frequency domain as
// (1/2pi N^2) int |alpha|^4 dnu.
inline double coherence_time(const KernelSet& ks) {
  detail::require_flux(ks, "coherence_time");
  detail::integration_plan(ks, "coherence_time");  // rejects non-decaying kernels
  const auto& src = ks.source();
  const double quad = src.grid().spacing() / (2.0 * std::numbers::pi);
  double sum = 0.0;
  for (int k = 0; k < src.grid().count(); ++k) {
    const double a2 = std::norm(src.alpha(k));
    sum += src.weight(k) * a2 * a2;
  }
  return quad * sum / (ks.mean_flux() * ks.mean_flux());
}

// Time-domain route to the coherence time, int |g1(tau)|^2 dtau. Agrees with
// coherence_time() to quadrature accuracy; kept as an independent cross-check.
inline double coherence_time_timedomain(const KernelSet& ks) {
  detail::require_flux(ks, "coherence_time");
  const auto plan = detail::integration_plan(ks, "coherence_time");
  const double n = ks.mean_flux();
  return detail::integrate_even(plan, [&](double tau) {
    const double g = std::abs(ks.eval_a(tau)) / n;
    return g * g;
  });
}

// 1 + |A(tau)|^2 / N^2; the marginal beams are thermal, so g2_marginal(0) = 2.
inline double g2_marginal(const KernelSet& ks, double tau) {
  detail::require_flux(ks, "g2_marginal");
  const double n = ks.mean_flux();
  return 1.0 + std::norm(ks.eval_a(tau)) / (n * n);
}

// 1 + |C(tau)|^2 / N^2; the signal-idler coincidences-to-accidentals ratio.
inline double g2_cross(const KernelSet& ks, double tau) {
  detail::require_flux(ks, "g2_cross");
  const double n = ks.mean_flux();
  return 1.0 + std::norm(ks.eval_c(tau)) / (n * n);
}

// int (g2_cross(tau) - 1) dtau, by time-domain quadrature. Equals
// 1/N + coherence_time for any decaying kernel.
inline double integrated_cross_excess(const KernelSet& ks) {
  detail::require_flux(ks, "integrated_cross_excess");
  const auto plan = detail::integration_plan(ks, "integrated_cross_excess");
  const double n = ks.mean_flux();
  return detail::integrate_even(plan,
                                [&](double tau) { return std::norm(ks.eval_c(tau)) / (n * n); });
}

// <a_i^dag(t) a_s^dag(t') a_s(t'') a_i(t)> = N A(t'-t'') + C*(t'-t) C(t''-t).
// Reduces to the plain cross-correlation moment N^2 + |C(t'-t)|^2 at t' = t''.
inline std::complex<double> cross_two_time(const KernelSet& ks, double t, double tp, double tpp) {
  return ks.mean_flux() * ks.eval_a(tp - tpp) + std::conj(ks.eval_c(tp - t)) * ks.eval_c(tpp - t);
}

// <a_i^dag(t) a_s^dag(t') a_s^dag(t'') a_s(t'') a_s(t') a_i(t)>, the
// multiphoton coincidence moment, in kernel-factorized form. Real, >= 0 and
// symmetric under t' <-> t''.
inline double multiphoton_six(const KernelSet& ks, double t, double tp, double tpp) {
  const double n = ks.mean_flux();
  const auto c1 = ks.eval_c(tp - t);
  const auto c2 = ks.eval_c(tpp - t);
  const auto a12 = ks.eval_a(tp - tpp);
  return 2.0 * std::real(c2 * a12 * std::conj(c1)) + n * (std::norm(c1) + std::norm(c2)) +
         n * n * n + n * std::norm(a12);
}

}  // namespace homsim
