#pragma once

// Time-domain kernels of a twin-beam source:
//
//   A(tau) = (1/2pi) int |alpha(nu)|^2          e^{-i nu tau} dnu   (flux kernel)
//   C(tau) = (1/2pi) int  alpha(nu) beta(nu)    e^{-i nu tau} dnu   (pair kernel)
//
// Every expectation value downstream is assembled from these two functions.
// Two evaluation methods ship: direct trapezoid quadrature (the reference)
// and a zero-padded FFT with band-limited interpolation (the default).

#include <fftw3.h>

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <mutex>
#include <numbers>
#include <vector>

#include "homsim/errors.hpp"
#include "homsim/spectral.hpp"

namespace homsim {

enum class EvalMethod { direct, fast };

namespace detail {

// Forward complex FFT in place. The FFTW planner is serialized; execution is
// concurrent-safe.
inline void fft_forward(std::vector<std::complex<double>>& x) {
  static std::mutex planner_mutex;
  auto* data = reinterpret_cast<fftw_complex*>(x.data());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex);
    plan = fftw_plan_dft_1d(static_cast<int>(x.size()), data, data, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(planner_mutex);
    fftw_destroy_plan(plan);
  }
}

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace detail

class KernelSet {
 public:
  // Oversampling of the fast-transform tau grid relative to the spectral
  // Nyquist spacing; 8x keeps the interpolation error well below 1e-10.
  static constexpr std::size_t pad_factor = 8;
  // Number of points of the band-limited (barycentric Lagrange) interpolant.
  static constexpr int interp_points = 10;
  // Fraction of the half-period accepted as the resolvable tau window.
  static constexpr double window_safety = 0.9;

  KernelSet(SpectralAmplitude source, EvalMethod method)
      : source_(std::move(source)), method_(method) {
    const auto& g = source_.grid();
    const int m = g.count();
    const double dnu = g.spacing();
    const double quad = dnu / (2.0 * std::numbers::pi);

    // A(0), spectral moments and the decay scale of |alpha|^2.
    double total = 0.0, mean = 0.0, sq = 0.0;
    for (int k = 0; k < m; ++k) {
      const double w = source_.weight(k) * std::norm(source_.alpha(k));
      total += w;
      mean += w * g.detuning(k);
      sq += w * g.detuning(k) * g.detuning(k);
    }
    mean_flux_ = quad * total;
    if (total > 0.0) {
      mean /= total;
      const double var = sq / total - mean * mean;
      sigma_nu_ = var > 0.0 ? std::sqrt(var) : 0.0;
    }

    if (method_ == EvalMethod::fast) {
      const std::size_t npad = detail::next_pow2(pad_factor * static_cast<std::size_t>(m));
      a_samples_.assign(npad, {0.0, 0.0});
      c_samples_.assign(npad, {0.0, 0.0});
      for (int k = 0; k < m; ++k) {
        const double w = quad * source_.weight(k);
        a_samples_[static_cast<std::size_t>(k)] = w * std::norm(source_.alpha(k));
        c_samples_[static_cast<std::size_t>(k)] = w * source_.alpha(k) * source_.beta(k);
      }
      detail::fft_forward(a_samples_);
      detail::fft_forward(c_samples_);
      // Undo the grid offset: sample j of the input sits at detuning
      // (j - K) dnu, so bin n acquires the phase e^{2 pi i K n / npad}.
      const double kc = (m - 1) / 2;
      for (std::size_t n = 0; n < npad; ++n) {
        const auto phase =
            std::polar(1.0, 2.0 * std::numbers::pi * kc * static_cast<double>(n) /
                                static_cast<double>(npad));
        a_samples_[n] *= phase;
        c_samples_[n] *= phase;
      }
      tau_step_ = 2.0 * std::numbers::pi / (static_cast<double>(npad) * dnu);
    }
  }

  const SpectralAmplitude& source() const { return source_; }
  EvalMethod method() const { return method_; }

  // N = A(0), photons/ps.
  double mean_flux() const { return mean_flux_; }

  // Largest |tau| for which kernel values are resolvable on the grid.
  double tau_window() const {
    return window_safety * std::numbers::pi / source_.grid().spacing();
  }

  // 1/sigma of |alpha|^2; the time scale on which A decays. Infinite for a
  // non-decaying (effectively monochromatic) kernel.
  double decay_time() const {
    return sigma_nu_ > 0.0 ? 1.0 / sigma_nu_ : std::numeric_limits<double>::infinity();
  }

  std::complex<double> eval_a(double tau) const { return eval(tau, Which::flux); }
  std::complex<double> eval_c(double tau) const { return eval(tau, Which::pair); }

 private:
  enum class Which { flux, pair };

  std::complex<double> eval(double tau, Which which) const {
    if (std::abs(tau) > tau_window())
      throw window_error("kernel evaluated outside the resolvable tau window (|tau| > " +
                         std::to_string(tau_window()) + " ps); widen the frequency grid");
    if (method_ == EvalMethod::direct) return eval_direct(tau, which);
    return eval_fast(tau, which);
  }

  std::complex<double> eval_direct(double tau, Which which) const {
    const auto& g = source_.grid();
    const double quad = g.spacing() / (2.0 * std::numbers::pi);
    std::complex<double> sum = 0.0;
    for (int k = 0; k < g.count(); ++k) {
      const std::complex<double> coeff =
          which == Which::flux
              ? std::complex<double>(std::norm(source_.alpha(k)), 0.0)
              : source_.alpha(k) * source_.beta(k);
      sum += source_.weight(k) * coeff * std::polar(1.0, -g.detuning(k) * tau);
    }
    return quad * sum;
  }

  std::complex<double> eval_fast(double tau, Which which) const {
    const auto& samples = which == Which::flux ? a_samples_ : c_samples_;
    const auto npad = static_cast<double>(samples.size());
    double u = tau / tau_step_;
    u -= std::floor(u / npad) * npad;  // periodic index in [0, npad)

    const int i0 = static_cast<int>(std::floor(u));
    const double frac = u - i0;
    // Equispaced barycentric weights (-1)^j C(interp_points-1, j).
    static constexpr std::array<double, interp_points> bary = {
        1.0, -9.0, 36.0, -84.0, 126.0, -126.0, 84.0, -36.0, 9.0, -1.0};
    const int lo = i0 - interp_points / 2 + 1;
    std::complex<double> num = 0.0;
    double den = 0.0;
    for (int j = 0; j < interp_points; ++j) {
      const double x = frac - (lo + j - i0);
      const auto idx = static_cast<std::size_t>(((lo + j) % static_cast<int>(samples.size()) +
                                                 static_cast<int>(samples.size())) %
                                                static_cast<int>(samples.size()));
      if (std::abs(x) < 1e-13) return samples[idx];
      num += bary[static_cast<std::size_t>(j)] / x * samples[idx];
      den += bary[static_cast<std::size_t>(j)] / x;
    }
    return num / den;
  }

  SpectralAmplitude source_;
  EvalMethod method_;
  double mean_flux_ = 0.0;
  double sigma_nu_ = 0.0;
  double tau_step_ = 0.0;
  std::vector<std::complex<double>> a_samples_, c_samples_;
};

inline KernelSet build_kernels(SpectralAmplitude source, EvalMethod method = EvalMethod::fast) {
  return KernelSet(std::move(source), method);
}

}  // namespace homsim
