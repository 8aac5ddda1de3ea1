#pragma once

// Twin-beam source spectra on a discrete detuning grid.
//
// All spectra live in a rotating frame at half the pump frequency: the grid
// stores detunings nu = omega_s - omega_p/2 in rad/ps, times are in ps and
// fluxes in photons/ps. The idler mirror (omega_i = omega_p - omega_s) is
// implicit in the delta-correlated joint amplitude and never stored.

#include <cmath>
#include <complex>
#include <fstream>
#include <istream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "homsim/errors.hpp"

namespace homsim {

inline constexpr double speed_of_light_nm_per_ps = 299792.458;

// Relative level below the peak that the squeezing profile must reach at the
// grid boundary; guards spectral truncation error.
inline constexpr double boundary_decay_limit = 1e-6;

// Uniform, odd-count detuning grid symmetric about zero.
class FrequencyGrid {
 public:
  FrequencyGrid(double spacing, int count) : spacing_(spacing), count_(count) {
    if (!(spacing > 0.0)) throw std::invalid_argument("FrequencyGrid: spacing must be > 0");
    if (count < 3 || count % 2 == 0)
      throw std::invalid_argument("FrequencyGrid: count must be odd and >= 3");
  }

  double spacing() const { return spacing_; }
  int count() const { return count_; }
  // Detuning of grid point k; nu_k = -nu_{count-1-k}.
  double detuning(int k) const { return (k - (count_ - 1) / 2) * spacing_; }
  double half_span() const { return (count_ - 1) / 2 * spacing_; }

  bool operator==(const FrequencyGrid&) const = default;

 private:
  double spacing_;
  int count_;
};

// Squeezing profile r(nu), phase theta(nu) of one twin-beam source, with the
// derived Bogoliubov coefficient samples alpha = sinh(r) e^{i theta} and
// beta = cosh(r).
class SpectralAmplitude {
 public:
  SpectralAmplitude(FrequencyGrid grid, std::vector<double> r, std::vector<double> theta)
      : grid_(grid), r_(std::move(r)), theta_(std::move(theta)) {
    const auto n = static_cast<std::size_t>(grid_.count());
    if (r_.size() != n || theta_.size() != n)
      throw std::invalid_argument("SpectralAmplitude: sample count does not match grid");
    double rmax = 0.0;
    for (double v : r_) {
      if (!(v >= 0.0)) throw std::invalid_argument("SpectralAmplitude: r must be >= 0");
      rmax = std::max(rmax, v);
    }
    if (rmax > 0.0 &&
        (r_.front() >= boundary_decay_limit * rmax || r_.back() >= boundary_decay_limit * rmax))
      throw window_error(
          "SpectralAmplitude: squeezing profile has not decayed at the grid boundary; "
          "widen the detuning grid");
    alpha_.reserve(n);
    beta_.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
      alpha_.push_back(std::polar(std::sinh(r_[k]), theta_[k]));
      beta_.push_back(std::cosh(r_[k]));
    }
  }

  const FrequencyGrid& grid() const { return grid_; }
  const std::vector<double>& r() const { return r_; }
  const std::vector<double>& theta() const { return theta_; }
  std::complex<double> alpha(int k) const { return alpha_[static_cast<std::size_t>(k)]; }
  double beta(int k) const { return beta_[static_cast<std::size_t>(k)]; }

  // Trapezoid weight for grid point k (end points count half).
  double weight(int k) const { return (k == 0 || k == grid_.count() - 1) ? 0.5 : 1.0; }

 private:
  FrequencyGrid grid_;
  std::vector<double> r_, theta_;
  std::vector<std::complex<double>> alpha_;
  std::vector<double> beta_;
};

// Gaussian source description in experimental units. The wavelength FWHM
// refers to the marginal intensity r(nu)^2 in the low-gain limit.
struct GaussianSourceParams {
  double degeneracy_wavelength_nm;
  double fwhm_wavelength_nm;
  double flux;  // photons/ps; the flux scale of the spectral amplitude

  void validate() const {
    if (!(degeneracy_wavelength_nm > 0.0))
      throw std::invalid_argument("GaussianSourceParams: degeneracy wavelength must be > 0");
    if (!(fwhm_wavelength_nm > 0.0))
      throw std::invalid_argument("GaussianSourceParams: wavelength FWHM must be > 0");
    if (!(flux > 0.0)) throw std::invalid_argument("GaussianSourceParams: flux must be > 0");
    if (!(fwhm_wavelength_nm / degeneracy_wavelength_nm < 1e-2))
      throw std::invalid_argument(
          "GaussianSourceParams: FWHM/wavelength ratio violates the narrowband assumption");
  }
};

// Gaussian width parameter Delta (rad/ps) such that the low-gain marginal
// intensity r(nu)^2 ~ exp(-nu^2/(2 Delta^2)) has the requested wavelength
// FWHM. The angular-frequency FWHM is 2 pi c dl / l0^2.
inline double wavelength_to_detuning_width(const GaussianSourceParams& params) {
  params.validate();
  const double fwhm_angular = 2.0 * std::numbers::pi * speed_of_light_nm_per_ps *
                              params.fwhm_wavelength_nm /
                              (params.degeneracy_wavelength_nm * params.degeneracy_wavelength_nm);
  return fwhm_angular / (2.0 * std::sqrt(2.0 * std::numbers::ln2));
}

// Default grid: 4097 points spanning +-8 Delta. Keeps the quadrature error
// below 1e-10 for Gaussian profiles while allowing fast transforms.
inline FrequencyGrid default_grid(double delta, int count = 4097, double span_sigmas = 8.0) {
  if (!(delta > 0.0)) throw std::invalid_argument("default_grid: delta must be > 0");
  if (!(span_sigmas > 0.0)) throw std::invalid_argument("default_grid: span must be > 0");
  return FrequencyGrid(2.0 * span_sigmas * delta / (count - 1), count);
}

// r(nu) = (2 pi F^2 / Delta^2)^{1/4} exp(-nu^2/(4 Delta^2)), theta = 0.
inline SpectralAmplitude gaussian_amplitude(const GaussianSourceParams& params,
                                            const FrequencyGrid& grid) {
  params.validate();
  const double delta = wavelength_to_detuning_width(params);
  if (grid.half_span() < 5.0 * delta)
    throw window_error("gaussian_amplitude: grid must span at least +-5 Delta");
  const double peak = std::pow(2.0 * std::numbers::pi * params.flux * params.flux / (delta * delta),
                               0.25);
  std::vector<double> r(static_cast<std::size_t>(grid.count()));
  for (int k = 0; k < grid.count(); ++k) {
    const double nu = grid.detuning(k);
    r[static_cast<std::size_t>(k)] = peak * std::exp(-nu * nu / (4.0 * delta * delta));
  }
  return SpectralAmplitude(grid, std::move(r),
                           std::vector<double>(static_cast<std::size_t>(grid.count()), 0.0));
}

// Builds a SpectralAmplitude from tabulated samples. The detuning axis must
// be uniformly spaced, symmetric about zero and of odd length.
inline SpectralAmplitude tabulated_amplitude(const std::vector<double>& detunings,
                                             const std::vector<double>& r,
                                             const std::vector<double>& theta) {
  if (detunings.size() != r.size() || (!theta.empty() && theta.size() != r.size()))
    throw std::invalid_argument("tabulated_amplitude: column lengths differ");
  const auto n = detunings.size();
  if (n < 3 || n % 2 == 0)
    throw std::invalid_argument("tabulated_amplitude: need an odd number of samples >= 3");
  const double spacing = detunings[1] - detunings[0];
  if (!(spacing > 0.0)) throw std::invalid_argument("tabulated_amplitude: detunings must ascend");
  for (std::size_t k = 1; k < n; ++k) {
    const double d = detunings[k] - detunings[k - 1];
    if (std::abs(d - spacing) > 1e-9 * spacing)
      throw std::invalid_argument("tabulated_amplitude: detuning spacing is not uniform");
  }
  const double center = detunings[(n - 1) / 2];
  if (std::abs(center) > 1e-9 * spacing)
    throw std::invalid_argument("tabulated_amplitude: detuning grid is not centred on zero");
  return SpectralAmplitude(FrequencyGrid(spacing, static_cast<int>(n)), r,
                           theta.empty() ? std::vector<double>(n, 0.0) : theta);
}

// Reads a two- or three-column plain-text table: detuning (rad/ps), r,
// optional theta (rad). '#' starts a comment, columns are whitespace
// separated.
inline SpectralAmplitude load_spectrum(std::istream& in, const std::string& name = "<stream>") {
  std::vector<double> nu, r, theta;
  std::string line;
  int lineno = 0;
  bool saw_theta = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    std::istringstream ss(line);
    double a, b;
    if (!(ss >> a)) continue;  // blank or comment-only line
    if (!(ss >> b))
      throw config_error(name + ":" + std::to_string(lineno) + ": expected at least two columns");
    double c = 0.0;
    const bool has_theta = static_cast<bool>(ss >> c);
    if (!nu.empty() && has_theta != saw_theta)
      throw config_error(name + ":" + std::to_string(lineno) + ": inconsistent column count");
    saw_theta = has_theta;
    double extra;
    if (ss >> extra)
      throw config_error(name + ":" + std::to_string(lineno) + ": too many columns");
    nu.push_back(a);
    r.push_back(b);
    theta.push_back(c);
  }
  if (nu.empty()) throw config_error(name + ": no data rows");
  return tabulated_amplitude(nu, r, saw_theta ? theta : std::vector<double>{});
}

inline SpectralAmplitude load_spectrum(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error(path + ": cannot open spectrum table");
  return load_spectrum(in, path);
}

}  // namespace homsim
