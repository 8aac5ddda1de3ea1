#pragma once

// Scenario execution: turns a ScenarioConfig into kernel sets, runs the
// requested computation and writes CSV traces plus a JSON summary. Output is
// byte-identical for identical config and version: fixed float formatting
// and no timestamps.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "homsim/config.hpp"
#include "homsim/correlations.hpp"
#include "homsim/hom.hpp"
#include "homsim/kernels.hpp"
#include "homsim/oracle.hpp"

namespace homsim {

inline constexpr const char* version_string = "homsim 0.1.0";

struct RunOptions {
  EvalMethod method = EvalMethod::fast;
  unsigned threads = 1;  // 0 = auto
  std::string out_dir;   // overrides [output] dir when non-empty
};

namespace detail {

inline std::string format_value(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, int precision)
      : out_(path), precision_(precision) {
    if (!out_) throw std::runtime_error("cannot open output file " + path.string());
  }

  void comment(const std::string& line) { out_ << "# " << line << "\n"; }
  void columns(const std::vector<std::string>& names) {
    out_ << "# columns:";
    for (const auto& n : names) out_ << " " << n;
    out_ << "\n";
  }
  void row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i)
      out_ << (i ? "," : "") << format_value(values[i], precision_);
    out_ << "\n";
  }

 private:
  std::ofstream out_;
  int precision_;
};

inline std::string describe_source(const SourceConfig& s, int precision) {
  std::string d = "source: ";
  if (s.model == SourceModel::gaussian) {
    d += "gaussian wavelength_nm=" + format_value(s.wavelength_nm, precision) +
         " fwhm_nm=" + format_value(s.fwhm_nm, precision);
    if (s.flux) d += " flux=" + format_value(*s.flux, precision);
    if (s.g2_target) d += " g2_target=" + format_value(*s.g2_target, precision);
  } else {
    d += "tabulated " + s.table_path;
  }
  return d;
}

inline void write_config_header(CsvWriter& csv, const ScenarioConfig& cfg) {
  const int p = cfg.output.precision;
  csv.comment(version_string);
  csv.comment(describe_source(cfg.source, p));
  if (cfg.source_b) csv.comment("second " + describe_source(*cfg.source_b, p));
  csv.comment("setup: T=" + format_value(cfg.setup.transmittance, p) +
              " eta1=" + format_value(cfg.setup.eta1, p) + " eta2=" +
              format_value(cfg.setup.eta2, p) + " eta3=" + format_value(cfg.setup.eta3, p) +
              " eta4=" + format_value(cfg.setup.eta4, p));
  csv.comment(std::string("reduction: mode=") +
              (cfg.reduction.mode == ReductionMode::pointwise ? "pointwise" : "windowed") +
              " include_multiphoton=" + (cfg.reduction.include_multiphoton ? "true" : "false"));
}

}  // namespace detail

// Resolves a source section into a spectral amplitude (solving for the flux
// when a g2 target is requested).
inline SpectralAmplitude realize_source(const SourceConfig& s) {
  if (s.model == SourceModel::tabulated) return load_spectrum(s.table_path);
  double flux;
  if (s.flux) {
    flux = *s.flux;
  } else {
    flux = flux_for_target_g2(s.wavelength_nm, s.fwhm_nm, *s.g2_target, s.grid_points,
                              s.grid_span_sigmas);
  }
  const GaussianSourceParams params{s.wavelength_nm, s.fwhm_nm, flux};
  const double delta = wavelength_to_detuning_width(params);
  return gaussian_amplitude(params, default_grid(delta, s.grid_points, s.grid_span_sigmas));
}

struct ScenarioContext {
  KernelSet kernels_a;
  KernelSet kernels_b;  // equals kernels_a for identical sources
  bool identical;
};

inline ScenarioContext make_context(const ScenarioConfig& cfg, const RunOptions& opt) {
  auto ksA = build_kernels(realize_source(cfg.source), opt.method);
  if (!cfg.source_b) return {ksA, ksA, true};
  return {ksA, build_kernels(realize_source(*cfg.source_b), opt.method), false};
}

struct RunSummary {
  std::map<std::string, double> values;

  void write_json(const std::filesystem::path& path, int precision) const {
    nlohmann::ordered_json j;
    j["version"] = version_string;
    for (const auto& [k, v] : values) j[k] = std::stod(detail::format_value(v, precision));
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file " + path.string());
    out << j.dump(2) << "\n";
  }
};

inline std::filesystem::path output_dir(const ScenarioConfig& cfg, const RunOptions& opt) {
  std::filesystem::path dir = opt.out_dir.empty() ? cfg.output.dir : opt.out_dir;
  std::filesystem::create_directories(dir);
  return dir;
}

// spectrum subcommand: marginal intensity table (plus r and theta samples).
inline void run_spectrum(const ScenarioConfig& cfg, const RunOptions& opt) {
  const auto src = realize_source(cfg.source);
  const auto dir = output_dir(cfg, opt);
  detail::CsvWriter csv(dir / "spectrum.csv", cfg.output.precision);
  detail::write_config_header(csv, cfg);
  csv.columns({"detuning_rad_per_ps", "r", "theta_rad", "marginal_intensity"});
  for (int k = 0; k < src.grid().count(); ++k)
    csv.row({src.grid().detuning(k), src.r()[static_cast<std::size_t>(k)],
             src.theta()[static_cast<std::size_t>(k)], std::norm(src.alpha(k))});
}

enum class G2Kind { marginal, cross };

inline RunSummary run_g2(const ScenarioConfig& cfg, const RunOptions& opt, G2Kind kind) {
  const auto ctx = make_context(cfg, opt);
  const auto& ks = ctx.kernels_a;
  const auto dir = output_dir(cfg, opt);
  const char* name = kind == G2Kind::marginal ? "g2_marginal.csv" : "g2_cross.csv";
  detail::CsvWriter csv(dir / name, cfg.output.precision);
  detail::write_config_header(csv, cfg);
  csv.columns({"tau_ps", kind == G2Kind::marginal ? "g2_marginal" : "g2_cross"});
  const auto& dt = cfg.reduction.dt;
  for (double tau = dt.start; tau <= dt.stop + 0.5 * dt.step; tau += dt.step)
    csv.row({tau, kind == G2Kind::marginal ? g2_marginal(ks, tau) : g2_cross(ks, tau)});

  RunSummary summary;
  summary.values["N"] = mean_flux(ks);
  summary.values["g2_cross0"] = g2_cross(ks, 0.0);
  summary.values["tau_c"] = coherence_time(ks);
  summary.write_json(dir / "summary.json", cfg.output.precision);
  return summary;
}

inline RunSummary run_homdip(const ScenarioConfig& cfg, const RunOptions& opt,
                             const std::string& trace_name = "homdip.csv") {
  const auto ctx = make_context(cfg, opt);
  const auto trace =
      hom_trace(ctx.kernels_a, ctx.kernels_b, cfg.setup, cfg.reduction, opt.threads);
  const auto dir = output_dir(cfg, opt);
  detail::CsvWriter csv(dir / trace_name, cfg.output.precision);
  detail::write_config_header(csv, cfg);
  csv.columns({"dt_ps", "p_total", "p_multiphoton"});
  for (std::size_t i = 0; i < trace.dt.size(); ++i)
    csv.row({trace.dt[i], trace.p_total[i], trace.p_multiphoton[i]});

  RunSummary summary;
  summary.values["N"] = mean_flux(ctx.kernels_a);
  summary.values["g2_cross0"] = g2_cross(ctx.kernels_a, 0.0);
  summary.values["tau_c"] = coherence_time(ctx.kernels_a);
  summary.values["P_infinity"] = trace.p_infinity;
  if (trace.visibility) summary.values["V"] = *trace.visibility;
  summary.write_json(dir / "summary.json", cfg.output.precision);
  return summary;
}

inline RunSummary run_sweep(const ScenarioConfig& cfg, const RunOptions& opt) {
  if (cfg.source.model != SourceModel::gaussian)
    throw config_error("sweep requires a gaussian source model");
  if (cfg.source_b)
    throw config_error("sweep assumes identical sources; drop the [source_b] section");
  const auto points =
      visibility_sweep(cfg.source.wavelength_nm, cfg.source.fwhm_nm, cfg.setup, cfg.reduction,
                       cfg.sweep_targets, opt.method, opt.threads);
  const auto dir = output_dir(cfg, opt);
  detail::CsvWriter csv(dir / "sweep.csv", cfg.output.precision);
  detail::write_config_header(csv, cfg);
  csv.columns({"g2_cross0", "flux", "visibility"});
  for (const auto& p : points) csv.row({p.g2_target, p.flux, p.visibility});

  RunSummary summary;
  for (const auto& p : points)
    summary.values["V_at_g2_" + detail::format_value(p.g2_target, cfg.output.precision)] =
        p.visibility;
  summary.write_json(dir / "summary.json", cfg.output.precision);
  return summary;
}

// check subcommand: runs the built-in identity and oracle-equivalence suite.
// Prints one line per check; returns the number of failures.
inline int run_check(const RunOptions& opt, std::ostream& log) {
  int failures = 0;
  auto report = [&](const std::string& name, bool ok, double err) {
    log << (ok ? "[PASS] " : "[FAIL] ") << name << " (max rel err " << err << ")\n";
    if (!ok) ++failures;
  };

  std::mt19937 rng(20240521);
  std::uniform_real_distribution<double> delta_dist(0.05, 0.4);
  std::uniform_real_distribution<double> peak_dist(0.01, 0.8);
  std::uniform_real_distribution<double> phase_dist(-1.0, 1.0);

  auto random_source = [&](bool with_phase) {
    const double delta = delta_dist(rng);
    const double peak = peak_dist(rng);
    const auto grid = default_grid(delta, 1025);
    std::vector<double> r(static_cast<std::size_t>(grid.count()));
    std::vector<double> theta(static_cast<std::size_t>(grid.count()), 0.0);
    const double p0 = phase_dist(rng), p1 = phase_dist(rng), p2 = phase_dist(rng);
    for (int k = 0; k < grid.count(); ++k) {
      const double nu = grid.detuning(k);
      r[static_cast<std::size_t>(k)] = peak * std::exp(-nu * nu / (4.0 * delta * delta));
      if (with_phase)
        theta[static_cast<std::size_t>(k)] = p0 + p1 * nu / delta + p2 * nu * nu / (delta * delta);
    }
    return SpectralAmplitude(grid, std::move(r), std::move(theta));
  };

  {  // time-integral identity of the cross-correlation excess
    double worst = 0.0;
    for (int i = 0; i < 5; ++i) {
      const auto ks = build_kernels(random_source(false), opt.method);
      const double lhs = integrated_cross_excess(ks);
      const double rhs = 1.0 / mean_flux(ks) + coherence_time(ks);
      worst = std::max(worst, std::abs(lhs - rhs) / rhs);
    }
    report("integrated cross-correlation excess = 1/N + tau_c", worst < 1e-6, worst);
  }
  {  // marginal-beam route to the coherence time
    double worst = 0.0;
    for (int i = 0; i < 5; ++i) {
      const auto ks = build_kernels(random_source(false), opt.method);
      const double lhs = coherence_time_timedomain(ks);
      const double rhs = coherence_time(ks);
      worst = std::max(worst, std::abs(lhs - rhs) / rhs);
    }
    report("time-domain coherence time matches frequency domain", worst < 1e-6, worst);
  }
  {  // Wick-enumerator agreement for the closed-form moment assemblies
    std::uniform_real_distribution<double> tdist(-5.0, 5.0);
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
      const auto ks = build_kernels(random_source(true), opt.method);
      const double t = tdist(rng), tp = tdist(rng), tpp = tdist(rng);
      const auto direct = multiphoton_six(ks, t, tp, tpp);
      const MomentSpec spec{{{true, Beam::idler, SourceLabel::a, t},
                             {true, Beam::signal, SourceLabel::a, tp},
                             {true, Beam::signal, SourceLabel::a, tpp},
                             {false, Beam::signal, SourceLabel::a, tpp},
                             {false, Beam::signal, SourceLabel::a, tp},
                             {false, Beam::idler, SourceLabel::a, t}}};
      const auto brute = wick_moment(spec, ks, ks);
      worst = std::max(worst, std::abs(brute - std::complex<double>(direct)) / std::abs(direct));
    }
    report("multiphoton moment matches Wick enumeration", worst < 1e-9, worst);
  }
  return failures;
}

// Built-in presets reproducing the simulation scenarios.
inline ScenarioConfig preset_config(const std::string& name) {
  ScenarioConfig cfg;
  cfg.source.wavelength_nm = 1550.0;
  cfg.source.fwhm_nm = 0.5;
  cfg.reduction.dt = {-60.0, 60.0, 0.5};
  if (name == "fig2") {
    cfg.source.g2_target = 20.0;
  } else if (name == "fig3" || name == "fig4") {
    // ideal setup; fluxes resolved per target
  } else if (name == "case1") {
    cfg.setup.transmittance = 0.45;
  } else if (name == "case2") {
    cfg.setup.transmittance = 0.45;
    cfg.setup.eta2 = 0.1;
    cfg.setup.eta3 = 0.05;
  } else if (name == "case3") {
    cfg.setup.transmittance = 0.45;
    cfg.setup.eta2 = 0.2;
    cfg.setup.eta3 = 0.05;
  } else {
    throw config_error("unknown preset '" + name +
                       "' (expected fig2, fig3, fig4, case1, case2 or case3)");
  }
  return cfg;
}

inline void run_preset(const std::string& name, const RunOptions& opt, std::ostream& log) {
  ScenarioConfig cfg = preset_config(name);
  if (!opt.out_dir.empty()) cfg.output.dir = opt.out_dir;
  if (name == "fig2") {
    run_spectrum(cfg, opt);
    const auto summary = run_g2(cfg, opt, G2Kind::marginal);
    log << "tau_c = " << summary.values.at("tau_c") << " ps\n";
    return;
  }
  if (name == "fig4") {
    const auto summary = run_sweep(cfg, opt);
    for (const auto& [k, v] : summary.values) log << k << " = " << v << "\n";
    return;
  }
  // fig3 and the loss cases: one dip trace per flux target.
  RunSummary all;
  for (double target : {20.0, 40.0, 80.0}) {
    ScenarioConfig one = cfg;
    one.source.g2_target = target;
    const auto summary =
        run_homdip(one, opt, "homdip_g2_" + detail::format_value(target, 6) + ".csv");
    const double v = summary.values.count("V") ? summary.values.at("V") : -1.0;
    log << name << " g2=" << target << ": V = " << v << "\n";
    all.values["V_at_g2_" + detail::format_value(target, 6)] = v;
  }
  all.write_json(std::filesystem::path(cfg.output.dir) / "summary.json", cfg.output.precision);
}

}  // namespace homsim
