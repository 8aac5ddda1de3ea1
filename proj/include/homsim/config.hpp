#pragma once

// Scenario configuration: a sectioned key = value text format with strict
// unknown-key rejection and line-anchored error messages.

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "homsim/errors.hpp"
#include "homsim/hom.hpp"
#include "homsim/spectral.hpp"

namespace homsim {

enum class SourceModel { gaussian, tabulated };

struct SourceConfig {
  SourceModel model = SourceModel::gaussian;
  double wavelength_nm = 1550.0;
  double fwhm_nm = 0.5;
  std::optional<double> flux;       // photons/ps; exactly one of flux/g2_target
  std::optional<double> g2_target;  // defaults to 20 when neither is given
  std::string table_path;           // tabulated model only
  int grid_points = 4097;
  double grid_span_sigmas = 8.0;
};

struct OutputConfig {
  std::string dir = ".";
  int precision = 9;
};

struct ScenarioConfig {
  SourceConfig source;
  std::optional<SourceConfig> source_b;  // empty: identical to the first source
  OpticalSetup setup;
  ReductionConfig reduction;
  std::vector<double> sweep_targets = {13, 15, 20, 25, 30, 35, 40, 50, 60, 70, 80, 90, 100};
  OutputConfig output;
};

namespace detail {

struct ConfigLine {
  std::string section;
  std::string key;
  std::string value;
  int lineno;
};

inline std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

inline double parse_number(const ConfigLine& ln, const std::string& file) {
  std::istringstream ss(ln.value);
  double v;
  if (!(ss >> v) || !(ss >> std::ws).eof())
    throw config_error(file + ":" + std::to_string(ln.lineno) + ": key '" + ln.key +
                       "' expects a number, got '" + ln.value + "'");
  return v;
}

inline int parse_int(const ConfigLine& ln, const std::string& file) {
  std::istringstream ss(ln.value);
  int v;
  if (!(ss >> v) || !(ss >> std::ws).eof())
    throw config_error(file + ":" + std::to_string(ln.lineno) + ": key '" + ln.key +
                       "' expects an integer, got '" + ln.value + "'");
  return v;
}

inline bool parse_bool(const ConfigLine& ln, const std::string& file) {
  if (ln.value == "true" || ln.value == "1" || ln.value == "yes") return true;
  if (ln.value == "false" || ln.value == "0" || ln.value == "no") return false;
  throw config_error(file + ":" + std::to_string(ln.lineno) + ": key '" + ln.key +
                     "' expects true/false, got '" + ln.value + "'");
}

inline std::vector<double> parse_number_list(const ConfigLine& ln, const std::string& file) {
  std::vector<double> out;
  std::string item;
  std::istringstream ss(ln.value);
  while (std::getline(ss, item, ',')) {
    std::istringstream vs(trim(item));
    double v;
    if (!(vs >> v) || !(vs >> std::ws).eof())
      throw config_error(file + ":" + std::to_string(ln.lineno) + ": key '" + ln.key +
                         "' expects a comma-separated number list");
    out.push_back(v);
  }
  if (out.empty())
    throw config_error(file + ":" + std::to_string(ln.lineno) + ": key '" + ln.key +
                       "' expects a non-empty list");
  return out;
}

[[noreturn]] inline void fail_range(const ConfigLine& ln, const std::string& file,
                                    const std::string& what) {
  throw config_error(file + ":" + std::to_string(ln.lineno) + ": key '" + ln.key + "' " + what);
}

inline void apply_source_key(SourceConfig& src, const ConfigLine& ln, const std::string& file) {
  if (ln.key == "model") {
    if (ln.value == "gaussian")
      src.model = SourceModel::gaussian;
    else if (ln.value == "tabulated")
      src.model = SourceModel::tabulated;
    else
      fail_range(ln, file, "must be 'gaussian' or 'tabulated'");
  } else if (ln.key == "wavelength_nm") {
    src.wavelength_nm = parse_number(ln, file);
    if (!(src.wavelength_nm > 0.0)) fail_range(ln, file, "must be > 0");
  } else if (ln.key == "fwhm_nm") {
    src.fwhm_nm = parse_number(ln, file);
    if (!(src.fwhm_nm > 0.0)) fail_range(ln, file, "must be > 0");
  } else if (ln.key == "flux") {
    src.flux = parse_number(ln, file);
    if (!(*src.flux > 0.0)) fail_range(ln, file, "must be > 0");
  } else if (ln.key == "g2_target") {
    src.g2_target = parse_number(ln, file);
    if (!(*src.g2_target > 2.0))
      fail_range(ln, file, "must exceed 2 (the single-mode lower bound of g2_cross(0))");
  } else if (ln.key == "table_path") {
    src.table_path = ln.value;
  } else if (ln.key == "grid_points") {
    src.grid_points = parse_int(ln, file);
    if (src.grid_points < 3 || src.grid_points % 2 == 0)
      fail_range(ln, file, "must be odd and >= 3");
  } else if (ln.key == "grid_span_sigmas") {
    src.grid_span_sigmas = parse_number(ln, file);
    if (!(src.grid_span_sigmas > 0.0)) fail_range(ln, file, "must be > 0");
  } else {
    fail_range(ln, file, "is not a recognized source key");
  }
}

inline void finish_source(SourceConfig& src, const std::string& file, const std::string& section) {
  if (src.model == SourceModel::gaussian) {
    if (!src.table_path.empty())
      throw config_error(file + ": [" + section + "] table_path requires model = tabulated");
    if (src.flux && src.g2_target)
      throw config_error(file + ": [" + section + "] give either flux or g2_target, not both");
    if (!src.flux && !src.g2_target) src.g2_target = 20.0;
  } else {
    if (src.table_path.empty())
      throw config_error(file + ": [" + section + "] model = tabulated requires table_path");
    if (src.flux || src.g2_target)
      throw config_error(file + ": [" + section +
                         "] flux/g2_target do not apply to a tabulated spectrum");
  }
}

}  // namespace detail

inline ScenarioConfig parse_config_text(std::istream& in, const std::string& file) {
  using detail::ConfigLine;
  static const std::set<std::string> known_sections = {"source", "source_b", "setup", "reduction",
                                                       "sweep", "output"};
  ScenarioConfig cfg;
  bool has_source_b = false;
  SourceConfig source_b;

  std::string section;
  std::string line;
  int lineno = 0;
  std::vector<ConfigLine> lines;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw config_error(file + ":" + std::to_string(lineno) + ": malformed section header");
      section = detail::trim(line.substr(1, line.size() - 2));
      if (!known_sections.count(section))
        throw config_error(file + ":" + std::to_string(lineno) + ": unknown section [" + section +
                           "]");
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error(file + ":" + std::to_string(lineno) + ": expected key = value");
    if (section.empty())
      throw config_error(file + ":" + std::to_string(lineno) + ": key outside any section");
    lines.push_back({section, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)),
                     lineno});
  }

  for (const auto& ln : lines) {
    if (ln.section == "source") {
      detail::apply_source_key(cfg.source, ln, file);
    } else if (ln.section == "source_b") {
      has_source_b = true;
      detail::apply_source_key(source_b, ln, file);
    } else if (ln.section == "setup") {
      double v = detail::parse_number(ln, file);
      auto check_unit = [&](double x) {
        if (!(x >= 0.0 && x <= 1.0)) detail::fail_range(ln, file, "must lie in [0, 1]");
        return x;
      };
      if (ln.key == "transmittance")
        cfg.setup.transmittance = check_unit(v);
      else if (ln.key == "eta1")
        cfg.setup.eta1 = check_unit(v);
      else if (ln.key == "eta2")
        cfg.setup.eta2 = check_unit(v);
      else if (ln.key == "eta3")
        cfg.setup.eta3 = check_unit(v);
      else if (ln.key == "eta4")
        cfg.setup.eta4 = check_unit(v);
      else
        detail::fail_range(ln, file, "is not a recognized setup key");
    } else if (ln.section == "reduction") {
      if (ln.key == "mode") {
        if (ln.value == "pointwise")
          cfg.reduction.mode = ReductionMode::pointwise;
        else if (ln.value == "windowed")
          cfg.reduction.mode = ReductionMode::windowed;
        else
          detail::fail_range(ln, file, "must be 'pointwise' or 'windowed'");
      } else if (ln.key == "window_ps") {
        cfg.reduction.window_half_width = detail::parse_number(ln, file);
        if (!(cfg.reduction.window_half_width > 0.0)) detail::fail_range(ln, file, "must be > 0");
      } else if (ln.key == "quad_points") {
        cfg.reduction.quad_points = detail::parse_int(ln, file);
        if (cfg.reduction.quad_points < 8) detail::fail_range(ln, file, "must be >= 8");
      } else if (ln.key == "dt_start") {
        cfg.reduction.dt.start = detail::parse_number(ln, file);
      } else if (ln.key == "dt_stop") {
        cfg.reduction.dt.stop = detail::parse_number(ln, file);
      } else if (ln.key == "dt_step") {
        cfg.reduction.dt.step = detail::parse_number(ln, file);
        if (!(cfg.reduction.dt.step > 0.0)) detail::fail_range(ln, file, "must be > 0");
      } else if (ln.key == "include_multiphoton") {
        cfg.reduction.include_multiphoton = detail::parse_bool(ln, file);
      } else {
        detail::fail_range(ln, file, "is not a recognized reduction key");
      }
    } else if (ln.section == "sweep") {
      if (ln.key == "targets") {
        cfg.sweep_targets = detail::parse_number_list(ln, file);
        for (double t : cfg.sweep_targets)
          if (!(t > 2.0)) detail::fail_range(ln, file, "targets must all exceed 2");
      } else {
        detail::fail_range(ln, file, "is not a recognized sweep key");
      }
    } else if (ln.section == "output") {
      if (ln.key == "dir")
        cfg.output.dir = ln.value;
      else if (ln.key == "precision") {
        cfg.output.precision = detail::parse_int(ln, file);
        if (cfg.output.precision < 3 || cfg.output.precision > 17)
          detail::fail_range(ln, file, "must lie in [3, 17]");
      } else {
        detail::fail_range(ln, file, "is not a recognized output key");
      }
    }
  }

  detail::finish_source(cfg.source, file, "source");
  if (has_source_b) {
    detail::finish_source(source_b, file, "source_b");
    cfg.source_b = source_b;
  }
  if (cfg.reduction.dt.stop < cfg.reduction.dt.start)
    throw config_error(file + ": [reduction] dt_stop must be >= dt_start");
  if (cfg.reduction.mode == ReductionMode::windowed && !(cfg.reduction.window_half_width > 0.0))
    throw config_error(file + ": [reduction] windowed mode requires window_ps");
  return cfg;
}

inline ScenarioConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error(path + ": cannot open config file");
  return parse_config_text(in, path);
}

}  // namespace homsim
