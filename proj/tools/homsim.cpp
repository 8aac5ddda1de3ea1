// Command-line front end: scenario execution, parameter sweeps and the
// built-in presets. Exit codes: 0 success, 2 config error, 3 numerical
// window error.

#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "homsim/scenario.hpp"

namespace {

homsim::ScenarioConfig load(const std::string& config_path, const std::string& preset) {
  if (!preset.empty() && !config_path.empty())
    throw homsim::config_error("give either --config or --preset, not both");
  if (!preset.empty()) return homsim::preset_config(preset);
  if (config_path.empty()) return homsim::ScenarioConfig{};  // documented defaults
  return homsim::parse_config(config_path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporal Hong-Ou-Mandel interference simulator for heralded narrowband "
               "twin-beam sources"};
  app.require_subcommand(1);

  std::string config_path, out_dir, preset_name;
  unsigned threads = 1;
  std::string method_name = "fast";
  app.add_option("--config", config_path, "scenario config file (sectioned key = value)");
  app.add_option("--out", out_dir, "output directory (overrides [output] dir)");
  app.add_option("--threads", threads, "worker threads, 0 = auto")->capture_default_str();
  app.add_option("--method", method_name, "kernel evaluation method")
      ->check(CLI::IsMember({"direct", "fast"}))
      ->capture_default_str();
  app.add_option("--preset", preset_name, "use a built-in scenario instead of --config")
      ->check(CLI::IsMember({"fig2", "fig3", "fig4", "case1", "case2", "case3"}));

  auto* spectrum = app.add_subcommand("spectrum", "write the source spectrum table");
  auto* g2 = app.add_subcommand("g2", "write a second-order correlation trace");
  std::string g2_kind = "cross";
  g2->add_option("--kind", g2_kind, "which correlation")
      ->check(CLI::IsMember({"marginal", "cross"}))
      ->capture_default_str();
  auto* homdip = app.add_subcommand("homdip", "write the coincidence dip trace");
  auto* sweep = app.add_subcommand("sweep", "visibility versus g2_cross(0) table");
  auto* check = app.add_subcommand("check", "run the built-in identity and oracle suite");
  auto* preset = app.add_subcommand("preset", "run a named preset end to end");
  std::string preset_arg;
  preset->add_option("name", preset_arg, "fig2|fig3|fig4|case1|case2|case3")->required();

  CLI11_PARSE(app, argc, argv);

  homsim::RunOptions opt;
  opt.method = method_name == "direct" ? homsim::EvalMethod::direct : homsim::EvalMethod::fast;
  opt.threads = threads;
  opt.out_dir = out_dir;

  try {
    if (check->parsed()) return homsim::run_check(opt, std::cout) == 0 ? 0 : 1;
    if (preset->parsed()) {
      homsim::run_preset(preset_arg, opt, std::cout);
      return 0;
    }
    const auto cfg = load(config_path, preset_name);
    if (spectrum->parsed()) {
      homsim::run_spectrum(cfg, opt);
    } else if (g2->parsed()) {
      homsim::run_g2(cfg, opt,
                     g2_kind == "marginal" ? homsim::G2Kind::marginal : homsim::G2Kind::cross);
    } else if (homdip->parsed()) {
      homsim::run_homdip(cfg, opt);
    } else if (sweep->parsed()) {
      homsim::run_sweep(cfg, opt);
    }
    return 0;
  } catch (const homsim::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const homsim::window_error& e) {
    std::cerr << "numerical window error: " << e.what()
              << "\nhint: widen the frequency grid (grid_points / grid_span_sigmas) or shrink "
                 "the delay grid\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
