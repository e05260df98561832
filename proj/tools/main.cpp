#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lure_pcac/presets.hpp"
#include "lure_pcac/runner.hpp"

namespace {

struct CommonOptions {
  std::string preset;
  std::string config_file;
  std::string out_dir = "out";
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
  auto* p = cmd->add_option("--preset", opt.preset, "built-in preset (ex1|ex1p|ex2|ex3|ex4)");
  auto* f = cmd->add_option("--config", opt.config_file, "config file path");
  p->excludes(f);
  cmd->add_option("--out", opt.out_dir, "output directory")->capture_default_str();
  cmd->add_option("--set", opt.overrides, "override key=value (repeatable)");
}

int execute(const CommonOptions& opt, lure_pcac::RunMode mode) {
  using namespace lure_pcac;
  try {
    ConfigMap map;
    std::string label;
    if (!opt.preset.empty()) {
      map = preset(opt.preset);
      label = opt.preset;
    } else if (!opt.config_file.empty()) {
      map = parse_config_file(opt.config_file);
      label = opt.config_file;
    } else {
      std::cerr << "one of --preset or --config is required\n";
      return kExitConfigError;
    }
    apply_overrides(map, opt.overrides);
    return run(map, mode, opt.out_dir, label).exit_code;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive predictive control of discrete-time Lur'e systems with "
               "per-step absolute-stability certificates"};
  app.set_version_flag("--version", lure_pcac::kToolVersion);
  app.require_subcommand(1);

  CommonOptions sim_opt, ana_opt, sec_opt;
  CLI::App* sim = app.add_subcommand("simulate", "run the closed loop, emit trajectory.csv");
  add_common(sim, sim_opt);
  CLI::App* ana = app.add_subcommand(
      "analyze", "run the closed loop and evaluate certificates, emit stability.csv too");
  add_common(ana, ana_opt);
  CLI::App* sec = app.add_subcommand("sector-check",
                                     "probe the nonlinearity against its sector bounds");
  add_common(sec, sec_opt);

  CLI11_PARSE(app, argc, argv);

  if (sim->parsed()) return execute(sim_opt, lure_pcac::RunMode::simulate);
  if (ana->parsed()) return execute(ana_opt, lure_pcac::RunMode::analyze);
  return execute(sec_opt, lure_pcac::RunMode::sector_check);
}
