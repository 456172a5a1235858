// landca: calibrate, simulate, validate and report land-use change models.
//
// Exit codes: 0 success, 2 configuration error, 3 data error, 4 internal error.
// LANDCA_LOG sets log verbosity (trace, debug, info, warn, error, off).

#include <cstdlib>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "commands.hpp"

namespace {

namespace fs = std::filesystem;
using namespace landca;
using namespace landca::cli;

constexpr int kConfigExit = 2;
constexpr int kDataExit = 3;
constexpr int kInternalExit = 4;

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("landca");
  logger->set_pattern("%^%l%$: %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::info);
  if (const char* env = std::getenv("LANDCA_LOG")) {
    const auto level = spdlog::level::from_str(env);
    if (level == spdlog::level::off && std::string(env) != "off") {
      spdlog::warn("ignoring unknown LANDCA_LOG value '{}'", env);
    } else {
      spdlog::set_level(level);
    }
  }
}

struct CommonArgs {
  std::string config;
  Overrides overrides;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool config_required = true) {
  auto* opt = cmd->add_option("-c,--config", args.config, "Project config (JSON)")->check(CLI::ExistingFile);
  if (config_required) opt->required();
  cmd->add_option_function<std::string>(
      "-o,--out", [&args](const std::string& v) { args.overrides.out = v; }, "Output directory (overrides config)");
  cmd->add_option_function<unsigned>(
      "--threads", [&args](unsigned v) { args.overrides.threads = v; }, "Worker threads, 0 = all cores");
}

ProjectConfig resolve_config(const CommonArgs& args) {
  ProjectConfig config = load_config(args.config);
  apply_overrides(config, args.overrides);
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();

  CLI::App app{"Land-use change modelling: weights-of-evidence calibration, cellular-automaton simulation and "
               "multiple-window validation."};
  app.require_subcommand(1);
  app.set_version_flag("--version", "landca 1.0.0");

  CommonArgs args;

  auto* calibrate = app.add_subcommand("calibrate", "Fit transition rates and weights of evidence for each period");
  add_common(calibrate, args);
  calibrate->add_option_function<std::string>(
      "--prior-mode", [&](const std::string& v) { args.overrides.prior_mode = v; },
      "Posterior form: eq3-literal or prior-logit");

  SimulateOptions sim_opts;
  auto* simulate = app.add_subcommand("simulate", "Run the allocation model from a calibrated model file");
  add_common(simulate, args);
  simulate->add_option_function<std::uint64_t>(
      "--seed", [&](std::uint64_t v) { args.overrides.seed = v; }, "Random seed");
  simulate->add_option_function<int>(
      "--steps", [&](int v) { args.overrides.steps = v; }, "Number of simulation steps");
  simulate->add_option_function<std::string>(
      "--model", [&](const std::string& v) { sim_opts.model = v; }, "Model file (default: from the output directory)")
      ->check(CLI::ExistingFile);

  ValidateOptions val_opts;
  auto* validate = app.add_subcommand("validate", "Compare a simulated map with an observed one");
  add_common(validate, args);
  validate->add_option_function<std::string>(
      "--observed", [&](const std::string& v) { val_opts.observed = v; }, "Observed map")->check(CLI::ExistingFile);
  validate->add_option_function<std::string>(
      "--simulated", [&](const std::string& v) { val_opts.simulated = v; }, "Simulated map")->check(CLI::ExistingFile);
  validate->add_option_function<std::vector<int>>(
      "--windows", [&](const std::vector<int>& v) { args.overrides.windows = v; }, "Window sizes in cells, e.g. 1,3,5")
      ->delimiter(',');
  validate->add_option_function<double>(
      "--threshold", [&](double v) { args.overrides.threshold = v; }, "Similarity threshold");
  validate->add_option_function<std::string>(
      "--mode", [&](const std::string& v) { val_opts.mode = window_mode_from_string(v); }, "sliding or tiled");

  std::vector<std::string> report_models;
  std::vector<std::string> report_curves;
  auto* report = app.add_subcommand("report", "Tabulate rates, weights and validation results");
  add_common(report, args, false);
  report->add_option("--model", report_models, "Model files, one per period")->check(CLI::ExistingFile);
  report->add_option("--curve", report_curves, "Similarity curve CSV files")->check(CLI::ExistingFile);
  report->add_option_function<double>(
      "--threshold", [&](double v) { args.overrides.threshold = v; }, "Similarity threshold");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigExit;
  } catch (const ConfigError& e) {
    spdlog::error("{}", e.what());
    return kConfigExit;
  }

  try {
    if (*calibrate) {
      cmd_calibrate(resolve_config(args));
    } else if (*simulate) {
      cmd_simulate(resolve_config(args), sim_opts);
    } else if (*validate) {
      std::cout << cmd_validate(resolve_config(args), val_opts) << "\n";
    } else if (*report) {
      ReportOptions opts;
      if (!args.config.empty()) {
        opts = default_report_options(resolve_config(args));
      } else {
        if (!args.overrides.out) throw ConfigError("report without --config needs --out");
        opts.out = *args.overrides.out;
      }
      if (args.overrides.threshold) opts.threshold = *args.overrides.threshold;
      if (!report_models.empty()) opts.models.assign(report_models.begin(), report_models.end());
      if (!report_curves.empty()) opts.curves.assign(report_curves.begin(), report_curves.end());
      cmd_report(opts);
    }
  } catch (const ConfigError& e) {
    spdlog::error("{}", e.what());
    return kConfigExit;
  } catch (const DataError& e) {
    spdlog::error("{}", e.what());
    return kDataExit;
  } catch (const InvariantError& e) {
    spdlog::critical("internal invariant violated: {}", e.what());
    return kInternalExit;
  } catch (const fs::filesystem_error& e) {
    spdlog::error("{}", e.what());
    return kDataExit;
  } catch (const std::exception& e) {
    spdlog::critical("unexpected error: {}", e.what());
    return kInternalExit;
  }
  return 0;
}
