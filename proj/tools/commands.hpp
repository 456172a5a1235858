#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "project.hpp"

namespace landca::cli {

/// Holds `<out>/.landca.lock` for the lifetime of a command and writes files
/// atomically (temporary file, then rename) below the output directory.
class OutputDir {
 public:
  explicit OutputDir(const fs::path& root);
  ~OutputDir();
  OutputDir(const OutputDir&) = delete;
  OutputDir& operator=(const OutputDir&) = delete;

  const fs::path& root() const noexcept { return root_; }
  void write_text(const fs::path& relative, const std::string& content) const;
  void write_grid(const fs::path& relative, const CategoricalRaster& grid) const;

 private:
  fs::path root_;
  fs::path lock_;
};

fs::path model_path(const fs::path& out, const std::string& period);

/// Calibrates every configured period. Writes model/<period>.model.json and
/// the long-format CSVs model/rates.csv, model/weights.csv, model/diagnostics.csv.
std::vector<Model> cmd_calibrate(const ProjectConfig& config);

struct SimulateOptions {
  std::optional<fs::path> model;  // default: model/<period>.model.json under the output directory
};

/// Runs the simulation. Writes steps/step_NNNN.asc (step 0 is the initial map)
/// and steps/manifest.json.
SimulationResult cmd_simulate(const ProjectConfig& config, const SimulateOptions& options);

struct ValidateOptions {
  std::optional<fs::path> observed;
  std::optional<fs::path> simulated;
  std::optional<WindowMode> mode;
};

/// Writes validation/similarity.csv, validation/difference.asc and
/// validation/summary.txt. Returns the summary line.
std::string cmd_validate(const ProjectConfig& config, const ValidateOptions& options);

struct ReportOptions {
  fs::path out;
  std::vector<fs::path> models;
  std::vector<fs::path> curves;
  double threshold = 0.5;
};

/// Consolidates models and similarity curves into report/rates.csv,
/// report/weights_wide.csv, report/validation.csv and report/report.md.
void cmd_report(const ReportOptions& options);

/// Model files and curve present under `config.out` for the configured periods.
ReportOptions default_report_options(const ProjectConfig& config);

}  // namespace landca::cli
