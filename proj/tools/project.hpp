#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "landca/allocation.hpp"
#include "landca/calibration.hpp"
#include "landca/validation.hpp"

namespace landca::cli {

namespace fs = std::filesystem;

struct PeriodConfig {
  std::string name;
  fs::path t0;
  fs::path t1;
  double years = 1.0;
};

struct ZoneConfig {
  fs::path path;
  ClassId keep = 1;
};

enum class VariableKind { categorical, continuous, distance };

struct VariableConfig {
  std::string name;
  VariableKind kind = VariableKind::categorical;
  fs::path path;         // the layer itself, or the source map for distance layers
  ClassId target = 0;    // distance layers only
  BinningSpec binning;
};

struct SimulationConfig {
  std::optional<fs::path> initial;  // default: t0 of the simulated period
  std::string period;               // default: last period
  int steps = 1;
  std::uint64_t seed = 0;
};

struct ValidationConfig {
  std::optional<fs::path> observed;   // default: t1 of the simulated period
  std::optional<fs::path> simulated;  // default: last grid of the simulation run
  std::vector<int> windows = kDefaultWindows;
  double threshold = 0.5;
  WindowMode mode = WindowMode::sliding;
};

struct ProjectConfig {
  fs::path out;
  Legend legend;
  std::vector<PeriodConfig> periods;
  std::optional<ZoneConfig> zone;
  std::vector<VariableConfig> variables;
  std::vector<TransitionSettings> transitions;
  PriorMode prior_mode = PriorMode::eq3_literal;
  unsigned threads = 0;
  SimulationConfig simulation;
  ValidationConfig validation;

  const PeriodConfig& period(const std::string& name) const;
  const PeriodConfig& simulated_period() const;
  std::vector<TransitionKey> transition_keys() const;
};

/// Command-line values that take precedence over the config file.
struct Overrides {
  std::optional<fs::path> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> steps;
  std::optional<double> threshold;
  std::optional<std::vector<int>> windows;
  std::optional<std::string> prior_mode;
  std::optional<unsigned> threads;
};

/// Parses and checks a config file. Relative paths resolve against the
/// config file's directory. Every referenced file must exist. Throws
/// ConfigError naming the offending field.
ProjectConfig load_config(const fs::path& path);
ProjectConfig parse_config(const std::string& text, const fs::path& base_dir);

void apply_overrides(ProjectConfig& config, const Overrides& overrides);

/// Input rasters for one calibration period, checked against the legend and
/// each other.
struct PeriodData {
  CalibrationPair pair;
};

std::optional<Mask> load_mask(const ProjectConfig& config);
PeriodData load_period(const ProjectConfig& config, const PeriodConfig& period);
std::vector<VariableLayer> load_variables(const ProjectConfig& config, const GridHeader& reference,
                                          unsigned threads);

}  // namespace landca::cli
