#include "commands.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "landca/ascii_grid.hpp"
#include "landca/map_algebra.hpp"
#include "landca/model_io.hpp"
#include "landca/parallel.hpp"

namespace landca::cli {
namespace {

using nlohmann::ordered_json;

std::string step_file(int step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "step_%04d.asc", step);
  return buf;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw DataError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string rates_csv(const std::vector<Model>& models) {
  std::string out = "period,from,to,from_label,to_label,rate,interval_years\n";
  for (const auto& m : models) {
    for (const auto& [key, r] : m.matrix.rates) {
      auto label = [&](ClassId id) {
        const auto it = m.legend.find(id);
        return it == m.legend.end() ? std::string() : it->second;
      };
      out += csv_field(m.period) + "," + std::to_string(key.from) + "," + std::to_string(key.to) + "," +
             csv_field(label(key.from)) + "," + csv_field(label(key.to)) + "," + format_real(r) + "," +
             format_real(m.matrix.interval_years) + "\n";
    }
  }
  return out;
}

std::string weights_csv(const std::vector<Model>& models) {
  std::string out = "period,from,to,variable,bin,w_plus,n_bin,n_bin_and_event\n";
  for (const auto& m : models) {
    for (const auto& e : m.weights.entries) {
      out += csv_field(m.period) + "," + std::to_string(e.transition.from) + "," + std::to_string(e.transition.to) +
             "," + csv_field(e.variable) + "," + std::to_string(e.bin) + "," + format_real(e.w_plus) + "," +
             std::to_string(e.n_bin) + "," + std::to_string(e.n_bin_and_event) + "\n";
    }
  }
  return out;
}

std::string diagnostics_csv(const std::vector<Model>& models) {
  std::string out = "period,var_a,var_b,cramers_v,chi_square,n,warning\n";
  for (const auto& m : models) {
    for (const auto& a : m.diagnostics) {
      out += csv_field(m.period) + "," + csv_field(a.var_a) + "," + csv_field(a.var_b) + "," +
             format_real(a.cramers_v) + "," + format_real(a.chi_square) + "," + std::to_string(a.n) + "," +
             (a.warn() ? "1" : "0") + "\n";
    }
  }
  return out;
}

BinnedLayers binned_variables(const ProjectConfig& config, const Model& model, const GridHeader& reference,
                              unsigned threads) {
  for (const auto& [name, spec] : model.weights.binning) {
    const auto v = std::find_if(config.variables.begin(), config.variables.end(),
                                [&](const VariableConfig& c) { return c.name == name; });
    if (v == config.variables.end()) throw DataError("model uses variable '" + name + "' missing from the config");
    if (v->binning.mode != spec.mode || v->binning.breaks != spec.breaks) {
      throw DataError("variable '" + name + "': config binning differs from the model's");
    }
  }
  const std::vector<VariableLayer> layers = load_variables(config, reference, threads);
  return bin_layers(layers);
}

fs::path last_simulated_grid(const fs::path& out) {
  const fs::path manifest = out / "steps" / "manifest.json";
  if (!fs::exists(manifest)) {
    throw DataError("no simulated map given and no simulation run found at " + manifest.string());
  }
  try {
    const auto j = ordered_json::parse(read_file(manifest));
    return out / "steps" / j.at("grids").back().at("file").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError("unreadable run manifest " + manifest.string() + ": " + e.what());
  }
}

}  // namespace

OutputDir::OutputDir(const fs::path& root) : root_(root), lock_(root / ".landca.lock") {
  fs::create_directories(root_);
  const int fd = ::open(lock_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
  if (fd < 0) {
    if (errno == EEXIST) {
      throw ConfigError("output directory " + root_.string() + " is in use (remove " + lock_.string() +
                        " if no other run is active)");
    }
    throw DataError("cannot create lock file " + lock_.string() + ": " + std::strerror(errno));
  }
  const std::string pid = std::to_string(::getpid()) + "\n";
  [[maybe_unused]] const auto n = ::write(fd, pid.data(), pid.size());
  ::close(fd);
}

OutputDir::~OutputDir() {
  std::error_code ec;
  fs::remove(lock_, ec);
}

void OutputDir::write_text(const fs::path& relative, const std::string& content) const {
  const fs::path target = root_ / relative;
  fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    os << content;
    if (!os) throw DataError("cannot write " + tmp.string());
  }
  fs::rename(tmp, target);
}

void OutputDir::write_grid(const fs::path& relative, const CategoricalRaster& grid) const {
  const fs::path target = root_ / relative;
  fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  save_grid(grid, tmp);
  fs::rename(tmp, target);
}

fs::path model_path(const fs::path& out, const std::string& period) {
  return out / "model" / (period + ".model.json");
}

std::vector<Model> cmd_calibrate(const ProjectConfig& config) {
  const unsigned threads = resolve_threads(config.threads);
  const std::optional<Mask> mask = load_mask(config);
  const std::vector<TransitionKey> keys = config.transition_keys();

  std::vector<Model> models;
  for (const auto& period : config.periods) {
    spdlog::info("calibrating period {}", period.name);
    const PeriodData data = load_period(config, period);
    if (mask) require_aligned(data.pair.map_t0.header(), mask->header(), "zone vs period " + period.name);
    const std::vector<VariableLayer> layers = load_variables(config, data.pair.map_t0.header(), threads);
    Model m = calibrate(data.pair, config.legend, keys, layers, mask, {config.prior_mode, threads});
    m.period = period.name;
    for (const auto& a : m.diagnostics) {
      if (a.warn()) {
        spdlog::warn("period {}: variables {} and {} are strongly associated (Cramer's V {:.3f})", period.name,
                     a.var_a, a.var_b, a.cramers_v);
      }
    }
    for (const auto& [key, r] : m.matrix.rates) spdlog::debug("{} {} rate {}", period.name, to_string(key), r);
    models.push_back(std::move(m));
  }

  const OutputDir out(config.out);
  for (const auto& m : models) out.write_text(fs::path("model") / (m.period + ".model.json"), model_to_json(m));
  out.write_text("model/rates.csv", rates_csv(models));
  out.write_text("model/weights.csv", weights_csv(models));
  out.write_text("model/diagnostics.csv", diagnostics_csv(models));
  spdlog::info("wrote {} model file(s) to {}", models.size(), (config.out / "model").string());
  return models;
}

SimulationResult cmd_simulate(const ProjectConfig& config, const SimulateOptions& options) {
  const unsigned threads = resolve_threads(config.threads);
  const PeriodConfig& period = config.simulated_period();
  const fs::path model_file = options.model.value_or(model_path(config.out, period.name));
  if (!fs::exists(model_file)) throw DataError("model file not found: " + model_file.string());
  const Model model = load_model(model_file);
  if (model.legend != config.legend) throw DataError("model legend differs from the config legend");

  const fs::path initial_path = config.simulation.initial.value_or(period.t0);
  const CategoricalRaster initial = load_categorical_grid(initial_path);
  require_legend(initial, config.legend, "initial map");
  const std::optional<Mask> mask = load_mask(config);
  if (mask) require_aligned(initial.header(), mask->header(), "zone vs initial map");
  const BinnedLayers variables = binned_variables(config, model, initial.header(), threads);

  spdlog::info("simulating {} step(s) from {} with seed {}", config.simulation.steps, initial_path.string(),
               config.simulation.seed);
  SimulationResult result = run_simulation(initial, model, variables, config.simulation.steps, config.transitions,
                                           config.simulation.seed, mask, threads);

  ordered_json manifest;
  manifest["format"] = "landca-run";
  manifest["version"] = 1;
  manifest["period"] = model.period;
  manifest["model"] = model_file.filename().string();
  manifest["seed"] = config.simulation.seed;
  manifest["steps"] = config.simulation.steps;
  auto rates = ordered_json::array();
  for (const auto& [key, r] : result.step_rates.matrix.rates) {
    rates.push_back({{"from", key.from}, {"to", key.to}, {"rate", r}});
  }
  manifest["step_rates"] = rates;
  auto grids = ordered_json::array();
  for (std::size_t s = 0; s < result.maps.size(); ++s) {
    auto counts = ordered_json::object();
    for (const auto& [id, label] : config.legend) {
      counts[std::to_string(id)] = count_class(result.maps[s], id);
    }
    ordered_json g{{"step", s}, {"file", step_file(static_cast<int>(s))}, {"class_counts", counts}};
    if (s > 0) {
      auto ts = ordered_json::array();
      for (const auto& t : result.steps[s - 1].transitions) {
        ts.push_back({{"from", t.key.from},
                      {"to", t.key.to},
                      {"eligible", t.eligible},
                      {"quota", t.quota},
                      {"expander_quota", t.expander_quota},
                      {"patcher_quota", t.patcher_quota},
                      {"expander_converted", t.expander_converted},
                      {"patcher_converted", t.patcher_converted},
                      {"reflow_converted", t.reflow_converted},
                      {"converted", t.converted},
                      {"shortfall", t.shortfall},
                      {"patcher_seeds", t.patcher_seeds.size()}});
        if (t.shortfall > 0) {
          spdlog::warn("step {}: {} fell short of its quota by {} cell(s)", s, to_string(t.key), t.shortfall);
        }
      }
      g["transitions"] = ts;
    }
    grids.push_back(g);
  }
  manifest["grids"] = grids;

  const OutputDir out(config.out);
  if (fs::exists(config.out / "steps")) {
    for (const auto& entry : fs::directory_iterator(config.out / "steps")) {
      const std::string name = entry.path().filename().string();
      if (name.starts_with("step_") && name.ends_with(".asc")) fs::remove(entry.path());
    }
  }
  for (std::size_t s = 0; s < result.maps.size(); ++s) {
    out.write_grid(fs::path("steps") / step_file(static_cast<int>(s)), result.maps[s]);
  }
  out.write_text("steps/manifest.json", manifest.dump(2) + "\n");
  spdlog::info("wrote {} grid(s) to {}", result.maps.size(), (config.out / "steps").string());
  return result;
}

std::string cmd_validate(const ProjectConfig& config, const ValidateOptions& options) {
  const unsigned threads = resolve_threads(config.threads);
  const fs::path observed_path =
      options.observed.value_or(config.validation.observed.value_or(config.simulated_period().t1));
  fs::path simulated_path;
  if (options.simulated) simulated_path = *options.simulated;
  else if (config.validation.simulated) simulated_path = *config.validation.simulated;
  else simulated_path = last_simulated_grid(config.out);

  CategoricalRaster observed = load_categorical_grid(observed_path);
  CategoricalRaster simulated = load_categorical_grid(simulated_path);
  require_aligned(observed.header(), simulated.header(), "observed vs simulated map");
  if (config.zone) {
    const CategoricalRaster zone = load_categorical_grid(config.zone->path);
    observed = apply_mask(observed, zone, config.zone->keep);
    simulated = apply_mask(simulated, zone, config.zone->keep);
  }
  const WindowMode mode = options.mode.value_or(config.validation.mode);
  const SimilarityCurve curve =
      multi_window_similarity(observed, simulated, config.legend, config.validation.windows, mode, threads);
  const CategoricalRaster diff = difference_map(observed, simulated, config.legend);
  const std::string summary = threshold_summary(config.validation.threshold,
                                                threshold_window(curve, config.validation.threshold));

  const OutputDir out(config.out);
  out.write_text("validation/similarity.csv", curve_to_csv(curve));
  out.write_grid("validation/difference.asc", diff);
  out.write_text("validation/summary.txt", summary + "\n");
  return summary;
}

ReportOptions default_report_options(const ProjectConfig& config) {
  ReportOptions o;
  o.out = config.out;
  o.threshold = config.validation.threshold;
  for (const auto& p : config.periods) {
    const fs::path m = model_path(config.out, p.name);
    if (fs::exists(m)) o.models.push_back(m);
  }
  const fs::path curve = config.out / "validation" / "similarity.csv";
  if (fs::exists(curve)) o.curves.push_back(curve);
  return o;
}

void cmd_report(const ReportOptions& options) {
  if (options.models.empty()) throw ConfigError("report needs at least one model file");
  std::vector<Model> models;
  std::set<std::string> periods;
  for (const auto& path : options.models) {
    Model m = load_model(path);
    if (m.period.empty()) m.period = path.stem().string();
    if (!models.empty() && m.legend != models.front().legend) {
      throw DataError("incompatible legends: " + path.string() + " vs " + options.models.front().string());
    }
    if (!periods.insert(m.period).second) throw DataError("period '" + m.period + "' appears in two model files");
    models.push_back(std::move(m));
  }
  std::vector<std::pair<std::string, SimilarityCurve>> curves;
  for (const auto& path : options.curves) curves.emplace_back(path.string(), load_curve_csv(path));

  struct Row {
    std::vector<std::optional<double>> w;  // one per period
    double amplitude = 0.0;
  };
  using Table = std::map<ClassId, Row>;
  std::map<std::pair<TransitionKey, std::string>, Table> tables;
  for (std::size_t p = 0; p < models.size(); ++p) {
    for (const auto& e : models[p].weights.entries) {
      Row& row = tables[{e.transition, e.variable}][e.bin];
      row.w.resize(models.size());
      row.w[p] = e.w_plus;
    }
  }
  for (auto& [id, table] : tables) {
    for (auto& [bin, row] : table) {
      row.w.resize(models.size());
      double lo = INFINITY, hi = -INFINITY;
      for (const auto& w : row.w) {
        if (!w) continue;
        lo = std::min(lo, *w);
        hi = std::max(hi, *w);
      }
      row.amplitude = hi > lo ? hi - lo : 0.0;
    }
  }

  const Legend& legend = models.front().legend;
  auto label = [&](ClassId id) {
    const auto it = legend.find(id);
    return it == legend.end() ? std::to_string(id) : it->second;
  };

  std::string wide = "from,to,variable,bin";
  for (const auto& m : models) wide += "," + csv_field(m.period);
  wide += ",amplitude,max_amplitude\n";
  std::string md = "# Model report\n\n## Transition rates\n\n| period | from | to | rate |\n|---|---|---|---|\n";
  for (const auto& m : models) {
    for (const auto& [key, r] : m.matrix.rates) {
      md += "| " + m.period + " | " + label(key.from) + " | " + label(key.to) + " | " + format_real(r, 4) + " |\n";
    }
  }
  if (!tables.empty()) md += "\n## Weights of evidence by period\n";
  for (const auto& [id, table] : tables) {
    ClassId flagged = kNoClass;
    double best = 0.0;
    for (const auto& [bin, row] : table) {
      if (row.amplitude > best) {
        best = row.amplitude;
        flagged = bin;
      }
    }
    md += "\n### " + label(id.first.from) + " -> " + label(id.first.to) + ", " + id.second + "\n\n| bin |";
    for (const auto& m : models) md += " " + m.period + " |";
    md += " amplitude |\n|---|";
    for (std::size_t p = 0; p < models.size(); ++p) md += "---|";
    md += "---|\n";
    for (const auto& [bin, row] : table) {
      wide += std::to_string(id.first.from) + "," + std::to_string(id.first.to) + "," + csv_field(id.second) + "," +
              std::to_string(bin);
      md += "| " + std::to_string(bin) + (bin == flagged ? " (max)" : "") + " |";
      for (const auto& w : row.w) {
        wide += "," + (w ? format_real(*w) : std::string());
        md += " " + (w ? format_real(*w, 4) : std::string("-")) + " |";
      }
      wide += "," + format_real(row.amplitude) + "," + (bin == flagged ? "1" : "0") + "\n";
      md += " " + format_real(row.amplitude, 4) + " |\n";
    }
    md += "\nSpread across bins:";
    for (std::size_t p = 0; p < models.size(); ++p) {
      double lo = INFINITY, hi = -INFINITY;
      for (const auto& [bin, row] : table) {
        if (!row.w[p]) continue;
        lo = std::min(lo, *row.w[p]);
        hi = std::max(hi, *row.w[p]);
      }
      md += " " + models[p].period + " " + (hi >= lo ? format_real(hi - lo, 4) : std::string("-")) +
            (p + 1 < models.size() ? ";" : "\n");
    }
  }

  std::string validation = "curve,threshold,window_cells,window_map_units\n";
  if (!curves.empty()) md += "\n## Validation\n\n";
  for (const auto& [name, curve] : curves) {
    const ThresholdWindow tw = threshold_window(curve, options.threshold);
    validation += csv_field(name) + "," + format_real(options.threshold) + "," + format_real(tw.cells) + "," +
                  format_real(tw.map_units) + "\n";
    md += "- `" + name + "`: " + threshold_summary(options.threshold, tw) + "\n";
  }

  const OutputDir out(options.out);
  out.write_text("report/rates.csv", rates_csv(models));
  out.write_text("report/weights_wide.csv", wide);
  out.write_text("report/validation.csv", validation);
  out.write_text("report/report.md", md);
}

}  // namespace landca::cli
