#include "project.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "landca/ascii_grid.hpp"
#include "landca/map_algebra.hpp"

namespace landca::cli {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError("config: " + where + ": " + what);
}

// A JSON node plus its dotted location, for field-level messages.
struct Node {
  const json& j;
  std::string where;

  bool has(const char* key) const { return j.is_object() && j.contains(key); }

  Node at(const char* key) const {
    if (!has(key)) fail(where, "missing field '" + std::string(key) + "'");
    return {j.at(key), where.empty() ? key : where + "." + key};
  }

  Node at(std::size_t k) const { return {j.at(k), where + "[" + std::to_string(k) + "]"}; }

  std::size_t size() const { return j.size(); }

  template <typename T>
  T as() const {
    try {
      return j.get<T>();
    } catch (const json::exception&) {
      fail(where, "wrong type");
    }
  }

  template <typename T>
  T get(const char* key) const {
    return at(key).as<T>();
  }

  template <typename T>
  T get_or(const char* key, T fallback) const {
    return has(key) ? at(key).as<T>() : fallback;
  }

  void require_array() const {
    if (!j.is_array()) fail(where, "expected an array");
  }

  void require_object() const {
    if (!j.is_object()) fail(where, "expected an object");
  }

  void allow_only(std::initializer_list<const char*> keys) const {
    require_object();
    for (const auto& [k, v] : j.items()) {
      bool known = false;
      for (const char* allowed : keys) known = known || k == allowed;
      if (!known) fail(where.empty() ? k : where + "." + k, "unknown field");
    }
  }
};

fs::path resolve(const fs::path& base, const Node& n) {
  const fs::path p = n.as<std::string>();
  const fs::path full = p.is_absolute() ? p : base / p;
  if (!fs::exists(full)) fail(n.where, "file not found: " + full.string());
  return full;
}

PatchParams parse_patch(const Node& n) {
  n.allow_only({"mean_patch_size", "patch_size_variance", "isometry"});
  PatchParams p;
  p.mean_patch_size = n.get_or("mean_patch_size", p.mean_patch_size);
  p.patch_size_variance = n.get_or("patch_size_variance", p.patch_size_variance);
  p.isometry = n.get_or("isometry", p.isometry);
  try {
    p.validate();
  } catch (const ConfigError& e) {
    fail(n.where, e.what());
  }
  return p;
}

std::vector<double> parse_breaks(const Node& v) {
  const Node b = v.at("breaks");
  b.require_array();
  BinningSpec spec = BinningSpec::continuous(b.as<std::vector<double>>());
  try {
    spec.validate();
  } catch (const ConfigError& e) {
    fail(b.where, e.what());
  }
  return spec.breaks;
}

bool valid_name(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
    if (!ok) return false;
  }
  return true;
}

}  // namespace

const PeriodConfig& ProjectConfig::period(const std::string& name) const {
  for (const auto& p : periods) {
    if (p.name == name) return p;
  }
  throw ConfigError("config: no period named '" + name + "'");
}

const PeriodConfig& ProjectConfig::simulated_period() const {
  return simulation.period.empty() ? periods.back() : period(simulation.period);
}

std::vector<TransitionKey> ProjectConfig::transition_keys() const {
  std::vector<TransitionKey> keys;
  for (const auto& t : transitions) keys.push_back(t.key);
  return keys;
}

ProjectConfig parse_config(const std::string& text, const fs::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: not valid JSON: ") + e.what());
  }
  const Node root{doc, ""};
  root.allow_only({"out", "legend", "periods", "zone", "variables", "transitions", "prior_mode", "threads",
                   "simulation", "validation"});

  ProjectConfig c;
  c.out = base_dir / root.get_or<std::string>("out", "landca_out");

  const Node legend = root.at("legend");
  legend.require_array();
  if (legend.size() == 0) fail(legend.where, "must not be empty");
  for (std::size_t k = 0; k < legend.size(); ++k) {
    const Node e = legend.at(k);
    e.allow_only({"id", "label"});
    const auto id = e.get<ClassId>("id");
    if (id < 0) fail(e.where + ".id", "class ids must be >= 0");
    if (!c.legend.emplace(id, e.get<std::string>("label")).second) fail(e.where + ".id", "duplicate class id");
  }

  const Node periods = root.at("periods");
  periods.require_array();
  if (periods.size() == 0) fail(periods.where, "needs at least one period");
  std::set<std::string> period_names;
  for (std::size_t k = 0; k < periods.size(); ++k) {
    const Node p = periods.at(k);
    p.allow_only({"name", "t0", "t1", "years"});
    PeriodConfig pc;
    pc.name = p.get<std::string>("name");
    if (!valid_name(pc.name)) fail(p.where + ".name", "use letters, digits, '.', '_' or '-'");
    if (!period_names.insert(pc.name).second) fail(p.where + ".name", "duplicate period name");
    pc.t0 = resolve(base_dir, p.at("t0"));
    pc.t1 = resolve(base_dir, p.at("t1"));
    pc.years = p.get<double>("years");
    if (!(pc.years > 0.0)) fail(p.where + ".years", "must be > 0");
    c.periods.push_back(std::move(pc));
  }

  if (root.has("zone")) {
    const Node z = root.at("zone");
    z.allow_only({"path", "keep"});
    c.zone = ZoneConfig{resolve(base_dir, z.at("path")), z.get_or<ClassId>("keep", 1)};
  }

  if (root.has("variables")) {
    const Node vars = root.at("variables");
    vars.require_array();
    std::set<std::string> names;
    for (std::size_t k = 0; k < vars.size(); ++k) {
      const Node v = vars.at(k);
      v.allow_only({"name", "kind", "path", "class", "breaks"});
      VariableConfig vc;
      vc.name = v.get<std::string>("name");
      if (!valid_name(vc.name)) fail(v.where + ".name", "use letters, digits, '.', '_' or '-'");
      if (!names.insert(vc.name).second) fail(v.where + ".name", "duplicate variable name");
      const auto kind = v.get<std::string>("kind");
      vc.path = resolve(base_dir, v.at("path"));
      if (kind == "categorical") {
        vc.kind = VariableKind::categorical;
        if (v.has("breaks") || v.has("class")) fail(v.where, "categorical variables take neither 'breaks' nor 'class'");
        vc.binning = BinningSpec::passthrough();
      } else if (kind == "continuous") {
        vc.kind = VariableKind::continuous;
        if (v.has("class")) fail(v.where + ".class", "only distance variables take a target class");
        vc.binning = BinningSpec::continuous(parse_breaks(v));
      } else if (kind == "distance") {
        vc.kind = VariableKind::distance;
        vc.target = v.get<ClassId>("class");
        vc.binning = BinningSpec::continuous(parse_breaks(v));
      } else {
        fail(v.where + ".kind", "expected categorical, continuous or distance");
      }
      c.variables.push_back(std::move(vc));
    }
  }

  const Node trans = root.at("transitions");
  trans.require_array();
  std::set<TransitionKey> seen;
  for (std::size_t k = 0; k < trans.size(); ++k) {
    const Node t = trans.at(k);
    t.allow_only({"from", "to", "expander_fraction", "expander", "patcher"});
    TransitionSettings s;
    s.key = {t.get<ClassId>("from"), t.get<ClassId>("to")};
    if (!c.legend.contains(s.key.from)) fail(t.where + ".from", "class not in legend");
    if (!c.legend.contains(s.key.to)) fail(t.where + ".to", "class not in legend");
    if (s.key.from == s.key.to) fail(t.where, "from and to must differ");
    if (!seen.insert(s.key).second) fail(t.where, "duplicate transition " + to_string(s.key));
    s.expander_fraction = t.get_or("expander_fraction", s.expander_fraction);
    if (!(s.expander_fraction >= 0.0 && s.expander_fraction <= 1.0)) {
      fail(t.where + ".expander_fraction", "must be in [0, 1]");
    }
    if (t.has("expander")) s.expander = parse_patch(t.at("expander"));
    if (t.has("patcher")) s.patcher = parse_patch(t.at("patcher"));
    c.transitions.push_back(s);
  }

  if (root.has("prior_mode")) {
    const Node m = root.at("prior_mode");
    try {
      c.prior_mode = prior_mode_from_string(m.as<std::string>());
    } catch (const ConfigError& e) {
      fail(m.where, e.what());
    }
  }
  if (root.has("threads")) {
    const auto t = root.get<long long>("threads");
    if (t < 0) fail("threads", "must be >= 0");
    c.threads = static_cast<unsigned>(t);
  }

  if (root.has("simulation")) {
    const Node s = root.at("simulation");
    s.allow_only({"initial", "period", "steps", "seed"});
    if (s.has("initial")) c.simulation.initial = resolve(base_dir, s.at("initial"));
    c.simulation.period = s.get_or<std::string>("period", "");
    if (!c.simulation.period.empty() && !period_names.contains(c.simulation.period)) {
      fail("simulation.period", "no period named '" + c.simulation.period + "'");
    }
    c.simulation.steps = s.get_or("steps", c.simulation.steps);
    if (c.simulation.steps < 0) fail("simulation.steps", "must be >= 0");
    c.simulation.seed = s.get_or<std::uint64_t>("seed", 0);
  }

  if (root.has("validation")) {
    const Node v = root.at("validation");
    v.allow_only({"observed", "simulated", "windows", "threshold", "mode"});
    if (v.has("observed")) c.validation.observed = resolve(base_dir, v.at("observed"));
    if (v.has("simulated")) c.validation.simulated = resolve(base_dir, v.at("simulated"));
    c.validation.windows = v.get_or("windows", c.validation.windows);
    c.validation.threshold = v.get_or("threshold", c.validation.threshold);
    if (v.has("mode")) {
      try {
        c.validation.mode = window_mode_from_string(v.get<std::string>("mode"));
      } catch (const ConfigError& e) {
        fail("validation.mode", e.what());
      }
    }
  }
  if (c.validation.windows.empty()) fail("validation.windows", "must not be empty");
  for (std::size_t k = 0; k < c.validation.windows.size(); ++k) {
    if (c.validation.windows[k] < 1 || (k > 0 && c.validation.windows[k] <= c.validation.windows[k - 1])) {
      fail("validation.windows", "must be positive and strictly increasing");
    }
  }
  if (!(c.validation.threshold >= 0.0 && c.validation.threshold <= 1.0)) {
    fail("validation.threshold", "must be in [0, 1]");
  }
  return c;
}

ProjectConfig load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

void apply_overrides(ProjectConfig& config, const Overrides& o) {
  if (o.out) config.out = *o.out;
  if (o.seed) config.simulation.seed = *o.seed;
  if (o.steps) {
    if (*o.steps < 0) throw ConfigError("--steps must be >= 0");
    config.simulation.steps = *o.steps;
  }
  if (o.threshold) {
    if (!(*o.threshold >= 0.0 && *o.threshold <= 1.0)) throw ConfigError("--threshold must be in [0, 1]");
    config.validation.threshold = *o.threshold;
  }
  if (o.windows) config.validation.windows = *o.windows;
  if (o.prior_mode) config.prior_mode = prior_mode_from_string(*o.prior_mode);
  if (o.threads) config.threads = *o.threads;
}

std::optional<Mask> load_mask(const ProjectConfig& config) {
  if (!config.zone) return std::nullopt;
  return Mask(load_categorical_grid(config.zone->path), config.zone->keep);
}

PeriodData load_period(const ProjectConfig& config, const PeriodConfig& period) {
  PeriodData d{{load_categorical_grid(period.t0), load_categorical_grid(period.t1), period.years}};
  d.pair.validate();
  require_legend(d.pair.map_t0, config.legend, "period " + period.name + " t0");
  require_legend(d.pair.map_t1, config.legend, "period " + period.name + " t1");
  return d;
}

std::vector<VariableLayer> load_variables(const ProjectConfig& config, const GridHeader& reference,
                                          unsigned threads) {
  std::vector<VariableLayer> out;
  for (const auto& v : config.variables) {
    VariableLayer layer{v.name, CategoricalRaster(reference), v.binning};
    const std::string what = "variable '" + v.name + "'";
    switch (v.kind) {
      case VariableKind::categorical:
        layer.raster = load_categorical_grid(v.path);
        break;
      case VariableKind::continuous:
        layer.raster = load_continuous_grid(v.path);
        break;
      case VariableKind::distance:
        layer.raster = distance_transform(load_categorical_grid(v.path), v.target, threads);
        break;
    }
    const GridHeader& h = std::visit([](const auto& r) -> const GridHeader& { return r.header(); }, layer.raster);
    require_aligned(reference, h, what);
    out.push_back(std::move(layer));
  }
  return out;
}

}  // namespace landca::cli
