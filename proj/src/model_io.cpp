#include "landca/model_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace landca {
namespace {

using nlohmann::ordered_json;

constexpr const char* kFormat = "landca-model";
constexpr int kVersion = 1;

template <typename T>
T field(const ordered_json& j, const char* name, const char* where) {
  if (!j.contains(name)) throw DataError(std::string("model file: ") + where + " is missing '" + name + "'");
  try {
    return j.at(name).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("model file: ") + where + "." + name + ": " + e.what());
  }
}

}  // namespace

std::string model_to_json(const Model& model) {
  ordered_json j;
  j["format"] = kFormat;
  j["version"] = kVersion;
  j["period"] = model.period;

  auto legend = ordered_json::array();
  for (const auto& [id, label] : model.legend) legend.push_back({{"id", id}, {"label", label}});
  j["legend"] = legend;

  j["interval_years"] = model.matrix.interval_years;
  auto rates = ordered_json::array();
  for (const auto& [key, r] : model.matrix.rates) rates.push_back({{"from", key.from}, {"to", key.to}, {"rate", r}});
  j["rates"] = rates;

  j["prior_mode"] = to_string(model.weights.prior_mode);
  auto binning = ordered_json::object();
  for (const auto& [name, spec] : model.weights.binning) {
    binning[name] = {{"mode", to_string(spec.mode)}, {"breaks", spec.breaks}};
  }
  j["binning"] = binning;

  auto weights = ordered_json::array();
  for (const auto& e : model.weights.entries) {
    weights.push_back({{"from", e.transition.from},
                       {"to", e.transition.to},
                       {"variable", e.variable},
                       {"bin", e.bin},
                       {"w_plus", e.w_plus},
                       {"n_bin", e.n_bin},
                       {"n_bin_and_event", e.n_bin_and_event}});
  }
  j["weights"] = weights;

  auto diagnostics = ordered_json::array();
  for (const auto& a : model.diagnostics) {
    diagnostics.push_back({{"var_a", a.var_a},
                           {"var_b", a.var_b},
                           {"cramers_v", a.cramers_v},
                           {"chi_square", a.chi_square},
                           {"n", a.n},
                           {"warning", a.warn()}});
  }
  j["diagnostics"] = diagnostics;
  return j.dump(2) + "\n";
}

Model model_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("model file is not valid JSON: ") + e.what());
  }
  if (field<std::string>(j, "format", "model") != kFormat) throw DataError("model file: unexpected format tag");
  if (field<int>(j, "version", "model") != kVersion) throw DataError("model file: unsupported version");

  Model m;
  m.period = field<std::string>(j, "period", "model");
  for (const auto& l : field<ordered_json>(j, "legend", "model")) {
    m.legend[field<ClassId>(l, "id", "legend")] = field<std::string>(l, "label", "legend");
  }
  m.matrix.interval_years = field<double>(j, "interval_years", "model");
  for (const auto& r : field<ordered_json>(j, "rates", "model")) {
    const double rate = field<double>(r, "rate", "rates");
    if (!(rate >= 0.0 && rate <= 1.0)) throw DataError("model file: rate outside [0,1]");
    m.matrix.rates[{field<ClassId>(r, "from", "rates"), field<ClassId>(r, "to", "rates")}] = rate;
  }
  try {
    m.weights.prior_mode = prior_mode_from_string(field<std::string>(j, "prior_mode", "model"));
  } catch (const ConfigError& e) {
    throw DataError(std::string("model file: ") + e.what());
  }
  const ordered_json binning = field<ordered_json>(j, "binning", "model");
  for (const auto& [name, spec] : binning.items()) {
    BinningSpec b;
    try {
      b.mode = binning_mode_from_string(field<std::string>(spec, "mode", "binning"));
    } catch (const ConfigError& e) {
      throw DataError(std::string("model file: ") + e.what());
    }
    b.breaks = field<std::vector<double>>(spec, "breaks", "binning");
    m.weights.binning[name] = std::move(b);
  }
  for (const auto& w : field<ordered_json>(j, "weights", "model")) {
    WeightEntry e;
    e.transition = {field<ClassId>(w, "from", "weights"), field<ClassId>(w, "to", "weights")};
    e.variable = field<std::string>(w, "variable", "weights");
    e.bin = field<ClassId>(w, "bin", "weights");
    e.w_plus = field<double>(w, "w_plus", "weights");
    e.n_bin = field<std::size_t>(w, "n_bin", "weights");
    e.n_bin_and_event = field<std::size_t>(w, "n_bin_and_event", "weights");
    if (e.n_bin_and_event > e.n_bin) throw DataError("model file: n_bin_and_event exceeds n_bin");
    m.weights.entries.push_back(std::move(e));
  }
  if (j.contains("diagnostics")) {
    for (const auto& d : j.at("diagnostics")) {
      Association a;
      a.var_a = field<std::string>(d, "var_a", "diagnostics");
      a.var_b = field<std::string>(d, "var_b", "diagnostics");
      a.cramers_v = field<double>(d, "cramers_v", "diagnostics");
      a.chi_square = field<double>(d, "chi_square", "diagnostics");
      a.n = field<std::size_t>(d, "n", "diagnostics");
      m.diagnostics.push_back(std::move(a));
    }
  }
  return m;
}

void save_model(const Model& model, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw DataError("cannot write model file " + path.string());
  os << model_to_json(model);
  if (!os) throw DataError("write failed for model file " + path.string());
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read model file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return model_from_json(ss.str());
}

}  // namespace landca
