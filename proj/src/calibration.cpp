#include "landca/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

#include "landca/map_algebra.hpp"
#include "landca/parallel.hpp"

namespace landca {
namespace {

double logistic(double s) {
  if (s >= 0) return 1.0 / (1.0 + std::exp(-s));
  const double e = std::exp(s);
  return e / (1.0 + e);
}

}  // namespace

std::string to_string(const TransitionKey& key) {
  return std::to_string(key.from) + "->" + std::to_string(key.to);
}

void CalibrationPair::validate() const {
  require_aligned(map_t0.header(), map_t1.header(), "t0 vs t1 land-use map");
  if (!(years > 0) || !std::isfinite(years)) throw ConfigError("calibration interval must be positive years");
}

double TransitionMatrix::rate(const TransitionKey& key) const {
  const auto it = rates.find(key);
  return it == rates.end() ? 0.0 : it->second;
}

double TransitionMatrix::row_sum(ClassId from) const {
  double sum = 0.0;
  for (auto it = rates.lower_bound({from, std::numeric_limits<ClassId>::min()});
       it != rates.end() && it->first.from == from; ++it) {
    sum += it->second;
  }
  return sum;
}

TransitionMatrix compute_transition_matrix(const CalibrationPair& pair, const std::optional<Mask>& mask) {
  pair.validate();
  if (mask) require_aligned(pair.map_t0.header(), mask->header(), "mask vs land-use map");

  std::map<ClassId, std::size_t> source;
  std::map<TransitionKey, std::size_t> changed;
  std::set<ClassId> classes;
  for (std::size_t i = 0; i < pair.map_t0.size(); ++i) {
    if (!in_mask(mask, i) || pair.map_t0.is_nodata(i) || pair.map_t1.is_nodata(i)) continue;
    const ClassId a = pair.map_t0[i];
    const ClassId b = pair.map_t1[i];
    classes.insert(a);
    classes.insert(b);
    ++source[a];
    if (a != b) ++changed[{a, b}];
  }

  TransitionMatrix m;
  m.interval_years = pair.years;
  for (const auto& [from, n] : source) {
    for (ClassId to : classes) {
      if (to == from) continue;
      const auto it = changed.find({from, to});
      const std::size_t k = it == changed.end() ? 0 : it->second;
      m.rates[{from, to}] = static_cast<double>(k) / static_cast<double>(n);
    }
  }
  return m;
}

std::string to_string(PriorMode mode) {
  return mode == PriorMode::eq3_literal ? "eq3-literal" : "prior-logit";
}

PriorMode prior_mode_from_string(const std::string& s) {
  if (s == "eq3-literal") return PriorMode::eq3_literal;
  if (s == "prior-logit") return PriorMode::prior_logit;
  throw ConfigError("unknown prior mode '" + s + "' (expected eq3-literal or prior-logit)");
}

std::vector<WeightEntry> WeightsTable::for_transition(const TransitionKey& key) const {
  std::vector<WeightEntry> out;
  for (const auto& e : entries) {
    if (e.transition == key) out.push_back(e);
  }
  return out;
}

std::vector<WeightEntry> compute_weights(const CalibrationPair& pair, const TransitionKey& key,
                                         const std::string& variable, const CategoricalRaster& binned,
                                         const std::optional<Mask>& mask, std::span<const ClassId> bin_universe) {
  pair.validate();
  require_aligned(pair.map_t0.header(), binned.header(), "variable '" + variable + "' vs land-use map");
  if (mask) require_aligned(pair.map_t0.header(), mask->header(), "mask vs land-use map");
  if (key.from == key.to) throw ConfigError("transition " + to_string(key) + " has from == to");

  struct Counts {
    std::size_t cells = 0;
    std::size_t events = 0;
  };
  std::map<ClassId, Counts> bins;
  for (ClassId b : bin_universe) bins[b];
  std::size_t eligible = 0;
  std::size_t events = 0;
  for (std::size_t i = 0; i < pair.map_t0.size(); ++i) {
    if (pair.map_t0[i] != key.from || pair.map_t1.is_nodata(i) || binned.is_nodata(i) || !in_mask(mask, i)) {
      continue;
    }
    const bool event = pair.map_t1[i] == key.to;
    Counts& c = bins[binned[i]];
    ++c.cells;
    ++eligible;
    if (event) {
      ++c.events;
      ++events;
    }
  }
  if (eligible == 0) {
    throw DataError("weights for " + to_string(key) + " / " + variable + ": no eligible cells of class " +
                    std::to_string(key.from));
  }
  if (events == 0) {
    throw DataError("weights for " + to_string(key) + " / " + variable + ": no cells converted, weights undefined");
  }

  std::vector<WeightEntry> out;
  out.reserve(bins.size());
  for (const auto& [bin, c] : bins) {
    WeightEntry e{key, variable, bin, 0.0, c.cells, c.events};
    if (c.cells > 0) {
      // Quadrants: bin & event, bin & non-event, other & event, other & non-event.
      double a = static_cast<double>(c.events);
      double b = static_cast<double>(c.cells - c.events);
      double cc = static_cast<double>(events - c.events);
      double d = static_cast<double>((eligible - events) - (c.cells - c.events));
      if (a == 0 || b == 0 || cc == 0 || d == 0) {
        a += 0.5;
        b += 0.5;
        cc += 0.5;
        d += 0.5;
      }
      e.w_plus = std::log((a / (a + cc)) / (b / (b + d)));
    }
    out.push_back(std::move(e));
  }
  return out;
}

ProbabilityRaster posterior_probability_map(const WeightsTable& weights, const TransitionKey& key,
                                            const BinnedLayers& variables, const CategoricalRaster& current,
                                            const std::optional<Mask>& mask, const TransitionMatrix* prior,
                                            unsigned threads) {
  if (mask) require_aligned(current.header(), mask->header(), "mask vs land-use map");

  struct Lookup {
    const CategoricalRaster* raster;
    std::unordered_map<ClassId, double> w;
    std::string name;
  };
  std::map<std::string, Lookup> lookups;
  for (const auto& e : weights.entries) {
    if (e.transition != key) continue;
    auto it = lookups.find(e.variable);
    if (it == lookups.end()) {
      const auto layer = variables.find(e.variable);
      if (layer == variables.end()) {
        throw DataError("posterior for " + to_string(key) + ": variable '" + e.variable + "' not supplied");
      }
      require_aligned(current.header(), layer->second.header(), "variable '" + e.variable + "' vs land-use map");
      it = lookups.emplace(e.variable, Lookup{&layer->second, {}, e.variable}).first;
    }
    it->second.w[e.bin] = e.w_plus;
  }

  double offset = 0.0;
  if (weights.prior_mode == PriorMode::prior_logit) {
    if (prior == nullptr) throw ConfigError("prior-logit posterior needs a transition matrix");
    const double r = prior->rate(key);
    offset = std::log(r) - std::log1p(-r);  // +-inf at r = 0 or 1, handled by logistic
  }

  std::vector<const Lookup*> order;
  for (const auto& [name, l] : lookups) order.push_back(&l);

  ProbabilityRaster out{ContinuousRaster(current.header()), key};
  parallel_for(current.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      if (current[i] != key.from || !in_mask(mask, i)) continue;
      double s = 0.0;
      bool valid = true;
      for (const Lookup* l : order) {
        const ClassId bin = (*l->raster)[i];
        if (bin == kNoClass) {
          valid = false;
          break;
        }
        const auto w = l->w.find(bin);
        if (w == l->w.end()) {
          throw DataError("posterior for " + to_string(key) + ": variable '" + l->name + "' bin " +
                          std::to_string(bin) + " has no weight (binning mismatch)");
        }
        s += w->second;
      }
      if (valid) out.values[i] = logistic(offset + s);
    }
  });
  return out;
}

Association independence_check(const CategoricalRaster& var_a, const CategoricalRaster& var_b,
                               const std::optional<Mask>& mask) {
  require_aligned(var_a.header(), var_b.header(), "independence check layers");
  if (mask) require_aligned(var_a.header(), mask->header(), "mask vs variable");

  std::map<std::pair<ClassId, ClassId>, std::size_t> table;
  std::map<ClassId, std::size_t> rows;
  std::map<ClassId, std::size_t> cols;
  std::size_t n = 0;
  for (std::size_t i = 0; i < var_a.size(); ++i) {
    if (var_a.is_nodata(i) || var_b.is_nodata(i) || !in_mask(mask, i)) continue;
    ++table[{var_a[i], var_b[i]}];
    ++rows[var_a[i]];
    ++cols[var_b[i]];
    ++n;
  }
  if (rows.size() < 2 || cols.size() < 2) {
    throw DataError("independence check: degenerate contingency table (" + std::to_string(rows.size()) + "x" +
                    std::to_string(cols.size()) + " non-empty), Cramer's V undefined");
  }
  double chi2 = 0.0;
  const double total = static_cast<double>(n);
  for (const auto& [ra, rn] : rows) {
    for (const auto& [cb, cn] : cols) {
      const double expected = static_cast<double>(rn) * static_cast<double>(cn) / total;
      const auto it = table.find({ra, cb});
      const double observed = it == table.end() ? 0.0 : static_cast<double>(it->second);
      chi2 += (observed - expected) * (observed - expected) / expected;
    }
  }
  const double k = static_cast<double>(std::min(rows.size(), cols.size()) - 1);
  Association a;
  a.chi_square = chi2;
  a.n = n;
  a.cramers_v = std::min(1.0, std::sqrt(chi2 / (total * k)));
  return a;
}

BinnedLayers bin_layers(std::span<const VariableLayer> layers) {
  BinnedLayers out;
  for (const auto& layer : layers) {
    layer.binning.validate();
    if (out.contains(layer.name)) throw ConfigError("duplicate variable name '" + layer.name + "'");
    if (layer.binning.mode == BinningMode::continuous_breaks) {
      if (const auto* cont = std::get_if<ContinuousRaster>(&layer.raster)) {
        out.emplace(layer.name, bin_continuous(*cont, layer.binning));
      } else {
        const auto& cat = std::get<CategoricalRaster>(layer.raster);
        ContinuousRaster as_real(cat.header());
        for (std::size_t i = 0; i < cat.size(); ++i) {
          if (!cat.is_nodata(i)) as_real[i] = cat[i];
        }
        out.emplace(layer.name, bin_continuous(as_real, layer.binning));
      }
    } else {
      const auto* cat = std::get_if<CategoricalRaster>(&layer.raster);
      if (cat == nullptr) {
        throw ConfigError("variable '" + layer.name + "' is continuous and needs continuous-breaks binning");
      }
      out.emplace(layer.name, *cat);
    }
  }
  return out;
}

std::vector<ClassId> bin_universe(const CategoricalRaster& binned, const BinningSpec& spec,
                                  const std::optional<Mask>& mask) {
  std::vector<ClassId> out;
  if (spec.mode == BinningMode::continuous_breaks) {
    for (std::size_t k = 0; k < spec.bin_count(); ++k) out.push_back(static_cast<ClassId>(k));
    return out;
  }
  std::set<ClassId> seen;
  for (std::size_t i = 0; i < binned.size(); ++i) {
    if (!binned.is_nodata(i) && in_mask(mask, i)) seen.insert(binned[i]);
  }
  return {seen.begin(), seen.end()};
}

Model calibrate(const CalibrationPair& pair, const Legend& legend, std::span<const TransitionKey> transitions,
                std::span<const VariableLayer> variables, const std::optional<Mask>& mask,
                const CalibrateOptions& options) {
  pair.validate();
  require_legend(pair.map_t0, legend, "t0 land-use map");
  require_legend(pair.map_t1, legend, "t1 land-use map");
  for (const auto& key : transitions) {
    if (!legend.contains(key.from) || !legend.contains(key.to)) {
      throw ConfigError("transition " + to_string(key) + " uses a class outside the legend");
    }
    if (key.from == key.to) throw ConfigError("transition " + to_string(key) + " has from == to");
  }

  Model model;
  model.legend = legend;
  model.matrix = compute_transition_matrix(pair, mask);
  model.weights.prior_mode = options.prior_mode;

  const BinnedLayers binned = bin_layers(variables);
  std::vector<std::vector<ClassId>> universes;
  for (const auto& v : variables) {
    model.weights.binning[v.name] = v.binning;
    universes.push_back(bin_universe(binned.at(v.name), v.binning, mask));
  }

  // One slot per (transition, variable); slots are filled independently and
  // concatenated in index order.
  const std::size_t nv = variables.size();
  std::vector<std::vector<WeightEntry>> slots(transitions.size() * nv);
  parallel_for(slots.size(), options.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t s = begin; s < end; ++s) {
      const auto& var = variables[s % nv];
      slots[s] = compute_weights(pair, transitions[s / nv], var.name, binned.at(var.name), mask, universes[s % nv]);
    }
  });
  for (auto& slot : slots) {
    model.weights.entries.insert(model.weights.entries.end(), slot.begin(), slot.end());
  }

  for (std::size_t a = 0; a < nv; ++a) {
    for (std::size_t b = a + 1; b < nv; ++b) {
      try {
        Association assoc =
            independence_check(binned.at(variables[a].name), binned.at(variables[b].name), mask);
        assoc.var_a = variables[a].name;
        assoc.var_b = variables[b].name;
        model.diagnostics.push_back(assoc);
      } catch (const DataError&) {
        // A single-bin layer has no defined association; nothing to report.
      }
    }
  }
  return model;
}

}  // namespace landca
