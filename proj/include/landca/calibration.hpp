#pragma once

#include <compare>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "landca/raster.hpp"

namespace landca {

struct TransitionKey {
  ClassId from = 0;
  ClassId to = 0;

  friend auto operator<=>(const TransitionKey&, const TransitionKey&) = default;
};

std::string to_string(const TransitionKey& key);

/// Two dated land-use maps of the same area, `years` apart.
struct CalibrationPair {
  CategoricalRaster map_t0;
  CategoricalRaster map_t1;
  double years = 1.0;

  void validate() const;
};

/// Fraction of each source class converted to each other class over the
/// calibration interval. Source classes with no cells have no row.
struct TransitionMatrix {
  std::map<TransitionKey, double> rates;
  double interval_years = 1.0;

  double rate(const TransitionKey& key) const;
  double row_sum(ClassId from) const;
};

TransitionMatrix compute_transition_matrix(const CalibrationPair& pair, const std::optional<Mask>& mask = std::nullopt);

/// Weight of evidence for one bin of one variable, with the counts it came from.
struct WeightEntry {
  TransitionKey transition;
  std::string variable;
  ClassId bin = 0;
  double w_plus = 0.0;
  std::size_t n_bin = 0;            // eligible cells in the bin
  std::size_t n_bin_and_event = 0;  // of which converted

  friend bool operator==(const WeightEntry&, const WeightEntry&) = default;
};

/// How the posterior combines the weights: eq3_literal is logistic(sum W+),
/// prior_logit is logistic(logit(rate) + sum W+).
enum class PriorMode { eq3_literal, prior_logit };

std::string to_string(PriorMode mode);
PriorMode prior_mode_from_string(const std::string& s);

struct WeightsTable {
  std::vector<WeightEntry> entries;
  std::map<std::string, BinningSpec> binning;
  PriorMode prior_mode = PriorMode::eq3_literal;

  std::vector<WeightEntry> for_transition(const TransitionKey& key) const;
};

/// Weights of evidence for every bin of `variable` on transition `key`.
///
/// Eligible cells have t0 == key.from and valid data in t1 and the variable.
/// Event cells are eligible cells with t1 == key.to. For bin k:
///
///   W+(k) = ln[ (n(k & D) / n(D)) / (n(k & ~D) / n(~D)) ]
///
/// If any of the four bin/event quadrants is empty, 0.5 is added to each of
/// them. Bins listed in `bin_universe` that hold no eligible cells get W+ = 0.
/// Entries are returned sorted by bin. Throws DataError when there are no
/// eligible or no event cells.
std::vector<WeightEntry> compute_weights(const CalibrationPair& pair, const TransitionKey& key,
                                         const std::string& variable, const CategoricalRaster& binned,
                                         const std::optional<Mask>& mask = std::nullopt,
                                         std::span<const ClassId> bin_universe = {});

struct ProbabilityRaster {
  ContinuousRaster values;
  TransitionKey transition;
};

using BinnedLayers = std::map<std::string, CategoricalRaster>;

/// Posterior transition probability for every cell of class key.from.
/// Other cells, masked cells and cells where any variable is NODATA are NODATA.
/// Throws DataError when a variable is missing or a cell's bin has no weight.
ProbabilityRaster posterior_probability_map(const WeightsTable& weights, const TransitionKey& key,
                                            const BinnedLayers& variables, const CategoricalRaster& current,
                                            const std::optional<Mask>& mask = std::nullopt,
                                            const TransitionMatrix* prior = nullptr, unsigned threads = 1);

inline constexpr double kIndependenceWarning = 0.7;

struct Association {
  std::string var_a;
  std::string var_b;
  double cramers_v = 0.0;
  double chi_square = 0.0;
  std::size_t n = 0;

  bool warn() const noexcept { return cramers_v >= kIndependenceWarning; }
};

/// Cramér's V of the bin co-occurrence table over cells valid in both layers.
/// Throws DataError when the table has fewer than two non-empty rows or columns.
Association independence_check(const CategoricalRaster& var_a, const CategoricalRaster& var_b,
                               const std::optional<Mask>& mask = std::nullopt);

/// An explanatory layer as supplied by the user, before binning.
struct VariableLayer {
  std::string name;
  std::variant<CategoricalRaster, ContinuousRaster> raster;
  BinningSpec binning;
};

/// Applies each layer's BinningSpec. Passthrough layers must be categorical.
BinnedLayers bin_layers(std::span<const VariableLayer> layers);

/// Bins a layer can take: every break bin, or every class present (under mask).
std::vector<ClassId> bin_universe(const CategoricalRaster& binned, const BinningSpec& spec,
                                  const std::optional<Mask>& mask);

struct Model {
  Legend legend;
  std::string period;
  TransitionMatrix matrix;
  WeightsTable weights;
  std::vector<Association> diagnostics;
};

struct CalibrateOptions {
  PriorMode prior_mode = PriorMode::eq3_literal;
  unsigned threads = 1;
};

/// Transition matrix plus weights for every (transition, variable) pair and
/// pairwise independence diagnostics. Output is independent of the thread count.
Model calibrate(const CalibrationPair& pair, const Legend& legend, std::span<const TransitionKey> transitions,
                std::span<const VariableLayer> variables, const std::optional<Mask>& mask = std::nullopt,
                const CalibrateOptions& options = {});

}  // namespace landca
