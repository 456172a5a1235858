#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "landca/calibration.hpp"
#include "landca/rng.hpp"

namespace landca {

/// Patch geometry for Expander/Patcher. Sizes are in cells.
struct PatchParams {
  double mean_patch_size = 1.0;
  double patch_size_variance = 0.0;
  double isometry = 1.0;

  void validate() const;

  friend bool operator==(const PatchParams&, const PatchParams&) = default;
};

/// Lognormal patch size with the configured mean and variance, rounded and
/// clamped to [1, max_size]. Variance 0 returns the rounded mean.
std::size_t draw_patch_size(const PatchParams& params, std::size_t max_size, RngStream& rng);

struct TransitionSettings {
  TransitionKey key;
  double expander_fraction = 0.5;
  PatchParams expander;
  PatchParams patcher;

  void validate() const;
};

struct TransitionPlan {
  TransitionSettings settings;
  std::size_t quota = 0;
};

using StepPlan = std::vector<TransitionPlan>;

/// Per-step rates: r_step = 1 - (1 - r)^(1/steps). Transitions with r = 1 and
/// steps > 1 stay at 1 and are listed in `absorbing`.
struct AnnualizedRates {
  TransitionMatrix matrix;
  std::vector<TransitionKey> absorbing;
};

AnnualizedRates annualize_rates(const TransitionMatrix& matrix, int steps);

/// Round half to even.
std::size_t bankers_round(double x);

/// Outcome of one operator call.
struct AllocationResult {
  std::size_t converted = 0;
  std::size_t shortfall = 0;
  std::vector<std::size_t> seeds;  // patch seed cells, in seeding order
  std::vector<std::size_t> order;  // every converted cell, in conversion order
};

/// Cells converted in the current step. A locked cell is never converted again.
using ConversionLock = std::vector<std::uint8_t>;

/// Grows existing patches of prob.transition.to into neighbouring cells of
/// class prob.transition.from.
///
/// Each patch is seeded at the highest-ranked frontier cell (an eligible cell
/// 8-adjacent to a destination cell at that moment), then grown to a drawn
/// patch size. Ranking is probability plus a seeded jitter in (0, 1e-9), ties
/// by ascending cell index. Growth picks among the patch's eligible neighbours
/// with weight p * isometry^(k/8), k = in-patch neighbours.
/// `map` and `lock` are updated in place; `lock` may be empty.
AllocationResult expander(CategoricalRaster& map, const ProbabilityRaster& prob, std::size_t quota,
                          const PatchParams& params, RngStream& rng, ConversionLock& lock);

/// Forms new patches of prob.transition.to away from existing ones.
///
/// Seeds are eligible cells not 8-adjacent to any destination cell of `map`
/// (or of `step_start` when given), taken in rank order. Each seed grows by
/// the same neighbour rule as expander.
AllocationResult patcher(CategoricalRaster& map, const ProbabilityRaster& prob, std::size_t quota,
                         const PatchParams& params, RngStream& rng, ConversionLock& lock,
                         const CategoricalRaster* step_start = nullptr);

struct TransitionReport {
  TransitionKey key;
  std::size_t eligible = 0;
  std::size_t quota = 0;
  std::size_t expander_quota = 0;
  std::size_t patcher_quota = 0;
  std::size_t expander_converted = 0;
  std::size_t patcher_converted = 0;
  std::size_t reflow_converted = 0;
  std::size_t converted = 0;
  std::size_t shortfall = 0;
  std::vector<std::size_t> patcher_seeds;
};

struct StepReport {
  int step = 0;
  std::vector<TransitionReport> transitions;
};

struct RunContext {
  std::uint64_t seed = 0;
  int step = 1;
  std::optional<Mask> mask;
  unsigned threads = 1;
};

/// Transitions sorted by descending quota, ties by (from, to).
StepPlan execution_order(StepPlan plan);

/// Quotas for one step: bankers_round(rate * cells of class `from` in mask).
StepPlan plan_step(const CategoricalRaster& map, const TransitionMatrix& step_rates,
                   std::span<const TransitionSettings> settings, const std::optional<Mask>& mask);

/// Applies every transition of `plan` to `map`. Probability surfaces are taken
/// from the map as it stood at the start of the step; each transition runs
/// Expander, then Patcher with Expander's shortfall, then one Expander reflow
/// pass with Patcher's shortfall. A cell converts at most once.
StepReport run_step(CategoricalRaster& map, const Model& model, const BinnedLayers& variables, const StepPlan& plan,
                    const RunContext& ctx);

struct SimulationResult {
  std::vector<CategoricalRaster> maps;  // maps[0] is the initial map
  std::vector<StepReport> steps;
  AnnualizedRates step_rates;
};

/// Runs `steps` steps with the model's rates split evenly over them.
SimulationResult run_simulation(const CategoricalRaster& initial, const Model& model, const BinnedLayers& variables,
                                int steps, std::span<const TransitionSettings> settings, std::uint64_t seed,
                                const std::optional<Mask>& mask = std::nullopt, unsigned threads = 1);

}  // namespace landca
