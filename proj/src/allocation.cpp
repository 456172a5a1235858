#include "landca/allocation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <set>

namespace landca {
namespace {

struct Ranked {
  double priority;
  std::size_t index;
};

// Orders a max-heap: higher priority first, then lower cell index.
struct RanksBelow {
  bool operator()(const Ranked& a, const Ranked& b) const noexcept {
    if (a.priority != b.priority) return a.priority < b.priority;
    return a.index > b.index;
  }
};

class Neighbourhood {
 public:
  explicit Neighbourhood(const GridHeader& h) : ncols_(h.ncols), nrows_(h.nrows) {}

  // Fills `out` with the in-bounds 8-neighbours of cell i; returns how many.
  std::size_t of(std::size_t i, std::array<std::size_t, 8>& out) const noexcept {
    const auto row = static_cast<std::int64_t>(i) / ncols_;
    const auto col = static_cast<std::int64_t>(i) % ncols_;
    std::size_t n = 0;
    for (std::int64_t dr = -1; dr <= 1; ++dr) {
      for (std::int64_t dc = -1; dc <= 1; ++dc) {
        if (dr == 0 && dc == 0) continue;
        const std::int64_t r = row + dr;
        const std::int64_t c = col + dc;
        if (r < 0 || c < 0 || r >= nrows_ || c >= ncols_) continue;
        out[n++] = static_cast<std::size_t>(r * ncols_ + c);
      }
    }
    return n;
  }

 private:
  std::int64_t ncols_;
  std::int64_t nrows_;
};

// Shared machinery for one operator call on one transition.
class Allocator {
 public:
  Allocator(CategoricalRaster& map, const ProbabilityRaster& prob, const PatchParams& params, RngStream& rng,
            ConversionLock& lock)
      : map_(map), prob_(prob), key_(prob.transition), params_(params), rng_(rng), lock_(lock),
        nb_(map.header()) {
    require_aligned(map.header(), prob.values.header(), "probability map vs land-use map");
    params.validate();
    if (lock_.size() != map_.size()) lock_.assign(map_.size(), 0);
  }

  bool eligible(std::size_t i) const noexcept {
    return map_[i] == key_.from && !prob_.values.is_nodata(i) && lock_[i] == 0;
  }

  bool touches_destination(std::size_t i, const CategoricalRaster& map) const noexcept {
    std::array<std::size_t, 8> nbrs{};
    const std::size_t n = nb_.of(i, nbrs);
    for (std::size_t k = 0; k < n; ++k) {
      if (map[nbrs[k]] == key_.to) return true;
    }
    return false;
  }

  double priority(std::size_t i) const noexcept { return prob_.values[i] + rng_.jitter(i); }

  const Neighbourhood& neighbourhood() const noexcept { return nb_; }

  // Converts `seed`, then grows the patch to at most `target` cells.
  // `on_convert` is called for every converted cell.
  template <typename OnConvert>
  std::size_t grow_patch(std::size_t seed, std::size_t target, AllocationResult& result, OnConvert&& on_convert) {
    std::set<std::size_t> patch;
    std::set<std::size_t> candidates;
    std::array<std::size_t, 8> nbrs{};

    auto convert = [&](std::size_t i) {
      map_[i] = key_.to;
      lock_[i] = 1;
      patch.insert(i);
      candidates.erase(i);
      result.order.push_back(i);
      on_convert(i);
      const std::size_t n = nb_.of(i, nbrs);
      for (std::size_t k = 0; k < n; ++k) {
        if (eligible(nbrs[k])) candidates.insert(nbrs[k]);
      }
    };

    convert(seed);
    std::vector<std::size_t> pool;
    std::vector<double> weights;
    while (patch.size() < target && !candidates.empty()) {
      pool.assign(candidates.begin(), candidates.end());
      weights.resize(pool.size());
      double total = 0.0;
      for (std::size_t c = 0; c < pool.size(); ++c) {
        const std::size_t n = nb_.of(pool[c], nbrs);
        int in_patch = 0;
        for (std::size_t k = 0; k < n; ++k) in_patch += patch.contains(nbrs[k]) ? 1 : 0;
        weights[c] = prob_.values[pool[c]] * std::pow(params_.isometry, in_patch / 8.0);
        total += weights[c];
      }
      std::size_t pick = 0;
      if (total > 0.0 && std::isfinite(total)) {
        const double u = rng_.uniform() * total;
        double acc = 0.0;
        pick = pool.size() - 1;
        for (std::size_t c = 0; c < pool.size(); ++c) {
          acc += weights[c];
          if (u < acc) {
            pick = c;
            break;
          }
        }
      } else {
        // All weights zero: fall back to the ranking rule.
        for (std::size_t c = 1; c < pool.size(); ++c) {
          if (RanksBelow{}({priority(pool[pick]), pool[pick]}, {priority(pool[c]), pool[c]})) pick = c;
        }
      }
      convert(pool[pick]);
    }
    return patch.size();
  }

 private:
  CategoricalRaster& map_;
  const ProbabilityRaster& prob_;
  TransitionKey key_;
  const PatchParams& params_;
  RngStream& rng_;
  ConversionLock& lock_;
  Neighbourhood nb_;
};

}  // namespace

void PatchParams::validate() const {
  if (!(mean_patch_size >= 1.0) || !std::isfinite(mean_patch_size)) {
    throw ConfigError("mean_patch_size must be >= 1");
  }
  if (!(patch_size_variance >= 0.0) || !std::isfinite(patch_size_variance)) {
    throw ConfigError("patch_size_variance must be >= 0");
  }
  if (!(isometry >= 0.0) || !std::isfinite(isometry)) throw ConfigError("isometry must be >= 0");
}

std::size_t draw_patch_size(const PatchParams& params, std::size_t max_size, RngStream& rng) {
  if (max_size == 0) return 0;
  double size = params.mean_patch_size;
  if (params.patch_size_variance > 0.0) {
    // Method of moments: E[X] = mean, Var[X] = variance.
    const double m = params.mean_patch_size;
    const double sigma2 = std::log1p(params.patch_size_variance / (m * m));
    const double mu = std::log(m) - 0.5 * sigma2;
    size = std::exp(mu + std::sqrt(sigma2) * rng.normal());
  }
  const double rounded = std::round(size);
  if (!(rounded >= 1.0)) return 1;
  if (rounded >= static_cast<double>(max_size)) return max_size;
  return static_cast<std::size_t>(rounded);
}

void TransitionSettings::validate() const {
  if (key.from == key.to) throw ConfigError("transition " + to_string(key) + " has from == to");
  if (!(expander_fraction >= 0.0 && expander_fraction <= 1.0)) {
    throw ConfigError("expander_fraction for " + to_string(key) + " must be in [0,1]");
  }
  expander.validate();
  patcher.validate();
}

AnnualizedRates annualize_rates(const TransitionMatrix& matrix, int steps) {
  if (steps < 1) throw ConfigError("annualize_rates needs steps >= 1");
  AnnualizedRates out;
  out.matrix.interval_years = matrix.interval_years / steps;
  for (const auto& [key, r] : matrix.rates) {
    if (steps == 1) {
      out.matrix.rates[key] = r;
    } else if (r >= 1.0) {
      out.matrix.rates[key] = 1.0;
      out.absorbing.push_back(key);
    } else {
      out.matrix.rates[key] = 1.0 - std::pow(1.0 - r, 1.0 / steps);
    }
  }
  return out;
}

std::size_t bankers_round(double x) {
  if (!(x > 0.0)) return 0;
  const double f = std::floor(x);
  const double frac = x - f;
  auto base = static_cast<std::size_t>(f);
  if (frac > 0.5) return base + 1;
  if (frac < 0.5) return base;
  return base % 2 == 0 ? base : base + 1;
}

AllocationResult expander(CategoricalRaster& map, const ProbabilityRaster& prob, std::size_t quota,
                          const PatchParams& params, RngStream& rng, ConversionLock& lock) {
  AllocationResult result;
  if (quota == 0) return result;
  Allocator alloc(map, prob, params, rng, lock);

  std::priority_queue<Ranked, std::vector<Ranked>, RanksBelow> frontier;
  std::vector<std::uint8_t> queued(map.size(), 0);
  auto enqueue = [&](std::size_t i) {
    if (queued[i] || !alloc.eligible(i)) return;
    queued[i] = 1;
    frontier.push({alloc.priority(i), i});
  };
  for (std::size_t i = 0; i < map.size(); ++i) {
    if (alloc.eligible(i) && alloc.touches_destination(i, map)) enqueue(i);
  }

  std::array<std::size_t, 8> nbrs{};
  auto on_convert = [&](std::size_t c) {
    const std::size_t n = alloc.neighbourhood().of(c, nbrs);
    for (std::size_t k = 0; k < n; ++k) enqueue(nbrs[k]);
  };

  std::size_t remaining = quota;
  while (remaining > 0 && !frontier.empty()) {
    const Ranked top = frontier.top();
    frontier.pop();
    if (!alloc.eligible(top.index)) continue;  // absorbed by an earlier patch
    result.seeds.push_back(top.index);
    const std::size_t target = draw_patch_size(params, remaining, rng);
    remaining -= alloc.grow_patch(top.index, target, result, on_convert);
  }
  result.converted = quota - remaining;
  result.shortfall = remaining;
  return result;
}

AllocationResult patcher(CategoricalRaster& map, const ProbabilityRaster& prob, std::size_t quota,
                         const PatchParams& params, RngStream& rng, ConversionLock& lock,
                         const CategoricalRaster* step_start) {
  AllocationResult result;
  if (quota == 0) return result;
  Allocator alloc(map, prob, params, rng, lock);
  if (step_start != nullptr) require_aligned(map.header(), step_start->header(), "step-start map");

  std::vector<Ranked> ranked;
  for (std::size_t i = 0; i < map.size(); ++i) {
    if (alloc.eligible(i)) ranked.push_back({alloc.priority(i), i});
  }
  std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) { return RanksBelow{}(b, a); });

  // Destination cells only accumulate, so a candidate rejected for adjacency
  // never becomes a valid seed later in this call.
  std::size_t remaining = quota;
  for (const Ranked& cand : ranked) {
    if (remaining == 0) break;
    const std::size_t i = cand.index;
    if (!alloc.eligible(i) || alloc.touches_destination(i, map)) continue;
    if (step_start != nullptr && alloc.touches_destination(i, *step_start)) continue;
    result.seeds.push_back(i);
    const std::size_t target = draw_patch_size(params, remaining, rng);
    remaining -= alloc.grow_patch(i, target, result, [](std::size_t) {});
  }
  result.converted = quota - remaining;
  result.shortfall = remaining;
  return result;
}

StepPlan execution_order(StepPlan plan) {
  std::stable_sort(plan.begin(), plan.end(), [](const TransitionPlan& a, const TransitionPlan& b) {
    if (a.quota != b.quota) return a.quota > b.quota;
    return a.settings.key < b.settings.key;
  });
  return plan;
}

StepPlan plan_step(const CategoricalRaster& map, const TransitionMatrix& step_rates,
                   std::span<const TransitionSettings> settings, const std::optional<Mask>& mask) {
  StepPlan plan;
  for (const auto& s : settings) {
    s.validate();
    std::size_t eligible = 0;
    for (std::size_t i = 0; i < map.size(); ++i) {
      if (map[i] == s.key.from && in_mask(mask, i)) ++eligible;
    }
    plan.push_back({s, bankers_round(step_rates.rate(s.key) * static_cast<double>(eligible))});
  }
  return plan;
}

StepReport run_step(CategoricalRaster& map, const Model& model, const BinnedLayers& variables, const StepPlan& plan,
                    const RunContext& ctx) {
  if (ctx.mask) require_aligned(map.header(), ctx.mask->header(), "mask vs land-use map");
  const CategoricalRaster step_start = map;
  ConversionLock lock(map.size(), 0);

  StepReport report;
  report.step = ctx.step;
  for (const TransitionPlan& tp : execution_order(plan)) {
    const TransitionKey key = tp.settings.key;
    tp.settings.validate();
    const ProbabilityRaster prob =
        posterior_probability_map(model.weights, key, variables, step_start, ctx.mask, &model.matrix, ctx.threads);
    const std::uint64_t tid = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(key.from)) << 32) |
                              static_cast<std::uint32_t>(key.to);
    const auto step = static_cast<std::uint64_t>(ctx.step);

    TransitionReport tr;
    tr.key = key;
    tr.quota = tp.quota;
    for (std::size_t i = 0; i < map.size(); ++i) {
      if (map[i] == key.from && lock[i] == 0 && !prob.values.is_nodata(i)) ++tr.eligible;
    }
    tr.expander_quota = std::min(tp.quota, bankers_round(tp.settings.expander_fraction * static_cast<double>(tp.quota)));

    RngStream rng_e(ctx.seed, step, tid, RngOperator::expander);
    const AllocationResult e = expander(map, prob, tr.expander_quota, tp.settings.expander, rng_e, lock);
    tr.expander_converted = e.converted;

    tr.patcher_quota = (tp.quota - tr.expander_quota) + e.shortfall;
    RngStream rng_p(ctx.seed, step, tid, RngOperator::patcher);
    const AllocationResult p = patcher(map, prob, tr.patcher_quota, tp.settings.patcher, rng_p, lock, &step_start);
    tr.patcher_converted = p.converted;
    tr.patcher_seeds = p.seeds;

    if (p.shortfall > 0) {
      RngStream rng_r(ctx.seed, step, tid, RngOperator::expander_reflow);
      tr.reflow_converted = expander(map, prob, p.shortfall, tp.settings.expander, rng_r, lock).converted;
    }
    tr.converted = tr.expander_converted + tr.patcher_converted + tr.reflow_converted;
    if (tr.converted > tp.quota) throw InvariantError("transition " + to_string(key) + " exceeded its quota");
    tr.shortfall = tp.quota - tr.converted;
    report.transitions.push_back(std::move(tr));
  }
  return report;
}

SimulationResult run_simulation(const CategoricalRaster& initial, const Model& model, const BinnedLayers& variables,
                                int steps, std::span<const TransitionSettings> settings, std::uint64_t seed,
                                const std::optional<Mask>& mask, unsigned threads) {
  if (steps < 0) throw ConfigError("steps must be >= 0");
  require_legend(initial, model.legend, "initial land-use map");
  for (const auto& [name, layer] : variables) {
    require_aligned(initial.header(), layer.header(), "variable '" + name + "' vs initial map");
  }

  SimulationResult result;
  result.maps.push_back(initial);
  if (steps == 0) return result;
  result.step_rates = annualize_rates(model.matrix, steps);

  CategoricalRaster map = initial;
  for (int s = 1; s <= steps; ++s) {
    const StepPlan plan = plan_step(map, result.step_rates.matrix, settings, mask);
    RunContext ctx{seed, s, mask, threads};
    result.steps.push_back(run_step(map, model, variables, plan, ctx));
    result.maps.push_back(map);
  }
  return result;
}

}  // namespace landca
