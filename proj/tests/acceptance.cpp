// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "landca/allocation.hpp"
#include "landca/ascii_grid.hpp"
#include "landca/calibration.hpp"
#include "landca/validation.hpp"
#include "test_support.hpp"

using namespace landca;
using namespace landca::testing;

namespace {

constexpr double kWeightTolerance = 1e-12;
constexpr double kPosteriorTolerance = 1e-12;
constexpr double kWoeSeconds = 30.0;
constexpr double kEndToEndSeconds = 60.0;
constexpr double kSimilarityThreshold = 0.5;
constexpr double kMaxThresholdWindow = 3.0;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Collects failures for one criterion; the first few are kept for the report.
struct Check {
  std::size_t failures = 0;
  std::string first;

  void expect(bool ok, const std::string& what) {
    if (ok) return;
    if (failures++ == 0) first = what;
  }
};

int g_failed = 0;

void report(const char* name, const Check& c, const std::string& detail) {
  if (c.failures == 0) {
    std::printf("PASS %s: %s\n", name, detail.c_str());
  } else {
    ++g_failed;
    std::printf("FAIL %s: %zu failure(s), first: %s (%s)\n", name, c.failures, c.first.c_str(), detail.c_str());
  }
  std::fflush(stdout);
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

void criterion_woe_oracle() {
  Check c;
  std::mt19937_64 rng(20240601);
  const auto t0 = Clock::now();
  int trials = 0;
  std::size_t compared = 0;
  double worst = 0.0;
  while (trials < 200) {
    const auto nc = 1 + static_cast<std::int64_t>(rng() % 64);
    const auto nr = 1 + static_cast<std::int64_t>(rng() % 64);
    const int nclasses = 2 + static_cast<int>(rng() % 5);
    const int nbins = 1 + static_cast<int>(rng() % 8);
    CalibrationPair pair{random_map(rng, nc, nr, nclasses, 0.05), random_map(rng, nc, nr, nclasses, 0.05), 1.0};
    // Persistence-heavy t1 so that events are a minority, as in real maps.
    std::uniform_real_distribution<double> u(0, 1);
    for (std::size_t i = 0; i < pair.map_t1.size(); ++i) {
      if (u(rng) < 0.6 && pair.map_t0[i] != kNoClass) pair.map_t1[i] = pair.map_t0[i];
    }
    CategoricalRaster binned = random_map(rng, nc, nr, nbins, 0.05);
    std::optional<Mask> mask;
    if (rng() % 2 == 0) mask = Mask(random_map(rng, nc, nr, 3), 1);
    const TransitionKey key{static_cast<ClassId>(rng() % nclasses), static_cast<ClassId>(rng() % nclasses)};
    if (key.from == key.to) continue;

    const auto oracle = brute_force_weights(pair, key, binned, mask);
    std::size_t events = 0;
    for (const auto& [bin, o] : oracle) events += o.n_event;
    if (oracle.empty() || events == 0) continue;
    ++trials;

    const auto got = compute_weights(pair, key, "v", binned, mask);
    c.expect(got.size() == oracle.size(), "bin count differs on trial " + std::to_string(trials));
    for (const auto& e : got) {
      const auto it = oracle.find(e.bin);
      if (it == oracle.end()) {
        c.expect(false, "unexpected bin " + std::to_string(e.bin));
        continue;
      }
      c.expect(e.n_bin == it->second.n_bin && e.n_bin_and_event == it->second.n_event, "count mismatch");
      const double err = std::abs(e.w_plus - it->second.w);
      worst = std::max(worst, err);
      c.expect(err <= kWeightTolerance, "W+ differs by " + fmt("%.3g", err));
      ++compared;
    }
  }
  const double secs = seconds_since(t0);
  c.expect(secs < kWoeSeconds, "runtime " + fmt("%.1f s", secs));
  report("woe-oracle", c,
         "200 grids, " + std::to_string(compared) + " bins, max |dW| " + fmt("%.2g", worst) + ", " +
             fmt("%.2f s", secs));
}

void criterion_transition_matrix() {
  Check c;
  constexpr ClassId F = 1, P = 2, A = 3, W = 4;
  // 12 forest cells, 4 of which become pasture.
  const CalibrationPair hand{
      categorical(4, 4, {F, F, F, F, F, F, F, F, F, F, F, F, P, P, A, W}),
      categorical(4, 4, {P, P, P, P, F, F, F, F, F, F, A, F, P, A, A, W}), 9.0};
  const TransitionMatrix m = compute_transition_matrix(hand);
  c.expect(m.rate({F, P}) == 1.0 / 3.0, "F->P on the 4x4 fixture is " + fmt("%.17g", m.rate({F, P})));
  c.expect(m.rate({F, A}) == 1.0 / 12.0, "F->A on the 4x4 fixture");
  c.expect(m.rate({P, A}) == 0.5, "P->A on the 4x4 fixture");

  std::mt19937_64 rng(77);
  for (int t = 0; t < 200; ++t) {
    const auto nc = 1 + static_cast<std::int64_t>(rng() % 40);
    const auto nr = 1 + static_cast<std::int64_t>(rng() % 40);
    const int k = 2 + static_cast<int>(rng() % 5);
    const CategoricalRaster a = random_map(rng, nc, nr, k, 0.1);
    const CategoricalRaster b = random_map(rng, nc, nr, k, 0.1);

    const TransitionMatrix same = compute_transition_matrix({a, a, 1.0});
    for (const auto& [key, r] : same.rates) c.expect(r == 0.0, "identical pair gives nonzero rate");

    const TransitionMatrix tm = compute_transition_matrix({a, b, 1.0});
    std::map<ClassId, double> row;
    std::map<TransitionKey, std::size_t> counts;
    std::map<ClassId, std::size_t> totals;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] == kNoClass || b[i] == kNoClass) continue;
      ++totals[a[i]];
      if (a[i] != b[i]) ++counts[{a[i], b[i]}];
    }
    for (const auto& [key, r] : tm.rates) {
      row[key.from] += r;
      const double expect = static_cast<double>(counts[key]) / static_cast<double>(totals[key.from]);
      c.expect(r == expect, "rate differs from hand count for " + to_string(key));
    }
    for (const auto& [from, s] : row) c.expect(s <= 1.0 + 1e-12, "row sum above 1");
  }
  report("transition-matrix-oracle", c, "4x4 F->P = 1/3 exact, zero matrix on identical pairs, 200 random row sums");
}

double logistic_ref(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void criterion_posterior() {
  Check c;
  std::mt19937_64 rng(5150);
  const TransitionKey key{0, 1};
  const std::int64_t n = 80;
  CategoricalRaster current = random_map(rng, n, n, 3);
  BinnedLayers layers;
  WeightsTable table;
  std::uniform_real_distribution<double> w(-3.0, 3.0);
  std::map<std::string, std::map<ClassId, double>> lookup;
  for (int v = 0; v < 4; ++v) {
    const std::string name = "v" + std::to_string(v);
    layers[name] = random_map(rng, n, n, 5, 0.02);
    for (ClassId b = 0; b < 5; ++b) {
      const double wp = w(rng);
      lookup[name][b] = wp;
      table.entries.push_back({key, name, b, wp, 1, 0});
    }
  }
  const ProbabilityRaster post = posterior_probability_map(table, key, layers, current);
  std::uniform_int_distribution<std::size_t> pick(0, current.size() - 1);
  int sampled = 0;
  double worst = 0.0;
  while (sampled < 1000) {
    const std::size_t i = pick(rng);
    if (current[i] != key.from) continue;
    bool valid = true;
    double sum = 0.0;
    for (const auto& [name, layer] : layers) {
      if (layer[i] == kNoClass) {
        valid = false;
        break;
      }
      sum += lookup[name][layer[i]];
    }
    ++sampled;
    if (!valid) {
      c.expect(post.values.is_nodata(i), "NODATA variable must give NODATA posterior");
      continue;
    }
    const double err = std::abs(post.values[i] - logistic_ref(sum));
    worst = std::max(worst, err);
    c.expect(err <= kPosteriorTolerance, "posterior differs by " + fmt("%.3g", err));
  }

  WeightsTable zeros;
  for (const auto& [name, m] : lookup) {
    for (const auto& [b, wp] : m) zeros.entries.push_back({key, name, b, 0.0, 1, 0});
  }
  const ProbabilityRaster half = posterior_probability_map(zeros, key, layers, current);
  zeros.prior_mode = PriorMode::prior_logit;
  TransitionMatrix prior;
  prior.rates[key] = 0.08;
  const ProbabilityRaster with_prior = posterior_probability_map(zeros, key, layers, current, std::nullopt, &prior);
  for (std::size_t i = 0; i < current.size(); ++i) {
    if (half.values.is_nodata(i)) continue;
    c.expect(half.values[i] == 0.5, "all-zero weights must give 0.5");
    c.expect(std::abs(with_prior.values[i] - 0.08) <= kPosteriorTolerance, "all-zero weights must give the prior");
  }
  report("posterior", c,
         "1000 sampled cells, max error " + fmt("%.2g", worst) + "; zero weights give 0.5 and prior 0.08");
}

bool adjacent_to(const CategoricalRaster& map, std::size_t i, ClassId cls) {
  const auto r = static_cast<std::int64_t>(i) / map.ncols();
  const auto col = static_cast<std::int64_t>(i) % map.ncols();
  for (std::int64_t dr = -1; dr <= 1; ++dr) {
    for (std::int64_t dc = -1; dc <= 1; ++dc) {
      if (dr == 0 && dc == 0) continue;
      const auto rr = r + dr, cc = col + dc;
      if (rr < 0 || cc < 0 || rr >= map.nrows() || cc >= map.ncols()) continue;
      if (map.at(rr, cc) == cls) return true;
    }
  }
  return false;
}

// Random model over one binned variable with weights for every transition.
Model random_model(std::mt19937_64& rng, const std::vector<TransitionKey>& keys, const Legend& legend,
                   double max_rate) {
  Model m;
  m.legend = legend;
  m.matrix.interval_years = 1.0;
  std::uniform_real_distribution<double> rate(0.0, max_rate);
  std::uniform_real_distribution<double> w(-2.0, 2.0);
  for (const auto& k : keys) {
    m.matrix.rates[k] = rate(rng);
    for (ClassId b = 0; b < 4; ++b) m.weights.entries.push_back({k, "v", b, w(rng), 1, 0});
  }
  m.weights.binning["v"] = BinningSpec::passthrough();
  return m;
}

std::vector<TransitionSettings> random_settings(std::mt19937_64& rng, const std::vector<TransitionKey>& keys) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<TransitionSettings> out;
  for (const auto& k : keys) {
    TransitionSettings s;
    s.key = k;
    s.expander_fraction = u(rng);
    s.expander = {1.0 + 6.0 * u(rng), 10.0 * u(rng), 0.5 + 2.0 * u(rng)};
    s.patcher = {1.0 + 8.0 * u(rng), 10.0 * u(rng), 0.5 + 2.0 * u(rng)};
    out.push_back(s);
  }
  return out;
}

void criterion_allocation() {
  Check c;
  std::mt19937_64 rng(4242);
  const Legend legend = legend_for(5);
  std::size_t transitions = 0, met = 0, short_exhausted = 0, seeds = 0;
  for (int land = 0; land < 50; ++land) {
    const auto nc = 20 + static_cast<std::int64_t>(rng() % 40);
    const auto nr = 20 + static_cast<std::int64_t>(rng() % 40);
    const CategoricalRaster initial = random_map(rng, nc, nr, 5, 0.03);
    BinnedLayers vars{{"v", random_map(rng, nc, nr, 4, 0.02)}};

    // Sources {0, 1}, destinations distinct among {2, 3, 4}: within a step no
    // transition creates or removes another's destination cells, so the
    // supply left after the step is what the transition itself left behind.
    std::vector<ClassId> tos{2, 3, 4};
    std::shuffle(tos.begin(), tos.end(), rng);
    std::vector<TransitionKey> keys;
    const int nt = 1 + static_cast<int>(rng() % 3);
    for (int t = 0; t < nt; ++t) keys.push_back({static_cast<ClassId>(rng() % 2), tos[t]});
    const double max_rate = land % 5 == 0 ? 0.9 : 0.3;  // some landscapes run out of supply
    const Model model = random_model(rng, keys, legend, max_rate);
    const auto settings = random_settings(rng, keys);
    const int steps = 1 + static_cast<int>(rng() % 4);

    const SimulationResult sim = run_simulation(initial, model, vars, steps, settings, rng(), std::nullopt, 1);
    for (int s = 0; s < steps; ++s) {
      const CategoricalRaster& before = sim.maps[s];
      const CategoricalRaster& after = sim.maps[s + 1];
      std::map<ClassId, long long> delta;
      for (const auto& t : sim.steps[s].transitions) {
        ++transitions;
        delta[t.key.from] -= static_cast<long long>(t.converted);
        delta[t.key.to] += static_cast<long long>(t.converted);
        c.expect(t.converted + t.shortfall == t.quota, "converted + shortfall != quota");
        for (std::size_t seed : t.patcher_seeds) {
          ++seeds;
          c.expect(!adjacent_to(before, seed, t.key.to), "patcher seed adjacent to a pre-step destination cell");
        }
        // Cells the transition could still have taken: unconverted source
        // cells with a valid probability that are frontier cells, or that are
        // clear of destination cells both now and at step start.
        std::size_t supply = 0;
        for (std::size_t i = 0; i < after.size(); ++i) {
          if (before[i] != t.key.from || after[i] != t.key.from || vars.at("v")[i] == kNoClass) continue;
          const bool frontier = adjacent_to(after, i, t.key.to);
          const bool seedable = !frontier && !adjacent_to(before, i, t.key.to);
          if (frontier || seedable) ++supply;
        }
        if (t.converted == t.quota) {
          ++met;
        } else {
          c.expect(supply == 0, "shortfall of " + std::to_string(t.shortfall) + " with " + std::to_string(supply) +
                                    " cells still available for " + to_string(t.key));
          ++short_exhausted;
        }
      }
      for (ClassId cls = 0; cls < 5; ++cls) {
        const auto expect = static_cast<long long>(count_class(before, cls)) + delta[cls];
        c.expect(static_cast<long long>(count_class(after, cls)) == expect,
                 "class " + std::to_string(cls) + " mass balance at step " + std::to_string(s + 1));
      }
      std::size_t nodata_before = 0, nodata_after = 0;
      for (std::size_t i = 0; i < before.size(); ++i) {
        nodata_before += before.is_nodata(i);
        nodata_after += after.is_nodata(i);
      }
      c.expect(nodata_before == nodata_after, "NODATA count changed");
    }
  }
  report("allocation-conservation", c,
         std::to_string(transitions) + " transition-steps on 50 landscapes: " + std::to_string(met) +
             " met quota, " + std::to_string(short_exhausted) + " short with supply exhausted; " +
             std::to_string(seeds) + " patcher seeds checked");
}

std::string read_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void criterion_determinism() {
  Check c;
  std::mt19937_64 rng(128);
  const Legend legend = legend_for(3);
  // Blocky 128 x 128 landscape with three classes.
  CategoricalRaster initial(header(128, 128, 250.0));
  for (std::int64_t r = 0; r < 128; ++r) {
    for (std::int64_t col = 0; col < 128; ++col) {
      initial.at(r, col) = static_cast<ClassId>(((r / 16) * 7 + (col / 16) * 3 + (rng() % 5 == 0)) % 3);
    }
  }
  CategoricalRaster var(header(128, 128, 250.0));
  for (std::size_t i = 0; i < var.size(); ++i) var[i] = static_cast<ClassId>(rng() % 4);
  const BinnedLayers vars{{"v", var}};
  const std::vector<TransitionKey> keys{{0, 1}, {1, 2}, {2, 0}, {0, 2}};
  const Model model = random_model(rng, keys, legend, 0.3);
  const auto settings = random_settings(rng, keys);

  const auto dir = temp_dir("acceptance_determinism");
  auto run = [&](unsigned threads, const std::string& tag) {
    const SimulationResult r = run_simulation(initial, model, vars, 5, settings, 987654321, std::nullopt, threads);
    std::vector<std::string> bytes;
    for (std::size_t s = 0; s < r.maps.size(); ++s) {
      const auto p = dir / (tag + "_" + std::to_string(s) + ".asc");
      save_grid(r.maps[s], p);
      bytes.push_back(read_bytes(p));
    }
    return bytes;
  };
  const auto a = run(1, "a");
  const auto b = run(1, "b");
  const auto t4 = run(4, "t4");
  const auto t7 = run(7, "t7");
  c.expect(a.size() == 6, "expected 6 grids");
  for (std::size_t s = 0; s < a.size(); ++s) {
    c.expect(a[s] == b[s], "rerun differs at step " + std::to_string(s));
    c.expect(a[s] == t4[s], "4 threads differ at step " + std::to_string(s));
    c.expect(a[s] == t7[s], "7 threads differ at step " + std::to_string(s));
  }
  c.expect(a.back() != a.front(), "simulation changed nothing");
  report("determinism", c, "128x128, 3 classes, 5 steps: byte-identical across reruns and 1/4/7 threads");
}

CategoricalRaster checkerboard(std::int64_t n, int shift) {
  CategoricalRaster g = filled(n, n, 0);
  for (std::int64_t r = 0; r < n; ++r) {
    for (std::int64_t col = 0; col < n; ++col) g.at(r, col) = static_cast<ClassId>((r + col + shift) % 2);
  }
  return g;
}

SimilarityCurve make_curve(const std::vector<std::pair<int, double>>& pts, double cellsize) {
  SimilarityCurve curve;
  curve.cellsize = cellsize;
  for (const auto& [w, s] : pts) curve.points.push_back({w, s, 0, 0});
  return curve;
}

void criterion_validation_metric() {
  Check c;
  std::mt19937_64 rng(99);
  const Legend legend = legend_for(4);

  const CategoricalRaster a = random_map(rng, 30, 25, 4, 0.05);
  for (WindowMode mode : {WindowMode::sliding, WindowMode::tiled}) {
    for (const auto& p : multi_window_similarity(a, a, legend, kDefaultWindows, mode).points) {
      c.expect(p.similarity == 1.0, "identical maps below 1 at w=" + std::to_string(p.window));
    }
    for (const auto& p : multi_window_similarity(filled(12, 12, 0), filled(12, 12, 3), legend, kDefaultWindows,
                                                 mode).points) {
      c.expect(p.similarity == 0.0, "disjoint maps above 0 at w=" + std::to_string(p.window));
    }
  }

  const auto board = multi_window_similarity(checkerboard(16, 0), checkerboard(16, 1), legend,
                                             std::vector<int>{1, 2}, WindowMode::tiled);
  c.expect(board.points[0].similarity == 0.0, "shifted checkerboard at w=1");
  c.expect(board.points[1].similarity == 1.0, "shifted checkerboard at w=2");

  const std::vector<int> nested{1, 2, 4, 8, 16, 32};
  for (int t = 0; t < 100; ++t) {
    const auto n = 32 + static_cast<std::int64_t>(rng() % 33);
    const int k = 2 + static_cast<int>(rng() % 3);
    const CategoricalRaster o = random_map(rng, n, n, k, 0.05);
    const CategoricalRaster s = random_map(rng, n, n, k, 0.05);
    const auto curve = multi_window_similarity(o, s, legend, nested, WindowMode::tiled);
    for (std::size_t p = 1; p < curve.points.size(); ++p) {
      c.expect(curve.points[p].similarity >= curve.points[p - 1].similarity,
               "tiled similarity decreased on pair " + std::to_string(t));
    }
    if (t < 10) {
      for (WindowMode mode : {WindowMode::sliding, WindowMode::tiled}) {
        const auto got = multi_window_similarity(o, s, legend, std::vector<int>{1, 3, 5}, mode);
        for (const auto& p : got.points) {
          c.expect(p.similarity == brute_force_similarity(o, s, p.window, mode), "differs from window enumeration");
        }
      }
    }
  }

  const ThresholdWindow tw = threshold_window(make_curve({{1, 0.3}, {2, 0.45}, {3, 0.55}}, 1.0), 0.5);
  c.expect(std::abs(tw.cells - 2.5) < 1e-12, "interpolated window is " + fmt("%.17g", tw.cells));
  report("validation-metric", c,
         "identity 1, disjoint 0, checkerboard 0/1, nested tiled monotone on 100 pairs, interpolation " +
             fmt("%g", tw.cells));
}

void criterion_end_to_end() {
  Check c;
  const auto t0 = Clock::now();
  constexpr ClassId F = 1, P = 2;
  const std::int64_t n = 120;
  std::mt19937_64 rng(31337);
  std::uniform_real_distribution<double> u(0.0, 1.0);

  // Soil in 12x12 blocks of classes 0..3. Deforestation is planted only in
  // soil class 2 with per-cell probability 0.4; pasture starts in the top rows.
  CategoricalRaster soil(header(n, n, 250.0));
  std::vector<ClassId> block(100);
  for (auto& b : block) b = static_cast<ClassId>(rng() % 4);
  for (std::int64_t r = 0; r < n; ++r) {
    for (std::int64_t col = 0; col < n; ++col) soil.at(r, col) = block[(r / 12) * 10 + col / 12];
  }
  CategoricalRaster t0_map(header(n, n, 250.0), F);
  for (std::int64_t r = 0; r < 6; ++r) {
    for (std::int64_t col = 0; col < n; ++col) t0_map.at(r, col) = P;
  }
  auto replicate = [&](std::uint64_t seed) {
    std::mt19937_64 g(seed);
    CategoricalRaster t1 = t0_map;
    for (std::size_t i = 0; i < t1.size(); ++i) {
      if (t0_map[i] == F && soil[i] == 2 && u(g) < 0.4) t1[i] = P;
    }
    return t1;
  };
  const CategoricalRaster t1_train = replicate(1);
  const CategoricalRaster t1_holdout = replicate(2);

  const Legend legend{{F, "forest"}, {P, "pasture"}};
  const std::vector<TransitionKey> keys{{F, P}};
  const std::vector<VariableLayer> vars{{"soil", soil, BinningSpec::passthrough()}};
  const Model model = calibrate({t0_map, t1_train, 1.0}, legend, keys, vars, std::nullopt, {PriorMode::prior_logit, 0});

  TransitionSettings s;
  s.key = {F, P};
  s.expander_fraction = 0.5;
  s.expander = {4.0, 4.0, 1.5};
  s.patcher = {6.0, 9.0, 1.5};
  const std::vector<TransitionSettings> settings{s};
  const SimulationResult sim = run_simulation(t0_map, model, bin_layers(vars), 1, settings, 2013, std::nullopt, 0);

  const std::vector<int> windows{1, 2, 3, 5, 7};
  const SimilarityCurve curve = multi_window_similarity(t1_holdout, sim.maps.back(), legend, windows);
  const ThresholdWindow tw = threshold_window(curve, kSimilarityThreshold);
  c.expect(tw.reached() && tw.cells <= kMaxThresholdWindow,
           "threshold window " + fmt("%g", tw.cells) + " cells exceeds " + fmt("%g", kMaxThresholdWindow));

  // The planted bin must carry the signal.
  double w_planted = 0.0, w_other = 0.0;
  for (const auto& e : model.weights.entries) {
    if (e.bin == 2) w_planted = e.w_plus;
    else w_other = std::max(w_other, e.w_plus);
  }
  c.expect(w_planted > 0.0 && w_planted > w_other, "planted bin does not dominate the weights");
  std::size_t converted_in_bin = 0, converted = 0;
  for (std::size_t i = 0; i < t0_map.size(); ++i) {
    if (t0_map[i] == F && sim.maps.back()[i] == P) {
      ++converted;
      converted_in_bin += soil[i] == 2;
    }
  }
  const double secs = seconds_since(t0);
  c.expect(secs < kEndToEndSeconds, "runtime " + fmt("%.1f s", secs));
  std::ostringstream detail;
  detail << "similarity";
  for (const auto& p : curve.points) detail << " w" << p.window << "=" << format_real(p.similarity, 4);
  detail << "; " << threshold_summary(kSimilarityThreshold, tw) << "; " << converted_in_bin << "/" << converted
         << " conversions in the planted bin; " << fmt("%.2f s", secs);
  report("end-to-end", c, detail.str());
}

void criterion_units() {
  Check c;
  const ThresholdWindow tw = threshold_window(make_curve({{1, 0.3}, {2, 0.45}, {3, 0.5}, {5, 0.8}}, 250.0), 0.5);
  c.expect(tw.cells == 3.0, "crossing at " + fmt("%g", tw.cells) + " cells");
  c.expect(tw.map_units == 750.0, "map units " + fmt("%g", tw.map_units));
  const std::string summary = threshold_summary(0.5, tw);
  c.expect(summary == "threshold=0.5 window_cells=3 window_map_units=750", "summary '" + summary + "'");
  report("unit-arithmetic", c, summary);
}

}  // namespace

int main() {
  criterion_woe_oracle();
  criterion_transition_matrix();
  criterion_posterior();
  criterion_allocation();
  criterion_determinism();
  criterion_validation_metric();
  criterion_end_to_end();
  criterion_units();
  std::printf("%s: %d criterion(s) failed\n", g_failed == 0 ? "ACCEPTED" : "REJECTED", g_failed);
  return g_failed == 0 ? 0 : 1;
}
