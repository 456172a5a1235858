#include "landca/validation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "landca/ascii_grid.hpp"
#include "landca/parallel.hpp"

namespace landca {
namespace {

// Summed-area table of a 0/1 indicator, (nrows + 1) x (ncols + 1).
class Integral {
 public:
  Integral(std::int64_t nrows, std::int64_t ncols) : ncols_(ncols + 1), sums_((nrows + 1) * (ncols + 1), 0) {}

  template <typename Pred>
  void build(std::int64_t nrows, std::int64_t ncols, Pred pred) {
    for (std::int64_t r = 0; r < nrows; ++r) {
      std::int64_t row_sum = 0;
      for (std::int64_t c = 0; c < ncols; ++c) {
        row_sum += pred(r, c) ? 1 : 0;
        sums_[(r + 1) * ncols_ + (c + 1)] = sums_[r * ncols_ + (c + 1)] + row_sum;
      }
    }
  }

  // Count over rows [r0, r1) and columns [c0, c1).
  std::int64_t box(std::int64_t r0, std::int64_t c0, std::int64_t r1, std::int64_t c1) const noexcept {
    return sums_[r1 * ncols_ + c1] - sums_[r0 * ncols_ + c1] - sums_[r1 * ncols_ + c0] + sums_[r0 * ncols_ + c0];
  }

 private:
  std::int64_t ncols_;
  std::vector<std::int64_t> sums_;
};

struct Box {
  std::int64_t r0, c0, r1, c1;
};

// Enumerates the window placements of one row band for size w.
template <typename Visit>
void for_each_window(std::int64_t band, std::int64_t w, std::int64_t nrows, std::int64_t ncols, WindowMode mode,
                     Visit visit) {
  if (mode == WindowMode::sliding) {
    for (std::int64_t c = 0; c + w <= ncols; ++c) visit(Box{band, c, band + w, c + w});
  } else {
    const std::int64_t r0 = band * w;
    const std::int64_t r1 = std::min(nrows, r0 + w);
    for (std::int64_t c = 0; c < ncols; c += w) visit(Box{r0, c, r1, std::min(ncols, c + w)});
  }
}

std::int64_t band_count(std::int64_t w, std::int64_t nrows, WindowMode mode) {
  return mode == WindowMode::sliding ? nrows - w + 1 : (nrows + w - 1) / w;
}

void check_pair(const CategoricalRaster& observed, const CategoricalRaster& simulated, const Legend& legend) {
  require_aligned(observed.header(), simulated.header(), "observed vs simulated map");
  require_legend(observed, legend, "observed map");
  require_legend(simulated, legend, "simulated map");
}

}  // namespace

std::string to_string(WindowMode mode) { return mode == WindowMode::sliding ? "sliding" : "tiled"; }

WindowMode window_mode_from_string(const std::string& s) {
  if (s == "sliding") return WindowMode::sliding;
  if (s == "tiled") return WindowMode::tiled;
  throw ConfigError("unknown window mode '" + s + "' (expected sliding or tiled)");
}

SimilarityCurve multi_window_similarity(const CategoricalRaster& observed, const CategoricalRaster& simulated,
                                        const Legend& legend, std::span<const int> windows, WindowMode mode,
                                        unsigned threads) {
  check_pair(observed, simulated, legend);
  const std::int64_t nrows = observed.nrows();
  const std::int64_t ncols = observed.ncols();
  if (windows.empty()) throw ConfigError("window list is empty");
  for (std::size_t k = 0; k < windows.size(); ++k) {
    if (windows[k] < 1) throw ConfigError("window sizes must be positive");
    if (k > 0 && windows[k] <= windows[k - 1]) throw ConfigError("window sizes must be strictly increasing");
    if (windows[k] > std::min(nrows, ncols)) {
      throw ConfigError("window size " + std::to_string(windows[k]) + " exceeds the grid (" + std::to_string(ncols) +
                        "x" + std::to_string(nrows) + ")");
    }
  }

  auto both_valid = [&](std::int64_t r, std::int64_t c) {
    const std::size_t i = observed.index(r, c);
    return !observed.is_nodata(i) && !simulated.is_nodata(i);
  };
  Integral valid(nrows, ncols);
  valid.build(nrows, ncols, both_valid);
  if (valid.box(0, 0, nrows, ncols) == 0) throw DataError("observed and simulated maps share no valid cells");

  std::set<ClassId> classes;
  for (ClassId c : classes_present(observed)) classes.insert(c);
  for (ClassId c : classes_present(simulated)) classes.insert(c);

  SimilarityCurve curve;
  curve.mode = mode;
  curve.cellsize = observed.header().cellsize;
  for (int wi : windows) curve.points.push_back({wi, 0.0, 0, 0});

  // Capacity per window size.
  for (auto& pt : curve.points) {
    const std::int64_t w = pt.window;
    std::int64_t cap = 0;
    for (std::int64_t b = 0; b < band_count(w, nrows, mode); ++b) {
      for_each_window(b, w, nrows, ncols, mode, [&](const Box& x) { cap += valid.box(x.r0, x.c0, x.r1, x.c1); });
    }
    pt.capacity = cap;
  }

  // Concordance is additive over classes, so one class is resident at a time.
  Integral obs(nrows, ncols);
  Integral sim(nrows, ncols);
  for (ClassId cls : classes) {
    obs.build(nrows, ncols, [&](std::int64_t r, std::int64_t c) {
      return both_valid(r, c) && observed.at(r, c) == cls;
    });
    sim.build(nrows, ncols, [&](std::int64_t r, std::int64_t c) {
      return both_valid(r, c) && simulated.at(r, c) == cls;
    });
    for (auto& pt : curve.points) {
      const std::int64_t w = pt.window;
      const auto bands = static_cast<std::size_t>(band_count(w, nrows, mode));
      std::vector<std::int64_t> partial(bands, 0);
      parallel_for(bands, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t b = begin; b < end; ++b) {
          std::int64_t acc = 0;
          for_each_window(static_cast<std::int64_t>(b), w, nrows, ncols, mode, [&](const Box& x) {
            acc += std::min(obs.box(x.r0, x.c0, x.r1, x.c1), sim.box(x.r0, x.c0, x.r1, x.c1));
          });
          partial[b] = acc;
        }
      });
      for (std::int64_t v : partial) pt.concordant += v;
    }
  }
  for (auto& pt : curve.points) {
    pt.similarity = static_cast<double>(pt.concordant) / static_cast<double>(pt.capacity);
  }
  return curve;
}

ThresholdWindow threshold_window(const SimilarityCurve& curve, double threshold) {
  ThresholdWindow out;
  const auto& pts = curve.points;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    if (pts[k].similarity < threshold) continue;
    if (k == 0) {
      out.cells = pts[0].window;
    } else {
      const SimilarityPoint& lo = pts[k - 1];
      const SimilarityPoint& hi = pts[k];
      const double t = (threshold - lo.similarity) / (hi.similarity - lo.similarity);
      out.cells = lo.window + t * (hi.window - lo.window);
    }
    out.map_units = out.cells * curve.cellsize;
    return out;
  }
  return out;
}

CategoricalRaster difference_map(const CategoricalRaster& observed, const CategoricalRaster& simulated,
                                 const Legend& legend) {
  check_pair(observed, simulated, legend);
  CategoricalRaster out(observed.header());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (observed.is_nodata(i) || simulated.is_nodata(i)) continue;
    out[i] = observed[i] == simulated[i] ? 0 : 1;
  }
  return out;
}

std::string curve_to_csv(const SimilarityCurve& curve) {
  std::string out = "window_cells,window_map_units,similarity\n";
  for (const auto& pt : curve.points) {
    out += std::to_string(pt.window) + "," + format_real(pt.window * curve.cellsize) + "," +
           format_real(pt.similarity) + "\n";
  }
  return out;
}

void save_curve_csv(const SimilarityCurve& curve, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw DataError("cannot write curve file " + path.string());
  os << curve_to_csv(curve);
}

SimilarityCurve load_curve_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read curve file " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "window_cells,window_map_units,similarity") {
    throw DataError(path.string() + ": unexpected curve CSV header");
  }
  SimilarityCurve curve;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string a, b, c;
    if (!std::getline(row, a, ',') || !std::getline(row, b, ',') || !std::getline(row, c)) {
      throw FormatError(path.string(), lineno, "expected three columns");
    }
    try {
      SimilarityPoint pt;
      pt.window = std::stoi(a);
      const double units = std::stod(b);
      pt.similarity = std::stod(c);
      if (curve.points.empty()) curve.cellsize = units / pt.window;
      curve.points.push_back(pt);
    } catch (const std::exception&) {
      throw FormatError(path.string(), lineno, "bad number in curve row");
    }
  }
  return curve;
}

std::string threshold_summary(double threshold, const ThresholdWindow& tw) {
  return "threshold=" + format_real(threshold, 6) + " window_cells=" + format_real(tw.cells, 6) +
         " window_map_units=" + format_real(tw.map_units, 6);
}

}  // namespace landca
