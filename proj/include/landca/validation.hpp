#pragma once

#include <filesystem>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "landca/raster.hpp"

namespace landca {

/// sliding: every w x w placement fully inside the grid (stride 1).
/// tiled: disjoint tiles anchored at the origin, partial edge tiles included.
enum class WindowMode { sliding, tiled };

std::string to_string(WindowMode mode);
WindowMode window_mode_from_string(const std::string& s);

struct SimilarityPoint {
  int window = 1;          // cells per window edge
  double similarity = 0.0;
  std::int64_t concordant = 0;  // sum over windows of per-class min counts
  std::int64_t capacity = 0;    // sum over windows of mutually valid cells
};

struct SimilarityCurve {
  std::vector<SimilarityPoint> points;
  WindowMode mode = WindowMode::sliding;
  double cellsize = 1.0;
};

inline const std::vector<int> kDefaultWindows = {1, 2, 3, 5, 7, 9, 11};

/// Multiple-window similarity between two categorical maps.
///
/// In every window, concordance is sum over classes of min(n_obs(c), n_sim(c))
/// counted over cells valid in both maps, and capacity is the number of such
/// cells. similarity(w) = total concordance / total capacity. Windows with no
/// valid cells are skipped. Throws DataError on misalignment, classes outside
/// `legend`, or an empty overlap; ConfigError on bad window lists.
SimilarityCurve multi_window_similarity(const CategoricalRaster& observed, const CategoricalRaster& simulated,
                                        const Legend& legend, std::span<const int> windows = kDefaultWindows,
                                        WindowMode mode = WindowMode::sliding, unsigned threads = 1);

struct ThresholdWindow {
  double cells = std::numeric_limits<double>::infinity();
  double map_units = std::numeric_limits<double>::infinity();

  bool reached() const noexcept { return cells != std::numeric_limits<double>::infinity(); }
};

/// Smallest window whose similarity reaches `threshold`, linearly interpolated
/// between the last window below it and the first at or above it. Infinite
/// when the curve never reaches the threshold.
ThresholdWindow threshold_window(const SimilarityCurve& curve, double threshold);

/// 0 where the maps agree, 1 where they differ, NODATA where either is NODATA.
CategoricalRaster difference_map(const CategoricalRaster& observed, const CategoricalRaster& simulated,
                                 const Legend& legend);

/// CSV with header `window_cells,window_map_units,similarity`.
std::string curve_to_csv(const SimilarityCurve& curve);
void save_curve_csv(const SimilarityCurve& curve, const std::filesystem::path& path);

/// Reads a curve CSV written by save_curve_csv. cellsize is recovered from
/// the map-unit column.
SimilarityCurve load_curve_csv(const std::filesystem::path& path);

/// `threshold=<t> window_cells=<w> window_map_units=<w * cellsize>`
std::string threshold_summary(double threshold, const ThresholdWindow& tw);

}  // namespace landca
