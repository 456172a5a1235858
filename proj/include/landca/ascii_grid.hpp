#pragma once

#include <filesystem>
#include <string>

#include "landca/raster.hpp"

namespace landca {

/// ESRI ASCII grid reader/writer.
///
/// Layout: six header lines (`ncols`, `nrows`, `xllcorner`, `yllcorner`,
/// `cellsize`, `NODATA_value`, keys case-insensitive, in that order) followed
/// by nrows lines of ncols values, top row first. The reader accepts any
/// whitespace between tokens; errors carry the 1-based line number.
CategoricalRaster load_categorical_grid(const std::filesystem::path& path);
ContinuousRaster load_continuous_grid(const std::filesystem::path& path);

/// Header only; cheap alignment checks without reading the body.
GridHeader load_grid_header(const std::filesystem::path& path);

inline constexpr int kDefaultGridPrecision = 6;

void save_grid(const CategoricalRaster& raster, const std::filesystem::path& path);

/// Values are written with `significant_digits` significant digits.
void save_grid(const ContinuousRaster& raster, const std::filesystem::path& path,
               int significant_digits = kDefaultGridPrecision);

/// Shortest text that parses back to exactly `value`.
std::string format_real(double value);

/// `value` with at most `significant_digits` significant digits (printf %g style).
std::string format_real(double value, int significant_digits);

}  // namespace landca
