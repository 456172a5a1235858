#include "landca/raster.hpp"

#include <algorithm>
#include <set>

namespace landca {

void GridHeader::validate() const {
  if (ncols < 1 || nrows < 1) {
    throw DataError("grid dimensions must be positive, got " + std::to_string(ncols) + "x" +
                    std::to_string(nrows));
  }
  if (!(cellsize > 0.0) || !std::isfinite(cellsize)) {
    throw DataError("cellsize must be positive and finite");
  }
}

bool aligned(const GridHeader& a, const GridHeader& b) noexcept {
  return a.ncols == b.ncols && a.nrows == b.nrows && a.xllcorner == b.xllcorner &&
         a.yllcorner == b.yllcorner && a.cellsize == b.cellsize;
}

void require_aligned(const GridHeader& a, const GridHeader& b, const std::string& what) {
  if (!aligned(a, b)) {
    throw DataError("misaligned grids: " + what);
  }
}

void require_legend(const CategoricalRaster& raster, const Legend& legend, const std::string& what) {
  for (ClassId c : classes_present(raster)) {
    if (!legend.contains(c)) {
      throw DataError(what + ": class " + std::to_string(c) + " is not in the legend");
    }
  }
}

std::vector<ClassId> classes_present(const CategoricalRaster& raster) {
  std::set<ClassId> seen;
  for (ClassId v : raster.cells()) {
    if (v != kNoClass) seen.insert(v);
  }
  return {seen.begin(), seen.end()};
}

std::size_t count_class(const CategoricalRaster& raster, ClassId cls) {
  const auto cells = raster.cells();
  return static_cast<std::size_t>(std::count(cells.begin(), cells.end(), cls));
}

Mask::Mask(const CategoricalRaster& zone, ClassId keep) : header_(zone.header()) {
  keep_.resize(zone.size());
  for (std::size_t i = 0; i < zone.size(); ++i) {
    keep_[i] = zone[i] == keep ? 1 : 0;
  }
}

std::size_t Mask::count() const noexcept {
  return static_cast<std::size_t>(std::count(keep_.begin(), keep_.end(), std::uint8_t{1}));
}

void BinningSpec::validate() const {
  if (mode == BinningMode::categorical_passthrough) {
    if (!breaks.empty()) throw ConfigError("categorical passthrough binning takes no breaks");
    return;
  }
  if (breaks.empty()) throw ConfigError("continuous binning needs at least one break");
  for (std::size_t k = 0; k < breaks.size(); ++k) {
    if (!std::isfinite(breaks[k])) throw ConfigError("binning breaks must be finite");
    if (k > 0 && !(breaks[k - 1] < breaks[k])) {
      throw ConfigError("binning breaks must be strictly ascending");
    }
  }
}

ClassId BinningSpec::bin_of(double value) const noexcept {
  // upper_bound gives the first break > value, i.e. the left-closed bin index.
  return static_cast<ClassId>(std::upper_bound(breaks.begin(), breaks.end(), value) - breaks.begin());
}

std::string to_string(BinningMode mode) {
  return mode == BinningMode::continuous_breaks ? "continuous-breaks" : "categorical-passthrough";
}

BinningMode binning_mode_from_string(const std::string& s) {
  if (s == "continuous-breaks") return BinningMode::continuous_breaks;
  if (s == "categorical-passthrough") return BinningMode::categorical_passthrough;
  throw ConfigError("unknown binning mode '" + s + "'");
}

}  // namespace landca
