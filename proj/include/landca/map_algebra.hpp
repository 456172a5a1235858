#pragma once

#include "landca/raster.hpp"

namespace landca {

/// Exact Euclidean distance (map units) from every cell center to the nearest
/// cell of `target_class`. Target cells are 0; NODATA source cells stay NODATA.
/// Throws DataError when no target cell exists. The result does not depend on
/// `threads`.
ContinuousRaster distance_transform(const CategoricalRaster& source, ClassId target_class, unsigned threads = 1);

/// Maps each value to its bin index under spec's left-closed convention.
CategoricalRaster bin_continuous(const ContinuousRaster& raster, const BinningSpec& spec);

/// Cells where zone != keep become NODATA. Retained cells are untouched.
template <typename Cell>
Grid<Cell> apply_mask(const Grid<Cell>& raster, const CategoricalRaster& zone, ClassId keep) {
  require_aligned(raster.header(), zone.header(), "mask zone vs raster");
  Grid<Cell> out = raster;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (zone[i] != keep) out[i] = CellTraits<Cell>::nodata();
  }
  return out;
}

}  // namespace landca
