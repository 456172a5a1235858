#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "landca/errors.hpp"

namespace landca {

using ClassId = std::int32_t;

/// In-memory marker for a NODATA categorical cell. The file-level sentinel
/// lives in GridHeader::nodata and is substituted on read/write.
inline constexpr ClassId kNoClass = std::numeric_limits<ClassId>::min();

/// Class id -> label. Ids are unique by construction.
using Legend = std::map<ClassId, std::string>;

struct GridHeader {
  std::int64_t ncols = 1;
  std::int64_t nrows = 1;
  double xllcorner = 0.0;
  double yllcorner = 0.0;
  double cellsize = 1.0;
  double nodata = -9999.0;

  std::size_t cell_count() const noexcept {
    return static_cast<std::size_t>(ncols) * static_cast<std::size_t>(nrows);
  }

  /// Throws DataError when ncols, nrows or cellsize are out of range.
  void validate() const;

  friend bool operator==(const GridHeader&, const GridHeader&) = default;
};

/// Same ncols, nrows, corner and cellsize. The NODATA sentinel is not geometry.
bool aligned(const GridHeader& a, const GridHeader& b) noexcept;

/// Throws DataError naming `what` when the headers are not aligned.
void require_aligned(const GridHeader& a, const GridHeader& b, const std::string& what);

template <typename Cell>
struct CellTraits;

template <>
struct CellTraits<ClassId> {
  static constexpr ClassId nodata() noexcept { return kNoClass; }
  static constexpr bool is_nodata(ClassId v) noexcept { return v == kNoClass; }
};

template <>
struct CellTraits<double> {
  static double nodata() noexcept { return std::numeric_limits<double>::quiet_NaN(); }
  static bool is_nodata(double v) noexcept { return std::isnan(v); }
};

/// Row-major grid; row 0 is the northernmost row.
template <typename Cell>
class Grid {
 public:
  using value_type = Cell;

  Grid() = default;

  explicit Grid(GridHeader header, Cell fill = CellTraits<Cell>::nodata())
      : header_(header), cells_(header.cell_count(), fill) {
    header_.validate();
  }

  Grid(GridHeader header, std::vector<Cell> cells) : header_(header), cells_(std::move(cells)) {
    header_.validate();
    if (cells_.size() != header_.cell_count()) {
      throw DataError("cell count " + std::to_string(cells_.size()) + " does not match header " +
                      std::to_string(header_.ncols) + "x" + std::to_string(header_.nrows));
    }
  }

  const GridHeader& header() const noexcept { return header_; }
  std::int64_t ncols() const noexcept { return header_.ncols; }
  std::int64_t nrows() const noexcept { return header_.nrows; }
  std::size_t size() const noexcept { return cells_.size(); }

  std::size_t index(std::int64_t row, std::int64_t col) const noexcept {
    return static_cast<std::size_t>(row * header_.ncols + col);
  }

  Cell& operator[](std::size_t i) noexcept { return cells_[i]; }
  const Cell& operator[](std::size_t i) const noexcept { return cells_[i]; }
  Cell& at(std::int64_t row, std::int64_t col) noexcept { return cells_[index(row, col)]; }
  const Cell& at(std::int64_t row, std::int64_t col) const noexcept { return cells_[index(row, col)]; }

  bool is_nodata(std::size_t i) const noexcept { return CellTraits<Cell>::is_nodata(cells_[i]); }

  std::span<const Cell> cells() const noexcept { return cells_; }
  std::span<Cell> cells() noexcept { return cells_; }

  friend bool operator==(const Grid& a, const Grid& b) {
    if (a.header_ != b.header_ || a.cells_.size() != b.cells_.size()) return false;
    for (std::size_t i = 0; i < a.cells_.size(); ++i) {
      const bool na = CellTraits<Cell>::is_nodata(a.cells_[i]);
      const bool nb = CellTraits<Cell>::is_nodata(b.cells_[i]);
      if (na != nb || (!na && a.cells_[i] != b.cells_[i])) return false;
    }
    return true;
  }

 private:
  GridHeader header_;
  std::vector<Cell> cells_;
};

using CategoricalRaster = Grid<ClassId>;
using ContinuousRaster = Grid<double>;

/// Throws DataError if any non-NODATA cell holds an id absent from `legend`.
void require_legend(const CategoricalRaster& raster, const Legend& legend, const std::string& what);

/// Sorted distinct non-NODATA class ids.
std::vector<ClassId> classes_present(const CategoricalRaster& raster);

/// Number of cells holding `cls`.
std::size_t count_class(const CategoricalRaster& raster, ClassId cls);

/// Cells retained for analysis. Built from a zone raster and the zone id to keep.
class Mask {
 public:
  Mask() = default;
  Mask(const CategoricalRaster& zone, ClassId keep);

  const GridHeader& header() const noexcept { return header_; }
  bool contains(std::size_t i) const noexcept { return keep_[i] != 0; }
  std::size_t count() const noexcept;

 private:
  GridHeader header_;
  std::vector<std::uint8_t> keep_;
};

/// True when there is no mask or the mask keeps cell i.
inline bool in_mask(const std::optional<Mask>& mask, std::size_t i) noexcept {
  return !mask || mask->contains(i);
}

enum class BinningMode { continuous_breaks, categorical_passthrough };

/// Bin k covers [breaks[k-1], breaks[k]) with implicit -inf / +inf end bins,
/// so a continuous spec has breaks.size() + 1 bins.
struct BinningSpec {
  BinningMode mode = BinningMode::categorical_passthrough;
  std::vector<double> breaks;

  static BinningSpec passthrough() { return {}; }
  static BinningSpec continuous(std::vector<double> breaks) {
    return {BinningMode::continuous_breaks, std::move(breaks)};
  }

  /// Throws ConfigError unless breaks are finite and strictly ascending
  /// (and non-empty in continuous mode).
  void validate() const;

  std::size_t bin_count() const noexcept { return breaks.size() + 1; }

  /// Bin index of a finite value. Only meaningful in continuous mode.
  ClassId bin_of(double value) const noexcept;

  friend bool operator==(const BinningSpec&, const BinningSpec&) = default;
};

std::string to_string(BinningMode mode);
BinningMode binning_mode_from_string(const std::string& s);

}  // namespace landca
