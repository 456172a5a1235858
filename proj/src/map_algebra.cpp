#include "landca/map_algebra.hpp"

#include <cstdint>
#include <limits>
#include <vector>

#include "landca/parallel.hpp"

namespace landca {
namespace {

constexpr std::int64_t kFar = -1;

// Exact rational p/q with q > 0.
struct Ratio {
  std::int64_t num;
  std::int64_t den;
};

bool less_equal(const Ratio& a, const Ratio& b) {
  return static_cast<__int128>(a.num) * b.den <= static_cast<__int128>(b.num) * a.den;
}

bool less_than(const Ratio& a, std::int64_t x) { return a.num < static_cast<__int128>(x) * a.den; }

// Abscissa where the parabolas rooted at q and v (q > v) intersect.
Ratio intersection(std::int64_t q, std::int64_t fq, std::int64_t v, std::int64_t fv) {
  return {(fq + q * q) - (fv + v * v), 2 * (q - v)};
}

// Lower envelope of parabolas f(x') + (x - x')^2 over the finite entries of f
// (Felzenszwalb & Huttenlocher), evaluated at every x. Intersections are kept
// as exact ratios so ties resolve identically to a brute-force minimum.
void envelope_1d(const std::vector<std::int64_t>& f, std::vector<std::int64_t>& out,
                 std::vector<std::int64_t>& roots, std::vector<Ratio>& bounds) {
  const auto n = static_cast<std::int64_t>(f.size());
  roots.clear();
  bounds.clear();
  for (std::int64_t q = 0; q < n; ++q) {
    if (f[q] == kFar) continue;
    // bounds[i] separates roots[i] (left) from roots[i + 1] (right).
    while (!bounds.empty() &&
           less_equal(intersection(q, f[q], roots.back(), f[roots.back()]), bounds.back())) {
      roots.pop_back();
      bounds.pop_back();
    }
    if (!roots.empty()) bounds.push_back(intersection(q, f[q], roots.back(), f[roots.back()]));
    roots.push_back(q);
  }
  std::size_t k = 0;
  for (std::int64_t x = 0; x < n; ++x) {
    while (k < bounds.size() && less_than(bounds[k], x)) ++k;
    const std::int64_t r = roots[k];
    out[x] = f[r] + (x - r) * (x - r);
  }
}

}  // namespace

ContinuousRaster distance_transform(const CategoricalRaster& source, ClassId target_class, unsigned threads) {
  const GridHeader& h = source.header();
  const std::int64_t ncols = h.ncols;
  const std::int64_t nrows = h.nrows;
  if (count_class(source, target_class) == 0) {
    throw DataError("distance transform: no cells of class " + std::to_string(target_class));
  }

  // Column pass: squared vertical distance to the nearest target in the column.
  std::vector<std::int64_t> vertical(source.size(), kFar);
  parallel_for(static_cast<std::size_t>(ncols), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t c = begin; c < end; ++c) {
      const auto col = static_cast<std::int64_t>(c);
      std::int64_t last = kFar;
      for (std::int64_t r = 0; r < nrows; ++r) {
        if (source.at(r, col) == target_class) last = r;
        if (last != kFar) vertical[source.index(r, col)] = r - last;
      }
      last = kFar;
      for (std::int64_t r = nrows - 1; r >= 0; --r) {
        if (source.at(r, col) == target_class) last = r;
        if (last == kFar) continue;
        auto& d = vertical[source.index(r, col)];
        if (d == kFar || last - r < d) d = last - r;
      }
    }
  });

  ContinuousRaster out(h);
  parallel_for(static_cast<std::size_t>(nrows), threads, [&](std::size_t begin, std::size_t end) {
    std::vector<std::int64_t> f(static_cast<std::size_t>(ncols));
    std::vector<std::int64_t> d2(static_cast<std::size_t>(ncols));
    std::vector<std::int64_t> roots;
    std::vector<Ratio> bounds;
    for (std::size_t r = begin; r < end; ++r) {
      const auto row = static_cast<std::int64_t>(r);
      for (std::int64_t c = 0; c < ncols; ++c) {
        const std::int64_t v = vertical[source.index(row, c)];
        f[c] = v == kFar ? kFar : v * v;
      }
      envelope_1d(f, d2, roots, bounds);
      for (std::int64_t c = 0; c < ncols; ++c) {
        const std::size_t i = source.index(row, c);
        if (source.is_nodata(i)) continue;
        out[i] = std::sqrt(static_cast<double>(d2[c])) * h.cellsize;
      }
    }
  });
  return out;
}

CategoricalRaster bin_continuous(const ContinuousRaster& raster, const BinningSpec& spec) {
  spec.validate();
  if (spec.mode != BinningMode::continuous_breaks) {
    throw ConfigError("bin_continuous needs a continuous-breaks spec");
  }
  CategoricalRaster out(raster.header());
  for (std::size_t i = 0; i < raster.size(); ++i) {
    if (!raster.is_nodata(i)) out[i] = spec.bin_of(raster[i]);
  }
  return out;
}

}  // namespace landca
