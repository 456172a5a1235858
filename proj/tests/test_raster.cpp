#include <doctest.h>

#include <fstream>
#include <random>

#include "landca/ascii_grid.hpp"
#include "landca/map_algebra.hpp"
#include "test_support.hpp"

using namespace landca;
using namespace landca::testing;

namespace {

std::filesystem::path write_text(const std::filesystem::path& dir, const std::string& name, const std::string& text) {
  const auto p = dir / name;
  std::ofstream(p) << text;
  return p;
}

const char* kTwoByTwo =
    "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 250\nNODATA_value -9999\n1 1\n2 2\n";

std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("ascii grid: load categorical and continuous views of one file") {
  const auto dir = temp_dir("raster_load");
  const auto p = write_text(dir, "a.asc", kTwoByTwo);

  const CategoricalRaster cat = load_categorical_grid(p);
  CHECK(cat.header().cellsize == 250.0);
  CHECK(cat.ncols() == 2);
  CHECK(classes_present(cat) == std::vector<ClassId>{1, 2});
  CHECK(cat.at(0, 0) == 1);
  CHECK(cat.at(1, 1) == 2);

  const ContinuousRaster cont = load_continuous_grid(p);
  CHECK(cont.at(0, 1) == 1.0);
  CHECK(cont.at(1, 0) == 2.0);
}

TEST_CASE("ascii grid: reader tolerates whitespace and case in keys") {
  const auto dir = temp_dir("raster_ws");
  const auto p = write_text(dir, "a.asc",
                            "NCOLS   2\r\nnRows\t2\nXLLCORNER 10.5\nyllcorner -3\nCellSize 30\nnodata_value -1\n"
                            "  1    -1\n\n 0 3   \n");
  const CategoricalRaster g = load_categorical_grid(p);
  CHECK(g.header().xllcorner == 10.5);
  CHECK(g.is_nodata(1));
  CHECK(g[3] == 3);
}

TEST_CASE("ascii grid: errors carry line numbers") {
  const auto dir = temp_dir("raster_err");
  SUBCASE("wrong cell count") {
    const auto p = write_text(dir, "short.asc",
                              "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 250\nNODATA_value -9999\n1 1\n2\n");
    try {
      load_categorical_grid(p);
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      CHECK(std::string(e.what()).find("wrong cell count") != std::string::npos);
    }
  }
  SUBCASE("too many cells") {
    const auto p = write_text(dir, "long.asc",
                              "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 250\nNODATA_value -9999\n1 1\n2 2\n3\n");
    try {
      load_categorical_grid(p);
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      CHECK(e.line() == 9);
    }
  }
  SUBCASE("non-integer categorical value") {
    const auto p = write_text(dir, "frac.asc",
                              "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 250\nNODATA_value -9999\n1 1\n2 2.5\n");
    try {
      load_categorical_grid(p);
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      CHECK(e.line() == 8);
    }
    CHECK_NOTHROW(load_continuous_grid(p));
  }
  SUBCASE("malformed header") {
    const auto p = write_text(dir, "hdr.asc", "ncols 2\nrows 2\n");
    try {
      load_categorical_grid(p);
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      CHECK(e.line() == 2);
    }
  }
  SUBCASE("missing file") { CHECK_THROWS_AS(load_categorical_grid(dir / "nope.asc"), DataError); }
}

TEST_CASE("ascii grid: round trips") {
  const auto dir = temp_dir("raster_rt");
  SUBCASE("categorical is bit-exact, NODATA written as header token") {
    CategoricalRaster g = categorical(3, 2, {1, 2, kNoClass, 0, 7, 1}, 250.0);
    save_grid(g, dir / "g.asc");
    CHECK(load_categorical_grid(dir / "g.asc") == g);
    CHECK(read_text(dir / "g.asc").find("1 2 -9999\n") != std::string::npos);
  }
  SUBCASE("continuous within declared precision") {
    ContinuousRaster g(header(2, 1));
    g[0] = 1.0 / 3.0;
    save_grid(g, dir / "c.asc");
    const std::string text = read_text(dir / "c.asc");
    CHECK(text.find("0.333333") != std::string::npos);
    const ContinuousRaster back = load_continuous_grid(dir / "c.asc");
    CHECK(std::abs(back[0] - 1.0 / 3.0) < 1e-6);
    CHECK(back.is_nodata(1));
  }
  SUBCASE("random categorical grids") {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 20; ++t) {
      GridHeader h = header(1 + static_cast<int>(rng() % 17), 1 + static_cast<int>(rng() % 13), 0.1 + (rng() % 1000) / 7.0);
      h.xllcorner = -123.456789 + static_cast<double>(rng() % 100000) / 3.0;
      h.nodata = -1;
      CategoricalRaster g = random_map(rng, h.ncols, h.nrows, 5, 0.2);
      g = CategoricalRaster(h, std::vector<ClassId>(g.cells().begin(), g.cells().end()));
      save_grid(g, dir / "r.asc");
      CHECK(load_categorical_grid(dir / "r.asc") == g);
    }
  }
}

TEST_CASE("distance transform") {
  SUBCASE("self, orthogonal and diagonal neighbours") {
    CategoricalRaster g = filled(3, 3, 0, 250.0);
    g.at(1, 1) = 5;
    const ContinuousRaster d = distance_transform(g, 5);
    CHECK(d.at(1, 1) == 0.0);
    CHECK(d.at(0, 1) == 250.0);
    CHECK(d.at(1, 2) == 250.0);
    CHECK(d.at(0, 0) == doctest::Approx(353.5534).epsilon(1e-6));
    CHECK(d.at(2, 2) == std::sqrt(2.0) * 250.0);
  }
  SUBCASE("NODATA stays NODATA and no target is an error") {
    CategoricalRaster g = categorical(2, 1, {kNoClass, 3});
    const ContinuousRaster d = distance_transform(g, 3);
    CHECK(d.is_nodata(0));
    CHECK(d[1] == 0.0);
    CHECK_THROWS_AS(distance_transform(g, 9), DataError);
  }
  SUBCASE("equals brute force exactly on random grids, any thread count") {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 60; ++t) {
      const auto nc = 1 + static_cast<std::int64_t>(rng() % 64);
      const auto nr = 1 + static_cast<std::int64_t>(rng() % 64);
      CategoricalRaster g(header(nc, nr, 30.0), 0);
      const double density = (t % 3 == 0) ? 0.002 : 0.05;
      std::uniform_real_distribution<double> u(0, 1);
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (u(rng) < density) g[i] = 1;
        else if (u(rng) < 0.05) g[i] = kNoClass;
      }
      if (count_class(g, 1) == 0) g[rng() % g.size()] = 1;
      const ContinuousRaster oracle = brute_force_distance(g, 1);
      CHECK(distance_transform(g, 1, 1) == oracle);
      CHECK(distance_transform(g, 1, 4) == oracle);
    }
  }
}

TEST_CASE("binning") {
  const BinningSpec spec = BinningSpec::continuous({100, 500});
  ContinuousRaster r(header(4, 1));
  r[0] = 50;
  r[1] = 100;
  r[2] = 1e9;
  const CategoricalRaster b = bin_continuous(r, spec);
  CHECK(b[0] == 0);
  CHECK(b[1] == 1);
  CHECK(b[2] == 2);
  CHECK(b.is_nodata(3));

  CHECK_THROWS_AS(BinningSpec::continuous({1, 1}).validate(), ConfigError);
  CHECK_THROWS_AS(BinningSpec::continuous({}).validate(), ConfigError);

  SUBCASE("total and monotone on finite values") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    const BinningSpec s = BinningSpec::continuous({-1000, -1, 0, 2.5, 40000});
    double prev_v = -std::numeric_limits<double>::infinity();
    ClassId prev_b = 0;
    std::vector<double> values(500);
    for (auto& v : values) v = u(rng);
    values.push_back(-1000);
    values.push_back(40000);
    std::sort(values.begin(), values.end());
    for (double v : values) {
      const ClassId k = s.bin_of(v);
      CHECK(k >= 0);
      CHECK(k <= 5);
      if (v > prev_v) CHECK(k >= prev_b);
      prev_v = v;
      prev_b = k;
    }
  }
}

TEST_CASE("masking") {
  const CategoricalRaster land = categorical(2, 2, {1, 2, 3, 4});
  SUBCASE("identity mask") { CHECK(apply_mask(land, filled(2, 2, 9), 9) == land); }
  SUBCASE("empty mask") {
    const CategoricalRaster m = apply_mask(land, filled(2, 2, 8), 9);
    for (std::size_t i = 0; i < m.size(); ++i) CHECK(m.is_nodata(i));
  }
  SUBCASE("half and half keeps exactly the kept half unchanged") {
    ContinuousRaster v(header(2, 2));
    for (std::size_t i = 0; i < 4; ++i) v[i] = 0.5 * static_cast<double>(i);
    const ContinuousRaster m = apply_mask(v, categorical(2, 2, {1, 1, 0, 0}), 1);
    CHECK(m[0] == 0.0);
    CHECK(m[1] == 0.5);
    CHECK(m.is_nodata(2));
    CHECK(m.is_nodata(3));
  }
  SUBCASE("misaligned zone") { CHECK_THROWS_AS(apply_mask(land, filled(3, 2, 1), 1), DataError); }
}

TEST_CASE("grid header validation") {
  CHECK_THROWS_AS(CategoricalRaster(header(0, 2)), DataError);
  CHECK_THROWS_AS(CategoricalRaster(header(2, 2, 0.0)), DataError);
  CHECK_THROWS_AS(categorical(2, 2, {1, 2, 3}), DataError);
  GridHeader a = header(2, 2);
  GridHeader b = a;
  b.nodata = -1;
  CHECK(aligned(a, b));
  b.xllcorner = 1;
  CHECK_FALSE(aligned(a, b));
}
