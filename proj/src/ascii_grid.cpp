#include "landca/ascii_grid.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string_view>

namespace landca {
namespace {

struct Token {
  std::string_view text;
  std::size_t line = 0;
};

class Tokenizer {
 public:
  explicit Tokenizer(std::string_view data) : data_(data) {}

  bool next(Token& out) {
    while (pos_ < data_.size() && std::isspace(static_cast<unsigned char>(data_[pos_]))) {
      if (data_[pos_] == '\n') ++line_;
      ++pos_;
    }
    if (pos_ >= data_.size()) return false;
    const std::size_t start = pos_;
    while (pos_ < data_.size() && !std::isspace(static_cast<unsigned char>(data_[pos_]))) ++pos_;
    out = {data_.substr(start, pos_ - start), line_};
    return true;
  }

  std::size_t line() const noexcept { return line_; }

 private:
  std::string_view data_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read grid file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool parse_double(std::string_view text, double& out) {
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
         });
}

GridHeader parse_header(Tokenizer& tok, const std::string& path) {
  static constexpr std::array<std::string_view, 6> kKeys = {"ncols",    "nrows",    "xllcorner",
                                                            "yllcorner", "cellsize", "NODATA_value"};
  std::array<double, 6> values{};
  for (std::size_t k = 0; k < kKeys.size(); ++k) {
    Token key, value;
    if (!tok.next(key)) throw FormatError(path, tok.line(), "malformed header: missing " + std::string(kKeys[k]));
    if (!iequals(key.text, kKeys[k])) {
      throw FormatError(path, key.line,
                        "malformed header: expected '" + std::string(kKeys[k]) + "', found '" +
                            std::string(key.text) + "'");
    }
    if (!tok.next(value) || value.line != key.line) {
      throw FormatError(path, key.line, "malformed header: missing value for " + std::string(kKeys[k]));
    }
    if (!parse_double(value.text, values[k]) || !std::isfinite(values[k])) {
      throw FormatError(path, value.line,
                        "malformed header: bad value '" + std::string(value.text) + "' for " +
                            std::string(kKeys[k]));
    }
  }
  GridHeader h;
  for (int k : {0, 1}) {
    if (values[k] != std::floor(values[k]) || values[k] < 1 || values[k] > 1e9) {
      throw FormatError(path, 1 + k, "malformed header: " + std::string(kKeys[k]) + " must be a positive integer");
    }
  }
  h.ncols = static_cast<std::int64_t>(values[0]);
  h.nrows = static_cast<std::int64_t>(values[1]);
  h.xllcorner = values[2];
  h.yllcorner = values[3];
  h.cellsize = values[4];
  h.nodata = values[5];
  if (!(h.cellsize > 0)) throw FormatError(path, 5, "malformed header: cellsize must be positive");
  return h;
}

template <typename Cell, typename Convert>
Grid<Cell> load_grid(const std::filesystem::path& path, Convert convert) {
  const std::string data = read_file(path);
  const std::string name = path.string();
  Tokenizer tok(data);
  const GridHeader header = parse_header(tok, name);
  std::vector<Cell> cells;
  cells.reserve(header.cell_count());
  Token t;
  while (tok.next(t)) {
    if (cells.size() == header.cell_count()) {
      throw FormatError(name, t.line, "wrong cell count: more than " + std::to_string(header.cell_count()) + " values");
    }
    double v = 0;
    if (!parse_double(t.text, v)) {
      throw FormatError(name, t.line, "not a number: '" + std::string(t.text) + "'");
    }
    if (v == header.nodata) {
      cells.push_back(CellTraits<Cell>::nodata());
      continue;
    }
    if (!std::isfinite(v)) throw FormatError(name, t.line, "non-finite value '" + std::string(t.text) + "'");
    cells.push_back(convert(v, t, name));
  }
  if (cells.size() != header.cell_count()) {
    throw FormatError(name, tok.line(),
                      "wrong cell count: expected " + std::to_string(header.cell_count()) + ", found " +
                          std::to_string(cells.size()));
  }
  return Grid<Cell>(header, std::move(cells));
}

std::string format_header(const GridHeader& h) {
  std::string out;
  out += "ncols " + std::to_string(h.ncols) + "\n";
  out += "nrows " + std::to_string(h.nrows) + "\n";
  out += "xllcorner " + format_real(h.xllcorner) + "\n";
  out += "yllcorner " + format_real(h.yllcorner) + "\n";
  out += "cellsize " + format_real(h.cellsize) + "\n";
  out += "NODATA_value " + format_real(h.nodata) + "\n";
  return out;
}

template <typename Cell, typename Format>
void write_grid(const Grid<Cell>& raster, const std::filesystem::path& path, Format format) {
  const GridHeader& h = raster.header();
  std::string out = format_header(h);
  const std::string nodata = format_real(h.nodata);
  for (std::int64_t r = 0; r < h.nrows; ++r) {
    for (std::int64_t c = 0; c < h.ncols; ++c) {
      if (c > 0) out += ' ';
      const std::size_t i = raster.index(r, c);
      out += raster.is_nodata(i) ? nodata : format(raster[i]);
    }
    out += '\n';
  }
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw DataError("cannot write grid file " + path.string());
  os << out;
  if (!os) throw DataError("write failed for grid file " + path.string());
}

}  // namespace

CategoricalRaster load_categorical_grid(const std::filesystem::path& path) {
  return load_grid<ClassId>(path, [](double v, const Token& t, const std::string& name) {
    if (v != std::floor(v) || v < 0 || v > std::numeric_limits<ClassId>::max()) {
      throw FormatError(name, t.line, "non-integer value '" + std::string(t.text) + "' in categorical grid");
    }
    return static_cast<ClassId>(v);
  });
}

ContinuousRaster load_continuous_grid(const std::filesystem::path& path) {
  return load_grid<double>(path, [](double v, const Token&, const std::string&) { return v; });
}

GridHeader load_grid_header(const std::filesystem::path& path) {
  const std::string data = read_file(path);
  Tokenizer tok(data);
  return parse_header(tok, path.string());
}

void save_grid(const CategoricalRaster& raster, const std::filesystem::path& path) {
  write_grid(raster, path, [](ClassId v) { return std::to_string(v); });
}

void save_grid(const ContinuousRaster& raster, const std::filesystem::path& path, int significant_digits) {
  write_grid(raster, path, [significant_digits](double v) { return format_real(v, significant_digits); });
}

std::string format_real(double value) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return {buf.data(), ptr};
}

std::string format_real(double value, int significant_digits) {
  std::array<char, 64> buf{};
  auto [ptr, ec] =
      std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general, significant_digits);
  return {buf.data(), ptr};
}

}  // namespace landca
