#include "wbe/field_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cctype>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace wbe {

namespace {

void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int n = 0; n < 8; ++n) b[n] = static_cast<unsigned char>((v >> (8 * n)) & 0xffu);
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  if (!in) throw std::runtime_error("read_field_binary: truncated input");
  std::uint64_t v = 0;
  for (int n = 0; n < 8; ++n) v |= static_cast<std::uint64_t>(b[n]) << (8 * n);
  return v;
}

void put_i64(std::ostream& out, std::int64_t v) { put_u64(out, static_cast<std::uint64_t>(v)); }
void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }
std::int64_t get_i64(std::istream& in) { return static_cast<std::int64_t>(get_u64(in)); }
double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

}  // namespace

void write_field_binary(const ScalarField& f, std::ostream& out) {
  const GridDomain& d = f.domain();
  put_i64(out, d.dims());
  for (int a = 0; a < d.dims(); ++a) put_i64(out, d.shape(a));
  for (int a = 0; a < d.dims(); ++a) put_f64(out, d.spacing(a));
  for (int a = 0; a < d.dims(); ++a) put_f64(out, d.origin(a));
  for (double v : f.values()) put_f64(out, v);
}

void write_field_binary(const ScalarField& f, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  write_field_binary(f, out);
}

ScalarField read_field_binary(std::istream& in) {
  const std::int64_t dims = get_i64(in);
  if (dims != 2 && dims != 3) throw std::runtime_error("read_field_binary: bad dims");
  std::array<Index, 3> shape{1, 1, 1};
  std::array<double, 3> spacing{1.0, 1.0, 1.0};
  std::array<double, 3> origin{0.0, 0.0, 0.0};
  for (int a = 0; a < dims; ++a) shape[a] = get_i64(in);
  for (int a = 0; a < dims; ++a) spacing[a] = get_f64(in);
  for (int a = 0; a < dims; ++a) origin[a] = get_f64(in);
  GridDomain d(static_cast<int>(dims), shape, spacing, origin);
  std::vector<double> values(static_cast<std::size_t>(d.cell_count()));
  for (double& v : values) v = get_f64(in);
  return ScalarField(d, std::move(values));
}

ScalarField read_field_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_field_binary(in);
}

void write_field_csv(const ScalarField& f, std::ostream& out) {
  const GridDomain& d = f.domain();
  out << (d.dims() == 3 ? "i,j,k,value\n" : "i,j,value\n");
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (Index n = 0; n < f.size(); ++n) {
    const auto idx = d.unravel(n);
    out << idx[0] << ',' << idx[1] << ',';
    if (d.dims() == 3) out << idx[2] << ',';
    out << f[n] << '\n';
  }
}

void write_field_csv(const ScalarField& f, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  write_field_csv(f, out);
}

namespace {

// Next whitespace-delimited header token, skipping '#' comments.
std::string pgm_token(std::istream& in) {
  std::string tok;
  char ch = 0;
  while (in.get(ch)) {
    if (ch == '#') {
      std::string line;
      std::getline(in, line);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(ch))) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(ch);
  }
  if (tok.empty()) throw std::runtime_error("read_pgm: truncated header");
  return tok;
}

}  // namespace

ScalarField read_pgm(const std::string& path, const GridDomain& domain) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  const std::string magic = pgm_token(in);
  if (magic != "P2" && magic != "P5") throw std::runtime_error("read_pgm: not a PGM file: " + path);
  const long width = std::stol(pgm_token(in));
  const long height = std::stol(pgm_token(in));
  const long maxval = std::stol(pgm_token(in));
  if (maxval <= 0 || maxval > 65535) throw std::runtime_error("read_pgm: bad maxval");
  if (domain.dims() != 2 || domain.shape(0) != width || domain.shape(1) != height)
    throw std::runtime_error("read_pgm: image size does not match the planar domain");

  ScalarField f(domain);
  for (long row = 0; row < height; ++row) {
    for (long col = 0; col < width; ++col) {
      long v = 0;
      if (magic == "P2") {
        if (!(in >> v)) throw std::runtime_error("read_pgm: truncated pixel data");
      } else if (maxval < 256) {
        const int b = in.get();
        if (b == EOF) throw std::runtime_error("read_pgm: truncated pixel data");
        v = b;
      } else {
        const int hi = in.get();
        const int lo = in.get();
        if (lo == EOF) throw std::runtime_error("read_pgm: truncated pixel data");
        v = (hi << 8) | lo;
      }
      f.at(col, height - 1 - row) = static_cast<double>(v) / static_cast<double>(maxval);
    }
  }
  return f;
}

void write_pgm(const ScalarField& f, const std::string& path) {
  const GridDomain& d = f.domain();
  if (d.dims() != 2) throw std::invalid_argument("write_pgm: planar fields only");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  const double hi = std::max(f.max(), 1e-300);
  out << "P5\n" << d.shape(0) << ' ' << d.shape(1) << "\n255\n";
  for (Index row = 0; row < d.shape(1); ++row)
    for (Index col = 0; col < d.shape(0); ++col) {
      const double v = std::clamp(f.at(col, d.shape(1) - 1 - row) / hi, 0.0, 1.0);
      out.put(static_cast<char>(std::lround(v * 255.0)));
    }
}

}  // namespace wbe
