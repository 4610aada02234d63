#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "wbe/field_io.hpp"
#include "wbe/targets.hpp"

using namespace wbe;

namespace {

std::filesystem::path temp_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "wbe_field_io_test";
  std::filesystem::create_directories(dir);
  return dir;
}

template <typename T>
T read_le(const std::string& bytes, std::size_t& at) {
  T v;
  std::memcpy(&v, bytes.data() + at, sizeof(T));
  at += sizeof(T);
  return v;
}

}  // namespace

TEST(FieldBinary, ByteLayout) {
  const GridDomain d = GridDomain::planar(3, 4, 0.5, 0.25, -1.0, 2.0);
  ScalarField f(d);
  for (Index n = 0; n < f.size(); ++n) f[n] = 0.5 * static_cast<double>(n);
  std::ostringstream out;
  write_field_binary(f, out);
  const std::string b = out.str();
  ASSERT_EQ(b.size(), 8u * (1 + 2 + 2 + 2 + 12));
  std::size_t at = 0;
  EXPECT_EQ(read_le<std::int64_t>(b, at), 2);
  EXPECT_EQ(read_le<std::int64_t>(b, at), 3);
  EXPECT_EQ(read_le<std::int64_t>(b, at), 4);
  EXPECT_EQ(read_le<double>(b, at), 0.5);
  EXPECT_EQ(read_le<double>(b, at), 0.25);
  EXPECT_EQ(read_le<double>(b, at), -1.0);
  EXPECT_EQ(read_le<double>(b, at), 2.0);
  for (int n = 0; n < 12; ++n) EXPECT_EQ(read_le<double>(b, at), 0.5 * n);
  // Little-endian: the first byte carries the low bits of dims.
  EXPECT_EQ(static_cast<unsigned char>(b[0]), 2u);
}

TEST(FieldBinary, RoundTrip3D) {
  const GridDomain d = GridDomain::cube(5, 4, 3, 0.01, Point(0.1, -0.2, 0.3));
  std::mt19937_64 rng(6);
  const ScalarField f = test::random_field(d, rng, -1, 1);
  const auto path = (temp_dir() / "f.bin").string();
  write_field_binary(f, path);
  const ScalarField g = read_field_binary(path);
  EXPECT_TRUE(g.domain() == d);
  EXPECT_EQ(g.values(), f.values());
}

TEST(FieldBinary, RejectsTruncation) {
  std::ostringstream out;
  write_field_binary(ScalarField(GridDomain::planar(3, 3, 1, 1)), out);
  std::string b = out.str();
  b.resize(b.size() - 4);
  std::istringstream in(b);
  EXPECT_THROW(read_field_binary(in), std::runtime_error);
}

TEST(FieldCsv, RowsPerCell) {
  const GridDomain d = GridDomain::planar(3, 3, 1, 1);
  ScalarField f(d);
  f.at(1, 2) = 0.25;
  std::ostringstream out;
  write_field_csv(f, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "i,j,value");
  int rows = 0;
  bool found = false;
  while (std::getline(in, line)) {
    ++rows;
    if (line == "1,2,0.25") found = true;
  }
  EXPECT_EQ(rows, 9);
  EXPECT_TRUE(found);

  std::ostringstream out3;
  write_field_csv(ScalarField(GridDomain::cube(3, 3, 3, 1, Point::Zero())), out3);
  EXPECT_EQ(out3.str().substr(0, 12), "i,j,k,value\n");
}

TEST(Pgm, OrientationAndScaling) {
  const auto path = (temp_dir() / "t.pgm").string();
  {
    std::ofstream out(path);
    out << "P2\n# comment\n3 4\n10\n"
        << "10 0 0\n"
        << "0 0 0\n"
        << "0 5 0\n"
        << "0 0 0\n";
  }
  const GridDomain d = GridDomain::planar(3, 4, 1, 1);
  const ScalarField f = read_pgm(path, d);
  EXPECT_DOUBLE_EQ(f.at(0, 3), 1.0);  // top-left pixel is the top row of the grid
  EXPECT_DOUBLE_EQ(f.at(1, 1), 0.5);
  EXPECT_DOUBLE_EQ(f.sum(), 1.5);
  EXPECT_THROW(read_pgm(path, GridDomain::planar(4, 3, 1, 1)), std::runtime_error);

  const auto back = (temp_dir() / "u.pgm").string();
  write_pgm(f, back);
  const ScalarField g = read_pgm(back, d);
  EXPECT_LT(max_abs_diff(f, g), 1.0 / 255.0);

  const TargetDistribution p = image_target(path, d);
  EXPECT_NEAR(p.field().at(0, 3) / p.field().at(1, 1), 2.0, 1e-12);
}
