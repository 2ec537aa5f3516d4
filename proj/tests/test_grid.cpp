#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include "lqg/grid.hpp"

using namespace lqg;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "lqg_test_grid";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("torus size rejects n < 2") {
  CHECK_THROWS_AS(TorusSize(1), ConfigError);
  CHECK_THROWS_AS(TorusSize(0), ConfigError);
  CHECK(TorusSize(2).sites() == 4);
  CHECK(TorusSize(3).sites() == 9);  // powers of two are not required
}

TEST_CASE("lattice points wrap periodically") {
  const TorusSize n(8);
  CHECK(LatticePoint::wrapped(-1, 8, n) == LatticePoint{7, 0});
  CHECK(LatticePoint::wrapped(17, -9, n) == LatticePoint{1, 7});

  ScalarGrid g(n);
  g(0, 7) = 3.0;
  CHECK(g.wrapped(0, -1) == 3.0);
  CHECK(g.wrapped(8, 15) == 3.0);
}

TEST_CASE("grid constructor checks the value count") {
  CHECK_THROWS_AS(ScalarGrid(TorusSize(3), std::vector<double>(8)), ConfigError);
}

TEST_CASE("LQGGRID1 layout is byte exact") {
  ScalarGrid g(TorusSize(2), {1.0, -2.0, 0.5, 3.25});
  const auto path = temp_file("layout.grid");
  write_grid(path, g);

  std::ifstream in(path, std::ios::binary);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  REQUIRE(bytes.size() == 8 + 4 + 4 * 8);
  CHECK(std::string(bytes.begin(), bytes.begin() + 8) == "LQGGRID1");
  CHECK(bytes[8] == 2);
  CHECK(bytes[9] == 0);
  CHECK(bytes[10] == 0);
  CHECK(bytes[11] == 0);
  // 1.0 = 0x3FF0000000000000, little-endian
  const std::vector<unsigned char> one = {0, 0, 0, 0, 0, 0, 0xF0, 0x3F};
  CHECK(std::equal(one.begin(), one.end(), bytes.begin() + 12));
  // -2.0 = 0xC000000000000000
  CHECK(bytes[12 + 8 + 7] == 0xC0);
}

TEST_CASE("grid files round-trip bit-exactly") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  for (std::int64_t n : {2, 5, 16}) {
    ScalarGrid g(TorusSize{n});
    for (double& v : g.values()) v = normal(rng) * 1e-300;  // includes subnormal-range magnitudes
    g.values()[0] = -0.0;
    const auto path = temp_file("rt.grid");
    write_grid(path, g);
    const ScalarGrid back = read_grid(path);
    REQUIRE(back.n() == g.n());
    CHECK(std::memcmp(back.values().data(), g.values().data(), g.values().size_bytes()) == 0);
  }
}

TEST_CASE("corrupt grid files are rejected") {
  const auto path = temp_file("bad.grid");
  {
    std::ofstream out(path, std::ios::binary);
    out << "LQGGRID2";
    const char n[4] = {2, 0, 0, 0};
    out.write(n, 4);
    out << std::string(32, '\0');
  }
  CHECK_THROWS_AS((void)read_grid(path), IoError);

  write_grid(path, ScalarGrid(TorusSize(4), 1.0));
  fs::resize_file(path, fs::file_size(path) - 8);
  CHECK_THROWS_AS((void)read_grid(path), IoError);

  CHECK_THROWS_AS((void)read_grid(temp_file("missing.grid")), IoError);
}
