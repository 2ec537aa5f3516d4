#include "lqg/grid.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <numeric>

namespace lqg {

namespace {

constexpr std::array<char, 8> kMagic = {'L', 'Q', 'G', 'G', 'R', 'I', 'D', '1'};

template <typename U>
void put_le(std::vector<char>& out, U value) {
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    out.push_back(static_cast<char>((value >> (8 * i)) & 0xFFu));
  }
}

template <typename U>
U get_le(const char* p) {
  U value = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    value |= static_cast<U>(static_cast<unsigned char>(p[i])) << (8 * i);
  }
  return value;
}

}  // namespace

ScalarGrid::ScalarGrid(TorusSize n, std::vector<double> values) : n_(n), values_(std::move(values)) {
  if (values_.size() != n.sites()) {
    throw ConfigError("grid value count " + std::to_string(values_.size()) + " does not match n^2 = " +
                      std::to_string(n.sites()));
  }
}

bool ScalarGrid::all_finite() const {
  return std::ranges::all_of(values_, [](double v) { return std::isfinite(v); });
}

double ScalarGrid::sum() const { return std::accumulate(values_.begin(), values_.end(), 0.0); }
double ScalarGrid::max() const { return *std::ranges::max_element(values_); }
double ScalarGrid::min() const { return *std::ranges::min_element(values_); }

ScalarGrid ScalarGrid::indicator(TorusSize n, LatticePoint p) {
  ScalarGrid g(n);
  g[p] = 1.0;
  return g;
}

void write_grid(const std::filesystem::path& path, const ScalarGrid& grid) {
  std::vector<char> buf;
  buf.reserve(12 + 8 * grid.values().size());
  buf.insert(buf.end(), kMagic.begin(), kMagic.end());
  put_le(buf, static_cast<std::uint32_t>(grid.n()));
  for (double v : grid.values()) put_le(buf, std::bit_cast<std::uint64_t>(v));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

ScalarGrid read_grid(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < 12 || !std::equal(kMagic.begin(), kMagic.end(), buf.begin())) {
    throw IoError(path.string() + ": missing LQGGRID1 magic");
  }
  const auto n = get_le<std::uint32_t>(buf.data() + 8);
  if (n < 2) throw IoError(path.string() + ": invalid lattice side " + std::to_string(n));
  const std::size_t count = static_cast<std::size_t>(n) * n;
  if (buf.size() != 12 + 8 * count) {
    throw IoError(path.string() + ": size mismatch for n = " + std::to_string(n));
  }
  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    values[i] = std::bit_cast<double>(get_le<std::uint64_t>(buf.data() + 12 + 8 * i));
  }
  return ScalarGrid(TorusSize(n), std::move(values));
}

}  // namespace lqg
