#include "lqg/liouville.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <fmt/format.h>

namespace lqg {

LiouvilleWeights liouville_weights(const FieldSample& field, double gamma) {
  if (!(gamma >= 0.0 && gamma < 2.0)) {
    throw ConfigError(fmt::format("gamma must lie in [0, 2), got {}", gamma));
  }
  const double shift = 0.5 * gamma * gamma * field.sigma2;
  ScalarGrid m(field.grid.size());
  auto out = m.values();
  auto x = field.grid.values();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::exp(gamma * x[i] - shift);
    if (!std::isfinite(out[i]) || out[i] <= 0.0) {
      throw NumericalError(fmt::format("Liouville weight at site {} is {} (log weight {})", i, out[i],
                                       gamma * x[i] - shift));
    }
  }
  const double total = m.sum() / static_cast<double>(m.values().size());
  return {std::move(m), gamma, total};
}

std::size_t torus_linf_distance(LatticePoint p, LatticePoint q, TorusSize n) {
  auto axis = [m = n.value()](std::size_t u, std::size_t v) {
    const std::size_t d = u > v ? u - v : v - u;
    return std::min(d, m - d);
  };
  return std::max(axis(p.a, q.a), axis(p.b, q.b));
}

std::vector<LatticePoint> high_points(const FieldSample& field, std::size_t k, std::size_t min_separation) {
  const auto values = field.grid.values();
  if (k < 1 || k > values.size()) {
    throw ConfigError(fmt::format("high point count k must lie in [1, {}], got {}", values.size(), k));
  }
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Decreasing value; stable sort keeps row-major order among ties.
  std::ranges::stable_sort(order, [&](std::size_t i, std::size_t j) { return values[i] > values[j]; });

  const std::size_t n = field.grid.n();
  std::vector<LatticePoint> picked;
  picked.reserve(k);
  for (std::size_t idx : order) {
    const LatticePoint p{idx / n, idx % n};
    const bool separated = std::ranges::all_of(picked, [&](LatticePoint q) {
      return torus_linf_distance(p, q, field.grid.size()) >= min_separation;
    });
    if (!separated) continue;
    picked.push_back(p);
    if (picked.size() == k) return picked;
  }
  throw ConfigError(fmt::format("only {} high points satisfy separation {}, requested {}", picked.size(),
                                min_separation, k));
}

void write_high_points_csv(const std::filesystem::path& path, const FieldSample& field,
                           const std::vector<LatticePoint>& points) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "rank,a,b,X\n";
  for (std::size_t r = 0; r < points.size(); ++r) {
    out << fmt::format("{},{},{},{:.17g}\n", r + 1, points[r].a, points[r].b, field.grid[points[r]]);
  }
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace lqg
