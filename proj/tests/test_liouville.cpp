#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "lqg/liouville.hpp"

using namespace lqg;

namespace {

FieldSample field_from(std::int64_t n, std::vector<double> values) {
  return FieldSample{ScalarGrid(TorusSize(n), std::move(values)), 0, field_variance(TorusSize(n))};
}

}  // namespace

TEST_CASE("gamma = 0 gives unit weights") {
  const FieldSample f = sample_gff(TorusSize(16), 4);
  const LiouvilleWeights w = liouville_weights(f, 0.0);
  for (double v : w.grid.values()) CHECK(v == 1.0);
  CHECK(w.total_mass == 1.0);
}

TEST_CASE("gamma outside [0, 2) is rejected") {
  const FieldSample f = sample_gff(TorusSize(8), 4);
  CHECK_THROWS_AS((void)liouville_weights(f, 2.0), ConfigError);
  CHECK_THROWS_AS((void)liouville_weights(f, -0.1), ConfigError);
  CHECK_THROWS_AS((void)liouville_weights(f, std::nan("")), ConfigError);
  CHECK_NOTHROW((void)liouville_weights(f, 1.999));
}

TEST_CASE("weights follow the exponential formula") {
  const FieldSample f = sample_gff(TorusSize(16), 8);
  for (double gamma : {0.4, 1.2, 1.9}) {
    const LiouvilleWeights w = liouville_weights(f, gamma);
    CHECK(w.gamma == gamma);
    double total = 0.0;
    for (std::size_t i = 0; i < 256; ++i) {
      const double x = f.grid.values()[i];
      CHECK(w.grid.values()[i] == doctest::Approx(std::exp(gamma * x - 0.5 * gamma * gamma * f.sigma2)).epsilon(1e-14));
      total += w.grid.values()[i];
    }
    CHECK(w.total_mass == doctest::Approx(total / 256.0).epsilon(1e-14));

    // log m(x) - log m(y) = gamma (X(x) - X(y))
    const double lhs = std::log(w.grid(3, 5)) - std::log(w.grid(11, 2));
    CHECK(lhs == doctest::Approx(gamma * (f.grid(3, 5) - f.grid(11, 2))).epsilon(1e-12));

    const auto top = high_points(f, 1);
    CHECK(w.grid[top[0]] == w.grid.max());
  }
}

TEST_CASE("overflowing weights are a numerical failure") {
  const FieldSample f = field_from(2, {800.0, 0.0, 0.0, -800.0});
  CHECK_THROWS_AS((void)liouville_weights(f, 1.5), NumericalError);
}

TEST_CASE("expected total mass is one (Monte Carlo)") {
  // E[m(x)] = 1 for every x, so the average of total_mass over seeds is 1.
  const int seeds = 400;
  double mean = 0.0, sq = 0.0;
  for (int s = 0; s < seeds; ++s) {
    const double mass = liouville_weights(sample_gff(TorusSize(16), static_cast<std::uint64_t>(s)), 0.6).total_mass;
    mean += mass;
    sq += mass * mass;
  }
  mean /= seeds;
  const double se = std::sqrt((sq / seeds - mean * mean) / seeds);
  CHECK(std::abs(mean - 1.0) < 4.0 * se);
}

TEST_CASE("high points: ordering and tie-break") {
  const FieldSample f = field_from(3, {1.0, 5.0, 2.0,  //
                                       5.0, 0.0, 3.0,  //
                                       4.0, 5.0, -1.0});
  const auto top = high_points(f, 5);
  const std::vector<LatticePoint> expected = {{0, 1}, {1, 0}, {2, 1}, {2, 0}, {1, 2}};
  CHECK(top == expected);
  CHECK_THROWS_AS((void)high_points(f, 0), ConfigError);
  CHECK_THROWS_AS((void)high_points(f, 10), ConfigError);
  CHECK(high_points(f, 9).size() == 9);
}

TEST_CASE("high points agree with a brute-force sort and are prefix-stable") {
  const FieldSample f = sample_gff(TorusSize(32), 21);
  std::vector<std::size_t> order(1024);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    const double xi = f.grid.values()[i], xj = f.grid.values()[j];
    return xi != xj ? xi > xj : i < j;
  });
  const auto top = high_points(f, 50);
  for (std::size_t r = 0; r < 50; ++r) {
    CHECK(top[r].a * 32 + top[r].b == order[r]);
  }
  const auto top10 = high_points(f, 10);
  CHECK(std::equal(top10.begin(), top10.end(), top.begin()));
}

TEST_CASE("high points honor the minimum separation") {
  const FieldSample f = sample_gff(TorusSize(32), 21);
  const auto sep = high_points(f, 12, 5);
  CHECK(sep.front() == high_points(f, 1).front());
  for (std::size_t i = 0; i < sep.size(); ++i) {
    for (std::size_t j = i + 1; j < sep.size(); ++j) CHECK(torus_linf_distance(sep[i], sep[j], TorusSize(32)) >= 5);
  }
  // Far more points than fit at separation 16 on a 32-torus.
  CHECK_THROWS_AS((void)high_points(f, 10, 16), ConfigError);
}

TEST_CASE("torus L-infinity distance wraps") {
  const TorusSize n(10);
  CHECK(torus_linf_distance({0, 0}, {9, 9}, n) == 1);
  CHECK(torus_linf_distance({2, 3}, {7, 3}, n) == 5);
  CHECK(torus_linf_distance({1, 1}, {1, 1}, n) == 0);
}

TEST_CASE("high-point CSV") {
  const FieldSample f = field_from(2, {0.5, 2.0, -1.0, 1.25});
  const auto path = std::filesystem::temp_directory_path() / "lqg_highpoints.csv";
  write_high_points_csv(path, f, high_points(f, 2));
  std::ifstream in(path);
  std::string header, first, second;
  std::getline(in, header);
  std::getline(in, first);
  std::getline(in, second);
  CHECK(header == "rank,a,b,X");
  CHECK(first.rfind("1,0,1,", 0) == 0);
  CHECK(second.rfind("2,1,1,", 0) == 0);
  CHECK(std::stod(first.substr(6)) == 2.0);
}
