#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lqg {

/// Raised for invalid parameters (maps to CLI exit code 2).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical routine fails: CG non-convergence, non-finite
/// weights, conservation breach (exit code 3).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for unreadable, missing or corrupt files (exit code 4).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Side length of the square torus T_n = (Z/nZ)^2.
class TorusSize {
 public:
  explicit TorusSize(std::int64_t n) : n_(n) {
    if (n < 2) throw ConfigError("torus size must be >= 2, got " + std::to_string(n));
  }
  [[nodiscard]] std::size_t value() const { return static_cast<std::size_t>(n_); }
  [[nodiscard]] std::size_t sites() const { return value() * value(); }
  friend bool operator==(TorusSize, TorusSize) = default;

 private:
  std::int64_t n_;
};

/// Lattice site (row a, column b), always stored reduced mod n.
struct LatticePoint {
  std::size_t a = 0;
  std::size_t b = 0;

  static LatticePoint wrapped(std::int64_t a, std::int64_t b, TorusSize n) {
    const auto m = static_cast<std::int64_t>(n.value());
    return {static_cast<std::size_t>(((a % m) + m) % m), static_cast<std::size_t>(((b % m) + m) % m)};
  }
  friend bool operator==(const LatticePoint&, const LatticePoint&) = default;
};

/// n x n real values on the torus, row-major.
class ScalarGrid {
 public:
  explicit ScalarGrid(TorusSize n, double fill = 0.0) : n_(n), values_(n.sites(), fill) {}
  ScalarGrid(TorusSize n, std::vector<double> values);

  [[nodiscard]] TorusSize size() const { return n_; }
  [[nodiscard]] std::size_t n() const { return n_.value(); }
  [[nodiscard]] std::size_t index(std::size_t a, std::size_t b) const { return a * n() + b; }

  double& operator()(std::size_t a, std::size_t b) { return values_[index(a, b)]; }
  double operator()(std::size_t a, std::size_t b) const { return values_[index(a, b)]; }
  double& operator[](LatticePoint p) { return values_[index(p.a, p.b)]; }
  double operator[](LatticePoint p) const { return values_[index(p.a, p.b)]; }

  /// Periodic access with signed offsets.
  [[nodiscard]] double wrapped(std::int64_t a, std::int64_t b) const {
    return (*this)[LatticePoint::wrapped(a, b, n_)];
  }

  [[nodiscard]] std::span<double> values() { return values_; }
  [[nodiscard]] std::span<const double> values() const { return values_; }

  [[nodiscard]] bool all_finite() const;
  [[nodiscard]] double sum() const;
  [[nodiscard]] double max() const;
  [[nodiscard]] double min() const;

  static ScalarGrid indicator(TorusSize n, LatticePoint p);

  friend bool operator==(const ScalarGrid&, const ScalarGrid&) = default;

 private:
  TorusSize n_;
  std::vector<double> values_;
};

// LQGGRID1: 8-byte magic, u32 LE n, n*n f64 LE row-major.
void write_grid(const std::filesystem::path& path, const ScalarGrid& grid);
[[nodiscard]] ScalarGrid read_grid(const std::filesystem::path& path);

}  // namespace lqg
