#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "lqg/grid.hpp"

namespace lqg {

/// Standard normals from a 64-bit Mersenne Twister via the Box-Muller
/// transform. Both the engine and the transform are fully specified, so the
/// stream is bit-identical across platforms for a given seed (unlike
/// std::normal_distribution).
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

  /// Returns an independent pair (Z1, Z2).
  std::pair<double, double> next_pair();

 private:
  double next_uniform();  // in (0, 1]
  std::mt19937_64 engine_;
};

/// Eigenvalues 4 sin^2(pi j/n) + 4 sin^2(pi k/n) of the unnormalized torus
/// Laplacian, stored at grid position (j, k) for zero-based j, k.
[[nodiscard]] ScalarGrid torus_eigenvalues(TorusSize n);

/// (1/n^2) sum_{(j,k) != 0} cos(2 pi (j dx + k dy)/n) / lambda_{j,k}.
[[nodiscard]] double green_function(TorusSize n, std::int64_t dx, std::int64_t dy);

/// Exact site variance E[X(x)^2] = 2 pi G(x, x).
[[nodiscard]] double field_variance(TorusSize n);

struct FieldSample {
  ScalarGrid grid;
  std::uint64_t seed = 0;
  double sigma2 = 0.0;
};

/// Spectral coefficients Xtilde(j, k), row-major, zero mode set to 0.
[[nodiscard]] std::vector<std::complex<double>> spectral_coefficients(TorusSize n, std::uint64_t seed);

/// out(a, b) = sum_{j,k} c(j, k) exp(2 pi i (j a + k b)/n), unnormalized.
/// Fast route (FFTW).
[[nodiscard]] std::vector<std::complex<double>> inverse_dft(TorusSize n, const std::vector<std::complex<double>>& c);

/// Same transform by direct O(n^4) summation. Test oracle; rejects n > 16.
[[nodiscard]] std::vector<std::complex<double>> inverse_dft_direct(TorusSize n,
                                                                   const std::vector<std::complex<double>>& c);

/// Discrete GFF with covariance 2 pi G. Deterministic in (n, seed).
[[nodiscard]] FieldSample sample_gff(TorusSize n, std::uint64_t seed);

}  // namespace lqg
