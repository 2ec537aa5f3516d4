#include "lqg/field_sampler.hpp"

#include <fftw3.h>

#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>

namespace lqg {

namespace {

// The FFTW planner is not re-entrant; execution of distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};

double sin2(std::size_t j, std::size_t n) {
  const double s = std::sin(std::numbers::pi * static_cast<double>(j) / static_cast<double>(n));
  return s * s;
}

}  // namespace

std::pair<double, double> NormalStream::next_pair() {
  const double u1 = next_uniform();
  const double u2 = next_uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

double NormalStream::next_uniform() {
  // 53 random bits mapped to (0, 1]; never zero so log(u) stays finite.
  return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
}

ScalarGrid torus_eigenvalues(TorusSize n) {
  ScalarGrid lambda(n);
  const std::size_t m = n.value();
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = 0; k < m; ++k) {
      lambda(j, k) = 4.0 * sin2(j, m) + 4.0 * sin2(k, m);
    }
  }
  return lambda;
}

double green_function(TorusSize n, std::int64_t dx, std::int64_t dy) {
  const auto m = static_cast<std::int64_t>(n.value());
  const LatticePoint d = LatticePoint::wrapped(dx, dy, n);
  const ScalarGrid lambda = torus_eigenvalues(n);
  double sum = 0.0;
  for (std::int64_t j = 0; j < m; ++j) {
    for (std::int64_t k = 0; k < m; ++k) {
      if (j == 0 && k == 0) continue;
      // Reduce the phase index exactly before converting to an angle.
      const std::int64_t phase = (j * static_cast<std::int64_t>(d.a) + k * static_cast<std::int64_t>(d.b)) % m;
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(phase) / static_cast<double>(m);
      sum += std::cos(angle) / lambda(static_cast<std::size_t>(j), static_cast<std::size_t>(k));
    }
  }
  return sum / static_cast<double>(n.sites());
}

double field_variance(TorusSize n) {
  const ScalarGrid lambda = torus_eigenvalues(n);
  double sum = 0.0;
  for (std::size_t i = 1; i < lambda.values().size(); ++i) sum += 1.0 / lambda.values()[i];
  return 2.0 * std::numbers::pi * sum / static_cast<double>(n.sites());
}

std::vector<std::complex<double>> spectral_coefficients(TorusSize n, std::uint64_t seed) {
  const std::size_t m = n.value();
  std::vector<std::complex<double>> c(n.sites());
  NormalStream normals(seed);
  const double scale = std::sqrt(2.0 * std::numbers::pi);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = 0; k < m; ++k) {
      // Draw for every entry, including the zero mode, so the stream layout
      // does not depend on which coefficients are masked.
      const auto [z1, z2] = normals.next_pair();
      if (j == 0 && k == 0) continue;
      const double denom = 2.0 * std::sqrt(sin2(j, m) + sin2(k, m));
      c[j * m + k] = scale * std::complex<double>(z1, z2) / denom;
    }
  }
  return c;
}

std::vector<std::complex<double>> inverse_dft(TorusSize n, const std::vector<std::complex<double>>& c) {
  const std::size_t count = n.sites();
  if (c.size() != count) throw ConfigError("coefficient count does not match n^2");
  std::unique_ptr<fftw_complex[], FftwFree> buf(fftw_alloc_complex(count));
  fftw_plan plan = nullptr;
  {
    std::lock_guard lock(planner_mutex());
    const int m = static_cast<int>(n.value());
    plan = fftw_plan_dft_2d(m, m, buf.get(), buf.get(), FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  for (std::size_t i = 0; i < count; ++i) {
    buf[i][0] = c[i].real();
    buf[i][1] = c[i].imag();
  }
  fftw_execute(plan);
  std::vector<std::complex<double>> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = {buf[i][0], buf[i][1]};
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

std::vector<std::complex<double>> inverse_dft_direct(TorusSize n, const std::vector<std::complex<double>>& c) {
  const std::size_t m = n.value();
  if (m > 16) throw ConfigError("direct DFT oracle supports n <= 16");
  if (c.size() != n.sites()) throw ConfigError("coefficient count does not match n^2");
  std::vector<std::complex<double>> out(n.sites());
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) {
      std::complex<double> acc = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t k = 0; k < m; ++k) {
          const std::size_t phase = (j * a + k * b) % m;
          acc += c[j * m + k] * std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(phase) /
                                                    static_cast<double>(m));
        }
      }
      out[a * m + b] = acc;
    }
  }
  return out;
}

FieldSample sample_gff(TorusSize n, std::uint64_t seed) {
  const auto synthesized = inverse_dft(n, spectral_coefficients(n, seed));
  ScalarGrid grid(n);
  const double inv_n = 1.0 / static_cast<double>(n.value());
  for (std::size_t i = 0; i < synthesized.size(); ++i) grid.values()[i] = inv_n * synthesized[i].real();
  return {std::move(grid), seed, field_variance(n)};
}

}  // namespace lqg
