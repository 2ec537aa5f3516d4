#include "lqg/operators.hpp"

#include <cmath>

#include <fmt/format.h>

namespace lqg {

GeneratorContext::GeneratorContext(LiouvilleWeights weights) : weights_(std::move(weights)) {
  const auto m = weights_.grid.values();
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (!std::isfinite(m[i]) || m[i] <= 0.0) {
      throw NumericalError(fmt::format("generator weight at site {} is {}", i, m[i]));
    }
  }
}

// Pairwise neighbor sums keep the stencil exact on constants.
void laplacian_into(std::size_t n, std::span<const double> f, std::span<double> out) {
  for (std::size_t a = 0; a < n; ++a) {
    const double* row = f.data() + a * n;
    const double* up = f.data() + ((a + n - 1) % n) * n;
    const double* down = f.data() + ((a + 1) % n) * n;
    double* dst = out.data() + a * n;
    dst[0] = 0.25 * ((up[0] + down[0]) + (row[n - 1] + row[1])) - row[0];
    for (std::size_t b = 1; b + 1 < n; ++b) {
      dst[b] = 0.25 * ((up[b] + down[b]) + (row[b - 1] + row[b + 1])) - row[b];
    }
    dst[n - 1] = 0.25 * ((up[n - 1] + down[n - 1]) + (row[n - 2] + row[0])) - row[n - 1];
  }
}

void cn_system_into(std::span<const double> m, std::size_t n, double dt, CnSide side, std::span<const double> f,
                    std::span<double> out) {
  laplacian_into(n, f, out);
  const double c = -static_cast<double>(static_cast<int>(side)) * 0.5 * dt;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = m[i] * f[i] + c * out[i];
}

ScalarGrid apply_laplacian(const ScalarGrid& f) {
  ScalarGrid out(f.size());
  laplacian_into(f.n(), f.values(), out.values());
  return out;
}

ScalarGrid apply_generator(const GeneratorContext& ctx, const ScalarGrid& f) {
  if (!(f.size() == ctx.size())) throw ConfigError("grid size does not match generator");
  ScalarGrid out = apply_laplacian(f);
  const auto m = ctx.m();
  auto v = out.values();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] /= m[i];
  return out;
}

ScalarGrid cn_system_apply(const GeneratorContext& ctx, double dt, CnSide side, const ScalarGrid& f) {
  if (!(dt > 0.0)) throw ConfigError(fmt::format("dt must be positive, got {}", dt));
  if (!(f.size() == ctx.size())) throw ConfigError("grid size does not match generator");
  ScalarGrid out(f.size());
  cn_system_into(ctx.m(), f.n(), dt, side, f.values(), out.values());
  return out;
}

}  // namespace lqg
