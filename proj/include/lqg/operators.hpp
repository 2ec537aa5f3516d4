#pragma once

#include <span>

#include "lqg/grid.hpp"
#include "lqg/liouville.hpp"

namespace lqg {

/// Liouville generator Delta_M = m^-1 Delta on a fixed weight field.
class GeneratorContext {
 public:
  /// Throws NumericalError if any weight is non-finite or non-positive.
  explicit GeneratorContext(LiouvilleWeights weights);

  [[nodiscard]] TorusSize size() const { return weights_.grid.size(); }
  [[nodiscard]] const LiouvilleWeights& weights() const { return weights_; }
  [[nodiscard]] std::span<const double> m() const { return weights_.grid.values(); }

 private:
  LiouvilleWeights weights_;
};

/// Whether cn_system_apply builds the implicit (A = D - dt/2 Delta) or the
/// explicit (B = D + dt/2 Delta) side of the Crank-Nicolson system.
enum class CnSide : int { kImplicit = +1, kExplicit = -1 };

// Span kernels used by the solver loop. out must not alias f.
void laplacian_into(std::size_t n, std::span<const double> f, std::span<double> out);
void cn_system_into(std::span<const double> m, std::size_t n, double dt, CnSide side, std::span<const double> f,
                    std::span<double> out);

/// (Delta f)(x) = 1/4 sum_{y ~ x} (f(y) - f(x)), periodic.
[[nodiscard]] ScalarGrid apply_laplacian(const ScalarGrid& f);

/// m^-1 (Delta f).
[[nodiscard]] ScalarGrid apply_generator(const GeneratorContext& ctx, const ScalarGrid& f);

/// m f - sign (dt/2) Delta f. Rejects dt <= 0.
[[nodiscard]] ScalarGrid cn_system_apply(const GeneratorContext& ctx, double dt, CnSide side, const ScalarGrid& f);

}  // namespace lqg
