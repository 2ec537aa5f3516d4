#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "lqg/grid.hpp"
#include "lqg/operators.hpp"

namespace lqg {

struct Snapshot;

struct EvolveConfig {
  double dt = 1.0;
  double cg_tol = 1e-10;            // relative residual ||b - A u'|| / ||b||
  std::size_t cg_max_iters = 0;     // 0 selects 10 n
  std::size_t total_steps = 0;
  std::vector<std::size_t> snapshot_schedule;  // strictly increasing, max <= total_steps
  // Optional early exit: evolution ends after the first snapshot past
  // iteration 0 for which this returns true.
  std::function<bool(const Snapshot&)> stop_after;

  /// Snapshots at 0, stride, 2 stride, ... up to total_steps.
  static EvolveConfig with_stride(std::size_t total_steps, std::size_t stride, double dt = 1.0);

  [[nodiscard]] std::size_t max_iters_for(TorusSize n) const { return cg_max_iters ? cg_max_iters : 10 * n.value(); }

  /// Throws ConfigError on any violated invariant.
  void validate() const;
};

struct Snapshot {
  std::size_t iteration = 0;
  ScalarGrid u;
};

struct MassSample {
  std::size_t iteration = 0;
  double mass = 0.0;  // sum_x u(x) m(x)
};

struct CgRecord {
  std::size_t iteration = 0;  // index of the step's result
  std::size_t cg_iters = 0;
  double residual = 0.0;
};

/// An evolved heat solution started from the indicator of `start`.
struct Trajectory {
  LatticePoint start;
  EvolveConfig config;
  std::vector<Snapshot> snapshots;
  std::vector<MassSample> mass_series;
  std::vector<CgRecord> cg_records;

  [[nodiscard]] double time_of(std::size_t iteration) const { return static_cast<double>(iteration) * config.dt; }
  /// max |mass_k - mass_0| / |mass_0| over the recorded series.
  [[nodiscard]] double relative_mass_drift() const;
};

struct CnStepResult {
  ScalarGrid u;
  std::size_t cg_iters = 0;
  double residual = 0.0;
};

/// Reusable Jacobi-preconditioned CG workspace for (D - dt/2 Delta) u' = (D + dt/2 Delta) u.
class CnStepper {
 public:
  CnStepper(const GeneratorContext& ctx, const EvolveConfig& config);

  /// Advances u in place. Returns (cg iterations, achieved relative residual).
  /// Throws NumericalError if the iteration cap is hit first.
  std::pair<std::size_t, double> step(std::span<double> u);

 private:
  const GeneratorContext& ctx_;
  double dt_;
  double tol_;
  std::size_t max_iters_;
  std::vector<double> inv_diag_, rhs_, r_, p_, q_;
};

[[nodiscard]] CnStepResult cn_step(const GeneratorContext& ctx, const EvolveConfig& config, const ScalarGrid& u);

/// Iterates cn_step from the indicator of `start`, recording scheduled
/// snapshots, the conserved mass every 100 steps, and CG diagnostics.
/// Fails with NumericalError on CG non-convergence or a positivity violation
/// (min u < -1e-9 max u) at a recorded snapshot.
[[nodiscard]] Trajectory evolve(const GeneratorContext& ctx, LatticePoint start, const EvolveConfig& config);

/// Values below -tol * max(u) count as positivity violations; above that,
/// negatives are numerical undershoot.
inline constexpr double kPositivityTolerance = 1e-9;

/// Copy of u with undershoots (values < 0) set to zero, for analysis output.
[[nodiscard]] ScalarGrid clamp_undershoot(const ScalarGrid& u);

/// Exact exp(t Delta_M) via the dense eigendecomposition of the symmetrized
/// generator D^-1/2 Delta D^-1/2. Restricted to n <= 16.
class DenseHeatOracle {
 public:
  explicit DenseHeatOracle(const GeneratorContext& ctx);
  [[nodiscard]] ScalarGrid evolve(LatticePoint start, double t) const;
  [[nodiscard]] const Eigen::VectorXd& symmetric_spectrum() const { return eigenvalues_; }

 private:
  TorusSize n_;
  Eigen::VectorXd sqrt_m_;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd eigenvectors_;
};

[[nodiscard]] ScalarGrid dense_heat_oracle(const GeneratorContext& ctx, LatticePoint start, double t);

}  // namespace lqg
