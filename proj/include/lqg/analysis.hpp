#pragma once

#include <cstddef>
#include <vector>

#include "lqg/evolver.hpp"
#include "lqg/grid.hpp"

namespace lqg {

/// Degenerate analysis input (too few points, uninformative collapse).
class AnalysisError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

struct OnDiagPoint {
  double t = 0.0;
  double p = 0.0;
  [[nodiscard]] double tp() const { return t * p; }
};

/// p_t(x, x) := u^(x)(x, t) at every snapshot.
struct OnDiagSeries {
  std::vector<OnDiagPoint> points;
};

struct TimeWindow {
  double lo = 0.0;
  double hi = 0.0;
  [[nodiscard]] bool contains(double t) const { return t >= lo && t <= hi; }
};

enum class CutDirection { kHorizontal, kVertical };

/// Ratios rho(r) = u(y_r) / u(start) along a lattice axis through start.
struct Cut {
  std::vector<int> radii;
  std::vector<double> ratios;
};

struct ProfileEntry {
  double t = 0.0;
  std::vector<int> radii;
  std::vector<double> ratios;
};

struct ProfileSet {
  LatticePoint start;
  std::vector<ProfileEntry> entries;
};

struct CollapseReport {
  std::vector<double> alpha_grid;
  std::vector<double> costs;
  double alpha_hat = 0.0;
  double s_max = 0.0;
  std::size_t bins = 0;

  /// Cost at the grid point closest to alpha.
  [[nodiscard]] double cost_at(double alpha) const;
  [[nodiscard]] double cost_at_hat() const { return cost_at(alpha_hat); }
};

/// Requires at least two snapshots.
[[nodiscard]] OnDiagSeries on_diagonal_series(const Trajectory& traj);

/// -2 times the least-squares slope of log p against log t over the window.
/// Throws AnalysisError if fewer than five points fall inside.
[[nodiscard]] double spectral_dimension(const OnDiagSeries& series, TimeWindow window);

/// Requires r_max < n/2. Negative undershoots are clamped to zero first.
[[nodiscard]] Cut horizontal_cut(const ScalarGrid& snapshot, LatticePoint start, std::size_t r_max,
                                 CutDirection direction = CutDirection::kHorizontal);

/// Distance along the cut at which rho first falls to 1/e, linearly
/// interpolated between lattice sites; n/2 if it never does.
[[nodiscard]] double heat_ball_radius(const ScalarGrid& snapshot, LatticePoint start,
                                      CutDirection direction = CutDirection::kHorizontal);

/// Times of the snapshots whose heat-ball radius lies in [r_lo, r_hi]
/// (iteration 0 excluded). Throws AnalysisError if none does.
[[nodiscard]] TimeWindow radius_window(const Trajectory& traj, double r_lo, double r_hi,
                                       CutDirection direction = CutDirection::kHorizontal);

/// Cuts of every snapshot with t inside the window (t > 0).
[[nodiscard]] ProfileSet build_profiles(const Trajectory& traj, TimeWindow window, std::size_t r_max,
                                        CutDirection direction = CutDirection::kHorizontal);

/// Binned collapse quality of (log s, log rho), s = r^alpha / t. Points with
/// r >= 1, rho > 1e-8 and s <= s_max are binned in `bins` equal-width bins of
/// log s. In each bin holding at least three points from at least two times,
/// log rho is regressed on s; the cost is the mean residual variance over
/// those bins. Lower is a better collapse.
[[nodiscard]] double collapse_cost(const ProfileSet& profiles, double alpha, double s_max, std::size_t bins);

/// Grid search of collapse_cost over alpha in {lo, lo + step, ..., hi};
/// ties resolve to the smaller alpha.
[[nodiscard]] CollapseReport fit_alpha(const ProfileSet& profiles, double lo, double hi, double step, double s_max,
                                       std::size_t bins);

/// exp(-r^2 / (4 t)): the ratio p_t(x, y)/p_t(x, x) of the planar heat
/// kernel for d/dt = Laplacian.
[[nodiscard]] std::vector<double> euclidean_reference(double t, const std::vector<int>& radii);

/// The 1/4-weighted lattice Laplacian approximates a quarter of the
/// continuum Laplacian, so lattice time t corresponds to continuum time t/4.
[[nodiscard]] inline double continuum_time(double lattice_time) { return 0.25 * lattice_time; }

}  // namespace lqg
