#include "lqg/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <fmt/format.h>

namespace lqg {

namespace {

constexpr double kMinRatio = 1e-8;

double value_along(const ScalarGrid& g, LatticePoint start, std::int64_t r, CutDirection dir) {
  const auto a = static_cast<std::int64_t>(start.a);
  const auto b = static_cast<std::int64_t>(start.b);
  const double v = dir == CutDirection::kHorizontal ? g.wrapped(a, b + r) : g.wrapped(a + r, b);
  return std::max(v, 0.0);
}

struct BinnedPoint {
  double s;
  double log_ratio;
  std::size_t time_index;
};

// Residual variance of y about its least-squares line in x.
double residual_variance(const std::vector<BinnedPoint>& pts) {
  const auto count = static_cast<double>(pts.size());
  double mx = 0.0, my = 0.0;
  for (const auto& p : pts) {
    mx += p.s;
    my += p.log_ratio;
  }
  mx /= count;
  my /= count;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& p : pts) {
    sxx += (p.s - mx) * (p.s - mx);
    sxy += (p.s - mx) * (p.log_ratio - my);
  }
  const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
  double rss = 0.0;
  for (const auto& p : pts) {
    const double e = p.log_ratio - my - slope * (p.s - mx);
    rss += e * e;
  }
  return rss / count;
}

}  // namespace

double CollapseReport::cost_at(double alpha) const {
  if (alpha_grid.empty()) throw AnalysisError("empty collapse report");
  std::size_t best = 0;
  for (std::size_t i = 1; i < alpha_grid.size(); ++i) {
    if (std::abs(alpha_grid[i] - alpha) < std::abs(alpha_grid[best] - alpha)) best = i;
  }
  return costs[best];
}

OnDiagSeries on_diagonal_series(const Trajectory& traj) {
  if (traj.snapshots.size() < 2) {
    throw AnalysisError(fmt::format("on-diagonal series needs at least 2 snapshots, trajectory has {}",
                                    traj.snapshots.size()));
  }
  OnDiagSeries series;
  for (const auto& s : traj.snapshots) series.points.push_back({traj.time_of(s.iteration), s.u[traj.start]});
  return series;
}

double spectral_dimension(const OnDiagSeries& series, TimeWindow window) {
  std::vector<std::pair<double, double>> xy;
  for (const auto& pt : series.points) {
    if (pt.t > 0.0 && pt.p > 0.0 && window.contains(pt.t)) xy.emplace_back(std::log(pt.t), std::log(pt.p));
  }
  if (xy.size() < 5) {
    throw AnalysisError(fmt::format(
        "spectral dimension window [{}, {}] holds {} usable points, need 5; use a finer snapshot stride or a "
        "wider window",
        window.lo, window.hi, xy.size()));
  }
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : xy) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(xy.size());
  my /= static_cast<double>(xy.size());
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : xy) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  return -2.0 * sxy / sxx;
}

Cut horizontal_cut(const ScalarGrid& snapshot, LatticePoint start, std::size_t r_max, CutDirection direction) {
  if (2 * r_max >= snapshot.n()) {
    throw ConfigError(fmt::format("cut radius {} must be below n/2 = {}", r_max, snapshot.n() / 2.0));
  }
  const double center = value_along(snapshot, start, 0, direction);
  if (!(center > 0.0)) throw AnalysisError("heat kernel vanishes at the start point");
  Cut cut;
  for (std::size_t r = 0; r <= r_max; ++r) {
    cut.radii.push_back(static_cast<int>(r));
    cut.ratios.push_back(r == 0 ? 1.0 : value_along(snapshot, start, static_cast<std::int64_t>(r), direction) / center);
  }
  return cut;
}

double heat_ball_radius(const ScalarGrid& snapshot, LatticePoint start, CutDirection direction) {
  const double center = value_along(snapshot, start, 0, direction);
  const double half = static_cast<double>(snapshot.n()) / 2.0;
  if (!(center > 0.0)) return half;
  const double level = std::exp(-1.0);
  double prev = 1.0;
  for (std::size_t r = 1; 2 * r <= snapshot.n(); ++r) {
    const double rho = value_along(snapshot, start, static_cast<std::int64_t>(r), direction) / center;
    if (rho <= level) {
      const double frac = prev == rho ? 0.0 : (prev - level) / (prev - rho);
      return static_cast<double>(r - 1) + frac;
    }
    prev = rho;
  }
  return half;
}

TimeWindow radius_window(const Trajectory& traj, double r_lo, double r_hi, CutDirection direction) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& s : traj.snapshots) {
    if (s.iteration == 0) continue;
    const double r = heat_ball_radius(s.u, traj.start, direction);
    if (r >= r_lo && r <= r_hi) {
      const double t = traj.time_of(s.iteration);
      lo = std::min(lo, t);
      hi = std::max(hi, t);
    }
  }
  if (!(lo <= hi)) {
    throw AnalysisError(fmt::format(
        "no snapshot has a heat-ball radius in [{}, {}]; evolve longer or adjust the window", r_lo, r_hi));
  }
  return {lo, hi};
}

ProfileSet build_profiles(const Trajectory& traj, TimeWindow window, std::size_t r_max, CutDirection direction) {
  ProfileSet set{traj.start, {}};
  for (const auto& s : traj.snapshots) {
    const double t = traj.time_of(s.iteration);
    if (t <= 0.0 || !window.contains(t)) continue;
    Cut cut = horizontal_cut(s.u, traj.start, r_max, direction);
    set.entries.push_back({t, std::move(cut.radii), std::move(cut.ratios)});
  }
  return set;
}

double collapse_cost(const ProfileSet& profiles, double alpha, double s_max, std::size_t bins) {
  if (!(alpha > 0.0)) throw ConfigError(fmt::format("alpha must be positive, got {}", alpha));
  if (bins < 4) throw ConfigError(fmt::format("need at least 4 bins, got {}", bins));
  std::set<double> times;
  for (const auto& e : profiles.entries) times.insert(e.t);
  if (times.size() < 2) {
    throw AnalysisError(fmt::format("collapse needs profiles at >= 2 distinct times, got {}", times.size()));
  }

  std::vector<BinnedPoint> pts;
  for (std::size_t ti = 0; ti < profiles.entries.size(); ++ti) {
    const auto& e = profiles.entries[ti];
    for (std::size_t i = 0; i < e.radii.size(); ++i) {
      if (e.radii[i] < 1 || !(e.ratios[i] > kMinRatio)) continue;
      const double s = std::pow(static_cast<double>(e.radii[i]), alpha) / e.t;
      if (s > s_max) continue;
      pts.push_back({s, std::log(e.ratios[i]), ti});
    }
  }
  if (pts.empty()) throw AnalysisError(fmt::format("no profile point has s <= s_max = {} at alpha = {}", s_max, alpha));

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& p : pts) {
    lo = std::min(lo, std::log(p.s));
    hi = std::max(hi, std::log(p.s));
  }
  const double width = (hi - lo) / static_cast<double>(bins);
  std::vector<std::vector<BinnedPoint>> binned(bins);
  for (const auto& p : pts) {
    std::size_t k = width > 0.0 ? static_cast<std::size_t>((std::log(p.s) - lo) / width) : 0;
    binned[std::min(k, bins - 1)].push_back(p);
  }

  double total = 0.0;
  std::size_t used = 0;
  for (const auto& bin : binned) {
    if (bin.size() < 3) continue;
    std::set<std::size_t> distinct;
    for (const auto& p : bin) distinct.insert(p.time_index);
    if (distinct.size() < 2) continue;
    total += residual_variance(bin);
    ++used;
  }
  if (used == 0) {
    throw AnalysisError(fmt::format(
        "no bin holds points from two or more times at alpha = {}; raise s_max, r_max or the snapshot count",
        alpha));
  }
  return total / static_cast<double>(used);
}

CollapseReport fit_alpha(const ProfileSet& profiles, double lo, double hi, double step, double s_max,
                         std::size_t bins) {
  if (!(lo > 0.0) || !(hi > lo) || !(step > 0.0)) {
    throw ConfigError(fmt::format("invalid alpha range [{}, {}] with step {}", lo, hi, step));
  }
  CollapseReport report;
  report.s_max = s_max;
  report.bins = bins;
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::size_t best = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const double alpha = lo + static_cast<double>(i) * step;
    const double cost = collapse_cost(profiles, alpha, s_max, bins);
    if (!std::isfinite(cost)) throw AnalysisError(fmt::format("non-finite collapse cost at alpha = {}", alpha));
    report.alpha_grid.push_back(alpha);
    report.costs.push_back(cost);
    if (cost < report.costs[best]) best = i;
  }
  report.alpha_hat = report.alpha_grid[best];
  return report;
}

std::vector<double> euclidean_reference(double t, const std::vector<int>& radii) {
  if (!(t > 0.0)) throw ConfigError(fmt::format("time must be positive, got {}", t));
  std::vector<double> out;
  out.reserve(radii.size());
  for (int r : radii) out.push_back(std::exp(-static_cast<double>(r) * r / (4.0 * t)));
  return out;
}

}  // namespace lqg
