#include "lqg/evolver.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace lqg {

namespace {

// Four independent partial sums: fixed summation order, no serial add chain.
double dot(std::span<const double> x, std::span<const double> y) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  const std::size_t len = x.size();
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    s0 += x[i] * y[i];
    s1 += x[i + 1] * y[i + 1];
    s2 += x[i + 2] * y[i + 2];
    s3 += x[i + 3] * y[i + 3];
  }
  for (; i < len; ++i) s0 += x[i] * y[i];
  return (s0 + s1) + (s2 + s3);
}

struct Sums4 {
  double s[4] = {0.0, 0.0, 0.0, 0.0};
  [[nodiscard]] double total() const { return (s[0] + s[1]) + (s[2] + s[3]); }
};

double weighted_mass(std::span<const double> u, std::span<const double> m) { return dot(u, m); }

}  // namespace

EvolveConfig EvolveConfig::with_stride(std::size_t total_steps, std::size_t stride, double dt) {
  if (stride == 0) throw ConfigError("snapshot stride must be positive");
  EvolveConfig c;
  c.dt = dt;
  c.total_steps = total_steps;
  for (std::size_t k = 0; k <= total_steps; k += stride) c.snapshot_schedule.push_back(k);
  return c;
}

void EvolveConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError(fmt::format("dt must be positive, got {}", dt));
  if (!(cg_tol > 0.0 && cg_tol < 1.0)) throw ConfigError(fmt::format("cg_tol must lie in (0, 1), got {}", cg_tol));
  for (std::size_t i = 1; i < snapshot_schedule.size(); ++i) {
    if (snapshot_schedule[i] <= snapshot_schedule[i - 1]) {
      throw ConfigError("snapshot schedule must be strictly increasing");
    }
  }
  if (!snapshot_schedule.empty() && snapshot_schedule.back() > total_steps) {
    throw ConfigError(fmt::format("snapshot at iteration {} exceeds total_steps {}", snapshot_schedule.back(),
                                  total_steps));
  }
}

double Trajectory::relative_mass_drift() const {
  if (mass_series.empty()) return 0.0;
  const double m0 = mass_series.front().mass;
  double worst = 0.0;
  for (const auto& s : mass_series) worst = std::max(worst, std::abs(s.mass - m0) / std::abs(m0));
  return worst;
}

CnStepper::CnStepper(const GeneratorContext& ctx, const EvolveConfig& config)
    : ctx_(ctx),
      dt_(config.dt),
      tol_(config.cg_tol),
      max_iters_(config.max_iters_for(ctx.size())),
      inv_diag_(ctx.size().sites()),
      rhs_(ctx.size().sites()),
      r_(ctx.size().sites()),
      p_(ctx.size().sites()),
      q_(ctx.size().sites()) {
  config.validate();
  const auto m = ctx.m();
  // diag(A) = m + dt/2, since Delta has -1 on its diagonal.
  for (std::size_t i = 0; i < m.size(); ++i) inv_diag_[i] = 1.0 / (m[i] + 0.5 * dt_);
}

std::pair<std::size_t, double> CnStepper::step(std::span<double> u) {
  const std::size_t n = ctx_.size().value();
  const auto m = ctx_.m();
  const std::size_t len = u.size();

  cn_system_into(m, n, dt_, CnSide::kExplicit, u, rhs_);
  const double bnorm = std::sqrt(dot(rhs_, rhs_));
  if (bnorm == 0.0) {
    std::ranges::fill(u, 0.0);
    return {0, 0.0};
  }

  // Warm start from the previous solution.
  cn_system_into(m, n, dt_, CnSide::kImplicit, u, q_);
  for (std::size_t i = 0; i < len; ++i) r_[i] = rhs_[i] - q_[i];
  double rel = std::sqrt(dot(r_, r_)) / bnorm;
  if (rel <= tol_) return {0, rel};

  for (std::size_t i = 0; i < len; ++i) p_[i] = inv_diag_[i] * r_[i];
  double rz = dot(r_, p_);

  for (std::size_t it = 1; it <= max_iters_; ++it) {
    cn_system_into(m, n, dt_, CnSide::kImplicit, p_, q_);
    const double alpha = rz / dot(p_, q_);
    Sums4 rr, rz_acc;
    std::size_t i = 0;
    for (; i + 4 <= len; i += 4) {
      for (std::size_t l = 0; l < 4; ++l) {
        u[i + l] += alpha * p_[i + l];
        const double ri = r_[i + l] - alpha * q_[i + l];
        r_[i + l] = ri;
        rr.s[l] += ri * ri;
        rz_acc.s[l] += ri * ri * inv_diag_[i + l];
      }
    }
    for (; i < len; ++i) {
      u[i] += alpha * p_[i];
      r_[i] -= alpha * q_[i];
      rr.s[0] += r_[i] * r_[i];
      rz_acc.s[0] += r_[i] * r_[i] * inv_diag_[i];
    }
    rel = std::sqrt(rr.total()) / bnorm;
    if (rel <= tol_) return {it, rel};

    const double rz_next = rz_acc.total();
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t j = 0; j < len; ++j) p_[j] = inv_diag_[j] * r_[j] + beta * p_[j];
  }
  throw NumericalError(
      fmt::format("CG did not converge in {} iterations (relative residual {:.3e}, tolerance {:.3e})", max_iters_,
                  rel, tol_));
}

CnStepResult cn_step(const GeneratorContext& ctx, const EvolveConfig& config, const ScalarGrid& u) {
  if (!u.all_finite()) throw NumericalError("cn_step input contains non-finite values");
  if (!(u.size() == ctx.size())) throw ConfigError("grid size does not match generator");
  CnStepper stepper(ctx, config);
  CnStepResult out{u, 0, 0.0};
  std::tie(out.cg_iters, out.residual) = stepper.step(out.u.values());
  return out;
}

ScalarGrid clamp_undershoot(const ScalarGrid& u) {
  ScalarGrid out = u;
  for (double& v : out.values()) v = std::max(v, 0.0);
  return out;
}

Trajectory evolve(const GeneratorContext& ctx, LatticePoint start, const EvolveConfig& config) {
  config.validate();
  const TorusSize n = ctx.size();
  if (start.a >= n.value() || start.b >= n.value()) {
    throw ConfigError(fmt::format("start point ({}, {}) outside the {}x{} torus", start.a, start.b, n.value(),
                                  n.value()));
  }
  Trajectory traj{start, config, {}, {}, {}};
  ScalarGrid u = ScalarGrid::indicator(n, start);
  CnStepper stepper(ctx, config);

  auto schedule = config.snapshot_schedule;
  if (schedule.empty() || schedule.front() != 0) schedule.insert(schedule.begin(), 0);
  auto next_snap = schedule.begin();

  auto record_snapshot = [&](std::size_t k) {
    const double top = u.max();
    const double low = u.min();
    if (low < -kPositivityTolerance * top) {
      throw NumericalError(fmt::format("positivity violated at iteration {}: min u = {:.3e}, max u = {:.3e}", k,
                                       low, top));
    }
    traj.snapshots.push_back({k, u});
    ++next_snap;
  };

  record_snapshot(0);
  traj.mass_series.push_back({0, weighted_mass(u.values(), ctx.m())});

  for (std::size_t k = 1; k <= config.total_steps; ++k) {
    try {
      const auto [iters, residual] = stepper.step(u.values());
      traj.cg_records.push_back({k, iters, residual});
    } catch (const NumericalError& e) {
      throw NumericalError(fmt::format("step {}: {}", k, e.what()));
    }
    bool stop = false;
    if (next_snap != schedule.end() && *next_snap == k) {
      record_snapshot(k);
      stop = config.stop_after && config.stop_after(traj.snapshots.back());
    }
    if (k % 100 == 0 || k == config.total_steps || stop) {
      traj.mass_series.push_back({k, weighted_mass(u.values(), ctx.m())});
    }
    if (stop) break;
  }
  return traj;
}

DenseHeatOracle::DenseHeatOracle(const GeneratorContext& ctx) : n_(ctx.size()) {
  if (n_.value() > 16) throw ConfigError("dense heat oracle supports n <= 16");
  const auto sites = static_cast<Eigen::Index>(n_.sites());
  const auto m = ctx.m();
  sqrt_m_.resize(sites);
  for (Eigen::Index i = 0; i < sites; ++i) sqrt_m_[i] = std::sqrt(m[static_cast<std::size_t>(i)]);

  // Assemble Delta column by column from the stencil.
  Eigen::MatrixXd lap(sites, sites);
  ScalarGrid basis(n_);
  ScalarGrid column(n_);
  for (Eigen::Index j = 0; j < sites; ++j) {
    basis.values()[static_cast<std::size_t>(j)] = 1.0;
    laplacian_into(n_.value(), basis.values(), column.values());
    basis.values()[static_cast<std::size_t>(j)] = 0.0;
    for (Eigen::Index i = 0; i < sites; ++i) lap(i, j) = column.values()[static_cast<std::size_t>(i)];
  }
  const Eigen::VectorXd inv_sqrt = sqrt_m_.cwiseInverse();
  const Eigen::MatrixXd sym = inv_sqrt.asDiagonal() * lap * inv_sqrt.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (sym + sym.transpose()));
  if (solver.info() != Eigen::Success) throw NumericalError("dense eigendecomposition failed");
  eigenvalues_ = solver.eigenvalues();
  eigenvectors_ = solver.eigenvectors();
}

ScalarGrid DenseHeatOracle::evolve(LatticePoint start, double t) const {
  const auto x = static_cast<Eigen::Index>(start.a * n_.value() + start.b);
  // u = D^-1/2 V exp(t L) V^T D^1/2 e_x
  const Eigen::VectorXd coeff =
      (eigenvectors_.row(x).transpose() * sqrt_m_[x]).cwiseProduct((t * eigenvalues_).array().exp().matrix());
  const Eigen::VectorXd w = eigenvectors_ * coeff;
  ScalarGrid u(n_);
  for (Eigen::Index i = 0; i < w.size(); ++i) u.values()[static_cast<std::size_t>(i)] = w[i] / sqrt_m_[i];
  return u;
}

ScalarGrid dense_heat_oracle(const GeneratorContext& ctx, LatticePoint start, double t) {
  return DenseHeatOracle(ctx).evolve(start, t);
}

}  // namespace lqg
