#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lqg/analysis.hpp"
#include "lqg/evolver.hpp"
#include "lqg/field_sampler.hpp"
#include "lqg/liouville.hpp"

namespace lqg {

enum class StartMode { kHighestK, kExplicit, kRandom };

/// Flat run configuration. Serializes to a JSON object with exactly one key
/// per field; unknown keys are rejected.
struct RunConfig {
  std::int64_t n = 256;
  double gamma = 0.8;
  std::uint64_t seed = 0;
  double dt = 1.0;
  std::int64_t total_steps = 20000;
  std::int64_t snapshot_stride = 1000;
  StartMode start_mode = StartMode::kHighestK;
  std::int64_t k = 1;
  std::array<std::int64_t, 2> start_point = {0, 0};
  std::int64_t min_separation = 0;
  double cg_tol = 1e-10;
  std::int64_t cg_max_iters = 0;  // 0: 10 n
  double mass_tol = 1e-4;         // hard failure threshold on relative mass drift
  double alpha_lo = 0.5;
  double alpha_hi = 3.0;
  double alpha_step = 0.05;
  double s_max = 7.0;  // ~ln 1000: at gamma = 0 keeps rho >~ 1e-3
  std::int64_t bins = 24;
  double ds_r_lo = 5.0;
  double ds_r_hi = 0.0;  // 0: n/4
  std::int64_t r_max = 0;  // 0: n/4
  std::string cut_direction = "horizontal";
  std::string field_path;  // empty: sample from (n, seed)
  std::string output_dir = "out";
  std::int64_t workers = 0;  // 0: hardware concurrency

  friend bool operator==(const RunConfig&, const RunConfig&) = default;

  /// Throws ConfigError naming the offending key.
  void validate() const;

  [[nodiscard]] double effective_ds_r_hi() const { return ds_r_hi > 0.0 ? ds_r_hi : static_cast<double>(n) / 4.0; }
  [[nodiscard]] std::size_t effective_r_max() const;
  [[nodiscard]] CutDirection direction() const;
  [[nodiscard]] EvolveConfig evolve_config() const;
};

[[nodiscard]] nlohmann::json to_json(const RunConfig& config);
/// Missing keys keep their defaults. Throws ConfigError on unknown keys or
/// type mismatches, naming the key.
[[nodiscard]] RunConfig config_from_json(const nlohmann::json& j);
[[nodiscard]] RunConfig load_config(const std::filesystem::path& path);
void save_config(const std::filesystem::path& path, const RunConfig& config);

/// "a..b" (half-open) or a comma list.
[[nodiscard]] std::vector<std::uint64_t> parse_index_list(const std::string& text);
[[nodiscard]] std::vector<double> parse_real_list(const std::string& text);

/// Start points selected by the config's start mode; ranks are 1-based.
struct StartSite {
  std::size_t rank = 1;
  LatticePoint point;
};
[[nodiscard]] std::vector<StartSite> select_starts(const RunConfig& config, const FieldSample& field);

/// Writes field.grid, field.json, highpoints.csv and config.json into the
/// output directory. With `seeds`, writes field_<seed>.grid and
/// field_<seed>.json for each seed instead.
void cmd_sample_field(const RunConfig& config, const std::vector<std::uint64_t>& seeds = {});

struct HeatRunSummary {
  std::vector<std::filesystem::path> trajectory_dirs;
};

/// Samples (or loads) the field, evolves from every selected start and
/// writes start_<rank>/ with snap_<iter>.grid, mass.csv, cg.csv and
/// trajectory.json. Throws NumericalError on CG failure or mass drift above
/// mass_tol, after persisting what was computed.
HeatRunSummary cmd_run_heat(const RunConfig& config);

/// Persisted trajectory: trajectory.json plus the snapshot grids.
void save_trajectory(const std::filesystem::path& dir, const Trajectory& traj, const nlohmann::json& meta);
[[nodiscard]] Trajectory load_trajectory(const std::filesystem::path& dir);

struct AnalysisResult {
  OnDiagSeries ondiag;
  TimeWindow window;
  double d_s = 0.0;
  ProfileSet profiles;
  CollapseReport collapse;
};

/// Runs the three analyses on one trajectory with the config's parameters.
[[nodiscard]] AnalysisResult analyze_trajectory(const RunConfig& config, const Trajectory& traj);

/// Writes ondiag.csv, profiles.csv, collapse.csv and report.json next to the
/// trajectory. `dir` may be a single trajectory or a run-heat output
/// directory holding start_<rank>/ subdirectories.
std::vector<nlohmann::json> cmd_analyze(const RunConfig& config, const std::filesystem::path& dir);

struct SweepAxes {
  std::vector<std::uint64_t> seeds;
  std::vector<double> gammas;
  std::vector<std::uint64_t> ranks;
};

struct SweepRow {
  std::uint64_t seed = 0;
  double gamma = 0.0;
  std::uint64_t rank = 1;
  double d_s = 0.0;
  double alpha_hat = 0.0;
  double cost_at_alpha_hat = 0.0;
  double cost_at_2 = 0.0;
  std::optional<std::string> error;
};

/// Expands the axes into independent runs (field, evolution, analysis),
/// executes up to `workers` of them concurrently, and writes sweep.csv
/// (successful rows) and sweep_errors.csv (failures). Rows come back in axis
/// order: seeds outermost, ranks innermost.
std::vector<SweepRow> cmd_sweep(const RunConfig& config, const SweepAxes& axes);

}  // namespace lqg
