#include "lqg/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include <fmt/format.h>

namespace lqg {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* start_mode_name(StartMode mode) {
  switch (mode) {
    case StartMode::kHighestK:
      return "highest-k";
    case StartMode::kExplicit:
      return "explicit";
    case StartMode::kRandom:
      return "random";
  }
  return "highest-k";
}

StartMode parse_start_mode(const std::string& s) {
  if (s == "highest-k") return StartMode::kHighestK;
  if (s == "explicit") return StartMode::kExplicit;
  if (s == "random") return StartMode::kRandom;
  throw ConfigError("config.start_mode: expected one of highest-k, explicit, random; got '" + s + "'");
}

template <typename T>
void read_key(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("config.{}: {}", key, e.what()));
  }
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

void write_json(const fs::path& path, const json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw IoError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::string g17(double v) { return fmt::format("{:.17g}", v); }

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(fmt::format("cannot create {}: {}", dir.string(), ec.message()));
}

// Runs fn(0..count-1) on up to `workers` threads; rethrows the first failure
// (by index) after every task has finished.
void run_parallel(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(workers, count));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::size_t worker_count(const RunConfig& config) {
  if (config.workers > 0) return static_cast<std::size_t>(config.workers);
  return std::max(1u, std::thread::hardware_concurrency());
}

FieldSample obtain_field(const RunConfig& config) {
  const TorusSize n(config.n);
  if (config.field_path.empty()) return sample_gff(n, config.seed);
  ScalarGrid grid = read_grid(config.field_path);
  if (!(grid.size() == n)) {
    throw ConfigError(fmt::format("config.field_path: grid has n = {}, config has n = {}", grid.n(), config.n));
  }
  return {std::move(grid), config.seed, field_variance(n)};
}

void write_field_files(const fs::path& dir, const std::string& stem, const FieldSample& field) {
  write_grid(dir / (stem + ".grid"), field.grid);
  write_json(dir / (stem + ".json"), json{{"n", field.grid.n()}, {"seed", field.seed}, {"sigma2", field.sigma2}});
}

std::vector<std::pair<std::uint64_t, std::vector<double>>> read_csv_rows(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::pair<std::uint64_t, std::vector<double>>> rows;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    std::pair<std::uint64_t, std::vector<double>> row;
    try {
      row.first = std::stoull(cell);
      while (std::getline(ss, cell, ',')) row.second.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw IoError(fmt::format("{}: malformed row '{}'", path.string(), line));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_analysis(const fs::path& dir, const RunConfig& config, const Trajectory& traj,
                    const AnalysisResult& result, double cost_at_2, json& report) {
  {
    auto out = open_out(dir / "ondiag.csv");
    out << "t,p,tp\n";
    for (const auto& pt : result.ondiag.points) out << g17(pt.t) << ',' << g17(pt.p) << ',' << g17(pt.tp()) << '\n';
  }
  {
    auto out = open_out(dir / "profiles.csv");
    out << "t,r,ratio\n";
    for (const auto& e : result.profiles.entries) {
      for (std::size_t i = 0; i < e.radii.size(); ++i) {
        out << g17(e.t) << ',' << e.radii[i] << ',' << g17(e.ratios[i]) << '\n';
      }
    }
  }
  {
    auto out = open_out(dir / "collapse.csv");
    out << "alpha,cost\n";
    for (std::size_t i = 0; i < result.collapse.alpha_grid.size(); ++i) {
      out << g17(result.collapse.alpha_grid[i]) << ',' << g17(result.collapse.costs[i]) << '\n';
    }
  }
  json times = json::array();
  for (const auto& e : result.profiles.entries) times.push_back(e.t);
  report = json{
      {"start", {traj.start.a, traj.start.b}},
      {"d_s", result.d_s},
      {"alpha_hat", result.collapse.alpha_hat},
      {"cost_at_alpha_hat", result.collapse.cost_at_hat()},
      {"cost_at_2", cost_at_2},
      {"ds_window",
       {{"t_lo", result.window.lo},
        {"t_hi", result.window.hi},
        {"r_lo", config.ds_r_lo},
        {"r_hi", config.effective_ds_r_hi()}}},
      {"profile_times", times},
      {"s_max", result.collapse.s_max},
      {"bins", result.collapse.bins},
      {"config", to_json(config)},
  };
  write_json(dir / "report.json", report);
}

RunConfig with_trajectory_size(RunConfig config, const Trajectory& traj) {
  if (!traj.snapshots.empty()) config.n = static_cast<std::int64_t>(traj.snapshots.front().u.n());
  return config;
}

}  // namespace

// ---------------------------------------------------------------------------
// RunConfig

void RunConfig::validate() const {
  auto fail = [](const char* key, const std::string& why) {
    throw ConfigError(fmt::format("config.{}: {}", key, why));
  };
  if (n < 2) fail("n", "must be >= 2");
  if (!(gamma >= 0.0 && gamma < 2.0)) fail("gamma", "must lie in [0, 2)");
  if (!(dt > 0.0) || !std::isfinite(dt)) fail("dt", "must be positive");
  if (total_steps < 0) fail("total_steps", "must be >= 0");
  if (snapshot_stride < 1) fail("snapshot_stride", "must be >= 1");
  if (k < 1 || k > n * n) fail("k", "must lie in [1, n^2]");
  if (start_point[0] < 0 || start_point[0] >= n || start_point[1] < 0 || start_point[1] >= n) {
    fail("start_point", "must lie inside the torus");
  }
  if (min_separation < 0) fail("min_separation", "must be >= 0");
  if (!(cg_tol > 0.0 && cg_tol < 1.0)) fail("cg_tol", "must lie in (0, 1)");
  if (cg_max_iters < 0) fail("cg_max_iters", "must be >= 0");
  if (!(mass_tol > 0.0)) fail("mass_tol", "must be positive");
  if (!(alpha_lo > 0.0)) fail("alpha_lo", "must be positive");
  if (!(alpha_hi > alpha_lo)) fail("alpha_hi", "must exceed alpha_lo");
  if (!(alpha_step > 0.0)) fail("alpha_step", "must be positive");
  if (!(s_max > 0.0)) fail("s_max", "must be positive");
  if (bins < 4) fail("bins", "must be >= 4");
  if (!(ds_r_lo >= 0.0)) fail("ds_r_lo", "must be >= 0");
  if (ds_r_hi < 0.0 || (ds_r_hi > 0.0 && ds_r_hi <= ds_r_lo)) fail("ds_r_hi", "must be 0 (auto) or exceed ds_r_lo");
  if (r_max < 0 || 2 * r_max >= n) fail("r_max", "must be 0 (auto) or below n/2");
  if (cut_direction != "horizontal" && cut_direction != "vertical") {
    fail("cut_direction", "expected horizontal or vertical");
  }
  if (output_dir.empty()) fail("output_dir", "must not be empty");
  if (workers < 0) fail("workers", "must be >= 0");
}

std::size_t RunConfig::effective_r_max() const {
  if (r_max > 0) return static_cast<std::size_t>(r_max);
  return std::max<std::size_t>(1, static_cast<std::size_t>(n / 4));
}

CutDirection RunConfig::direction() const {
  return cut_direction == "vertical" ? CutDirection::kVertical : CutDirection::kHorizontal;
}

EvolveConfig RunConfig::evolve_config() const {
  EvolveConfig ec = EvolveConfig::with_stride(static_cast<std::size_t>(total_steps),
                                              static_cast<std::size_t>(snapshot_stride), dt);
  ec.cg_tol = cg_tol;
  ec.cg_max_iters = static_cast<std::size_t>(cg_max_iters);
  return ec;
}

json to_json(const RunConfig& c) {
  return json{
      {"n", c.n},
      {"gamma", c.gamma},
      {"seed", c.seed},
      {"dt", c.dt},
      {"total_steps", c.total_steps},
      {"snapshot_stride", c.snapshot_stride},
      {"start_mode", start_mode_name(c.start_mode)},
      {"k", c.k},
      {"start_point", c.start_point},
      {"min_separation", c.min_separation},
      {"cg_tol", c.cg_tol},
      {"cg_max_iters", c.cg_max_iters},
      {"mass_tol", c.mass_tol},
      {"alpha_lo", c.alpha_lo},
      {"alpha_hi", c.alpha_hi},
      {"alpha_step", c.alpha_step},
      {"s_max", c.s_max},
      {"bins", c.bins},
      {"ds_r_lo", c.ds_r_lo},
      {"ds_r_hi", c.ds_r_hi},
      {"r_max", c.r_max},
      {"cut_direction", c.cut_direction},
      {"field_path", c.field_path},
      {"output_dir", c.output_dir},
      {"workers", c.workers},
  };
}

RunConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  const json reference = to_json(RunConfig{});
  for (const auto& [key, value] : j.items()) {
    if (!reference.contains(key)) throw ConfigError("config." + key + ": unknown key");
  }
  RunConfig c;
  read_key(j, "n", c.n);
  read_key(j, "gamma", c.gamma);
  read_key(j, "seed", c.seed);
  read_key(j, "dt", c.dt);
  read_key(j, "total_steps", c.total_steps);
  read_key(j, "snapshot_stride", c.snapshot_stride);
  if (j.contains("start_mode")) {
    std::string mode;
    read_key(j, "start_mode", mode);
    c.start_mode = parse_start_mode(mode);
  }
  read_key(j, "k", c.k);
  read_key(j, "start_point", c.start_point);
  read_key(j, "min_separation", c.min_separation);
  read_key(j, "cg_tol", c.cg_tol);
  read_key(j, "cg_max_iters", c.cg_max_iters);
  read_key(j, "mass_tol", c.mass_tol);
  read_key(j, "alpha_lo", c.alpha_lo);
  read_key(j, "alpha_hi", c.alpha_hi);
  read_key(j, "alpha_step", c.alpha_step);
  read_key(j, "s_max", c.s_max);
  read_key(j, "bins", c.bins);
  read_key(j, "ds_r_lo", c.ds_r_lo);
  read_key(j, "ds_r_hi", c.ds_r_hi);
  read_key(j, "r_max", c.r_max);
  read_key(j, "cut_direction", c.cut_direction);
  read_key(j, "field_path", c.field_path);
  read_key(j, "output_dir", c.output_dir);
  read_key(j, "workers", c.workers);
  return c;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
  return config_from_json(j);
}

void save_config(const fs::path& path, const RunConfig& config) { write_json(path, to_json(config)); }

std::vector<std::uint64_t> parse_index_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  try {
    if (const auto dots = text.find(".."); dots != std::string::npos) {
      const auto lo = std::stoull(text.substr(0, dots));
      const auto hi = std::stoull(text.substr(dots + 2));
      if (hi <= lo) throw ConfigError("empty range '" + text + "'");
      for (auto v = lo; v < hi; ++v) out.push_back(v);
      return out;
    }
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(std::stoull(cell));
  } catch (const std::logic_error& e) {
    if (dynamic_cast<const ConfigError*>(&e)) throw;
    throw ConfigError("cannot parse index list '" + text + "'");
  }
  if (out.empty()) throw ConfigError("empty index list");
  return out;
}

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  try {
    while (std::getline(ss, cell, ',')) out.push_back(std::stod(cell));
  } catch (const std::logic_error&) {
    throw ConfigError("cannot parse number list '" + text + "'");
  }
  if (out.empty()) throw ConfigError("empty number list");
  return out;
}

// ---------------------------------------------------------------------------
// Commands

std::vector<StartSite> select_starts(const RunConfig& config, const FieldSample& field) {
  std::vector<StartSite> starts;
  const TorusSize n = field.grid.size();
  switch (config.start_mode) {
    case StartMode::kHighestK: {
      const auto pts = high_points(field, static_cast<std::size_t>(config.k),
                                   static_cast<std::size_t>(config.min_separation));
      for (std::size_t i = 0; i < pts.size(); ++i) starts.push_back({i + 1, pts[i]});
      break;
    }
    case StartMode::kExplicit:
      starts.push_back({1, LatticePoint::wrapped(config.start_point[0], config.start_point[1], n)});
      break;
    case StartMode::kRandom: {
      std::mt19937_64 engine(config.seed ^ 0x9E3779B97F4A7C15ULL);
      for (std::int64_t i = 0; i < config.k; ++i) {
        const std::size_t a = engine() % n.value();
        const std::size_t b = engine() % n.value();
        starts.push_back({static_cast<std::size_t>(i) + 1, {a, b}});
      }
      break;
    }
  }
  return starts;
}

void cmd_sample_field(const RunConfig& config, const std::vector<std::uint64_t>& seeds) {
  config.validate();
  const fs::path dir = config.output_dir;
  ensure_dir(dir);
  save_config(dir / "config.json", config);
  if (!seeds.empty()) {
    const TorusSize n(config.n);
    for (std::uint64_t s : seeds) write_field_files(dir, fmt::format("field_{}", s), sample_gff(n, s));
    return;
  }
  const FieldSample field = obtain_field(config);
  write_field_files(dir, "field", field);
  write_high_points_csv(dir / "highpoints.csv", field,
                        high_points(field, static_cast<std::size_t>(config.k),
                                    static_cast<std::size_t>(config.min_separation)));
}

void save_trajectory(const fs::path& dir, const Trajectory& traj, const json& meta) {
  ensure_dir(dir);
  json iters = json::array();
  for (const auto& s : traj.snapshots) {
    write_grid(dir / fmt::format("snap_{}.grid", s.iteration), s.u);
    iters.push_back(s.iteration);
  }
  {
    auto out = open_out(dir / "mass.csv");
    out << "iter,mass\n";
    for (const auto& m : traj.mass_series) out << m.iteration << ',' << g17(m.mass) << '\n';
  }
  {
    auto out = open_out(dir / "cg.csv");
    out << "iter,cg_iters,residual\n";
    for (const auto& c : traj.cg_records) out << c.iteration << ',' << c.cg_iters << ',' << g17(c.residual) << '\n';
  }
  json j = meta;
  j["start"] = {traj.start.a, traj.start.b};
  j["dt"] = traj.config.dt;
  j["cg_tol"] = traj.config.cg_tol;
  j["cg_max_iters"] = traj.config.cg_max_iters;
  j["total_steps"] = traj.config.total_steps;
  j["snapshot_schedule"] = traj.config.snapshot_schedule;
  j["snapshots"] = iters;
  j["relative_mass_drift"] = traj.relative_mass_drift();
  write_json(dir / "trajectory.json", j);
}

Trajectory load_trajectory(const fs::path& dir) {
  const json j = read_json(dir / "trajectory.json");
  Trajectory traj;
  try {
    const auto start = j.at("start").get<std::array<std::size_t, 2>>();
    traj.start = {start[0], start[1]};
    traj.config.dt = j.at("dt").get<double>();
    traj.config.cg_tol = j.at("cg_tol").get<double>();
    traj.config.cg_max_iters = j.at("cg_max_iters").get<std::size_t>();
    traj.config.total_steps = j.at("total_steps").get<std::size_t>();
    traj.config.snapshot_schedule = j.at("snapshot_schedule").get<std::vector<std::size_t>>();
    for (std::size_t iter : j.at("snapshots").get<std::vector<std::size_t>>()) {
      traj.snapshots.push_back({iter, read_grid(dir / fmt::format("snap_{}.grid", iter))});
    }
  } catch (const json::exception& e) {
    throw IoError(fmt::format("{}: {}", (dir / "trajectory.json").string(), e.what()));
  }
  for (const auto& s : traj.snapshots) {
    if (!(s.u.size() == traj.snapshots.front().u.size())) throw IoError(dir.string() + ": snapshot sizes differ");
  }
  for (const auto& [iter, cols] : read_csv_rows(dir / "mass.csv")) {
    if (cols.size() != 1) throw IoError((dir / "mass.csv").string() + ": expected 2 columns");
    traj.mass_series.push_back({iter, cols[0]});
  }
  for (const auto& [iter, cols] : read_csv_rows(dir / "cg.csv")) {
    if (cols.size() != 2) throw IoError((dir / "cg.csv").string() + ": expected 3 columns");
    traj.cg_records.push_back({iter, static_cast<std::size_t>(cols[0]), cols[1]});
  }
  return traj;
}

HeatRunSummary cmd_run_heat(const RunConfig& config) {
  config.validate();
  const fs::path dir = config.output_dir;
  ensure_dir(dir);
  save_config(dir / "config.json", config);

  const FieldSample field = obtain_field(config);
  write_field_files(dir, "field", field);
  const GeneratorContext ctx(liouville_weights(field, config.gamma));
  write_grid(dir / "weights.grid", ctx.weights().grid);

  const auto starts = select_starts(config, field);
  write_high_points_csv(dir / "highpoints.csv", field,
                        high_points(field, std::max<std::size_t>(starts.size(), 1),
                                    static_cast<std::size_t>(config.min_separation)));
  const EvolveConfig ec = config.evolve_config();

  HeatRunSummary summary;
  for (const auto& s : starts) summary.trajectory_dirs.push_back(dir / fmt::format("start_{}", s.rank));

  run_parallel(starts.size(), worker_count(config), [&](std::size_t i) {
    const auto& s = starts[i];
    Trajectory traj;
    try {
      traj = evolve(ctx, s.point, ec);
    } catch (const NumericalError& e) {
      throw NumericalError(fmt::format("start {} ({}, {}): {}", s.rank, s.point.a, s.point.b, e.what()));
    }
    const json meta{{"n", config.n}, {"gamma", config.gamma}, {"seed", config.seed}, {"rank", s.rank}};
    save_trajectory(summary.trajectory_dirs[i], traj, meta);
    if (traj.relative_mass_drift() > config.mass_tol) {
      throw NumericalError(fmt::format("start {}: relative mass drift {:.3e} exceeds mass_tol {:.3e}", s.rank,
                                       traj.relative_mass_drift(), config.mass_tol));
    }
  });
  return summary;
}

AnalysisResult analyze_trajectory(const RunConfig& config_in, const Trajectory& traj) {
  const RunConfig config = with_trajectory_size(config_in, traj);
  AnalysisResult result;
  result.ondiag = on_diagonal_series(traj);
  result.window = radius_window(traj, config.ds_r_lo, config.effective_ds_r_hi(), config.direction());
  result.d_s = spectral_dimension(result.ondiag, result.window);
  result.profiles = build_profiles(traj, result.window, config.effective_r_max(), config.direction());
  result.collapse = fit_alpha(result.profiles, config.alpha_lo, config.alpha_hi, config.alpha_step, config.s_max,
                              static_cast<std::size_t>(config.bins));
  return result;
}

std::vector<json> cmd_analyze(const RunConfig& config, const fs::path& dir) {
  config.validate();
  std::vector<fs::path> dirs;
  if (fs::exists(dir / "trajectory.json")) {
    dirs.push_back(dir);
  } else if (fs::is_directory(dir)) {
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_directory() && entry.path().filename().string().starts_with("start_") &&
          fs::exists(entry.path() / "trajectory.json")) {
        dirs.push_back(entry.path());
      }
    }
    std::ranges::sort(dirs, [](const fs::path& a, const fs::path& b) {
      const auto rank = [](const fs::path& p) { return std::stoull(p.filename().string().substr(6)); };
      return rank(a) < rank(b);
    });
  }
  if (dirs.empty()) throw IoError("no trajectory found under " + dir.string());

  std::vector<json> reports;
  for (const auto& d : dirs) {
    const Trajectory traj = load_trajectory(d);
    const RunConfig sized = with_trajectory_size(config, traj);
    const AnalysisResult result = analyze_trajectory(sized, traj);
    const double cost2 = collapse_cost(result.profiles, 2.0, sized.s_max, static_cast<std::size_t>(sized.bins));
    json report;
    write_analysis(d, sized, traj, result, cost2, report);
    reports.push_back(std::move(report));
  }
  return reports;
}

std::vector<SweepRow> cmd_sweep(const RunConfig& config, const SweepAxes& axes) {
  config.validate();
  for (double g : axes.gammas) {
    if (!(g >= 0.0 && g < 2.0)) throw ConfigError(fmt::format("sweep gamma {} outside [0, 2)", g));
  }
  for (auto r : axes.ranks) {
    if (r < 1) throw ConfigError("sweep ranks are 1-based");
  }
  const fs::path root = config.output_dir;
  ensure_dir(root);
  save_config(root / "config.json", config);

  std::vector<SweepRow> rows;
  for (auto seed : axes.seeds) {
    for (double gamma : axes.gammas) {
      for (auto rank : axes.ranks) rows.push_back({seed, gamma, rank, 0.0, 0.0, 0.0, 0.0, std::nullopt});
    }
  }

  run_parallel(rows.size(), worker_count(config), [&](std::size_t i) {
    SweepRow& row = rows[i];
    try {
      RunConfig c = config;
      c.seed = row.seed;
      c.gamma = row.gamma;
      c.start_mode = StartMode::kHighestK;
      c.k = static_cast<std::int64_t>(row.rank);
      const FieldSample field = obtain_field(c);
      const GeneratorContext ctx(liouville_weights(field, c.gamma));
      const auto pts =
          high_points(field, static_cast<std::size_t>(row.rank), static_cast<std::size_t>(c.min_separation));
      const Trajectory traj = evolve(ctx, pts.back(), c.evolve_config());
      const fs::path dir = root / fmt::format("seed_{}_gamma_{}", row.seed, row.gamma) /
                           fmt::format("start_{}", row.rank);
      save_trajectory(dir, traj, json{{"n", c.n}, {"gamma", c.gamma}, {"seed", c.seed}, {"rank", row.rank}});
      if (traj.relative_mass_drift() > c.mass_tol) {
        throw NumericalError(fmt::format("relative mass drift {:.3e} exceeds mass_tol {:.3e}",
                                         traj.relative_mass_drift(), c.mass_tol));
      }
      const AnalysisResult result = analyze_trajectory(c, traj);
      const double cost2 = collapse_cost(result.profiles, 2.0, c.s_max, static_cast<std::size_t>(c.bins));
      json report;
      write_analysis(dir, c, traj, result, cost2, report);
      row.d_s = result.d_s;
      row.alpha_hat = result.collapse.alpha_hat;
      row.cost_at_alpha_hat = result.collapse.cost_at_hat();
      row.cost_at_2 = cost2;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  });

  auto out = open_out(root / "sweep.csv");
  out << "seed,gamma,rank,d_s,alpha_hat,cost_at_alpha_hat,cost_at_2\n";
  auto err = open_out(root / "sweep_errors.csv");
  err << "seed,gamma,rank,error\n";
  for (const auto& r : rows) {
    if (r.error) {
      std::string msg = *r.error;
      std::ranges::replace(msg, '"', '\'');
      err << r.seed << ',' << g17(r.gamma) << ',' << r.rank << ",\"" << msg << "\"\n";
    } else {
      out << r.seed << ',' << g17(r.gamma) << ',' << r.rank << ',' << g17(r.d_s) << ',' << g17(r.alpha_hat) << ','
          << g17(r.cost_at_alpha_hat) << ',' << g17(r.cost_at_2) << '\n';
    }
  }
  if (!out || !err) throw IoError("failed writing sweep results under " + root.string());
  return rows;
}

}  // namespace lqg
