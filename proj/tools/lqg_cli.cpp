// lqg: sample free fields, evolve the Liouville heat equation, analyze.
//
//   lqg sample-field --config run.json [--seeds 0..20000]
//   lqg run-heat     --config run.json --gamma 1.2 --n 128
//   lqg analyze      --config run.json --trajectory out/
//   lqg sweep        --config run.json --seeds 0..6 --gammas 0.8 --ranks 1
//
// Exit codes: 0 success, 2 config error, 3 numerical failure, 4 I/O error.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "lqg/pipeline.hpp"

namespace {

enum ExitCode { kOk = 0, kConfig = 2, kNumerical = 3, kIo = 4 };

// Registers one override flag per config key. Applied after --config is read.
struct Overrides {
  std::optional<std::int64_t> n, total_steps, snapshot_stride, k, min_separation, cg_max_iters, bins, r_max, workers;
  std::optional<std::uint64_t> seed;
  std::optional<double> gamma, dt, cg_tol, mass_tol, alpha_lo, alpha_hi, alpha_step, s_max, ds_r_lo, ds_r_hi;
  std::optional<std::string> start_mode, cut_direction, field_path, output_dir;
  std::vector<std::int64_t> start_point;

  void attach(CLI::App* app) {
    app->add_option("--n", n, "torus side");
    app->add_option("--gamma", gamma, "coupling in [0, 2)");
    app->add_option("--seed", seed, "field RNG seed");
    app->add_option("--dt", dt, "time step");
    app->add_option("--total-steps", total_steps, "Crank-Nicolson iterations");
    app->add_option("--snapshot-stride", snapshot_stride, "iterations between snapshots");
    app->add_option("--start-mode", start_mode, "highest-k | explicit | random");
    app->add_option("--k", k, "number of start points");
    app->add_option("--start-point", start_point, "explicit start: a b")->expected(2);
    app->add_option("--min-separation", min_separation, "minimum L-inf spacing of high points");
    app->add_option("--cg-tol", cg_tol, "CG relative residual tolerance");
    app->add_option("--cg-max-iters", cg_max_iters, "CG iteration cap (0: 10 n)");
    app->add_option("--mass-tol", mass_tol, "relative mass drift treated as failure");
    app->add_option("--alpha-lo", alpha_lo);
    app->add_option("--alpha-hi", alpha_hi);
    app->add_option("--alpha-step", alpha_step);
    app->add_option("--s-max", s_max, "collapse cutoff on r^alpha / t");
    app->add_option("--bins", bins, "collapse bins");
    app->add_option("--ds-r-lo", ds_r_lo, "heat-ball radius lower bound of the fit window");
    app->add_option("--ds-r-hi", ds_r_hi, "heat-ball radius upper bound (0: n/4)");
    app->add_option("--r-max", r_max, "cut length (0: n/4)");
    app->add_option("--cut-direction", cut_direction, "horizontal | vertical");
    app->add_option("--field-path", field_path, "LQGGRID1 field to load instead of sampling");
    app->add_option("--output-dir", output_dir);
    app->add_option("--workers", workers, "concurrent runs (0: all cores)");
  }

  void apply(lqg::RunConfig& c) const {
    auto set = [](auto& dst, const auto& src) {
      if (src) dst = *src;
    };
    set(c.n, n);
    set(c.gamma, gamma);
    set(c.seed, seed);
    set(c.dt, dt);
    set(c.total_steps, total_steps);
    set(c.snapshot_stride, snapshot_stride);
    set(c.k, k);
    set(c.min_separation, min_separation);
    set(c.cg_tol, cg_tol);
    set(c.cg_max_iters, cg_max_iters);
    set(c.mass_tol, mass_tol);
    set(c.alpha_lo, alpha_lo);
    set(c.alpha_hi, alpha_hi);
    set(c.alpha_step, alpha_step);
    set(c.s_max, s_max);
    set(c.bins, bins);
    set(c.ds_r_lo, ds_r_lo);
    set(c.ds_r_hi, ds_r_hi);
    set(c.r_max, r_max);
    set(c.cut_direction, cut_direction);
    set(c.field_path, field_path);
    set(c.output_dir, output_dir);
    set(c.workers, workers);
    if (start_mode) {
      nlohmann::json j = lqg::to_json(c);
      j["start_mode"] = *start_mode;
      c.start_mode = lqg::config_from_json(j).start_mode;
    }
    if (!start_point.empty()) c.start_point = {start_point[0], start_point[1]};
  }
};

struct Command {
  CLI::App* app = nullptr;
  std::string config_path;
  Overrides overrides;

  lqg::RunConfig resolve() const {
    lqg::RunConfig c = config_path.empty() ? lqg::RunConfig{} : lqg::load_config(config_path);
    overrides.apply(c);
    c.validate();
    return c;
  }
};

Command& add_command(CLI::App& root, const std::string& name, const std::string& about, Command& cmd) {
  cmd.app = root.add_subcommand(name, about);
  cmd.app->add_option("--config", cmd.config_path, "JSON run configuration");
  cmd.overrides.attach(cmd.app);
  return cmd;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Liouville heat-kernel laboratory"};
  app.require_subcommand(1);

  Command sample, run, analyze, sweep;
  std::string seeds_spec;
  add_command(app, "sample-field", "sample a free field and its high points", sample)
      .app->add_option("--seeds", seeds_spec, "batch of seeds, 'a..b' or a comma list");

  add_command(app, "run-heat", "evolve the heat equation from the selected start points", run);

  std::string trajectory_dir;
  add_command(app, "analyze", "on-diagonal, cut and collapse analyses of a run", analyze)
      .app->add_option("--trajectory", trajectory_dir, "run-heat output or a start_<rank> directory")
      ->required();

  std::string sweep_seeds, sweep_gammas, sweep_ranks;
  add_command(app, "sweep", "ensemble over seeds, gammas and start ranks", sweep);
  sweep.app->add_option("--seeds", sweep_seeds, "'a..b' or comma list")->required();
  sweep.app->add_option("--gammas", sweep_gammas, "comma list")->required();
  sweep.app->add_option("--ranks", sweep_ranks, "'a..b' or comma list")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (sample.app->parsed()) {
      const auto config = sample.resolve();
      lqg::cmd_sample_field(config, seeds_spec.empty() ? std::vector<std::uint64_t>{}
                                                       : lqg::parse_index_list(seeds_spec));
    } else if (run.app->parsed()) {
      const auto summary = lqg::cmd_run_heat(run.resolve());
      for (const auto& d : summary.trajectory_dirs) std::cout << d.string() << '\n';
    } else if (analyze.app->parsed()) {
      for (const auto& report : lqg::cmd_analyze(analyze.resolve(), trajectory_dir)) {
        std::cout << fmt::format("start ({}, {}): d_s = {:.4f}, alpha_hat = {:.2f}\n", report["start"][0].get<int>(),
                                 report["start"][1].get<int>(), report["d_s"].get<double>(),
                                 report["alpha_hat"].get<double>());
      }
    } else if (sweep.app->parsed()) {
      const lqg::SweepAxes axes{lqg::parse_index_list(sweep_seeds), lqg::parse_real_list(sweep_gammas),
                                lqg::parse_index_list(sweep_ranks)};
      const auto rows = lqg::cmd_sweep(sweep.resolve(), axes);
      std::size_t failed = 0;
      for (const auto& r : rows) {
        if (r.error) {
          ++failed;
          std::cerr << fmt::format("seed {} gamma {} rank {}: {}\n", r.seed, r.gamma, r.rank, *r.error);
        }
      }
      if (failed) return kNumerical;
    }
  } catch (const lqg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const lqg::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const lqg::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  }
  return kOk;
}
