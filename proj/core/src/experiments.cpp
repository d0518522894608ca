/*
 * Copyright 2026 The assim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#include "assim/experiments.hpp"

#include "assim/path_io.hpp"

#include <chrono>
#include <cmath>
#include <fstream>

namespace assim {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

json to_json(const Eigen::VectorXd &v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out.push_back(v(i));
  }
  return out;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void ensure_dir(const std::filesystem::path &dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw InvalidParameter("cannot create " + dir.string() + ": " + ec.message());
  }
}

json base_manifest(const ExperimentConfig &config, const char *command) {
  return {{"artifact_version", artifact_version()},
          {"command", command},
          {"config_hash", config_hash(config)},
          {"grid", {{"T", config.horizon}, {"n_steps", config.n_steps}}},
          {"seeds", {{"observation", config.seed}}}};
}

} // namespace

std::string artifact_version() { return ASSIM_VERSION_STRING; }

Eigen::VectorXd truth_initial_state(const ExperimentConfig &config) {
  const double dt = config.horizon / config.n_steps;
  const auto steps = static_cast<int>(std::llround(config.spinup_time / dt));
  if (steps < 1) {
    return config.truth_initial;
  }
  const ModelSpec model = build_model(config);
  const TimeGrid spin(steps * dt, steps);
  const SampledPath x =
      integrate_state(model, ControlPath::zeros(spin, model.control_dim), config.truth_initial);
  return x.at(x.size() - 1);
}

Eigen::VectorXd assimilation_initial_state(const ExperimentConfig &config) {
  if (!config.assim_is_offset) {
    return config.assim_initial;
  }
  return truth_initial_state(config) + config.assim_initial;
}

SampledPath integrated_observation(const ObservationOperator &h, const SampledPath &x) {
  const TimeGrid &grid = x.grid();
  const double dt = grid.dt();
  Eigen::MatrixXd z(h.obs_dim, static_cast<Eigen::Index>(grid.nodes()));
  z.col(0).setZero();
  Eigen::VectorXd prev = h.value(0.0, x.at(0));
  for (std::size_t i = 0; i + 1 < grid.nodes(); ++i) {
    Eigen::VectorXd next = h.value(grid.time(i + 1), x.at(i + 1));
    z.col(static_cast<Eigen::Index>(i + 1)) =
        z.col(static_cast<Eigen::Index>(i)) + 0.5 * dt * (prev + next);
    prev = std::move(next);
  }
  return {grid, std::move(z)};
}

SimulationOutput simulate(const ExperimentConfig &config) {
  const ModelSpec model = build_model(config);
  const TimeGrid grid = config.grid();
  SampledPath truth = integrate_state(model, ControlPath::zeros(grid, model.control_dim),
                                      truth_initial_state(config));
  ObservationPath eta = build_observation(
      integrated_observation(build_observation_operator(config), truth), config.noise_scale,
      config.seed);
  return {std::move(truth), std::move(eta)};
}

json simulate_to_dir(const ExperimentConfig &config, const std::filesystem::path &outdir,
                     const RunOptions &options) {
  const auto start = Clock::now();
  const SimulationOutput sim = simulate(config);
  const double t_sim = seconds_since(start);

  ensure_dir(outdir);
  write_path_csv(outdir / "truth.csv", sim.truth);
  write_path_csv(outdir / "eta.csv", sim.eta.path);
  json manifest = base_manifest(config, "simulate");
  manifest["noise_scale"] = config.noise_scale;
  manifest["truth_initial_state"] = to_json(sim.truth.at(0));
  manifest["files"] = {"truth.csv", "eta.csv"};
  if (options.record_timings) {
    manifest["timings"] = {{"simulate", t_sim}, {"total", seconds_since(start)}};
    manifest["wall_clock_unix"] =
        std::chrono::duration<double>(std::chrono::system_clock::now().time_since_epoch())
            .count();
  }
  write_json(outdir / "manifest.json", manifest);
  return manifest;
}

double rmse(const SampledPath &a, const SampledPath &b) {
  if (a.grid() != b.grid() || a.dim() != b.dim()) {
    throw GridMismatch("rmse: paths disagree on grid or dimension");
  }
  return std::sqrt((a.values() - b.values()).squaredNorm() /
                   static_cast<double>(a.values().size()));
}

AssimilationReport assimilate_to_dir(const ExperimentConfig &config,
                                     const std::filesystem::path &eta_file,
                                     const std::optional<std::filesystem::path> &truth_file,
                                     const std::filesystem::path &outdir,
                                     const RunOptions &options) {
  const auto start = Clock::now();
  const ModelSpec model = build_model(config);
  const CostSpec cost = build_cost(config, model);
  const TimeGrid grid = config.grid();
  const SampledPath eta_path = read_path_csv(eta_file);
  if (eta_path.grid().steps() != grid.steps() ||
      std::abs(eta_path.grid().horizon() - grid.horizon()) > 1e-9 * grid.horizon()) {
    throw ConfigError("eta file grid does not match the config grid");
  }
  if (eta_path.dim() != cost.obs_dim) {
    throw ConfigError("eta file dimension does not match the observation operator");
  }
  const ObservationPath eta{SampledPath(grid, eta_path.values()), config.seed,
                            config.noise_scale};
  std::optional<SampledPath> truth;
  if (truth_file) {
    SampledPath t = read_path_csv(*truth_file);
    if (t.grid().steps() != grid.steps() || t.dim() != model.state_dim) {
      throw ConfigError("truth file does not match the config grid or state");
    }
    truth = SampledPath(grid, t.values());
  }

  const Eigen::VectorXd xi = assimilation_initial_state(config);
  OptimizerConfig opt = config.optimizer;
  opt.seed = config.seed;
  opt.jobs = options.jobs;
  AssimilationResult result = minimize_multistart(
      model, cost, eta, xi, ControlPath::zeros(grid, model.control_dim), config.control_set, opt);
  const double t_opt = seconds_since(start);

  json j;
  j["schema_version"] = kResultSchemaVersion;
  j["artifact_version"] = artifact_version();
  j["config_hash"] = config_hash(config);
  j["status"] = to_string(result.status);
  j["cost_kind"] = config.cost_kind;
  j["cost"] = result.cost;
  j["iterations"] = result.iterations;
  j["mp_residual"] = result.mp_residual;
  j["grad_norm"] = result.grad_norm_trace.empty() ? 0.0 : result.grad_norm_trace.back();
  j["start_index"] = result.start_index;
  j["initial_state"] = to_json(xi);
  j["initial_sensitivity"] = to_json(result.initial_sensitivity);
  j["cost_trace"] = result.cost_trace;

  const SampledPath &x = result.triple.state;
  const ControlPath &u = result.triple.control;
  const QuadraticCostSpec q = build_quadratic_spec(config);
  json costs;
  costs["minimum_energy"] = eval_cost(build_minimum_energy(q), x, u, eta);
  try {
    costs["onsager_machlup"] = eval_cost(build_onsager_machlup({q, model, {}}), x, u, eta);
  } catch (const UnsupportedSpec &) {
    costs["onsager_machlup"] = nullptr;
  }
  j["costs"] = costs;

  if (truth) {
    const SampledPath free_run =
        integrate_state(model, ControlPath::zeros(grid, model.control_dim), xi);
    j["rmse"] = {{"estimate", rmse(x, *truth)}, {"free_run", rmse(free_run, *truth)}};
  } else {
    j["rmse"] = nullptr;
  }

  int exit_code = result.status == OptimizerStatus::converged ? 0 : 2;
  std::optional<ShootingResult> shooting;
  if (config.shooting) {
    try {
      shooting = shoot(model, cost, eta, xi, result.triple.costate.at(0),
                       config.shooting_config, config.control_set);
      j["shooting"] = {{"status", "converged"},
                       {"cost", shooting->cost},
                       {"residual", shooting->residual},
                       {"iterations", shooting->iterations},
                       {"cost_gap", std::abs(shooting->cost - result.cost)}};
    } catch (const NoConvergence &e) {
      j["shooting"] = {{"status", "failed"},
                       {"message", e.what()},
                       {"best_residual", e.best_residual()}};
      exit_code = 2;
    }
  }
  if (options.record_timings) {
    j["timings"] = {{"optimize", t_opt}, {"total", seconds_since(start)}};
  }

  ensure_dir(outdir);
  write_path_csv(outdir / "estimate.csv", x);
  write_path_csv(outdir / "control.csv", u);
  write_path_csv(outdir / "costate.csv", result.triple.costate);
  write_json(outdir / "result.json", j);
  return {std::move(result), std::move(shooting), std::move(j), exit_code};
}

ValueProbeReport run_value_probe(const ExperimentConfig &config, double h,
                                 ValueSolver solver,
                                 const std::optional<std::filesystem::path> &eta_file,
                                 const RunOptions &options) {
  const ModelSpec model = build_model(config);
  const CostSpec cost = build_cost(config, model);
  const TimeGrid grid = config.grid();
  ObservationPath eta = eta_file
                            ? ObservationPath{SampledPath(grid, read_path_csv(*eta_file).values()),
                                              config.seed, config.noise_scale}
                            : simulate(config).eta;
  if (eta.path.dim() != cost.obs_dim) {
    throw ConfigError("eta file dimension does not match the observation operator");
  }
  ValueProbeOptions vo;
  vo.solver = solver;
  vo.optimizer = config.optimizer;
  vo.shooting = config.shooting_config;
  vo.set = config.control_set;
  vo.jobs = options.jobs;
  const Eigen::VectorXd xi = assimilation_initial_state(config);
  ValueProbe probe = value_probe(model, cost, eta, xi, h, vo);
  json j = {{"schema_version", kResultSchemaVersion},
            {"artifact_version", artifact_version()},
            {"config_hash", config_hash(config)},
            {"solver", solver == ValueSolver::shoot ? "shoot" : "gradient"},
            {"h", h},
            {"value", probe.value},
            {"dV_fd", to_json(probe.dv_fd)},
            {"lambda0", to_json(probe.lambda0)},
            {"max_abs_gap", probe.max_abs_gap}};
  return {std::move(probe), std::move(j)};
}

void write_json(const std::filesystem::path &file, const json &doc) {
  std::ofstream out(file, std::ios::binary);
  if (!out) {
    throw InvalidParameter("cannot open " + file.string() + " for writing");
  }
  out << doc.dump(2) << '\n';
}

} // namespace assim
