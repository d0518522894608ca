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


#ifndef ASSIM_EXPERIMENTS_HPP
#define ASSIM_EXPERIMENTS_HPP

#include "assim/experiment_config.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <optional>
#include <string>

namespace assim {

inline constexpr int kResultSchemaVersion = 1;

/// Library version string.
std::string artifact_version();

struct RunOptions {
  /// Adds wall-clock and per-phase timings to manifests. Off by default so
  /// reruns stay byte-identical.
  bool record_timings = false;
  int jobs = 1;
};

struct SimulationOutput {
  SampledPath truth;
  ObservationPath eta;
};

/// Truth initial state after the configured spin-up (same dt as the grid).
Eigen::VectorXd truth_initial_state(const ExperimentConfig &config);
/// Initial state the assimilation starts from.
Eigen::VectorXd assimilation_initial_state(const ExperimentConfig &config);

/// zeta(t_j) = trapezoid of h(t, x(t)) over [0, t_j].
SampledPath integrated_observation(const ObservationOperator &h, const SampledPath &x);

/// Truth with zero control from the spun-up state, then
/// eta = zeta + noise_scale W.
SimulationOutput simulate(const ExperimentConfig &config);

/// Writes truth.csv, eta.csv and manifest.json; returns the manifest.
nlohmann::json simulate_to_dir(const ExperimentConfig &config,
                               const std::filesystem::path &outdir,
                               const RunOptions &options = {});

/// Root-mean-square difference over all nodes and components.
double rmse(const SampledPath &a, const SampledPath &b);

struct AssimilationReport {
  AssimilationResult result;
  std::optional<ShootingResult> shooting;
  nlohmann::json json;
  int exit_code = 0; ///< 0 converged, 2 otherwise
};

/// Runs the optimizer (and shooting when configured) on the eta file and
/// writes estimate.csv, control.csv, costate.csv and result.json. Throws
/// ConfigError when the eta grid or dimension disagrees with the config.
AssimilationReport assimilate_to_dir(const ExperimentConfig &config,
                                     const std::filesystem::path &eta_file,
                                     const std::optional<std::filesystem::path> &truth_file,
                                     const std::filesystem::path &outdir,
                                     const RunOptions &options = {});

struct ValueProbeReport {
  ValueProbe probe;
  nlohmann::json json;
};

/// Value probe at the assimilation initial state. Observations come from
/// `eta_file` when given, otherwise from simulate(config).
ValueProbeReport run_value_probe(const ExperimentConfig &config, double h,
                                 ValueSolver solver,
                                 const std::optional<std::filesystem::path> &eta_file,
                                 const RunOptions &options = {});

/// Pretty-printed JSON followed by a newline.
void write_json(const std::filesystem::path &file, const nlohmann::json &doc);

} // namespace assim

#endif // ASSIM_EXPERIMENTS_HPP
