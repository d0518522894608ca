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


#ifndef ASSIM_EXPERIMENT_CONFIG_HPP
#define ASSIM_EXPERIMENT_CONFIG_HPP

#include "assim/control_set.hpp"
#include "assim/cost.hpp"
#include "assim/dynamics.hpp"
#include "assim/errors.hpp"
#include "assim/hamiltonian_bvp.hpp"
#include "assim/optimizer.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace assim {

/// Raised for any malformed or inconsistent experiment configuration.
class ConfigError : public InvalidParameter {
public:
  using InvalidParameter::InvalidParameter;
};

/**
 * Twin-experiment configuration, parsed from one JSON document:
 *
 *     {
 *       "model":        {"name": "lorenz63", "params": {"sigma": 10, "r": 28, "b": 2.667}},
 *       "grid":         {"T": 2.0, "n_steps": 1024},
 *       "truth":        {"initial_state": [..], "spinup_time": 10.0},
 *       "observation":  {"h": [0] | "full", "R": [..], "noise_scale": 0.1, "seed": 7},
 *       "cost":         {"kind": "minimum_energy" | "onsager_machlup", "S": [..]},
 *       "control_set":  {"kind": "all_space" | "box" | "ball", ...},
 *       "assimilation": {"initial_state": [..] | "initial_offset": [..],
 *                        "shooting": false, "shooting_config": {..}},
 *       "optimizer":    {"max_iters": 500, ...},
 *       "output_dir":   "out"
 *     }
 *
 * Matrices are dense row-major lists. Omitted R and S default to identities
 * and noise_scale to 0.1. Models: lorenz63 (sigma, r, b), lorenz96 (dim,
 * forcing) and linear (A, B, n, m).
 */
struct ExperimentConfig {
  std::string model_name = "lorenz63";
  Lorenz63Params lorenz63;
  Lorenz96Params lorenz96;
  Eigen::MatrixXd linear_a;
  Eigen::MatrixXd linear_b;

  double horizon = 1.0;
  int n_steps = 1;

  Eigen::VectorXd truth_initial;
  double spinup_time = 0.0;

  std::vector<int> obs_indices; ///< empty means the full state
  Eigen::MatrixXd R;
  double noise_scale = 0.1;
  std::uint64_t seed = 0;

  std::string cost_kind = "minimum_energy";
  Eigen::MatrixXd S;

  ControlSetSpec control_set;

  /// Assimilation start; an offset is added to the post-spinup truth state.
  Eigen::VectorXd assim_initial;
  bool assim_is_offset = true;
  bool shooting = false;
  ShootingConfig shooting_config;

  OptimizerConfig optimizer;
  std::string output_dir = "out";

  /// Compact dump of the parsed document, with sorted keys.
  std::string canonical;

  int state_dim() const;
  int control_dim() const;
  TimeGrid grid() const { return {horizon, n_steps}; }
};

ExperimentConfig parse_config(const nlohmann::json &doc);
ExperimentConfig load_config(const std::filesystem::path &file);

/// FNV-1a 64 of the canonical dump, as 16 hex digits.
std::string config_hash(const ExperimentConfig &config);

ModelSpec build_model(const ExperimentConfig &config);
ObservationOperator build_observation_operator(const ExperimentConfig &config);
QuadraticCostSpec build_quadratic_spec(const ExperimentConfig &config);
/// Cost of the configured kind.
CostSpec build_cost(const ExperimentConfig &config, const ModelSpec &model);

} // namespace assim

#endif // ASSIM_EXPERIMENT_CONFIG_HPP
