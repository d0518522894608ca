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


#include "assim/experiment_config.hpp"

#include <array>
#include <cmath>
#include <fstream>

namespace assim {

namespace {

using nlohmann::json;

const json &require(const json &obj, const char *key) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ConfigError(std::string("config: missing key '") + key + "'");
  }
  return obj.at(key);
}

double number(const json &v, const char *what) {
  if (!v.is_number()) {
    throw ConfigError(std::string("config: '") + what + "' must be a number");
  }
  const double d = v.get<double>();
  if (!std::isfinite(d)) {
    throw ConfigError(std::string("config: '") + what + "' must be finite");
  }
  return d;
}

double number_or(const json &obj, const char *key, double fallback) {
  return obj.contains(key) ? number(obj.at(key), key) : fallback;
}

int integer_or(const json &obj, const char *key, int fallback) {
  if (!obj.contains(key)) {
    return fallback;
  }
  const json &v = obj.at(key);
  if (!v.is_number_integer()) {
    throw ConfigError(std::string("config: '") + key + "' must be an integer");
  }
  return v.get<int>();
}

Eigen::VectorXd vector(const json &v, const char *what) {
  if (!v.is_array()) {
    throw ConfigError(std::string("config: '") + what + "' must be a list");
  }
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = number(v[i], what);
  }
  return out;
}

Eigen::VectorXd vector_of_size(const json &v, const char *what, int size) {
  Eigen::VectorXd out = vector(v, what);
  if (out.size() != size) {
    throw ConfigError(std::string("config: '") + what + "' must have " +
                      std::to_string(size) + " entries");
  }
  return out;
}

/// A list of rows, a flat row-major list of rows * cols numbers, or a scalar
/// times the identity when rows == cols.
Eigen::MatrixXd matrix(const json &v, const char *what, int rows, int cols) {
  if (v.is_number() && rows == cols) {
    return number(v, what) * Eigen::MatrixXd::Identity(rows, cols);
  }
  json entries = v;
  if (v.is_array() && !v.empty() && v.front().is_array()) {
    if (v.size() != static_cast<std::size_t>(rows)) {
      throw ConfigError(std::string("config: '") + what + "' must have " +
                        std::to_string(rows) + " rows");
    }
    entries = json::array();
    for (const json &row : v) {
      if (!row.is_array() || row.size() != static_cast<std::size_t>(cols)) {
        throw ConfigError(std::string("config: each row of '") + what + "' must hold " +
                          std::to_string(cols) + " entries");
      }
      entries.insert(entries.end(), row.begin(), row.end());
    }
  }
  const Eigen::VectorXd flat = vector(entries, what);
  if (flat.size() != static_cast<Eigen::Index>(rows) * cols) {
    throw ConfigError(std::string("config: '") + what + "' must hold " +
                      std::to_string(rows * cols) + " entries");
  }
  Eigen::MatrixXd out(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      out(r, c) = flat(r * cols + c);
    }
  }
  return out;
}

void parse_model(const json &doc, ExperimentConfig &cfg) {
  const json &model = require(doc, "model");
  const json &name = require(model, "name");
  if (!name.is_string()) {
    throw ConfigError("config: model.name must be a string");
  }
  cfg.model_name = name.get<std::string>();
  const json params = model.value("params", json::object());
  if (cfg.model_name == "lorenz63") {
    cfg.lorenz63.sigma = number_or(params, "sigma", cfg.lorenz63.sigma);
    cfg.lorenz63.r = number_or(params, "r", cfg.lorenz63.r);
    cfg.lorenz63.b = number_or(params, "b", cfg.lorenz63.b);
    cfg.lorenz63.validate();
  } else if (cfg.model_name == "lorenz96") {
    cfg.lorenz96.dim = integer_or(params, "dim", cfg.lorenz96.dim);
    cfg.lorenz96.forcing = number_or(params, "forcing", cfg.lorenz96.forcing);
    cfg.lorenz96.validate();
  } else if (cfg.model_name == "linear") {
    const int n = integer_or(params, "n", 0);
    const int m = integer_or(params, "m", n);
    if (n < 1 || m < 1) {
      throw ConfigError("config: linear model needs positive n and m");
    }
    cfg.linear_a = matrix(require(params, "A"), "A", n, n);
    cfg.linear_b = params.contains("B") ? matrix(params.at("B"), "B", n, m)
                                        : Eigen::MatrixXd::Identity(n, m);
  } else {
    throw ConfigError("config: unknown model '" + cfg.model_name + "'");
  }
}

ControlSetSpec parse_control_set(const json &doc, int m) {
  if (!doc.contains("control_set")) {
    return ControlSetSpec::all_space();
  }
  const json &cs = doc.at("control_set");
  const std::string kind = cs.value("kind", std::string("all_space"));
  ControlSetSpec out;
  if (kind == "all_space") {
    out = ControlSetSpec::all_space();
  } else if (kind == "box") {
    out = ControlSetSpec::box(vector_of_size(require(cs, "lo"), "lo", m),
                              vector_of_size(require(cs, "hi"), "hi", m));
  } else if (kind == "ball") {
    const Eigen::VectorXd center = cs.contains("center")
                                       ? vector_of_size(cs.at("center"), "center", m)
                                       : Eigen::VectorXd::Zero(m);
    out = ControlSetSpec::ball(center, number(require(cs, "radius"), "radius"));
  } else {
    throw ConfigError("config: unknown control_set kind '" + kind + "'");
  }
  out.validate(m);
  return out;
}

OptimizerConfig parse_optimizer(const json &doc) {
  OptimizerConfig o;
  if (!doc.contains("optimizer")) {
    return o;
  }
  const json &j = doc.at("optimizer");
  o.max_iters = integer_or(j, "max_iters", o.max_iters);
  o.grad_tol = number_or(j, "grad_tol", o.grad_tol);
  o.step_init = number_or(j, "step_init", o.step_init);
  o.armijo_c = number_or(j, "armijo_c", o.armijo_c);
  o.armijo_shrink = number_or(j, "armijo_shrink", o.armijo_shrink);
  o.min_step = number_or(j, "min_step", o.min_step);
  o.multistart = integer_or(j, "multistart", o.multistart);
  o.multistart_scale = number_or(j, "multistart_scale", o.multistart_scale);
  o.precondition = j.value("precondition", o.precondition);
  o.bb_step = j.value("bb_step", o.bb_step);
  if (j.contains("costate_scheme")) {
    const std::string scheme = j.at("costate_scheme").get<std::string>();
    if (scheme == "discrete_adjoint") {
      o.scheme = CostateScheme::discrete_adjoint;
    } else if (scheme == "continuous_heun") {
      o.scheme = CostateScheme::continuous_heun;
    } else {
      throw ConfigError("config: unknown costate_scheme '" + scheme + "'");
    }
  }
  o.validate();
  return o;
}

ExperimentConfig parse_document(const json &doc) {
  if (!doc.is_object()) {
    throw ConfigError("config: top level must be an object");
  }
  ExperimentConfig cfg;
  parse_model(doc, cfg);
  const int n = cfg.state_dim();
  const int m = cfg.control_dim();

  const json &grid = require(doc, "grid");
  cfg.horizon = number(require(grid, "T"), "T");
  cfg.n_steps = integer_or(grid, "n_steps", 0);
  if (!(cfg.horizon > 0.0) || cfg.n_steps < 1) {
    throw ConfigError("config: grid needs T > 0 and n_steps >= 1");
  }

  const json &truth = require(doc, "truth");
  cfg.truth_initial = vector_of_size(require(truth, "initial_state"), "initial_state", n);
  cfg.spinup_time = number_or(truth, "spinup_time", 0.0);
  if (cfg.spinup_time < 0.0) {
    throw ConfigError("config: spinup_time must be nonnegative");
  }

  const json obs = doc.value("observation", json::object());
  if (obs.contains("h") && obs.at("h").is_array()) {
    for (const json &idx : obs.at("h")) {
      if (!idx.is_number_integer() || idx.get<int>() < 0 || idx.get<int>() >= n) {
        throw ConfigError("config: observation.h holds an invalid state index");
      }
      cfg.obs_indices.push_back(idx.get<int>());
    }
    if (cfg.obs_indices.empty()) {
      throw ConfigError("config: observation.h is empty");
    }
  } else if (obs.contains("h") && obs.at("h") != "full") {
    throw ConfigError("config: observation.h must be an index list or \"full\"");
  }
  const int d = cfg.obs_indices.empty() ? n : static_cast<int>(cfg.obs_indices.size());
  cfg.R = obs.contains("R") ? matrix(obs.at("R"), "R", d, d) : Eigen::MatrixXd::Identity(d, d);
  cfg.noise_scale = number_or(obs, "noise_scale", cfg.noise_scale);
  if (cfg.noise_scale < 0.0) {
    throw ConfigError("config: noise_scale must be nonnegative");
  }
  if (obs.contains("seed")) {
    const json &seed = obs.at("seed");
    if (!seed.is_number_integer() || (!seed.is_number_unsigned() && seed.get<std::int64_t>() < 0)) {
      throw ConfigError("config: observation.seed must be a nonnegative integer");
    }
    cfg.seed = obs.at("seed").get<std::uint64_t>();
  }

  const json cost = doc.value("cost", json::object());
  cfg.cost_kind = cost.value("kind", cfg.cost_kind);
  if (cfg.cost_kind != "minimum_energy" && cfg.cost_kind != "onsager_machlup") {
    throw ConfigError("config: unknown cost kind '" + cfg.cost_kind + "'");
  }
  cfg.S = cost.contains("S") ? matrix(cost.at("S"), "S", m, m) : Eigen::MatrixXd::Identity(m, m);

  cfg.control_set = parse_control_set(doc, m);

  const json assim = doc.value("assimilation", json::object());
  if (assim.contains("initial_state")) {
    cfg.assim_initial = vector_of_size(assim.at("initial_state"), "initial_state", n);
    cfg.assim_is_offset = false;
  } else {
    cfg.assim_initial = assim.contains("initial_offset")
                            ? vector_of_size(assim.at("initial_offset"), "initial_offset", n)
                            : Eigen::VectorXd::Zero(n);
  }
  cfg.shooting = assim.value("shooting", false);
  if (assim.contains("shooting_config")) {
    const json &sc = assim.at("shooting_config");
    cfg.shooting_config.newton_max_iters =
        integer_or(sc, "newton_max_iters", cfg.shooting_config.newton_max_iters);
    cfg.shooting_config.newton_tol = number_or(sc, "newton_tol", cfg.shooting_config.newton_tol);
    cfg.shooting_config.fd_step = number_or(sc, "fd_step", cfg.shooting_config.fd_step);
    cfg.shooting_config.damping = number_or(sc, "damping", cfg.shooting_config.damping);
  }
  cfg.shooting_config.validate();

  cfg.optimizer = parse_optimizer(doc);
  cfg.output_dir = doc.value("output_dir", cfg.output_dir);
  cfg.canonical = doc.dump();
  return cfg;
}

} // namespace

int ExperimentConfig::state_dim() const {
  if (model_name == "lorenz63") {
    return 3;
  }
  if (model_name == "lorenz96") {
    return lorenz96.dim;
  }
  return static_cast<int>(linear_a.rows());
}

int ExperimentConfig::control_dim() const {
  if (model_name == "linear") {
    return static_cast<int>(linear_b.cols());
  }
  return state_dim();
}

ExperimentConfig parse_config(const json &doc) {
  try {
    return parse_document(doc);
  } catch (const ConfigError &) {
    throw;
  } catch (const json::exception &e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const InvalidParameter &e) {
    throw ConfigError(e.what());
  }
}

ExperimentConfig load_config(const std::filesystem::path &file) {
  std::ifstream in(file);
  if (!in) {
    throw ConfigError("cannot open config " + file.string());
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception &e) {
    throw ConfigError("config " + file.string() + ": " + e.what());
  }
  return parse_config(doc);
}

std::string config_hash(const ExperimentConfig &config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : config.canonical) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::array<char, 17> buf{};
  static constexpr char kHex[] = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[static_cast<std::size_t>(i)] = kHex[h & 0xf];
    h >>= 4;
  }
  return {buf.data(), 16};
}

ModelSpec build_model(const ExperimentConfig &config) {
  if (config.model_name == "lorenz63") {
    return make_lorenz63(config.lorenz63);
  }
  if (config.model_name == "lorenz96") {
    return make_lorenz96(config.lorenz96);
  }
  return make_linear(config.linear_a, config.linear_b);
}

ObservationOperator build_observation_operator(const ExperimentConfig &config) {
  if (config.obs_indices.empty()) {
    return full_state(config.state_dim());
  }
  return coordinate_projection(config.obs_indices, config.state_dim());
}

QuadraticCostSpec build_quadratic_spec(const ExperimentConfig &config) {
  return QuadraticCostSpec::constant(build_observation_operator(config), config.R,
                                     config.S);
}

CostSpec build_cost(const ExperimentConfig &config, const ModelSpec &model) {
  QuadraticCostSpec q = build_quadratic_spec(config);
  if (config.cost_kind == "onsager_machlup") {
    return build_onsager_machlup({std::move(q), model, {}});
  }
  return build_minimum_energy(q);
}

} // namespace assim
