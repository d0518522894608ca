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


#ifndef ASSIM_OPTIMIZER_HPP
#define ASSIM_OPTIMIZER_HPP

#include "assim/adjoint.hpp"
#include "assim/control_set.hpp"
#include "assim/cost.hpp"
#include "assim/dynamics.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace assim {

struct OptimizerConfig {
  int max_iters = 500;
  double grad_tol = 1e-5;
  double step_init = 1.0;
  double armijo_c = 1e-4;
  double armijo_shrink = 0.5;
  double min_step = 1e-12;
  /// Number of starts; start 0 is u0, the rest perturb it with Gaussian noise
  /// of standard deviation `multistart_scale` drawn from `seed`.
  int multistart = 1;
  double multistart_scale = 1.0;
  std::uint64_t seed = 0;
  /// Worker threads for multistart.
  int jobs = 1;
  /// Scale the descent direction by the inverse control weight.
  bool precondition = false;
  /// Start each line search from a Barzilai-Borwein step instead of
  /// step_init. Acceptance is still the Armijo test.
  bool bb_step = false;
  CostateScheme scheme = CostateScheme::discrete_adjoint;

  void validate() const;
};

enum class OptimizerStatus { converged, max_iters, stalled };

std::string to_string(OptimizerStatus status);

struct AssimilationResult {
  OptimalTriple triple;
  std::vector<double> cost_trace;      ///< cost at every accepted iterate
  std::vector<double> grad_norm_trace; ///< projected-gradient sup norm
  double mp_residual = 0.0;
  int iterations = 0;
  OptimizerStatus status = OptimizerStatus::max_iters;
  double cost = 0.0;
  /// dA/dxi at the final iterate.
  Eigen::VectorXd initial_sensitivity;
  int start_index = 0;
};

/**
 * Projected gradient with Armijo backtracking over piecewise-constant
 * controls:
 *
 *     u <- P_U(u - alpha G),
 *     accept when A(u_alpha) <= A(u) + c dt sum_k G_k . (u_alpha - u)_k.
 *
 * When the decrease is within a few ulps of A, the sufficient-decrease test is
 * replaced by dt sum G(u_alpha) . (u_alpha - u) <= (1 - 2c) |slope|, still
 * with A(u_alpha) <= A(u).
 *
 * Stops when |u - P_U(u - G)|_inf < grad_tol (converged), after max_iters
 * (max_iters), or (stalled) when no step above min_step is accepted, every
 * trial blows up, or the projected gradient has not decreased in 50
 * iterations. The returned triple carries a freshly
 * solved costate and its maximum-principle residual.
 */
AssimilationResult minimize(const ModelSpec &model, const CostSpec &cost,
                            const ObservationPath &eta, const Eigen::VectorXd &xi,
                            const ControlPath &u0, const ControlSetSpec &set,
                            const OptimizerConfig &config);

/// Runs config.multistart starts on config.jobs threads and returns the one
/// with the lowest final cost (lowest index on ties).
AssimilationResult minimize_multistart(const ModelSpec &model, const CostSpec &cost,
                                       const ObservationPath &eta,
                                       const Eigen::VectorXd &xi,
                                       const ControlPath &u0,
                                       const ControlSetSpec &set,
                                       const OptimizerConfig &config);

} // namespace assim

#endif // ASSIM_OPTIMIZER_HPP
