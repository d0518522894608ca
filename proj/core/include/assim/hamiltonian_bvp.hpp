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


#ifndef ASSIM_HAMILTONIAN_BVP_HPP
#define ASSIM_HAMILTONIAN_BVP_HPP

#include "assim/adjoint.hpp"
#include "assim/optimizer.hpp"

#include <Eigen/Dense>

namespace assim {

struct ShootingConfig {
  int newton_max_iters = 50;
  double newton_tol = 1e-8;
  double fd_step = 1e-6;
  double damping = 1.0;

  void validate() const;
};

struct HamiltonianPath {
  SampledPath state;
  ControlPath control;
  /// Costate; the last node holds the terminal residual, zero on the optimum.
  SampledPath costate;
};

/**
 * Forward integration of the coupled state/costate system from (xi, lambda0).
 *
 * The control on each interval is the pointwise Hamiltonian minimizer
 * argmin_U 1/2 v^T W v + (g^T lambda_k) . v, with W the interval average of
 * the control weight. The costate is advanced by inverting, step by step, the
 * backward sweep of solve_costate, so feeding the costate of a converged
 * optimizer run reproduces its triple. The cost must set control_weight.
 * Throws BlowUp when either path leaves the finite range.
 */
HamiltonianPath integrate_hamiltonian(const ModelSpec &model, const CostSpec &cost,
                                      const ObservationPath &eta,
                                      const Eigen::VectorXd &xi,
                                      const Eigen::VectorXd &lambda0,
                                      const ControlSetSpec &set = {});

struct ShootingResult {
  OptimalTriple triple;
  Eigen::VectorXd lambda0;
  Eigen::VectorXd initial_sensitivity;
  double residual = 0.0; ///< sup norm of the terminal costate
  double cost = 0.0;
  int iterations = 0;
};

/// Damped Newton on lambda0 -> terminal costate with a central-difference
/// Jacobian. Throws NoConvergence (carrying the best residual) when the
/// residual does not drop below newton_tol.
ShootingResult shoot(const ModelSpec &model, const CostSpec &cost,
                     const ObservationPath &eta, const Eigen::VectorXd &xi,
                     const Eigen::VectorXd &lambda0_guess,
                     const ShootingConfig &config, const ControlSetSpec &set = {});

enum class ValueSolver { gradient, shoot };

struct ValueProbeOptions {
  ValueSolver solver = ValueSolver::gradient;
  OptimizerConfig optimizer;
  ShootingConfig shooting;
  ControlSetSpec set;
  int jobs = 1;
};

struct ValueProbe {
  Eigen::VectorXd dv_fd;
  Eigen::VectorXd lambda0; ///< dA/dxi at the solve from xi
  double value = 0.0;
  double max_abs_gap = 0.0;
};

/// Central differences (V(xi + h e_i) - V(xi - h e_i)) / 2h from fresh solves,
/// compared with the sensitivity at xi. Any sub-solve that does not converge
/// raises NoConvergence.
ValueProbe value_probe(const ModelSpec &model, const CostSpec &cost,
                       const ObservationPath &eta, const Eigen::VectorXd &xi,
                       double h, const ValueProbeOptions &options = {});

} // namespace assim

#endif // ASSIM_HAMILTONIAN_BVP_HPP
