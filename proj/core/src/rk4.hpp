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

// Internal: one frozen-control RK4 step together with its tangent and
// reverse-mode (adjoint) derivatives. Shared by the integrators, the costate
// sweep and the Hamiltonian forward map so they all differentiate the same
// discrete flow.

#ifndef ASSIM_SRC_RK4_HPP
#define ASSIM_SRC_RK4_HPP

#include "assim/dynamics.hpp"

#include <array>

namespace assim::detail {

struct Rk4Step {
  double t = 0.0;
  double dt = 0.0;
  std::array<double, 4> stage_time{};
  std::array<Eigen::VectorXd, 4> stage_state;
  std::array<Eigen::VectorXd, 4> slope;
  Eigen::VectorXd next;
};

/// Evaluates the four stages from (t, x) with control u held fixed.
Rk4Step rk4_step(const ModelSpec &model, double t, double dt,
                 const Eigen::VectorXd &x, const Eigen::VectorXd &u);

/// Jacobians of the step map x_{k+1} = step(x_k, u_k, w), where w is a
/// constant additive forcing on the velocity (zero in the actual flow).
struct Rk4Jacobians {
  Eigen::MatrixXd state;   ///< d next / d x
  Eigen::MatrixXd forcing; ///< d next / d w
  Eigen::MatrixXd control; ///< d next / d u
};

Rk4Jacobians rk4_jacobians(const ModelSpec &model, const Rk4Step &step,
                           const Eigen::VectorXd &u);

/// Vector-Jacobian products of the step map against the covector `bar`.
struct Rk4Pullback {
  Eigen::VectorXd state;
  Eigen::VectorXd forcing;
  Eigen::VectorXd control;
};

Rk4Pullback rk4_pullback(const ModelSpec &model, const Rk4Step &step,
                         const Eigen::VectorXd &u, const Eigen::VectorXd &bar);

/// Tangent propagation of zeta through the step with an additive forcing
/// sampled at the stage times (r0 at t, rm at t + dt/2, r1 at t + dt).
Eigen::VectorXd rk4_tangent(const ModelSpec &model, const Rk4Step &step,
                            const Eigen::VectorXd &u, const Eigen::VectorXd &zeta,
                            const Eigen::VectorXd &r0, const Eigen::VectorXd &rm,
                            const Eigen::VectorXd &r1);

} // namespace assim::detail

#endif // ASSIM_SRC_RK4_HPP
