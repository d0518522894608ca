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

#ifndef ASSIM_DYNAMICS_HPP
#define ASSIM_DYNAMICS_HPP

#include "assim/roughpath.hpp"

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace assim {

/// Control values are piecewise constant: node i holds the value used on
/// [t_i, t_{i+1}). The value at the last node does not enter the dynamics.
using ControlPath = SampledPath;

/**
 * Controlled state equation x' = drift(t, x) + gain(t, x) u.
 *
 * `gain_jacobian(t, x)[j]` is d gain / d x_j (state_dim x control_dim).
 * Leave it empty when the gain does not depend on the state. `bilinear`, when
 * set, is the energy-conserving quadratic part of the drift (s . bilinear(s)
 * vanishes). `divergence` is the trace of drift_jacobian, when known in
 * closed form.
 */
struct ModelSpec {
  using Vector = Eigen::VectorXd;
  using Matrix = Eigen::MatrixXd;

  std::string name;
  int state_dim = 0;
  int control_dim = 0;
  std::function<Vector(double, const Vector &)> drift;
  std::function<Matrix(double, const Vector &)> gain;
  std::function<Matrix(double, const Vector &)> drift_jacobian;
  std::function<std::vector<Matrix>(double, const Vector &)> gain_jacobian;
  std::function<Vector(const Vector &)> bilinear;
  std::function<double(double, const Vector &)> divergence;
  /// Set when the gain is independent of (t, x).
  std::optional<Matrix> constant_gain;

  /// x' for a given control value.
  Vector velocity(double t, const Vector &x, const Vector &u) const;
  /// D_x [drift + gain u] at a given control value.
  Matrix linearization(double t, const Vector &x, const Vector &u) const;
};

struct Lorenz63Params {
  double sigma = 10.0;
  double r = 28.0;
  double b = 8.0 / 3.0;

  void validate() const;
};

/// Linear part of the Lorenz'63 drift in the shifted-z form,
/// (-s x + s y, -s x - y, -b z - b (r + s)).
Eigen::Vector3d lorenz63_linear(const Eigen::Vector3d &state,
                                const Lorenz63Params &params);
/// Quadratic part (0, -x z, x y).
Eigen::Vector3d lorenz63_bilinear(const Eigen::Vector3d &state);
/// Sum of the two parts.
Eigen::Vector3d lorenz63_drift(const Eigen::Vector3d &state,
                               const Lorenz63Params &params);

/// Lorenz'63 with constant gain (identity when omitted, then control_dim 3).
ModelSpec make_lorenz63(const Lorenz63Params &params,
                        std::optional<Eigen::MatrixXd> gain = std::nullopt);

struct Lorenz96Params {
  int dim = 40;
  double forcing = 8.0;

  void validate() const;
};

/// x_i' = (x_{i+1} - x_{i-2}) x_{i-1} - x_i + F (cyclic) with identity gain.
ModelSpec make_lorenz96(const Lorenz96Params &params);

/// x' = A x + B u.
ModelSpec make_linear(const Eigen::MatrixXd &a, const Eigen::MatrixXd &b,
                      std::string name = "linear");

/// Classical RK4 on each interval with the control frozen at its left node.
/// Throws BlowUp at the first node whose state is not finite.
SampledPath integrate_state(const ModelSpec &model, const ControlPath &u,
                            const Eigen::VectorXd &xi);

/// Tangent-linear flow: zeta' = D_x[drift + gain u] zeta + forcing,
/// zeta(0) = v0. Integrated with the RK4 stages of the state step, so the
/// result is the exact derivative of integrate_state along v0 when forcing is
/// absent. Forcing is interpolated linearly between nodes.
SampledPath integrate_variation(const ModelSpec &model, const SampledPath &x,
                                const ControlPath &u, const Eigen::VectorXd &v0,
                                const std::optional<SampledPath> &forcing = {});

struct EnergyDiagnostic {
  double sup_ratio = 0.0;    ///< |x|_inf / (1 + |u|_2)
  double nonlin_ratio = 0.0; ///< |x'|_2 / (1 + |u|_2^2)
};

/// Empirical growth ratios of a process. x' is the per-step secant slope;
/// L2 norms use the left-node quadrature matching the control convention.
EnergyDiagnostic energy_diagnostic(const SampledPath &x, const ControlPath &u);

} // namespace assim

#endif // ASSIM_DYNAMICS_HPP
