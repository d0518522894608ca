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


#ifndef ASSIM_COST_HPP
#define ASSIM_COST_HPP

#include "assim/dynamics.hpp"
#include "assim/roughpath.hpp"

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

namespace assim {

/**
 * Running costs of the functional
 *
 *     A(x, u) = int phi(t, x, u) dt + int psi(t, x) d eta.
 *
 * `stochastic` returns psi as a d-vector read as a row (it pairs with eta
 * increments); `stochastic_dx` is its d x n Jacobian. `stochastic_dt` is
 * optional and only needed by eval_cost_by_parts. `control_weight`, when set,
 * states that phi = a(t, x) + 1/2 u^T W(t) u and returns W; it enables the
 * closed-form pointwise minimizer of the Hamiltonian.
 */
struct CostSpec {
  using Vector = Eigen::VectorXd;
  using Matrix = Eigen::MatrixXd;

  std::string name;
  int state_dim = 0;
  int control_dim = 0;
  int obs_dim = 0;
  std::function<double(double, const Vector &, const Vector &)> running;
  std::function<Vector(double, const Vector &, const Vector &)> running_dx;
  std::function<Vector(double, const Vector &, const Vector &)> running_du;
  std::function<Vector(double, const Vector &)> stochastic;
  std::function<Matrix(double, const Vector &)> stochastic_dx;
  std::function<Vector(double, const Vector &)> stochastic_dt;
  std::function<Matrix(double)> control_weight;
};

/// Observation map h(t, x) with its state Jacobian. `time_derivative` may be
/// left empty when h does not depend on t.
struct ObservationOperator {
  int obs_dim = 0;
  int state_dim = 0;
  std::function<Eigen::VectorXd(double, const Eigen::VectorXd &)> value;
  std::function<Eigen::MatrixXd(double, const Eigen::VectorXd &)> jacobian;
  std::function<Eigen::VectorXd(double, const Eigen::VectorXd &)> time_derivative;
};

/// h(x) = (x_{i_1}, ..., x_{i_d}).
ObservationOperator coordinate_projection(const std::vector<int> &indices,
                                          int state_dim);
/// h(x) = x.
ObservationOperator full_state(int state_dim);

/**
 * Weights of the minimum-energy family. R(t) is d x d symmetric
 * nonnegative-definite and S(t) is m x m with smallest eigenvalue at least
 * `s_floor` > 0. `R_rate` is dR/dt; leave it empty only if R is not needed
 * under the by-parts evaluator. Matrices are checked at `check_times`.
 */
struct QuadraticCostSpec {
  ObservationOperator h;
  int control_dim = 0;
  std::function<Eigen::MatrixXd(double)> R;
  std::function<Eigen::MatrixXd(double)> S;
  std::function<Eigen::MatrixXd(double)> R_rate;
  double s_floor = 1e-12;
  std::vector<double> check_times{0.0};

  /// Constant weights; R_rate is set to zero.
  static QuadraticCostSpec constant(ObservationOperator h,
                                    const Eigen::MatrixXd &r,
                                    const Eigen::MatrixXd &s);

  void validate() const;
};

/// Onsager-Machlup weights. The control weight becomes (g g^T)^{-1}, which
/// needs a constant square gain. `divergence` defaults to the model's.
struct OnsagerMachlupSpec {
  QuadraticCostSpec base;
  ModelSpec model;
  std::function<double(double, const Eigen::VectorXd &)> divergence;
};

/// phi = 1/2 h^T R h + 1/2 u^T S u, psi = -h^T R.
CostSpec build_minimum_energy(const QuadraticCostSpec &q);

/// phi = 1/2 h^T R h + 1/2 u^T G u - div f with G = (g g^T)^{-1}; psi as
/// above. Throws UnsupportedSpec when g varies with (t, x) or is not square.
CostSpec build_onsager_machlup(const OnsagerMachlupSpec &om);

struct CostBreakdown {
  double deterministic = 0.0;
  double stochastic = 0.0;
  double total() const noexcept { return deterministic + stochastic; }
};

/// Trapezoid rule in t with the control held at its left node on each
/// interval, plus the left-tag sum of psi(t_i, x_i) (eta_{i+1} - eta_i).
CostBreakdown eval_cost_breakdown(const CostSpec &cost, const SampledPath &x,
                                  const ControlPath &u, const ObservationPath &eta);
double eval_cost(const CostSpec &cost, const SampledPath &x, const ControlPath &u,
                 const ObservationPath &eta);

/// Same functional after integrating the eta term by parts:
/// trapezoid of phi - (D1 psi + D2 psi (f + g u)) . eta, plus
/// psi(T, x_T) . eta_T - psi(0, x_0) . eta_0. Throws UnsupportedSpec without
/// stochastic_dt.
double eval_cost_by_parts(const CostSpec &cost, const ModelSpec &model,
                          const SampledPath &x, const ControlPath &u,
                          const ObservationPath &eta);

} // namespace assim

#endif // ASSIM_COST_HPP
