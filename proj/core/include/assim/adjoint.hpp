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


#ifndef ASSIM_ADJOINT_HPP
#define ASSIM_ADJOINT_HPP

#include "assim/control_set.hpp"
#include "assim/cost.hpp"
#include "assim/dynamics.hpp"
#include "assim/roughpath.hpp"

#include <Eigen/Dense>

#include <cstdint>

namespace assim {

/// How the backward costate recursion is discretized.
///
/// `discrete_adjoint` is the exact reverse sweep of the RK4 forward map and
/// the trapezoid/left-tag cost, so the control gradient it yields is the true
/// gradient of the discrete objective. `continuous_heun` integrates the
/// costate integral equation directly (Heun on the dt terms, left-tag Young
/// term); it agrees with the discrete adjoint to first order in dt.
enum class CostateScheme { discrete_adjoint, continuous_heun };

/**
 * Backward costate. `path` holds the row covector lambda at each node and
 * ends at zero. For the discrete adjoint, node k carries the interval value
 * on [t_k, t_{k+1}). `control_pullback` is g^T lambda integrated against the
 * step (node k pairs with control u_k; last node zero). `initial_sensitivity`
 * is dA/dxi of the discrete cost (equal to lambda(0) to first order).
 */
struct Costate {
  SampledPath path;
  SampledPath control_pullback;
  Eigen::VectorXd initial_sensitivity;
};

struct OptimalTriple {
  SampledPath state;
  ControlPath control;
  SampledPath costate;
};

Costate solve_costate(const ModelSpec &model, const CostSpec &cost,
                      const SampledPath &x, const ControlPath &u,
                      const ObservationPath &eta,
                      CostateScheme scheme = CostateScheme::discrete_adjoint);

/// phi(t, x, v) + lambda . (f(t, x) + g(t, x) v).
double hamiltonian(const CostSpec &cost, const ModelSpec &model, double t,
                   const Eigen::VectorXd &x, const Eigen::VectorXd &lambda,
                   const Eigen::VectorXd &v);

/// Pointwise minimizer of the Hamiltonian over U for costs that set
/// control_weight: argmin 1/2 v^T W v + (g^T lambda) . v.
Eigen::VectorXd hamiltonian_minimizer(const CostSpec &cost, const ModelSpec &model,
                                      double t, const Eigen::VectorXd &x,
                                      const Eigen::VectorXd &lambda,
                                      const ControlSetSpec &set);

/// Gradient of the discrete cost with respect to the control values divided by
/// dt: node k < N gets the trapezoid average of D3 phi over the interval plus
/// the costate pullback; node N, which does not enter the cost, gets
/// D3 phi(t_N, x_N, u_N) so descent moves it to the pointwise minimizer.
SampledPath control_gradient(const ModelSpec &model, const CostSpec &cost,
                             const SampledPath &x, const ControlPath &u,
                             const Costate &costate);

/// Pointwise D3 phi(t_i, x_i, u_i) + lambda_i g(t_i, x_i).
SampledPath control_gradient(const ModelSpec &model, const CostSpec &cost,
                             const SampledPath &x, const ControlPath &u,
                             const SampledPath &lambda);

/// How min_v H is found. `closed_form` needs control_weight and falls back to
/// sampling when it is absent. Sampling draws `sample_count` points uniformly
/// in the ball of radius 10 (1 + |u(t)|) about the origin, projects them onto
/// U and always includes u(t) itself.
struct ResidualProbe {
  enum class Mode { closed_form, sampling };
  Mode mode = Mode::closed_form;
  int sample_count = 256;
  std::uint64_t seed = 0;
};

struct MpResidual {
  double value = 0.0;
  std::size_t node = 0; ///< where the maximum is attained
};

/// max over nodes of H(u(t)) - min_v H(v); nonnegative.
MpResidual max_principle_residual(const OptimalTriple &triple, const CostSpec &cost,
                                  const ModelSpec &model, const ControlSetSpec &set,
                                  const ResidualProbe &probe = {});

struct DualityResult {
  double residual = 0.0;
  SampledPath zeta;
  SampledPath lambda;
};

/**
 * Duality relation for
 *
 *     zeta(t)   = zeta(0) + int_0^t M zeta ds + a(t),
 *     lambda(t) = lambda(T) + int_t^T lambda M ds + b(t).
 *
 * a is shifted so a(0) = 0 and b so b(T) = 0. Both equations use Heun on
 * the ds terms and the exact increments of a, b. Returns
 * |lambda(T) zeta(T) - lambda(0) zeta(0) - int zeta db - int lambda da| with
 * both Young sums taken at `tag`. With the left tag the residual carries the
 * O(dt) cross term sum da.db; the midpoint tag cancels it.
 */
DualityResult duality_check(const SampledPath &m, const SampledPath &a,
                            const SampledPath &b, const Eigen::VectorXd &zeta0,
                            const Eigen::VectorXd &lambda_t, Tag tag = Tag::midpoint);

} // namespace assim

#endif // ASSIM_ADJOINT_HPP
