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

#include "rk4.hpp"

namespace assim::detail {

namespace {

// Stage s reads the previous slope scaled by kFeed[s].
constexpr std::array<double, 4> kFeed{0.0, 0.5, 0.5, 1.0};
constexpr std::array<double, 4> kWeight{1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0,
                                        1.0 / 6.0};

Eigen::MatrixXd gain_at(const ModelSpec &model, double t,
                        const Eigen::VectorXd &x) {
  if (model.constant_gain) {
    return *model.constant_gain;
  }
  return model.gain(t, x);
}

} // namespace

Rk4Step rk4_step(const ModelSpec &model, double t, double dt,
                 const Eigen::VectorXd &x, const Eigen::VectorXd &u) {
  Rk4Step s;
  s.t = t;
  s.dt = dt;
  s.stage_time = {t, t + 0.5 * dt, t + 0.5 * dt, t + dt};
  s.next = x;
  for (std::size_t i = 0; i < 4; ++i) {
    if (i == 0) {
      s.stage_state[i] = x;
    } else {
      s.stage_state[i] = x + kFeed[i] * dt * s.slope[i - 1];
    }
    s.slope[i] = model.velocity(s.stage_time[i], s.stage_state[i], u);
    s.next += kWeight[i] * dt * s.slope[i];
  }
  return s;
}

Rk4Jacobians rk4_jacobians(const ModelSpec &model, const Rk4Step &step,
                           const Eigen::VectorXd &u) {
  const Eigen::Index n = step.next.size();
  const double dt = step.dt;
  Rk4Jacobians out;
  out.state = Eigen::MatrixXd::Identity(n, n);
  out.forcing = Eigen::MatrixXd::Zero(n, n);
  out.control = Eigen::MatrixXd::Zero(n, u.size());

  Eigen::MatrixXd ds_dx, ds_dw, ds_du; // slope sensitivities of the previous stage
  for (std::size_t i = 0; i < 4; ++i) {
    const Eigen::MatrixXd jac =
        model.linearization(step.stage_time[i], step.stage_state[i], u);
    const Eigen::MatrixXd gain = gain_at(model, step.stage_time[i], step.stage_state[i]);
    Eigen::MatrixXd sx, sw, su;
    if (i == 0) {
      sx = jac;
      sw = Eigen::MatrixXd::Identity(n, n);
      su = gain;
    } else {
      const double feed = kFeed[i] * dt;
      sx = jac * (Eigen::MatrixXd::Identity(n, n) + feed * ds_dx);
      sw = Eigen::MatrixXd::Identity(n, n) + feed * (jac * ds_dw);
      su = gain + feed * (jac * ds_du);
    }
    out.state += kWeight[i] * dt * sx;
    out.forcing += kWeight[i] * dt * sw;
    out.control += kWeight[i] * dt * su;
    ds_dx = std::move(sx);
    ds_dw = std::move(sw);
    ds_du = std::move(su);
  }
  return out;
}

Rk4Pullback rk4_pullback(const ModelSpec &model, const Rk4Step &step,
                         const Eigen::VectorXd &u, const Eigen::VectorXd &bar) {
  const double dt = step.dt;
  // Adjoints of the four slopes, filled from the last stage backwards.
  std::array<Eigen::VectorXd, 4> slope_bar;
  std::array<Eigen::MatrixXd, 4> jac;
  for (std::size_t i = 0; i < 4; ++i) {
    jac[i] = model.linearization(step.stage_time[i], step.stage_state[i], u);
  }
  for (std::size_t k = 4; k-- > 0;) {
    slope_bar[k] = kWeight[k] * dt * bar;
    if (k < 3) {
      slope_bar[k] += kFeed[k + 1] * dt * (jac[k + 1].transpose() * slope_bar[k + 1]);
    }
  }
  Rk4Pullback out;
  out.state = bar;
  out.forcing = Eigen::VectorXd::Zero(bar.size());
  out.control = Eigen::VectorXd::Zero(u.size());
  for (std::size_t i = 0; i < 4; ++i) {
    out.state.noalias() += jac[i].transpose() * slope_bar[i];
    out.forcing += slope_bar[i];
    out.control.noalias() +=
        gain_at(model, step.stage_time[i], step.stage_state[i]).transpose() *
        slope_bar[i];
  }
  return out;
}

Eigen::VectorXd rk4_tangent(const ModelSpec &model, const Rk4Step &step,
                            const Eigen::VectorXd &u, const Eigen::VectorXd &zeta,
                            const Eigen::VectorXd &r0, const Eigen::VectorXd &rm,
                            const Eigen::VectorXd &r1) {
  const double dt = step.dt;
  const std::array<const Eigen::VectorXd *, 4> forcing{&r0, &rm, &rm, &r1};
  Eigen::VectorXd next = zeta;
  Eigen::VectorXd prev;
  for (std::size_t i = 0; i < 4; ++i) {
    Eigen::VectorXd arg = zeta;
    if (i > 0) {
      arg += kFeed[i] * dt * prev;
    }
    Eigen::VectorXd slope =
        model.linearization(step.stage_time[i], step.stage_state[i], u) * arg +
        *forcing[i];
    next += kWeight[i] * dt * slope;
    prev = std::move(slope);
  }
  return next;
}

} // namespace assim::detail
