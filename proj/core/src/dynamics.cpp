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


#include "assim/dynamics.hpp"

#include "assim/errors.hpp"
#include "rk4.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace assim {

ModelSpec::Vector ModelSpec::velocity(double t, const Vector &x,
                                      const Vector &u) const {
  if (constant_gain) {
    return drift(t, x) + (*constant_gain) * u;
  }
  return drift(t, x) + gain(t, x) * u;
}

ModelSpec::Matrix ModelSpec::linearization(double t, const Vector &x,
                                           const Vector &u) const {
  Matrix jac = drift_jacobian(t, x);
  if (gain_jacobian) {
    const std::vector<Matrix> dg = gain_jacobian(t, x);
    for (std::size_t j = 0; j < dg.size(); ++j) {
      jac.col(static_cast<Eigen::Index>(j)) += dg[j] * u;
    }
  }
  return jac;
}

void Lorenz63Params::validate() const {
  if (!(sigma > 0.0) || !(r > 0.0) || !(b > 0.0)) {
    throw InvalidParameter("lorenz63 parameters must be positive");
  }
}

Eigen::Vector3d lorenz63_linear(const Eigen::Vector3d &s,
                                const Lorenz63Params &p) {
  return {-p.sigma * s(0) + p.sigma * s(1), -p.sigma * s(0) - s(1),
          -p.b * s(2) - p.b * (p.r + p.sigma)};
}

Eigen::Vector3d lorenz63_bilinear(const Eigen::Vector3d &s) {
  return {0.0, -s(0) * s(2), s(0) * s(1)};
}

Eigen::Vector3d lorenz63_drift(const Eigen::Vector3d &state,
                               const Lorenz63Params &params) {
  return lorenz63_linear(state, params) + lorenz63_bilinear(state);
}

ModelSpec make_lorenz63(const Lorenz63Params &params,
                        std::optional<Eigen::MatrixXd> gain) {
  params.validate();
  const Eigen::MatrixXd g = gain ? *gain : Eigen::MatrixXd::Identity(3, 3);
  if (g.rows() != 3 || g.cols() < 1) {
    throw InvalidParameter("lorenz63 gain must have 3 rows");
  }
  ModelSpec m;
  m.name = "lorenz63";
  m.state_dim = 3;
  m.control_dim = static_cast<int>(g.cols());
  m.drift = [params](double, const Eigen::VectorXd &x) -> Eigen::VectorXd {
    return lorenz63_drift(x.head<3>(), params);
  };
  m.gain = [g](double, const Eigen::VectorXd &) { return g; };
  m.drift_jacobian = [params](double, const Eigen::VectorXd &x) {
    Eigen::MatrixXd j(3, 3);
    j << -params.sigma, params.sigma, 0.0,      //
        -params.sigma - x(2), -1.0, -x(0),      //
        x(1), x(0), -params.b;
    return j;
  };
  m.bilinear = [](const Eigen::VectorXd &x) -> Eigen::VectorXd {
    return lorenz63_bilinear(x.head<3>());
  };
  const double div = -(params.sigma + 1.0 + params.b);
  m.divergence = [div](double, const Eigen::VectorXd &) { return div; };
  m.constant_gain = g;
  return m;
}

void Lorenz96Params::validate() const {
  if (dim < 4) {
    throw InvalidParameter("lorenz96 needs at least 4 variables");
  }
  if (!std::isfinite(forcing)) {
    throw InvalidParameter("lorenz96 forcing must be finite");
  }
}

ModelSpec make_lorenz96(const Lorenz96Params &params) {
  params.validate();
  const int n = params.dim;
  const auto idx = [n](int i) { return ((i % n) + n) % n; };
  ModelSpec m;
  m.name = "lorenz96";
  m.state_dim = n;
  m.control_dim = n;
  m.drift = [n, idx, params](double, const Eigen::VectorXd &x) {
    Eigen::VectorXd out(n);
    for (int i = 0; i < n; ++i) {
      out(i) = (x(idx(i + 1)) - x(idx(i - 2))) * x(idx(i - 1)) - x(i) +
               params.forcing;
    }
    return out;
  };
  m.drift_jacobian = [n, idx](double, const Eigen::VectorXd &x) {
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      j(i, idx(i + 1)) += x(idx(i - 1));
      j(i, idx(i - 2)) -= x(idx(i - 1));
      j(i, idx(i - 1)) += x(idx(i + 1)) - x(idx(i - 2));
      j(i, i) -= 1.0;
    }
    return j;
  };
  m.bilinear = [n, idx](const Eigen::VectorXd &x) {
    Eigen::VectorXd out(n);
    for (int i = 0; i < n; ++i) {
      out(i) = (x(idx(i + 1)) - x(idx(i - 2))) * x(idx(i - 1));
    }
    return out;
  };
  m.divergence = [n](double, const Eigen::VectorXd &) {
    return -static_cast<double>(n);
  };
  const Eigen::MatrixXd g = Eigen::MatrixXd::Identity(n, n);
  m.gain = [g](double, const Eigen::VectorXd &) { return g; };
  m.constant_gain = g;
  return m;
}

ModelSpec make_linear(const Eigen::MatrixXd &a, const Eigen::MatrixXd &b,
                      std::string name) {
  if (a.rows() != a.cols() || a.rows() < 1) {
    throw InvalidParameter("linear model: A must be square");
  }
  if (b.rows() != a.rows() || b.cols() < 1) {
    throw InvalidParameter("linear model: B must have as many rows as A");
  }
  ModelSpec m;
  m.name = std::move(name);
  m.state_dim = static_cast<int>(a.rows());
  m.control_dim = static_cast<int>(b.cols());
  m.drift = [a](double, const Eigen::VectorXd &x) -> Eigen::VectorXd {
    return a * x;
  };
  m.drift_jacobian = [a](double, const Eigen::VectorXd &) { return a; };
  m.gain = [b](double, const Eigen::VectorXd &) { return b; };
  const double trace = a.trace();
  m.divergence = [trace](double, const Eigen::VectorXd &) { return trace; };
  m.constant_gain = b;
  return m;
}

namespace {

void check_control(const ModelSpec &model, const ControlPath &u) {
  if (u.dim() != model.control_dim) {
    throw GridMismatch("control dimension " + std::to_string(u.dim()) +
                       " does not match model " + model.name);
  }
}

} // namespace

SampledPath integrate_state(const ModelSpec &model, const ControlPath &u,
                            const Eigen::VectorXd &xi) {
  check_control(model, u);
  if (xi.size() != model.state_dim) {
    throw GridMismatch("initial state has the wrong dimension");
  }
  if (!xi.allFinite()) {
    throw BlowUp("initial state is not finite", 0);
  }
  const TimeGrid &grid = u.grid();
  const double dt = grid.dt();
  Eigen::MatrixXd values(model.state_dim, static_cast<Eigen::Index>(grid.nodes()));
  values.col(0) = xi;
  for (std::size_t i = 0; i + 1 < grid.nodes(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    const Eigen::VectorXd uk = u.at(i);
    values.col(k + 1) =
        detail::rk4_step(model, grid.time(i), dt, values.col(k), uk).next;
    if (!values.col(k + 1).allFinite()) {
      throw BlowUp("state integration of " + model.name + " diverged", i + 1);
    }
  }
  return {grid, std::move(values)};
}

SampledPath integrate_variation(const ModelSpec &model, const SampledPath &x,
                                const ControlPath &u, const Eigen::VectorXd &v0,
                                const std::optional<SampledPath> &forcing) {
  check_control(model, u);
  if (x.grid() != u.grid() ||
      x.dim() != model.state_dim || v0.size() != model.state_dim) {
    throw GridMismatch("variation: state, control and v0 disagree");
  }
  if (forcing && (forcing->grid() != x.grid() || forcing->dim() != x.dim())) {
    throw GridMismatch("variation: forcing must match the state path");
  }
  const TimeGrid &grid = x.grid();
  const double dt = grid.dt();
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(model.state_dim);
  Eigen::MatrixXd values(model.state_dim, static_cast<Eigen::Index>(grid.nodes()));
  values.col(0) = v0;
  for (std::size_t i = 0; i + 1 < grid.nodes(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    const Eigen::VectorXd uk = u.at(i);
    const Eigen::VectorXd xk = x.at(i);
    const auto step = detail::rk4_step(model, grid.time(i), dt, xk, uk);
    Eigen::VectorXd r0 = zero, r1 = zero;
    if (forcing) {
      r0 = forcing->at(i);
      r1 = forcing->at(i + 1);
    }
    const Eigen::VectorXd rm = 0.5 * (r0 + r1);
    values.col(k + 1) = detail::rk4_tangent(model, step, uk, values.col(k), r0, rm, r1);
    if (!values.col(k + 1).allFinite()) {
      throw BlowUp("variational integration diverged", i + 1);
    }
  }
  return {grid, std::move(values)};
}

EnergyDiagnostic energy_diagnostic(const SampledPath &x, const ControlPath &u) {
  if (x.grid() != u.grid()) {
    throw GridMismatch("energy diagnostic: state and control grids differ");
  }
  const TimeGrid &grid = x.grid();
  const double dt = grid.dt();
  double sup_x = 0.0;
  for (std::size_t i = 0; i < grid.nodes(); ++i) {
    sup_x = std::max(sup_x, x.at(i).lpNorm<Eigen::Infinity>());
  }
  double u_sq = 0.0;
  double xdot_sq = 0.0;
  for (std::size_t i = 0; i + 1 < grid.nodes(); ++i) {
    u_sq += dt * u.at(i).squaredNorm();
    xdot_sq += dt * ((x.at(i + 1) - x.at(i)) / dt).squaredNorm();
  }
  const double u_l2 = std::sqrt(u_sq);
  return {sup_x / (1.0 + u_l2), std::sqrt(xdot_sq) / (1.0 + u_l2 * u_l2)};
}

} // namespace assim
