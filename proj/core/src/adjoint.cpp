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


#include "assim/adjoint.hpp"

#include "assim/errors.hpp"
#include "assim/rng.hpp"
#include "rk4.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace assim {

namespace {

void check_process(const ModelSpec &model, const CostSpec &cost,
                   const SampledPath &x, const ControlPath &u) {
  if (x.grid() != u.grid()) {
    throw GridMismatch("state and control grids differ");
  }
  if (x.dim() != model.state_dim || u.dim() != model.control_dim ||
      cost.state_dim != model.state_dim || cost.control_dim != model.control_dim) {
    throw GridMismatch("model, cost and paths disagree on dimensions");
  }
}

Eigen::MatrixXd gain_at(const ModelSpec &model, double t, const Eigen::VectorXd &x) {
  return model.constant_gain ? *model.constant_gain : model.gain(t, x);
}

Costate discrete_sweep(const ModelSpec &model, const CostSpec &cost,
                       const SampledPath &x, const ControlPath &u,
                       const ObservationPath &eta) {
  const TimeGrid &grid = x.grid();
  const double dt = grid.dt();
  const std::size_t last = grid.nodes() - 1;
  const auto cols = static_cast<Eigen::Index>(grid.nodes());
  Eigen::MatrixXd lambda = Eigen::MatrixXd::Zero(model.state_dim, cols);
  Eigen::MatrixXd pull = Eigen::MatrixXd::Zero(model.control_dim, cols);

  Eigen::VectorXd p =
      0.5 * dt * cost.running_dx(grid.time(last), x.at(last), u.at(last - 1));
  for (std::size_t k = last; k-- > 0;) {
    const double t = grid.time(k);
    const Eigen::VectorXd xk = x.at(k);
    const Eigen::VectorXd uk = u.at(k);
    const auto step = detail::rk4_step(model, t, dt, xk, uk);
    const auto back = detail::rk4_pullback(model, step, uk, p);
    const auto col = static_cast<Eigen::Index>(k);
    lambda.col(col) = back.forcing / dt;
    pull.col(col) = back.control / dt;

    p = back.state + 0.5 * dt * cost.running_dx(t, xk, uk) +
        cost.stochastic_dx(t, xk).transpose() * (eta.path.at(k + 1) - eta.path.at(k));
    if (k > 0) {
      p += 0.5 * dt * cost.running_dx(t, xk, u.at(k - 1));
    }
    if (!p.allFinite()) {
      throw BlowUp("costate sweep diverged", k);
    }
  }
  return {SampledPath(grid, std::move(lambda)), SampledPath(grid, std::move(pull)), p};
}

Costate heun_sweep(const ModelSpec &model, const CostSpec &cost,
                   const SampledPath &x, const ControlPath &u,
                   const ObservationPath &eta) {
  const TimeGrid &grid = x.grid();
  const double dt = grid.dt();
  const std::size_t last = grid.nodes() - 1;
  const auto cols = static_cast<Eigen::Index>(grid.nodes());
  Eigen::MatrixXd lambda = Eigen::MatrixXd::Zero(model.state_dim, cols);
  Eigen::MatrixXd pull = Eigen::MatrixXd::Zero(model.control_dim, cols);

  for (std::size_t i = last; i-- > 0;) {
    const Eigen::VectorXd ui = u.at(i);
    // Row-covector right-hand side lambda M + D2 phi at node j with u_i.
    const auto rhs = [&](std::size_t j, const Eigen::VectorXd &lam) -> Eigen::VectorXd {
      const double t = grid.time(j);
      const Eigen::VectorXd xj = x.at(j);
      return model.linearization(t, xj, ui).transpose() * lam +
             cost.running_dx(t, xj, ui);
    };
    const Eigen::VectorXd next = lambda.col(static_cast<Eigen::Index>(i + 1));
    const Eigen::VectorXd young =
        cost.stochastic_dx(grid.time(i), x.at(i)).transpose() *
        (eta.path.at(i + 1) - eta.path.at(i));
    const Eigen::VectorXd f_next = rhs(i + 1, next);
    const Eigen::VectorXd predictor = next + dt * f_next + young;
    const Eigen::VectorXd value = next + 0.5 * dt * (f_next + rhs(i, predictor)) + young;
    if (!value.allFinite()) {
      throw BlowUp("costate recursion diverged", i);
    }
    const auto col = static_cast<Eigen::Index>(i);
    lambda.col(col) = value;
    pull.col(col) = gain_at(model, grid.time(i), x.at(i)).transpose() * value;
  }
  Eigen::VectorXd initial = lambda.col(0);
  return {SampledPath(grid, std::move(lambda)), SampledPath(grid, std::move(pull)),
          std::move(initial)};
}

Eigen::VectorXd tagged(const SampledPath &path, std::size_t i, Tag tag) {
  switch (tag) {
  case Tag::right:
    return path.at(i + 1);
  case Tag::midpoint:
    return 0.5 * (path.at(i) + path.at(i + 1));
  case Tag::left:
    break;
  }
  return path.at(i);
}

double pairing_integral(const SampledPath &x, const SampledPath &y, Tag tag) {
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    sum += tagged(x, i, tag).dot(y.at(i + 1) - y.at(i));
  }
  return sum;
}

} // namespace

Costate solve_costate(const ModelSpec &model, const CostSpec &cost,
                      const SampledPath &x, const ControlPath &u,
                      const ObservationPath &eta, CostateScheme scheme) {
  check_process(model, cost, x, u);
  if (eta.path.grid() != x.grid() || eta.path.dim() != cost.obs_dim) {
    throw GridMismatch("observation path does not match the cost or grid");
  }
  if (scheme == CostateScheme::continuous_heun) {
    return heun_sweep(model, cost, x, u, eta);
  }
  return discrete_sweep(model, cost, x, u, eta);
}

double hamiltonian(const CostSpec &cost, const ModelSpec &model, double t,
                   const Eigen::VectorXd &x, const Eigen::VectorXd &lambda,
                   const Eigen::VectorXd &v) {
  return cost.running(t, x, v) + lambda.dot(model.velocity(t, x, v));
}

Eigen::VectorXd hamiltonian_minimizer(const CostSpec &cost, const ModelSpec &model,
                                      double t, const Eigen::VectorXd &x,
                                      const Eigen::VectorXd &lambda,
                                      const ControlSetSpec &set) {
  if (!cost.control_weight) {
    throw UnsupportedSpec("closed-form minimizer needs a quadratic control cost");
  }
  return minimize_quadratic(cost.control_weight(t),
                            gain_at(model, t, x).transpose() * lambda, set);
}

SampledPath control_gradient(const ModelSpec &model, const CostSpec &cost,
                             const SampledPath &x, const ControlPath &u,
                             const Costate &costate) {
  check_process(model, cost, x, u);
  const TimeGrid &grid = x.grid();
  const std::size_t last = grid.nodes() - 1;
  Eigen::MatrixXd g(model.control_dim, static_cast<Eigen::Index>(grid.nodes()));
  for (std::size_t k = 0; k < last; ++k) {
    const Eigen::VectorXd uk = u.at(k);
    g.col(static_cast<Eigen::Index>(k)) =
        0.5 * (cost.running_du(grid.time(k), x.at(k), uk) +
               cost.running_du(grid.time(k + 1), x.at(k + 1), uk)) +
        costate.control_pullback.at(k);
  }
  g.col(static_cast<Eigen::Index>(last)) =
      cost.running_du(grid.time(last), x.at(last), u.at(last));
  return {grid, std::move(g)};
}

SampledPath control_gradient(const ModelSpec &model, const CostSpec &cost,
                             const SampledPath &x, const ControlPath &u,
                             const SampledPath &lambda) {
  check_process(model, cost, x, u);
  const TimeGrid &grid = x.grid();
  Eigen::MatrixXd g(model.control_dim, static_cast<Eigen::Index>(grid.nodes()));
  for (std::size_t i = 0; i < grid.nodes(); ++i) {
    const double t = grid.time(i);
    const Eigen::VectorXd xi = x.at(i);
    g.col(static_cast<Eigen::Index>(i)) =
        cost.running_du(t, xi, u.at(i)) + gain_at(model, t, xi).transpose() * lambda.at(i);
  }
  return {grid, std::move(g)};
}

MpResidual max_principle_residual(const OptimalTriple &triple, const CostSpec &cost,
                                  const ModelSpec &model, const ControlSetSpec &set,
                                  const ResidualProbe &probe) {
  const SampledPath &x = triple.state;
  const ControlPath &u = triple.control;
  const SampledPath &lam = triple.costate;
  check_process(model, cost, x, u);
  const TimeGrid &grid = x.grid();
  const bool closed = probe.mode == ResidualProbe::Mode::closed_form &&
                      static_cast<bool>(cost.control_weight);
  const int m = model.control_dim;
  MpResidual out;
  for (std::size_t i = 0; i < grid.nodes(); ++i) {
    const double t = grid.time(i);
    const Eigen::VectorXd xi = x.at(i);
    const Eigen::VectorXd li = lam.at(i);
    const Eigen::VectorXd ui = u.at(i);
    const double h_u = hamiltonian(cost, model, t, xi, li, ui);
    double h_min = h_u;
    if (closed) {
      h_min = std::min(h_min, hamiltonian(cost, model, t, xi, li,
                                          hamiltonian_minimizer(cost, model, t, xi, li, set)));
    } else {
      const CounterRng rng(probe.seed, i);
      const double radius = 10.0 * (1.0 + ui.norm());
      for (int s = 0; s < probe.sample_count; ++s) {
        const auto base = static_cast<std::uint64_t>(s) * static_cast<std::uint64_t>(m + 1);
        Eigen::VectorXd dir(m);
        for (int c = 0; c < m; ++c) {
          dir(c) = rng.gaussian(base + static_cast<std::uint64_t>(c));
        }
        const double scale =
            radius * std::pow(rng.uniform(base + static_cast<std::uint64_t>(m) + (1ULL << 40)),
                              1.0 / m) /
            std::max(dir.norm(), std::numeric_limits<double>::min());
        const Eigen::VectorXd v = set.project(scale * dir);
        h_min = std::min(h_min, hamiltonian(cost, model, t, xi, li, v));
      }
    }
    const double gap = h_u - h_min;
    if (gap > out.value) {
      out = {gap, i};
    }
  }
  return out;
}

DualityResult duality_check(const SampledPath &m, const SampledPath &a,
                            const SampledPath &b, const Eigen::VectorXd &zeta0,
                            const Eigen::VectorXd &lambda_t, Tag tag) {
  const TimeGrid &grid = m.grid();
  const int n = static_cast<int>(zeta0.size());
  if (m.rows() != n || m.cols() != n || a.dim() != n || b.dim() != n ||
      lambda_t.size() != n) {
    throw GridMismatch("duality check: dimensions disagree");
  }
  if (a.grid() != grid || b.grid() != grid) {
    throw GridMismatch("duality check: paths need one grid");
  }
  const double dt = grid.dt();
  const std::size_t last = grid.nodes() - 1;
  const auto cols = static_cast<Eigen::Index>(grid.nodes());
  const Eigen::MatrixXd av = a.values().colwise() - a.values().col(0);
  const Eigen::MatrixXd bv = b.values().colwise() - b.values().col(cols - 1);

  Eigen::MatrixXd z(n, cols);
  z.col(0) = zeta0;
  for (std::size_t i = 0; i < last; ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    const Eigen::VectorXd da = av.col(k + 1) - av.col(k);
    const Eigen::VectorXd zk = z.col(k);
    const Eigen::VectorXd pred = zk + dt * (m.matrix_at(i) * zk) + da;
    z.col(k + 1) = zk + 0.5 * dt * (m.matrix_at(i) * zk + m.matrix_at(i + 1) * pred) + da;
  }
  Eigen::MatrixXd l(n, cols);
  l.col(cols - 1) = lambda_t;
  for (std::size_t i = last; i-- > 0;) {
    const auto k = static_cast<Eigen::Index>(i);
    const Eigen::VectorXd db = bv.col(k + 1) - bv.col(k);
    const Eigen::VectorXd lk = l.col(k + 1);
    const Eigen::VectorXd f_next = m.matrix_at(i + 1).transpose() * lk;
    const Eigen::VectorXd pred = lk + dt * f_next - db;
    l.col(k) = lk + 0.5 * dt * (f_next + m.matrix_at(i).transpose() * pred) - db;
  }
  SampledPath zeta(grid, std::move(z));
  SampledPath lambda(grid, std::move(l));
  const SampledPath a0(grid, av);
  const SampledPath b0(grid, bv);
  const double residual =
      std::abs(lambda.at(last).dot(zeta.at(last)) - lambda.at(0).dot(zeta.at(0)) -
               pairing_integral(zeta, b0, tag) - pairing_integral(lambda, a0, tag));
  return {residual, std::move(zeta), std::move(lambda)};
}

} // namespace assim
