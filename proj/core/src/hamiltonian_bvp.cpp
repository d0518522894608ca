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


#include "assim/hamiltonian_bvp.hpp"

#include "assim/errors.hpp"
#include "parallel.hpp"
#include "rk4.hpp"

#include <cmath>
#include <exception>
#include <limits>
#include <optional>

namespace assim {

namespace {

constexpr int kCostateFixedPointIters = 50;
constexpr double kCostateFixedPointTol = 1e-14;
constexpr int kNewtonBacktracks = 30;

Eigen::MatrixXd gain_at(const ModelSpec &model, double t, const Eigen::VectorXd &x) {
  return model.constant_gain ? *model.constant_gain : model.gain(t, x);
}

double terminal_norm(const HamiltonianPath &path) {
  return path.costate.at(path.costate.size() - 1).lpNorm<Eigen::Infinity>();
}

} // namespace

void ShootingConfig::validate() const {
  if (newton_max_iters < 0 || !(newton_tol > 0.0) || !(fd_step > 0.0)) {
    throw InvalidParameter("shooting tolerances must be positive");
  }
  if (!(damping > 0.0 && damping <= 1.0)) {
    throw InvalidParameter("shooting damping must lie in (0, 1]");
  }
}

HamiltonianPath integrate_hamiltonian(const ModelSpec &model, const CostSpec &cost,
                                      const ObservationPath &eta,
                                      const Eigen::VectorXd &xi,
                                      const Eigen::VectorXd &lambda0,
                                      const ControlSetSpec &set) {
  if (!cost.control_weight) {
    throw UnsupportedSpec("hamiltonian system needs a quadratic control cost");
  }
  const int n = model.state_dim;
  if (xi.size() != n || lambda0.size() != n || cost.state_dim != n ||
      eta.path.dim() != cost.obs_dim) {
    throw GridMismatch("hamiltonian system: dimensions disagree");
  }
  const TimeGrid &grid = eta.path.grid();
  const double dt = grid.dt();
  const std::size_t last = grid.nodes() - 1;
  const auto cols = static_cast<Eigen::Index>(grid.nodes());
  Eigen::MatrixXd xs(n, cols), ls(n, cols), us(model.control_dim, cols);

  const auto control = [&](std::size_t k, const Eigen::VectorXd &x,
                           const Eigen::VectorXd &lam) {
    const Eigen::MatrixXd w =
        0.5 * (cost.control_weight(grid.time(k)) + cost.control_weight(grid.time(k + 1)));
    return minimize_quadratic(w, gain_at(model, grid.time(k), x).transpose() * lam, set);
  };

  xs.col(0) = xi;
  ls.col(0) = lambda0;
  us.col(0) = control(0, xi, lambda0);
  auto step = detail::rk4_step(model, 0.0, dt, xi, us.col(0));
  auto jac = detail::rk4_jacobians(model, step, us.col(0));
  Eigen::VectorXd p = jac.forcing.transpose().partialPivLu().solve(dt * lambda0);
  xs.col(1) = step.next;

  for (std::size_t k = 1; k < last; ++k) {
    const auto c = static_cast<Eigen::Index>(k);
    const double t = grid.time(k);
    const Eigen::VectorXd xk = xs.col(c);
    if (!xk.allFinite() || !p.allFinite()) {
      throw BlowUp("hamiltonian system diverged", k);
    }
    const Eigen::VectorXd fixed =
        p - 0.5 * dt * cost.running_dx(t, xk, us.col(c - 1)) -
        cost.stochastic_dx(t, xk).transpose() * (eta.path.at(k + 1) - eta.path.at(k));
    Eigen::VectorXd lam = ls.col(c - 1);
    Eigen::VectorXd u;
    Eigen::VectorXd p_next;
    for (int it = 0; it < kCostateFixedPointIters; ++it) {
      u = control(k, xk, lam);
      step = detail::rk4_step(model, t, dt, xk, u);
      jac = detail::rk4_jacobians(model, step, u);
      p_next = jac.state.transpose().partialPivLu().solve(
          fixed - 0.5 * dt * cost.running_dx(t, xk, u));
      const Eigen::VectorXd lam_new = jac.forcing.transpose() * p_next / dt;
      const double change = (lam_new - lam).lpNorm<Eigen::Infinity>();
      lam = lam_new;
      if (!(change > kCostateFixedPointTol * (1.0 + lam.lpNorm<Eigen::Infinity>()))) {
        break;
      }
    }
    ls.col(c) = lam;
    us.col(c) = u;
    xs.col(c + 1) = step.next;
    p = p_next;
  }

  const auto end = static_cast<Eigen::Index>(last);
  const Eigen::VectorXd x_end = xs.col(end);
  if (!x_end.allFinite() || !p.allFinite()) {
    throw BlowUp("hamiltonian system diverged", last);
  }
  ls.col(end) = p - 0.5 * dt * cost.running_dx(grid.time(last), x_end, us.col(end - 1));
  us.col(end) = minimize_quadratic(cost.control_weight(grid.time(last)),
                                   Eigen::VectorXd::Zero(model.control_dim), set);
  if (!ls.col(end).allFinite()) {
    throw BlowUp("hamiltonian system diverged", last);
  }
  return {SampledPath(grid, std::move(xs)), ControlPath(grid, std::move(us)),
          SampledPath(grid, std::move(ls))};
}

ShootingResult shoot(const ModelSpec &model, const CostSpec &cost,
                     const ObservationPath &eta, const Eigen::VectorXd &xi,
                     const Eigen::VectorXd &lambda0_guess,
                     const ShootingConfig &config, const ControlSetSpec &set) {
  config.validate();
  const Eigen::Index n = lambda0_guess.size();
  const auto residual = [&](const Eigen::VectorXd &l0) -> std::optional<Eigen::VectorXd> {
    try {
      const HamiltonianPath path = integrate_hamiltonian(model, cost, eta, xi, l0, set);
      return Eigen::VectorXd(path.costate.at(path.costate.size() - 1));
    } catch (const BlowUp &) {
      return std::nullopt;
    }
  };

  Eigen::VectorXd l0 = lambda0_guess;
  auto f = residual(l0);
  if (!f) {
    throw NoConvergence("shooting: initial guess blows up",
                        std::numeric_limits<double>::infinity());
  }
  double norm = f->lpNorm<Eigen::Infinity>();
  int iter = 0;
  while (!(norm < config.newton_tol)) {
    if (iter >= config.newton_max_iters) {
      throw NoConvergence("shooting: Newton iteration limit reached", norm);
    }
    Eigen::MatrixXd jac(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double h = config.fd_step * (1.0 + std::abs(l0(j)));
      Eigen::VectorXd lp = l0, lm = l0;
      lp(j) += h;
      lm(j) -= h;
      const auto fp = residual(lp);
      const auto fm = residual(lm);
      if (!fp || !fm) {
        throw NoConvergence("shooting: Jacobian probe blows up", norm);
      }
      jac.col(j) = (*fp - *fm) / (2.0 * h);
    }
    const Eigen::VectorXd delta = -jac.colPivHouseholderQr().solve(*f);
    if (!delta.allFinite()) {
      throw NoConvergence("shooting: singular Jacobian", norm);
    }
    double alpha = config.damping;
    bool moved = false;
    for (int b = 0; b < kNewtonBacktracks; ++b, alpha *= 0.5) {
      const Eigen::VectorXd trial = l0 + alpha * delta;
      auto ft = residual(trial);
      if (ft && ft->lpNorm<Eigen::Infinity>() < norm) {
        l0 = trial;
        f = std::move(ft);
        norm = f->lpNorm<Eigen::Infinity>();
        moved = true;
        break;
      }
    }
    ++iter;
    if (!moved) {
      throw NoConvergence("shooting: Newton step does not reduce the residual", norm);
    }
  }

  const HamiltonianPath path = integrate_hamiltonian(model, cost, eta, xi, l0, set);
  Costate costate = solve_costate(model, cost, path.state, path.control, eta);
  const double value = eval_cost(cost, path.state, path.control, eta);
  return {OptimalTriple{path.state, path.control, std::move(costate.path)},
          l0,
          std::move(costate.initial_sensitivity),
          terminal_norm(path),
          value,
          iter};
}

ValueProbe value_probe(const ModelSpec &model, const CostSpec &cost,
                       const ObservationPath &eta, const Eigen::VectorXd &xi,
                       double h, const ValueProbeOptions &options) {
  if (!(h > 0.0)) {
    throw InvalidParameter("value probe step must be positive");
  }
  struct Solve {
    double value = 0.0;
    Eigen::VectorXd sensitivity;
    ControlPath control;
    Eigen::VectorXd lambda0;
  };
  const TimeGrid &grid = eta.path.grid();
  const auto solve = [&](const Eigen::VectorXd &z, const ControlPath &u0,
                         const Eigen::VectorXd &guess) -> Solve {
    if (options.solver == ValueSolver::shoot) {
      ShootingResult r = shoot(model, cost, eta, z, guess, options.shooting, options.set);
      return {r.cost, r.initial_sensitivity, r.triple.control, r.lambda0};
    }
    AssimilationResult r = minimize(model, cost, eta, z, u0, options.set, options.optimizer);
    if (r.status != OptimizerStatus::converged) {
      throw NoConvergence("value probe: optimizer ended with status " + to_string(r.status),
                          r.grad_norm_trace.empty() ? 0.0 : r.grad_norm_trace.back());
    }
    return {r.cost, r.initial_sensitivity, r.triple.control, r.triple.costate.at(0)};
  };

  const int n = model.state_dim;
  const Solve center = solve(xi, ControlPath::zeros(grid, model.control_dim),
                             Eigen::VectorXd::Zero(n));
  std::vector<std::optional<Solve>> side(static_cast<std::size_t>(2 * n));
  std::vector<std::exception_ptr> errors(side.size());
  detail::parallel_for(2 * n, options.jobs, [&](int k) {
    try {
      Eigen::VectorXd z = xi;
      z(k / 2) += (k % 2 == 0 ? h : -h);
      side[static_cast<std::size_t>(k)] = solve(z, center.control, center.lambda0);
    } catch (...) {
      errors[static_cast<std::size_t>(k)] = std::current_exception();
    }
  });
  for (const auto &e : errors) {
    if (e) {
      std::rethrow_exception(e);
    }
  }

  ValueProbe out;
  out.value = center.value;
  out.lambda0 = center.sensitivity;
  out.dv_fd.resize(n);
  for (int i = 0; i < n; ++i) {
    out.dv_fd(i) = (side[static_cast<std::size_t>(2 * i)]->value -
                    side[static_cast<std::size_t>(2 * i + 1)]->value) /
                   (2.0 * h);
  }
  out.max_abs_gap = (out.dv_fd - out.lambda0).lpNorm<Eigen::Infinity>();
  return out;
}

} // namespace assim
