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


#include "assim/optimizer.hpp"

#include "assim/errors.hpp"
#include "assim/rng.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <optional>
#include <utility>

namespace assim {

namespace {

constexpr std::size_t kStallWindow = 50;

struct Iterate {
  ControlPath u;
  SampledPath x;
  double cost;
};

double sup_norm(const Eigen::MatrixXd &m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

Eigen::MatrixXd project_columns(const Eigen::MatrixXd &v, const ControlSetSpec &set) {
  if (set.kind == ControlSetSpec::Kind::all_space) {
    return v;
  }
  Eigen::MatrixXd out(v.rows(), v.cols());
  for (Eigen::Index i = 0; i < v.cols(); ++i) {
    out.col(i) = set.project(v.col(i));
  }
  return out;
}

Eigen::MatrixXd direction(const CostSpec &cost, const SampledPath &grad,
                          const OptimizerConfig &config) {
  if (!config.precondition || !cost.control_weight) {
    return grad.values();
  }
  Eigen::MatrixXd d(grad.dim(), static_cast<Eigen::Index>(grad.size()));
  for (std::size_t i = 0; i < grad.size(); ++i) {
    d.col(static_cast<Eigen::Index>(i)) =
        cost.control_weight(grad.grid().time(i)).llt().solve(grad.at(i));
  }
  return d;
}

std::optional<Iterate> evaluate(const ModelSpec &model, const CostSpec &cost,
                                const ObservationPath &eta, const Eigen::VectorXd &xi,
                                ControlPath u) {
  try {
    SampledPath x = integrate_state(model, u, xi);
    const double j = eval_cost(cost, x, u, eta);
    if (!std::isfinite(j)) {
      return std::nullopt;
    }
    return Iterate{std::move(u), std::move(x), j};
  } catch (const BlowUp &) {
    return std::nullopt;
  } catch (const InvalidParameter &) {
    // Non-finite running cost at a trial point.
    return std::nullopt;
  }
}

} // namespace

void OptimizerConfig::validate() const {
  if (max_iters < 0) {
    throw InvalidParameter("optimizer.max_iters must be nonnegative");
  }
  if (!(grad_tol > 0.0) || !(step_init > 0.0) || !(min_step > 0.0)) {
    throw InvalidParameter("optimizer tolerances and steps must be positive");
  }
  if (!(armijo_c > 0.0 && armijo_c < 1.0) ||
      !(armijo_shrink > 0.0 && armijo_shrink < 1.0)) {
    throw InvalidParameter("armijo parameters must lie in (0, 1)");
  }
  if (multistart < 1 || jobs < 1) {
    throw InvalidParameter("multistart and jobs must be at least 1");
  }
  if (!(multistart_scale >= 0.0)) {
    throw InvalidParameter("multistart_scale must be nonnegative");
  }
}

std::string to_string(OptimizerStatus status) {
  switch (status) {
  case OptimizerStatus::converged:
    return "converged";
  case OptimizerStatus::stalled:
    return "stalled";
  case OptimizerStatus::max_iters:
    break;
  }
  return "max_iters";
}

AssimilationResult minimize(const ModelSpec &model, const CostSpec &cost,
                            const ObservationPath &eta, const Eigen::VectorXd &xi,
                            const ControlPath &u0, const ControlSetSpec &set,
                            const OptimizerConfig &config) {
  config.validate();
  set.validate(model.control_dim);
  const TimeGrid &grid = u0.grid();
  const double dt = grid.dt();
  const Eigen::Index body = static_cast<Eigen::Index>(grid.steps());

  auto start = evaluate(model, cost, eta, xi, project_control(u0, set));
  if (!start) {
    throw BlowUp("initial control is not admissible", 0);
  }
  Iterate cur = std::move(*start);
  Costate costate = solve_costate(model, cost, cur.x, cur.u, eta, config.scheme);
  SampledPath grad = control_gradient(model, cost, cur.x, cur.u, costate);

  std::vector<double> cost_trace{cur.cost};
  std::vector<double> grad_trace;
  int iterations = 0;
  OptimizerStatus status = OptimizerStatus::max_iters;
  std::optional<Eigen::MatrixXd> prev_u, prev_g;
  for (;;) {
    const double pg =
        sup_norm(cur.u.values() - project_columns(cur.u.values() - grad.values(), set));
    grad_trace.push_back(pg);
    if (pg < config.grad_tol) {
      status = OptimizerStatus::converged;
      break;
    }
    if (iterations >= config.max_iters) {
      status = OptimizerStatus::max_iters;
      break;
    }
    // Accepted steps that no longer reduce the projected gradient mean the
    // iterates sit at the rounding floor of the cost.
    if (grad_trace.size() > kStallWindow &&
        *std::min_element(grad_trace.end() - kStallWindow, grad_trace.end()) >=
            grad_trace[grad_trace.size() - kStallWindow - 1]) {
      status = OptimizerStatus::stalled;
      break;
    }

    double alpha = config.step_init;
    if (config.bb_step && prev_u) {
      const Eigen::MatrixXd s = cur.u.values() - *prev_u;
      const Eigen::MatrixXd y = grad.values() - *prev_g;
      const double sy = (s.array() * y.array()).sum();
      if (sy > 0.0) {
        alpha = std::clamp(s.squaredNorm() / sy, config.min_step, 1e6 * config.step_init);
      }
    }
    const Eigen::MatrixXd dir = direction(cost, grad, config);
    // Below this the change in A is lost in rounding and the sufficient
    // decrease test is replaced by a test on the slope at the trial point.
    const double noise = 8.0 * std::numeric_limits<double>::epsilon() * std::abs(cur.cost);
    const auto slope_along = [&](const SampledPath &g, const Eigen::MatrixXd &step) {
      return dt * (g.values().leftCols(body).array() * step.leftCols(body).array()).sum();
    };
    std::optional<Iterate> accepted;
    std::optional<std::pair<Costate, SampledPath>> accepted_grad;
    while (alpha >= config.min_step) {
      Eigen::MatrixXd trial = project_columns(cur.u.values() - alpha * dir, set);
      const Eigen::MatrixXd step = trial - cur.u.values();
      if (step.isZero(0.0)) {
        break;
      }
      const double slope = slope_along(grad, step);
      auto next = evaluate(model, cost, eta, xi, ControlPath(grid, std::move(trial)));
      if (next && next->cost <= cur.cost) {
        if (cur.cost - next->cost > noise) {
          if (next->cost <= cur.cost + config.armijo_c * slope) {
            accepted = std::move(next);
            break;
          }
        } else if (slope < 0.0) {
          Costate c = solve_costate(model, cost, next->x, next->u, eta, config.scheme);
          SampledPath g = control_gradient(model, cost, next->x, next->u, c);
          if (slope_along(g, step) <= (1.0 - 2.0 * config.armijo_c) * -slope) {
            accepted = std::move(next);
            accepted_grad.emplace(std::move(c), std::move(g));
            break;
          }
        }
      }
      alpha *= config.armijo_shrink;
    }
    if (!accepted) {
      status = OptimizerStatus::stalled;
      break;
    }
    prev_u = cur.u.values();
    prev_g = grad.values();
    cur = std::move(*accepted);
    if (accepted_grad) {
      costate = std::move(accepted_grad->first);
      grad = std::move(accepted_grad->second);
    } else {
      costate = solve_costate(model, cost, cur.x, cur.u, eta, config.scheme);
      grad = control_gradient(model, cost, cur.x, cur.u, costate);
    }
    ++iterations;
    cost_trace.push_back(cur.cost);
  }

  AssimilationResult res{
      OptimalTriple{std::move(cur.x), std::move(cur.u), std::move(costate.path)},
      std::move(cost_trace),
      std::move(grad_trace),
      0.0,
      iterations,
      status,
      cur.cost,
      std::move(costate.initial_sensitivity),
      0};
  res.mp_residual = max_principle_residual(res.triple, cost, model, set).value;
  return res;
}

AssimilationResult minimize_multistart(const ModelSpec &model, const CostSpec &cost,
                                       const ObservationPath &eta,
                                       const Eigen::VectorXd &xi,
                                       const ControlPath &u0,
                                       const ControlSetSpec &set,
                                       const OptimizerConfig &config) {
  config.validate();
  const int starts = config.multistart;
  std::vector<std::optional<AssimilationResult>> results(static_cast<std::size_t>(starts));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(starts));

  const auto run = [&](int k) {
    try {
      ControlPath init = u0;
      if (k > 0) {
        const CounterRng rng = CounterRng(config.seed).split(static_cast<std::uint64_t>(k));
        Eigen::MatrixXd v = u0.values();
        for (Eigen::Index i = 0; i < v.size(); ++i) {
          v(i) += config.multistart_scale * rng.gaussian(static_cast<std::uint64_t>(i));
        }
        init = ControlPath(u0.grid(), std::move(v));
      }
      AssimilationResult r = minimize(model, cost, eta, xi, init, set, config);
      r.start_index = k;
      results[static_cast<std::size_t>(k)] = std::move(r);
    } catch (...) {
      errors[static_cast<std::size_t>(k)] = std::current_exception();
    }
  };

  detail::parallel_for(starts, config.jobs, run);

  std::optional<std::size_t> best;
  for (std::size_t k = 0; k < results.size(); ++k) {
    if (results[k] && (!best || results[k]->cost < results[*best]->cost)) {
      best = k;
    }
  }
  if (!best) {
    std::rethrow_exception(errors.front());
  }
  return std::move(*results[*best]);
}

} // namespace assim
