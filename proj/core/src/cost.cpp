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


#include "assim/cost.hpp"

#include "assim/errors.hpp"
#include "assim/rng.hpp"

#include <cmath>
#include <utility>

namespace assim {

namespace {

constexpr double kSymmetryTol = 1e-10;
constexpr double kMaxGainCondition = 1e8;
constexpr int kGainProbes = 16;

void require_symmetric(const Eigen::MatrixXd &m, const char *what) {
  const double scale = 1.0 + m.cwiseAbs().maxCoeff();
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol * scale) {
    throw InvalidParameter(std::string(what) + " must be symmetric");
  }
}

double smallest_eigenvalue(const Eigen::MatrixXd &m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

void check_dims(const CostSpec &cost, const SampledPath &x, const ControlPath &u,
                const ObservationPath &eta) {
  if (x.grid() != u.grid() || x.grid() != eta.path.grid()) {
    throw GridMismatch("cost: state, control and observations need one grid");
  }
  if (x.dim() != cost.state_dim || u.dim() != cost.control_dim ||
      eta.path.dim() != cost.obs_dim) {
    throw GridMismatch("cost: path dimensions do not match " + cost.name);
  }
}

double checked(double value, std::size_t node) {
  if (!std::isfinite(value)) {
    throw InvalidParameter("running cost is not finite at node " +
                           std::to_string(node));
  }
  return value;
}

CostSpec quadratic_cost(const QuadraticCostSpec &q, std::string name,
                        std::function<Eigen::MatrixXd(double)> weight,
                        std::function<double(double, const Eigen::VectorXd &)> extra) {
  CostSpec c;
  c.name = std::move(name);
  c.state_dim = q.h.state_dim;
  c.control_dim = q.control_dim;
  c.obs_dim = q.h.obs_dim;
  const ObservationOperator h = q.h;
  const auto r = q.R;
  c.running = [h, r, weight, extra](double t, const Eigen::VectorXd &x,
                                    const Eigen::VectorXd &u) {
    const Eigen::VectorXd hx = h.value(t, x);
    double value = 0.5 * hx.dot(r(t) * hx) + 0.5 * u.dot(weight(t) * u);
    if (extra) {
      value += extra(t, x);
    }
    return value;
  };
  c.running_dx = [h, r](double t, const Eigen::VectorXd &x,
                        const Eigen::VectorXd &) -> Eigen::VectorXd {
    return h.jacobian(t, x).transpose() * (r(t) * h.value(t, x));
  };
  c.running_du = [weight](double t, const Eigen::VectorXd &,
                          const Eigen::VectorXd &u) -> Eigen::VectorXd {
    return weight(t) * u;
  };
  c.stochastic = [h, r](double t, const Eigen::VectorXd &x) -> Eigen::VectorXd {
    return -(r(t).transpose() * h.value(t, x));
  };
  c.stochastic_dx = [h, r](double t, const Eigen::VectorXd &x) -> Eigen::MatrixXd {
    return -(r(t).transpose() * h.jacobian(t, x));
  };
  if (q.R_rate) {
    const auto r_rate = q.R_rate;
    c.stochastic_dt = [h, r, r_rate](double t,
                                     const Eigen::VectorXd &x) -> Eigen::VectorXd {
      Eigen::VectorXd out = -(r_rate(t).transpose() * h.value(t, x));
      if (h.time_derivative) {
        out -= r(t).transpose() * h.time_derivative(t, x);
      }
      return out;
    };
  }
  c.control_weight = std::move(weight);
  return c;
}

} // namespace

ObservationOperator coordinate_projection(const std::vector<int> &indices,
                                          int state_dim) {
  if (indices.empty()) {
    throw InvalidParameter("observation index list is empty");
  }
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(indices.size()),
                                            state_dim);
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] < 0 || indices[k] >= state_dim) {
      throw InvalidParameter("observation index " + std::to_string(indices[k]) +
                             " is out of range");
    }
    p(static_cast<Eigen::Index>(k), indices[k]) = 1.0;
  }
  ObservationOperator h;
  h.obs_dim = static_cast<int>(indices.size());
  h.state_dim = state_dim;
  h.value = [p](double, const Eigen::VectorXd &x) -> Eigen::VectorXd { return p * x; };
  h.jacobian = [p](double, const Eigen::VectorXd &) { return p; };
  return h;
}

ObservationOperator full_state(int state_dim) {
  std::vector<int> all(static_cast<std::size_t>(state_dim));
  for (int i = 0; i < state_dim; ++i) {
    all[static_cast<std::size_t>(i)] = i;
  }
  return coordinate_projection(all, state_dim);
}

QuadraticCostSpec QuadraticCostSpec::constant(ObservationOperator h,
                                              const Eigen::MatrixXd &r,
                                              const Eigen::MatrixXd &s) {
  QuadraticCostSpec q;
  q.control_dim = static_cast<int>(s.rows());
  q.R = [r](double) { return r; };
  q.S = [s](double) { return s; };
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(r.rows(), r.cols());
  q.R_rate = [zero](double) { return zero; };
  q.h = std::move(h);
  return q;
}

void QuadraticCostSpec::validate() const {
  if (!h.value || !h.jacobian || h.obs_dim < 1 || h.state_dim < 1) {
    throw InvalidParameter("quadratic cost needs an observation operator");
  }
  if (!R || !S || control_dim < 1) {
    throw InvalidParameter("quadratic cost needs R, S and a control dimension");
  }
  if (!(s_floor > 0.0)) {
    throw InvalidParameter("S floor must be positive");
  }
  for (const double t : check_times) {
    const Eigen::MatrixXd r = R(t);
    const Eigen::MatrixXd s = S(t);
    if (r.rows() != h.obs_dim || r.cols() != h.obs_dim) {
      throw InvalidParameter("R must be d x d");
    }
    if (s.rows() != control_dim || s.cols() != control_dim) {
      throw InvalidParameter("S must be m x m");
    }
    require_symmetric(r, "R");
    require_symmetric(s, "S");
    if (smallest_eigenvalue(r) < -kSymmetryTol * (1.0 + r.norm())) {
      throw InvalidParameter("R must be nonnegative definite");
    }
    if (smallest_eigenvalue(s) < s_floor) {
      throw InvalidParameter("S is not uniformly positive definite");
    }
  }
}

CostSpec build_minimum_energy(const QuadraticCostSpec &q) {
  q.validate();
  return quadratic_cost(q, "minimum_energy", q.S, {});
}

CostSpec build_onsager_machlup(const OnsagerMachlupSpec &om) {
  const ModelSpec &model = om.model;
  const int n = model.state_dim;
  if (model.control_dim != n) {
    throw UnsupportedSpec("onsager-machlup needs a square gain");
  }
  const CounterRng rng(0x6f6d, 0);
  const Eigen::MatrixXd g0 = model.gain(0.0, Eigen::VectorXd::Zero(n));
  for (int k = 0; k < kGainProbes; ++k) {
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) {
      x(i) = 10.0 * rng.gaussian(static_cast<std::uint64_t>(k * (n + 1) + i));
    }
    const double t = 10.0 * rng.uniform(static_cast<std::uint64_t>(1000000 + k));
    if ((model.gain(t, x) - g0).cwiseAbs().maxCoeff() >
        1e-12 * (1.0 + g0.cwiseAbs().maxCoeff())) {
      throw UnsupportedSpec("onsager-machlup needs a gain independent of (t, x)");
    }
  }
  const Eigen::MatrixXd ggt = g0 * g0.transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(ggt);
  const auto &sv = svd.singularValues();
  if (!(sv(n - 1) > 0.0) || sv(0) / sv(n - 1) > kMaxGainCondition) {
    throw UnsupportedSpec("g g^T is singular or badly conditioned");
  }
  const Eigen::MatrixXd gamma = ggt.inverse();
  auto divergence = om.divergence ? om.divergence : model.divergence;
  if (!divergence) {
    throw UnsupportedSpec("onsager-machlup needs the divergence of the drift");
  }
  QuadraticCostSpec base = om.base;
  base.control_dim = n;
  base.S = [gamma](double) { return gamma; };
  base.validate();
  return quadratic_cost(
      base, "onsager_machlup", base.S,
      [divergence](double t, const Eigen::VectorXd &x) { return -divergence(t, x); });
}

CostBreakdown eval_cost_breakdown(const CostSpec &cost, const SampledPath &x,
                                  const ControlPath &u, const ObservationPath &eta) {
  check_dims(cost, x, u, eta);
  const TimeGrid &grid = x.grid();
  const double dt = grid.dt();
  CostBreakdown out;
  for (std::size_t i = 0; i + 1 < grid.nodes(); ++i) {
    const Eigen::VectorXd ui = u.at(i);
    const double left = checked(cost.running(grid.time(i), x.at(i), ui), i);
    const double right =
        checked(cost.running(grid.time(i + 1), x.at(i + 1), ui), i + 1);
    out.deterministic += 0.5 * dt * (left + right);
    out.stochastic += cost.stochastic(grid.time(i), x.at(i))
                          .dot(eta.path.at(i + 1) - eta.path.at(i));
  }
  return out;
}

double eval_cost(const CostSpec &cost, const SampledPath &x, const ControlPath &u,
                 const ObservationPath &eta) {
  return eval_cost_breakdown(cost, x, u, eta).total();
}

double eval_cost_by_parts(const CostSpec &cost, const ModelSpec &model,
                          const SampledPath &x, const ControlPath &u,
                          const ObservationPath &eta) {
  if (!cost.stochastic_dt) {
    throw UnsupportedSpec("by-parts evaluation needs the time derivative of psi");
  }
  check_dims(cost, x, u, eta);
  const TimeGrid &grid = x.grid();
  const double dt = grid.dt();
  const auto modified = [&](std::size_t node, const Eigen::VectorXd &v) {
    const double t = grid.time(node);
    const Eigen::VectorXd xn = x.at(node);
    const Eigen::VectorXd rate =
        cost.stochastic_dt(t, xn) + cost.stochastic_dx(t, xn) * model.velocity(t, xn, v);
    return checked(cost.running(t, xn, v) - rate.dot(eta.path.at(node)), node);
  };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < grid.nodes(); ++i) {
    const Eigen::VectorXd ui = u.at(i);
    total += 0.5 * dt * (modified(i, ui) + modified(i + 1, ui));
  }
  const std::size_t last = grid.nodes() - 1;
  total += cost.stochastic(grid.time(last), x.at(last)).dot(eta.path.at(last)) -
           cost.stochastic(0.0, x.at(0)).dot(eta.path.at(0));
  return total;
}

} // namespace assim
