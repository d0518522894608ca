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


#include "assim/errors.hpp"
#include "assim/hamiltonian_bvp.hpp"
#include "assim/rng.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace {

using assim::ControlPath;
using assim::ControlSetSpec;
using assim::CostSpec;
using assim::ModelSpec;
using assim::ObservationPath;
using assim::QuadraticCostSpec;
using assim::SampledPath;
using assim::TimeGrid;

const assim::Lorenz63Params kTypical{};

Eigen::MatrixXd scalar(double v) { return Eigen::MatrixXd::Constant(1, 1, v); }

struct Problem {
  ModelSpec model;
  CostSpec cost;
  ObservationPath eta;
  Eigen::VectorXd xi;
};

Problem scalar_lq(double a, int n) {
  const TimeGrid g(1.0, n);
  return {assim::make_linear(scalar(a), scalar(1.0)),
          assim::build_minimum_energy(QuadraticCostSpec::constant(assim::full_state(1), scalar(1.0), scalar(1.0))),
          {SampledPath::zeros(g, 1), 0, 0.0},
          Eigen::VectorXd::Ones(1)};
}

Problem lorenz(double horizon, int n, std::uint64_t seed, double r = 1.0) {
  const TimeGrid g(horizon, n);
  const ModelSpec m = assim::make_lorenz63(kTypical);
  const Eigen::Vector3d x0(-5.8, -8.3, 19.6);
  const SampledPath truth = assim::integrate_state(m, ControlPath::zeros(g, 3), x0);
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(1, n + 1);
  for (int i = 1; i <= n; ++i) {
    z(0, i) = z(0, i - 1) + 0.5 * g.dt() * (truth.values()(0, i - 1) + truth.values()(0, i));
  }
  return {m,
          assim::build_minimum_energy(QuadraticCostSpec::constant(
              assim::coordinate_projection({0}, 3), scalar(r), Eigen::MatrixXd::Identity(3, 3))),
          assim::build_observation(SampledPath(g, z), 0.1, seed),
          x0 + Eigen::Vector3d(1.0, -1.0, 1.0)};
}

// ---------------------------------------------------------------------------
// Forward Hamiltonian map

TEST(IntegrateHamiltonian, DecoupledWithoutForcing) {
  Problem p = lorenz(0.5, 128, 1, 0.0);
  const auto h = assim::integrate_hamiltonian(p.model, p.cost, p.eta, p.xi, Eigen::Vector3d::Zero());
  EXPECT_TRUE(h.costate.values().isZero(0.0));
  EXPECT_TRUE(h.control.values().isZero(0.0));
  const SampledPath free = assim::integrate_state(p.model, ControlPath::zeros(p.eta.path.grid(), 3), p.xi);
  EXPECT_LT((h.state.values() - free.values()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(IntegrateHamiltonian, RoundTripFromOptimizer) {
  Problem p = lorenz(0.5, 256, 2);
  assim::OptimizerConfig cfg;
  cfg.grad_tol = 1e-8;
  const auto r = assim::minimize(p.model, p.cost, p.eta, p.xi, ControlPath::zeros(p.eta.path.grid(), 3),
                                 ControlSetSpec::all_space(), cfg);
  ASSERT_EQ(r.status, assim::OptimizerStatus::converged);
  const auto h = assim::integrate_hamiltonian(p.model, p.cost, p.eta, p.xi, r.triple.costate.at(0));
  EXPECT_LT((h.state.values() - r.triple.state.values()).cwiseAbs().maxCoeff(), 1e-3);
  EXPECT_LT((h.costate.values() - r.triple.costate.values()).cwiseAbs().maxCoeff(), 1e-3);
}

TEST(IntegrateHamiltonian, TerminalCostateAffineForLq) {
  Problem p = scalar_lq(0.4, 512);
  const auto end = [&](double l0) {
    return assim::integrate_hamiltonian(p.model, p.cost, p.eta, p.xi, Eigen::VectorXd::Constant(1, l0))
        .costate.at(512)(0);
  };
  const double f0 = end(0.0), f1 = end(1.0);
  const double slope = f1 - f0;
  for (double l0 : {-2.0, 0.37, 3.5}) {
    EXPECT_NEAR(end(l0), f0 + slope * l0, 1e-6 * (1.0 + std::abs(end(l0))));
  }
}

TEST(IntegrateHamiltonian, NeedsControlWeight) {
  Problem p = scalar_lq(0.0, 16);
  p.cost.control_weight = nullptr;
  EXPECT_THROW(assim::integrate_hamiltonian(p.model, p.cost, p.eta, p.xi, Eigen::VectorXd::Zero(1)),
               assim::UnsupportedSpec);
}

// ---------------------------------------------------------------------------
// Shooting

TEST(Shoot, ZeroCostAcceptsZeroGuess) {
  Problem p = lorenz(0.5, 128, 3, 0.0);
  const auto s = assim::shoot(p.model, p.cost, p.eta, p.xi, Eigen::Vector3d::Zero(), {});
  EXPECT_EQ(s.iterations, 0);
  EXPECT_TRUE(s.lambda0.isZero(0.0));
}

TEST(Shoot, ScalarLqMatchesRiccati) {
  const TimeGrid g(1.0, 1024);
  Problem p = scalar_lq(-0.5, 1024);
  const oracle::Riccati ric(-0.5, 1.0, 1.0, 1.0);
  const auto s = assim::shoot(p.model, p.cost, p.eta, p.xi, Eigen::VectorXd::Zero(1), {});
  double gap = 0.0;
  for (std::size_t i = 0; i + 1 < g.nodes(); ++i) {
    gap = std::max(gap, std::abs(s.triple.control.at(i)(0) - ric.control(g.time(i), s.triple.state.at(i)(0))));
  }
  EXPECT_LT(gap, 1e-3);
  EXPECT_LT(s.residual, 1e-8);
  EXPECT_NEAR(s.cost, ric.value(1.0), 1e-5);
  EXPECT_NEAR(s.initial_sensitivity(0), ric.initial_costate(1.0), 1e-5);
}

TEST(Shoot, AgreesWithGradientOnShortLorenzHorizon) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    Problem p = lorenz(0.5, 256, seed);
    const auto r = assim::minimize(p.model, p.cost, p.eta, p.xi, ControlPath::zeros(p.eta.path.grid(), 3),
                                   ControlSetSpec::all_space(), {});
    const auto s = assim::shoot(p.model, p.cost, p.eta, p.xi, Eigen::Vector3d::Zero(), {});
    EXPECT_LT(s.residual, 1e-8);
    EXPECT_NEAR(s.cost, r.cost, 1e-3) << "seed " << seed;
  }
}

TEST(Shoot, LongLorenzHorizonReportsNoConvergence) {
  // Single shooting loses the chaotic flow at T = 2; the failure is typed.
  Problem p = lorenz(2.0, 1024, 1);
  EXPECT_THROW(assim::shoot(p.model, p.cost, p.eta, p.xi, Eigen::Vector3d::Zero(), {}),
               assim::NoConvergence);
}

TEST(Shoot, ConfigValidation) {
  assim::ShootingConfig c;
  c.damping = 0.0;
  EXPECT_THROW(c.validate(), assim::InvalidParameter);
  c = {};
  c.newton_tol = -1.0;
  EXPECT_THROW(c.validate(), assim::InvalidParameter);
}

// ---------------------------------------------------------------------------
// Value probe

TEST(ValueProbe, ZeroCost) {
  Problem p = lorenz(0.5, 128, 4, 0.0);
  const auto v = assim::value_probe(p.model, p.cost, p.eta, p.xi, 1e-4);
  EXPECT_LT(v.dv_fd.cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT(v.lambda0.cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT(v.max_abs_gap, 1e-12);
}

TEST(ValueProbe, ScalarLqBothSolvers) {
  Problem p = scalar_lq(-0.5, 1024);
  const oracle::Riccati ric(-0.5, 1.0, 1.0, 1.0);
  for (auto solver : {assim::ValueSolver::gradient, assim::ValueSolver::shoot}) {
    assim::ValueProbeOptions opt;
    opt.solver = solver;
    const auto v = assim::value_probe(p.model, p.cost, p.eta, p.xi, 1e-4, opt);
    EXPECT_LT(v.max_abs_gap, 1e-3);
    EXPECT_NEAR(v.dv_fd(0), ric.initial_costate(1.0), 1e-3);
    EXPECT_NEAR(v.value, ric.value(1.0), 1e-3);
  }
}

TEST(ValueProbe, ShortLorenzHorizon) {
  Problem p = lorenz(0.5, 256, 5);
  assim::ValueProbeOptions opt;
  opt.jobs = 2;
  const auto v = assim::value_probe(p.model, p.cost, p.eta, p.xi, 1e-4, opt);
  EXPECT_LT(v.max_abs_gap, 1e-2 * (1.0 + v.lambda0.norm()));
}

TEST(ValueProbe, RejectsNonPositiveStep) {
  Problem p = scalar_lq(0.0, 16);
  EXPECT_THROW(assim::value_probe(p.model, p.cost, p.eta, p.xi, 0.0), assim::InvalidParameter);
}

TEST(ValueProbe, EnvelopeInequality) {
  Problem p = lorenz(0.5, 256, 6);
  const ControlPath u0 = ControlPath::zeros(p.eta.path.grid(), 3);
  assim::OptimizerConfig cfg;
  cfg.grad_tol = 1e-8;
  const auto at_xi = assim::minimize(p.model, p.cost, p.eta, p.xi, u0, ControlSetSpec::all_space(), cfg);
  const ControlPath &u_xi = at_xi.triple.control;
  EXPECT_NEAR(assim::eval_cost(p.cost, assim::integrate_state(p.model, u_xi, p.xi), u_xi, p.eta), at_xi.cost,
              1e-12 * (1.0 + std::abs(at_xi.cost)));
  const assim::CounterRng rng(21);
  for (std::uint64_t k = 0; k < 10; ++k) {
    Eigen::Vector3d z = p.xi;
    for (int i = 0; i < 3; ++i) {
      z(i) += 0.05 * rng.gaussian(3 * k + static_cast<std::uint64_t>(i));
    }
    const double v_z = assim::minimize(p.model, p.cost, p.eta, z, u_xi, ControlSetSpec::all_space(), cfg).cost;
    const double j_z = assim::eval_cost(p.cost, assim::integrate_state(p.model, u_xi, z), u_xi, p.eta);
    EXPECT_LE(v_z, j_z + 1e-10) << "sample " << k;
  }
}

} // namespace
