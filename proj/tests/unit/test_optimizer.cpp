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


#include "assim/control_set.hpp"
#include "assim/errors.hpp"
#include "assim/experiments.hpp"
#include "assim/optimizer.hpp"
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
using assim::OptimizerConfig;
using assim::QuadraticCostSpec;
using assim::SampledPath;
using assim::TimeGrid;

const assim::Lorenz63Params kTypical{};

Eigen::MatrixXd scalar(double v) { return Eigen::MatrixXd::Constant(1, 1, v); }

// ---------------------------------------------------------------------------
// Control sets

TEST(ControlSet, AllSpaceIsIdentity) {
  const Eigen::Vector2d v(3.0, -7.0);
  EXPECT_EQ(ControlSetSpec::all_space().project(v), v);
}

TEST(ControlSet, BoxClamps) {
  const auto box = ControlSetSpec::box(Eigen::VectorXd::Constant(1, -1.0), Eigen::VectorXd::Constant(1, 1.0));
  EXPECT_EQ(box.project(Eigen::VectorXd::Constant(1, 3.0))(0), 1.0);
  EXPECT_EQ(box.project(Eigen::VectorXd::Constant(1, -3.0))(0), -1.0);
  EXPECT_EQ(box.project(Eigen::VectorXd::Constant(1, 0.25))(0), 0.25);
}

TEST(ControlSet, BallScalesRadially) {
  const auto ball = ControlSetSpec::ball(Eigen::Vector2d::Zero(), 2.0);
  const Eigen::VectorXd p = ball.project(Eigen::Vector2d(3.0, 4.0));
  EXPECT_NEAR(p(0), 1.2, 1e-15);
  EXPECT_NEAR(p(1), 1.6, 1e-15);
}

TEST(ControlSet, ProjectionIsIdempotent) {
  const TimeGrid g(1.0, 50);
  const assim::CounterRng rng(2);
  Eigen::MatrixXd v(2, 51);
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    v(i) = 3.0 * rng.gaussian(static_cast<std::uint64_t>(i));
  }
  const ControlPath u(g, v);
  for (const auto &set : {ControlSetSpec::box(Eigen::Vector2d(-1, 0), Eigen::Vector2d(1, 2)),
                          ControlSetSpec::ball(Eigen::Vector2d(0.5, 0.5), 1.5)}) {
    const ControlPath once = assim::project_control(u, set);
    EXPECT_LE((assim::project_control(once, set).values() - once.values()).cwiseAbs().maxCoeff(), 1e-15);
    for (std::size_t i = 0; i < once.size(); ++i) {
      EXPECT_TRUE(set.contains(once.at(i), 1e-12));
    }
  }
}

TEST(ControlSet, Validation) {
  EXPECT_THROW(ControlSetSpec::box(Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1)).validate(2),
               assim::InvalidParameter);
  EXPECT_THROW(ControlSetSpec::ball(Eigen::Vector2d::Zero(), 0.0).validate(2), assim::InvalidParameter);
  EXPECT_THROW(ControlSetSpec::box(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 1)).validate(3),
               assim::InvalidParameter);
  EXPECT_NO_THROW(ControlSetSpec::all_space().validate(5));
}

TEST(ControlSet, QuadraticMinimizerOverBoxMatchesGridSearch) {
  Eigen::MatrixXd s(2, 2);
  s << 2.0, 0.9, 0.9, 1.0;
  const Eigen::Vector2d c(-3.0, 1.0);
  const auto box = ControlSetSpec::box(Eigen::Vector2d(-0.5, -0.5), Eigen::Vector2d(0.5, 0.5));
  const Eigen::VectorXd v = assim::minimize_quadratic(s, c, box);
  const auto q = [&](const Eigen::Vector2d &w) { return 0.5 * w.dot(s * w) + c.dot(w); };
  double best = 1e300;
  for (int i = 0; i <= 1000; ++i) {
    for (int j = 0; j <= 1000; ++j) {
      best = std::min(best, q(Eigen::Vector2d(-0.5 + 0.001 * i, -0.5 + 0.001 * j)));
    }
  }
  EXPECT_TRUE(box.contains(v, 1e-14));
  EXPECT_LE(q(v), best + 1e-12);
  EXPECT_GT(q(v), best - 1e-5);
}

// ---------------------------------------------------------------------------
// Optimizer

TEST(OptimizerConfig, Validation) {
  OptimizerConfig c;
  EXPECT_NO_THROW(c.validate());
  c.armijo_c = 1.0;
  EXPECT_THROW(c.validate(), assim::InvalidParameter);
  c = {};
  c.grad_tol = 0.0;
  EXPECT_THROW(c.validate(), assim::InvalidParameter);
  c = {};
  c.jobs = 0;
  EXPECT_THROW(c.validate(), assim::InvalidParameter);
}

TEST(Minimize, DecoupledQuadraticGoesToZero) {
  const TimeGrid g(1.0, 100);
  const ModelSpec m = assim::make_linear(Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Identity(2, 2));
  const CostSpec c = assim::build_minimum_energy(QuadraticCostSpec::constant(
      assim::full_state(2), Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Identity(2, 2)));
  const ObservationPath eta{SampledPath::zeros(g, 2), 0, 0.0};
  const ControlPath u0(g, Eigen::MatrixXd::Random(2, 101));
  const auto r = assim::minimize(m, c, eta, Eigen::Vector2d(1, 1), u0, ControlSetSpec::all_space(), {});
  EXPECT_EQ(r.status, assim::OptimizerStatus::converged);
  EXPECT_LT(r.cost, 1e-8);
  EXPECT_LT(r.triple.control.values().cwiseAbs().maxCoeff(), 1e-5);
}

struct ScalarLq {
  ModelSpec model;
  CostSpec cost;
  ObservationPath eta;
};

ScalarLq scalar_lq(double a, const TimeGrid &g) {
  return {assim::make_linear(scalar(a), scalar(1.0)),
          assim::build_minimum_energy(QuadraticCostSpec::constant(assim::full_state(1), scalar(1.0), scalar(1.0))),
          {SampledPath::zeros(g, 1), 0, 0.0}};
}

TEST(Minimize, ScalarLqMatchesRiccatiAtNodes) {
  const TimeGrid g(1.0, 1024);
  const ScalarLq lq = scalar_lq(-0.5, g);
  const oracle::Riccati ric(-0.5, 1.0, 1.0, 1.0);
  const auto r = assim::minimize(lq.model, lq.cost, lq.eta, Eigen::VectorXd::Ones(1),
                                 ControlPath::zeros(g, 1), ControlSetSpec::all_space(), {});
  ASSERT_EQ(r.status, assim::OptimizerStatus::converged);
  double gap = 0.0;
  for (std::size_t i = 0; i + 1 < g.nodes(); ++i) {
    gap = std::max(gap, std::abs(r.triple.control.at(i)(0) - ric.control(g.time(i), r.triple.state.at(i)(0))));
  }
  EXPECT_LT(gap, 1e-3);
  EXPECT_NEAR(r.cost, ric.value(1.0), 1e-5);
  EXPECT_NEAR(r.initial_sensitivity(0), ric.initial_costate(1.0), 1e-5);
}

class RiccatiMidpoint : public ::testing::TestWithParam<double> {};

TEST_P(RiccatiMidpoint, IntervalControlMatchesFeedbackAtMidpoints) {
  // The optimal constant on [t_k, t_k+1) is the feedback at the interval
  // midpoint to second order.
  const double a = GetParam();
  const TimeGrid g(1.0, 1024);
  const ScalarLq lq = scalar_lq(a, g);
  const oracle::Riccati ric(a, 1.0, 1.0, 1.0);
  OptimizerConfig cfg;
  cfg.grad_tol = 1e-7;
  cfg.max_iters = 2000;
  const auto r = assim::minimize(lq.model, lq.cost, lq.eta, Eigen::VectorXd::Ones(1),
                                 ControlPath::zeros(g, 1), ControlSetSpec::all_space(), cfg);
  ASSERT_EQ(r.status, assim::OptimizerStatus::converged);
  double gap = 0.0;
  for (std::size_t i = 0; i + 1 < g.nodes(); ++i) {
    const double xm = 0.5 * (r.triple.state.at(i)(0) + r.triple.state.at(i + 1)(0));
    gap = std::max(gap, std::abs(r.triple.control.at(i)(0) - ric.control(g.time(i) + 0.5 * g.dt(), xm)));
  }
  EXPECT_LT(gap, 1e-5) << "a = " << a;
}

INSTANTIATE_TEST_SUITE_P(Drift, RiccatiMidpoint, ::testing::Values(-1.0, -0.5, 0.0, 0.5, 1.0));

TEST(Minimize, GradientVanishesAtDiscreteOptimum) {
  const TimeGrid g(1.0, 512);
  const ScalarLq lq = scalar_lq(0.3, g);
  OptimizerConfig cfg;
  cfg.grad_tol = 1e-7;
  const auto r = assim::minimize(lq.model, lq.cost, lq.eta, Eigen::VectorXd::Ones(1),
                                 ControlPath::zeros(g, 1), ControlSetSpec::all_space(), cfg);
  const auto costate = assim::solve_costate(lq.model, lq.cost, r.triple.state, r.triple.control, lq.eta);
  const SampledPath grad =
      assim::control_gradient(lq.model, lq.cost, r.triple.state, r.triple.control, costate);
  EXPECT_LT(grad.values().cwiseAbs().maxCoeff(), 1e-5);
}

struct LorenzTwin {
  ModelSpec model = assim::make_lorenz63(kTypical);
  CostSpec cost;
  ObservationPath eta;
  SampledPath truth;
  Eigen::Vector3d xi;
};

LorenzTwin lorenz_twin(double horizon, int n, std::uint64_t seed, double s = 1.0) {
  LorenzTwin t{assim::make_lorenz63(kTypical),
               assim::build_minimum_energy(QuadraticCostSpec::constant(
                   assim::coordinate_projection({0}, 3), scalar(1.0), s * Eigen::MatrixXd::Identity(3, 3))),
               {SampledPath::zeros(TimeGrid(horizon, n), 1), 0, 0.0},
               SampledPath::zeros(TimeGrid(horizon, n), 3),
               Eigen::Vector3d::Zero()};
  const TimeGrid g(horizon, n);
  const Eigen::Vector3d x0(-5.8, -8.3, 19.6);
  t.truth = assim::integrate_state(t.model, ControlPath::zeros(g, 3), x0);
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(1, n + 1);
  for (int i = 1; i <= n; ++i) {
    z(0, i) = z(0, i - 1) + 0.5 * g.dt() * (t.truth.values()(0, i - 1) + t.truth.values()(0, i));
  }
  t.eta = assim::build_observation(SampledPath(g, z), 0.1, seed);
  t.xi = x0 + Eigen::Vector3d(1.0, -1.0, 1.0);
  return t;
}

TEST(Minimize, LorenzTwinCertificates) {
  const LorenzTwin t = lorenz_twin(1.0, 512, 3);
  const TimeGrid &g = t.eta.path.grid();
  const auto r = assim::minimize(t.model, t.cost, t.eta, t.xi, ControlPath::zeros(g, 3),
                                 ControlSetSpec::all_space(), {});
  ASSERT_EQ(r.status, assim::OptimizerStatus::converged);
  for (std::size_t k = 1; k < r.cost_trace.size(); ++k) {
    ASSERT_LT(r.cost_trace[k], r.cost_trace[k - 1]) << "iteration " << k;
  }
  EXPECT_LT(r.mp_residual, 1e-4 * (1.0 + std::abs(r.cost)));
  EXPECT_LT(r.grad_norm_trace.back(), 1e-5);
  // Regularity echo: u = -S^{-1} g^T lambda with g = S = I.
  EXPECT_LT((r.triple.control.values() + r.triple.costate.values()).cwiseAbs().maxCoeff(), 1e-3);
  EXPECT_LT(assim::rmse(r.triple.state, t.truth),
            assim::rmse(assim::integrate_state(t.model, ControlPath::zeros(g, 3), t.xi), t.truth));
}

TEST(Minimize, BoxConstraintKeepsIteratesFeasible) {
  const LorenzTwin t = lorenz_twin(0.5, 256, 4);
  const TimeGrid &g = t.eta.path.grid();
  const auto box = ControlSetSpec::box(Eigen::Vector3d::Constant(-0.02), Eigen::Vector3d::Constant(0.02));
  const ControlPath u0(g, 3.0 * Eigen::MatrixXd::Ones(3, 257));
  const auto r = assim::minimize(t.model, t.cost, t.eta, t.xi, u0, box, {});
  ASSERT_EQ(r.status, assim::OptimizerStatus::converged);
  for (std::size_t i = 0; i < g.nodes(); ++i) {
    ASSERT_TRUE(box.contains(r.triple.control.at(i), 1e-15));
  }
  EXPECT_LT(r.mp_residual, 1e-4 * (1.0 + std::abs(r.cost)));
  // Some constraint is active, else this test shows nothing.
  EXPECT_DOUBLE_EQ(r.triple.control.values().cwiseAbs().maxCoeff(), 0.02);
}

TEST(Minimize, IterationLimitIsReported) {
  const LorenzTwin t = lorenz_twin(0.5, 256, 5);
  OptimizerConfig cfg;
  cfg.max_iters = 1;
  const auto r = assim::minimize(t.model, t.cost, t.eta, t.xi, ControlPath::zeros(t.eta.path.grid(), 3),
                                 ControlSetSpec::all_space(), cfg);
  EXPECT_EQ(r.status, assim::OptimizerStatus::max_iters);
  EXPECT_EQ(r.iterations, 1);
  EXPECT_EQ(assim::to_string(r.status), "max_iters");
}

TEST(Minimize, VariantsReachTheSameOptimum) {
  const LorenzTwin t = lorenz_twin(0.5, 256, 6, 2.0);
  const ControlPath u0 = ControlPath::zeros(t.eta.path.grid(), 3);
  OptimizerConfig plain, pre, bb;
  pre.precondition = true;
  bb.bb_step = true;
  plain.grad_tol = pre.grad_tol = bb.grad_tol = 1e-8;
  const auto set = ControlSetSpec::all_space();
  const auto a = assim::minimize(t.model, t.cost, t.eta, t.xi, u0, set, plain);
  const auto b = assim::minimize(t.model, t.cost, t.eta, t.xi, u0, set, pre);
  const auto c = assim::minimize(t.model, t.cost, t.eta, t.xi, u0, set, bb);
  EXPECT_NEAR(a.cost, b.cost, 1e-9 * (1.0 + std::abs(a.cost)));
  EXPECT_NEAR(a.cost, c.cost, 1e-9 * (1.0 + std::abs(a.cost)));
}

TEST(Minimize, MultistartIsDeterministicAcrossThreadCounts) {
  const LorenzTwin t = lorenz_twin(0.5, 128, 7);
  OptimizerConfig cfg;
  cfg.multistart = 3;
  cfg.seed = 11;
  const ControlPath u0 = ControlPath::zeros(t.eta.path.grid(), 3);
  const auto one = assim::minimize_multistart(t.model, t.cost, t.eta, t.xi, u0, ControlSetSpec::all_space(), cfg);
  cfg.jobs = 3;
  const auto three = assim::minimize_multistart(t.model, t.cost, t.eta, t.xi, u0, ControlSetSpec::all_space(), cfg);
  EXPECT_EQ(one.cost, three.cost);
  EXPECT_EQ(one.start_index, three.start_index);
  EXPECT_EQ(one.triple.control.values(), three.triple.control.values());
  EXPECT_LE(one.cost, assim::minimize(t.model, t.cost, t.eta, t.xi, u0, ControlSetSpec::all_space(), {}).cost);
}

TEST(Minimize, OnsagerMachlupAndMinimumEnergyOptimaDiffer) {
  // S = 2 I for minimum energy, Gamma = I for Onsager-Machlup.
  const LorenzTwin t = lorenz_twin(0.5, 256, 8, 2.0);
  const TimeGrid &g = t.eta.path.grid();
  const CostSpec om = assim::build_onsager_machlup(
      {QuadraticCostSpec::constant(assim::coordinate_projection({0}, 3), scalar(1.0),
                                   2.0 * Eigen::MatrixXd::Identity(3, 3)),
       t.model,
       {}});
  const auto set = ControlSetSpec::all_space();
  const ControlPath u0 = ControlPath::zeros(g, 3);
  const auto me_run = assim::minimize(t.model, t.cost, t.eta, t.xi, u0, set, {});
  const auto om_run = assim::minimize(t.model, om, t.eta, t.xi, u0, set, {});
  const auto cost_at = [&](const CostSpec &c, const assim::AssimilationResult &r) {
    return assim::eval_cost(c, r.triple.state, r.triple.control, t.eta);
  };
  EXPECT_GT(cost_at(om, me_run) - cost_at(om, om_run), 1e-6);
  EXPECT_GT(cost_at(t.cost, om_run) - cost_at(t.cost, me_run), 1e-6);
}

} // namespace
