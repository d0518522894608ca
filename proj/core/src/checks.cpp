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


#include "assim/checks.hpp"

#include "assim/adjoint.hpp"
#include "assim/errors.hpp"
#include "assim/experiments.hpp"
#include "assim/hamiltonian_bvp.hpp"
#include "assim/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace assim {

namespace {

using nlohmann::json;

constexpr double kIneqSlack = 1e-12;

/// Streams, so that suites draw independent numbers from one seed.
enum Stream : std::uint64_t {
  kPvarStream = 1,
  kBoundStream = 2,
  kTagStream = 3,
  kIneqStream = 4,
  kWienerStream = 5,
  kDualityStream = 6,
  kGradientStream = 7,
};

CheckRecord record(const char *suite, std::string name, double value, double tol,
                   std::string detail = {}) {
  return {suite, std::move(name), value, tol, value <= tol, std::move(detail)};
}

double sup_norm(const SampledPath &p) {
  return p.values().cwiseAbs().maxCoeff();
}

double oscillation(const SampledPath &p) {
  double osc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = i + 1; j < p.size(); ++j) {
      osc = std::max(osc, (p.at(j) - p.at(i)).norm());
    }
  }
  return osc;
}

SampledPath map_values(const SampledPath &p, double (*fn)(double, double), double arg) {
  Eigen::MatrixXd v = p.values();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    v(i) = fn(v(i), arg);
  }
  return {p.grid(), std::move(v)};
}

double abs_pow(double x, double k) { return std::pow(std::abs(x), k); }

std::vector<CheckRecord> roughpath_suite(std::uint64_t seed) {
  std::vector<CheckRecord> out;
  const CounterRng rng(seed, 0);

  {
    const TimeGrid grid(1.0, 10);
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
      const CounterRng r = rng.split(kPvarStream * 1000 + static_cast<std::uint64_t>(k));
      const int dim = k % 2 == 0 ? 1 : 3;
      const SampledPath path = random_walk(grid, dim, r.word(0), 0);
      const double p = 1.0 + 2.0 * r.uniform(1);
      const double dp = p_variation(path, p);
      const double bf = p_variation_exhaustive(path, p);
      worst = std::max(worst, std::abs(dp - bf) / (1.0 + bf));
    }
    out.push_back(record("roughpath", "p_variation_matches_exhaustive", worst, 1e-12,
                         "50 paths, n_steps=10"));
  }

  {
    const TimeGrid grid(1.0, 64);
    double worst = -1e300;
    for (int k = 0; k < 100; ++k) {
      const CounterRng r = rng.split(kBoundStream * 1000 + static_cast<std::uint64_t>(k));
      const SampledPath x = random_walk(grid, 1, r.word(0), 0);
      const SampledPath y = random_walk(grid, 1, r.word(0), 1);
      const YoungBound b = young_bound_check(x, y, 1.5, 1.5);
      worst = std::max(worst, b.lhs - b.rhs);
    }
    out.push_back(record("roughpath", "young_bound_margin", std::max(worst, 0.0), 0.0,
                         "max(lhs - rhs) over 100 pairs, p=q=1.5"));
  }

  {
    double worst = 1e300;
    const int coarse = 256;
    for (int k = 0; k < 20; ++k) {
      const TimeGrid fine_grid(1.0, 2 * coarse);
      const SampledPath w = sample_wiener(fine_grid, 1, seed, kTagStream * 1000 + static_cast<std::uint64_t>(k));
      const auto gap = [&](int n) {
        const TimeGrid g(1.0, n);
        const int stride = 2 * coarse / n;
        Eigen::MatrixXd wv(1, n + 1);
        for (int i = 0; i <= n; ++i) {
          wv(0, i) = w.values()(0, i * stride);
        }
        const SampledPath y(g, wv);
        const SampledPath x = SampledPath::from_function(
            g, 1, [](double t) { return Eigen::VectorXd::Constant(1, std::sin(t)); });
        return std::abs(young_integral(x, y, Tag::left)(0) -
                        young_integral(x, y, Tag::midpoint)(0));
      };
      worst = std::min(worst, gap(coarse) / gap(2 * coarse));
    }
    out.push_back(record("roughpath", "tag_gap_refinement_shortfall", std::max(1.3 - worst, 0.0), 0.0,
                         "min ratio |left-mid|(n)/|left-mid|(2n) over 20 seeds must reach 1.3"));
  }

  {
    const TimeGrid grid(1.0, 48);
    int mono = 0, interp = 0, prod = 0, chain = 0;
    for (int k = 0; k < 100; ++k) {
      const CounterRng r = rng.split(kIneqStream * 1000 + static_cast<std::uint64_t>(k));
      const SampledPath y = random_walk(grid, k % 3 == 0 ? 3 : 1, r.word(0), 0);
      const SampledPath z = random_walk(grid, 1, r.word(0), 1);
      const double q = 1.0 + r.uniform(1);
      const double p = q + 0.1 + 2.0 * r.uniform(2);
      const double vq = p_variation(y, q);
      const double vp = p_variation(y, p);
      if (vp > vq * (1.0 + kIneqSlack) + kIneqSlack) {
        ++mono;
      }
      const double rhs = std::pow(vq, q / p) * std::pow(oscillation(y), 1.0 - q / p);
      if (vp > rhs * (1.0 + kIneqSlack) + kIneqSlack) {
        ++interp;
      }
      const SampledPath ys = y.dim() == 1 ? y : random_walk(grid, 1, r.word(0), 2);
      const SampledPath xy(grid, ys.values().cwiseProduct(z.values()));
      const double prhs = p_variation(ys, p) * sup_norm(z) + p_variation(z, p) * sup_norm(ys);
      if (p_variation(xy, p) > prhs * (1.0 + kIneqSlack) + kIneqSlack) {
        ++prod;
      }
      const double kappa = 0.3 + 0.7 * r.uniform(3);
      const double pc = std::max(p, 1.0 / kappa);
      const SampledPath psi = map_values(ys, abs_pow, kappa);
      const double crhs = std::pow(p_variation(ys, std::max(kappa * pc, 1.0)), kappa) +
                          std::pow(grid.horizon(), kappa);
      if (p_variation(psi, pc) > crhs * (1.0 + kIneqSlack) + kIneqSlack) {
        ++chain;
      }
    }
    out.push_back(record("roughpath", "monotonicity_violations", mono, 0.0));
    out.push_back(record("roughpath", "interpolation_violations", interp, 0.0));
    out.push_back(record("roughpath", "product_rule_violations", prod, 0.0));
    out.push_back(record("roughpath", "chain_rule_violations", chain, 0.0));
  }

  {
    double worst_stable = 0.0;
    double min_growth = 1e300;
    for (int k = 0; k < 20; ++k) {
      const TimeGrid fine(1.0, 4096);
      const SampledPath w =
          sample_wiener(fine, 1, seed, kWienerStream * 1000 + static_cast<std::uint64_t>(k));
      const TimeGrid coarse_grid(1.0, 256);
      Eigen::MatrixXd cv(1, 257);
      for (int i = 0; i <= 256; ++i) {
        cv(0, i) = w.values()(0, 16 * i);
      }
      const SampledPath coarse(coarse_grid, cv);
      const double stable = p_variation(w, 2.5) / p_variation(coarse, 2.5);
      const double growth = p_variation(w, 1.5) / p_variation(coarse, 1.5);
      worst_stable = std::max({worst_stable, stable - 1.25, 0.8 - stable});
      min_growth = std::min(min_growth, growth);
    }
    out.push_back(record("roughpath", "wiener_p2.5_ratio_outside_band", std::max(worst_stable, 0.0),
                         0.0, "ratio Var(4096)/Var(256) must lie in [0.8, 1.25]"));
    out.push_back(record("roughpath", "wiener_p1.5_growth_shortfall", std::max(1.3 - min_growth, 0.0),
                         0.0, "ratio Var(4096)/Var(256) must exceed 1.3"));
  }
  return out;
}

/// Scalar x' = a x + u with phi = 1/2 q x^2 + 1/2 r u^2 and no observations.
struct ScalarLq {
  ModelSpec model;
  CostSpec cost;
  ObservationPath eta;
};

ScalarLq scalar_lq(double a, double q, double r, const TimeGrid &grid) {
  ModelSpec model = make_linear(Eigen::MatrixXd::Constant(1, 1, a),
                                Eigen::MatrixXd::Constant(1, 1, 1.0), "scalar_lq");
  CostSpec cost = build_minimum_energy(QuadraticCostSpec::constant(
      full_state(1), Eigen::MatrixXd::Constant(1, 1, q), Eigen::MatrixXd::Constant(1, 1, r)));
  return {std::move(model), std::move(cost), {SampledPath::zeros(grid, 1), 0, 0.0}};
}

std::vector<CheckRecord> adjoint_suite(std::uint64_t seed) {
  std::vector<CheckRecord> out;
  const TimeGrid grid(1.0, 512);
  const double a = -0.5;
  const ScalarLq lq = scalar_lq(a, 1.0, 1.0, grid);
  const Eigen::VectorXd xi = Eigen::VectorXd::Constant(1, 1.0);
  const ControlPath u0 = ControlPath::zeros(grid, 1);
  const SampledPath x = integrate_state(lq.model, u0, xi);

  // lambda(t) = int_t^T e^{a(s-t)} x(s) ds with x(s) = e^{as}.
  const auto exact = [a](double t) {
    return std::exp(-a * t) * (std::exp(2.0 * a) - std::exp(2.0 * a * t)) / (2.0 * a);
  };
  const Costate heun = solve_costate(lq.model, lq.cost, x, u0, lq.eta,
                                     CostateScheme::continuous_heun);
  const Costate disc = solve_costate(lq.model, lq.cost, x, u0, lq.eta);
  double err_heun = 0.0;
  double err_disc = 0.0;
  for (std::size_t i = 0; i + 1 < grid.nodes(); ++i) {
    err_heun = std::max(err_heun, std::abs(heun.path.at(i)(0) - exact(grid.time(i))));
    err_disc = std::max(err_disc,
                        std::abs(disc.path.at(i)(0) - exact(grid.time(i) + 0.5 * grid.dt())));
  }
  out.push_back(record("adjoint", "linear_costate_nodes_heun", err_heun, 1e-4));
  out.push_back(record("adjoint", "linear_costate_midpoints_discrete", err_disc, 1e-4));
  out.push_back(record("adjoint", "terminal_costate",
                       std::max(heun.path.at(grid.nodes() - 1).norm(),
                                disc.path.at(grid.nodes() - 1).norm()),
                       0.0));

  // Closed-form control has zero residual; one unit bump costs at least s/2.
  const CounterRng rng(seed, kGradientStream);
  Eigen::MatrixXd lam(1, static_cast<Eigen::Index>(grid.nodes()));
  for (Eigen::Index i = 0; i < lam.cols(); ++i) {
    lam(0, i) = rng.gaussian(static_cast<std::uint64_t>(i));
  }
  lam(0, lam.cols() - 1) = 0.0;
  const SampledPath lambda(grid, lam);
  Eigen::MatrixXd ustar(1, lam.cols());
  for (Eigen::Index i = 0; i < lam.cols(); ++i) {
    ustar.col(i) = hamiltonian_minimizer(lq.cost, lq.model, grid.time(static_cast<std::size_t>(i)),
                                         x.at(static_cast<std::size_t>(i)), lambda.at(static_cast<std::size_t>(i)),
                                         ControlSetSpec::all_space());
  }
  const OptimalTriple at_min{x, ControlPath(grid, ustar), lambda};
  out.push_back(record("adjoint", "mp_residual_at_minimizer",
                       max_principle_residual(at_min, lq.cost, lq.model, {}).value, 1e-12));
  Eigen::MatrixXd bumped = ustar;
  bumped(0, 100) += 1.0;
  const OptimalTriple off{x, ControlPath(grid, bumped), lambda};
  const double res = max_principle_residual(off, lq.cost, lq.model, {}).value;
  out.push_back(record("adjoint", "mp_residual_bump_shortfall", std::max(0.5 - res, 0.0), 1e-9,
                       "residual after a unit bump must reach s/2 = 0.5"));
  return out;
}

std::vector<CheckRecord> duality_suite(std::uint64_t seed) {
  std::vector<CheckRecord> out;
  double worst = 0.0;
  int not_decreasing = 0;
  for (int k = 0; k < 20; ++k) {
    const CounterRng r = CounterRng(seed).split(kDualityStream * 1000 + static_cast<std::uint64_t>(k));
    std::uint64_t c = 0;
    Eigen::Matrix2d m0, m1;
    for (int i = 0; i < 4; ++i) {
      m0(i) = r.gaussian(c++);
      m1(i) = r.gaussian(c++);
    }
    Eigen::MatrixXd ca(2, 3), cb(2, 3);
    for (int i = 0; i < 6; ++i) {
      ca(i) = r.gaussian(c++);
      cb(i) = r.gaussian(c++);
    }
    const Eigen::VectorXd z0 = Eigen::Vector2d(r.gaussian(c), r.gaussian(c + 1));
    const Eigen::VectorXd lt = Eigen::Vector2d(r.gaussian(c + 2), r.gaussian(c + 3));
    const auto residual = [&](int n) {
      const TimeGrid g(1.0, n);
      const SampledPath mp(
          g,
          [&] {
            Eigen::MatrixXd v(4, n + 1);
            for (int i = 0; i <= n; ++i) {
              const Eigen::Matrix2d mt = m0 + m1 * std::sin(2.0 * std::numbers::pi * g.time(static_cast<std::size_t>(i)));
              v.col(i) = mt.reshaped();
            }
            return v;
          }(),
          2, 2);
      const auto series = [&](const Eigen::MatrixXd &coef, bool cosine) {
        return SampledPath::from_function(g, 2, [&](double t) {
          Eigen::VectorXd v = Eigen::VectorXd::Zero(2);
          for (int kk = 0; kk < 3; ++kk) {
            const double arg = (kk + 1) * std::numbers::pi * t;
            v += coef.col(kk) * (cosine ? std::cos(arg) : std::sin(arg));
          }
          return v;
        });
      };
      return duality_check(mp, series(ca, false), series(cb, true), z0, lt).residual;
    };
    const double r512 = residual(512);
    const double r1024 = residual(1024);
    worst = std::max(worst, r512);
    if (!(r1024 < r512)) {
      ++not_decreasing;
    }
  }
  out.push_back(record("duality", "residual_n512", worst, 1e-3, "max over 20 instances"));
  out.push_back(record("duality", "residual_not_decreasing", not_decreasing, 0.0));
  return out;
}

nlohmann::json lorenz_twin_config(std::uint64_t seed, double horizon, int n_steps) {
  return {{"model", {{"name", "lorenz63"}}},
          {"grid", {{"T", horizon}, {"n_steps", n_steps}}},
          {"truth", {{"initial_state", {1.0, 1.0, -18.0}}, {"spinup_time", 10.0}}},
          {"observation", {{"h", {0}}, {"noise_scale", 0.1}, {"seed", seed}}},
          {"cost", {{"kind", "minimum_energy"}}},
          {"assimilation", {{"initial_offset", {1.0, -1.0, 1.0}}}}};
}

std::vector<CheckRecord> gradient_suite(std::uint64_t seed) {
  const ExperimentConfig cfg = parse_config(lorenz_twin_config(seed, 2.0, 1024));
  const ModelSpec model = build_model(cfg);
  const CostSpec cost = build_cost(cfg, model);
  const ObservationPath eta = simulate(cfg).eta;
  const TimeGrid grid = cfg.grid();
  const Eigen::VectorXd xi = assimilation_initial_state(cfg);
  const CounterRng r = CounterRng(seed).split(kGradientStream);
  Eigen::MatrixXd uv(3, static_cast<Eigen::Index>(grid.nodes()));
  for (Eigen::Index i = 0; i < uv.size(); ++i) {
    uv(i) = r.gaussian(static_cast<std::uint64_t>(i));
  }
  const ControlPath u(grid, uv);
  const SampledPath x = integrate_state(model, u, xi);
  const SampledPath g = control_gradient(model, cost, x, u, solve_costate(model, cost, x, u, eta));

  std::vector<CheckRecord> out;
  const double h = 1e-5;
  for (int k = 0; k < 20; ++k) {
    const auto node = static_cast<Eigen::Index>(r.word(1000000 + static_cast<std::uint64_t>(k)) %
                                                static_cast<std::uint64_t>(grid.steps()));
    Eigen::Vector3d fd;
    for (int c = 0; c < 3; ++c) {
      Eigen::MatrixXd up = uv, um = uv;
      up(c, node) += h;
      um(c, node) -= h;
      const ControlPath pu(grid, up), mu(grid, um);
      fd(c) = (eval_cost(cost, integrate_state(model, pu, xi), pu, eta) -
               eval_cost(cost, integrate_state(model, mu, xi), mu, eta)) /
              (2.0 * h * grid.dt());
    }
    const Eigen::VectorXd gk = g.at(static_cast<std::size_t>(node));
    out.push_back(record("gradient", "node_" + std::to_string(node),
                         (fd - gk).lpNorm<Eigen::Infinity>() /
                             std::max(gk.lpNorm<Eigen::Infinity>(), 1e-12),
                         1e-3, "sup-norm relative gap to central differences"));
  }
  return out;
}

std::vector<CheckRecord> valueprobe_suite(std::uint64_t) {
  const TimeGrid grid(1.0, 1024);
  const ScalarLq lq = scalar_lq(-0.5, 1.0, 1.0, grid);
  const ValueProbe vp = value_probe(lq.model, lq.cost, lq.eta, Eigen::VectorXd::Constant(1, 1.0), 1e-4);
  return {record("valueprobe", "scalar_lq_gap", vp.max_abs_gap, 1e-3)};
}

} // namespace

CheckSuite parse_check_suite(const std::string &name) {
  if (name == "roughpath") return CheckSuite::roughpath;
  if (name == "adjoint") return CheckSuite::adjoint;
  if (name == "duality") return CheckSuite::duality;
  if (name == "gradient") return CheckSuite::gradient;
  if (name == "valueprobe") return CheckSuite::valueprobe;
  if (name == "all") return CheckSuite::all;
  throw InvalidParameter("unknown check suite '" + name + "'");
}

std::vector<CheckRecord> run_checks(CheckSuite suite, std::uint64_t seed) {
  std::vector<CheckRecord> out;
  const auto add = [&out](std::vector<CheckRecord> more) {
    out.insert(out.end(), std::make_move_iterator(more.begin()),
               std::make_move_iterator(more.end()));
  };
  const bool all = suite == CheckSuite::all;
  if (all || suite == CheckSuite::roughpath) add(roughpath_suite(seed));
  if (all || suite == CheckSuite::adjoint) add(adjoint_suite(seed));
  if (all || suite == CheckSuite::duality) add(duality_suite(seed));
  if (all || suite == CheckSuite::gradient) add(gradient_suite(seed));
  if (all || suite == CheckSuite::valueprobe) add(valueprobe_suite(seed));
  return out;
}

bool all_passed(const std::vector<CheckRecord> &records) {
  return std::all_of(records.begin(), records.end(),
                     [](const CheckRecord &r) { return r.passed; });
}

nlohmann::json checks_to_json(const std::vector<CheckRecord> &records, std::uint64_t seed) {
  json list = json::array();
  for (const CheckRecord &r : records) {
    list.push_back({{"suite", r.suite},
                    {"name", r.name},
                    {"value", r.value},
                    {"tolerance", r.tolerance},
                    {"passed", r.passed},
                    {"detail", r.detail}});
  }
  return {{"schema_version", kResultSchemaVersion},
          {"artifact_version", artifact_version()},
          {"seed", seed},
          {"passed", all_passed(records)},
          {"checks", std::move(list)}};
}

double p_variation_exhaustive(const SampledPath &path, double p) {
  if (p < 1.0) {
    throw InvalidParameter("p-variation needs p >= 1");
  }
  const int n = path.grid().steps();
  if (n > 20) {
    throw InvalidParameter("exhaustive p-variation is limited to 20 steps");
  }
  const std::uint32_t interior = n - 1;
  double best = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << interior); ++mask) {
    double sum = 0.0;
    std::size_t prev = 0;
    for (std::uint32_t j = 1; j <= interior + 1; ++j) {
      if (j == interior + 1 || (mask >> (j - 1)) & 1u) {
        sum += std::pow((path.at(j) - path.at(prev)).norm(), p);
        prev = j;
      }
    }
    best = std::max(best, sum);
  }
  return std::pow(best, 1.0 / p);
}

SampledPath random_walk(const TimeGrid &grid, int dim, std::uint64_t seed,
                        std::uint64_t stream, double scale) {
  SampledPath w = sample_wiener(grid, dim, seed, stream);
  return {grid, scale * w.values()};
}

} // namespace assim
