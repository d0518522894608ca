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

#include "assim/roughpath.hpp"

#include "assim/errors.hpp"
#include "assim/rng.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace assim {

TimeGrid::TimeGrid(double horizon, int n_steps)
    : horizon_(horizon), n_steps_(n_steps) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw InvalidParameter("time grid horizon must be finite and positive");
  }
  if (n_steps < 1) {
    throw InvalidParameter("time grid needs at least one step");
  }
}

SampledPath::SampledPath(TimeGrid grid, Eigen::MatrixXd values)
    : SampledPath(grid, std::move(values), -1, 1) {}

SampledPath::SampledPath(TimeGrid grid, Eigen::MatrixXd values, int rows,
                         int cols)
    : grid_(grid), values_(std::move(values)), rows_(rows), cols_(cols) {
  if (rows_ < 0) {
    rows_ = static_cast<int>(values_.rows());
  }
  if (values_.rows() < 1) {
    throw InvalidParameter("sampled path needs a positive dimension");
  }
  if (static_cast<std::size_t>(values_.cols()) != grid_.nodes()) {
    throw GridMismatch("sampled path has " + std::to_string(values_.cols()) +
                       " nodes, grid has " + std::to_string(grid_.nodes()));
  }
  if (static_cast<Eigen::Index>(rows_) * cols_ != values_.rows()) {
    throw InvalidParameter("matrix shape does not match path dimension");
  }
  if (!values_.allFinite()) {
    throw InvalidParameter("sampled path contains non-finite entries");
  }
}

SampledPath SampledPath::zeros(const TimeGrid &grid, int dim) {
  return {grid, Eigen::MatrixXd::Zero(dim, static_cast<Eigen::Index>(grid.nodes()))};
}

SampledPath SampledPath::constant(const TimeGrid &grid,
                                  const Eigen::VectorXd &value) {
  return {grid, value.replicate(1, static_cast<Eigen::Index>(grid.nodes()))};
}

SampledPath
SampledPath::from_function(const TimeGrid &grid, int dim,
                           const std::function<Eigen::VectorXd(double)> &fn) {
  Eigen::MatrixXd values(dim, static_cast<Eigen::Index>(grid.nodes()));
  for (std::size_t i = 0; i < grid.nodes(); ++i) {
    values.col(static_cast<Eigen::Index>(i)) = fn(grid.time(i));
  }
  return {grid, std::move(values)};
}

double p_variation(const SampledPath &path, double p, int step_cap) {
  if (!(p >= 1.0) || !std::isfinite(p)) {
    throw InvalidParameter("p-variation needs p >= 1");
  }
  if (path.grid().steps() > step_cap) {
    throw InvalidParameter("p-variation grid exceeds the step cap of " +
                           std::to_string(step_cap));
  }
  const Eigen::MatrixXd &v = path.values();
  const Eigen::Index n = v.cols();
  std::vector<double> best(static_cast<std::size_t>(n), 0.0);
  for (Eigen::Index j = 1; j < n; ++j) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < j; ++i) {
      const double step = (v.col(j) - v.col(i)).norm();
      acc = std::max(acc, best[static_cast<std::size_t>(i)] + std::pow(step, p));
    }
    best[static_cast<std::size_t>(j)] = acc;
  }
  return std::pow(best.back(), 1.0 / p);
}

namespace {

void require_integrable_pair(const SampledPath &x, const SampledPath &y) {
  if (!(x.grid() == y.grid())) {
    throw GridMismatch("young integral: integrand and integrator grids differ");
  }
  if (x.cols() != y.dim()) {
    throw GridMismatch("young integral: integrand has " +
                       std::to_string(x.cols()) + " columns, integrator has dim " +
                       std::to_string(y.dim()));
  }
}

Eigen::MatrixXd integrand_at(const SampledPath &x, std::size_t i, Tag tag) {
  switch (tag) {
  case Tag::left:
    return x.matrix_at(i);
  case Tag::right:
    return x.matrix_at(i + 1);
  case Tag::midpoint:
    return 0.5 * (x.matrix_at(i) + x.matrix_at(i + 1));
  }
  return x.matrix_at(i);
}

} // namespace

Eigen::VectorXd young_integral(const SampledPath &x, const SampledPath &y,
                               Tag tag) {
  require_integrable_pair(x, y);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(x.rows());
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    sum.noalias() += integrand_at(x, i, tag) * (y.at(i + 1) - y.at(i));
  }
  return sum;
}

SampledPath young_integral_path(const SampledPath &x, const SampledPath &y,
                                Tag tag) {
  require_integrable_pair(x, y);
  Eigen::MatrixXd running =
      Eigen::MatrixXd::Zero(x.rows(), static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const auto c = static_cast<Eigen::Index>(i);
    running.col(c + 1) =
        running.col(c) + integrand_at(x, i, tag) * (y.at(i + 1) - y.at(i));
  }
  return {x.grid(), std::move(running)};
}

YoungBound young_bound_check(const SampledPath &x, const SampledPath &y,
                             double p, double q) {
  if (!(p >= 1.0) || !(q >= 1.0)) {
    throw InvalidParameter("young bound needs p, q >= 1");
  }
  const double theta = 1.0 / p + 1.0 / q;
  if (!(theta > 1.0)) {
    throw InvalidParameter("young bound needs 1/p + 1/q > 1");
  }
  require_integrable_pair(x, y);
  const Eigen::VectorXd integral = young_integral(x, y, Tag::left);
  const Eigen::VectorXd anchor =
      x.matrix_at(0) * (y.at(y.size() - 1) - y.at(0));
  YoungBound out;
  out.lhs = (integral - anchor).norm();
  out.rhs = p_variation(x, p, x.grid().steps()) *
            p_variation(y, q, y.grid().steps()) /
            (1.0 - std::pow(2.0, 1.0 - theta));
  return out;
}

SampledPath sample_wiener(const TimeGrid &grid, int dim, std::uint64_t seed,
                          std::uint64_t stream) {
  if (dim < 1) {
    throw InvalidParameter("wiener path needs a positive dimension");
  }
  const CounterRng rng(seed, stream);
  const double scale = std::sqrt(grid.dt());
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(dim, static_cast<Eigen::Index>(grid.nodes()));
  std::uint64_t counter = 0;
  for (Eigen::Index i = 1; i < w.cols(); ++i) {
    for (Eigen::Index c = 0; c < dim; ++c) {
      w(c, i) = w(c, i - 1) + scale * rng.gaussian(counter++);
    }
  }
  return {grid, std::move(w)};
}

ObservationPath build_observation(const SampledPath &zeta, double noise_scale,
                                  std::uint64_t seed) {
  if (!(noise_scale >= 0.0) || !std::isfinite(noise_scale)) {
    throw InvalidParameter("noise scale must be finite and nonnegative");
  }
  const SampledPath w = sample_wiener(zeta.grid(), zeta.dim(), seed);
  Eigen::MatrixXd eta = zeta.values() + noise_scale * w.values();
  return {SampledPath(zeta.grid(), std::move(eta)), seed, noise_scale};
}

} // namespace assim
