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

#ifndef ASSIM_ROUGHPATH_HPP
#define ASSIM_ROUGHPATH_HPP

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>

namespace assim {

/// Uniform partition of [0, T] into `steps()` intervals. Node i sits at
/// i * T / n_steps (not accumulated, so the last node is exactly T).
class TimeGrid {
public:
  TimeGrid(double horizon, int n_steps);

  double horizon() const noexcept { return horizon_; }
  int steps() const noexcept { return n_steps_; }
  std::size_t nodes() const noexcept {
    return static_cast<std::size_t>(n_steps_) + 1;
  }
  double dt() const noexcept { return horizon_ / n_steps_; }
  double time(std::size_t i) const noexcept {
    return static_cast<double>(i) * horizon_ / n_steps_;
  }

  bool operator==(const TimeGrid &) const = default;

private:
  double horizon_;
  int n_steps_;
};

/**
 * Values of a vector- or matrix-valued function at the nodes of a TimeGrid.
 *
 * Storage is one column per node. A matrix-valued path with shape rows x cols
 * keeps each node's matrix column-major in that column; `matrix_at` maps it
 * back. Paths are immutable once built and every entry is finite.
 */
class SampledPath {
public:
  /// `values` must be dim x nodes. The shape defaults to a column vector.
  SampledPath(TimeGrid grid, Eigen::MatrixXd values);
  SampledPath(TimeGrid grid, Eigen::MatrixXd values, int rows, int cols);

  static SampledPath zeros(const TimeGrid &grid, int dim);
  static SampledPath constant(const TimeGrid &grid,
                              const Eigen::VectorXd &value);
  static SampledPath
  from_function(const TimeGrid &grid, int dim,
                const std::function<Eigen::VectorXd(double)> &fn);

  const TimeGrid &grid() const noexcept { return grid_; }
  int dim() const noexcept { return static_cast<int>(values_.rows()); }
  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  std::size_t size() const noexcept {
    return static_cast<std::size_t>(values_.cols());
  }

  auto at(std::size_t i) const { return values_.col(static_cast<Eigen::Index>(i)); }
  Eigen::Map<const Eigen::MatrixXd> matrix_at(std::size_t i) const {
    return {values_.col(static_cast<Eigen::Index>(i)).data(), rows_, cols_};
  }
  const Eigen::MatrixXd &values() const noexcept { return values_; }

  /// Same grid and shape.
  bool compatible(const SampledPath &other) const noexcept {
    return grid_ == other.grid_ && rows_ == other.rows_ && cols_ == other.cols_;
  }

private:
  TimeGrid grid_;
  Eigen::MatrixXd values_;
  int rows_;
  int cols_;
};

/// Observations in integrated form: eta = zeta + noise_scale * W.
struct ObservationPath {
  SampledPath path;
  std::uint64_t seed = 0;
  double noise_scale = 0.0;
};

/// Placement of the integrand evaluation point inside each grid interval.
/// `midpoint` uses the average of the two node values.
enum class Tag { left, right, midpoint };

/// Largest grid size accepted by p_variation by default. The dynamic
/// program is O(N^2) in time and O(N) in memory.
inline constexpr int kDefaultVariationStepCap = 4096;

/**
 * Grid p-variation: (max over subsequences 0 = i_0 < ... < i_k = N of
 * sum |x(t_{i_{j+1}}) - x(t_{i_j})|^p)^(1/p), with the Euclidean (Frobenius
 * for matrix paths) norm. Exact over grid dissections via
 * V[j] = max_{i<j} V[i] + |x_j - x_i|^p.
 *
 * Throws InvalidParameter when p < 1 or the grid exceeds `step_cap`.
 */
double p_variation(const SampledPath &path, double p,
                   int step_cap = kDefaultVariationStepCap);

/// Riemann-Stieltjes sum of x against y: sum_i x(tau_i) (y(t_{i+1}) - y(t_i)).
/// x is matrix-valued with x.cols() == y.dim(); the result has x.rows()
/// entries. Throws GridMismatch when grids or shapes disagree.
Eigen::VectorXd young_integral(const SampledPath &x, const SampledPath &y,
                               Tag tag = Tag::left);

/// Running integral t_j -> sum_{i<j} x(tau_i) dy_i, starting from zero.
SampledPath young_integral_path(const SampledPath &x, const SampledPath &y,
                                Tag tag = Tag::left);

/// Both sides of the Young-Loeve estimate for the left-tag sum.
struct YoungBound {
  double lhs = 0.0; ///< |int x dy - x(0)(y(T) - y(0))|
  double rhs = 0.0; ///< Var_p(x) Var_q(y) / (1 - 2^(1 - theta))
  bool holds(double slack = 0.0) const noexcept { return lhs <= rhs + slack; }
};

/// Throws InvalidParameter unless 1/p + 1/q > 1 and p, q >= 1.
YoungBound young_bound_check(const SampledPath &x, const SampledPath &y,
                             double p, double q);

/// Standard Wiener path on `grid`: W(0) = 0, independent N(0, dt) increments
/// per component, drawn from CounterRng(seed, stream).
SampledPath sample_wiener(const TimeGrid &grid, int dim, std::uint64_t seed,
                          std::uint64_t stream = 0);

/// eta(t_i) = zeta(t_i) + noise_scale * W(t_i) with W = sample_wiener(seed).
ObservationPath build_observation(const SampledPath &zeta, double noise_scale,
                                  std::uint64_t seed);

} // namespace assim

#endif // ASSIM_ROUGHPATH_HPP
