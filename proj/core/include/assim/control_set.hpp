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


#ifndef ASSIM_CONTROL_SET_HPP
#define ASSIM_CONTROL_SET_HPP

#include "assim/dynamics.hpp"

#include <Eigen/Dense>

namespace assim {

/// Closed convex control set: the whole space, a box, or a Euclidean ball.
struct ControlSetSpec {
  enum class Kind { all_space, box, ball };

  Kind kind = Kind::all_space;
  Eigen::VectorXd lo;     ///< box only
  Eigen::VectorXd hi;     ///< box only
  Eigen::VectorXd center; ///< ball only
  double radius = 0.0;    ///< ball only

  static ControlSetSpec all_space();
  static ControlSetSpec box(Eigen::VectorXd lo, Eigen::VectorXd hi);
  static ControlSetSpec ball(Eigen::VectorXd center, double radius);

  /// Throws InvalidParameter on lo > hi, radius <= 0 or a dimension other
  /// than `control_dim` (ignored for all_space).
  void validate(int control_dim) const;

  Eigen::VectorXd project(const Eigen::VectorXd &v) const;
  bool contains(const Eigen::VectorXd &v, double tol = 0.0) const;
};

/// Pointwise Euclidean projection at every node.
ControlPath project_control(const ControlPath &u, const ControlSetSpec &set);

/// argmin over v in U of 1/2 v^T S v + c^T v for symmetric positive-definite
/// S. Exact when the unconstrained minimizer is feasible or S is a multiple of
/// the identity (then it is the projection of -S^{-1} c); otherwise solved by
/// projected gradient to a relative tolerance of 1e-14.
Eigen::VectorXd minimize_quadratic(const Eigen::MatrixXd &s,
                                   const Eigen::VectorXd &c,
                                   const ControlSetSpec &set);

} // namespace assim

#endif // ASSIM_CONTROL_SET_HPP
