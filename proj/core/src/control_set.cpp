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

#include <cmath>
#include <utility>

namespace assim {

ControlSetSpec ControlSetSpec::all_space() { return {}; }

ControlSetSpec ControlSetSpec::box(Eigen::VectorXd lo, Eigen::VectorXd hi) {
  ControlSetSpec s;
  s.kind = Kind::box;
  s.lo = std::move(lo);
  s.hi = std::move(hi);
  return s;
}

ControlSetSpec ControlSetSpec::ball(Eigen::VectorXd center, double radius) {
  ControlSetSpec s;
  s.kind = Kind::ball;
  s.center = std::move(center);
  s.radius = radius;
  return s;
}

void ControlSetSpec::validate(int control_dim) const {
  switch (kind) {
  case Kind::all_space:
    return;
  case Kind::box:
    if (lo.size() != control_dim || hi.size() != control_dim) {
      throw InvalidParameter("box bounds must have the control dimension");
    }
    if (lo.hasNaN() || hi.hasNaN() || (lo.array() > hi.array()).any()) {
      throw InvalidParameter("box needs lo <= hi componentwise");
    }
    return;
  case Kind::ball:
    if (center.size() != control_dim || !center.allFinite()) {
      throw InvalidParameter("ball center must have the control dimension");
    }
    if (!(radius > 0.0) || !std::isfinite(radius)) {
      throw InvalidParameter("ball radius must be positive");
    }
    return;
  }
}

Eigen::VectorXd ControlSetSpec::project(const Eigen::VectorXd &v) const {
  switch (kind) {
  case Kind::box:
    return v.cwiseMax(lo).cwiseMin(hi);
  case Kind::ball: {
    const Eigen::VectorXd d = v - center;
    const double norm = d.norm();
    if (norm <= radius) {
      return v;
    }
    return center + (radius / norm) * d;
  }
  case Kind::all_space:
    break;
  }
  return v;
}

bool ControlSetSpec::contains(const Eigen::VectorXd &v, double tol) const {
  switch (kind) {
  case Kind::box:
    return ((v.array() >= lo.array() - tol) && (v.array() <= hi.array() + tol)).all();
  case Kind::ball:
    return (v - center).norm() <= radius + tol;
  case Kind::all_space:
    break;
  }
  return true;
}

ControlPath project_control(const ControlPath &u, const ControlSetSpec &set) {
  if (set.kind == ControlSetSpec::Kind::all_space) {
    return u;
  }
  set.validate(u.dim());
  Eigen::MatrixXd values = u.values();
  for (Eigen::Index i = 0; i < values.cols(); ++i) {
    values.col(i) = set.project(values.col(i));
  }
  return {u.grid(), std::move(values)};
}

Eigen::VectorXd minimize_quadratic(const Eigen::MatrixXd &s,
                                   const Eigen::VectorXd &c,
                                   const ControlSetSpec &set) {
  const Eigen::LLT<Eigen::MatrixXd> llt(s);
  if (llt.info() != Eigen::Success) {
    throw InvalidParameter("control weight is not positive definite");
  }
  const Eigen::VectorXd free = -llt.solve(c);
  if (set.kind == ControlSetSpec::Kind::all_space || set.contains(free)) {
    return free;
  }
  const double diag = s.diagonal().mean();
  const Eigen::MatrixXd off = s - diag * Eigen::MatrixXd::Identity(s.rows(), s.cols());
  if (off.cwiseAbs().maxCoeff() <= 1e-14 * std::abs(diag)) {
    return set.project(free);
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s, Eigen::EigenvaluesOnly);
  const double step = 1.0 / eig.eigenvalues().maxCoeff();
  Eigen::VectorXd v = set.project(free);
  for (int it = 0; it < 100000; ++it) {
    const Eigen::VectorXd next = set.project(v - step * (s * v + c));
    const double change = (next - v).norm();
    v = next;
    if (change <= 1e-14 * (1.0 + v.norm())) {
      break;
    }
  }
  return v;
}

} // namespace assim
