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


#ifndef ASSIM_CHECKS_HPP
#define ASSIM_CHECKS_HPP

#include "assim/roughpath.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace assim {

/// One measured invariant: pass when `value` <= `tolerance`.
struct CheckRecord {
  std::string suite;
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
};

enum class CheckSuite { roughpath, adjoint, duality, gradient, valueprobe, all };

/// Throws InvalidParameter for an unknown name.
CheckSuite parse_check_suite(const std::string &name);

/// Runs the named property suite with seeds derived from `seed`.
std::vector<CheckRecord> run_checks(CheckSuite suite, std::uint64_t seed);

bool all_passed(const std::vector<CheckRecord> &records);

nlohmann::json checks_to_json(const std::vector<CheckRecord> &records, std::uint64_t seed);

/// p-variation by enumerating every subset of interior nodes. Exponential;
/// refuses grids above 20 steps.
double p_variation_exhaustive(const SampledPath &path, double p);

/// Scalar or vector random walk with N(0, scale^2 dt) increments, from the
/// given stream of `seed`.
SampledPath random_walk(const TimeGrid &grid, int dim, std::uint64_t seed,
                        std::uint64_t stream, double scale = 1.0);

} // namespace assim

#endif // ASSIM_CHECKS_HPP
