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

#ifndef ASSIM_ERRORS_HPP
#define ASSIM_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace assim {

/// Base class for every error raised by the library.
class AssimError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A numeric argument or configuration value is out of its admissible range.
class InvalidParameter : public AssimError {
public:
  using AssimError::AssimError;
};

/// Paths that must share a grid (or a dimension) do not.
class GridMismatch : public AssimError {
public:
  using AssimError::AssimError;
};

/// A cost or model does not provide what the requested operation needs.
class UnsupportedSpec : public AssimError {
public:
  using AssimError::AssimError;
};

/// Integration produced a non-finite value. `node()` is the first grid node
/// whose value could not be computed.
class BlowUp : public AssimError {
public:
  BlowUp(const std::string &what, std::size_t node)
      : AssimError(what + " (first non-finite node " + std::to_string(node) +
                   ")"),
        node_(node) {}

  std::size_t node() const noexcept { return node_; }

private:
  std::size_t node_;
};

/// An iterative solver gave up. Carries the best residual it reached.
class NoConvergence : public AssimError {
public:
  NoConvergence(const std::string &what, double best_residual)
      : AssimError(what), best_residual_(best_residual) {}

  double best_residual() const noexcept { return best_residual_; }

private:
  double best_residual_;
};

} // namespace assim

#endif // ASSIM_ERRORS_HPP
