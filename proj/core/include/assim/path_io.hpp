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

#ifndef ASSIM_PATH_IO_HPP
#define ASSIM_PATH_IO_HPP

#include "assim/roughpath.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace assim {

/// Shortest decimal string that parses back to exactly `value`.
std::string format_double(double value);

/// CSV with header "t,v0,...,v{dim-1}" and one row per node. Values use
/// shortest round-trip formatting, so output is byte-stable for equal input.
void write_path_csv(std::ostream &out, const SampledPath &path);
void write_path_csv(const std::filesystem::path &file, const SampledPath &path);

/// Parses the format above. The time column must start at 0 and be uniform
/// to a relative tolerance of 1e-9 of the horizon; throws InvalidParameter
/// otherwise.
SampledPath read_path_csv(std::istream &in);
SampledPath read_path_csv(const std::filesystem::path &file);

} // namespace assim

#endif // ASSIM_PATH_IO_HPP
