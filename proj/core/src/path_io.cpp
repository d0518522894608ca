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

#include "assim/path_io.hpp"

#include "assim/errors.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace assim {

namespace {

constexpr double kSpacingTolerance = 1e-9;

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) {
      break;
    }
    start = comma + 1;
  }
  return fields;
}

double parse_double(std::string_view text, std::size_t row) {
  while (!text.empty() && (text.front() == ' ')) {
    text.remove_prefix(1);
  }
  while (!text.empty() && (text.back() == ' ' || text.back() == '\r')) {
    text.remove_suffix(1);
  }
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw InvalidParameter("path csv: malformed number '" + std::string(text) +
                           "' on data row " + std::to_string(row));
  }
  return value;
}

} // namespace

std::string format_double(double value) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) {
    throw InvalidParameter("cannot format value");
  }
  return {buf.data(), ptr};
}

void write_path_csv(std::ostream &out, const SampledPath &path) {
  out << 't';
  for (int c = 0; c < path.dim(); ++c) {
    out << ",v" << c;
  }
  out << '\n';
  for (std::size_t i = 0; i < path.size(); ++i) {
    out << format_double(path.grid().time(i));
    const auto col = path.at(i);
    for (int c = 0; c < path.dim(); ++c) {
      out << ',' << format_double(col(c));
    }
    out << '\n';
  }
}

void write_path_csv(const std::filesystem::path &file, const SampledPath &path) {
  std::ofstream out(file, std::ios::binary);
  if (!out) {
    throw InvalidParameter("cannot open " + file.string() + " for writing");
  }
  write_path_csv(out, path);
}

SampledPath read_path_csv(std::istream &in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw InvalidParameter("path csv: empty input");
  }
  if (!line.empty() && line.back() == '\r') {
    line.pop_back();
  }
  const auto header = split_fields(line);
  if (header.size() < 2 || header[0] != "t") {
    throw InvalidParameter("path csv: header must be t,v0,...");
  }
  const int dim = static_cast<int>(header.size()) - 1;
  for (int c = 0; c < dim; ++c) {
    if (header[static_cast<std::size_t>(c) + 1] != "v" + std::to_string(c)) {
      throw InvalidParameter("path csv: unexpected column name in header");
    }
  }

  std::vector<double> times;
  std::vector<double> flat;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") {
      continue;
    }
    const auto fields = split_fields(line);
    if (static_cast<int>(fields.size()) != dim + 1) {
      throw InvalidParameter("path csv: row " + std::to_string(row) +
                             " has the wrong number of fields");
    }
    times.push_back(parse_double(fields[0], row));
    for (int c = 0; c < dim; ++c) {
      flat.push_back(parse_double(fields[static_cast<std::size_t>(c) + 1], row));
    }
    ++row;
  }
  if (times.size() < 2) {
    throw InvalidParameter("path csv: need at least two rows");
  }

  const int n_steps = static_cast<int>(times.size()) - 1;
  const double horizon = times.back();
  if (times.front() != 0.0) {
    throw InvalidParameter("path csv: time column must start at 0");
  }
  const TimeGrid grid(horizon, n_steps);
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (std::abs(times[i] - grid.time(i)) > kSpacingTolerance * horizon) {
      throw InvalidParameter("path csv: non-uniform spacing at row " +
                             std::to_string(i));
    }
  }

  Eigen::MatrixXd values(dim, static_cast<Eigen::Index>(times.size()));
  for (Eigen::Index i = 0; i < values.cols(); ++i) {
    for (Eigen::Index c = 0; c < dim; ++c) {
      values(c, i) = flat[static_cast<std::size_t>(i * dim + c)];
    }
  }
  return {grid, std::move(values)};
}

SampledPath read_path_csv(const std::filesystem::path &file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) {
    throw InvalidParameter("cannot open " + file.string());
  }
  return read_path_csv(in);
}

} // namespace assim
