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

#ifndef ASSIM_RNG_HPP
#define ASSIM_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>

namespace assim {

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/**
 * Counter-based generator ("SplitMix64-CB").
 *
 * The word at position `counter` of stream `stream` under seed `seed` is
 *
 *     key  = mix64(seed ^ mix64(stream))
 *     word = mix64(key + mix64(counter))
 *
 * so any entry can be drawn without touching the others, and replicates use
 * `split(k)` to obtain disjoint streams from one seed. Uniforms take the top
 * 53 bits, offset by half an ulp so they lie strictly in (0, 1). Gaussians use
 * the cosine branch of Box-Muller on the uniform pair at counters 2c and 2c+1.
 *
 * The generator holds no mutable state and is safe to share across threads.
 */
class CounterRng {
public:
  explicit constexpr CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed), stream_(stream), key_(mix64(seed ^ mix64(stream))) {}

  constexpr std::uint64_t seed() const noexcept { return seed_; }
  constexpr std::uint64_t stream() const noexcept { return stream_; }

  constexpr CounterRng split(std::uint64_t stream) const noexcept {
    return CounterRng(seed_, mix64(stream_ + 0x632be59bd9b4e019ULL) ^ stream);
  }

  constexpr std::uint64_t word(std::uint64_t counter) const noexcept {
    return mix64(key_ + mix64(counter));
  }

  double uniform(std::uint64_t counter) const noexcept {
    return (static_cast<double>(word(counter) >> 11) + 0.5) * 0x1.0p-53;
  }

  double gaussian(std::uint64_t counter) const noexcept {
    const double u1 = uniform(2 * counter);
    const double u2 = uniform(2 * counter + 1);
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t key_;
};

} // namespace assim

#endif // ASSIM_RNG_HPP
