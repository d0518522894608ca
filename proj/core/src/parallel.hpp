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


#ifndef ASSIM_SRC_PARALLEL_HPP
#define ASSIM_SRC_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace assim::detail {

/// Calls fn(k) for k in [0, count) on up to `jobs` threads. fn must not throw.
template <typename Fn> void parallel_for(int count, int jobs, Fn &&fn) {
  const int workers = std::min(jobs, count);
  if (workers <= 1) {
    for (int k = 0; k < count; ++k) {
      fn(k);
    }
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int k = next++; k < count; k = next++) {
        fn(k);
      }
    });
  }
  for (auto &t : pool) {
    t.join();
  }
}

} // namespace assim::detail

#endif // ASSIM_SRC_PARALLEL_HPP
