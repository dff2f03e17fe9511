// Copyright 2026 The Uniqueness Toolkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * Deterministic random substreams and block-sharded parallel loops.
 *
 * Every Monte Carlo computation in the toolkit is split into fixed-size
 * blocks. Block b draws from its own mt19937_64 engine whose seed is a
 * SplitMix64 hash of (seed, b). Shards own contiguous runs of blocks, so the
 * sample stream and every block-wise reduction are independent of the number
 * of shards.
 */
#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <random>
#include <thread>
#include <vector>

namespace uniqueness {

using Engine = std::mt19937_64;

inline constexpr std::size_t kBlockSize = 4096;

/// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of substream `stream` under master seed `seed`.
constexpr std::uint64_t substream_seed(std::uint64_t seed,
                                       std::uint64_t stream) noexcept {
  return splitmix64(splitmix64(seed) ^ splitmix64(~stream));
}

inline Engine make_engine(std::uint64_t seed, std::uint64_t stream) {
  return Engine(substream_seed(seed, stream));
}

/// Uniform double in [0, 1) built from the top 53 bits of one draw.
inline double uniform01(Engine& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

inline std::size_t block_count(std::size_t n) {
  return (n + kBlockSize - 1) / kBlockSize;
}

/**
 * Runs body(block_index, begin, end) for every block of [0, n), spreading
 * the blocks over `shards` threads. The body must only write to state owned
 * by its block. Exceptions from any shard are rethrown on the caller.
 */
inline void for_each_block(
    std::size_t n, unsigned shards,
    const std::function<void(std::size_t, std::size_t, std::size_t)>& body) {
  const std::size_t blocks = block_count(n);
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(shards, blocks));
  auto run_range = [&](std::size_t first, std::size_t last) {
    for (std::size_t b = first; b < last; ++b) {
      const std::size_t begin = b * kBlockSize;
      body(b, begin, std::min(n, begin + kBlockSize));
    }
  };
  if (workers == 1) {
    run_range(0, blocks);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t first = blocks * w / workers;
    const std::size_t last = blocks * (w + 1) / workers;
    threads.emplace_back([&, w, first, last] {
      try {
        run_range(first, last);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace uniqueness
