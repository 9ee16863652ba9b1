// Copyright 2026 The infauct Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "infauct/rng.hpp"

namespace infauct {

// Trials are split into fixed-size blocks; block b always draws from
// substream (seed, tag, b) and partial results are merged in block order.
// The merged result is therefore identical for any worker count.
inline constexpr std::uint64_t kTrialBlock = 4096;

// Worker count: INFAUCT_THREADS if set to a positive integer, otherwise the
// hardware concurrency.
unsigned worker_count();

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

// Running first and second moments of per-trial outcomes.
struct Moments {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::uint64_t count = 0;

  void add(double x) {
    sum += x;
    sum_sq += x * x;
    ++count;
  }
  void merge(const Moments& other) {
    sum += other.sum;
    sum_sq += other.sum_sq;
    count += other.count;
  }
  Estimate estimate() const;
};

// Runs fn(block_index, begin, end) for every block of [0, trials) on a pool
// of workers and returns the per-block results in block order.
template <typename Result, typename Fn>
std::vector<Result> map_blocks(std::uint64_t trials, Fn&& fn) {
  const std::uint64_t num_blocks = (trials + kTrialBlock - 1) / kTrialBlock;
  std::vector<Result> results(num_blocks);
  if (num_blocks == 0) return results;

  const unsigned workers =
      static_cast<unsigned>(std::min<std::uint64_t>(worker_count(), num_blocks));
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto work = [&] {
    for (;;) {
      const std::uint64_t b = next.fetch_add(1);
      if (b >= num_blocks) return;
      try {
        const std::uint64_t begin = b * kTrialBlock;
        const std::uint64_t end = std::min(trials, begin + kTrialBlock);
        results[b] = fn(b, begin, end);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(num_blocks);
      }
    }
  };

  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

// Monte Carlo mean of trial(rng) over `trials` draws.
template <typename TrialFn>
Estimate mc_mean(std::uint64_t trials, std::uint64_t seed, StreamTag tag, TrialFn&& trial) {
  auto blocks = map_blocks<Moments>(trials, [&](std::uint64_t b, std::uint64_t begin,
                                                std::uint64_t end) {
    Rng rng(seed, tag, b);
    Moments m;
    for (std::uint64_t t = begin; t < end; ++t) m.add(trial(rng));
    return m;
  });
  Moments total;
  for (const auto& m : blocks) total.merge(m);
  return total.estimate();
}

// Collects one value per trial, in trial order.
template <typename TrialFn>
std::vector<double> mc_collect(std::uint64_t trials, std::uint64_t seed, StreamTag tag,
                               TrialFn&& trial) {
  auto blocks = map_blocks<std::vector<double>>(
      trials, [&](std::uint64_t b, std::uint64_t begin, std::uint64_t end) {
        Rng rng(seed, tag, b);
        std::vector<double> out;
        out.reserve(end - begin);
        for (std::uint64_t t = begin; t < end; ++t) out.push_back(trial(rng));
        return out;
      });
  std::vector<double> all;
  all.reserve(trials);
  for (auto& block : blocks) all.insert(all.end(), block.begin(), block.end());
  return all;
}

}  // namespace infauct
