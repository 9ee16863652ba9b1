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

#include <cstdint>
#include <random>

namespace infauct {

// Identifies an independent family of random streams. Estimators that must
// not share draws (a pilot sample used to pick a price and the sample used to
// evaluate it) use different tags.
enum class StreamTag : std::uint64_t {
  kLemma1 = 1,
  kMenu = 2,
  kBundling = 3,
  kBundlingPilot = 4,
  kPartition = 5,
  kPartitionPilot = 6,
  kMechanism1 = 7,
  kDyadicPartition = 8,
  kCrossValidation = 9,
  kTest = 100,
};

// Uniform source for one block of trials. The engine is mt19937_64 seeded
// through seed_seq from (seed, tag, block), both of which the standard fully
// specifies, so streams are reproducible across platforms and independent of
// how blocks are scheduled onto threads.
class Rng {
 public:
  Rng(std::uint64_t seed, StreamTag tag, std::uint64_t block = 0);

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

inline Rng::Rng(std::uint64_t seed, StreamTag tag, std::uint64_t block) {
  const auto t = static_cast<std::uint64_t>(tag);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(t),    static_cast<std::uint32_t>(t >> 32),
                    static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32)};
  engine_.seed(seq);
}

inline std::uint64_t Rng::below(std::uint64_t bound) {
  // Rejection sampling keeps the result exactly uniform.
  const std::uint64_t limit = bound == 0 ? 0 : (~std::uint64_t{0} - bound + 1) % bound;
  for (;;) {
    const std::uint64_t r = engine_();
    if (r >= limit) return r % bound;
  }
}

}  // namespace infauct
