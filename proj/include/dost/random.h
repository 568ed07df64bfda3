/* Copyright 2026 The DOST Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    https://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef DOST_RANDOM_H_
#define DOST_RANDOM_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace dost {

// splitmix64 finalizer. Used to derive independent stream seeds from a base
// seed so that per-sample / per-epoch streams do not depend on draw order.
std::uint64_t splitmix64(std::uint64_t x);

// Seed for stream `index` of family `stream` under `base`.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream,
                          std::uint64_t index);

// Well-defined stream id constants so derived streams never collide.
inline constexpr std::uint64_t kStreamInit = 1;
inline constexpr std::uint64_t kStreamShuffle = 2;
inline constexpr std::uint64_t kStreamSynthPatterns = 3;
inline constexpr std::uint64_t kStreamSynthSample = 4;
inline constexpr std::uint64_t kStreamNoise = 5;

// mt19937_64 with portable conversions. The standard distributions are
// implementation-defined, so every draw used for reproducible output goes
// through the methods below instead.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer in [0, n). Rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t n);

  bool bernoulli(double p) { return uniform01() < p; }

  // Box-Muller, one draw per call (the paired value is discarded so the
  // stream position is a pure function of the call count).
  double normal(double mean, double stddev);

  // Fisher-Yates over `items`.
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace dost

#endif  // DOST_RANDOM_H_
