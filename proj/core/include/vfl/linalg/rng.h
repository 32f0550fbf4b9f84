// Copyright 2026 The vflattack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef VFL_LINALG_RNG_H_
#define VFL_LINALG_RNG_H_

#include <array>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string_view>
#include <vector>

namespace vfl {

// SplitMix64 finalizer: z = (x + 0x9E3779B97F4A7C15); then
// z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9; z = (z ^ (z >> 27)) * 0x94D049BB133111EB;
// return z ^ (z >> 31).
std::uint64_t splitmix64(std::uint64_t x);

// 64-bit FNV-1a over the bytes of `label`.
std::uint64_t fnv1a64(std::string_view label);

// Seeded pseudo-random stream, identical on every platform.
//
// Core generator is xoshiro256**:
//   result = rotl(s1 * 5, 7) * 9
//   t = s1 << 17
//   s2 ^= s0; s3 ^= s1; s1 ^= s2; s0 ^= s3; s2 ^= t; s3 = rotl(s3, 45)
// The four state words are successive SplitMix64 outputs of the seed
// (s_i = splitmix64(seed + i * 0x9E3779B97F4A7C15)).
//
// uniform() = (next_u64() >> 11) * 2^-53, in [0, 1).
// normal() uses Box-Muller on pairs (u1, u2) with u1 drawn from (0, 1]:
//   r = sqrt(-2 ln u1); returns r cos(2 pi u2), caches r sin(2 pi u2).
// uniform_int(n) rejects draws above the largest multiple of n.
//
// Not thread-safe; parallel users fork() child streams instead of sharing.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64();
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }
  // Uniform integer in [0, n). n must be positive.
  std::uint64_t uniform_int(std::uint64_t n);

  // Child stream depending only on this stream's seed and the label, not on
  // how many values have been drawn so far.
  Rng fork(std::string_view label) const;
  Rng fork(std::uint64_t label) const;

  // Hash of a master seed and a sequence of indices, e.g. (fraction, trial).
  static std::uint64_t derive_seed(std::uint64_t master,
                                   std::initializer_list<std::uint64_t> path);

  // Fisher-Yates using uniform_int, so the order is platform independent.
  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(uniform_int(i));
      std::swap(items[i - 1], items[j]);
    }
  }
  template <typename T>
  void shuffle(std::vector<T>& items) {
    shuffle(std::span<T>(items));
  }

  // Identity permutation of [0, n) shuffled.
  std::vector<std::size_t> permutation(std::size_t n);

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> state_;
  bool has_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

}  // namespace vfl

#endif  // VFL_LINALG_RNG_H_
