// Copyright 2026 The tagnoise Authors
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

#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace tagnoise {

/// Splitmix64 step; the basis of all seed derivation in the toolkit.
std::uint64_t splitmix64(std::uint64_t& state);

/// Derives a child seed from a parent seed and a tag path.
///
/// Every randomized stage owns a distinct tag path under the master seed
/// (e.g. derive(master, "perm", repeat)), so adding repeats or lambda values
/// never perturbs the seeds of earlier ones.
std::uint64_t derive_seed(std::uint64_t parent, std::string_view tag);
std::uint64_t derive_seed(std::uint64_t parent, std::string_view tag, std::uint64_t a);
std::uint64_t derive_seed(std::uint64_t parent, std::string_view tag, std::uint64_t a,
                          std::uint64_t b);

/// Deterministic xoshiro256**-free generator: a splitmix64 stream.
///
/// All samplers are hand-rolled on top of the raw 64-bit stream so results
/// are identical across standard libraries and platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return splitmix64(state_); }

  /// Uniform in [0, n), n >= 1. Unbiased via rejection.
  std::uint64_t below(std::uint64_t n);

  /// Uniform real in [0, 1) with 53-bit resolution.
  double real01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return real01() < p; }

  /// Uniform integer in [lo, hi] inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  /// Poisson-distributed count (Knuth multiplication method; fine for
  /// the small means used here).
  std::uint64_t poisson(double mean);

  /// Normal via Box-Muller (no cached spare, for reproducibility).
  double normal(double mean, double sd);

  /// Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t state_;
};

}  // namespace tagnoise
