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

#include "tagnoise/rng.hpp"

#include <cmath>

namespace tagnoise {

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

std::uint64_t fnv1a(std::string_view s, std::uint64_t h = kFnvOffset) {
  for (unsigned char c : s) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

std::uint64_t mix(std::uint64_t parent, std::uint64_t tag_hash) {
  std::uint64_t s = parent ^ tag_hash;
  return splitmix64(s);
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t parent, std::string_view tag) {
  return mix(parent, fnv1a(tag));
}

std::uint64_t derive_seed(std::uint64_t parent, std::string_view tag, std::uint64_t a) {
  std::uint64_t h = fnv1a(tag);
  h ^= a + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return mix(parent, h);
}

std::uint64_t derive_seed(std::uint64_t parent, std::string_view tag, std::uint64_t a,
                          std::uint64_t b) {
  std::uint64_t h = fnv1a(tag);
  h ^= a + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  h ^= b + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return mix(parent, h);
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n <= 1) return 0;
  // Rejection sampling over the largest multiple of n that fits in 64 bits.
  std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return x % n;
}

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
  std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<std::int64_t>(below(span));
}

std::uint64_t Rng::poisson(double mean) {
  if (mean <= 0.0) return 0;
  double limit = std::exp(-mean);
  double p = 1.0;
  std::uint64_t k = 0;
  do {
    ++k;
    p *= real01();
  } while (p > limit);
  return k - 1;
}

double Rng::normal(double mean, double sd) {
  double u1 = real01();
  double u2 = real01();
  // Guard against log(0).
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  return mean + sd * z;
}

}  // namespace tagnoise
