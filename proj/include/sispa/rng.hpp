// Copyright 2026 The sispa Authors.
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

#ifndef SISPA_RNG_HPP
#define SISPA_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace sispa {

using Rng = std::mt19937_64;

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace detail

/// Derives an independent stream from a master seed and a stream id. Streams
/// are used for parallel repetitions and for per-round redraws, so results do
/// not depend on scheduling order.
inline Rng make_rng(std::uint64_t master_seed, std::uint64_t stream = 0) {
  return Rng(detail::splitmix64(detail::splitmix64(master_seed) ^ stream));
}

/// Uniform draw on (0, 1]; the closed right end keeps -log(u) finite.
inline double uniform_unit(Rng& rng) {
  const double u = (rng() >> 11) * 0x1.0p-53;  // [0, 1)
  return 1.0 - u;
}

inline double uniform_on(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * ((rng() >> 11) * 0x1.0p-53);
}

inline int uniform_int(Rng& rng, int lo, int hi) {  // inclusive ends
  std::uniform_int_distribution<int> d(lo, hi);
  return d(rng);
}

/// Exponential(rate) via inverse CDF: x = -ln(u)/rate with u on (0,1].
inline double exponential_draw(Rng& rng, double rate) {
  return -std::log(uniform_unit(rng)) / rate;
}

/// Number of tails before the first head of a p-coin; support {0,1,2,...}.
inline long long geometric_draw(Rng& rng, double p) {
  const double u = uniform_unit(rng);
  if (p >= 1.0) return 0;
  // P(X >= n) = (1-p)^n; invert the survival function.
  const double n = std::floor(std::log(u) / std::log1p(-p));
  return static_cast<long long>(n);
}

}  // namespace sispa

#endif  // SISPA_RNG_HPP
