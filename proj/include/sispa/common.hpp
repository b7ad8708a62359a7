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

#ifndef SISPA_COMMON_HPP
#define SISPA_COMMON_HPP

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sispa {

/// Bundle of items encoded as a bitmask; bit j set means item j is in the set.
/// All brute-force paths are guarded well below 32 items.
using ItemSet = std::uint32_t;

constexpr ItemSet kEmptySet = 0;

using Vec = std::vector<double>;

constexpr ItemSet full_set(int m) {
  return m >= 32 ? ~ItemSet{0} : ((ItemSet{1} << m) - 1);
}

constexpr bool contains(ItemSet s, int j) { return (s >> j) & 1u; }

inline int set_size(ItemSet s) { return std::popcount(s); }

/// Sum of v over the items in s.
inline double sum_over(ItemSet s, const Vec& v) {
  double total = 0.0;
  for (ItemSet rest = s; rest != 0; rest &= rest - 1) {
    total += v[std::countr_zero(rest)];
  }
  return total;
}

/// Lexicographic order on the sorted element lists of two sets, so
/// {0} < {0,2} < {1}. Used wherever a deterministic argmax tie-break
/// over subsets is required.
inline bool lex_less(ItemSet a, ItemSet b) {
  while (a != 0 && b != 0) {
    const int ja = std::countr_zero(a);
    const int jb = std::countr_zero(b);
    if (ja != jb) return ja < jb;
    a &= a - 1;
    b &= b - 1;
  }
  return a == 0 && b != 0;
}

inline std::vector<int> set_elements(ItemSet s) {
  std::vector<int> out;
  for (ItemSet rest = s; rest != 0; rest &= rest - 1) {
    out.push_back(std::countr_zero(rest));
  }
  return out;
}

/// Raised when a guarded brute-force path would exceed its configured cap.
class InstanceTooLarge : public std::runtime_error {
 public:
  explicit InstanceTooLarge(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sispa

#endif  // SISPA_COMMON_HPP
