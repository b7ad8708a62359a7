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

#ifndef SISPA_AUCTION_HPP
#define SISPA_AUCTION_HPP

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "sispa/common.hpp"
#include "sispa/valuation.hpp"

namespace sispa {

enum class MechanismKind { kSecondPrice, kFirstPrice, kAllPay };

inline std::string to_string(MechanismKind k) {
  switch (k) {
    case MechanismKind::kSecondPrice: return "second_price";
    case MechanismKind::kFirstPrice: return "first_price";
    case MechanismKind::kAllPay: return "all_pay";
  }
  return "unknown";
}

/// One bid per (bidder, item); rows are bidders.
struct BidProfile {
  std::vector<Vec> bids;

  int bidders() const { return static_cast<int>(bids.size()); }
  int item_count() const { return bids.empty() ? 0 : static_cast<int>(bids[0].size()); }

  void validate() const {
    if (bids.empty()) throw std::invalid_argument("bid profile: no bidders");
    const std::size_t m = bids[0].size();
    if (m == 0) throw std::invalid_argument("bid profile: no items");
    for (const Vec& row : bids) {
      if (row.size() != m) throw std::invalid_argument("bid profile: ragged rows");
      for (double b : row) {
        if (!(b >= 0.0) || !std::isfinite(b)) {
          throw std::invalid_argument("bid profile: bids must be finite and nonnegative");
        }
      }
    }
  }
};

/// Outcome of one simultaneous round: what each bidder won, paid, and gained,
/// plus the realized welfare.
struct RoundRecord {
  std::vector<ItemSet> won;
  Vec payments;
  Vec utilities;
  double welfare = 0.0;
};

/// Highest competing bid per item for one bidder; all zeros when alone.
inline Vec thresholds_for(const BidProfile& profile, int bidder) {
  const int n = profile.bidders();
  const int m = profile.item_count();
  Vec theta(m, 0.0);
  for (int i = 0; i < n; ++i) {
    if (i == bidder) continue;
    for (int j = 0; j < m; ++j) theta[j] = std::max(theta[j], profile.bids[i][j]);
  }
  return theta;
}

/// Runs the m parallel single-item auctions. Each item with a positive top
/// bid goes to its highest bidder, lowest index winning exact ties. Payments:
/// second price pays the highest competing bid, first price pays the own bid
/// on won items, all-pay pays every bid regardless of the outcome.
inline RoundRecord resolve(MechanismKind mechanism, const BidProfile& profile,
                           std::span<const Valuation> valuations) {
  profile.validate();
  const int n = profile.bidders();
  const int m = profile.item_count();
  if (static_cast<int>(valuations.size()) != n) {
    throw std::invalid_argument("resolve: one valuation per bidder required");
  }
  for (const Valuation& v : valuations) {
    if (items(v) != m) throw std::invalid_argument("resolve: valuation item count mismatch");
  }

  RoundRecord rec;
  rec.won.assign(n, kEmptySet);
  rec.payments.assign(n, 0.0);
  rec.utilities.assign(n, 0.0);

  for (int j = 0; j < m; ++j) {
    int winner = -1;
    double top = 0.0, second = 0.0;
    for (int i = 0; i < n; ++i) {
      const double b = profile.bids[i][j];
      if (b > top) {
        second = top;
        top = b;
        winner = i;
      } else if (b > second) {
        second = b;
      }
    }
    if (winner < 0) continue;  // nobody bid on the item
    rec.won[winner] |= ItemSet{1} << j;
    if (mechanism == MechanismKind::kSecondPrice) rec.payments[winner] += second;
    if (mechanism == MechanismKind::kFirstPrice) rec.payments[winner] += top;
  }
  if (mechanism == MechanismKind::kAllPay) {
    for (int i = 0; i < n; ++i) {
      for (double b : profile.bids[i]) rec.payments[i] += b;
    }
  }
  for (int i = 0; i < n; ++i) {
    const double v = value(valuations[i], rec.won[i]);
    rec.utilities[i] = v - rec.payments[i];
    rec.welfare += v;
  }
  return rec;
}

/// Minimum payment needed to win S against thresholds theta. Additive for all
/// three mechanisms: under first price and all-pay the infimum of winning
/// payments on item j is the competing bid itself.
inline double threshold_payment(MechanismKind /*mechanism*/, ItemSet s, const Vec& theta) {
  return sum_over(s, theta);
}

struct WelfareResult {
  double welfare = 0.0;
  std::vector<ItemSet> allocation;
};

/// Exact optimal welfare by enumerating item assignments (each item goes to
/// one bidder or stays unallocated). A single monotone bidder short-circuits
/// to v([m]).
inline WelfareResult optimal_welfare(std::span<const Valuation> valuations,
                                     std::uint64_t cap = 20'000'000) {
  const int n = static_cast<int>(valuations.size());
  if (n < 1) throw std::invalid_argument("optimal welfare: no bidders");
  const int m = items(valuations[0]);
  for (const Valuation& v : valuations) {
    if (items(v) != m) throw std::invalid_argument("optimal welfare: item count mismatch");
  }
  if (n == 1) return {value(valuations[0], full_set(m)), {full_set(m)}};

  double combos = 1.0;
  for (int j = 0; j < m; ++j) combos *= static_cast<double>(n + 1);
  if (combos > static_cast<double>(cap)) {
    throw InstanceTooLarge("optimal welfare: " + std::to_string(n + 1) + "^" +
                           std::to_string(m) + " assignments exceed cap");
  }

  WelfareResult best;
  best.welfare = -1.0;
  std::vector<int> owner(m, 0);  // 0 = unallocated, i+1 = bidder i
  std::vector<ItemSet> sets(n, kEmptySet);
  const std::uint64_t total = static_cast<std::uint64_t>(combos);
  for (std::uint64_t code = 0; code < total; ++code) {
    std::uint64_t rest = code;
    for (int j = 0; j < m; ++j) {
      owner[j] = static_cast<int>(rest % (n + 1));
      rest /= (n + 1);
    }
    std::fill(sets.begin(), sets.end(), kEmptySet);
    for (int j = 0; j < m; ++j) {
      if (owner[j] > 0) sets[owner[j] - 1] |= ItemSet{1} << j;
    }
    double w = 0.0;
    for (int i = 0; i < n; ++i) w += value(valuations[i], sets[i]);
    if (w > best.welfare) best = {w, sets};
  }
  return best;
}

}  // namespace sispa

#endif  // SISPA_AUCTION_HPP
