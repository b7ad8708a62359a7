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
//
// Set-cover to optimal-bidding reduction and its arithmetic identities. An
// r-regular cover with k elements becomes a bidding instance with threshold
// vectors in {1,H}^m, H = k^2 m^2, unit-demand value v = 2km. Bids collapse
// to {0,2}^m, the exact optimum satisfies OPT = v - OPT_c r/k, and a
// no-regret learner run against i.i.d. samples estimates OPT.

#ifndef SISPA_HARDNESS_HPP
#define SISPA_HARDNESS_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "sispa/common.hpp"
#include "sispa/rng.hpp"

namespace sispa {

/// k elements, m sets of size exactly r each; elements are 0-based here
/// (the text file format is 1-based).
struct SetCoverInstance {
  int k = 0;
  int r = 0;
  std::vector<std::vector<int>> sets;

  int set_count() const { return static_cast<int>(sets.size()); }

  void validate() const {
    if (k < 1) throw std::invalid_argument("set cover: need at least one element");
    if (r < 1 || r > k) throw std::invalid_argument("set cover: set size out of range");
    if (sets.empty()) throw std::invalid_argument("set cover: no sets");
    std::vector<bool> covered(k, false);
    for (const auto& s : sets) {
      if (static_cast<int>(s.size()) != r) {
        throw std::invalid_argument("set cover: instance is not r-regular");
      }
      std::vector<int> sorted = s;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw std::invalid_argument("set cover: repeated element inside a set");
      }
      for (int t : s) {
        if (t < 0 || t >= k) throw std::invalid_argument("set cover: element out of range");
        covered[t] = true;
      }
    }
    for (bool c : covered) {
      if (!c) throw std::invalid_argument("set cover: uncovered element, no winning item-set exists");
    }
  }
};

/// The reduced optimal-bidding instance: one item per set, one threshold
/// vector per element (uniform support), with T_i the items whose sets
/// contain element i. Vector i prices the items of T_i at 1 and all other
/// items at H.
struct BiddingHardnessInstance {
  int m = 0;
  int k = 0;
  int r = 0;
  double v = 0.0;
  double H = 0.0;
  std::vector<ItemSet> t_sets;

  Vec threshold_vector(int i) const {
    Vec theta(m, H);
    for (ItemSet rest = t_sets[i]; rest != 0; rest &= rest - 1) {
      theta[std::countr_zero(rest)] = 1.0;
    }
    return theta;
  }
};

inline BiddingHardnessInstance reduce(const SetCoverInstance& sc) {
  sc.validate();
  BiddingHardnessInstance inst;
  inst.m = sc.set_count();
  inst.k = sc.k;
  inst.r = sc.r;
  inst.v = 2.0 * sc.k * inst.m;
  inst.H = static_cast<double>(sc.k) * sc.k * inst.m * inst.m;
  inst.t_sets.assign(sc.k, kEmptySet);
  for (int j = 0; j < inst.m; ++j) {
    for (int t : sc.sets[j]) inst.t_sets[t] |= ItemSet{1} << j;
  }
  return inst;
}

/// Utility of the {0,2}-style strategy "bid on exactly S" against the uniform
/// threshold distribution: v (1 - #{T_i disjoint from S}/k) - (1/k) sum |T_i & S|.
inline double bidding_set_utility(const BiddingHardnessInstance& inst, ItemSet s) {
  int losses = 0;
  long long paid = 0;
  for (ItemSet t : inst.t_sets) {
    if ((t & s) == 0) {
      ++losses;
    }
    paid += set_size(t & s);
  }
  return inst.v * (1.0 - static_cast<double>(losses) / inst.k) -
         static_cast<double>(paid) / inst.k;
}

/// Expected utility of an arbitrary bid vector against the instance's
/// threshold distribution; used to confirm that nothing outside {0,2}^m helps.
inline double expected_bid_utility(const BiddingHardnessInstance& inst, const Vec& bid) {
  double total = 0.0;
  for (int i = 0; i < inst.k; ++i) {
    ItemSet won = kEmptySet;
    double paid = 0.0;
    for (int j = 0; j < inst.m; ++j) {
      const double theta = contains(inst.t_sets[i], j) ? 1.0 : inst.H;
      if (bid[j] > theta) {
        won |= ItemSet{1} << j;
        paid += theta;
      }
    }
    total += inst.v * (won != kEmptySet ? 1.0 : 0.0) - paid;
  }
  return total / inst.k;
}

struct BiddingOpt {
  double opt = 0.0;
  ItemSet arg = kEmptySet;
};

/// Exact optimum over the collapsed strategy space {0,2}^m, ties resolved to
/// the lexicographically smallest item set.
inline BiddingOpt solve_bidding_exact(const BiddingHardnessInstance& inst, int cap = 25) {
  if (inst.m > cap) {
    throw InstanceTooLarge("bidding opt: 2^" + std::to_string(inst.m) + " exceeds cap");
  }
  BiddingOpt best{bidding_set_utility(inst, kEmptySet), kEmptySet};
  const ItemSet all = full_set(inst.m);
  for (ItemSet s = 1; s <= all; ++s) {
    const double u = bidding_set_utility(inst, s);
    if (u > best.opt + 1e-12 ||
        (std::abs(u - best.opt) <= 1e-12 && lex_less(s, best.arg))) {
      best = {u, s};
    }
  }
  return best;
}

/// Exact minimum set cover size by enumerating subsets of the m sets;
/// independent of the bidding enumeration so the OPT identity is a genuine
/// cross-check.
inline int set_cover_opt(const SetCoverInstance& sc, int cap = 25) {
  sc.validate();
  const int m = sc.set_count();
  if (m > cap) throw InstanceTooLarge("set cover opt: 2^" + std::to_string(m) + " exceeds cap");
  std::vector<std::uint32_t> element_masks(m, 0);
  for (int j = 0; j < m; ++j) {
    for (int t : sc.sets[j]) element_masks[j] |= std::uint32_t{1} << t;
  }
  const std::uint32_t want = (sc.k >= 32) ? ~std::uint32_t{0} : ((std::uint32_t{1} << sc.k) - 1);
  int best = m + 1;
  const ItemSet all = full_set(m);
  for (ItemSet pick = 1; pick <= all; ++pick) {
    if (set_size(pick) >= best) continue;
    std::uint32_t covered = 0;
    for (ItemSet rest = pick; rest != 0; rest &= rest - 1) {
      covered |= element_masks[std::countr_zero(rest)];
    }
    if (covered == want) best = set_size(pick);
  }
  return best;
}

/// Three-approximation of the cover optimum recovered from an additively
/// approximate bidding value: Q = (2k-1)(v-APX)/(2r), with
/// Q <= OPT_c <= 3Q whenever |APX - OPT| <= 1/(2k).
inline double cover_from_apx(const BiddingHardnessInstance& inst, double apx) {
  return (2.0 * inst.k - 1.0) * (inst.v - apx) / (2.0 * inst.r);
}

/// Random r-regular cover. The first ceil(k/r) sets tile the elements in
/// shuffled order (wrapping), which guarantees full coverage; the remaining
/// sets are uniform r-subsets.
inline SetCoverInstance random_regular_cover(int k, int m, int r, Rng& rng) {
  if (r < 1 || r > k) throw std::invalid_argument("cover generator: need 1 <= r <= k");
  const int needed = (k + r - 1) / r;
  if (m < needed) {
    throw std::invalid_argument("cover generator: too few sets to cover all elements");
  }
  std::vector<int> order(k);
  for (int i = 0; i < k; ++i) order[i] = i;
  for (int i = k - 1; i > 0; --i) std::swap(order[i], order[uniform_int(rng, 0, i)]);

  SetCoverInstance sc;
  sc.k = k;
  sc.r = r;
  sc.sets.reserve(m);
  for (int j = 0; j < needed; ++j) {
    std::vector<int> s(r);
    for (int i = 0; i < r; ++i) s[i] = order[(j * r + i) % k];
    std::sort(s.begin(), s.end());
    sc.sets.push_back(std::move(s));
  }
  for (int j = needed; j < m; ++j) {
    std::vector<int> pool(k);
    for (int i = 0; i < k; ++i) pool[i] = i;
    for (int i = 0; i < r; ++i) std::swap(pool[i], pool[uniform_int(rng, i, k - 1)]);
    std::vector<int> s(pool.begin(), pool.begin() + r);
    std::sort(s.begin(), s.end());
    sc.sets.push_back(std::move(s));
  }
  return sc;
}

/// Follow-the-leader over the collapsed strategy space: each round plays the
/// cumulative-utility argmax against the observed winnable-item masks, with
/// the lexicographically smallest set on ties (the empty set in round one).
class FtlBiddingLearner {
 public:
  FtlBiddingLearner(double v, int m, int cap = 25) : v_(v), m_(m) {
    if (m_ > cap) throw InstanceTooLarge("ftl: 2^" + std::to_string(m_) + " exceeds cap");
    cumulative_.assign(std::size_t{1} << m_, 0.0);
  }

  ItemSet choose() const {
    ItemSet best = kEmptySet;
    double best_u = cumulative_[0];
    for (ItemSet s = 1; s < cumulative_.size(); ++s) {
      const double u = cumulative_[s];
      if (u > best_u + 1e-12 || (std::abs(u - best_u) <= 1e-12 && lex_less(s, best))) {
        best_u = u;
        best = s;
      }
    }
    return best;
  }

  void observe(ItemSet winnable) {
    for (ItemSet s = 0; s < cumulative_.size(); ++s) {
      const ItemSet hit = s & winnable;
      cumulative_[s] += v_ * (hit != kEmptySet ? 1.0 : 0.0) - set_size(hit);
    }
  }

 private:
  double v_;
  int m_;
  std::vector<double> cumulative_;
};

struct EstimatorResult {
  double estimate = 0.0;        // grand mean of per-repetition average utilities
  double sandwich_half_width = 0.0;  // measured regret + concentration term
  double concentration_term = 0.0;   // 2km sqrt(2 ln(2(T+2)/zeta) / T)
  double measured_regret = 0.0;      // average shortfall vs the best fixed set
};

/// Runs a learner N times against one sequence of T i.i.d. threshold draws
/// and averages the average utilities. Learners receive the winnable-item
/// mask (items priced at 1) each round and answer with the set they bid on
/// at the fixed level in (1, H).
template <class LearnerFactory>
EstimatorResult regret_to_opt_estimator(const BiddingHardnessInstance& inst,
                                        LearnerFactory&& make_learner, int T, int N,
                                        double zeta, std::uint64_t seed,
                                        double bid_level = 2.0) {
  if (T < 1 || N < 1) throw std::invalid_argument("estimator: T and N must be positive");
  if (!(bid_level > 1.0) || !(bid_level < inst.H)) {
    throw std::invalid_argument("estimator: bid level must lie strictly inside (1, H)");
  }
  Rng seq_rng = make_rng(seed, 0);
  std::vector<int> draws(T);
  for (int& i : draws) i = uniform_int(seq_rng, 0, inst.k - 1);

  auto round_utility = [&](ItemSet s, int i) {
    const ItemSet hit = s & inst.t_sets[i];
    return inst.v * (hit != kEmptySet ? 1.0 : 0.0) - set_size(hit);
  };

  double grand = 0.0;
  for (int z = 1; z <= N; ++z) {
    auto learner = make_learner(make_rng(seed, static_cast<std::uint64_t>(z)));
    double total = 0.0;
    for (int t = 0; t < T; ++t) {
      const ItemSet s = learner.choose();
      total += round_utility(s, draws[t]);
      learner.observe(inst.t_sets[draws[t]]);
    }
    grand += total / T;
  }
  EstimatorResult res;
  res.estimate = grand / N;

  // Best fixed set on the realized sequence, for the measured regret term.
  std::vector<int> counts(inst.k, 0);
  for (int i : draws) ++counts[i];
  double best_fixed = 0.0;
  const ItemSet all = full_set(inst.m);
  for (ItemSet s = 0; s <= all; ++s) {
    double total = 0.0;
    for (int i = 0; i < inst.k; ++i) {
      if (counts[i] > 0) total += counts[i] * round_utility(s, i);
    }
    best_fixed = std::max(best_fixed, total / T);
  }
  res.measured_regret = std::max(0.0, best_fixed - res.estimate);
  res.concentration_term = 2.0 * inst.k * inst.m *
                           std::sqrt(2.0 * std::log(2.0 * (T + 2) / zeta) / T);
  res.sandwich_half_width = res.measured_regret + res.concentration_term;
  return res;
}

}  // namespace sispa

#endif  // SISPA_HARDNESS_HPP
