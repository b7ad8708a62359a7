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

#ifndef SISPA_METRICS_HPP
#define SISPA_METRICS_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <variant>
#include <vector>

#include "sispa/buyer.hpp"
#include "sispa/common.hpp"
#include "sispa/rng.hpp"
#include "sispa/valuation.hpp"

namespace sispa {

/// Bids placed just above a threshold use this absolute offset. Valid as long
/// as distinct experiment thresholds are at least 2^-10 apart or integral,
/// which all shipped generators guarantee.
inline constexpr double kTieEpsilon = 0x1.0p-20;

// -- Adversary models ----------------------------------------------------------

struct IIDFromSupport {
  std::vector<Vec> support;
  Vec probabilities;

  void validate(double bound_D) const {
    if (support.empty() || support.size() != probabilities.size()) {
      throw std::invalid_argument("adversary: support/probability size mismatch");
    }
    double total = 0.0;
    for (double p : probabilities) {
      if (!(p >= 0.0)) throw std::invalid_argument("adversary: negative probability");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) {
      throw std::invalid_argument("adversary: probabilities must sum to 1");
    }
    for (const Vec& theta : support) {
      for (double x : theta) {
        if (!(x >= 0.0) || x > bound_D + 1e-12) {
          throw std::invalid_argument("adversary: threshold outside [0, D]");
        }
      }
    }
  }
};

struct ObliviousSequence {
  std::vector<Vec> thetas;
};

/// Receives only the learner's past bids, never the current one.
struct AdaptiveCallback {
  std::function<Vec(std::span<const Vec> past_bids)> next;
};

using AdversaryModel = std::variant<IIDFromSupport, ObliviousSequence, AdaptiveCallback>;

/// Draws round t's threshold vector (t is 0-based here).
inline Vec adversary_threshold(const AdversaryModel& adv, int t, Rng& rng,
                               std::span<const Vec> past_bids) {
  struct Visitor {
    int t;
    Rng& rng;
    std::span<const Vec> past;
    Vec operator()(const IIDFromSupport& a) const {
      double u = uniform_unit(rng);
      for (std::size_t i = 0; i < a.support.size(); ++i) {
        u -= a.probabilities[i];
        if (u <= 0.0) return a.support[i];
      }
      return a.support.back();
    }
    Vec operator()(const ObliviousSequence& a) const { return a.thetas[t % a.thetas.size()]; }
    Vec operator()(const AdaptiveCallback& a) const { return a.next(past); }
  };
  return std::visit(Visitor{t, rng, past_bids}, adv);
}

// -- Best fixed benchmarks -------------------------------------------------------

struct FixedBidBenchmark {
  Vec bid;
  double total = 0.0;  // cumulative utility over the history
};

struct FixedSetBenchmark {
  ItemSet set = kEmptySet;
  double average = 0.0;  // per-round value; multiply by T for the cumulative one
};

/// Exact best fixed bid over the canonical grid: per item, 0 or any distinct
/// observed threshold plus the tie epsilon. Utility only depends on which
/// thresholds each bid clears, so the grid loses nothing. The history is
/// compressed to distinct threshold vectors with multiplicities before the
/// scan; adversaries with small supports stay cheap at any horizon.
inline FixedBidBenchmark best_fixed_bid(const Valuation& val, std::span<const Vec> history,
                                        std::uint64_t cap = 10'000'000) {
  if (history.empty()) throw std::invalid_argument("best fixed bid: empty history");
  const int m = items(val);
  std::vector<Vec> levels(m);
  for (int j = 0; j < m; ++j) {
    Vec seen;
    for (const Vec& theta : history) seen.push_back(theta[j]);
    std::sort(seen.begin(), seen.end());
    seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
    levels[j].push_back(0.0);
    for (double v : seen) levels[j].push_back(v + kTieEpsilon);
  }
  double combos = 1.0;
  for (int j = 0; j < m; ++j) combos *= static_cast<double>(levels[j].size());
  if (combos > static_cast<double>(cap)) {
    throw InstanceTooLarge("best fixed bid: candidate grid exceeds cap");
  }

  std::vector<Vec> distinct(history.begin(), history.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::vector<long long> multiplicity(distinct.size(), 0);
  for (const Vec& theta : history) {
    const auto it = std::lower_bound(distinct.begin(), distinct.end(), theta);
    ++multiplicity[it - distinct.begin()];
  }

  FixedBidBenchmark best;
  best.bid.assign(m, 0.0);
  best.total = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> idx(m, 0);
  Vec bid(m, 0.0);
  while (true) {
    for (int j = 0; j < m; ++j) bid[j] = levels[j][idx[j]];
    double total = 0.0;
    for (std::size_t i = 0; i < distinct.size(); ++i) {
      const Vec& theta = distinct[i];
      ItemSet won = kEmptySet;
      double paid = 0.0;
      for (int j = 0; j < m; ++j) {
        if (bid[j] > theta[j]) {
          won |= ItemSet{1} << j;
          paid += theta[j];
        }
      }
      total += multiplicity[i] * (value(val, won) - paid);
    }
    if (total > best.total) best = {bid, total};
    int j = 0;
    while (j < m && ++idx[j] == levels[j].size()) {
      idx[j] = 0;
      ++j;
    }
    if (j == m) break;
  }
  return best;
}

/// Best fixed bundle at the average prices: one demand-oracle call.
inline FixedSetBenchmark best_fixed_set(const Valuation& val, std::span<const Vec> history,
                                        int demand_cap = kDefaultDemandBruteForceCap) {
  if (history.empty()) throw std::invalid_argument("best fixed set: empty history");
  const int m = items(val);
  Vec avg(m, 0.0);
  for (const Vec& theta : history) {
    for (int j = 0; j < m; ++j) avg[j] += theta[j];
  }
  for (double& x : avg) x /= static_cast<double>(history.size());
  const DemandResult d = demand_oracle(val, avg, demand_cap);
  return {d.set, d.utility};
}

// -- Run reports -----------------------------------------------------------------

struct RegretReport {
  double cumulative_utility = 0.0;
  double set_benchmark_total = 0.0;   // T x best fixed bundle at average prices
  ItemSet set_benchmark_arg = kEmptySet;
  double bid_benchmark_total = 0.0;   // exact grid optimum; NaN when the grid is capped
  Vec bid_benchmark_arg;
  double regret_vs_set = 0.0;
  double regret_vs_bid = 0.0;
  double envy_gap = 0.0;              // per-round scale
  double alpha = 1.0;                 // envy discount used for the gap
};

inline RegretReport make_regret_report(const Valuation& val, std::span<const Vec> history,
                                       double cumulative_utility, double alpha = 1.0,
                                       std::uint64_t bid_grid_cap = 10'000'000,
                                       int demand_cap = kDefaultDemandBruteForceCap) {
  RegretReport rep;
  rep.cumulative_utility = cumulative_utility;
  rep.alpha = alpha;
  const double T = static_cast<double>(history.size());
  const FixedSetBenchmark fs = best_fixed_set(val, history, demand_cap);
  rep.set_benchmark_arg = fs.set;
  rep.set_benchmark_total = fs.average * T;
  rep.regret_vs_set = rep.set_benchmark_total - cumulative_utility;
  EnvyBenchmark bench(items(val));
  for (const Vec& theta : history) bench.add(theta);
  rep.envy_gap = envy_gap(val, bench, cumulative_utility / T, alpha, demand_cap);
  try {
    const FixedBidBenchmark fb = best_fixed_bid(val, history, bid_grid_cap);
    rep.bid_benchmark_total = fb.total;
    rep.bid_benchmark_arg = fb.bid;
    rep.regret_vs_bid = fb.total - cumulative_utility;
  } catch (const InstanceTooLarge&) {
    rep.bid_benchmark_total = std::numeric_limits<double>::quiet_NaN();
    rep.regret_vs_bid = std::numeric_limits<double>::quiet_NaN();
  }
  return rep;
}

/// Welfare accounting for a joint run of n no-envy learners.
struct WelfareReport {
  double average_welfare = 0.0;
  double optimal_welfare = 0.0;
  double ratio = 0.0;
  double floor = 0.0;          // (1/2 alpha) Opt - n * measured envy
  double measured_envy = 0.0;  // max over bidders, clamped at zero
  bool floor_satisfied = false;
};

inline WelfareReport make_welfare_report(double average_welfare, double optimal_welfare,
                                         double alpha, std::span<const double> envy_gaps) {
  WelfareReport rep;
  rep.average_welfare = average_welfare;
  rep.optimal_welfare = optimal_welfare;
  rep.ratio = optimal_welfare > 0.0 ? average_welfare / optimal_welfare : 1.0;
  for (double g : envy_gaps) rep.measured_envy = std::max(rep.measured_envy, g);
  rep.floor = optimal_welfare / (2.0 * alpha) -
              static_cast<double>(envy_gaps.size()) * rep.measured_envy;
  rep.floor_satisfied = average_welfare >= rep.floor - 1e-9;
  return rep;
}

}  // namespace sispa

#endif  // SISPA_METRICS_HPP
