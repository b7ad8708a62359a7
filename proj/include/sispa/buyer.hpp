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
// The online buyer's problem and the set-to-bid reduction: a buyer-side
// learner picks bundles before prices are revealed; its choices are turned
// into simultaneous-auction bids through the XOS oracle, which preserves
// utility pointwise and never overbids.

#ifndef SISPA_BUYER_HPP
#define SISPA_BUYER_HPP

#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "sispa/common.hpp"
#include "sispa/ftpl.hpp"
#include "sispa/rng.hpp"
#include "sispa/valuation.hpp"

namespace sispa {

/// Reward from buying S at prices theta: v(S) - theta(S). May be negative.
inline double buyer_utility(const Valuation& val, ItemSet s, const Vec& theta) {
  return value(val, s) - sum_over(s, theta);
}

/// Bid the XOS clause of S on the items of S and zero elsewhere. The
/// resulting bid vector never overbids and its auction utility dominates
/// buyer_utility(val, S, theta) for every threshold vector.
inline Vec set_to_bid(const Valuation& val, ItemSet s) {
  const int m = items(val);
  Vec bid(m, 0.0);
  if (s == kEmptySet) return bid;
  const Vec clause = xos_oracle(val, s);
  for (int j = 0; j < m; ++j) {
    if (contains(s, j)) bid[j] = clause[j];
  }
  return bid;
}

/// Running threshold sums and the derived average price vector.
class EnvyBenchmark {
 public:
  explicit EnvyBenchmark(int m) : sums_(m, 0.0) {}

  void add(const Vec& theta) {
    for (std::size_t j = 0; j < sums_.size(); ++j) sums_[j] += theta[j];
    ++rounds_;
  }

  int rounds() const { return rounds_; }
  const Vec& sums() const { return sums_; }

  Vec average() const {
    Vec avg = sums_;
    if (rounds_ > 0) {
      for (double& x : avg) x /= rounds_;
    }
    return avg;
  }

 private:
  Vec sums_;
  int rounds_ = 0;
};

/// Best bundle value at the average prices, with the bundle's value
/// discounted by 1/alpha in the approximate variant.
inline double envy_benchmark_value(const Valuation& val, const Vec& average_theta,
                                   double alpha = 1.0,
                                   int demand_cap = kDefaultDemandBruteForceCap) {
  if (alpha == 1.0) return demand_oracle(val, average_theta, demand_cap).utility;
  return demand_oracle(scaled(val, 1.0 / alpha), average_theta, demand_cap).utility;
}

/// Envy gap of a finished run: benchmark at average prices minus the realized
/// average utility. Nonnegative up to numerical noise for honest accounting.
inline double envy_gap(const Valuation& val, const EnvyBenchmark& bench,
                       double average_utility, double alpha = 1.0,
                       int demand_cap = kDefaultDemandBruteForceCap) {
  if (bench.rounds() == 0) throw std::invalid_argument("envy gap: empty history");
  return envy_benchmark_value(val, bench.average(), alpha, demand_cap) - average_utility;
}

/// No-envy bidder for XOS valuations with demand oracles: FTPL on the buyer's
/// problem, bids via set_to_bid.
class NoEnvyBidder {
 public:
  NoEnvyBidder(Valuation val, double epsilon, bool fresh_samples, std::uint64_t seed,
               int demand_cap = kDefaultDemandBruteForceCap)
      : learner_(std::move(val), epsilon, fresh_samples, seed, demand_cap) {}

  ItemSet choose_set() { return learner_.choose(); }
  Vec bid_for(ItemSet s) const { return set_to_bid(learner_.valuation(), s); }
  void observe(const Vec& theta) { learner_.observe(theta); }
  const Valuation& valuation() const { return learner_.valuation(); }

 private:
  BuyerFtplLearner learner_;
};

/// Multiplicative-weights baseline for capacitated XOS: every bundle of size
/// at most capacity is an expert; rewards are rescaled to [0,1] using the a
/// priori range [-mD, H].
class MwCapacitatedLearner {
 public:
  MwCapacitatedLearner(Valuation val, int capacity, int T, double H, double D,
                       std::uint64_t seed, double learning_rate = 0.0,
                       std::size_t expert_cap = 1'000'000)
      : val_(std::move(val)), m_(items(val_)), H_(H), D_(D), seed_(seed) {
    if (capacity < 0) throw std::invalid_argument("mw: negative capacity");
    std::size_t count = 1;  // the empty set
    for (int k = 1; k <= std::min(capacity, m_); ++k) {
      count += choose_count(m_, k);
      if (count > expert_cap) {
        throw InstanceTooLarge("mw: expert count exceeds cap");
      }
    }
    experts_.reserve(count);
    ItemSet current = kEmptySet;
    enumerate_experts(current, 0, std::min(capacity, m_));
    cumulative_scaled_.assign(experts_.size(), 0.0);
    cumulative_raw_.assign(experts_.size(), 0.0);
    eta_ = learning_rate > 0.0
               ? learning_rate
               : std::sqrt(8.0 * std::log(static_cast<double>(experts_.size())) /
                           std::max(1, T));
  }

  std::size_t expert_count() const { return experts_.size(); }
  const std::vector<ItemSet>& experts() const { return experts_; }

  /// Samples a bundle from the current exponential-weights distribution.
  ItemSet choose() {
    const std::vector<double> probs = distribution();
    Rng rng = make_rng(seed_, static_cast<std::uint64_t>(round_) + 1);
    double u = uniform_unit(rng);
    for (std::size_t e = 0; e < experts_.size(); ++e) {
      u -= probs[e];
      if (u <= 0.0) return experts_[e];
    }
    return experts_.back();
  }

  /// Feeds the revealed thresholds; returns the distribution's expected
  /// buyer utility for this round (exact, so regret checks carry no
  /// sampling noise).
  double observe(const Vec& theta) {
    const std::vector<double> probs = distribution();
    double expected = 0.0;
    const double lo = -static_cast<double>(m_) * D_;
    const double range = H_ + static_cast<double>(m_) * D_;
    for (std::size_t e = 0; e < experts_.size(); ++e) {
      const double u = buyer_utility(val_, experts_[e], theta);
      expected += probs[e] * u;
      cumulative_raw_[e] += u;
      cumulative_scaled_[e] += (u - lo) / range;
    }
    ++round_;
    return expected;
  }

  /// Best fixed expert so far and its cumulative buyer utility.
  std::pair<ItemSet, double> best_expert() const {
    std::size_t arg = 0;
    for (std::size_t e = 1; e < experts_.size(); ++e) {
      if (cumulative_raw_[e] > cumulative_raw_[arg]) arg = e;
    }
    return {experts_[arg], cumulative_raw_[arg]};
  }

  std::vector<double> distribution() const {
    double top = cumulative_scaled_.empty() ? 0.0 : cumulative_scaled_[0];
    for (double w : cumulative_scaled_) top = std::max(top, w);
    std::vector<double> probs(experts_.size());
    double total = 0.0;
    for (std::size_t e = 0; e < experts_.size(); ++e) {
      probs[e] = std::exp(eta_ * (cumulative_scaled_[e] - top));
      total += probs[e];
    }
    for (double& p : probs) p /= total;
    return probs;
  }

  double learning_rate() const { return eta_; }

 private:
  static std::size_t choose_count(int n, int k) {
    std::size_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
  }

  void enumerate_experts(ItemSet& current, int next_item, int remaining) {
    experts_.push_back(current);
    if (remaining == 0) return;
    for (int j = next_item; j < m_; ++j) {
      current |= ItemSet{1} << j;
      enumerate_experts(current, j + 1, remaining - 1);
      current &= ~(ItemSet{1} << j);
    }
  }

  Valuation val_;
  int m_;
  double H_, D_;
  std::uint64_t seed_;
  double eta_ = 0.0;
  int round_ = 0;
  std::vector<ItemSet> experts_;
  std::vector<double> cumulative_scaled_;
  std::vector<double> cumulative_raw_;
};

}  // namespace sispa

#endif  // SISPA_BUYER_HPP
