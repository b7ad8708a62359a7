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
// Drives repeated auction rounds: a single focal learner against an
// adversary model, or several learners bidding against each other. Records
// per-round traces and the final regret/envy/welfare reports.

#ifndef SISPA_EXPERIMENT_HPP
#define SISPA_EXPERIMENT_HPP

#include <memory>
#include <numbers>
#include <span>
#include <vector>

#include "sispa/auction.hpp"
#include "sispa/buyer.hpp"
#include "sispa/ftpl.hpp"
#include "sispa/metrics.hpp"
#include "sispa/rng.hpp"
#include "sispa/rounding.hpp"
#include "sispa/valuation.hpp"

namespace sispa {

inline constexpr double kCoverageAlpha = std::numbers::e / (std::numbers::e - 1.0);

/// A bidder in a repeated simultaneous auction: proposes a bundle, turns it
/// into bids, and learns from the revealed thresholds.
class BidderAgent {
 public:
  virtual ~BidderAgent() = default;
  virtual ItemSet choose_set() = 0;
  virtual Vec bid_for(ItemSet s) const = 0;
  virtual void observe(const Vec& theta) = 0;
  virtual const Valuation& valuation() const = 0;
  /// Envy discount this learner targets (1 exact, e/(e-1) for coverage PGD).
  virtual double alpha() const { return 1.0; }
};

class FtplAgent : public BidderAgent {
 public:
  FtplAgent(Valuation val, double epsilon, bool fresh, std::uint64_t seed,
            int demand_cap = kDefaultDemandBruteForceCap)
      : bidder_(std::move(val), epsilon, fresh, seed, demand_cap) {}

  ItemSet choose_set() override { return bidder_.choose_set(); }
  Vec bid_for(ItemSet s) const override { return bidder_.bid_for(s); }
  void observe(const Vec& theta) override { bidder_.observe(theta); }
  const Valuation& valuation() const override { return bidder_.valuation(); }

 private:
  NoEnvyBidder bidder_;
};

class PgdAgent : public BidderAgent {
 public:
  PgdAgent(CoverageValuation cov, double K, std::uint64_t seed,
           PgdStepRule rule = PgdStepRule::kDiameterOverGradient)
      : learner_(std::move(cov), K, seed, rule), val_(learner_.coverage()) {}

  ItemSet choose_set() override { return learner_.choose(); }
  Vec bid_for(ItemSet s) const override { return set_to_bid(val_, s); }
  void observe(const Vec& theta) override { learner_.observe(theta); }
  const Valuation& valuation() const override { return val_; }
  double alpha() const override { return kCoverageAlpha; }
  const PgdCoverageLearner& learner() const { return learner_; }

 private:
  PgdCoverageLearner learner_;
  Valuation val_;
};

class MwAgent : public BidderAgent {
 public:
  MwAgent(Valuation val, int capacity, int T, double H, double D, std::uint64_t seed,
          double eta = 0.0)
      : learner_(val, capacity, T, H, D, seed, eta), val_(std::move(val)) {}

  ItemSet choose_set() override { return learner_.choose(); }
  Vec bid_for(ItemSet s) const override { return set_to_bid(val_, s); }
  void observe(const Vec& theta) override { learner_.observe(theta); }
  const Valuation& valuation() const override { return val_; }

 private:
  MwCapacitatedLearner learner_;
  Valuation val_;
};

/// Plays the same bid vector every round; handy as a baseline and for the
/// estimator's constant-action checks.
class FixedBidAgent : public BidderAgent {
 public:
  FixedBidAgent(Valuation val, Vec bid) : val_(std::move(val)), bid_(std::move(bid)) {}

  ItemSet choose_set() override {
    ItemSet s = kEmptySet;
    for (std::size_t j = 0; j < bid_.size(); ++j) {
      if (bid_[j] > 0.0) s |= ItemSet{1} << j;
    }
    return s;
  }
  Vec bid_for(ItemSet) const override { return bid_; }
  void observe(const Vec&) override {}
  const Valuation& valuation() const override { return val_; }

 private:
  Valuation val_;
  Vec bid_;
};

// -- Run records -----------------------------------------------------------------

struct RoundTraceRow {
  int t = 0;  // 1-based
  double utility = 0.0;
  double payment = 0.0;
  ItemSet won = kEmptySet;
  double envy_gap_running = 0.0;
  double regret_running = 0.0;  // t x set benchmark at running averages - cumulative
};

struct LearnerRunResult {
  std::vector<RoundTraceRow> trace;
  ParameterHistory thresholds;
  double cumulative_utility = 0.0;
  double cumulative_buyer_utility = 0.0;  // of the chosen bundles, before bidding
  RegretReport report;
  long long overbid_violations = 0;
  long long dominance_violations = 0;
  long long probes = 0;
};

struct FocalRunOptions {
  MechanismKind mechanism = MechanismKind::kSecondPrice;
  int T = 1000;
  std::uint64_t seed = 0;       // adversary stream; learners carry their own seeds
  double alpha = 1.0;           // envy discount used in the reports
  int probes_per_round = 0;     // no-overbidding spot checks
  bool track_running_envy = true;
  int demand_cap = kDefaultDemandBruteForceCap;
  std::uint64_t bid_grid_cap = 10'000'000;
};

namespace detail {
inline long long probe_overbidding(const Valuation& val, const Vec& bid, int count, Rng& rng) {
  const int m = items(val);
  long long violations = 0;
  for (int i = 0; i < count; ++i) {
    const ItemSet x = static_cast<ItemSet>(rng() & full_set(m));
    if (sum_over(x, bid) > value(val, x) + 1e-9) ++violations;
  }
  return violations;
}
}  // namespace detail

/// Runs one learner against the adversary for T rounds of the online bidding
/// problem (strict inequality wins an item; second price pays the threshold).
inline LearnerRunResult run_focal(BidderAgent& agent, const AdversaryModel& adversary,
                                  const FocalRunOptions& opt) {
  const Valuation& val = agent.valuation();
  const int m = items(val);
  Rng adv_rng = make_rng(opt.seed, 0x5eedULL);
  Rng probe_rng = make_rng(opt.seed, 0x9a0bULL);

  LearnerRunResult res;
  res.trace.reserve(opt.T);
  res.thresholds.reserve(opt.T);
  std::vector<Vec> past_bids;
  EnvyBenchmark bench(m);

  for (int t = 1; t <= opt.T; ++t) {
    const ItemSet chosen = agent.choose_set();
    const Vec bid = agent.bid_for(chosen);
    const Vec theta = adversary_threshold(adversary, t - 1, adv_rng, past_bids);

    ItemSet won = kEmptySet;
    double payment = 0.0;
    for (int j = 0; j < m; ++j) {
      if (bid[j] > theta[j]) {
        won |= ItemSet{1} << j;
        payment += opt.mechanism == MechanismKind::kFirstPrice ? bid[j] : theta[j];
      }
    }
    if (opt.mechanism == MechanismKind::kAllPay) {
      payment = 0.0;
      for (double b : bid) payment += b;
    }
    const double utility = value(val, won) - payment;
    res.cumulative_utility += utility;
    res.cumulative_buyer_utility += buyer_utility(val, chosen, theta);

    if (opt.probes_per_round > 0) {
      res.overbid_violations +=
          detail::probe_overbidding(val, bid, opt.probes_per_round, probe_rng);
      res.probes += opt.probes_per_round;
    }
    if (opt.mechanism == MechanismKind::kSecondPrice &&
        utility + 1e-9 < buyer_utility(val, chosen, theta)) {
      ++res.dominance_violations;
    }

    bench.add(theta);
    RoundTraceRow row;
    row.t = t;
    row.utility = utility;
    row.payment = payment;
    row.won = won;
    if (opt.track_running_envy) {
      row.envy_gap_running = envy_benchmark_value(val, bench.average(), opt.alpha,
                                                  opt.demand_cap) -
                             res.cumulative_utility / t;
      row.regret_running = row.envy_gap_running * t;
    }
    res.trace.push_back(row);
    res.thresholds.push_back(theta);
    past_bids.push_back(bid);
    agent.observe(theta);
  }
  res.report = make_regret_report(val, res.thresholds, res.cumulative_utility, opt.alpha,
                                  opt.bid_grid_cap, opt.demand_cap);
  return res;
}

// -- Joint (self-play) runs --------------------------------------------------------

struct JointRunOptions {
  MechanismKind mechanism = MechanismKind::kSecondPrice;
  int T = 1000;
  std::uint64_t seed = 0;
  int probes_per_round = 0;
  bool track_running_envy = true;
  int demand_cap = kDefaultDemandBruteForceCap;
  std::uint64_t welfare_cap = 20'000'000;
};

struct JointRunResult {
  std::vector<LearnerRunResult> bidders;
  Vec welfare_series;
  double average_welfare = 0.0;
  WelfareReport welfare;
  double max_alpha = 1.0;
};

/// All bidders are learning agents; thresholds are the highest competing bids
/// and items resolve through the configured mechanism.
inline JointRunResult run_joint(std::span<const std::unique_ptr<BidderAgent>> agents,
                                const JointRunOptions& opt) {
  const int n = static_cast<int>(agents.size());
  if (n < 1) throw std::invalid_argument("joint run: no bidders");
  std::vector<Valuation> valuations;
  valuations.reserve(n);
  for (const auto& a : agents) valuations.push_back(a->valuation());
  const int m = items(valuations[0]);

  JointRunResult res;
  res.bidders.resize(n);
  res.welfare_series.reserve(opt.T);
  std::vector<EnvyBenchmark> benches(n, EnvyBenchmark(m));
  Rng probe_rng = make_rng(opt.seed, 0x9a0bULL);

  std::vector<ItemSet> chosen(n);
  for (int t = 1; t <= opt.T; ++t) {
    BidProfile profile;
    profile.bids.reserve(n);
    for (int i = 0; i < n; ++i) {
      chosen[i] = agents[i]->choose_set();
      profile.bids.push_back(agents[i]->bid_for(chosen[i]));
    }
    const RoundRecord rec = resolve(opt.mechanism, profile, valuations);
    res.welfare_series.push_back(rec.welfare);
    res.average_welfare += rec.welfare;

    for (int i = 0; i < n; ++i) {
      LearnerRunResult& r = res.bidders[i];
      const Vec theta = thresholds_for(profile, i);
      r.cumulative_utility += rec.utilities[i];
      r.cumulative_buyer_utility += buyer_utility(valuations[i], chosen[i], theta);
      if (opt.probes_per_round > 0) {
        r.overbid_violations += detail::probe_overbidding(valuations[i], profile.bids[i],
                                                          opt.probes_per_round, probe_rng);
        r.probes += opt.probes_per_round;
      }
      if (opt.mechanism == MechanismKind::kSecondPrice &&
          rec.utilities[i] + 1e-9 < buyer_utility(valuations[i], chosen[i], theta)) {
        ++r.dominance_violations;
      }
      benches[i].add(theta);
      RoundTraceRow row;
      row.t = t;
      row.utility = rec.utilities[i];
      row.payment = rec.payments[i];
      row.won = rec.won[i];
      if (opt.track_running_envy) {
        row.envy_gap_running =
            envy_benchmark_value(valuations[i], benches[i].average(), agents[i]->alpha(),
                                 opt.demand_cap) -
            r.cumulative_utility / t;
        row.regret_running = row.envy_gap_running * t;
      }
      r.trace.push_back(row);
      r.thresholds.push_back(theta);
    }
    for (int i = 0; i < n; ++i) agents[i]->observe(res.bidders[i].thresholds.back());
  }
  res.average_welfare /= opt.T;

  Vec gaps(n, 0.0);
  for (int i = 0; i < n; ++i) {
    res.bidders[i].report =
        make_regret_report(valuations[i], res.bidders[i].thresholds,
                           res.bidders[i].cumulative_utility, agents[i]->alpha(),
                           /*bid_grid_cap=*/1'000'000, opt.demand_cap);
    gaps[i] = std::max(0.0, res.bidders[i].report.envy_gap);
    res.max_alpha = std::max(res.max_alpha, agents[i]->alpha());
  }
  const double opt_welfare = optimal_welfare(valuations, opt.welfare_cap).welfare;
  res.welfare = make_welfare_report(res.average_welfare, opt_welfare, res.max_alpha, gaps);
  return res;
}

}  // namespace sispa

#endif  // SISPA_EXPERIMENT_HPP
