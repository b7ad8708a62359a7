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
// Desk-scale verification battery. Every check pins its tolerance from the
// closed-form guarantee it verifies; nothing is calibrated after the fact.

#ifndef SISPA_ACCEPTANCE_HPP
#define SISPA_ACCEPTANCE_HPP

#include <chrono>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "sispa/experiment.hpp"
#include "sispa/hardness.hpp"
#include "sispa/runner.hpp"

namespace sispa {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  int threads = 1;
  std::vector<int> only;  // empty runs everything
};

inline bool all_passed(const std::vector<CriterionResult>& results) {
  for (const CriterionResult& r : results) {
    if (!r.pass) return false;
  }
  return true;
}

namespace acceptance_detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

inline ExplicitXOS random_grid_xos(Rng& rng, int m, int L, double top) {
  std::vector<Vec> clauses(L, Vec(m));
  for (auto& c : clauses) {
    for (double& x : c) x = detail::snap_to_grid(uniform_on(rng, 0.0, top));
  }
  return ExplicitXOS(m, std::move(clauses));
}

inline CoverageValuation random_grid_coverage(Rng& rng, int m, int vertices, double top) {
  Vec weights(vertices);
  for (double& w : weights) w = detail::snap_to_grid(uniform_on(rng, 0.0, top));
  std::vector<std::vector<int>> edges(m);
  for (auto& edge : edges) {
    const int size = uniform_int(rng, 1, vertices);
    std::vector<int> pool(vertices);
    for (int i = 0; i < vertices; ++i) pool[i] = i;
    for (int i = 0; i < size; ++i) std::swap(pool[i], pool[uniform_int(rng, i, vertices - 1)]);
    edge.assign(pool.begin(), pool.begin() + size);
    std::sort(edge.begin(), edge.end());
  }
  return CoverageValuation(m, std::move(weights), std::move(edges));
}

inline Vec random_grid_prices(Rng& rng, int m, double top) {
  Vec p(m);
  for (double& x : p) x = detail::snap_to_grid(uniform_on(rng, 0.0, top));
  return p;
}

inline IIDFromSupport random_iid_adversary(Rng& rng, int m, double D, int support_size) {
  IIDFromSupport adv;
  for (int i = 0; i < support_size; ++i) adv.support.push_back(random_grid_prices(rng, m, D));
  adv.probabilities.assign(support_size, 1.0 / support_size);
  return adv;
}

// 1. Closed-form demand equals full enumeration, bit for bit, on grid data.
inline CriterionResult criterion_demand_exactness() {
  CriterionResult res{1, "demand oracle exactness", true, "", 0.0};
  Rng rng = make_rng(101, 0);
  int checked = 0, failures = 0;
  for (int i = 0; i < 1000; ++i) {
    const int m = uniform_int(rng, 2, 12);
    const int L = uniform_int(rng, 1, 8);
    const ExplicitXOS xos = random_grid_xos(rng, m, L, 10.0);
    const Vec p = random_grid_prices(rng, m, 12.0);
    const Valuation val{xos};
    const auto [s_cf, u_cf] = xos.demand(p);
    const DemandResult ref = demand_brute_force(val, p, 12);
    const double achieved = value(val, s_cf) - sum_over(s_cf, p);
    if (u_cf != ref.utility || achieved != u_cf) ++failures;
    ++checked;
  }
  res.pass = failures == 0;
  res.detail = std::to_string(checked) + " instances, " + std::to_string(failures) + " mismatches";
  return res;
}

// 2. OPT = v - OPT_c r/k against an independent cover enumerator, plus the
// worked two-element example.
inline CriterionResult criterion_hardness_identity() {
  CriterionResult res{2, "hardness reduction identity", true, "", 0.0};
  Rng rng = make_rng(202, 0);
  int failures = 0;
  for (int i = 0; i < 200; ++i) {
    const int k = uniform_int(rng, 2, 6);
    const int r = uniform_int(rng, 1, k);
    const int needed = (k + r - 1) / r;
    const int m = uniform_int(rng, needed, 10);
    const SetCoverInstance sc = random_regular_cover(k, m, r, rng);
    const BiddingHardnessInstance inst = reduce(sc);
    const BiddingOpt opt = solve_bidding_exact(inst);
    const int cover_opt = set_cover_opt(sc);
    // Utilities are integer multiples of 1/k; compare at the integer scale.
    const long long lhs = std::llround(opt.opt * inst.k);
    const long long rhs = std::llround(inst.v) * inst.k - static_cast<long long>(cover_opt) * inst.r;
    if (std::abs(opt.opt * inst.k - lhs) > 1e-6 || lhs != rhs) ++failures;
  }

  const SetCoverInstance worked{2, 1, {{0}, {1}}};
  const BiddingHardnessInstance inst = reduce(worked);
  const BiddingOpt opt = solve_bidding_exact(inst);
  bool worked_ok = inst.v == 8.0 && inst.H == 16.0 && opt.opt == 7.0 && opt.arg == 0b11u;
  const double q = cover_from_apx(inst, opt.opt);
  worked_ok = worked_ok && std::abs(q - 1.5) < 1e-12 && q <= 2.0 && 2.0 <= 3.0 * q;

  res.pass = failures == 0 && worked_ok;
  res.detail = "200 random covers, " + std::to_string(failures) +
               " identity failures; worked example OPT=" + fmt(opt.opt);
  return res;
}

// 3. The regret-to-optimization estimator brackets OPT on the worked
// instance within the Azuma/Chernoff sandwich (and within the 0.6 margin).
inline CriterionResult criterion_estimator() {
  CriterionResult res{3, "regret-to-optimization estimator", true, "", 0.0};
  const SetCoverInstance worked{2, 1, {{0}, {1}}};
  const BiddingHardnessInstance inst = reduce(worked);
  const int T = 2000, N = 2000;
  const double zeta = 0.05;
  const EstimatorResult est = regret_to_opt_estimator(
      inst, [&](Rng) { return FtlBiddingLearner(inst.v, inst.m); }, T, N, zeta, 303);
  const double err = std::abs(est.estimate - 7.0);
  res.pass = err <= est.sandwich_half_width && err <= 0.6;
  res.detail = "estimate=" + fmt(est.estimate) + " err=" + fmt(err) +
               " sandwich=" + fmt(est.sandwich_half_width) +
               " (concentration=" + fmt(est.concentration_term) + ")";
  return res;
}

struct ViolationTally {
  long long probes = 0;
  long long overbids = 0;
  long long dominance = 0;
};

// 4. Buyer-problem FTPL stays below the closed-form regret ceiling on every
// seeded oblivious adversary, and the envy gap shrinks at the root-T rate.
inline CriterionResult criterion_ftpl_regret(ViolationTally& tally, int threads) {
  CriterionResult res{4, "ftpl regret bound and envy rate", true, "", 0.0};
  const int runs = 24;
  const double D = 1.0, H = 10.0;
  struct Row {
    double regret = 0.0, bound = 0.0, gap1000 = 0.0, gap4000 = 0.0;
    long long probes = 0, overbids = 0, dominance = 0;
    bool ok = true;
  };
  std::vector<Row> rows(runs);

  detail::parallel_reps(runs, threads, [&](int s) {
    Rng rng = make_rng(404, s);
    const int m = 6 + s % 3;
    const ExplicitXOS xos = random_grid_xos(rng, m, 6, H / m);
    const Valuation val{xos};
    AdversaryModel adv{random_iid_adversary(rng, m, D, 6)};

    Row row;
    for (const int T : {1000, 4000}) {
      FtplAgent agent(val, default_exponential_rate(H, D, T), /*fresh=*/false,
                      derive_seed(404, s, T));
      FocalRunOptions opt;
      opt.T = T;
      opt.seed = derive_seed(405, s, T);
      opt.probes_per_round = 1000;
      opt.track_running_envy = false;
      opt.bid_grid_cap = 1;  // the bid grid is not part of this criterion
      const LearnerRunResult r = run_focal(agent, adv, opt);
      row.probes += r.probes;
      row.overbids += r.overbid_violations;
      row.dominance += r.dominance_violations;
      // The regret bound concerns the bundle-choosing learner itself; the
      // envy rate concerns the auction-side utilities after set_to_bid.
      const double regret = r.report.set_benchmark_total - r.cumulative_buyer_utility;
      if (T == 4000) {
        row.regret = regret;
        row.bound = demand_regret_bound(m, D, H, T);
        row.gap4000 = std::max(0.0, r.report.envy_gap);
        if (regret > row.bound) row.ok = false;
      } else {
        row.gap1000 = std::max(0.0, r.report.envy_gap);
      }
    }
    rows[s] = row;
  });

  double worst_margin = 0.0, gap1000 = 0.0, gap4000 = 0.0;
  bool all_ok = true;
  for (const Row& row : rows) {
    all_ok = all_ok && row.ok;
    worst_margin = std::max(worst_margin, row.regret / row.bound);
    gap1000 += row.gap1000;
    gap4000 += row.gap4000;
    tally.probes += row.probes;
    tally.overbids += row.overbids;
    tally.dominance += row.dominance;
  }
  gap1000 /= runs;
  gap4000 /= runs;
  const bool rate_ok = gap4000 <= 0.6 * gap1000;
  res.pass = all_ok && rate_ok;
  res.detail = "worst regret/bound=" + fmt(worst_margin) + ", avg gap T=1000: " +
               fmt(gap1000) + ", T=4000: " + fmt(gap4000) +
               " (need <= 0.6x)";
  return res;
}

// 5. Be-the-leader inequality on random and adversarial buyer sequences.
inline CriterionResult criterion_be_the_leader() {
  CriterionResult res{5, "be-the-leader inequality", true, "", 0.0};
  Rng rng = make_rng(505, 0);
  int failures = 0;
  for (int i = 0; i < 500; ++i) {
    const int m = uniform_int(rng, 2, 6);
    const int T = uniform_int(rng, 1, 40);
    const int pick = uniform_int(rng, 0, 2);
    const Valuation val = [&]() -> Valuation {
      if (pick == 0) return random_grid_xos(rng, m, uniform_int(rng, 1, 5), 4.0);
      if (pick == 1) return AdditiveValuation(random_grid_prices(rng, m, 4.0));
      return random_grid_coverage(rng, m, uniform_int(rng, 1, 6), 1.0);
    }();
    std::vector<Vec> seq;
    const bool alternating = i % 10 == 9;
    for (int t = 0; t < T; ++t) {
      if (alternating) {
        Vec theta(m, 0.0);
        for (int j = 0; j < m; ++j) theta[j] = ((t + j) % 2 == 0) ? 0.0 : 4.0;
        seq.push_back(std::move(theta));
      } else {
        seq.push_back(random_grid_prices(rng, m, 4.0));
      }
    }
    // Exact cumulative-utility argmax over all bundles (no averaging, so grid
    // arithmetic stays exact).
    auto oracle = [&](std::span<const Vec> prefix) {
      const int t = static_cast<int>(prefix.size());
      Vec sums(m, 0.0);
      for (const Vec& theta : prefix) {
        for (int j = 0; j < m; ++j) sums[j] += theta[j];
      }
      ItemSet best = kEmptySet;
      double best_u = 0.0;
      for (ItemSet s = 0; s <= full_set(m); ++s) {
        const double u = t * value(val, s) - sum_over(s, sums);
        if (u > best_u) {
          best_u = u;
          best = s;
        }
      }
      return best;
    };
    auto util = [&](ItemSet s, const Vec& theta) { return buyer_utility(val, s, theta); };
    std::vector<ItemSet> panel;
    for (int a = 0; a < 8; ++a) {
      panel.push_back(static_cast<ItemSet>(rng() & full_set(m)));
    }
    if (!be_the_leader_check<ItemSet>(seq, oracle, util, std::span<const ItemSet>(panel))) {
      ++failures;
    }
  }
  res.pass = failures == 0;
  res.detail = "500 sequences, " + std::to_string(failures) + " violations";
  return res;
}

// 6. Convex rounding certificate: midpoint concavity, finite-difference
// gradients, inclusion-probability domination, and the (1-1/e) integral bound.
inline CriterionResult criterion_rounding_certificate() {
  CriterionResult res{6, "convex rounding certificate", true, "", 0.0};
  Rng rng = make_rng(606, 0);
  int midpoint_fail = 0, grad_fail = 0, inclusion_fail = 0, integral_fail = 0;
  const double one_minus_inv_e = -std::expm1(-1.0);
  for (int i = 0; i < 200; ++i) {
    const int m = uniform_int(rng, 2, 6);
    const CoverageValuation cov = random_grid_coverage(rng, m, uniform_int(rng, 1, 8), 2.0);
    for (int pair = 0; pair < 5; ++pair) {
      Vec x(m), y(m);
      for (int j = 0; j < m; ++j) {
        x[j] = uniform_on(rng, 0.0, 1.0);
        y[j] = uniform_on(rng, 0.0, 1.0);
      }
      Vec mid(m);
      for (int j = 0; j < m; ++j) mid[j] = 0.5 * (x[j] + y[j]);
      if (coverage_rounded_value(cov, mid) <
          0.5 * (coverage_rounded_value(cov, x) + coverage_rounded_value(cov, y)) - 1e-9) {
        ++midpoint_fail;
      }
      for (int j = 0; j < m; ++j) {
        if (poisson_inclusion_probability(x[j]) > x[j] + 1e-15) ++inclusion_fail;
      }
    }
    {
      Vec x(m);
      for (int j = 0; j < m; ++j) x[j] = uniform_on(rng, 0.0, 1.0);
      const Vec grad = coverage_rounded_gradient(cov, x);
      const double h = 1e-5;
      for (int j = 0; j < m; ++j) {
        Vec hi = x, lo = x;
        hi[j] += h;
        lo[j] -= h;
        const double fd =
            (coverage_rounded_value(cov, hi) - coverage_rounded_value(cov, lo)) / (2.0 * h);
        if (std::abs(fd - grad[j]) > 1e-6 * std::max(1.0, std::abs(grad[j]))) ++grad_fail;
      }
    }
    for (int pick = 0; pick < 5; ++pick) {
      const ItemSet s = static_cast<ItemSet>(rng() & full_set(m));
      Vec indicator(m, 0.0);
      for (int j = 0; j < m; ++j) {
        if (contains(s, j)) indicator[j] = 1.0;
      }
      if (coverage_rounded_value(cov, indicator) <
          one_minus_inv_e * cov.value(s) - 1e-9) {
        ++integral_fail;
      }
    }
  }
  res.pass = midpoint_fail + grad_fail + inclusion_fail + integral_fail == 0;
  res.detail = "violations: midpoint=" + std::to_string(midpoint_fail) +
               " gradient=" + std::to_string(grad_fail) +
               " inclusion=" + std::to_string(inclusion_fail) +
               " integral=" + std::to_string(integral_fail);
  return res;
}

// 7. PGD buyer shortfall against the discounted bundle benchmark stays below
// 3 (H' + sqrt(mK)) sqrt(m/T). Expected utilities are exact: the gradient
// trajectory does not depend on the sampled sets.
inline CriterionResult criterion_pgd_learner(ViolationTally& tally, int threads) {
  CriterionResult res{7, "pgd coverage learner shortfall", true, "", 0.0};
  const int runs = 20;
  const double K = 1.0;
  const double alpha_inv = -std::expm1(-1.0);  // 1 - 1/e
  struct Row {
    double worst_margin = -1e300;
    long long probes = 0, overbids = 0, dominance = 0;
    bool ok = true;
  };
  std::vector<Row> rows(runs);

  detail::parallel_reps(runs, threads, [&](int s) {
    Rng rng = make_rng(707, s);
    const int m = 5 + s % 2;
    const CoverageValuation cov = random_grid_coverage(rng, m, uniform_int(rng, 4, 8), 1.0);
    const Valuation val{cov};
    const IIDFromSupport adv = random_iid_adversary(rng, m, K, 5);
    Row row;
    Vec value_table(std::size_t{1} << m);
    for (ItemSet x = 0; x <= full_set(m); ++x) value_table[x] = cov.value(x);

    for (const int T : {1000, 4000}) {
      PgdCoverageLearner learner(cov, K, derive_seed(707, s, T));
      Rng adv_rng = make_rng(708, derive_seed(0, s, T));
      Rng probe_rng = make_rng(709, derive_seed(0, s, T));
      EnvyBenchmark bench(m);
      double expected_total = 0.0;
      for (int t = 1; t <= T; ++t) {
        const ItemSet chosen = learner.choose();
        const Vec bid = set_to_bid(val, chosen);
        Vec theta(m);
        {
          double u = uniform_unit(adv_rng);
          std::size_t i = 0;
          for (; i + 1 < adv.support.size(); ++i) {
            u -= adv.probabilities[i];
            if (u <= 0.0) break;
          }
          theta = adv.support[i];
        }
        // Exact expected reward of the rounded distribution this round.
        double expected = learner.rounded_value();
        for (int j = 0; j < m; ++j) {
          expected -= theta[j] * poisson_inclusion_probability(learner.marginals()[j]);
        }
        expected_total += expected;
        // No-overbidding probes and pointwise dominance on the sampled set.
        for (int probe = 0; probe < 1000; ++probe) {
          const ItemSet x = static_cast<ItemSet>(probe_rng() & full_set(m));
          if (sum_over(x, bid) > value_table[x] + 1e-9) ++row.overbids;
        }
        row.probes += 1000;
        ItemSet won = kEmptySet;
        double paid = 0.0;
        for (int j = 0; j < m; ++j) {
          if (bid[j] > theta[j]) {
            won |= ItemSet{1} << j;
            paid += theta[j];
          }
        }
        if (value_table[won] - paid + 1e-9 < buyer_utility(val, chosen, theta)) ++row.dominance;
        bench.add(theta);
        learner.observe(theta);
      }
      const Vec avg = bench.average();
      double benchmark = 0.0;
      for (ItemSet x = 0; x <= full_set(m); ++x) {
        benchmark = std::max(benchmark, alpha_inv * value_table[x] - sum_over(x, avg));
      }
      const double shortfall = benchmark - expected_total / T;
      const double bound = pgd_buyer_shortfall_bound(cov, K, T);
      row.worst_margin = std::max(row.worst_margin, shortfall / bound);
      if (shortfall > bound) row.ok = false;
    }
    rows[s] = row;
  });

  double worst = -1e300;
  bool all_ok = true;
  for (const Row& row : rows) {
    all_ok = all_ok && row.ok;
    worst = std::max(worst, row.worst_margin);
    tally.probes += row.probes;
    tally.overbids += row.overbids;
    tally.dominance += row.dominance;
  }
  res.pass = all_ok;
  res.detail = "20 runs x T in {1000,4000}; worst shortfall/bound=" + fmt(worst);
  return res;
}

// 8. Finite-parameter FTPL: regret <= 2H sqrt(dT) over a non-overbidding bid
// grid, plus the geometric-perturbation stability inequality by Monte Carlo.
inline CriterionResult criterion_finite_ftpl(int threads) {
  CriterionResult res{8, "finite-parameter ftpl", true, "", 0.0};
  const int runs = 20;
  const int T = 4000;
  struct Row {
    double margin = 0.0;
    bool regret_ok = true, stability_ok = true;
  };
  std::vector<Row> rows(runs);

  detail::parallel_reps(runs, threads, [&](int s) {
    Rng rng = make_rng(808, s);
    const int m = 3;
    const int d = 4 + 4 * (s % 2);
    const double D = 2.0;
    const ExplicitXOS xos = random_grid_xos(rng, m, 4, 2.0);
    const Valuation val{xos};
    const double H = value(val, full_set(m));

    std::vector<Vec> universe;
    for (int i = 0; i < d; ++i) universe.push_back(random_grid_prices(rng, m, D));

    // Canonical non-overbidding bid grid: 0 or just above a universe level.
    std::vector<Vec> levels(m, Vec{0.0});
    for (int j = 0; j < m; ++j) {
      Vec seen;
      for (const Vec& theta : universe) seen.push_back(theta[j]);
      std::sort(seen.begin(), seen.end());
      seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
      for (double v : seen) levels[j].push_back(v + kTieEpsilon);
    }
    std::vector<Vec> actions;
    std::vector<std::size_t> idx(m, 0);
    while (true) {
      Vec bid(m);
      for (int j = 0; j < m; ++j) bid[j] = levels[j][idx[j]];
      bool overbids = false;
      for (ItemSet x = 0; x <= full_set(m) && !overbids; ++x) {
        if (sum_over(x, bid) > value(val, x) + 1e-12) overbids = true;
      }
      if (!overbids) actions.push_back(bid);
      int j = 0;
      while (j < m && ++idx[j] == levels[j].size()) {
        idx[j] = 0;
        ++j;
      }
      if (j == m) break;
    }

    const int A = static_cast<int>(actions.size());
    std::vector<Vec> payoff(A, Vec(d));  // u(action, universe member), in [0, H]
    for (int a = 0; a < A; ++a) {
      for (int i = 0; i < d; ++i) {
        ItemSet won = kEmptySet;
        double paid = 0.0;
        for (int j = 0; j < m; ++j) {
          if (actions[a][j] > universe[i][j]) {
            won |= ItemSet{1} << j;
            paid += universe[i][j];
          }
        }
        payoff[a][i] = value(val, won) - paid;
      }
    }

    std::vector<int> sequence(T);
    Rng seq_rng = make_rng(809, s);
    for (int& i : sequence) i = uniform_int(seq_rng, 0, d - 1);

    auto oracle = [&](std::span<const long long> freq) {
      int best = 0;
      double best_score = -1.0;
      for (int a = 0; a < A; ++a) {
        double score = 0.0;
        for (int i = 0; i < d; ++i) score += static_cast<double>(freq[i]) * payoff[a][i];
        if (score > best_score) {
          best_score = score;
          best = a;
        }
      }
      return best;
    };
    auto util = [&](int a, int i) { return payoff[a][i]; };

    const double p = default_geometric_p(d, T);
    Rng run_rng = make_rng(810, s);
    const FiniteFtplRun<int> run = ftpl_finite_run<int>(d, sequence, p, oracle, util, run_rng);

    std::vector<long long> counts(d, 0);
    for (int i : sequence) ++counts[i];
    double best_fixed = 0.0;
    for (int a = 0; a < A; ++a) {
      double total = 0.0;
      for (int i = 0; i < d; ++i) total += static_cast<double>(counts[i]) * payoff[a][i];
      best_fixed = std::max(best_fixed, total);
    }
    const double regret = best_fixed - run.cumulative;
    const double bound = finite_regret_bound(H, d, T);
    Row row;
    row.margin = regret / bound;
    row.regret_ok = regret <= bound;

    // Stability: E[u(M(phi^{t-1}+z), theta^t)] >= (1-p) E[u(M(phi^t+z), theta^t)],
    // checked with paired samples at ten spread-out rounds.
    Rng stab_rng = make_rng(811, s);
    for (int pick = 1; pick <= 10 && row.stability_ok; ++pick) {
      const int t = pick * (T / 10);
      std::vector<long long> phi(d, 0);
      for (int tt = 0; tt + 1 < t; ++tt) ++phi[sequence[tt]];
      const int theta_idx = sequence[t - 1];
      const int trials = 600;
      double sum = 0.0, sum_sq = 0.0;
      std::vector<long long> perturbed(d);
      for (int trial = 0; trial < trials; ++trial) {
        const std::vector<long long> z = sample_geometric_counts(p, d, stab_rng);
        for (int i = 0; i < d; ++i) perturbed[i] = phi[i] + z[i];
        const double follow = payoff[oracle(perturbed)][theta_idx];
        ++perturbed[theta_idx];
        const double be = payoff[oracle(perturbed)][theta_idx];
        const double diff = follow - (1.0 - p) * be;
        sum += diff;
        sum_sq += diff * diff;
      }
      const double mean = sum / trials;
      const double var = std::max(0.0, sum_sq / trials - mean * mean);
      const double se = std::sqrt(var / (trials - 1));
      if (mean < -2.0 * se) row.stability_ok = false;
    }
    rows[s] = row;
  });

  double worst = 0.0;
  bool all_ok = true;
  for (const Row& row : rows) {
    all_ok = all_ok && row.regret_ok && row.stability_ok;
    worst = std::max(worst, row.margin);
  }
  res.pass = all_ok;
  res.detail = "20 runs; worst regret/bound=" + fmt(worst);
  return res;
}

// 9. Zero no-overbidding or dominance violations across the probed runs.
inline CriterionResult criterion_no_overbidding(const ViolationTally& tally) {
  CriterionResult res{9, "no-overbidding and dominance", true, "", 0.0};
  res.pass = tally.overbids == 0 && tally.dominance == 0 && tally.probes > 0;
  res.detail = std::to_string(tally.probes) + " probes, " + std::to_string(tally.overbids) +
               " overbids, " + std::to_string(tally.dominance) + " dominance violations";
  return res;
}

// 10. Welfare floors for two-bidder self-play with the measured envy gaps.
inline CriterionResult criterion_welfare_floor(ViolationTally& tally, int threads) {
  CriterionResult res{10, "welfare floor", true, "", 0.0};
  const int runs_per_family = 10;
  const int T = 4000;
  struct Row {
    double ratio = 0.0;
    bool ok = true;
    long long probes = 0, overbids = 0, dominance = 0;
  };
  std::vector<Row> rows(2 * runs_per_family);

  detail::parallel_reps(2 * runs_per_family, threads, [&](int cell) {
    const bool coverage_family = cell >= runs_per_family;
    const int s = cell % runs_per_family;
    Rng rng = make_rng(coverage_family ? 1011 : 1010, s);
    const int m = uniform_int(rng, 4, 6);

    JointRunOptions opt;
    opt.T = T;
    opt.seed = derive_seed(1012, cell, 0);
    opt.probes_per_round = 1000;
    opt.track_running_envy = false;

    std::vector<std::unique_ptr<BidderAgent>> agents;
    if (!coverage_family) {
      const double H = 10.0;
      for (int i = 0; i < 2; ++i) {
        const Valuation val{random_grid_xos(rng, m, 5, H / m)};
        const double D = H;  // competing bids never exceed the clause values
        agents.push_back(std::make_unique<FtplAgent>(
            val, default_exponential_rate(H, D, T), false, derive_seed(1013, cell, i)));
      }
    } else {
      double K = 0.0;
      std::vector<CoverageValuation> covs;
      for (int i = 0; i < 2; ++i) {
        covs.push_back(random_grid_coverage(rng, m, uniform_int(rng, 3, 6), 1.0));
        for (int j = 0; j < m; ++j) {
          K = std::max(K, covs.back().value(ItemSet{1} << j));
        }
      }
      for (int i = 0; i < 2; ++i) {
        agents.push_back(
            std::make_unique<PgdAgent>(covs[i], K, derive_seed(1013, cell, i)));
      }
    }
    const JointRunResult jr = run_joint(agents, opt);
    Row row;
    row.ratio = jr.welfare.ratio;
    row.ok = jr.welfare.floor_satisfied;
    for (const LearnerRunResult& b : jr.bidders) {
      row.probes += b.probes;
      row.overbids += b.overbid_violations;
      row.dominance += b.dominance_violations;
    }
    rows[cell] = row;
  });

  bool all_ok = true;
  double worst_ratio = 1.0;
  for (const Row& row : rows) {
    all_ok = all_ok && row.ok;
    worst_ratio = std::min(worst_ratio, row.ratio);
    tally.probes += row.probes;
    tally.overbids += row.overbids;
    tally.dominance += row.dominance;
  }
  res.pass = all_ok;
  res.detail = "20 runs (xos pairs + coverage pairs); worst welfare/opt=" + fmt(worst_ratio);
  return res;
}

}  // namespace acceptance_detail

inline std::vector<CriterionResult> run_acceptance_suite(const AcceptanceOptions& options = {},
                                                         std::ostream* log = nullptr) {
  namespace ad = acceptance_detail;
  auto wanted = [&](int id) {
    if (options.only.empty()) return true;
    for (int o : options.only) {
      if (o == id) return true;
    }
    return false;
  };
  // Criterion 9 tallies the probes of criteria 4, 7, and 10, so asking for it
  // pulls those in as well.
  auto executed = [&](int id) {
    return wanted(id) || (wanted(9) && (id == 4 || id == 7 || id == 10));
  };

  std::vector<CriterionResult> results;
  ad::ViolationTally tally;
  // Wall-clock ceilings are part of the contract where stated.
  auto ceiling = [](int id) -> double {
    switch (id) {
      case 1: return 30.0;
      case 2: return 60.0;
      case 3: return 300.0;
      case 4: return 600.0;
      case 10: return 600.0;
      default: return 0.0;  // no ceiling
    }
  };
  auto run_one = [&](int id, auto&& fn) {
    if (!executed(id)) return;
    const auto start = std::chrono::steady_clock::now();
    CriterionResult r = fn();
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (const double limit = ceiling(id); limit > 0.0 && r.seconds > limit) {
      r.pass = false;
      r.detail += "; runtime " + ad::fmt(r.seconds) + " s exceeds " + ad::fmt(limit) + " s";
    }
    if (wanted(id)) {
      if (log) {
        (*log) << (r.pass ? "PASS" : "FAIL") << "  [" << r.id << "] " << r.name << " — "
               << r.detail << " (" << ad::fmt(r.seconds) << " s)\n";
        log->flush();
      }
      results.push_back(std::move(r));
    }
  };

  run_one(1, [] { return ad::criterion_demand_exactness(); });
  run_one(2, [] { return ad::criterion_hardness_identity(); });
  run_one(3, [] { return ad::criterion_estimator(); });
  run_one(4, [&] { return ad::criterion_ftpl_regret(tally, options.threads); });
  run_one(5, [] { return ad::criterion_be_the_leader(); });
  run_one(6, [] { return ad::criterion_rounding_certificate(); });
  run_one(7, [&] { return ad::criterion_pgd_learner(tally, options.threads); });
  run_one(8, [&] { return ad::criterion_finite_ftpl(options.threads); });
  run_one(10, [&] { return ad::criterion_welfare_floor(tally, options.threads); });
  run_one(9, [&] { return ad::criterion_no_overbidding(tally); });
  return results;
}

}  // namespace sispa

#endif  // SISPA_ACCEPTANCE_HPP
