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

#include <algorithm>
#include <cmath>

#include <catch2/catch_amalgamated.hpp>

#include "sispa/buyer.hpp"
#include "sispa/ftpl.hpp"
#include "test_support.hpp"

using namespace sispa;

namespace {

// Exact buyer-problem oracle over summed thresholds; avoids the division so
// grid sequences stay in exact arithmetic.
ItemSet exact_buyer_argmax(const Valuation& val, std::span<const Vec> prefix) {
  const int m = items(val);
  Vec sums(m, 0.0);
  for (const Vec& theta : prefix) {
    for (int j = 0; j < m; ++j) sums[j] += theta[j];
  }
  const double t = static_cast<double>(prefix.size());
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
}

}  // namespace

TEST_CASE("exponential sampler") {
  SECTION("coordinates are nonnegative and the empirical mean matches 1/rate") {
    Rng rng = make_rng(21);
    const double rate = 0.35;
    const int n = 100000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = exponential_draw(rng, rate);
      REQUIRE(x >= 0.0);
      sum += x;
    }
    const double mean = sum / n;
    const double se = (1.0 / rate) / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(mean - 1.0 / rate) <= 3.0 * se);
  }

  SECTION("Kolmogorov-Smirnov statistic is below the 1% critical value") {
    Rng rng = make_rng(22);
    const double rate = 1.7;
    const int n = 100000;
    Vec sample(n);
    for (double& x : sample) x = exponential_draw(rng, rate);
    std::sort(sample.begin(), sample.end());
    double ks = 0.0;
    for (int i = 0; i < n; ++i) {
      const double cdf = 1.0 - std::exp(-rate * sample[i]);
      ks = std::max(ks, std::abs(cdf - static_cast<double>(i + 1) / n));
      ks = std::max(ks, std::abs(cdf - static_cast<double>(i) / n));
    }
    CHECK(ks < 1.628 / std::sqrt(static_cast<double>(n)));
  }

  SECTION("the default rate follows the horizon schedule") {
    CHECK(default_exponential_rate(10.0, 4.0, 1000) ==
          Catch::Approx(std::sqrt(1.0 / (10.0 * 4.0 * 1000.0))));
  }

  SECTION("rate must be positive") {
    Rng rng = make_rng(23);
    CHECK_THROWS_AS(sample_exponential(0.0, 3, rng), std::invalid_argument);
  }
}

TEST_CASE("geometric sampler counts tails before the first head") {
  Rng rng = make_rng(24);
  const double p = 0.3;
  const int n = 200000;
  double sum = 0.0;
  long long zeros = 0;
  for (int i = 0; i < n; ++i) {
    const long long z = geometric_draw(rng, p);
    REQUIRE(z >= 0);
    sum += static_cast<double>(z);
    zeros += z == 0 ? 1 : 0;
  }
  const double mean = sum / n;
  const double expected_mean = (1.0 - p) / p;
  CHECK(std::abs(mean - expected_mean) < 0.05);
  CHECK(std::abs(static_cast<double>(zeros) / n - p) < 0.01);
}

TEST_CASE("buyer oracle is demand at the average threshold") {
  const Valuation val{AdditiveValuation({3.0, 3.0})};

  SECTION("duplicated history equals a single demand call") {
    const Vec p{1.25, 0.5};
    const std::vector<Vec> hist{p, p};
    const DemandResult via_history = buyer_oracle(hist, val);
    const DemandResult direct = demand_oracle(val, p);
    CHECK(via_history.set == direct.set);
    CHECK(via_history.utility == direct.utility);
  }

  SECTION("averaging the worked two-round history") {
    const std::vector<Vec> hist{{0.0, 2.0}, {2.0, 0.0}};
    const DemandResult r = buyer_oracle(hist, val);
    CHECK(r.set == 0b11u);
    CHECK(r.utility == 4.0);
  }

  SECTION("prices above the value buy nothing") {
    const std::vector<Vec> hist{{9.0, 9.0}};
    CHECK(buyer_oracle(hist, val).set == kEmptySet);
  }

  SECTION("empty history is rejected") {
    CHECK_THROWS_AS(buyer_oracle({}, val), std::invalid_argument);
  }
}

TEST_CASE("ftpl_step prepends the fake history and follows the oracle") {
  const Valuation val{AdditiveValuation({3.0, 3.0})};
  auto oracle = [&](std::span<const Vec> hist) { return buyer_oracle(hist, val).set; };

  SECTION("zero fake sample on an empty history reduces to demand at zero") {
    const std::vector<Vec> fake{Vec{0.0, 0.0}};
    CHECK(ftpl_step({}, fake, oracle) == 0b11u);
  }

  SECTION("one observation plus one fake sample averages the two") {
    const std::vector<Vec> fake{Vec{4.0, 1.0}};
    const std::vector<Vec> hist{Vec{0.0, 0.0}};
    // average price (2.0, 0.5): both items profitable for v=(3,3)
    CHECK(ftpl_step(hist, fake, oracle) == 0b11u);
    CHECK(ftpl_step(hist, fake, oracle) == demand_oracle(val, {2.0, 0.5}).set);
    const std::vector<Vec> pricey{Vec{8.0, 1.0}};
    CHECK(ftpl_step(hist, pricey, oracle) == 0b10u);
  }

  SECTION("sampler-driven step draws the exponential fake itself") {
    const std::vector<Vec> hist{Vec{0.0, 0.0}};
    Rng rng = make_rng(34);
    Rng copy = rng;
    const Vec x = sample_exponential(0.7, 2, copy);
    const ItemSet expect = demand_oracle(val, {x[0] / 2.0, x[1] / 2.0}).set;
    CHECK(ftpl_step(hist, PerturbationSampler{ExponentialSingleSample{0.7}}, 2, rng, oracle) ==
          expect);
    Rng other = make_rng(35);
    CHECK_THROWS_AS(
        ftpl_step(hist, PerturbationSampler{GeometricPerParameter{0.5, 3}}, 2, other, oracle),
        std::invalid_argument);
  }
}

TEST_CASE("buyer-problem rewards respect the declared range") {
  Rng rng = make_rng(36);
  const int m = 4;
  const Valuation val{testing::random_xos(rng, m, 3, 2.0)};
  const UtilityBounds bounds{value(val, full_set(m)), 3.0};
  for (int i = 0; i < 300; ++i) {
    const ItemSet s = testing::random_set(rng, m);
    const Vec theta = testing::grid_vector(rng, m, bounds.D);
    const double u = buyer_utility(val, s, theta);
    CHECK(u >= -bounds.f_minus(theta) - 1e-12);
    CHECK(u <= bounds.f_plus(theta) + 1e-12);
  }
}

TEST_CASE("buyer ftpl learner matches a manual reconstruction") {
  Rng rng = make_rng(25);
  const Valuation val{testing::random_xos(rng, 4, 3, 4.0)};
  const double eps = 0.8;
  const std::uint64_t seed = 77;
  BuyerFtplLearner learner(val, eps, /*fresh=*/false, seed);

  Rng fixed_rng = make_rng(seed, 0);
  const Vec x = sample_exponential(eps, 4, fixed_rng);
  std::vector<Vec> history;
  for (int t = 1; t <= 30; ++t) {
    const ItemSet chosen = learner.choose();
    Vec price(4);
    for (int j = 0; j < 4; ++j) {
      double sum = x[j];
      for (const Vec& theta : history) sum += theta[j];
      price[j] = sum / t;
    }
    CHECK(chosen == demand_oracle(val, price).set);
    Vec theta = testing::grid_vector(rng, 4, 3.0);
    learner.observe(theta);
    history.push_back(std::move(theta));
  }
}

TEST_CASE("fresh and fixed perturbations agree in expectation against a fixed sequence") {
  const Valuation val{AdditiveValuation({2.0, 1.0, 1.5})};
  std::vector<Vec> sequence;
  Rng seq_rng = make_rng(26);
  const int T = 15;
  for (int t = 0; t < T; ++t) sequence.push_back(testing::grid_vector(seq_rng, 3, 2.5));

  auto mean_utility = [&](bool fresh, std::uint64_t seed_base, int reps) {
    double total = 0.0;
    for (int rep = 0; rep < reps; ++rep) {
      BuyerFtplLearner learner(val, 0.5, fresh, seed_base + rep);
      for (const Vec& theta : sequence) {
        const ItemSet s = learner.choose();
        total += buyer_utility(val, s, theta);
        learner.observe(theta);
      }
    }
    return total / reps;
  };

  const int reps = 4000;
  const double fresh_mean = mean_utility(true, 1000, reps);
  const double fixed_mean = mean_utility(false, 2000000, reps);
  // Per-round marginals are identical in law; allow generous Monte Carlo slack.
  const double scale = T * (2.0 + 1.0 + 1.5);
  CHECK(std::abs(fresh_mean - fixed_mean) < 0.02 * scale);
}

TEST_CASE("be-the-leader inequality") {
  Rng rng = make_rng(27);

  SECTION("single-round sequences hold with equality") {
    const Valuation val{AdditiveValuation({2.0, 1.0})};
    const std::vector<Vec> seq{Vec{0.5, 0.25}};
    auto oracle = [&](std::span<const Vec> p) { return exact_buyer_argmax(val, p); };
    auto util = [&](ItemSet s, const Vec& theta) { return buyer_utility(val, s, theta); };
    const std::vector<ItemSet> panel{0b00u, 0b01u, 0b10u, 0b11u};
    CHECK(be_the_leader_check<ItemSet>(seq, oracle, util, panel));
  }

  SECTION("random buyer sequences with brute-force oracles") {
    for (int i = 0; i < 60; ++i) {
      const int m = uniform_int(rng, 2, 6);
      const Valuation val{testing::random_xos(rng, m, uniform_int(rng, 1, 4), 4.0)};
      std::vector<Vec> seq;
      const int T = uniform_int(rng, 1, 30);
      for (int t = 0; t < T; ++t) seq.push_back(testing::grid_vector(rng, m, 4.0));
      auto oracle = [&](std::span<const Vec> p) { return exact_buyer_argmax(val, p); };
      auto util = [&](ItemSet s, const Vec& theta) { return buyer_utility(val, s, theta); };
      std::vector<ItemSet> panel;
      for (int a = 0; a < 6; ++a) panel.push_back(testing::random_set(rng, m));
      CHECK(be_the_leader_check<ItemSet>(seq, oracle, util, panel));
    }
  }
}

TEST_CASE("stability estimates") {
  const Valuation val{AdditiveValuation({2.0, 2.0})};

  SECTION("zero perturbation and a constant sequence are perfectly stable") {
    const std::vector<Vec> seq(8, Vec{0.5, 1.0});
    auto oracle = [&](std::span<const Vec> p) { return exact_buyer_argmax(val, p); };
    auto util = [&](ItemSet s, const Vec& theta) { return buyer_utility(val, s, theta); };
    auto zero_fake = [&](Rng&) { return std::vector<Vec>{Vec{0.0, 0.0}}; };
    Rng rng = make_rng(28);
    for (int t = 2; t <= 8; ++t) {
      const MonteCarloEstimate est =
          stability_estimate<ItemSet>(seq, t, 50, zero_fake, oracle, util, rng);
      CHECK(est.mean == 0.0);
    }
  }

  SECTION("exponential single-sample stability is within the closed-form bound") {
    Rng gen = make_rng(29);
    const int m = 2;
    const double D = 2.0, H = 4.0, eps = 0.25;
    std::vector<Vec> seq;
    for (int t = 0; t < 20; ++t) seq.push_back(testing::grid_vector(gen, m, D));
    auto oracle = [&](std::span<const Vec> p) { return exact_buyer_argmax(val, p); };
    auto util = [&](ItemSet s, const Vec& theta) { return buyer_utility(val, s, theta); };
    auto fake = [&](Rng& r) { return std::vector<Vec>{sample_exponential(eps, m, r)}; };
    Rng rng = make_rng(30);
    for (int t : {1, 5, 10, 20}) {
      const MonteCarloEstimate est =
          stability_estimate<ItemSet>(seq, t, 4000, fake, oracle, util, rng);
      const double bound = demand_stability_bound(m, D, H, eps, t);
      CHECK(est.mean <= bound + 2.0 * est.std_error);
    }
  }
}

TEST_CASE("finite-parameter ftpl") {
  SECTION("a single-parameter universe forces the best response from round two on") {
    // Two actions, one parameter; action 1 is strictly better.
    auto oracle = [&](std::span<const long long> freq) { return freq[0] > 0 ? 1 : 0; };
    auto util = [&](int action, int) { return action == 1 ? 3.0 : 1.0; };
    const std::vector<int> sequence(12, 0);
    Rng rng = make_rng(31);
    const FiniteFtplRun<int> run = ftpl_finite_run<int>(1, sequence, 0.5, oracle, util, rng);
    for (std::size_t t = 1; t < run.actions.size(); ++t) CHECK(run.actions[t] == 1);
  }

  SECTION("parameters outside the universe are rejected") {
    auto oracle = [&](std::span<const long long>) { return 0; };
    auto util = [&](int, int) { return 0.0; };
    const std::vector<int> sequence{0, 2};
    Rng rng = make_rng(32);
    CHECK_THROWS_AS(ftpl_finite_run<int>(2, sequence, 0.5, oracle, util, rng),
                    std::invalid_argument);
  }

  SECTION("cumulative regret stays below 2H sqrt(dT) on random small games") {
    Rng rng = make_rng(33);
    for (int trial = 0; trial < 5; ++trial) {
      const int d = uniform_int(rng, 2, 5);
      const int actions = uniform_int(rng, 3, 8);
      const double H = 1.0;
      std::vector<Vec> payoff(actions, Vec(d));
      for (auto& row : payoff) {
        for (double& x : row) x = uniform_on(rng, 0.0, H);
      }
      const int T = 500;
      std::vector<int> sequence(T);
      for (int& i : sequence) i = uniform_int(rng, 0, d - 1);
      auto oracle = [&](std::span<const long long> freq) {
        int best = 0;
        double best_score = -1.0;
        for (int a = 0; a < actions; ++a) {
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
      const FiniteFtplRun<int> run =
          ftpl_finite_run<int>(d, sequence, default_geometric_p(d, T), oracle, util, rng);
      std::vector<long long> counts(d, 0);
      for (int i : sequence) ++counts[i];
      double best_fixed = 0.0;
      for (int a = 0; a < actions; ++a) {
        double total = 0.0;
        for (int i = 0; i < d; ++i) total += static_cast<double>(counts[i]) * payoff[a][i];
        best_fixed = std::max(best_fixed, total);
      }
      CHECK(best_fixed - run.cumulative <= finite_regret_bound(H, d, T));
    }
  }
}
