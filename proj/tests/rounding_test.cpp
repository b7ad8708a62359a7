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

#include <cmath>

#include <catch2/catch_amalgamated.hpp>

#include "sispa/rounding.hpp"
#include "test_support.hpp"

using namespace sispa;

TEST_CASE("rounded expectation closed form") {
  SECTION("zero marginals give zero") {
    Rng rng = make_rng(51);
    const CoverageValuation cov = testing::random_coverage(rng, 4, 5, 1.0);
    CHECK(coverage_rounded_value(cov, Vec(4, 0.0)) == 0.0);
  }

  SECTION("one vertex, one item, x=1") {
    const CoverageValuation cov(1, {1.0}, {{0}});
    CHECK(coverage_rounded_value(cov, {1.0}) == Catch::Approx(1.0 - std::exp(-1.0)));
  }

  SECTION("never exceeds the full-set value") {
    Rng rng = make_rng(52);
    for (int i = 0; i < 20; ++i) {
      const CoverageValuation cov = testing::random_coverage(rng, 4, 5, 2.0);
      Vec x(4);
      for (double& v : x) v = uniform_on(rng, 0.0, 1.0);
      CHECK(coverage_rounded_value(cov, x) <= cov.value(full_set(4)) + 1e-12);
    }
  }

  SECTION("matches the Monte-Carlo mean of sampled sets") {
    Rng rng = make_rng(53);
    const CoverageValuation cov = testing::random_coverage(rng, 5, 6, 1.0);
    Vec x(5);
    for (double& v : x) v = uniform_on(rng, 0.0, 1.0);
    const double f = coverage_rounded_value(cov, x);
    const int n = 100000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double v = cov.value(poisson_sample(x, rng));
      sum += v;
      sum_sq += v * v;
    }
    const double mean = sum / n;
    const double var = std::max(0.0, sum_sq / n - mean * mean);
    const double se = std::sqrt(var / n);
    CHECK(std::abs(mean - f) <= 3.0 * se + 1e-9);
  }
}

TEST_CASE("rounded gradient") {
  SECTION("at zero the gradient is the singleton value") {
    Rng rng = make_rng(54);
    const CoverageValuation cov = testing::random_coverage(rng, 5, 6, 2.0);
    const Vec grad = coverage_rounded_gradient(cov, Vec(5, 0.0));
    for (int j = 0; j < 5; ++j) {
      CHECK(grad[j] == Catch::Approx(cov.value(ItemSet{1} << j)).margin(1e-12));
    }
  }

  SECTION("matches central finite differences") {
    Rng rng = make_rng(55);
    for (int i = 0; i < 20; ++i) {
      const int m = uniform_int(rng, 2, 6);
      const CoverageValuation cov = testing::random_coverage(rng, m, 6, 2.0);
      Vec x(m);
      for (double& v : x) v = uniform_on(rng, 0.0, 1.0);
      const Vec grad = coverage_rounded_gradient(cov, x);
      const double h = 1e-5;
      for (int j = 0; j < m; ++j) {
        Vec hi = x, lo = x;
        hi[j] += h;
        lo[j] -= h;
        const double fd =
            (coverage_rounded_value(cov, hi) - coverage_rounded_value(cov, lo)) / (2 * h);
        CHECK(std::abs(fd - grad[j]) <= 1e-6 * std::max(1.0, std::abs(grad[j])));
      }
    }
  }

  SECTION("coordinates sit in [0, v({j})] and the norm bound holds") {
    Rng rng = make_rng(56);
    const CoverageValuation cov = testing::random_coverage(rng, 5, 6, 2.0);
    for (int i = 0; i < 30; ++i) {
      Vec x(5);
      for (double& v : x) v = uniform_on(rng, 0.0, 1.0);
      const Vec grad = coverage_rounded_gradient(cov, x);
      double norm_sq = 0.0;
      for (int j = 0; j < 5; ++j) {
        CHECK(grad[j] >= 0.0);
        CHECK(grad[j] <= cov.value(ItemSet{1} << j) + 1e-12);
        norm_sq += grad[j] * grad[j];
      }
      CHECK(std::sqrt(norm_sq) <= coverage_gradient_norm_bound(cov) + 1e-12);
    }
  }
}

TEST_CASE("box projection clamps coordinatewise") {
  CHECK(project_box({-0.5, 0.3, 1.7}) == Vec{0.0, 0.3, 1.0});
  const Vec inside{0.2, 0.8};
  CHECK(project_box(inside) == inside);
  CHECK(project_box(project_box({-3.0, 4.0})) == project_box({-3.0, 4.0}));
}

TEST_CASE("poisson inclusion probability never exceeds the marginal") {
  for (double x : {0.0, 0.1, 0.5, 0.9, 1.0}) {
    CHECK(poisson_inclusion_probability(x) <= x);
    CHECK(poisson_inclusion_probability(x) >= 0.0);
  }
}

TEST_CASE("pgd learner on free items climbs to the full marginals") {
  const CoverageValuation cov(1, {1.0}, {{0}});
  PgdCoverageLearner learner(cov, /*K=*/1.0, 7);
  const Vec zero{0.0};
  double expected_total = 0.0;
  const int T = 4000;
  for (int t = 0; t < T; ++t) {
    expected_total += learner.rounded_value();
    learner.observe(zero);
    CHECK(learner.marginals()[0] >= 0.0);
    CHECK(learner.marginals()[0] <= 1.0);
  }
  CHECK(learner.marginals()[0] == Catch::Approx(1.0).margin(1e-6));
  // Average utility approaches F(1) = 1 - 1/e.
  CHECK(expected_total / T >= (1.0 - std::exp(-1.0)) - 0.05);
}

TEST_CASE("pgd regret stays below 3 G D sqrt(T) with the default step rule") {
  Rng rng = make_rng(57);
  for (int trial = 0; trial < 4; ++trial) {
    const int m = uniform_int(rng, 3, 5);
    const CoverageValuation cov = testing::random_coverage(rng, m, 6, 1.0);
    const double K = 1.0;
    const int T = 2000;
    PgdCoverageLearner learner(cov, K, 100 + trial);
    std::vector<Vec> thetas;
    Vec theta_sum(m, 0.0);
    double achieved = 0.0;
    for (int t = 0; t < T; ++t) {
      const Vec theta = testing::grid_vector(rng, m, K);
      double f = coverage_rounded_value(cov, learner.marginals());
      for (int j = 0; j < m; ++j) f -= theta[j] * learner.marginals()[j];
      achieved += f;
      learner.observe(theta);
      for (int j = 0; j < m; ++j) theta_sum[j] += theta[j];
      thetas.push_back(theta);
    }
    // Certified upper bound on the offline optimum of sum_t f^t.
    const Vec x_star = maximize_concave_objective(cov, T, theta_sum);
    const double offline_upper = concave_objective_upper_bound(cov, T, theta_sum, x_star);
    const double regret_upper = offline_upper - achieved;
    CHECK(regret_upper <= pgd_regret_bound(learner, T));
  }
}

TEST_CASE("step rule diagnostic: the diameter-over-gradient schedule wins") {
  // The alternative schedule inverts the classical ratio; run both on the
  // same sequence and require the default to satisfy the bound.
  Rng rng = make_rng(58);
  const int m = 4;
  const CoverageValuation cov = testing::random_coverage(rng, m, 6, 1.0);
  const double K = 1.0;
  const int T = 1500;
  double regret_upper[2] = {0.0, 0.0};
  int idx = 0;
  for (PgdStepRule rule :
       {PgdStepRule::kDiameterOverGradient, PgdStepRule::kGradientOverDiameter}) {
    Rng adv = make_rng(59);
    PgdCoverageLearner learner(cov, K, 13, rule);
    Vec theta_sum(m, 0.0);
    double achieved = 0.0;
    for (int t = 0; t < T; ++t) {
      const Vec theta = testing::grid_vector(adv, m, K);
      double f = coverage_rounded_value(cov, learner.marginals());
      for (int j = 0; j < m; ++j) f -= theta[j] * learner.marginals()[j];
      achieved += f;
      learner.observe(theta);
      for (int j = 0; j < m; ++j) theta_sum[j] += theta[j];
    }
    const Vec x_star = maximize_concave_objective(cov, T, theta_sum);
    regret_upper[idx++] =
        concave_objective_upper_bound(cov, T, theta_sum, x_star) - achieved;
  }
  PgdCoverageLearner reference(cov, K, 13);
  CHECK(regret_upper[0] <= pgd_regret_bound(reference, T));
  INFO("default schedule regret " << regret_upper[0] << ", inverted schedule "
                                  << regret_upper[1]);
}

TEST_CASE("midpoint concavity of the rounded expectation") {
  Rng rng = make_rng(60);
  for (int i = 0; i < 50; ++i) {
    const int m = uniform_int(rng, 2, 6);
    const CoverageValuation cov = testing::random_coverage(rng, m, 6, 2.0);
    for (int pair = 0; pair < 20; ++pair) {
      Vec x(m), y(m), mid(m);
      for (int j = 0; j < m; ++j) {
        x[j] = uniform_on(rng, 0.0, 1.0);
        y[j] = uniform_on(rng, 0.0, 1.0);
        mid[j] = 0.5 * (x[j] + y[j]);
      }
      CHECK(coverage_rounded_value(cov, mid) >=
            0.5 * (coverage_rounded_value(cov, x) + coverage_rounded_value(cov, y)) - 1e-9);
    }
  }
}

TEST_CASE("expected payment under rounding undershoots the linear price term") {
  Rng rng = make_rng(61);
  const CoverageValuation cov = testing::random_coverage(rng, 4, 5, 1.0);
  for (int i = 0; i < 30; ++i) {
    Vec x(4);
    for (double& v : x) v = uniform_on(rng, 0.0, 1.0);
    const Vec theta = testing::grid_vector(rng, 4, 1.0);
    double expected_payment = 0.0, linear = 0.0;
    for (int j = 0; j < 4; ++j) {
      expected_payment += theta[j] * poisson_inclusion_probability(x[j]);
      linear += theta[j] * x[j];
    }
    CHECK(expected_payment <= linear + 1e-12);
  }
}
