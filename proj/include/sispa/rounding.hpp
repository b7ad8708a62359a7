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
// Poisson convex rounding for coverage valuations: marginals x in [0,1]^m
// are rounded to a set by including item j with probability 1 - exp(-x_j).
// The rounded expectation F is concave with a closed-form gradient, which
// turns the online buyer's problem into online concave maximization solved
// by projected gradient ascent over the unit box.

#ifndef SISPA_ROUNDING_HPP
#define SISPA_ROUNDING_HPP

#include <cmath>
#include <vector>

#include "sispa/common.hpp"
#include "sispa/rng.hpp"
#include "sispa/valuation.hpp"

namespace sispa {

/// Expected value under Poisson rounding of marginals x:
/// F(x) = sum_v w_v (1 - exp(-sum_{j covering v} x_j)).
inline double coverage_rounded_value(const CoverageValuation& cov, const Vec& x) {
  double total = 0.0;
  const Vec& w = cov.vertex_weights();
  const auto& covering = cov.covering_items();
  for (std::size_t v = 0; v < w.size(); ++v) {
    double exponent = 0.0;
    for (int j : covering[v]) exponent += x[j];
    total += w[v] * (1.0 - std::exp(-exponent));
  }
  return total;
}

/// Gradient of F: coordinate j sums w_v exp(-sum over v's covering items)
/// over the vertices item j covers. Every coordinate lies in [0, v({j})].
inline Vec coverage_rounded_gradient(const CoverageValuation& cov, const Vec& x) {
  Vec grad(cov.items(), 0.0);
  const Vec& w = cov.vertex_weights();
  const auto& covering = cov.covering_items();
  for (std::size_t v = 0; v < w.size(); ++v) {
    double exponent = 0.0;
    for (int j : covering[v]) exponent += x[j];
    const double contribution = w[v] * std::exp(-exponent);
    for (int j : covering[v]) grad[j] += contribution;
  }
  return grad;
}

/// Coordinate-wise clamp onto [0,1]^m, the L2 projection for the unit box.
inline Vec project_box(Vec y) {
  for (double& v : y) v = std::clamp(v, 0.0, 1.0);
  return y;
}

/// Inclusion probability of item j under the rounding: 1 - exp(-x_j) <= x_j.
inline double poisson_inclusion_probability(double x_j) { return -std::expm1(-x_j); }

inline ItemSet poisson_sample(const Vec& x, Rng& rng) {
  ItemSet s = kEmptySet;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (uniform_unit(rng) <= poisson_inclusion_probability(x[j])) s |= ItemSet{1} << j;
  }
  return s;
}

/// Largest singleton value times sqrt(m); bounds the gradient norm of F.
inline double coverage_gradient_norm_bound(const CoverageValuation& cov) {
  double top = 0.0;
  for (int j = 0; j < cov.items(); ++j) top = std::max(top, cov.value(ItemSet{1} << j));
  return top * std::sqrt(static_cast<double>(cov.items()));
}

enum class PgdStepRule {
  kDiameterOverGradient,  // eta_t = sqrt(m) / (G sqrt(t)), the default
  kGradientOverDiameter,  // eta_t = G / (sqrt(m) sqrt(t)), diagnostic only
};

/// Projected gradient ascent on the per-round concave reward
/// f^t(x) = F(x) - <theta^t, x>, with the iterate rounded to a set each round.
/// K bounds the threshold coordinates the adversary may play.
class PgdCoverageLearner {
 public:
  PgdCoverageLearner(CoverageValuation cov, double K, std::uint64_t seed,
                     PgdStepRule rule = PgdStepRule::kDiameterOverGradient)
      : cov_(std::move(cov)),
        m_(cov_.items()),
        K_(K),
        rule_(rule),
        seed_(seed),
        x_(m_, 0.0) {
    if (!(K_ >= 0.0)) throw std::invalid_argument("pgd: negative threshold bound");
    grad_norm_bound_ = coverage_gradient_norm_bound(cov_);
    gradient_bound_ = grad_norm_bound_ + std::sqrt(static_cast<double>(m_) * K_);
    diameter_ = std::sqrt(static_cast<double>(m_));
  }

  const Vec& marginals() const { return x_; }
  const CoverageValuation& coverage() const { return cov_; }
  double gradient_bound() const { return gradient_bound_; }
  double diameter() const { return diameter_; }

  /// Expected reward of the current round's rounded distribution, before
  /// seeing theta: F(x^t) (the price part is linear and subtracted later).
  double rounded_value() const { return coverage_rounded_value(cov_, x_); }

  /// Samples this round's set from the rounding of the current marginals.
  ItemSet choose() {
    Rng rng = make_rng(seed_, static_cast<std::uint64_t>(round_) + 1);
    return poisson_sample(x_, rng);
  }

  void observe(const Vec& theta) {
    if (static_cast<int>(theta.size()) != m_) {
      throw std::invalid_argument("pgd: threshold dimension mismatch");
    }
    ++round_;
    const double eta = step_size(round_ + 1);
    Vec grad = coverage_rounded_gradient(cov_, x_);
    for (int j = 0; j < m_; ++j) x_[j] += eta * (grad[j] - theta[j]);
    x_ = project_box(std::move(x_));
  }

  double step_size(int t) const {
    const double root_t = std::sqrt(static_cast<double>(t));
    if (rule_ == PgdStepRule::kDiameterOverGradient) {
      return diameter_ / (gradient_bound_ * root_t);
    }
    return gradient_bound_ / (diameter_ * root_t);
  }

 private:
  CoverageValuation cov_;
  int m_;
  double K_;
  PgdStepRule rule_;
  std::uint64_t seed_;
  Vec x_;
  int round_ = 0;
  double grad_norm_bound_ = 0.0;
  double gradient_bound_ = 0.0;
  double diameter_ = 0.0;
};

/// Cumulative-regret ceiling of the ascent: 3 G D' sqrt(T) with D' = sqrt(m).
inline double pgd_regret_bound(const PgdCoverageLearner& learner, int T) {
  return 3.0 * learner.gradient_bound() * learner.diameter() * std::sqrt(static_cast<double>(T));
}

/// Buyer-problem shortfall ceiling at horizon T: 3 (H' + sqrt(mK)) sqrt(m/T).
inline double pgd_buyer_shortfall_bound(const CoverageValuation& cov, double K, int T) {
  const double m = cov.items();
  const double g = coverage_gradient_norm_bound(cov) + std::sqrt(m * K);
  return 3.0 * g * std::sqrt(m / static_cast<double>(T));
}

/// Certified upper bound on max over the unit box of the concave objective
/// g(x) = scale * F(x) - <linear, x>, evaluated from any feasible point:
/// concavity gives g(x*) <= g(x0) + max over the box of <grad g(x0), x - x0>.
inline double concave_objective_upper_bound(const CoverageValuation& cov, double scale,
                                            const Vec& linear, const Vec& x0) {
  const int m = cov.items();
  double g0 = scale * coverage_rounded_value(cov, x0);
  Vec grad = coverage_rounded_gradient(cov, x0);
  for (int j = 0; j < m; ++j) {
    grad[j] = scale * grad[j] - linear[j];
    g0 -= linear[j] * x0[j];
  }
  double slack = 0.0;
  for (int j = 0; j < m; ++j) {
    slack += std::max(grad[j] * (1.0 - x0[j]), -grad[j] * x0[j]);
  }
  return g0 + slack;
}

/// Plain ascent to a near-maximizer of scale * F(x) - <linear, x>; paired
/// with the certificate above it brackets the offline optimum.
inline Vec maximize_concave_objective(const CoverageValuation& cov, double scale,
                                      const Vec& linear, int iterations = 4000) {
  const int m = cov.items();
  Vec x(m, 0.5);
  double linear_norm = 0.0;
  for (double v : linear) linear_norm += v * v;
  const double g_bound = scale * coverage_gradient_norm_bound(cov) + std::sqrt(linear_norm);
  const double denom = g_bound > 0.0 ? g_bound : 1.0;
  for (int t = 1; t <= iterations; ++t) {
    Vec grad = coverage_rounded_gradient(cov, x);
    const double eta = std::sqrt(static_cast<double>(m)) / (denom * std::sqrt(static_cast<double>(t)));
    for (int j = 0; j < m; ++j) x[j] += eta * (scale * grad[j] - linear[j]);
    x = project_box(std::move(x));
  }
  return x;
}

}  // namespace sispa

#endif  // SISPA_ROUNDING_HPP
