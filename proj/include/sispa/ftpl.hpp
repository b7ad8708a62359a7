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
// Follow-the-perturbed-leader with sample perturbations: instead of
// perturbing cumulative rewards, a fake history is prepended to the observed
// parameter sequence and an exact optimization oracle is followed. Two
// perturbation families are provided: a single exponential threshold vector
// for the online buyer's problem, and per-parameter geometric sample counts
// for finite parameter universes.

#ifndef SISPA_FTPL_HPP
#define SISPA_FTPL_HPP

#include <cmath>
#include <concepts>
#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "sispa/common.hpp"
#include "sispa/rng.hpp"
#include "sispa/valuation.hpp"

namespace sispa {

/// Ordered parameter observations theta^1..theta^t, oldest first.
using ParameterHistory = std::vector<Vec>;

/// Exact offline optimizer: maps a parameter sequence to an action that
/// maximizes the cumulative utility. Everything here assumes exact argmaxes;
/// approximate oracles void the leader inequalities.
template <class F>
concept OptimizationOracle = std::invocable<F, std::span<const Vec>>;

/// Reward range contract for the online buyer's problem:
/// u(S, theta) in [-|theta|_1, H] with thresholds bounded by D.
struct UtilityBounds {
  double H = 0.0;
  double D = 0.0;

  double f_minus(const Vec& theta) const {
    double s = 0.0;
    for (double x : theta) s += x;
    return s;
  }
  double f_plus(const Vec&) const { return H; }
};

// -- Perturbation samplers ----------------------------------------------------

struct ExponentialSingleSample {
  double epsilon = 1.0;  // rate; coordinates have mean 1/epsilon
};

struct GeometricPerParameter {
  double p = 0.5;  // per-coin head probability
  int universe_size = 1;
};

using PerturbationSampler = std::variant<ExponentialSingleSample, GeometricPerParameter>;

/// m i.i.d. Exponential(rate) coordinates via inverse CDF.
inline Vec sample_exponential(double rate, int m, Rng& rng) {
  if (!(rate > 0.0)) throw std::invalid_argument("exponential sample: rate must be positive");
  Vec x(m);
  for (double& v : x) v = exponential_draw(rng, rate);
  return x;
}

/// Per-parameter fake-observation counts: tails before the first head of a
/// p-coin, independently for each of the d universe members.
inline std::vector<long long> sample_geometric_counts(double p, int d, Rng& rng) {
  if (!(p > 0.0) || !(p < 1.0)) throw std::invalid_argument("geometric sample: p must be in (0,1)");
  std::vector<long long> z(d);
  for (long long& c : z) c = geometric_draw(rng, p);
  return z;
}

/// Horizon-tuned rate for the single-sample exponential perturbation.
inline double default_exponential_rate(double H, double D, int T) {
  return std::sqrt(1.0 / (H * D * static_cast<double>(T)));
}

// -- Guarantee ceilings, used by the verification harness ----------------------

/// Regret ceiling of the buyer-problem learner with the default rate:
/// 2(mD+H)m(ln T + 1) + 4m sqrt((mD+H)DT).
inline double demand_regret_bound(int m, double D, double H, int T) {
  const double range = m * D + H;
  return 2.0 * range * m * (std::log(static_cast<double>(T)) + 1.0) +
         4.0 * m * std::sqrt(range * D * static_cast<double>(T));
}

/// Per-round stability ceiling of the same learner: (mD+H)(m/t + 3 eps m D).
inline double demand_stability_bound(int m, double D, double H, double epsilon, int t) {
  return (m * D + H) * (static_cast<double>(m) / t + 3.0 * epsilon * m * D);
}

/// Cumulative regret ceiling in the finite-parameter mode: 2H sqrt(dT).
inline double finite_regret_bound(double H, int d, int T) {
  return 2.0 * H * std::sqrt(static_cast<double>(d) * T);
}

inline double default_geometric_p(int d, int T) {
  return std::sqrt(static_cast<double>(d) / static_cast<double>(T));
}

// -- Generic single step -------------------------------------------------------

/// One perturbed-leader step: prepend the fake samples to the observed
/// history and follow the exact oracle. The caller draws the fake samples
/// fresh each round (adaptive-adversary variant) or once per run
/// (fixed-sample variant).
template <OptimizationOracle OracleFn>
auto ftpl_step(std::span<const Vec> history, std::span<const Vec> fake_samples,
               OracleFn&& oracle) {
  std::vector<Vec> augmented;
  augmented.reserve(fake_samples.size() + history.size());
  augmented.insert(augmented.end(), fake_samples.begin(), fake_samples.end());
  augmented.insert(augmented.end(), history.begin(), history.end());
  return oracle(std::span<const Vec>(augmented));
}

/// Sampler-driven variant for threshold-vector histories. Geometric
/// perturbations live in the finite-universe engine and are rejected here.
template <OptimizationOracle OracleFn>
auto ftpl_step(std::span<const Vec> history, const PerturbationSampler& sampler, int m,
               Rng& rng, OracleFn&& oracle) {
  if (!std::holds_alternative<ExponentialSingleSample>(sampler)) {
    throw std::invalid_argument("ftpl step: geometric perturbations need a finite universe");
  }
  const double rate = std::get<ExponentialSingleSample>(sampler).epsilon;
  const std::vector<Vec> fake{sample_exponential(rate, m, rng)};
  return ftpl_step(history, std::span<const Vec>(fake), oracle);
}

// -- Online buyer's problem ---------------------------------------------------

/// The offline optimum over a parameter sequence is a single demand-oracle
/// call at the average threshold vector.
inline DemandResult buyer_oracle(std::span<const Vec> history, const Valuation& val,
                                 int demand_cap = kDefaultDemandBruteForceCap) {
  if (history.empty()) throw std::invalid_argument("buyer oracle: empty history");
  const int m = items(val);
  Vec avg(m, 0.0);
  for (const Vec& theta : history) {
    for (int j = 0; j < m; ++j) avg[j] += theta[j];
  }
  for (double& x : avg) x /= static_cast<double>(history.size());
  return demand_oracle(val, avg, demand_cap);
}

/// Buyer-problem FTPL learner. With fresh_samples the fake threshold vector
/// is redrawn every round from a per-round stream; otherwise it is drawn once
/// at construction (sufficient against oblivious adversaries and identical in
/// expectation round by round).
class BuyerFtplLearner {
 public:
  BuyerFtplLearner(Valuation val, double epsilon, bool fresh_samples, std::uint64_t seed,
                   int demand_cap = kDefaultDemandBruteForceCap)
      : val_(std::move(val)),
        epsilon_(epsilon),
        fresh_(fresh_samples),
        seed_(seed),
        demand_cap_(demand_cap),
        m_(items(val_)),
        sums_(m_, 0.0) {
    if (!(epsilon_ > 0.0)) throw std::invalid_argument("ftpl: epsilon must be positive");
    if (!fresh_) {
      Rng rng = make_rng(seed_, 0);
      fixed_sample_ = sample_exponential(epsilon_, m_, rng);
    }
  }

  /// Set to buy this round: demand at the average of {x} and the history.
  ItemSet choose() {
    const int t = observed_ + 1;
    Vec price(m_);
    if (fresh_) {
      Rng rng = make_rng(seed_, static_cast<std::uint64_t>(t));
      const Vec x = sample_exponential(epsilon_, m_, rng);
      for (int j = 0; j < m_; ++j) price[j] = (x[j] + sums_[j]) / t;
    } else {
      for (int j = 0; j < m_; ++j) price[j] = (fixed_sample_[j] + sums_[j]) / t;
    }
    return demand_oracle(val_, price, demand_cap_).set;
  }

  void observe(const Vec& theta) {
    if (static_cast<int>(theta.size()) != m_) {
      throw std::invalid_argument("ftpl: threshold dimension mismatch");
    }
    for (int j = 0; j < m_; ++j) sums_[j] += theta[j];
    ++observed_;
  }

  const Valuation& valuation() const { return val_; }
  int observed_rounds() const { return observed_; }

 private:
  Valuation val_;
  double epsilon_;
  bool fresh_;
  std::uint64_t seed_;
  int demand_cap_;
  int m_;
  int observed_ = 0;
  Vec sums_;
  Vec fixed_sample_;
};

// -- Verification helpers ------------------------------------------------------

/// Checks the leader inequality: playing the prefix optimum with fore-sight
/// accumulates at least as much as the full-sequence optimum, and at least as
/// much as any fixed action from the panel. Exact up to float accumulation.
template <class Action, OptimizationOracle OracleFn, class UtilFn>
bool be_the_leader_check(std::span<const Vec> sequence, OracleFn&& oracle, UtilFn&& utility,
                         std::span<const Action> panel, double tolerance = 1e-9) {
  const int T = static_cast<int>(sequence.size());
  double leader_total = 0.0;
  for (int t = 1; t <= T; ++t) {
    const Action a = oracle(sequence.subspan(0, t));
    leader_total += utility(a, sequence[t - 1]);
  }
  auto fixed_total = [&](const Action& a) {
    double s = 0.0;
    for (const Vec& theta : sequence) s += utility(a, theta);
    return s;
  };
  const Action final_leader = oracle(sequence);
  if (leader_total + tolerance < fixed_total(final_leader)) return false;
  for (const Action& a : panel) {
    if (leader_total + tolerance < fixed_total(a)) return false;
  }
  return true;
}

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  int trials = 0;
};

/// Monte-Carlo estimate of the per-round stability gap at round t:
/// E_x[ u(M({x} u theta^{1:t}), theta^t) - u(M({x} u theta^{1:t-1}), theta^t) ].
/// draw_fake produces one fake-sample sequence per trial.
template <class Action, OptimizationOracle OracleFn, class UtilFn, class SampleFn>
MonteCarloEstimate stability_estimate(std::span<const Vec> sequence, int t, int trials,
                                      SampleFn&& draw_fake, OracleFn&& oracle,
                                      UtilFn&& utility, Rng& rng) {
  if (t < 1 || t > static_cast<int>(sequence.size())) {
    throw std::invalid_argument("stability estimate: round out of range");
  }
  if (trials < 1) throw std::invalid_argument("stability estimate: need at least one trial");
  const Vec& theta_t = sequence[t - 1];
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < trials; ++i) {
    const std::vector<Vec> fake = draw_fake(rng);
    const Action be = ftpl_step(sequence.subspan(0, t), std::span<const Vec>(fake), oracle);
    const Action follow =
        ftpl_step(sequence.subspan(0, t - 1), std::span<const Vec>(fake), oracle);
    const double diff = utility(be, theta_t) - utility(follow, theta_t);
    sum += diff;
    sum_sq += diff * diff;
  }
  MonteCarloEstimate est;
  est.trials = trials;
  est.mean = sum / trials;
  const double var = std::max(0.0, sum_sq / trials - est.mean * est.mean);
  est.std_error = trials > 1 ? std::sqrt(var / (trials - 1)) : 0.0;
  return est;
}

// -- Finite parameter universe --------------------------------------------------

/// Per-round output of a finite-mode run.
template <class Action>
struct FiniteFtplRun {
  std::vector<Action> actions;
  Vec utilities;
  double cumulative = 0.0;
};

/// Fixed-sample FTPL over a finite universe of d parameters. The perturbation
/// is a vector z of geometric fake counts added to the running frequency
/// vector phi; the oracle consumes frequency vectors. sequence holds universe
/// indices; utility is u(action, universe_index).
template <class Action, class OracleFn, class UtilFn>
FiniteFtplRun<Action> ftpl_finite_run(int d, std::span<const int> sequence, double p,
                                      OracleFn&& oracle, UtilFn&& utility, Rng& rng,
                                      bool fresh_samples = false) {
  for (int idx : sequence) {
    if (idx < 0 || idx >= d) throw std::invalid_argument("finite ftpl: parameter outside universe");
  }
  const int T = static_cast<int>(sequence.size());
  FiniteFtplRun<Action> run;
  run.actions.reserve(T);
  run.utilities.reserve(T);

  std::vector<long long> freq(d, 0);
  std::vector<long long> z = sample_geometric_counts(p, d, rng);
  std::vector<long long> perturbed(d);
  for (int t = 0; t < T; ++t) {
    if (fresh_samples && t > 0) z = sample_geometric_counts(p, d, rng);
    for (int i = 0; i < d; ++i) perturbed[i] = freq[i] + z[i];
    Action a = oracle(std::span<const long long>(perturbed));
    const double u = utility(a, sequence[t]);
    run.actions.push_back(std::move(a));
    run.utilities.push_back(u);
    run.cumulative += u;
    ++freq[sequence[t]];
  }
  return run;
}

}  // namespace sispa

#endif  // SISPA_FTPL_HPP
