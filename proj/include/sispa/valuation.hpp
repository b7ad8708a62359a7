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

#ifndef SISPA_VALUATION_HPP
#define SISPA_VALUATION_HPP

#include <algorithm>
#include <limits>
#include <utility>
#include <variant>
#include <vector>

#include "sispa/common.hpp"

namespace sispa {

inline constexpr int kDefaultDemandBruteForceCap = 20;

/// Sum of per-item values: v(S) = sum_{j in S} values[j]. Also the clause
/// type inside ExplicitXOS and a convenient test fixture.
struct AdditiveValuation {
  Vec values;

  AdditiveValuation() = default;
  explicit AdditiveValuation(Vec vals) : values(std::move(vals)) {
    for (double v : values) {
      if (!(v >= 0.0)) throw std::invalid_argument("additive: negative item value");
    }
  }

  int items() const { return static_cast<int>(values.size()); }
  double value(ItemSet s) const { return sum_over(s, values); }
};

/// Fractionally subadditive valuation given by an explicit list of additive
/// clauses: v(S) = max over clauses of the clause's sum on S. Clause ties are
/// broken toward the lowest index so every oracle is deterministic.
class ExplicitXOS {
 public:
  ExplicitXOS(int m, std::vector<Vec> clauses) : m_(m), clauses_(std::move(clauses)) {
    if (m_ < 1) throw std::invalid_argument("xos: need at least one item");
    if (clauses_.empty()) throw std::invalid_argument("xos: need at least one clause");
    for (const Vec& c : clauses_) {
      if (static_cast<int>(c.size()) != m_) throw std::invalid_argument("xos: clause length != m");
      for (double v : c) {
        if (!(v >= 0.0)) throw std::invalid_argument("xos: negative clause entry");
      }
    }
  }

  int items() const { return m_; }
  const std::vector<Vec>& clauses() const { return clauses_; }

  int clause_for(ItemSet s) const {
    int best = 0;
    double best_sum = sum_over(s, clauses_[0]);
    for (int l = 1; l < static_cast<int>(clauses_.size()); ++l) {
      const double sum = sum_over(s, clauses_[l]);
      if (sum > best_sum) {
        best_sum = sum;
        best = l;
      }
    }
    return best;
  }

  double value(ItemSet s) const { return sum_over(s, clauses_[clause_for(s)]); }

  /// Closed-form demand: the optimal utility is
  /// max over clauses of sum_j max(clause_j - p_j, 0), attained by buying the
  /// strictly profitable items of the maximizing clause. Zero-margin items are
  /// left out, which keeps the demanded set minimal without changing the value.
  std::pair<ItemSet, double> demand(const Vec& p) const {
    int best = 0;
    double best_util = -1.0;
    for (int l = 0; l < static_cast<int>(clauses_.size()); ++l) {
      double util = 0.0;
      for (int j = 0; j < m_; ++j) util += std::max(clauses_[l][j] - p[j], 0.0);
      if (util > best_util) {
        best_util = util;
        best = l;
      }
    }
    ItemSet s = kEmptySet;
    for (int j = 0; j < m_; ++j) {
      if (clauses_[best][j] > p[j]) s |= ItemSet{1} << j;
    }
    return {s, best_util};
  }

 private:
  int m_;
  std::vector<Vec> clauses_;
};

/// Coverage valuation over a vertex-weighted hypergraph: item j is the
/// hyper-edge beta_j, and v(S) is the total weight of vertices covered by the
/// union of the edges in S. Monotone and submodular.
class CoverageValuation {
 public:
  CoverageValuation(int m, Vec vertex_weights, std::vector<std::vector<int>> item_vertices)
      : m_(m), weights_(std::move(vertex_weights)), edges_(std::move(item_vertices)) {
    if (m_ < 1) throw std::invalid_argument("coverage: need at least one item");
    if (static_cast<int>(edges_.size()) != m_) throw std::invalid_argument("coverage: need one edge per item");
    for (double w : weights_) {
      if (!(w >= 0.0)) throw std::invalid_argument("coverage: negative vertex weight");
    }
    const int n = static_cast<int>(weights_.size());
    for (const auto& edge : edges_) {
      for (int v : edge) {
        if (v < 0 || v >= n) throw std::invalid_argument("coverage: vertex index out of range");
      }
    }
    // covering_items_[v] lists the items whose edge contains v, ascending.
    covering_items_.assign(weights_.size(), {});
    for (int j = 0; j < m_; ++j) {
      for (int v : edges_[j]) covering_items_[v].push_back(j);
    }
    for (auto& items : covering_items_) {
      std::sort(items.begin(), items.end());
      items.erase(std::unique(items.begin(), items.end()), items.end());
    }
  }

  int items() const { return m_; }
  int vertex_count() const { return static_cast<int>(weights_.size()); }
  const Vec& vertex_weights() const { return weights_; }
  const std::vector<std::vector<int>>& item_vertices() const { return edges_; }
  const std::vector<std::vector<int>>& covering_items() const { return covering_items_; }

  double value(ItemSet s) const {
    double total = 0.0;
    for (std::size_t v = 0; v < weights_.size(); ++v) {
      if (lowest_covering_item(v, s) >= 0) total += weights_[v];
    }
    return total;
  }

  /// Additive clause tight on s: each covered vertex's weight is credited to
  /// the lowest-index item of s that covers it.
  Vec xos_clause(ItemSet s) const {
    Vec clause(m_, 0.0);
    for (std::size_t v = 0; v < weights_.size(); ++v) {
      const int j = lowest_covering_item(v, s);
      if (j >= 0) clause[j] += weights_[v];
    }
    return clause;
  }

 private:
  int lowest_covering_item(std::size_t v, ItemSet s) const {
    for (int j : covering_items_[v]) {
      if (contains(s, j)) return j;
    }
    return -1;
  }

  int m_;
  Vec weights_;
  std::vector<std::vector<int>> edges_;
  std::vector<std::vector<int>> covering_items_;
};

/// v(S) = v whenever S is nonempty; the valuation used throughout the
/// hardness construction.
struct UnitDemandUniform {
  double v = 0.0;
  int m = 1;

  UnitDemandUniform() = default;
  UnitDemandUniform(double value, int item_count) : v(value), m(item_count) {
    if (!(v >= 0.0)) throw std::invalid_argument("unit demand: negative value");
    if (m < 1) throw std::invalid_argument("unit demand: need at least one item");
  }

  int items() const { return m; }
  double value(ItemSet s) const { return s != kEmptySet ? v : 0.0; }
};

using Valuation =
    std::variant<ExplicitXOS, CoverageValuation, UnitDemandUniform, AdditiveValuation>;

inline int items(const Valuation& val) {
  return std::visit([](const auto& v) { return v.items(); }, val);
}

inline double value(const Valuation& val, ItemSet s) {
  return std::visit([s](const auto& v) { return v.value(s); }, val);
}

/// The XOS oracle: an additive vector a with sum_{j in S} a_j = v(S) and
/// sum_{j in X} a_j <= v(X) for every X. Returns all zeros for the empty set
/// except for ExplicitXOS/Additive, whose clauses already satisfy both
/// properties as-is.
inline Vec xos_oracle(const Valuation& val, ItemSet s) {
  struct Visitor {
    ItemSet s;
    Vec operator()(const ExplicitXOS& v) const { return v.clauses()[v.clause_for(s)]; }
    Vec operator()(const CoverageValuation& v) const { return v.xos_clause(s); }
    Vec operator()(const UnitDemandUniform& v) const {
      Vec a(v.m, 0.0);
      if (s != kEmptySet) a[std::countr_zero(s)] = v.v;
      return a;
    }
    Vec operator()(const AdditiveValuation& v) const { return v.values; }
  };
  return std::visit(Visitor{s}, val);
}

struct DemandResult {
  ItemSet set = kEmptySet;
  double utility = 0.0;
};

/// Exact max over all subsets of v(S) - p(S); the reference path for
/// valuations without a closed form. Ties keep the smallest bitmask.
inline DemandResult demand_brute_force(const Valuation& val, const Vec& p,
                                       int cap = kDefaultDemandBruteForceCap) {
  const int m = items(val);
  if (m > cap) {
    throw InstanceTooLarge("demand: 2^" + std::to_string(m) + " enumeration exceeds cap " +
                           std::to_string(cap));
  }
  DemandResult best;  // the empty set attains utility 0
  const ItemSet all = full_set(m);
  for (ItemSet s = 1; s <= all; ++s) {
    const double u = value(val, s) - sum_over(s, p);
    if (u > best.utility) best = {s, u};
  }
  return best;
}

/// Demand oracle dispatch: closed form where one exists (explicit XOS,
/// unit-demand, additive), guarded brute force for coverage and anything else.
inline DemandResult demand_oracle(const Valuation& val, const Vec& p,
                                  int brute_force_cap = kDefaultDemandBruteForceCap) {
  struct Visitor {
    const Vec& p;
    int cap;
    DemandResult operator()(const ExplicitXOS& v) const {
      auto [s, u] = v.demand(p);
      return {s, u};
    }
    DemandResult operator()(const CoverageValuation& v) const {
      return demand_brute_force(Valuation{v}, p, cap);
    }
    DemandResult operator()(const UnitDemandUniform& v) const {
      int arg = 0;
      for (int j = 1; j < v.m; ++j) {
        if (p[j] < p[arg]) arg = j;
      }
      if (v.v > p[arg]) return {ItemSet{1} << arg, v.v - p[arg]};
      return {};
    }
    DemandResult operator()(const AdditiveValuation& v) const {
      DemandResult r;
      for (int j = 0; j < v.items(); ++j) {
        if (v.values[j] > p[j]) {
          r.set |= ItemSet{1} << j;
          r.utility += v.values[j] - p[j];
        }
      }
      return r;
    }
  };
  return std::visit(Visitor{p, brute_force_cap}, val);
}

/// Same valuation with every value parameter multiplied by factor. Used for
/// the 1/alpha-discounted benchmarks of approximate no-envy.
inline Valuation scaled(const Valuation& val, double factor) {
  struct Visitor {
    double f;
    Valuation operator()(const ExplicitXOS& v) const {
      std::vector<Vec> clauses = v.clauses();
      for (Vec& c : clauses) {
        for (double& x : c) x *= f;
      }
      return ExplicitXOS(v.items(), std::move(clauses));
    }
    Valuation operator()(const CoverageValuation& v) const {
      Vec w = v.vertex_weights();
      for (double& x : w) x *= f;
      return CoverageValuation(v.items(), std::move(w), v.item_vertices());
    }
    Valuation operator()(const UnitDemandUniform& v) const {
      return UnitDemandUniform(v.v * f, v.m);
    }
    Valuation operator()(const AdditiveValuation& v) const {
      Vec w = v.values;
      for (double& x : w) x *= f;
      return AdditiveValuation(std::move(w));
    }
  };
  return std::visit(Visitor{factor}, val);
}

}  // namespace sispa

#endif  // SISPA_VALUATION_HPP
