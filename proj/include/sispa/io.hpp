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
// On-disk formats: JSON valuations and bidding instances, the "k m r" set
// cover text format (1-based element indices), and CSV emission helpers.

#ifndef SISPA_IO_HPP
#define SISPA_IO_HPP

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "sispa/common.hpp"
#include "sispa/hardness.hpp"
#include "sispa/valuation.hpp"

namespace sispa {

using json = nlohmann::json;

// -- Valuations -------------------------------------------------------------------

inline json valuation_to_json(const Valuation& val) {
  struct Visitor {
    json operator()(const ExplicitXOS& v) const {
      return json{{"kind", "xos"}, {"m", v.items()}, {"clauses", v.clauses()}};
    }
    json operator()(const CoverageValuation& v) const {
      return json{{"kind", "coverage"},
                  {"m", v.items()},
                  {"vertex_weights", v.vertex_weights()},
                  {"item_vertices", v.item_vertices()}};
    }
    json operator()(const UnitDemandUniform& v) const {
      return json{{"kind", "unit_demand"}, {"m", v.m}, {"v", v.v}};
    }
    json operator()(const AdditiveValuation& v) const {
      return json{{"kind", "additive"}, {"values", v.values}};
    }
  };
  return std::visit(Visitor{}, val);
}

inline Valuation valuation_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "xos") {
    return ExplicitXOS(j.at("m").get<int>(), j.at("clauses").get<std::vector<Vec>>());
  }
  if (kind == "coverage") {
    return CoverageValuation(j.at("m").get<int>(), j.at("vertex_weights").get<Vec>(),
                             j.at("item_vertices").get<std::vector<std::vector<int>>>());
  }
  if (kind == "unit_demand") {
    return UnitDemandUniform(j.at("v").get<double>(), j.at("m").get<int>());
  }
  if (kind == "additive") {
    return AdditiveValuation(j.at("values").get<Vec>());
  }
  throw std::invalid_argument("valuation: unknown kind '" + kind + "'");
}

inline Valuation load_valuation_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open valuation file: " + path);
  json j;
  in >> j;
  return valuation_from_json(j);
}

inline void save_valuation_file(const std::string& path, const Valuation& val) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write valuation file: " + path);
  out << valuation_to_json(val).dump(2) << "\n";
}

// -- Set cover text format ----------------------------------------------------------

/// First line "k m r", then m lines of r 1-based element indices.
inline SetCoverInstance set_cover_from_stream(std::istream& in) {
  SetCoverInstance sc;
  int m = 0;
  if (!(in >> sc.k >> m >> sc.r)) throw std::invalid_argument("set cover: bad header line");
  sc.sets.assign(m, {});
  for (int j = 0; j < m; ++j) {
    sc.sets[j].resize(sc.r);
    for (int i = 0; i < sc.r; ++i) {
      int e = 0;
      if (!(in >> e)) throw std::invalid_argument("set cover: truncated set list");
      sc.sets[j][i] = e - 1;
    }
  }
  sc.validate();
  return sc;
}

inline void set_cover_to_stream(std::ostream& out, const SetCoverInstance& sc) {
  out << sc.k << " " << sc.set_count() << " " << sc.r << "\n";
  for (const auto& s : sc.sets) {
    for (std::size_t i = 0; i < s.size(); ++i) out << (i ? " " : "") << s[i] + 1;
    out << "\n";
  }
}

inline SetCoverInstance load_set_cover_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open set cover file: " + path);
  return set_cover_from_stream(in);
}

inline void save_set_cover_file(const std::string& path, const SetCoverInstance& sc) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write set cover file: " + path);
  set_cover_to_stream(out, sc);
}

// -- Bidding hardness instances -------------------------------------------------------

inline json bidding_instance_to_json(const BiddingHardnessInstance& inst) {
  std::vector<Vec> vectors;
  vectors.reserve(inst.k);
  for (int i = 0; i < inst.k; ++i) vectors.push_back(inst.threshold_vector(i));
  std::vector<std::vector<int>> t_sets;
  for (ItemSet t : inst.t_sets) t_sets.push_back(set_elements(t));
  return json{{"kind", "bidding_hardness"}, {"m", inst.m},      {"k", inst.k},
              {"r", inst.r},                {"v", inst.v},      {"H", inst.H},
              {"t_sets", t_sets},           {"threshold_vectors", vectors}};
}

inline BiddingHardnessInstance bidding_instance_from_json(const json& j) {
  BiddingHardnessInstance inst;
  inst.m = j.at("m").get<int>();
  inst.k = j.at("k").get<int>();
  inst.r = j.at("r").get<int>();
  inst.v = j.at("v").get<double>();
  inst.H = j.at("H").get<double>();
  for (const auto& elems : j.at("t_sets").get<std::vector<std::vector<int>>>()) {
    ItemSet t = kEmptySet;
    for (int e : elems) t |= ItemSet{1} << e;
    inst.t_sets.push_back(t);
  }
  if (static_cast<int>(inst.t_sets.size()) != inst.k) {
    throw std::invalid_argument("bidding instance: t_sets size != k");
  }
  return inst;
}

// -- CSV helpers ------------------------------------------------------------------------

/// Round-trip-exact decimal formatting keeps CSVs byte-stable across runs.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string format_set_hex(ItemSet s) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "0x%x", s);
  return buf;
}

}  // namespace sispa

#endif  // SISPA_IO_HPP
