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
// Config-driven experiment orchestration: parses ExperimentConfig JSON, runs
// the configured repetitions (in parallel when asked; repetitions are
// share-nothing), and persists trace/summary CSVs plus a reproducibility
// manifest. Everything on disk is a pure function of (config, seed).

#ifndef SISPA_RUNNER_HPP
#define SISPA_RUNNER_HPP

#include <filesystem>
#include <fstream>
#include <future>
#include <memory>
#include <string>
#include <vector>

#include "sispa/experiment.hpp"
#include "sispa/io.hpp"

namespace sispa {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kTraceHeader =
    "run_id,t,utility,payment,won_set,envy_gap_running,regret_running";
inline constexpr const char* kSummaryHeader =
    "run_id,T,cumulative_utility,average_utility,envy_gap,regret_vs_set,regret_vs_bid,"
    "set_benchmark_avg,alpha,overbid_violations,dominance_violations,probes";
inline constexpr const char* kWelfareHeader =
    "rep,average_welfare,optimal_welfare,ratio,alpha,measured_envy,floor,floor_ok";

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
  return detail::splitmix64(detail::splitmix64(master ^ (a * 0x9e3779b97f4a7c15ULL)) ^ b);
}

struct LearnerSpec {
  std::string kind;      // ftpl-demand | pgd-coverage | mw-capacitated | fixed-bid
  double epsilon = 0.0;  // 0 -> sqrt(1/(HDT))
  bool fresh = false;
  PgdStepRule step_rule = PgdStepRule::kDiameterOverGradient;
  int capacity = 1;
  double eta = 0.0;
  Vec fixed_bid;
};

struct BidderSpec {
  Valuation valuation{AdditiveValuation{{}}};
  LearnerSpec learner;
};

struct ExperimentConfig {
  MechanismKind mechanism = MechanismKind::kSecondPrice;
  int T = 1;
  int repetitions = 1;
  std::uint64_t seed = 0;
  double H = 1.0;
  double D = 1.0;
  double K = 1.0;
  int probes_per_round = 0;
  bool track_running_envy = true;
  std::vector<BidderSpec> bidders;
  bool has_adversary = false;
  AdversaryModel adversary{ObliviousSequence{}};
  std::string output;  // may be overridden on the command line
  json echo;           // the parsed config, replayed into the manifest
};

namespace detail {

inline MechanismKind mechanism_from_string(const std::string& s) {
  if (s == "second_price") return MechanismKind::kSecondPrice;
  if (s == "first_price") return MechanismKind::kFirstPrice;
  if (s == "all_pay") return MechanismKind::kAllPay;
  throw std::invalid_argument("config: unknown mechanism '" + s + "'");
}

inline Valuation valuation_from_spec(const json& j, const std::string& base_dir) {
  if (j.is_string()) {
    std::filesystem::path p = j.get<std::string>();
    if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
    return load_valuation_file(p.string());
  }
  return valuation_from_json(j);
}

inline LearnerSpec learner_from_json(const json& j) {
  LearnerSpec spec;
  spec.kind = j.at("kind").get<std::string>();
  spec.epsilon = j.value("epsilon", 0.0);
  spec.fresh = j.value("fresh", false);
  spec.capacity = j.value("capacity", 1);
  spec.eta = j.value("eta", 0.0);
  if (j.contains("bid")) spec.fixed_bid = j.at("bid").get<Vec>();
  const std::string rule = j.value("step_rule", "diameter-over-gradient");
  if (rule == "diameter-over-gradient") {
    spec.step_rule = PgdStepRule::kDiameterOverGradient;
  } else if (rule == "gradient-over-diameter") {
    spec.step_rule = PgdStepRule::kGradientOverDiameter;
  } else {
    throw std::invalid_argument("config: unknown step_rule '" + rule + "'");
  }
  if (spec.kind != "ftpl-demand" && spec.kind != "pgd-coverage" &&
      spec.kind != "mw-capacitated" && spec.kind != "fixed-bid") {
    throw std::invalid_argument("config: unknown learner kind '" + spec.kind + "'");
  }
  return spec;
}

/// Thresholds used by generated adversaries live on this grid, so the fixed
/// tie epsilon in best_fixed_bid stays valid.
inline double snap_to_grid(double x) { return std::round(x * 1024.0) / 1024.0; }

inline AdversaryModel adversary_from_json(const json& j, double D, std::uint64_t seed) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "iid") {
    IIDFromSupport adv;
    adv.support = j.at("support").get<std::vector<Vec>>();
    if (j.contains("probabilities")) {
      adv.probabilities = j.at("probabilities").get<Vec>();
    } else {
      adv.probabilities.assign(adv.support.size(), 1.0 / adv.support.size());
    }
    adv.validate(D);
    return adv;
  }
  if (kind == "oblivious") {
    ObliviousSequence adv;
    adv.thetas = j.at("sequence").get<std::vector<Vec>>();
    if (adv.thetas.empty()) throw std::invalid_argument("config: empty oblivious sequence");
    return adv;
  }
  if (kind == "iid-random") {
    const int support_size = j.at("support_size").get<int>();
    const int m = j.at("m").get<int>();
    if (support_size < 1 || m < 1) throw std::invalid_argument("config: bad iid-random sizes");
    IIDFromSupport adv;
    Rng rng = make_rng(seed, 0xAD5ULL);
    for (int i = 0; i < support_size; ++i) {
      Vec theta(m);
      for (double& x : theta) x = snap_to_grid(uniform_on(rng, 0.0, D));
      adv.support.push_back(std::move(theta));
    }
    adv.probabilities.assign(support_size, 1.0 / support_size);
    adv.validate(D);
    return adv;
  }
  throw std::invalid_argument("config: unknown adversary kind '" + kind + "'");
}

}  // namespace detail

inline ExperimentConfig parse_config(const json& j, const std::string& base_dir = "") {
  ExperimentConfig cfg;
  cfg.echo = j;
  cfg.mechanism = detail::mechanism_from_string(j.value("mechanism", "second_price"));
  cfg.T = j.at("T").get<int>();
  if (cfg.T < 1) throw std::invalid_argument("config: T must be >= 1");
  cfg.repetitions = j.value("repetitions", 1);
  if (cfg.repetitions < 1) throw std::invalid_argument("config: repetitions must be >= 1");
  cfg.seed = j.at("seed").get<std::uint64_t>();
  const json bounds = j.value("bounds", json::object());
  cfg.H = bounds.value("H", 1.0);
  cfg.D = bounds.value("D", 1.0);
  cfg.K = bounds.value("K", cfg.D);
  if (!(cfg.H > 0.0) || !(cfg.D > 0.0)) throw std::invalid_argument("config: bounds must be positive");
  cfg.probes_per_round = j.value("probes_per_round", 0);
  cfg.track_running_envy = j.value("track_running_envy", true);
  cfg.output = j.value("output", "");

  if (!j.contains("bidders") || !j.at("bidders").is_array() || j.at("bidders").empty()) {
    throw std::invalid_argument("config: need at least one bidder");
  }
  for (const json& b : j.at("bidders")) {
    BidderSpec spec;
    spec.valuation = detail::valuation_from_spec(b.at("valuation"), base_dir);
    spec.learner = detail::learner_from_json(b.at("learner"));
    if (spec.learner.kind == "pgd-coverage" &&
        !std::holds_alternative<CoverageValuation>(spec.valuation)) {
      throw std::invalid_argument("config: pgd-coverage requires a coverage valuation");
    }
    cfg.bidders.push_back(std::move(spec));
  }
  if (j.contains("adversary")) {
    if (cfg.bidders.size() != 1) {
      throw std::invalid_argument("config: adversary runs take exactly one bidder");
    }
    cfg.has_adversary = true;
    cfg.adversary = detail::adversary_from_json(j.at("adversary"), cfg.D, cfg.seed);
  } else if (cfg.bidders.size() < 2) {
    throw std::invalid_argument("config: self-play runs need at least two bidders");
  }
  return cfg;
}

inline std::unique_ptr<BidderAgent> make_agent(const BidderSpec& spec,
                                               const ExperimentConfig& cfg,
                                               std::uint64_t agent_seed) {
  const LearnerSpec& l = spec.learner;
  if (l.kind == "ftpl-demand") {
    const double eps =
        l.epsilon > 0.0 ? l.epsilon : default_exponential_rate(cfg.H, cfg.D, cfg.T);
    return std::make_unique<FtplAgent>(spec.valuation, eps, l.fresh, agent_seed);
  }
  if (l.kind == "pgd-coverage") {
    return std::make_unique<PgdAgent>(std::get<CoverageValuation>(spec.valuation), cfg.K,
                                      agent_seed, l.step_rule);
  }
  if (l.kind == "mw-capacitated") {
    return std::make_unique<MwAgent>(spec.valuation, l.capacity, cfg.T, cfg.H, cfg.D,
                                     agent_seed, l.eta);
  }
  if (l.kind == "fixed-bid") {
    if (static_cast<int>(l.fixed_bid.size()) != items(spec.valuation)) {
      throw std::invalid_argument("config: fixed bid length mismatch");
    }
    return std::make_unique<FixedBidAgent>(spec.valuation, l.fixed_bid);
  }
  throw std::invalid_argument("config: unknown learner kind '" + l.kind + "'");
}

struct ExperimentResult {
  bool joint = false;
  std::vector<LearnerRunResult> focal_runs;  // one per repetition
  std::vector<JointRunResult> joint_runs;    // one per repetition
};

namespace detail {

template <class Fn>
void parallel_reps(int reps, int threads, Fn&& body) {
  if (threads <= 1 || reps <= 1) {
    for (int z = 0; z < reps; ++z) body(z);
    return;
  }
  std::vector<std::future<void>> futures;
  const int workers = std::min(threads, reps);
  for (int w = 0; w < workers; ++w) {
    futures.push_back(std::async(std::launch::async, [&, w] {
      for (int z = w; z < reps; z += workers) body(z);
    }));
  }
  for (auto& f : futures) f.get();
}

inline void write_trace_rows(std::ostream& out, const std::string& run_id,
                             const LearnerRunResult& r) {
  for (const RoundTraceRow& row : r.trace) {
    out << run_id << ',' << row.t << ',' << format_double(row.utility) << ','
        << format_double(row.payment) << ',' << format_set_hex(row.won) << ','
        << format_double(row.envy_gap_running) << ',' << format_double(row.regret_running)
        << '\n';
  }
}

inline void write_summary_row(std::ostream& out, const std::string& run_id, int T,
                              const LearnerRunResult& r) {
  out << run_id << ',' << T << ',' << format_double(r.cumulative_utility) << ','
      << format_double(r.cumulative_utility / T) << ',' << format_double(r.report.envy_gap)
      << ',' << format_double(r.report.regret_vs_set) << ','
      << format_double(r.report.regret_vs_bid) << ','
      << format_double(r.report.set_benchmark_total / T) << ','
      << format_double(r.report.alpha) << ',' << r.overbid_violations << ','
      << r.dominance_violations << ',' << r.probes << '\n';
}

}  // namespace detail

/// Runs every repetition and, when out_dir is nonempty, writes trace.csv,
/// summary.csv, welfare.csv (self-play only), and manifest.json there.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::string& out_dir,
                                       int threads = 1) {
  ExperimentResult result;
  result.joint = !cfg.has_adversary;

  if (cfg.has_adversary) {
    result.focal_runs.resize(cfg.repetitions);
    detail::parallel_reps(cfg.repetitions, threads, [&](int z) {
      auto agent = make_agent(cfg.bidders[0], cfg, derive_seed(cfg.seed, z + 1, 0));
      FocalRunOptions opt;
      opt.mechanism = cfg.mechanism;
      opt.T = cfg.T;
      opt.seed = derive_seed(cfg.seed, z + 1, 0xFACEULL);
      opt.alpha = agent->alpha();
      opt.probes_per_round = cfg.probes_per_round;
      opt.track_running_envy = cfg.track_running_envy;
      result.focal_runs[z] = run_focal(*agent, cfg.adversary, opt);
    });
  } else {
    result.joint_runs.resize(cfg.repetitions);
    detail::parallel_reps(cfg.repetitions, threads, [&](int z) {
      std::vector<std::unique_ptr<BidderAgent>> agents;
      for (std::size_t i = 0; i < cfg.bidders.size(); ++i) {
        agents.push_back(make_agent(cfg.bidders[i], cfg, derive_seed(cfg.seed, z + 1, i + 1)));
      }
      JointRunOptions opt;
      opt.mechanism = cfg.mechanism;
      opt.T = cfg.T;
      opt.seed = derive_seed(cfg.seed, z + 1, 0xFACEULL);
      opt.probes_per_round = cfg.probes_per_round;
      opt.track_running_envy = cfg.track_running_envy;
      result.joint_runs[z] = run_joint(agents, opt);
    });
  }

  if (out_dir.empty()) return result;
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  std::ofstream trace(fs::path(out_dir) / "trace.csv");
  std::ofstream summary(fs::path(out_dir) / "summary.csv");
  trace << kTraceHeader << '\n';
  summary << kSummaryHeader << '\n';
  std::vector<std::string> artifacts{"trace.csv", "summary.csv", "manifest.json"};

  if (cfg.has_adversary) {
    for (int z = 0; z < cfg.repetitions; ++z) {
      const std::string run_id = "r" + std::to_string(z) + "-b0";
      detail::write_trace_rows(trace, run_id, result.focal_runs[z]);
      detail::write_summary_row(summary, run_id, cfg.T, result.focal_runs[z]);
    }
  } else {
    std::ofstream welfare(fs::path(out_dir) / "welfare.csv");
    welfare << kWelfareHeader << '\n';
    artifacts.insert(artifacts.begin() + 2, "welfare.csv");
    for (int z = 0; z < cfg.repetitions; ++z) {
      const JointRunResult& jr = result.joint_runs[z];
      for (std::size_t i = 0; i < jr.bidders.size(); ++i) {
        const std::string run_id = "r" + std::to_string(z) + "-b" + std::to_string(i);
        detail::write_trace_rows(trace, run_id, jr.bidders[i]);
        detail::write_summary_row(summary, run_id, cfg.T, jr.bidders[i]);
      }
      welfare << z << ',' << format_double(jr.welfare.average_welfare) << ','
              << format_double(jr.welfare.optimal_welfare) << ','
              << format_double(jr.welfare.ratio) << ',' << format_double(jr.max_alpha) << ','
              << format_double(jr.welfare.measured_envy) << ','
              << format_double(jr.welfare.floor) << ',' << (jr.welfare.floor_satisfied ? 1 : 0)
              << '\n';
    }
  }

  json manifest{{"tool", "sispa"},
                {"version", kVersion},
                {"seed", cfg.seed},
                {"trace_schema", kTraceHeader},
                {"summary_schema", kSummaryHeader},
                {"artifacts", artifacts},
                {"config", cfg.echo}};
  std::ofstream mf(fs::path(out_dir) / "manifest.json");
  mf << manifest.dump(2) << "\n";
  return result;
}

// -- Instance generation ------------------------------------------------------------

/// Writes the files for one generated instance and reports what it wrote.
/// Kinds: random-xos, random-coverage, set-cover-regular, hardness-reduction.
inline json generate_instance(const std::string& kind, const json& params, std::uint64_t seed,
                              const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  Rng rng = make_rng(seed, 0x6e5ULL);
  json report{{"kind", kind}, {"seed", seed}, {"params", params}};

  if (kind == "random-xos") {
    const int m = params.at("m").get<int>();
    const int L = params.at("clauses").get<int>();
    const double top = params.value("max_value", 10.0);
    if (m < 1 || L < 1) throw std::invalid_argument("generate: need m >= 1 and clauses >= 1");
    std::vector<Vec> clauses(L, Vec(m));
    for (auto& c : clauses) {
      for (double& x : c) x = detail::snap_to_grid(uniform_on(rng, 0.0, top));
    }
    const auto path = fs::path(out_dir) / "valuation.json";
    save_valuation_file(path.string(), ExplicitXOS(m, clauses));
    report["files"] = {"valuation.json"};
    return report;
  }
  if (kind == "random-coverage") {
    const int m = params.at("m").get<int>();
    const int vertices = params.at("vertices").get<int>();
    const double top = params.value("max_weight", 1.0);
    const int edge_size = params.value("edge_size", 0);  // 0 -> random per item
    if (m < 1 || vertices < 0) throw std::invalid_argument("generate: bad coverage sizes");
    Vec weights(vertices);
    for (double& w : weights) w = detail::snap_to_grid(uniform_on(rng, 0.0, top));
    std::vector<std::vector<int>> edges(m);
    for (auto& edge : edges) {
      if (vertices == 0) continue;
      const int size = edge_size > 0 ? std::min(edge_size, vertices)
                                     : uniform_int(rng, 1, vertices);
      std::vector<int> pool(vertices);
      for (int i = 0; i < vertices; ++i) pool[i] = i;
      for (int i = 0; i < size; ++i) std::swap(pool[i], pool[uniform_int(rng, i, vertices - 1)]);
      edge.assign(pool.begin(), pool.begin() + size);
      std::sort(edge.begin(), edge.end());
    }
    const auto path = fs::path(out_dir) / "valuation.json";
    save_valuation_file(path.string(), CoverageValuation(m, weights, edges));
    report["files"] = {"valuation.json"};
    return report;
  }
  if (kind == "set-cover-regular") {
    const int k = params.at("k").get<int>();
    const int m = params.at("m").get<int>();
    const int r = params.at("r").get<int>();
    const SetCoverInstance sc = random_regular_cover(k, m, r, rng);
    save_set_cover_file((fs::path(out_dir) / "cover.txt").string(), sc);
    report["files"] = {"cover.txt"};
    return report;
  }
  if (kind == "hardness-reduction") {
    SetCoverInstance sc;
    if (params.contains("cover")) {
      sc = load_set_cover_file(params.at("cover").get<std::string>());
    } else {
      sc = random_regular_cover(params.at("k").get<int>(), params.at("m").get<int>(),
                                params.at("r").get<int>(), rng);
      save_set_cover_file((fs::path(out_dir) / "cover.txt").string(), sc);
    }
    const BiddingHardnessInstance inst = reduce(sc);
    std::ofstream out(fs::path(out_dir) / "bidding.json");
    out << bidding_instance_to_json(inst).dump(2) << "\n";
    report["files"] = params.contains("cover") ? json{"bidding.json"}
                                               : json{"cover.txt", "bidding.json"};
    return report;
  }
  throw std::invalid_argument("generate: unknown kind '" + kind + "'");
}

}  // namespace sispa

#endif  // SISPA_RUNNER_HPP
