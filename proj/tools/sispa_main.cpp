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

// Experiment runner CLI. Exit codes: 0 success, 2 config error, 3 guard
// violation (instance too large), 4 acceptance-suite failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sispa/acceptance.hpp"
#include "sispa/io.hpp"
#include "sispa/runner.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 2;
constexpr int kExitGuard = 3;
constexpr int kExitSuiteFailure = 4;

void print_error(const std::string& kind, const std::string& message) {
  sispa::json record{{"error", {{"kind", kind}, {"message", message}}}};
  std::cerr << record.dump() << "\n";
}

sispa::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  sispa::json j;
  in >> j;
  return j;
}

sispa::SetCoverInstance resolve_cover(const std::string& cover_path, int k, int m, int r,
                                      std::uint64_t seed) {
  if (!cover_path.empty()) return sispa::load_set_cover_file(cover_path);
  if (k <= 0 || m <= 0 || r <= 0) {
    throw std::invalid_argument("provide --cover FILE or all of --k/--m/--r");
  }
  sispa::Rng rng = sispa::make_rng(seed, 0x6e5ULL);
  return sispa::random_regular_cover(k, m, r, rng);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simultaneous single-item auction learning simulator"};
  app.require_subcommand(1);

  // run
  auto* run_cmd = app.add_subcommand("run", "run an experiment from a config file");
  std::string config_path, out_dir;
  std::uint64_t seed_override = 0;
  bool has_seed_override = false;
  int threads = 1;
  run_cmd->add_option("--config", config_path, "experiment config (JSON)")->required();
  run_cmd->add_option("--out", out_dir, "output directory");
  run_cmd->add_option("--seed", seed_override, "override the config seed")
      ->each([&](const std::string&) { has_seed_override = true; });
  run_cmd->add_option("--threads", threads, "worker threads across repetitions");

  // generate
  auto* gen_cmd = app.add_subcommand("generate", "emit instance files");
  std::string gen_kind, gen_out = ".", gen_cover;
  std::uint64_t gen_seed = 0;
  int gen_m = 0, gen_clauses = 0, gen_vertices = 0, gen_edge = 0, gen_k = 0, gen_r = 0;
  double gen_max_value = 10.0, gen_max_weight = 1.0;
  gen_cmd->add_option("--kind", gen_kind,
                      "random-xos | random-coverage | set-cover-regular | hardness-reduction")
      ->required();
  gen_cmd->add_option("--out", gen_out, "output directory");
  gen_cmd->add_option("--seed", gen_seed, "generator seed");
  gen_cmd->add_option("--m", gen_m, "item count");
  gen_cmd->add_option("--clauses", gen_clauses, "clause count (random-xos)");
  gen_cmd->add_option("--max-value", gen_max_value, "value range top (random-xos)");
  gen_cmd->add_option("--vertices", gen_vertices, "vertex count (random-coverage)");
  gen_cmd->add_option("--max-weight", gen_max_weight, "weight range top (random-coverage)");
  gen_cmd->add_option("--edge-size", gen_edge, "fixed edge size, 0 = random (random-coverage)");
  gen_cmd->add_option("--k", gen_k, "element count (set cover)");
  gen_cmd->add_option("--r", gen_r, "set size (set cover)");
  gen_cmd->add_option("--cover", gen_cover, "existing cover file (hardness-reduction)");

  // hardness
  auto* hard_cmd = app.add_subcommand("hardness", "solve a reduced bidding instance exactly");
  std::string hard_cover;
  std::uint64_t hard_seed = 0;
  int hard_k = 0, hard_m = 0, hard_r = 0;
  hard_cmd->add_option("--cover", hard_cover, "set cover file");
  hard_cmd->add_option("--k", hard_k, "elements (generate when no --cover)");
  hard_cmd->add_option("--m", hard_m, "sets");
  hard_cmd->add_option("--r", hard_r, "set size");
  hard_cmd->add_option("--seed", hard_seed, "generator seed");

  // estimate
  auto* est_cmd = app.add_subcommand("estimate", "regret-to-optimization estimator");
  std::string est_cover;
  std::uint64_t est_seed = 0;
  int est_k = 0, est_m = 0, est_r = 0, est_T = 2000, est_N = 0;
  double est_zeta = 0.05, est_level = 2.0;
  est_cmd->add_option("--cover", est_cover, "set cover file");
  est_cmd->add_option("--k", est_k, "elements (generate when no --cover)");
  est_cmd->add_option("--m", est_m, "sets");
  est_cmd->add_option("--r", est_r, "set size");
  est_cmd->add_option("--T", est_T, "rounds per execution");
  est_cmd->add_option("--N", est_N, "independent executions (default T)");
  est_cmd->add_option("--zeta", est_zeta, "failure probability of the sandwich");
  est_cmd->add_option("--level", est_level, "bid level inside (1,H)");
  est_cmd->add_option("--seed", est_seed, "sampling seed");

  // suite
  auto* suite_cmd = app.add_subcommand("suite", "run the verification battery");
  int suite_threads = 4;
  std::vector<int> suite_only;
  suite_cmd->add_option("--threads", suite_threads, "worker threads");
  suite_cmd->add_option("--only", suite_only, "criterion ids to run");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      sispa::json cfg_json = load_json_file(config_path);
      if (has_seed_override) cfg_json["seed"] = seed_override;
      const std::string base_dir = std::filesystem::path(config_path).parent_path().string();
      sispa::ExperimentConfig cfg = sispa::parse_config(cfg_json, base_dir);
      const std::string target = !out_dir.empty() ? out_dir
                                 : !cfg.output.empty() ? cfg.output
                                                       : std::string("out");
      sispa::run_experiment(cfg, target, threads);
      std::cout << "wrote " << target << "/trace.csv, summary.csv"
                << (cfg.has_adversary ? "" : ", welfare.csv") << ", manifest.json\n";
      return kExitOk;
    }

    if (*gen_cmd) {
      sispa::json params;
      if (gen_m > 0) params["m"] = gen_m;
      if (gen_clauses > 0) params["clauses"] = gen_clauses;
      if (gen_vertices >= 0 && gen_kind == "random-coverage") params["vertices"] = gen_vertices;
      if (gen_edge > 0) params["edge_size"] = gen_edge;
      if (gen_k > 0) params["k"] = gen_k;
      if (gen_r > 0) params["r"] = gen_r;
      if (!gen_cover.empty()) params["cover"] = gen_cover;
      params["max_value"] = gen_max_value;
      params["max_weight"] = gen_max_weight;
      const sispa::json report = sispa::generate_instance(gen_kind, params, gen_seed, gen_out);
      std::cout << report.dump(2) << "\n";
      return kExitOk;
    }

    if (*hard_cmd) {
      const sispa::SetCoverInstance sc =
          resolve_cover(hard_cover, hard_k, hard_m, hard_r, hard_seed);
      const sispa::BiddingHardnessInstance inst = sispa::reduce(sc);
      const sispa::BiddingOpt opt = sispa::solve_bidding_exact(inst);
      const int cover_opt = sispa::set_cover_opt(sc);
      const double identity = inst.v - static_cast<double>(cover_opt) * inst.r / inst.k;
      sispa::json out{
          {"k", inst.k},
          {"m", inst.m},
          {"r", inst.r},
          {"v", inst.v},
          {"H", inst.H},
          {"OPT", opt.opt},
          {"argmax_items", sispa::set_elements(opt.arg)},
          {"cover_opt", cover_opt},
          {"identity_value", identity},
          {"identity_holds", std::abs(opt.opt - identity) <= 1e-9},
          {"Q", sispa::cover_from_apx(inst, opt.opt)}};
      std::cout << out.dump(2) << "\n";
      return kExitOk;
    }

    if (*est_cmd) {
      const sispa::SetCoverInstance sc = resolve_cover(est_cover, est_k, est_m, est_r, est_seed);
      const sispa::BiddingHardnessInstance inst = sispa::reduce(sc);
      if (est_N <= 0) est_N = est_T;
      const sispa::EstimatorResult est = sispa::regret_to_opt_estimator(
          inst, [&](sispa::Rng) { return sispa::FtlBiddingLearner(inst.v, inst.m); }, est_T,
          est_N, est_zeta, est_seed, est_level);
      const sispa::BiddingOpt opt = sispa::solve_bidding_exact(inst);
      sispa::json out{{"estimate", est.estimate},
                      {"OPT", opt.opt},
                      {"sandwich_half_width", est.sandwich_half_width},
                      {"concentration_term", est.concentration_term},
                      {"measured_regret", est.measured_regret},
                      {"within_sandwich",
                       std::abs(est.estimate - opt.opt) <= est.sandwich_half_width}};
      std::cout << out.dump(2) << "\n";
      return kExitOk;
    }

    if (*suite_cmd) {
      sispa::AcceptanceOptions options;
      options.threads = suite_threads;
      options.only = suite_only;
      const auto results = sispa::run_acceptance_suite(options, &std::cout);
      return sispa::all_passed(results) ? kExitOk : kExitSuiteFailure;
    }
  } catch (const sispa::InstanceTooLarge& e) {
    print_error("instance_too_large", e.what());
    return kExitGuard;
  } catch (const sispa::json::exception& e) {
    print_error("config", e.what());
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    print_error("config", e.what());
    return kExitConfigError;
  } catch (const std::exception& e) {
    print_error("internal", e.what());
    return kExitConfigError;
  }
  return kExitOk;
}
