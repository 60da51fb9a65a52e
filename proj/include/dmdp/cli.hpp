// Copyright 2026 The dmdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end. Every subcommand prints one JSON run report on the
// output stream. Exit codes: 0 success, 1 error, 2 nothing found, 64 usage.

#ifndef DMDP_CLI_HPP_
#define DMDP_CLI_HPP_

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dmdp/bellman.hpp"
#include "dmdp/composition.hpp"
#include "dmdp/core.hpp"
#include "dmdp/gds.hpp"
#include "dmdp/io.hpp"
#include "dmdp/oracle.hpp"
#include "dmdp/report.hpp"
#include "json.hpp"

namespace dmdp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNotFound = 2;
inline constexpr int kExitUsage = 64;

inline constexpr const char* kNodeBudgetEnv = "GDS_NODE_BUDGET";

/// Bad command-line input detected after CLI11 parsing.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Parses "i,j,k" into a goal set over `num_states` states.
inline GoalSet parse_target(const std::string& text, std::size_t num_states) {
  GoalSet::check_capacity(num_states);
  GoalSet target;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(),
                              [](unsigned char c) { return std::isspace(c); }),
               item.end());
    if (item.empty()) continue;
    if (!std::all_of(item.begin(), item.end(),
                     [](unsigned char c) { return std::isdigit(c); })) {
      throw UsageError("target entry '" + item + "' is not a state index");
    }
    const unsigned long long s = std::stoull(item);
    if (s >= num_states) {
      throw UsageError("target state " + item + " out of range");
    }
    target.insert(StateId(s));
  }
  return target;
}

/// Budget from GDS_NODE_BUDGET if set, otherwise the library default.
inline std::uint64_t default_node_budget() {
  const char* env = std::getenv(kNodeBudgetEnv);
  if (env == nullptr || *env == '\0') return kDefaultNodeBudget;
  const std::string text(env);
  if (!std::all_of(text.begin(), text.end(),
                   [](unsigned char c) { return std::isdigit(c); })) {
    throw UsageError(std::string(kNodeBudgetEnv) + " must be a positive integer");
  }
  return std::stoull(text);
}

/// Initial policy for policy-iter: "zero", "random:<seed>", or a JSON array of
/// rules such as "[[0,1],[1,0]]".
inline TimeVaryingPolicy parse_init_policy(const std::string& text,
                                           const DmdpInstance& instance) {
  if (text == "zero") {
    return TimeVaryingPolicy::repeated(
        DecisionRule::constant(instance.num_states(), ActionId(0)),
        instance.horizon());
  }
  if (text.rfind("random:", 0) == 0) {
    const std::string seed_text = text.substr(7);
    if (seed_text.empty() ||
        !std::all_of(seed_text.begin(), seed_text.end(),
                     [](unsigned char c) { return std::isdigit(c); })) {
      throw UsageError("random init needs a numeric seed");
    }
    XorShift64Star rng(splitmix64(std::stoull(seed_text)));
    std::vector<DecisionRule> rules;
    for (std::size_t t = 0; t < instance.horizon(); ++t) {
      std::vector<ActionId> actions;
      for (std::size_t s = 0; s < instance.num_states(); ++s) {
        actions.emplace_back(rng.next() % instance.num_actions());
      }
      rules.emplace_back(std::move(actions));
    }
    return TimeVaryingPolicy(std::move(rules));
  }
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error&) {
    throw UsageError("--init must be zero, random:<seed>, or a JSON policy");
  }
  TimeVaryingPolicy policy = policy_from_json(doc);
  check_policy(instance, policy, instance.horizon());
  return policy;
}

namespace detail {

struct Outcome {
  std::string status = "ok";
  int exit_code = kExitOk;
  nlohmann::json result = nlohmann::json::object();
  nlohmann::json extra_config = nlohmann::json::object();
};

struct SearchOptions {
  std::string file;
  std::size_t start = 0;
  std::string target;
  bool strict = false;
  bool verify = false;
  std::string trace_path;
  std::optional<std::uint64_t> node_budget;
};

inline GdsConfig make_gds_config(const SearchOptions& opt,
                                 const DmdpInstance& instance, SearchMode mode) {
  if (opt.start >= instance.num_states()) {
    throw UsageError("start state " + std::to_string(opt.start) +
                     " out of range");
  }
  GdsConfig config;
  config.start = StateId(opt.start);
  config.target = parse_target(opt.target, instance.num_states());
  config.mode = mode;
  config.strict_subset = opt.strict;
  config.verify = opt.verify;
  config.trace = !opt.trace_path.empty();
  config.node_budget = opt.node_budget ? *opt.node_budget : default_node_budget();
  return config;
}

inline Outcome run_search(const SearchOptions& opt, SearchMode mode) {
  const DmdpInstance instance = load(opt.file);
  const GdsConfig config = make_gds_config(opt, instance, mode);
  const GdsResult result = gds_search(instance, config);
  if (result.trace) {
    std::ofstream out(opt.trace_path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write trace '" + opt.trace_path + "'");
    out << trace_to_json(*result.trace).dump(2) << "\n";
  }
  Outcome outcome;
  outcome.result = to_json(result);
  outcome.result["instance"] = instance_summary(instance);
  outcome.extra_config = to_json(config);
  if (!result.found) {
    outcome.status = "not-found";
    outcome.exit_code = kExitNotFound;
  }
  return outcome;
}

inline nlohmann::json static_gap_result(double gamma) {
  const DmdpInstance instance = make_static_gap_instance(gamma);
  nlohmann::json statics = nlohmann::json::array();
  double static_best = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < instance.num_actions(); ++a) {
    const TimeVaryingPolicy policy = TimeVaryingPolicy::repeated(
        DecisionRule::constant(1, ActionId(a)), instance.horizon());
    const double v = evaluate_policy(instance, policy)(0, StateId(0));
    static_best = std::max(static_best, v);
    statics.push_back({{"action", a}, {"value", v}});
  }
  const ValueTable optimal = optimal_values(instance);
  const TimeVaryingPolicy best = greedy_policy(instance, optimal);
  const double dynamic_best = optimal(0, StateId(0));
  return {{"gamma", gamma},
          {"static_values", std::move(statics)},
          {"static_best", static_best},
          {"dynamic_best", dynamic_best},
          {"dynamic_policy", to_json(best)},
          {"dynamic_policy_is_static", best.is_static()},
          {"oracle_best", brute_force_optimal_value(instance).front()},
          {"gap", dynamic_best - static_best},
          {"instance", instance_summary(instance)}};
}

}  // namespace detail

/// Runs one CLI invocation. `args` excludes the program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out,
                   std::ostream& err) {
  using Clock = std::chrono::steady_clock;
  const auto started = Clock::now();

  CLI::App app{"Solver for finite-horizon MDPs with time-varying rewards",
               "dmdp"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kLibraryVersion);

  std::function<detail::Outcome()> action;
  std::string command;

  // validate
  std::string validate_file;
  std::string validate_sign;
  auto* validate_cmd = app.add_subcommand("validate", "Check instance invariants");
  validate_cmd->add_option("file", validate_file, "Instance file")->required();
  validate_cmd->add_option("--sign-mode", validate_sign,
                           "any or nonpositive (default: the file's)")
      ->check(CLI::IsMember({"any", "nonpositive"}));
  validate_cmd->callback([&] {
    command = "validate";
    action = [&] {
      const DmdpInstance instance = parse_instance(read_text_file(validate_file));
      const SignMode mode = validate_sign.empty()
                                ? instance.sign_mode()
                                : *parse_sign_mode(validate_sign);
      const ValidationReport report = validate(instance, mode);
      detail::Outcome outcome;
      outcome.result = to_json(report);
      outcome.result["sign_mode"] = to_string(mode);
      outcome.result["instance"] = instance_summary(instance);
      if (!report.ok()) {
        outcome.status = "invalid";
        outcome.exit_code = kExitError;
      }
      return outcome;
    };
  });

  // value-star
  std::string value_file;
  auto* value_cmd = app.add_subcommand("value-star", "Optimal values by backward induction");
  value_cmd->add_option("file", value_file, "Instance file")->required();
  value_cmd->callback([&] {
    command = "value-star";
    action = [&] {
      const DmdpInstance instance = load(value_file);
      const ValueTable values = optimal_values(instance);
      detail::Outcome outcome;
      outcome.result = {{"values", to_json(values)},
                        {"policy", to_json(greedy_policy(instance, values))},
                        {"instance", instance_summary(instance)}};
      return outcome;
    };
  });

  // policy-iter
  std::string pi_file;
  std::string pi_init = "zero";
  int pi_max_iters = 1000;
  auto* pi_cmd = app.add_subcommand("policy-iter", "Policy iteration with the Bellman policy operator");
  pi_cmd->add_option("file", pi_file, "Instance file")->required();
  pi_cmd->add_option("--init", pi_init,
                     "zero, random:<seed>, or JSON rules like [[0,1],[1,0]]");
  pi_cmd->add_option("--max-iters", pi_max_iters, "Iteration limit")
      ->check(CLI::PositiveNumber);
  pi_cmd->callback([&] {
    command = "policy-iter";
    action = [&] {
      const DmdpInstance instance = load(pi_file);
      const TimeVaryingPolicy init = parse_init_policy(pi_init, instance);
      const PolicyIterationResult pi = policy_iteration(instance, init, pi_max_iters);
      const ValueTable optimal = optimal_values(instance);
      const double gap = sup_distance(pi.values, optimal);
      detail::Outcome outcome;
      outcome.result = {{"iterations", pi.iterations},
                        {"policy", to_json(pi.policy)},
                        {"values", to_json(pi.values)},
                        {"max_gap_to_optimal", gap},
                        {"matches_optimal", gap <= kCrossCheckTolerance},
                        {"instance", instance_summary(instance)}};
      return outcome;
    };
  });

  // solve-reach / solve-cover
  detail::SearchOptions reach_opt;
  detail::SearchOptions cover_opt;
  auto add_search = [&](const char* name, const char* help,
                        detail::SearchOptions& opt, SearchMode mode) {
    auto* cmd = app.add_subcommand(name, help);
    cmd->add_option("file", opt.file, "Instance file")->required();
    cmd->add_option("--start", opt.start, "Start state")->required();
    cmd->add_option("--target", opt.target, "Comma-separated target states")
        ->required();
    cmd->add_flag("--strict", opt.strict, "Use strict set inclusion");
    cmd->add_flag("--verify", opt.verify, "Re-check queue and pruning invariants");
    cmd->add_option("--trace", opt.trace_path, "Write the search event log here");
    cmd->add_option("--node-budget", opt.node_budget, "Maximum pops")
        ->check(CLI::PositiveNumber);
    cmd->callback([&, name, mode] {
      command = name;
      action = [&opt, mode] { return detail::run_search(opt, mode); };
    });
  };
  add_search("solve-reach", "Optimal goal-reaching policy", reach_opt,
             SearchMode::kReach);
  add_search("solve-cover", "Optimal goal-covering policy", cover_opt,
             SearchMode::kCover);

  // brute-check
  detail::SearchOptions brute_opt;
  std::string brute_mode = "reach";
  auto* brute_cmd = app.add_subcommand("brute-check", "Compare the search with exhaustive enumeration");
  brute_cmd->add_option("file", brute_opt.file, "Instance file")->required();
  brute_cmd->add_option("--start", brute_opt.start, "Start state")->required();
  brute_cmd->add_option("--target", brute_opt.target, "Comma-separated target states")
      ->required();
  brute_cmd->add_option("--mode", brute_mode, "reach or cover")
      ->check(CLI::IsMember({"reach", "cover"}));
  brute_cmd->add_flag("--strict", brute_opt.strict, "Use strict set inclusion");
  brute_cmd->callback([&] {
    command = "brute-check";
    action = [&] {
      const DmdpInstance instance = load(brute_opt.file);
      const SearchMode mode =
          brute_mode == "cover" ? SearchMode::kCover : SearchMode::kReach;
      const GdsConfig config = detail::make_gds_config(brute_opt, instance, mode);
      const auto oracle =
          mode == SearchMode::kReach
              ? brute_force_reach(instance, config.start, config.target,
                                  instance.horizon(), {}, config.strict_subset)
              : brute_force_cover(instance, config.start, config.target,
                                  instance.horizon(), {}, config.strict_subset);
      const GdsResult search = gds_search(instance, config);
      detail::Outcome outcome;
      outcome.extra_config = to_json(config);
      outcome.result = {{"oracle", to_json(oracle)},
                        {"gds", to_json(search)},
                        {"instance", instance_summary(instance)}};
      const bool same_found = oracle.has_value() == search.found;
      const double diff =
          (oracle && search.found) ? std::abs(oracle->value - search.value) : 0.0;
      const bool agree = same_found && diff <= kCrossCheckTolerance;
      outcome.result["agree"] = agree;
      outcome.result["abs_diff"] = diff;
      if (!agree) {
        outcome.status = "mismatch";
        outcome.exit_code = kExitError;
      } else if (!oracle) {
        outcome.status = "not-found";
        outcome.exit_code = kExitNotFound;
      }
      return outcome;
    };
  });

  // gen
  std::uint64_t gen_seed = 0;
  std::size_t gen_states = 3;
  std::size_t gen_actions = 2;
  std::size_t gen_horizon = 3;
  double gen_gamma = 0.9;
  double gen_zero_fraction = 0.0;
  std::string gen_out;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a seeded random instance");
  gen_cmd->add_option("--seed", gen_seed, "PRNG seed")->required();
  gen_cmd->add_option("--states", gen_states, "Number of states")
      ->check(CLI::Range(std::size_t{1}, kMaxGoalSetStates));
  gen_cmd->add_option("--actions", gen_actions, "Number of actions")
      ->check(CLI::PositiveNumber);
  gen_cmd->add_option("--horizon", gen_horizon, "Number of decision epochs")
      ->check(CLI::PositiveNumber);
  gen_cmd->add_option("--gamma", gen_gamma, "Discount in [0, 1)")
      ->check(CLI::Range(0.0, 1.0));
  gen_cmd->add_option("--zero-fraction", gen_zero_fraction,
                      "Probability of zeroing each transition entry")
      ->check(CLI::Range(0.0, 1.0));
  gen_cmd->add_option("-o,--output", gen_out, "Output instance file")->required();
  gen_cmd->callback([&] {
    command = "gen";
    action = [&] {
      if (!(gen_gamma < 1.0)) throw UsageError("gamma must be < 1");
      const DmdpInstance instance = generate(gen_seed, gen_states, gen_actions,
                                             gen_horizon, gen_gamma,
                                             gen_zero_fraction);
      require_valid(instance, SignMode::kNonpositive);
      save(instance, gen_out);
      detail::Outcome outcome;
      outcome.result = {{"path", gen_out},
                        {"instance", instance_summary(instance)}};
      return outcome;
    };
  });

  // demo-static-gap
  double demo_gamma = 1.0 - 1e-9;
  auto* demo_cmd = app.add_subcommand("demo-static-gap", "Best static vs best time-varying value");
  demo_cmd->add_option("--gamma", demo_gamma, "Discount in [0, 1)")
      ->check(CLI::Range(0.0, 1.0));
  demo_cmd->callback([&] {
    command = "demo-static-gap";
    action = [&] {
      if (!(demo_gamma < 1.0)) throw UsageError("gamma must be < 1");
      detail::Outcome outcome;
      outcome.result = detail::static_gap_result(demo_gamma);
      return outcome;
    };
  });

  auto finish = [&](const std::string& status, int code, nlohmann::json config,
                    nlohmann::json result) {
    nlohmann::json report = make_report(command, status, std::move(config),
                                        std::move(result));
    report["exit_code"] = code;
    const auto elapsed =
        std::chrono::duration<double, std::milli>(Clock::now() - started);
    report["timing"] = {{"elapsed_ms", elapsed.count()}};
    out << report.dump(2) << "\n";
    return code;
  };
  nlohmann::json config = {{"argv", args}};

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    return finish("usage-error", kExitUsage, std::move(config),
                  {{"error", e.what()}});
  }

  try {
    detail::Outcome outcome = action();
    for (auto& [key, value] : outcome.extra_config.items()) config[key] = value;
    return finish(outcome.status, outcome.exit_code, std::move(config),
                  std::move(outcome.result));
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return finish("usage-error", kExitUsage, std::move(config),
                  {{"error", e.what()}});
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    nlohmann::json result = {{"error", e.what()},
                             {"validation", to_json(e.report())}};
    return finish("error", kExitError, std::move(config), std::move(result));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return finish("error", kExitError, std::move(config), {{"error", e.what()}});
  }
}

}  // namespace dmdp::cli

#endif  // DMDP_CLI_HPP_
