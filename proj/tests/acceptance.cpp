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


// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dmdp/cli.hpp"
#include "dmdp/dmdp.hpp"
#include "json.hpp"
#include "reference.hpp"

namespace {

using namespace dmdp;
namespace fs = std::filesystem;
using nlohmann::json;

constexpr std::uint64_t kCorpusSize = 100;
constexpr std::size_t kStates = 3;
constexpr std::size_t kActions = 2;
constexpr std::size_t kHorizon = 3;
constexpr double kGamma = 0.9;

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct CorpusCase {
  std::string file;
  std::uint64_t seed;
  double zero_fraction;
  DmdpInstance instance;
};

std::string format(const char* fmt, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, fmt, a);
  return buf;
}

std::string join(GoalSet g) { return g.to_string(); }

std::vector<CorpusCase> build_corpus(const fs::path& dir, double zero_fraction) {
  std::vector<CorpusCase> out;
  for (std::uint64_t seed = 0; seed < kCorpusSize; ++seed) {
    const std::string file =
        (dir / ("seed" + std::to_string(seed) + "_zf" +
                std::to_string(static_cast<int>(zero_fraction * 100)) + ".json"))
            .string();
    std::ostringstream sink;
    const int code = cli::run_cli(
        {"gen", "--seed", std::to_string(seed), "--states", std::to_string(kStates),
         "--actions", std::to_string(kActions), "--horizon", std::to_string(kHorizon),
         "--gamma", "0.9", "--zero-fraction", format("%.17g", zero_fraction), "-o", file},
        sink, sink);
    if (code != 0) throw std::runtime_error("gen failed for seed " + std::to_string(seed));
    out.push_back({file, seed, zero_fraction, load(file)});
  }
  return out;
}

struct SearchCase {
  const CorpusCase* corpus;
  std::size_t start;
  GoalSet target;
  SearchMode mode;
};

std::vector<SearchCase> search_cases(const std::vector<CorpusCase>& corpus) {
  std::vector<SearchCase> out;
  for (const CorpusCase& c : corpus) {
    for (std::size_t s = 0; s < kStates; ++s) {
      for (GoalSet g : realizable_goal_sets(c.instance, StateId(s), kHorizon)) {
        out.push_back({&c, s, g, SearchMode::kReach});
        out.push_back({&c, s, g, SearchMode::kCover});
      }
    }
  }
  return out;
}

std::vector<std::string> search_argv(const SearchCase& sc) {
  std::string target;
  for (StateId s : sc.target.members()) {
    if (!target.empty()) target += ",";
    target += std::to_string(s.index);
  }
  return {sc.mode == SearchMode::kReach ? "solve-reach" : "solve-cover",
          sc.corpus->file, "--start", std::to_string(sc.start), "--target", target,
          "--verify"};
}

json run_report(const std::vector<std::string>& argv, int& code) {
  std::ostringstream out;
  std::ostringstream err;
  code = cli::run_cli(argv, out, err);
  return json::parse(out.str());
}

std::string without_timing(json report) {
  report.erase("timing");
  return report.dump(2);
}

Outcome static_gap() {
  std::ostringstream out, err;
  const int code = cli::run_cli({"demo-static-gap"}, out, err);
  const json r = json::parse(out.str())["result"];
  const double gamma = 1.0 - 1e-9;
  const double static_best = r["static_best"].get<double>();
  const double dynamic_best = r["dynamic_best"].get<double>();
  const double oracle_best = r["oracle_best"].get<double>();
  Outcome o;
  o.pass = code == 0 && static_best == 1.0 && dynamic_best == 1.0 + gamma &&
           oracle_best == 1.0 + gamma &&
           !r["dynamic_policy_is_static"].get<bool>();
  o.detail = format("static_best=%.17g", static_best) +
             format(" dynamic_best=%.17g", dynamic_best) +
             format(" expected=%.17g", 1.0 + gamma);
  return o;
}

Outcome gds_vs_oracle(const std::vector<SearchCase>& cases, const char* label) {
  Outcome o;
  std::size_t runs = 0, found = 0, failures = 0;
  double worst = 0.0;
  std::string first_failure;
  for (const SearchCase& sc : cases) {
    int code = 0;
    const json report = run_report(search_argv(sc), code);
    const DmdpInstance& instance = sc.corpus->instance;
    const auto oracle =
        sc.mode == SearchMode::kReach
            ? brute_force_reach(instance, StateId(sc.start), sc.target, kHorizon)
            : brute_force_cover(instance, StateId(sc.start), sc.target, kHorizon);
    ++runs;
    bool ok = code == (oracle ? 0 : 2) &&
              report["result"]["found"].get<bool>() == oracle.has_value();
    if (ok && oracle) {
      ++found;
      const double diff = std::abs(report["result"]["value"].get<double>() - oracle->value);
      worst = std::max(worst, diff);
      ok = diff <= 1e-9;
    }
    if (!ok) {
      ++failures;
      if (first_failure.empty()) {
        first_failure = " first failure: seed " + std::to_string(sc.corpus->seed) +
                        " start " + std::to_string(sc.start) + " target " +
                        join(sc.target) + " " + to_string(sc.mode);
      }
    }
  }
  o.pass = failures == 0 && runs > 0;
  o.detail = std::string(label) + ": " + std::to_string(runs) + " searches, " +
             std::to_string(found) + " compared, " + std::to_string(failures) +
             " mismatches" + format(", max |gds - oracle| = %.3g", worst) + first_failure;
  return o;
}

Outcome concat_identity() {
  std::mt19937_64 rng(20260101);
  double worst_lib = 0.0, worst_ref = 0.0;
  const std::size_t tuples = 200;
  for (std::size_t i = 0; i < tuples; ++i) {
    const std::size_t S = 2 + i % 3;
    const std::size_t T = 2 + i % 4;
    const double gamma = std::uniform_real_distribution<double>(0.1, 0.99)(rng);
    const DmdpInstance instance =
        i % 2 ? generate(i, S, 2, T, gamma, 0.4)
              : reference::random_signed_instance(S, 3, T, gamma, rng);
    const std::size_t t1 = 1 + rng() % (T - 1);
    const TimeVaryingPolicy a = reference::random_policy(instance, t1, rng);
    const TimeVaryingPolicy b = reference::random_policy(instance, T - t1, rng);
    const std::size_t t = rng() % T;
    const StateId s(rng() % S);

    const ConcatValueSides sides = concat_value_check(instance, a, b, t, s);
    worst_lib = std::max(worst_lib, std::abs(sides.lhs - sides.rhs));

    // Same identity from explicit trajectory sums.
    const TimeVaryingPolicy joined = concat(instance, a, b);
    auto tail = [](const TimeVaryingPolicy& p, std::size_t from) {
      return TimeVaryingPolicy(
          std::vector<DecisionRule>(p.rules().begin() + from, p.rules().end()));
    };
    const double lhs = reference::enumerate_paths(instance, tail(joined, t), s, t).expected_return;
    double rhs = 0.0;
    if (t >= t1) {
      rhs = reference::enumerate_paths(instance, tail(b, t - t1), s, t).expected_return;
    } else {
      const auto first = reference::enumerate_paths(instance, tail(a, t), s, t);
      double expectation = 0.0;
      for (std::size_t k = 0; k < S; ++k) {
        if (first.endpoint_mass[k] == 0.0) continue;
        expectation += first.endpoint_mass[k] *
                       reference::enumerate_paths(instance, b, StateId(k), t1).expected_return;
      }
      rhs = first.expected_return +
            std::pow(instance.gamma(), static_cast<double>(t1 - t)) * expectation;
    }
    worst_ref = std::max(worst_ref, std::abs(lhs - rhs));
    worst_ref = std::max(worst_ref, std::abs(lhs - sides.lhs));
  }
  Outcome o;
  o.pass = worst_lib <= 1e-10 && worst_ref <= 1e-10;
  o.detail = std::to_string(tuples) + " tuples" +
             format(", max |lhs - rhs| = %.3g", worst_lib) +
             format(", trajectory-sum check %.3g", worst_ref);
  return o;
}

Outcome contraction() {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> unit(-10.0, 10.0);
  double worst_excess = -1e300;
  double worst_ratio = 0.0;
  for (std::size_t i = 0; i < 100; ++i) {
    const double gamma = std::uniform_real_distribution<double>(0.0, 0.99)(rng);
    const DmdpInstance instance = generate(i, kStates + i % 3, kActions, kHorizon + i % 3,
                                           gamma, i % 2 ? 0.5 : 0.0);
    const std::size_t S = instance.num_states();
    const std::size_t T = instance.horizon();
    ValueTable v1(T, S), v2(T, S);
    for (std::size_t t = 0; t < T; ++t) {
      for (std::size_t s = 0; s < S; ++s) {
        v1(t, StateId(s)) = unit(rng);
        v2(t, StateId(s)) = unit(rng);
      }
    }
    const double before = sup_distance(v1, v2);
    const double after = sup_distance(bellman_value_operator(instance, v1),
                                      bellman_value_operator(instance, v2));
    worst_excess = std::max(worst_excess, after - (gamma * before + 1e-12));
    if (before > 0.0 && gamma > 0.0) worst_ratio = std::max(worst_ratio, after / (gamma * before));
  }
  Outcome o;
  o.pass = worst_excess <= 0.0;
  o.detail = format("100 pairs, max d(TV1,TV2)/(gamma d(V1,V2)) = %.6f", worst_ratio);
  return o;
}

Outcome policy_improvement() {
  std::mt19937_64 rng(5);
  double worst = 1e300;
  for (std::size_t i = 0; i < 100; ++i) {
    const DmdpInstance instance =
        i % 2 ? generate(1000 + i, kStates, kActions, kHorizon, kGamma, 0.4)
              : reference::random_signed_instance(3 + i % 3, 2 + i % 2, 3 + i % 3, 0.9, rng);
    const TimeVaryingPolicy policy =
        reference::random_policy(instance, instance.horizon(), rng);
    const ValueTable before = evaluate_policy(instance, policy);
    const ValueTable after =
        evaluate_policy(instance, bellman_policy_operator(instance, policy));
    for (std::size_t t = 0; t < before.rows(); ++t) {
      for (std::size_t s = 0; s < instance.num_states(); ++s) {
        worst = std::min(worst, after(t, StateId(s)) - before(t, StateId(s)));
      }
    }
  }
  Outcome o;
  o.pass = worst >= -1e-12;
  o.detail = format("100 pairs, min over (t,s) of V^{TP pi} - V^pi = %.3g", worst);
  return o;
}

Outcome policy_iteration_convergence(const std::vector<CorpusCase>& corpus) {
  std::mt19937_64 rng(6);
  double worst_pi = 0.0, worst_brute = 0.0;
  int max_iters = 0;
  for (const CorpusCase& c : corpus) {
    const ValueTable star = optimal_values(c.instance);
    const PolicyIterationResult pi =
        policy_iteration(c.instance, reference::random_policy(c.instance, kHorizon, rng));
    worst_pi = std::max(worst_pi, sup_distance(pi.values, star));
    max_iters = std::max(max_iters, pi.iterations);
    const auto brute = brute_force_optimal_value(c.instance);
    for (std::size_t s = 0; s < kStates; ++s) {
      worst_brute = std::max(worst_brute, std::abs(brute[s] - star(0, StateId(s))));
    }
  }
  Outcome o;
  o.pass = worst_pi <= 1e-9 && worst_brute <= 1e-12;
  o.detail = std::to_string(corpus.size()) + " instances" +
             format(", max |PI - V*| = %.3g", worst_pi) +
             format(", max |V*_0 - brute| = %.3g", worst_brute) +
             ", max iterations " + std::to_string(max_iters);
  return o;
}

Outcome queue_invariant(const std::vector<SearchCase>& cases) {
  std::vector<DecisionRule> rules;
  std::size_t checked = 0;
  double worst = 0.0;
  std::string error;
  for (const SearchCase& sc : cases) {
    const DmdpInstance& instance = sc.corpus->instance;
    if (rules.empty()) rules = enumerate_decision_rules(instance);
    GdsConfig config;
    config.start = StateId(sc.start);
    config.target = sc.target;
    config.mode = sc.mode;
    config.verify = true;
    config.trace = true;
    GdsResult result;
    try {
      result = gds_search(instance, config);
    } catch (const InvariantViolation& e) {
      error = e.what();
      break;
    }
    if (result.verified_pushes != result.nodes_pushed) {
      error = "verify mode skipped pushes";
      break;
    }
    for (const TraceEvent& e : *result.trace) {
      if (e.kind != TraceKind::kPush || e.policy.empty()) continue;
      std::vector<DecisionRule> p;
      for (std::uint64_t id : e.policy) p.push_back(rules[id]);
      const double direct =
          reference::enumerate_paths(instance, TimeVaryingPolicy(p), config.start)
              .expected_return;
      worst = std::max(worst, std::abs(direct - e.value));
      ++checked;
    }
  }
  Outcome o;
  o.pass = error.empty() && checked > 0 && worst <= 1e-10;
  o.detail = std::to_string(checked) + " pushed nodes re-evaluated" +
             format(", max |stored - V_0| = %.3g", worst) +
             (error.empty() ? "" : " error: " + error);
  return o;
}

Outcome determinism(const std::vector<SearchCase>& cases) {
  std::size_t differing = 0;
  std::size_t bytes = 0;
  for (const SearchCase& sc : cases) {
    int c1 = 0, c2 = 0;
    const std::string a = without_timing(run_report(search_argv(sc), c1));
    const std::string b = without_timing(run_report(search_argv(sc), c2));
    bytes += a.size();
    if (a != b || c1 != c2) ++differing;
  }
  Outcome o;
  o.pass = differing == 0 && !cases.empty();
  o.detail = std::to_string(cases.size()) + " reports (" + std::to_string(bytes) +
             " bytes) compared, " + std::to_string(differing) + " differ";
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;  // 0 means no runtime bound
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const fs::path dir = fs::temp_directory_path() / "dmdp_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);

  const std::vector<CorpusCase> corpus = build_corpus(dir, 0.0);
  const std::vector<CorpusCase> sparse = build_corpus(dir, 0.5);
  const std::vector<SearchCase> cases = search_cases(corpus);
  const std::vector<SearchCase> sparse_cases = search_cases(sparse);
  std::vector<SearchCase> all_cases = cases;
  all_cases.insert(all_cases.end(), sparse_cases.begin(), sparse_cases.end());

  const std::vector<Criterion> criteria = {
      {1, "static-gap", 1.0, static_gap},
      {2, "gds-vs-oracle", 60.0, [&] {
         Outcome a = gds_vs_oracle(cases, "corpus");
         Outcome b = gds_vs_oracle(sparse_cases, "sparse corpus");
         return Outcome{a.pass && b.pass, a.detail + "; " + b.detail};
       }},
      {3, "concat-value", 5.0, concat_identity},
      {4, "contraction", 2.0, contraction},
      {5, "policy-improvement", 0.0, policy_improvement},
      {6, "policy-iteration", 0.0, [&] { return policy_iteration_convergence(corpus); }},
      {7, "queue-invariant", 0.0, [&] { return queue_invariant(all_cases); }},
      {8, "determinism", 0.0, [&] { return determinism(all_cases); }},
  };

  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto started = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    bool pass = o.pass;
    std::string detail = o.detail;
    if (c.limit_seconds > 0.0 && seconds >= c.limit_seconds) {
      pass = false;
      detail += format("; runtime limit %.0f s exceeded", c.limit_seconds);
    }
    if (!pass) ++failed;
    std::printf("%s criterion %d %s (%.3f s): %s\n", pass ? "PASS" : "FAIL", c.id,
                c.name, seconds, detail.c_str());
    std::fflush(stdout);
  }
  fs::remove_all(dir);
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
