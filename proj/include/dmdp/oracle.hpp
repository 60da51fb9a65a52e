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

// Exhaustive enumeration of deterministic time-varying policies. Only
// usable on tiny instances; it exists to give ground truth for the solvers.

#ifndef DMDP_ORACLE_HPP_
#define DMDP_ORACLE_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <vector>

#include "dmdp/bellman.hpp"
#include "dmdp/composition.hpp"
#include "dmdp/core.hpp"
#include "dmdp/error.hpp"

namespace dmdp {

struct EnumerationBudget {
  std::uint64_t max_policies = 10'000'000;
};

/// sum_{t=1}^{max_len} rules_per_step^t, saturating.
inline std::uint64_t policy_count(std::uint64_t rules_per_step,
                                  std::size_t max_len) {
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t total = 0;
  std::uint64_t layer = 1;
  for (std::size_t t = 1; t <= max_len; ++t) {
    if (rules_per_step != 0 && layer > kMax / rules_per_step) return kMax;
    layer *= rules_per_step;
    if (total > kMax - layer) return kMax;
    total += layer;
  }
  return total;
}

namespace detail {

/// Odometer over rule indices, last step varying fastest.
template <typename Visitor>
void for_each_policy_of_length(const std::vector<DecisionRule>& rules,
                               std::size_t len, Visitor& visit) {
  std::vector<std::size_t> digits(len, 0);
  std::vector<DecisionRule> current(len, rules.front());
  while (true) {
    visit(TimeVaryingPolicy(current));
    bool advanced = false;
    for (std::size_t pos = len; pos-- > 0;) {
      if (++digits[pos] < rules.size()) {
        current[pos] = rules[digits[pos]];
        advanced = true;
        break;
      }
      digits[pos] = 0;
      current[pos] = rules.front();
    }
    if (!advanced) return;
  }
}

inline std::vector<DecisionRule> all_rules(const DmdpInstance& instance) {
  return enumerate_decision_rules(instance,
                                  std::numeric_limits<std::uint64_t>::max());
}

}  // namespace detail

/// Calls visit(policy) for every policy of length 1..max_len, shorter
/// policies first, each length in lexicographic order of rule indices.
template <typename Visitor>
void for_each_policy(const DmdpInstance& instance, std::size_t max_len,
                     const EnumerationBudget& budget, Visitor&& visit) {
  if (max_len > instance.horizon()) {
    throw HorizonOverflow("max_len exceeds the instance horizon");
  }
  const std::uint64_t per_step =
      decision_rule_count(instance.num_states(), instance.num_actions());
  const std::uint64_t required = policy_count(per_step, max_len);
  if (required > budget.max_policies) {
    throw CapExceeded("policy enumeration", required, budget.max_policies);
  }
  const std::vector<DecisionRule> rules = detail::all_rules(instance);
  for (std::size_t len = 1; len <= max_len; ++len) {
    detail::for_each_policy_of_length(rules, len, visit);
  }
}

inline std::vector<TimeVaryingPolicy> enumerate_policies(
    const DmdpInstance& instance, std::size_t max_len,
    const EnumerationBudget& budget = {}) {
  std::vector<TimeVaryingPolicy> out;
  for_each_policy(instance, max_len, budget,
                  [&](const TimeVaryingPolicy& p) { out.push_back(p); });
  return out;
}

struct OracleAnswer {
  TimeVaryingPolicy policy;
  double value = 0.0;
  GoalSet goal;
};

namespace detail {

template <typename Accept>
std::optional<OracleAnswer> brute_force_best(const DmdpInstance& instance,
                                             StateId start, std::size_t max_len,
                                             const EnumerationBudget& budget,
                                             Accept&& accept) {
  std::optional<OracleAnswer> best;
  for_each_policy(instance, max_len, budget, [&](const TimeVaryingPolicy& p) {
    const GoalSet goal = goal_set(instance, p, start);
    if (!accept(goal)) return;
    const double value = evaluate_policy(instance, p)(0, start);
    if (!best || value > best->value) best = OracleAnswer{p, value, goal};
  });
  return best;
}

}  // namespace detail

/// Best policy of length 1..max_len whose goal set lies inside `target`.
inline std::optional<OracleAnswer> brute_force_reach(
    const DmdpInstance& instance, StateId start, GoalSet target,
    std::size_t max_len, const EnumerationBudget& budget = {},
    bool strict = false) {
  return detail::brute_force_best(
      instance, start, max_len, budget,
      [&](GoalSet goal) { return included(goal, target, strict); });
}

/// Best policy of length 1..max_len whose goal set contains `target`.
inline std::optional<OracleAnswer> brute_force_cover(
    const DmdpInstance& instance, StateId start, GoalSet target,
    std::size_t max_len, const EnumerationBudget& budget = {},
    bool strict = false) {
  return detail::brute_force_best(
      instance, start, max_len, budget,
      [&](GoalSet goal) { return included(target, goal, strict); });
}

/// max over full-horizon policies of V_0(s), for every s.
inline std::vector<double> brute_force_optimal_value(
    const DmdpInstance& instance, const EnumerationBudget& budget = {}) {
  const std::uint64_t per_step =
      decision_rule_count(instance.num_states(), instance.num_actions());
  const std::uint64_t full = policy_count(per_step, instance.horizon()) -
                             policy_count(per_step, instance.horizon() - 1);
  if (full > budget.max_policies) {
    throw CapExceeded("full-horizon policy enumeration", full,
                      budget.max_policies);
  }
  std::vector<double> best(instance.num_states(),
                           -std::numeric_limits<double>::infinity());
  auto visit = [&](const TimeVaryingPolicy& p) {
    const ValueTable v = evaluate_policy(instance, p);
    for (std::size_t s = 0; s < instance.num_states(); ++s) {
      best[s] = std::max(best[s], v(0, StateId(s)));
    }
  };
  detail::for_each_policy_of_length(detail::all_rules(instance),
                                    instance.horizon(), visit);
  return best;
}

/// Distinct goal sets realized from `start` by some policy of length
/// 1..max_len, in ascending mask order.
inline std::vector<GoalSet> realizable_goal_sets(
    const DmdpInstance& instance, StateId start, std::size_t max_len,
    const EnumerationBudget& budget = {}) {
  std::set<GoalSet> seen;
  for_each_policy(instance, max_len, budget, [&](const TimeVaryingPolicy& p) {
    seen.insert(goal_set(instance, p, start));
  });
  return {seen.begin(), seen.end()};
}

}  // namespace dmdp

#endif  // DMDP_ORACLE_HPP_
