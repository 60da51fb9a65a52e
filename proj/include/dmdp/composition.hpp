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

#ifndef DMDP_COMPOSITION_HPP_
#define DMDP_COMPOSITION_HPP_

#include <bit>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "dmdp/bellman.hpp"
#include "dmdp/core.hpp"
#include "dmdp/error.hpp"

namespace dmdp {

inline constexpr std::size_t kMaxGoalSetStates = 64;
inline constexpr double kPositivityThreshold = 1e-12;

/// Set of states stored as a 64-bit mask. The mask is the canonical key, so
/// equal sets always hash and compare equal.
class GoalSet {
 public:
  constexpr GoalSet() = default;
  constexpr explicit GoalSet(std::uint64_t bits) : bits_(bits) {}
  GoalSet(std::initializer_list<std::size_t> states) {
    for (std::size_t s : states) insert(StateId(s));
  }

  static GoalSet singleton(StateId s) {
    GoalSet g;
    g.insert(s);
    return g;
  }

  /// {0, ..., n-1}.
  static GoalSet all(std::size_t num_states) {
    check_capacity(num_states);
    return GoalSet(num_states == 64 ? ~std::uint64_t{0}
                                    : (std::uint64_t{1} << num_states) - 1);
  }

  static void check_capacity(std::size_t num_states) {
    if (num_states > kMaxGoalSetStates) {
      throw DimensionError("goal sets are limited to 64 states, instance has " +
                           std::to_string(num_states));
    }
  }

  void insert(StateId s) {
    if (s.index >= kMaxGoalSetStates) {
      throw DimensionError("state " + std::to_string(s.index) +
                           " out of goal set range");
    }
    bits_ |= std::uint64_t{1} << s.index;
  }

  constexpr bool contains(StateId s) const {
    return s.index < kMaxGoalSetStates && ((bits_ >> s.index) & 1U) != 0;
  }
  constexpr bool subset_of(GoalSet other) const {
    return (bits_ & ~other.bits_) == 0;
  }
  constexpr bool proper_subset_of(GoalSet other) const {
    return subset_of(other) && bits_ != other.bits_;
  }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::size_t size() const {
    return static_cast<std::size_t>(std::popcount(bits_));
  }
  constexpr std::uint64_t bits() const { return bits_; }

  GoalSet operator|(GoalSet other) const { return GoalSet(bits_ | other.bits_); }

  std::vector<StateId> members() const {
    std::vector<StateId> out;
    for (std::size_t i = 0; i < kMaxGoalSetStates; ++i) {
      if (contains(StateId(i))) out.emplace_back(i);
    }
    return out;
  }

  /// Comma-separated member list, e.g. "0,2".
  std::string to_string() const {
    std::string out;
    for (StateId s : members()) {
      if (!out.empty()) out += ',';
      out += std::to_string(s.index);
    }
    return out;
  }

  friend constexpr auto operator<=>(GoalSet, GoalSet) = default;

 private:
  std::uint64_t bits_ = 0;
};

/// Inclusion test used by the searches: non-strict by default.
inline bool included(GoalSet inner, GoalSet outer, bool strict) {
  return strict ? inner.proper_subset_of(outer) : inner.subset_of(outer);
}

using StateDistribution = std::vector<double>;

inline StateDistribution point_mass(const DmdpInstance& instance,
                                    StateId s) {
  StateDistribution dist(instance.num_states(), 0.0);
  dist.at(s.index) = 1.0;
  return dist;
}

/// One step of the state law under `rule`.
inline StateDistribution step_distribution(const DmdpInstance& instance,
                                           const StateDistribution& dist,
                                           const DecisionRule& rule) {
  StateDistribution next(instance.num_states(), 0.0);
  for (std::size_t s = 0; s < instance.num_states(); ++s) {
    if (dist[s] == 0.0) continue;
    auto row = instance.transition_row(StateId(s), rule(StateId(s)));
    for (std::size_t k = 0; k < row.size(); ++k) next[k] += dist[s] * row[k];
  }
  return next;
}

/// Laws of s_first_step, ..., s_n given s_first_step = start, applying the
/// policy's rules from index first_step on.
inline std::vector<StateDistribution> propagate(const DmdpInstance& instance,
                                                const TimeVaryingPolicy& policy,
                                                StateId start,
                                                std::size_t first_step = 0) {
  check_policy(instance, policy, instance.horizon());
  if (start.index >= instance.num_states()) {
    throw DimensionError("start state out of range");
  }
  if (first_step > policy.length()) {
    throw HorizonOverflow("first step past the policy length");
  }
  std::vector<StateDistribution> laws;
  laws.reserve(policy.length() - first_step + 1);
  laws.push_back(point_mass(instance, start));
  for (std::size_t t = first_step; t < policy.length(); ++t) {
    laws.push_back(step_distribution(instance, laws.back(), policy.rule(t)));
  }
  return laws;
}

inline GoalSet support(const StateDistribution& dist) {
  GoalSet::check_capacity(dist.size());
  GoalSet g;
  for (std::size_t s = 0; s < dist.size(); ++s) {
    if (dist[s] > kPositivityThreshold) g.insert(StateId(s));
  }
  return g;
}

/// States occupied with positive probability at the policy's final step.
inline GoalSet goal_set(const DmdpInstance& instance,
                        const TimeVaryingPolicy& policy, StateId start) {
  return support(propagate(instance, policy, start).back());
}

/// first followed by second. The result must fit in max_length steps.
inline TimeVaryingPolicy concat(const TimeVaryingPolicy& first,
                                const TimeVaryingPolicy& second,
                                std::size_t max_length) {
  if (first.length() + second.length() > max_length) {
    throw HorizonOverflow("concatenated length " +
                          std::to_string(first.length() + second.length()) +
                          " exceeds horizon " + std::to_string(max_length));
  }
  std::vector<DecisionRule> rules = first.rules();
  rules.insert(rules.end(), second.rules().begin(), second.rules().end());
  return TimeVaryingPolicy(std::move(rules));
}

inline TimeVaryingPolicy concat(const DmdpInstance& instance,
                                const TimeVaryingPolicy& first,
                                const TimeVaryingPolicy& second) {
  return concat(first, second, instance.horizon());
}

struct ConcatValueSides {
  double lhs = 0.0;
  double rhs = 0.0;
};

/// Both sides of the concatenated-value decomposition at (t, start).
///
/// lhs evaluates first∘second directly. rhs adds the value of `first` from
/// t to the discounted expected value of `second` at the hand-over step
/// max(t, T1). `second` is evaluated at its real epochs (offset T1).
inline ConcatValueSides concat_value_check(const DmdpInstance& instance,
                                           const TimeVaryingPolicy& first,
                                           const TimeVaryingPolicy& second,
                                           std::size_t t, StateId start) {
  const TimeVaryingPolicy joined = concat(instance, first, second);
  if (t >= joined.length()) {
    throw HorizonOverflow("t must be below the concatenated length");
  }
  const std::size_t t1 = first.length();
  ConcatValueSides sides;
  sides.lhs = evaluate_policy(instance, joined)(t, start);

  const ValueTable second_values = evaluate_policy(instance, second, t1);
  if (t >= t1) {
    sides.rhs = second_values(t - t1, start);
    return sides;
  }
  const ValueTable first_values = evaluate_policy(instance, first);
  const StateDistribution handover = propagate(instance, first, start, t).back();
  double expectation = 0.0;
  for (std::size_t s = 0; s < instance.num_states(); ++s) {
    expectation += handover[s] * second_values(0, StateId(s));
  }
  sides.rhs = first_values(t, start) +
              std::pow(instance.gamma(), static_cast<double>(t1 - t)) *
                  expectation;
  return sides;
}

}  // namespace dmdp

#endif  // DMDP_COMPOSITION_HPP_
