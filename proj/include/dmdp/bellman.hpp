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

// Exact finite-horizon dynamic programming over value tables.

#ifndef DMDP_BELLMAN_HPP_
#define DMDP_BELLMAN_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dmdp/core.hpp"
#include "dmdp/error.hpp"

namespace dmdp {

inline constexpr double kExactTolerance = 1e-12;
inline constexpr double kCrossCheckTolerance = 1e-9;

/// Time-indexed value function V[t][s] for t in [0, steps]. The last row is
/// the terminal anchor and is zero for tables produced by this library.
class ValueTable {
 public:
  ValueTable() = default;
  ValueTable(std::size_t steps, std::size_t num_states)
      : steps_(steps),
        num_states_(num_states),
        data_((steps + 1) * num_states, 0.0) {}

  std::size_t steps() const noexcept { return steps_; }
  std::size_t rows() const noexcept { return steps_ + 1; }
  std::size_t num_states() const noexcept { return num_states_; }

  double& operator()(std::size_t t, StateId s) {
    return data_[t * num_states_ + s.index];
  }
  double operator()(std::size_t t, StateId s) const {
    return data_[t * num_states_ + s.index];
  }

  std::span<double> row(std::size_t t) {
    return std::span<double>(data_).subspan(t * num_states_, num_states_);
  }
  std::span<const double> row(std::size_t t) const {
    return std::span<const double>(data_).subspan(t * num_states_,
                                                  num_states_);
  }

  friend bool operator==(const ValueTable&, const ValueTable&) = default;

 private:
  std::size_t steps_ = 0;
  std::size_t num_states_ = 0;
  std::vector<double> data_;
};

/// Q[s][a] for a single time step.
class QRow {
 public:
  QRow(std::size_t num_states, std::size_t num_actions)
      : num_actions_(num_actions), data_(num_states * num_actions, 0.0) {}

  double& operator()(StateId s, ActionId a) {
    return data_[s.index * num_actions_ + a.index];
  }
  double operator()(StateId s, ActionId a) const {
    return data_[s.index * num_actions_ + a.index];
  }
  std::span<const double> actions(StateId s) const {
    return std::span<const double>(data_).subspan(s.index * num_actions_,
                                                  num_actions_);
  }
  std::size_t num_actions() const noexcept { return num_actions_; }

 private:
  std::size_t num_actions_;
  std::vector<double> data_;
};

/// Sup-norm distance over the whole (t, s) grid.
inline double sup_distance(const ValueTable& lhs, const ValueTable& rhs) {
  if (lhs.rows() != rhs.rows() || lhs.num_states() != rhs.num_states()) {
    throw DimensionError("value tables have different shapes");
  }
  double d = 0.0;
  for (std::size_t t = 0; t < lhs.rows(); ++t) {
    for (std::size_t s = 0; s < lhs.num_states(); ++s) {
      d = std::max(d, std::abs(lhs(t, StateId(s)) - rhs(t, StateId(s))));
    }
  }
  return d;
}

/// Expected next value  sum_{s'} P(s'|s,a) * next[s'].
inline double expected_next(const DmdpInstance& instance, StateId s, ActionId a,
                            std::span<const double> next) {
  auto row = instance.transition_row(s, a);
  double acc = 0.0;
  for (std::size_t k = 0; k < row.size(); ++k) acc += row[k] * next[k];
  return acc;
}

/// Q_t(s, a) = r_t(s, a) + gamma * E[next(s')] for epoch t.
inline QRow q_values(const DmdpInstance& instance,
                     std::span<const double> next_values, std::size_t t) {
  if (next_values.size() != instance.num_states()) {
    throw DimensionError("value row has " + std::to_string(next_values.size()) +
                         " entries, instance has " +
                         std::to_string(instance.num_states()) + " states");
  }
  if (t >= instance.horizon()) {
    throw HorizonOverflow("epoch " + std::to_string(t) +
                          " is past the horizon");
  }
  QRow q(instance.num_states(), instance.num_actions());
  for (std::size_t s = 0; s < instance.num_states(); ++s) {
    for (std::size_t a = 0; a < instance.num_actions(); ++a) {
      q(StateId(s), ActionId(a)) =
          instance.r(t, StateId(s), ActionId(a)) +
          instance.gamma() *
              expected_next(instance, StateId(s), ActionId(a), next_values);
    }
  }
  return q;
}

/// Lowest-index argmax.
inline ActionId argmax_action(std::span<const double> q) {
  std::size_t best = 0;
  for (std::size_t a = 1; a < q.size(); ++a) {
    if (q[a] > q[best]) best = a;
  }
  return ActionId(best);
}

/// Exact value of `policy` by backward recursion. Rule i is applied at
/// epoch first_epoch + i, so a policy that starts later in an episode
/// collects the rewards of its actual time steps. The returned table is
/// indexed by policy step (row n is the zero terminal row).
inline ValueTable evaluate_policy(const DmdpInstance& instance,
                                  const TimeVaryingPolicy& policy,
                                  std::size_t first_epoch = 0) {
  if (first_epoch > instance.horizon()) {
    throw HorizonOverflow("first epoch past the horizon");
  }
  check_policy(instance, policy, instance.horizon() - first_epoch);
  const std::size_t n = policy.length();
  ValueTable values(n, instance.num_states());
  for (std::size_t t = n; t-- > 0;) {
    const DecisionRule& rule = policy.rule(t);
    auto next = values.row(t + 1);
    for (std::size_t s = 0; s < instance.num_states(); ++s) {
      const ActionId a = rule(StateId(s));
      values(t, StateId(s)) =
          instance.r(first_epoch + t, StateId(s), a) +
          instance.gamma() * expected_next(instance, StateId(s), a, next);
    }
  }
  return values;
}

/// (TV)_t(s) = max_a Q_t(s, a) for t < T; the terminal row is copied.
inline ValueTable bellman_value_operator(const DmdpInstance& instance,
                                         const ValueTable& values) {
  if (values.steps() != instance.horizon() ||
      values.num_states() != instance.num_states()) {
    throw DimensionError("value table must have T+1 rows over all states");
  }
  ValueTable out(values.steps(), values.num_states());
  for (std::size_t s = 0; s < values.num_states(); ++s) {
    out(values.steps(), StateId(s)) = values(values.steps(), StateId(s));
  }
  for (std::size_t t = 0; t < instance.horizon(); ++t) {
    QRow q = q_values(instance, values.row(t + 1), t);
    for (std::size_t s = 0; s < instance.num_states(); ++s) {
      auto qs = q.actions(StateId(s));
      out(t, StateId(s)) = *std::max_element(qs.begin(), qs.end());
    }
  }
  return out;
}

/// V* by a single backward sweep from the zero terminal row.
inline ValueTable optimal_values(const DmdpInstance& instance) {
  ValueTable values(instance.horizon(), instance.num_states());
  for (std::size_t t = instance.horizon(); t-- > 0;) {
    QRow q = q_values(instance, values.row(t + 1), t);
    for (std::size_t s = 0; s < instance.num_states(); ++s) {
      auto qs = q.actions(StateId(s));
      values(t, StateId(s)) = *std::max_element(qs.begin(), qs.end());
    }
  }
  return values;
}

/// Full-horizon policy greedy with respect to `values`; ties go to the
/// lowest action index.
inline TimeVaryingPolicy greedy_policy(const DmdpInstance& instance,
                                       const ValueTable& values) {
  if (values.steps() != instance.horizon() ||
      values.num_states() != instance.num_states()) {
    throw DimensionError("value table must have T+1 rows over all states");
  }
  std::vector<DecisionRule> rules;
  rules.reserve(instance.horizon());
  for (std::size_t t = 0; t < instance.horizon(); ++t) {
    QRow q = q_values(instance, values.row(t + 1), t);
    std::vector<ActionId> actions(instance.num_states());
    for (std::size_t s = 0; s < instance.num_states(); ++s) {
      actions[s] = argmax_action(q.actions(StateId(s)));
    }
    rules.emplace_back(std::move(actions));
  }
  return TimeVaryingPolicy(std::move(rules));
}

/// Extends a short policy to the full horizon with action-0 rules.
inline TimeVaryingPolicy pad_to_horizon(const DmdpInstance& instance,
                                        const TimeVaryingPolicy& policy) {
  check_policy(instance, policy, instance.horizon());
  std::vector<DecisionRule> rules = policy.rules();
  while (rules.size() < instance.horizon()) {
    rules.push_back(DecisionRule::constant(instance.num_states(), ActionId(0)));
  }
  return TimeVaryingPolicy(std::move(rules));
}

/// TP: greedy policy with respect to the policy's own value function.
inline TimeVaryingPolicy bellman_policy_operator(
    const DmdpInstance& instance, const TimeVaryingPolicy& policy) {
  const TimeVaryingPolicy full = pad_to_horizon(instance, policy);
  return greedy_policy(instance, evaluate_policy(instance, full));
}

struct PolicyIterationResult {
  TimeVaryingPolicy policy;
  ValueTable values;
  int iterations = 0;
};

/// Applies TP until the evaluated table moves by less than 1e-12 in
/// sup-norm. Each pass counts as one iteration.
inline PolicyIterationResult policy_iteration(const DmdpInstance& instance,
                                              const TimeVaryingPolicy& init,
                                              int max_iters = 1000) {
  TimeVaryingPolicy current = pad_to_horizon(instance, init);
  ValueTable values = evaluate_policy(instance, current);
  for (int iter = 1; iter <= max_iters; ++iter) {
    TimeVaryingPolicy next = greedy_policy(instance, values);
    ValueTable next_values = evaluate_policy(instance, next);
    const double change = sup_distance(values, next_values);
    current = std::move(next);
    values = std::move(next_values);
    if (change < kExactTolerance) {
      return {std::move(current), std::move(values), iter};
    }
  }
  throw ConvergenceError("policy iteration did not converge in " +
                         std::to_string(max_iters) + " iterations");
}

}  // namespace dmdp

#endif  // DMDP_BELLMAN_HPP_
