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

// General Dijkstra Search: best-first search over concatenations of
// one-step decision rules, returning the highest-value policy whose goal set
// is contained in (reach) or contains (cover) a target set.
//
// Nodes are (policy, value, goal set, depth). The queue pops the largest
// value first; since rewards are nonpositive, extending a policy never
// raises its value, so the first popped policy that satisfies the target is
// optimal among all policies of length at most T. A (start, goal set) ->
// value record map lets the search skip nodes that are beaten by a recorded
// value by at least epsilon(t).

#ifndef DMDP_GDS_HPP_
#define DMDP_GDS_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dmdp/bellman.hpp"
#include "dmdp/composition.hpp"
#include "dmdp/core.hpp"
#include "dmdp/error.hpp"

namespace dmdp {

inline constexpr std::uint64_t kDefaultNodeBudget = 1'000'000;
inline constexpr double kQueueInvariantTolerance = 1e-10;

enum class SearchMode { kReach, kCover };

inline const char* to_string(SearchMode mode) {
  return mode == SearchMode::kCover ? "cover" : "reach";
}

/// Pruning tolerance r_max / (1 - gamma) * sum_{i >= t} gamma^i.
inline double epsilon(const DmdpInstance& instance, std::size_t t) {
  const double gamma = instance.gamma();
  const double one_minus = 1.0 - gamma;
  return instance.r_max() * std::pow(gamma, static_cast<double>(t)) /
         (one_minus * one_minus);
}

struct GdsConfig {
  StateId start;
  GoalSet target;
  SearchMode mode = SearchMode::kReach;
  bool strict_subset = false;
  bool trace = false;
  /// Re-evaluates every pushed node and every pruning decision from scratch.
  bool verify = false;
  std::uint64_t node_budget = kDefaultNodeBudget;
  std::uint64_t rule_cap = kDefaultRuleCap;
};

enum class TraceKind { kPush, kPop, kPrune, kRecordUpdate, kTerminate };

inline const char* to_string(TraceKind kind) {
  switch (kind) {
    case TraceKind::kPush: return "push";
    case TraceKind::kPop: return "pop";
    case TraceKind::kPrune: return "prune";
    case TraceKind::kRecordUpdate: return "record-update";
    case TraceKind::kTerminate: return "terminate";
  }
  return "unknown";
}

struct TraceEvent {
  TraceKind kind = TraceKind::kPush;
  /// Rule indices of the node's policy (canonical enumeration order).
  std::vector<std::uint64_t> policy;
  double value = 0.0;
  GoalSet goal;
  std::size_t depth = 0;
  /// prune: "horizon" or "dominated"; record-update: "created" or "raised";
  /// terminate: "found" or "drained".
  std::string detail;
  std::optional<GoalSet> record_goal;
  double record_value = 0.0;
};

struct GdsResult {
  bool found = false;
  TimeVaryingPolicy policy;
  double value = 0.0;
  GoalSet goal;
  std::uint64_t nodes_popped = 0;
  std::uint64_t nodes_pushed = 0;
  std::uint64_t nodes_pruned = 0;
  std::uint64_t nodes_pruned_by_record = 0;
  std::uint64_t verified_pushes = 0;
  std::optional<std::vector<TraceEvent>> trace;
};

/// Best-known value per (start state, goal set).
class ValueRecord {
 public:
  using Key = std::pair<std::size_t, std::uint64_t>;

  bool contains(StateId s, GoalSet g) const {
    return values_.count({s.index, g.bits()}) != 0;
  }
  void set(StateId s, GoalSet g, double v) { values_[{s.index, g.bits()}] = v; }
  double at(StateId s, GoalSet g) const {
    return values_.at({s.index, g.bits()});
  }
  /// Iteration is ordered by (state, goal mask).
  const std::map<Key, double>& entries() const noexcept { return values_; }
  std::map<Key, double>& entries() noexcept { return values_; }

 private:
  std::map<Key, double> values_;
};

/// Goal sets that have been popped at least once.
class PoppedRegistry {
 public:
  void add(GoalSet g) { goals_.insert(g.bits()); }
  bool contains(GoalSet g) const { return goals_.count(g.bits()) != 0; }
  std::size_t size() const noexcept { return goals_.size(); }

 private:
  std::set<std::uint64_t> goals_;
};

namespace detail {

struct SearchNode {
  std::vector<std::uint64_t> rule_ids;
  double value = 0.0;
  GoalSet goal;
  StateDistribution law;

  std::size_t depth() const { return rule_ids.size(); }
};

/// Max-heap order: higher value, then shallower, then smaller encoding.
struct NodeOrder {
  const std::vector<SearchNode>* nodes;

  bool operator()(std::size_t lhs, std::size_t rhs) const {
    const SearchNode& a = (*nodes)[lhs];
    const SearchNode& b = (*nodes)[rhs];
    if (a.value != b.value) return a.value < b.value;
    if (a.depth() != b.depth()) return a.depth() > b.depth();
    return a.rule_ids > b.rule_ids;
  }
};

inline TimeVaryingPolicy decode_policy(const std::vector<DecisionRule>& rules,
                                       const std::vector<std::uint64_t>& ids) {
  std::vector<DecisionRule> out;
  out.reserve(ids.size());
  for (std::uint64_t id : ids) out.push_back(rules[id]);
  return TimeVaryingPolicy(std::move(out));
}

}  // namespace detail

/// True if `goal` satisfies the configured target condition.
inline bool meets_target(const GdsConfig& config, GoalSet goal) {
  return config.mode == SearchMode::kReach
             ? included(goal, config.target, config.strict_subset)
             : included(config.target, goal, config.strict_subset);
}

/// True if a record keyed by `record_goal` may be compared against a node
/// (or child) whose goal set is `goal`: in reach mode the record's set lies
/// inside the node's, in cover mode the inclusion is flipped.
inline bool record_applies_to_node(const GdsConfig& config, GoalSet record_goal,
                                   GoalSet goal) {
  return config.mode == SearchMode::kReach
             ? included(record_goal, goal, config.strict_subset)
             : included(goal, record_goal, config.strict_subset);
}

/// True if a record keyed by `record_goal` is raised by a child whose goal
/// set is `goal`.
inline bool child_updates_record(const GdsConfig& config, GoalSet record_goal,
                                 GoalSet goal) {
  return config.mode == SearchMode::kReach
             ? included(goal, record_goal, config.strict_subset)
             : included(record_goal, goal, config.strict_subset);
}

inline GdsResult gds_search(const DmdpInstance& instance,
                            const GdsConfig& config) {
  require_valid(instance, SignMode::kNonpositive);
  GoalSet::check_capacity(instance.num_states());
  if (config.start.index >= instance.num_states()) {
    throw ConfigError("start state " + std::to_string(config.start.index) +
                      " out of range");
  }
  if (config.target.empty()) throw ConfigError("target goal set is empty");
  if (!config.target.subset_of(GoalSet::all(instance.num_states()))) {
    throw ConfigError("target contains states outside the instance");
  }
  if (config.node_budget < 1) throw ConfigError("node budget must be >= 1");

  const std::vector<DecisionRule> rules =
      enumerate_decision_rules(instance, config.rule_cap);
  const StateId start = config.start;
  const double gamma = instance.gamma();

  GdsResult result;
  if (config.trace) result.trace.emplace();
  auto emit = [&](TraceEvent event) {
    if (result.trace) result.trace->push_back(std::move(event));
  };
  auto node_event = [](TraceKind kind, const detail::SearchNode& node) {
    TraceEvent e;
    e.kind = kind;
    e.policy = node.rule_ids;
    e.value = node.value;
    e.goal = node.goal;
    e.depth = node.depth();
    return e;
  };

  std::vector<detail::SearchNode> nodes;
  std::priority_queue<std::size_t, std::vector<std::size_t>, detail::NodeOrder>
      queue(detail::NodeOrder{&nodes});
  ValueRecord records;
  PoppedRegistry popped;

  auto push = [&](detail::SearchNode node) {
    if (config.verify) {
      const TimeVaryingPolicy policy = detail::decode_policy(rules, node.rule_ids);
      const double direct = evaluate_policy(instance, policy)(0, start);
      if (!(std::abs(direct - node.value) <= kQueueInvariantTolerance)) {
        throw InvariantViolation(
            "queue invariant broken: stored value " +
            std::to_string(node.value) + " vs evaluated " +
            std::to_string(direct));
      }
      if (goal_set(instance, policy, start) != node.goal) {
        throw InvariantViolation("queue invariant broken: goal set mismatch");
      }
      ++result.verified_pushes;
    }
    emit(node_event(TraceKind::kPush, node));
    nodes.push_back(std::move(node));
    queue.push(nodes.size() - 1);
    ++result.nodes_pushed;
  };

  push(detail::SearchNode{{}, 0.0, GoalSet::singleton(start),
                          point_mass(instance, start)});

  while (!queue.empty()) {
    if (result.nodes_popped >= config.node_budget) {
      throw BudgetExhausted(config.node_budget);
    }
    const std::size_t index = queue.top();
    queue.pop();
    ++result.nodes_popped;
    // Copy: pushing children may reallocate `nodes`.
    const detail::SearchNode node = nodes[index];
    const std::size_t t = node.depth();
    popped.add(node.goal);
    emit(node_event(TraceKind::kPop, node));

    // The empty root is not a policy; goal-reaching policies have length >= 1.
    if (t >= 1 && meets_target(config, node.goal)) {
      result.found = true;
      result.policy = detail::decode_policy(rules, node.rule_ids);
      result.value = node.value;
      result.goal = node.goal;
      TraceEvent e = node_event(TraceKind::kTerminate, node);
      e.detail = "found";
      emit(std::move(e));
      return result;
    }

    if (t >= instance.horizon()) {
      ++result.nodes_pruned;
      TraceEvent e = node_event(TraceKind::kPrune, node);
      e.detail = "horizon";
      emit(std::move(e));
      continue;
    }

    const double eps = epsilon(instance, t);
    std::optional<GoalSet> dominating;
    double dominating_value = 0.0;
    for (const auto& [key, recorded] : records.entries()) {
      const GoalSet record_goal(key.second);
      if (key.first == start.index &&
          record_applies_to_node(config, record_goal, node.goal) &&
          node.value <= recorded - eps) {
        dominating = record_goal;
        dominating_value = recorded;
        break;
      }
    }
    if (dominating) {
      if (config.verify) {
        const TimeVaryingPolicy policy = detail::decode_policy(rules, node.rule_ids);
        const double direct = evaluate_policy(instance, policy)(0, start);
        const GoalSet goal = goal_set(instance, policy, start);
        if (!record_applies_to_node(config, *dominating, goal) ||
            !(direct <= records.at(start, *dominating) - eps)) {
          throw InvariantViolation("pruning condition does not hold on re-check");
        }
      }
      ++result.nodes_pruned;
      ++result.nodes_pruned_by_record;
      TraceEvent e = node_event(TraceKind::kPrune, node);
      e.detail = "dominated";
      e.record_goal = dominating;
      e.record_value = dominating_value;
      emit(std::move(e));
      continue;
    }

    const double discount = std::pow(gamma, static_cast<double>(t));
    std::optional<double> best_child;
    for (std::uint64_t id = 0; id < rules.size(); ++id) {
      const DecisionRule& rule = rules[id];
      // E[V_0 of the one-step rule at s_t], rewards taken at epoch t.
      double step_value = 0.0;
      for (std::size_t s = 0; s < instance.num_states(); ++s) {
        if (node.law[s] == 0.0) continue;
        step_value += node.law[s] * instance.r(t, StateId(s), rule(StateId(s)));
      }
      detail::SearchNode child;
      child.rule_ids = node.rule_ids;
      child.rule_ids.push_back(id);
      child.value = node.value + discount * step_value;
      child.law = step_distribution(instance, node.law, rule);
      child.goal = support(child.law);

      const double child_value = child.value;
      const GoalSet child_goal = child.goal;
      push(std::move(child));
      if (!best_child || child_value > *best_child) best_child = child_value;

      for (auto& [key, recorded] : records.entries()) {
        const GoalSet record_goal(key.second);
        if (key.first != start.index) continue;
        if (!child_updates_record(config, record_goal, child_goal)) continue;
        if (popped.contains(record_goal)) continue;
        if (child_value > recorded) {
          recorded = child_value;
          TraceEvent e;
          e.kind = TraceKind::kRecordUpdate;
          e.detail = "raised";
          e.record_goal = record_goal;
          e.record_value = child_value;
          e.depth = t + 1;
          emit(std::move(e));
        }
      }
    }
    if (best_child && !records.contains(start, node.goal)) {
      records.set(start, node.goal, *best_child);
      TraceEvent e;
      e.kind = TraceKind::kRecordUpdate;
      e.detail = "created";
      e.record_goal = node.goal;
      e.record_value = *best_child;
      e.depth = t;
      emit(std::move(e));
    }
  }

  TraceEvent e;
  e.kind = TraceKind::kTerminate;
  e.detail = "drained";
  emit(std::move(e));
  return result;
}

}  // namespace dmdp

#endif  // DMDP_GDS_HPP_
