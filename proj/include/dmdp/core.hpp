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

// Instance model for finite-horizon MDPs whose reward depends on the time
// step while the transition kernel stays fixed.

#ifndef DMDP_CORE_HPP_
#define DMDP_CORE_HPP_

#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dmdp/error.hpp"

namespace dmdp {

struct StateId {
  std::size_t index = 0;

  constexpr StateId() = default;
  constexpr explicit StateId(std::size_t i) : index(i) {}
  friend constexpr auto operator<=>(const StateId&, const StateId&) = default;
};

struct ActionId {
  std::size_t index = 0;

  constexpr ActionId() = default;
  constexpr explicit ActionId(std::size_t i) : index(i) {}
  friend constexpr auto operator<=>(const ActionId&, const ActionId&) = default;
};

/// Reward sign requirement checked by validate(). The search algorithms
/// need every reward to be a (negated) cost.
enum class SignMode { kAny, kNonpositive };

inline const char* to_string(SignMode mode) {
  return mode == SignMode::kNonpositive ? "nonpositive" : "any";
}

inline std::optional<SignMode> parse_sign_mode(const std::string& text) {
  if (text == "any") return SignMode::kAny;
  if (text == "nonpositive") return SignMode::kNonpositive;
  return std::nullopt;
}

inline constexpr double kStochasticityTolerance = 1e-9;

struct InstanceMetadata {
  std::optional<std::string> name;
  std::optional<std::uint64_t> seed;

  friend bool operator==(const InstanceMetadata&,
                         const InstanceMetadata&) = default;
};

/// A finite dynamic MDP. Storage is dense and row-major:
/// transition is indexed [s][a][s'] and reward [t][s][a].
///
/// The constructor only checks that array lengths match the declared
/// dimensions; semantic checks (stochastic rows, reward bounds, discount
/// range) are reported by validate().
class DmdpInstance {
 public:
  DmdpInstance(std::size_t num_states, std::size_t num_actions,
               std::size_t horizon, double gamma, double r_max,
               std::vector<double> transition, std::vector<double> reward,
               SignMode sign_mode = SignMode::kAny,
               InstanceMetadata metadata = {})
      : num_states_(num_states),
        num_actions_(num_actions),
        horizon_(horizon),
        gamma_(gamma),
        r_max_(r_max),
        transition_(std::move(transition)),
        reward_(std::move(reward)),
        sign_mode_(sign_mode),
        metadata_(std::move(metadata)) {
    if (transition_.size() != num_states_ * num_actions_ * num_states_) {
      throw DimensionError("transition table has " +
                           std::to_string(transition_.size()) +
                           " entries, expected |S|*|A|*|S| = " +
                           std::to_string(num_states_ * num_actions_ *
                                          num_states_));
    }
    if (reward_.size() != horizon_ * num_states_ * num_actions_) {
      throw DimensionError("reward table has " +
                           std::to_string(reward_.size()) +
                           " entries, expected T*|S|*|A| = " +
                           std::to_string(horizon_ * num_states_ *
                                          num_actions_));
    }
  }

  std::size_t num_states() const noexcept { return num_states_; }
  std::size_t num_actions() const noexcept { return num_actions_; }
  std::size_t horizon() const noexcept { return horizon_; }
  double gamma() const noexcept { return gamma_; }
  double r_max() const noexcept { return r_max_; }
  SignMode sign_mode() const noexcept { return sign_mode_; }
  const InstanceMetadata& metadata() const noexcept { return metadata_; }

  double p(StateId s, ActionId a, StateId next) const {
    return transition_[(s.index * num_actions_ + a.index) * num_states_ +
                       next.index];
  }

  double r(std::size_t t, StateId s, ActionId a) const {
    return reward_[(t * num_states_ + s.index) * num_actions_ + a.index];
  }

  /// Distribution over successor states of (s, a).
  std::span<const double> transition_row(StateId s, ActionId a) const {
    return std::span<const double>(transition_).subspan(
        (s.index * num_actions_ + a.index) * num_states_, num_states_);
  }

  /// Rewards r_t(s, ·) over all actions.
  std::span<const double> reward_row(std::size_t t, StateId s) const {
    return std::span<const double>(reward_).subspan(
        (t * num_states_ + s.index) * num_actions_, num_actions_);
  }

  std::span<const double> transition_data() const { return transition_; }
  std::span<const double> reward_data() const { return reward_; }

  friend bool operator==(const DmdpInstance&, const DmdpInstance&) = default;

 private:
  std::size_t num_states_;
  std::size_t num_actions_;
  std::size_t horizon_;
  double gamma_;
  double r_max_;
  std::vector<double> transition_;
  std::vector<double> reward_;
  SignMode sign_mode_;
  InstanceMetadata metadata_;
};

/// Deterministic map from states to actions, used at one time step.
class DecisionRule {
 public:
  DecisionRule() = default;
  explicit DecisionRule(std::vector<ActionId> action_for)
      : action_for_(std::move(action_for)) {}
  DecisionRule(std::initializer_list<std::size_t> actions) {
    action_for_.reserve(actions.size());
    for (std::size_t a : actions) action_for_.emplace_back(a);
  }

  static DecisionRule constant(std::size_t num_states, ActionId a) {
    return DecisionRule(std::vector<ActionId>(num_states, a));
  }

  ActionId operator()(StateId s) const { return action_for_[s.index]; }
  std::size_t size() const noexcept { return action_for_.size(); }
  const std::vector<ActionId>& actions() const noexcept { return action_for_; }

  friend auto operator<=>(const DecisionRule&, const DecisionRule&) = default;

 private:
  std::vector<ActionId> action_for_;
};

/// Sequence of decision rules, rule t applied at time step t. The empty
/// policy (length 0) is the identity for concatenation.
class TimeVaryingPolicy {
 public:
  TimeVaryingPolicy() = default;
  explicit TimeVaryingPolicy(std::vector<DecisionRule> rules)
      : rules_(std::move(rules)) {}

  static TimeVaryingPolicy repeated(const DecisionRule& rule,
                                    std::size_t length) {
    return TimeVaryingPolicy(std::vector<DecisionRule>(length, rule));
  }

  std::size_t length() const noexcept { return rules_.size(); }
  bool empty() const noexcept { return rules_.empty(); }
  const DecisionRule& rule(std::size_t t) const { return rules_.at(t); }
  const std::vector<DecisionRule>& rules() const noexcept { return rules_; }

  /// First `n` rules; n larger than length() is clamped.
  TimeVaryingPolicy truncate(std::size_t n) const {
    if (n >= rules_.size()) return *this;
    return TimeVaryingPolicy(
        std::vector<DecisionRule>(rules_.begin(), rules_.begin() + n));
  }

  /// True if every rule is the same, i.e. the policy does not depend on time.
  bool is_static() const {
    for (const auto& rule : rules_) {
      if (rule != rules_.front()) return false;
    }
    return true;
  }

  friend auto operator<=>(const TimeVaryingPolicy&,
                          const TimeVaryingPolicy&) = default;

 private:
  std::vector<DecisionRule> rules_;
};

/// Throws DimensionError unless every rule maps all states to valid actions,
/// and HorizonOverflow if the policy is longer than `max_length`.
inline void check_policy(const DmdpInstance& instance,
                         const TimeVaryingPolicy& policy,
                         std::size_t max_length) {
  if (policy.length() > max_length) {
    throw HorizonOverflow("policy length " + std::to_string(policy.length()) +
                          " exceeds " + std::to_string(max_length));
  }
  for (std::size_t t = 0; t < policy.length(); ++t) {
    const DecisionRule& rule = policy.rule(t);
    if (rule.size() != instance.num_states()) {
      throw DimensionError("rule " + std::to_string(t) + " covers " +
                           std::to_string(rule.size()) + " states, instance has " +
                           std::to_string(instance.num_states()));
    }
    for (ActionId a : rule.actions()) {
      if (a.index >= instance.num_actions()) {
        throw DimensionError("rule " + std::to_string(t) + " uses action " +
                             std::to_string(a.index) + " of " +
                             std::to_string(instance.num_actions()));
      }
    }
  }
}

struct Violation {
  std::string rule;
  std::string location;
  double measured = 0.0;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const noexcept { return violations.empty(); }
};

/// Thrown by loaders and search entry points when an instance fails
/// validation.
class ValidationError : public Error {
 public:
  explicit ValidationError(ValidationReport report)
      : Error(summarize(report)), report_(std::move(report)) {}

  const ValidationReport& report() const noexcept { return report_; }

 private:
  static std::string summarize(const ValidationReport& report) {
    std::string text = "instance failed validation";
    for (const auto& v : report.violations) {
      text += "; " + v.rule + " at " + v.location + ": " + v.message;
    }
    return text;
  }

  ValidationReport report_;
};

namespace detail {

inline std::string index_path(const char* table,
                              std::initializer_list<std::size_t> indices) {
  std::string out = table;
  for (std::size_t i : indices) out += "[" + std::to_string(i) + "]";
  return out;
}

}  // namespace detail

/// Checks every instance invariant and reports each failure with its
/// location. Never throws.
inline ValidationReport validate(const DmdpInstance& instance,
                                 SignMode sign_mode) {
  ValidationReport report;
  auto add = [&](std::string rule, std::string location, double measured,
                 std::string message) {
    report.violations.push_back(
        {std::move(rule), std::move(location), measured, std::move(message)});
  };

  const std::size_t S = instance.num_states();
  const std::size_t A = instance.num_actions();
  const std::size_t T = instance.horizon();
  if (S < 1) add("num-states", "num_states", 0.0, "need at least one state");
  if (A < 1) add("num-actions", "num_actions", 0.0, "need at least one action");
  if (T < 1) add("horizon", "horizon", 0.0, "horizon must be >= 1");

  const double gamma = instance.gamma();
  if (!(gamma >= 0.0)) {
    add("gamma-range", "gamma", gamma, "gamma must be >= 0");
  } else if (!(gamma < 1.0)) {
    add("gamma-range", "gamma", gamma, "gamma must be < 1");
  }
  const double r_max = instance.r_max();
  if (!(r_max >= 0.0) || !std::isfinite(r_max)) {
    add("r-max", "r_max", r_max, "r_max must be finite and >= 0");
  }

  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t a = 0; a < A; ++a) {
      double sum = 0.0;
      auto row = instance.transition_row(StateId(s), ActionId(a));
      for (std::size_t next = 0; next < S; ++next) {
        const double p = row[next];
        if (!(p >= 0.0 && p <= 1.0)) {
          add("probability-range", detail::index_path("P", {s, a, next}), p,
              "transition probability outside [0, 1]");
        }
        sum += p;
      }
      if (!(std::abs(sum - 1.0) <= kStochasticityTolerance)) {
        add("stochasticity", detail::index_path("P", {s, a}), sum,
            "transition row does not sum to 1");
      }
    }
  }

  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t s = 0; s < S; ++s) {
      for (std::size_t a = 0; a < A; ++a) {
        const double r = instance.r(t, StateId(s), ActionId(a));
        if (!std::isfinite(r) || std::abs(r) > r_max) {
          add("reward-bound", detail::index_path("r", {t, s, a}), r,
              "|reward| exceeds r_max");
        }
        if (sign_mode == SignMode::kNonpositive && r > 0.0) {
          add("reward-sign", detail::index_path("r", {t, s, a}), r,
              "reward must be <= 0");
        }
      }
    }
  }
  return report;
}

/// Throws ValidationError if validate() reports any violation.
inline void require_valid(const DmdpInstance& instance, SignMode sign_mode) {
  ValidationReport report = validate(instance, sign_mode);
  if (!report.ok()) throw ValidationError(std::move(report));
}

/// Smallest instance where every static policy is beaten by a time-varying
/// one: a single self-looping state, two actions, two reward epochs with
/// the rewards swapped between them. Best static value is 1, the policy
/// (a1, a0) earns 1 + gamma.
inline DmdpInstance make_static_gap_instance(double gamma = 1.0 - 1e-9) {
  std::vector<double> transition = {1.0, 1.0};
  // r[t][s][a]: t=0 -> {0, 1}, t=1 -> {1, 0}
  std::vector<double> reward = {0.0, 1.0, 1.0, 0.0};
  return DmdpInstance(1, 2, 2, gamma, 1.0, std::move(transition),
                      std::move(reward), SignMode::kAny,
                      InstanceMetadata{"static-gap", std::nullopt});
}

inline constexpr std::uint64_t kDefaultRuleCap = 4096;

/// |A|^|S|, saturating at UINT64_MAX.
inline std::uint64_t decision_rule_count(std::size_t num_states,
                                         std::size_t num_actions) {
  std::uint64_t count = 1;
  for (std::size_t i = 0; i < num_states; ++i) {
    if (num_actions != 0 &&
        count > std::numeric_limits<std::uint64_t>::max() / num_actions) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    count *= num_actions;
  }
  return count;
}

/// Position of `rule` in the canonical enumeration order (state 0 is the
/// most significant digit).
inline std::uint64_t rule_index(const DecisionRule& rule,
                                std::size_t num_actions) {
  std::uint64_t index = 0;
  for (ActionId a : rule.actions()) index = index * num_actions + a.index;
  return index;
}

inline DecisionRule nth_decision_rule(std::uint64_t index,
                                      std::size_t num_states,
                                      std::size_t num_actions) {
  std::vector<ActionId> actions(num_states);
  for (std::size_t i = num_states; i-- > 0;) {
    actions[i] = ActionId(index % num_actions);
    index /= num_actions;
  }
  return DecisionRule(std::move(actions));
}

/// All |A|^|S| deterministic decision rules in lexicographic order of their
/// state-indexed action vectors.
inline std::vector<DecisionRule> enumerate_decision_rules(
    const DmdpInstance& instance, std::uint64_t cap = kDefaultRuleCap) {
  const std::uint64_t count =
      decision_rule_count(instance.num_states(), instance.num_actions());
  if (count > cap) {
    throw CapExceeded("decision rule enumeration", count, cap);
  }
  std::vector<DecisionRule> rules;
  rules.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    rules.push_back(
        nth_decision_rule(i, instance.num_states(), instance.num_actions()));
  }
  return rules;
}

}  // namespace dmdp

#endif  // DMDP_CORE_HPP_
