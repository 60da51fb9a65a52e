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


#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "dmdp/bellman.hpp"
#include "dmdp/composition.hpp"
#include "dmdp/io.hpp"
#include "reference.hpp"

namespace dmdp {
namespace {

GoalSet reached(const reference::PathSummary& paths) {
  GoalSet g;
  for (std::size_t s = 0; s < paths.endpoint_reached.size(); ++s) {
    if (paths.endpoint_reached[s] && paths.endpoint_mass[s] > kPositivityThreshold) {
      g.insert(StateId(s));
    }
  }
  return g;
}

// Two absorbing corners: state 0 and state 2; state 1 jumps to either.
DmdpInstance corners() {
  std::vector<double> P = {
      1, 0, 0,      0, 1, 0,       // state 0: stay / go to 1
      0.5, 0, 0.5,  0, 1, 0,       // state 1: split / stay
      0, 0, 1,      0, 1, 0};      // state 2: stay / go to 1
  return DmdpInstance(3, 2, 3, 0.9, 1.0, P, std::vector<double>(18, -0.5));
}

TEST(GoalSet, BasicOperations) {
  GoalSet g{0, 2};
  EXPECT_TRUE(g.contains(StateId(0)));
  EXPECT_FALSE(g.contains(StateId(1)));
  EXPECT_EQ(g.size(), 2u);
  EXPECT_EQ(g.to_string(), "0,2");
  EXPECT_TRUE(GoalSet{2}.proper_subset_of(g));
  EXPECT_TRUE(g.subset_of(g));
  EXPECT_FALSE(g.proper_subset_of(g));
  EXPECT_EQ(GoalSet::all(3), (GoalSet{0, 1, 2}));
  EXPECT_TRUE(included(g, g, false));
  EXPECT_FALSE(included(g, g, true));
  EXPECT_THROW(GoalSet::check_capacity(65), DimensionError);
  EXPECT_NO_THROW(GoalSet::check_capacity(64));
  EXPECT_EQ(GoalSet::all(64).size(), 64u);
}

TEST(Concat, LengthAndPrefixRecovery) {
  const TimeVaryingPolicy a({DecisionRule{0, 1}});
  const TimeVaryingPolicy b({DecisionRule{1, 1}, DecisionRule{1, 0}});
  const TimeVaryingPolicy ab = concat(a, b, 3);
  EXPECT_EQ(ab.length(), 3u);
  EXPECT_EQ(ab.truncate(1), a);
  EXPECT_EQ(ab.rule(1), b.rule(0));
  EXPECT_EQ(ab.rule(2), b.rule(1));
  EXPECT_THROW(concat(a, b, 2), HorizonOverflow);
}

TEST(Concat, Associative) {
  const TimeVaryingPolicy a({DecisionRule{0}});
  const TimeVaryingPolicy b({DecisionRule{1}});
  const TimeVaryingPolicy c({DecisionRule{0}, DecisionRule{1}});
  EXPECT_EQ(concat(concat(a, b, 4), c, 4), concat(a, concat(b, c, 4), 4));
}

TEST(Propagate, PointMassAndSplit) {
  const DmdpInstance instance = corners();
  const TimeVaryingPolicy policy({DecisionRule{1, 0, 0}, DecisionRule{0, 0, 0}});
  const auto dists = propagate(instance, policy, StateId(0));
  ASSERT_EQ(dists.size(), 3u);
  EXPECT_EQ(dists[0], (StateDistribution{1.0, 0.0, 0.0}));
  EXPECT_EQ(dists[1], (StateDistribution{0.0, 1.0, 0.0}));
  EXPECT_EQ(dists[2], (StateDistribution{0.5, 0.0, 0.5}));
  EXPECT_EQ(goal_set(instance, policy, StateId(0)), (GoalSet{0, 2}));
  EXPECT_EQ(propagate(instance, policy, StateId(0), 1).size(), 2u);
  EXPECT_THROW(propagate(instance, policy, StateId(3)), DimensionError);
}

TEST(Propagate, ConservesMass) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const DmdpInstance instance = reference::random_signed_instance(4, 2, 4, 0.9, rng);
    const TimeVaryingPolicy policy = reference::random_policy(instance, 4, rng);
    for (const auto& dist : propagate(instance, policy, StateId(trial % 4))) {
      EXPECT_NEAR(std::accumulate(dist.begin(), dist.end(), 0.0), 1.0, 1e-12);
      for (double p : dist) EXPECT_GE(p, 0.0);
    }
  }
}

TEST(Propagate, MatchesPathEnumeration) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const DmdpInstance instance = reference::random_signed_instance(3, 2, 4, 0.9, rng);
    const std::size_t len = 1 + trial % 4;
    const TimeVaryingPolicy policy = reference::random_policy(instance, len, rng);
    const StateId start(trial % 3);
    const auto paths = reference::enumerate_paths(instance, policy, start);
    const auto last = propagate(instance, policy, start).back();
    for (std::size_t s = 0; s < 3; ++s) {
      EXPECT_NEAR(last[s], paths.endpoint_mass[s], 1e-12);
    }
    EXPECT_EQ(goal_set(instance, policy, start), reached(paths));
  }
}

TEST(Propagate, MonteCarloFrequencies) {
  const DmdpInstance instance = generate(7, 3, 2, 3, 0.9);
  std::mt19937_64 rng(7);
  const TimeVaryingPolicy policy = reference::random_policy(instance, 3, rng);
  const std::size_t n = 100000;
  const auto mc = reference::monte_carlo(instance, policy, StateId(2), n, 8);
  const auto dists = propagate(instance, policy, StateId(2));
  for (std::size_t t = 0; t < dists.size(); ++t) {
    for (std::size_t s = 0; s < 3; ++s) {
      const double p = dists[t][s];
      const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
      EXPECT_LE(std::abs(mc.state_frequency[t][s] - p), 4.0 * sigma + 1e-12);
    }
  }
}

TEST(GoalSetOf, NonemptyAndWithinStates) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const DmdpInstance instance = reference::random_signed_instance(5, 2, 3, 0.9, rng);
    const TimeVaryingPolicy policy = reference::random_policy(instance, 3, rng);
    const GoalSet g = goal_set(instance, policy, StateId(0));
    EXPECT_GE(g.size(), 1u);
    EXPECT_TRUE(g.subset_of(GoalSet::all(5)));
  }
}

// The goal set of a concatenation is the union of the second policy's
// goal sets from each state the first one can end in.
TEST(GoalSetOf, ConcatIsUnionOverHandover) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    const DmdpInstance instance = reference::random_signed_instance(4, 2, 4, 0.9, rng);
    const TimeVaryingPolicy a = reference::random_policy(instance, 2, rng);
    const TimeVaryingPolicy b = reference::random_policy(instance, 2, rng);
    GoalSet expected;
    for (StateId mid : goal_set(instance, a, StateId(0)).members()) {
      for (StateId end : goal_set(instance, b, mid).members()) expected.insert(end);
    }
    EXPECT_EQ(goal_set(instance, concat(instance, a, b), StateId(0)), expected);
  }
}

TEST(ConcatValue, IdentityOnRandomTuples) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const DmdpInstance instance = reference::random_signed_instance(3, 2, 5, 0.9, rng);
    const std::size_t t1 = 1 + trial % 4;
    const TimeVaryingPolicy a = reference::random_policy(instance, t1, rng);
    const TimeVaryingPolicy b = reference::random_policy(instance, 5 - t1, rng);
    const std::size_t t = static_cast<std::size_t>(trial) % 5;
    const StateId s(trial % 3);
    const ConcatValueSides sides = concat_value_check(instance, a, b, t, s);
    EXPECT_LE(std::abs(sides.lhs - sides.rhs), 1e-10);
    // lhs against an explicit trajectory sum from step t.
    const TimeVaryingPolicy joined = concat(instance, a, b);
    std::vector<DecisionRule> tail(joined.rules().begin() + t, joined.rules().end());
    const auto paths =
        reference::enumerate_paths(instance, TimeVaryingPolicy(tail), s, t);
    EXPECT_NEAR(sides.lhs, paths.expected_return, 1e-12);
  }
}

TEST(ConcatValue, AfterHandoverEqualsSecondPolicy) {
  const DmdpInstance instance = generate(1, 3, 2, 3, 0.9);
  const TimeVaryingPolicy a({DecisionRule{1, 0, 1}});
  const TimeVaryingPolicy b({DecisionRule{0, 0, 1}, DecisionRule{1, 1, 0}});
  const ConcatValueSides sides = concat_value_check(instance, a, b, 2, StateId(1));
  EXPECT_DOUBLE_EQ(sides.lhs, sides.rhs);
  EXPECT_DOUBLE_EQ(sides.rhs, instance.r(2, StateId(1), ActionId(1)));
}

TEST(ConcatValue, ZeroRewardSecondPolicy) {
  std::vector<double> P(3 * 2 * 3, 0.0);
  for (std::size_t row = 0; row < 6; ++row) P[row * 3 + (row + 1) % 3] = 1.0;
  std::vector<double> r(4 * 3 * 2, 0.0);
  r[0] = -1.0;  // r0(0, a0)
  r[(1 * 3 + 1) * 2 + 1] = -0.5;  // r1(1, a1)
  DmdpInstance instance(3, 2, 4, 0.5, 1.0, P, r);
  const TimeVaryingPolicy a({DecisionRule{0, 0, 0}, DecisionRule{1, 1, 1}});
  const TimeVaryingPolicy b({DecisionRule{0, 1, 0}, DecisionRule{1, 0, 1}});
  const ConcatValueSides sides = concat_value_check(instance, a, b, 0, StateId(0));
  EXPECT_DOUBLE_EQ(sides.lhs, -1.0 + 0.5 * -0.5);
  EXPECT_DOUBLE_EQ(sides.rhs, sides.lhs);
  EXPECT_THROW(concat_value_check(instance, a, b, 4, StateId(0)), HorizonOverflow);
}

}  // namespace
}  // namespace dmdp
