#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "modnet/errors.hpp"
#include "modnet/policy.hpp"

using namespace modnet;

namespace {

std::vector<ModelId> ids(std::uint32_t n) {
  std::vector<ModelId> v;
  for (std::uint32_t i = 0; i < n; ++i) v.emplace_back(i);
  return v;
}

PolicyState with_counts(PolicyKind kind, std::vector<FitEstimate> counts, PolicyLimits limits = {}) {
  auto s = PolicyState::start(kind, ids(static_cast<std::uint32_t>(counts.size())), limits);
  for (std::uint32_t i = 0; i < counts.size(); ++i) {
    s = apply_batch(std::move(s), ModelId{i}, counts[i].successes, counts[i].trials);
  }
  return s;
}

}  // namespace

TEST(PolicyKind, NamesRoundTrip) {
  for (auto k : {PolicyKind::batched_elimination, PolicyKind::uniform_fixed, PolicyKind::explore_then_commit}) {
    EXPECT_EQ(policy_kind_from_string(to_string(k)), k);
  }
  EXPECT_EQ(to_string(PolicyKind::batched_elimination), "batched-elimination");
  EXPECT_THROW(policy_kind_from_string("ucb1"), ConfigError);
}

TEST(PlanRound, SingletonSurvivor) {
  const auto s = PolicyState::start(PolicyKind::batched_elimination, ids(1), {});
  const auto plan = plan_round(s, 10);
  EXPECT_EQ(plan.targets, ids(1));
  EXPECT_EQ(plan.pilots_per_target, 10u);
}

TEST(PlanRound, EqualBatchesForEverySurvivor) {
  const auto s = PolicyState::start(PolicyKind::batched_elimination, ids(3), {});
  const auto plan = plan_round(s, 25);
  EXPECT_EQ(plan.targets, ids(3));
  EXPECT_EQ(plan.pilots_per_target, 25u);
  EXPECT_EQ(plan.round_index, 0u);
}

TEST(PlanRound, ExploreThenCommitTargetsTheLeader) {
  PolicyLimits lim;
  lim.explore_rounds = 2;
  auto s = with_counts(PolicyKind::explore_then_commit, {{9, 10}, {7, 10}}, lim);
  s.round_index = 1;
  EXPECT_EQ(plan_round(s, 5).targets.size(), 2u);
  s = eliminate(s, 0.05).state;
  EXPECT_EQ(plan_round(s, 5).targets, std::vector<ModelId>{ModelId{0}});
}

TEST(PlanRound, EmptySurvivorsIsStateError) {
  auto s = PolicyState::start(PolicyKind::batched_elimination, ids(2), {});
  s.survivors.clear();
  EXPECT_THROW(plan_round(s, 5), StateError);
}

TEST(Eliminate, OverlappingIntervalsBothSurvive) {
  const auto s = with_counts(PolicyKind::batched_elimination, {{45, 50}, {35, 50}});
  const auto r = eliminate(s, 0.05);
  EXPECT_TRUE(r.eliminated.empty());
  EXPECT_EQ(r.state.survivors.size(), 2u);
  EXPECT_EQ(r.state.round_index, 1u);
}

TEST(Eliminate, SeparatedArmIsDropped) {
  const auto s = with_counts(PolicyKind::batched_elimination, {{48, 50}, {10, 50}});
  const auto r = eliminate(s, 0.05);
  EXPECT_EQ(r.eliminated, std::vector<ModelId>{ModelId{1}});
  EXPECT_EQ(r.state.survivors, std::vector<ModelId>{ModelId{0}});
}

TEST(Eliminate, ExactTieNeverEliminates) {
  const auto s = with_counts(PolicyKind::batched_elimination, {{30, 50}, {30, 50}});
  EXPECT_TRUE(eliminate(s, 0.05).eliminated.empty());
  // degenerate intervals: radius is small, means equal
  const auto t = with_counts(PolicyKind::batched_elimination, {{500000, 1000000}, {500000, 1000000}});
  EXPECT_TRUE(eliminate(t, 0.5).eliminated.empty());
}

TEST(Eliminate, NoDataDefersElimination) {
  auto s = PolicyState::start(PolicyKind::batched_elimination, ids(2), {});
  s = apply_batch(std::move(s), ModelId{0}, 5, 10);
  EXPECT_THROW(eliminate(s, 0.05), NoDataError);
}

TEST(Eliminate, UniformFixedKeepsEveryone) {
  const auto s = with_counts(PolicyKind::uniform_fixed, {{48, 50}, {1, 50}});
  EXPECT_TRUE(eliminate(s, 0.05).eliminated.empty());
}

TEST(Eliminate, PropertiesOnRandomStates) {
  std::mt19937_64 g(5);
  for (int rep = 0; rep < 3000; ++rep) {
    const std::uint32_t k = 2 + g() % 6;
    std::vector<FitEstimate> counts;
    for (std::uint32_t i = 0; i < k; ++i) {
      const std::uint64_t n = 1 + g() % 300;
      counts.push_back({g() % (n + 1), n});
    }
    const auto s = with_counts(PolicyKind::batched_elimination, counts);
    const ModelId best = select_best(s);
    const auto r = eliminate(s, 0.01);
    ASSERT_FALSE(r.state.survivors.empty());
    EXPECT_TRUE(std::find(r.state.survivors.begin(), r.state.survivors.end(), best) != r.state.survivors.end());
    // idempotent at fixed estimates
    EXPECT_TRUE(eliminate(r.state, 0.01).eliminated.empty());
  }
}

TEST(SelectBest, LeaderAndTieBreak) {
  EXPECT_EQ(select_best(with_counts(PolicyKind::batched_elimination, {{3, 4}})), ModelId{0});
  EXPECT_EQ(select_best(with_counts(PolicyKind::batched_elimination, {{95, 100}, {90, 100}, {80, 100}})),
            ModelId{0});
  EXPECT_EQ(select_best(with_counts(PolicyKind::batched_elimination, {{1, 2}, {9, 10}, {9, 10}})), ModelId{1});
}

TEST(SelectBest, NoDataError) {
  EXPECT_THROW(select_best(PolicyState::start(PolicyKind::batched_elimination, ids(3), {})), NoDataError);
}

TEST(SelectBest, InvariantUnderMonotoneRescaling) {
  std::mt19937_64 g(9);
  for (int rep = 0; rep < 500; ++rep) {
    const std::uint32_t k = 2 + g() % 5;
    std::vector<double> means;
    for (std::uint32_t i = 0; i < k; ++i) means.push_back(static_cast<double>(g() % 101) / 100.0);
    auto argmax = [&](auto f) {
      std::size_t best = 0;
      for (std::size_t i = 1; i < means.size(); ++i) {
        if (f(means[i]) > f(means[best])) best = i;
      }
      return best;
    };
    std::vector<FitEstimate> counts;
    for (double m : means) counts.push_back({static_cast<std::uint64_t>(std::lround(m * 100)), 100});
    const auto s = with_counts(PolicyKind::batched_elimination, counts);
    const auto chosen = select_best(s).value;
    EXPECT_EQ(chosen, argmax([](double x) { return x; }));
    EXPECT_EQ(chosen, argmax([](double x) { return std::exp(3 * x) + x * x * x; }));
  }
}

TEST(IsTerminal, StoppingRule) {
  PolicyLimits lim;
  lim.max_rounds = 4;
  auto s = PolicyState::start(PolicyKind::batched_elimination, ids(1), lim);
  EXPECT_TRUE(is_terminal(s));

  s = PolicyState::start(PolicyKind::batched_elimination, ids(3), lim);
  s.round_index = 4;
  EXPECT_TRUE(is_terminal(s));

  s = PolicyState::start(PolicyKind::batched_elimination, ids(5), lim);
  EXPECT_FALSE(is_terminal(s));

  lim.pilot_budget = 100;
  s = with_counts(PolicyKind::batched_elimination, {{10, 50}, {20, 50}}, lim);
  EXPECT_TRUE(is_terminal(s));
}

TEST(IsTerminal, UniformFixedStopsAtItsOwnLength) {
  PolicyLimits lim;
  lim.max_rounds = 50;
  lim.uniform_rounds = 7;
  auto s = PolicyState::start(PolicyKind::uniform_fixed, ids(3), lim);
  s.round_index = 6;
  EXPECT_FALSE(is_terminal(s));
  s.round_index = 7;
  EXPECT_TRUE(is_terminal(s));
}
