#pragma once

#include <cstdint>
#include <map>
#include <string_view>
#include <vector>

#include "modnet/estimator.hpp"
#include "modnet/ids.hpp"

namespace modnet {

enum class PolicyKind { batched_elimination, uniform_fixed, explore_then_commit };

std::string_view to_string(PolicyKind k) noexcept;
/// Throws ConfigError for an unknown name.
PolicyKind policy_kind_from_string(std::string_view name);

/// Stopping limits carried with the state. `max_rounds` is the round cap R_max;
/// `uniform_rounds` is the fixed length of uniform-fixed exploration and
/// `explore_rounds` the exploration length of explore-then-commit.
struct PolicyLimits {
  std::uint32_t max_rounds = 50;
  std::uint64_t pilot_budget = 0;  // 0 = unlimited
  std::uint32_t explore_rounds = 10;
  std::uint32_t uniform_rounds = 50;

  friend bool operator==(const PolicyLimits&, const PolicyLimits&) = default;
};

struct BatchPlan {
  std::uint32_t round_index = 0;
  std::vector<ModelId> targets;  // ascending
  std::uint32_t pilots_per_target = 1;
};

struct PolicyState {
  PolicyKind kind = PolicyKind::batched_elimination;
  std::vector<ModelId> survivors;  // ascending, no duplicates
  std::map<ModelId, FitEstimate> estimates;
  std::uint32_t round_index = 0;
  std::uint64_t total_pilots = 0;
  PolicyLimits limits;

  /// Fresh state over `models` with empty estimates.
  static PolicyState start(PolicyKind kind, const std::vector<ModelId>& models, PolicyLimits limits);

  const FitEstimate& estimate(ModelId m) const;
};

/// Survivors to sample next round. Throws StateError on an empty survivor set.
BatchPlan plan_round(const PolicyState& state, std::uint32_t batch_size);

/// Folds one target's batch into the state.
PolicyState apply_batch(PolicyState state, ModelId model, std::uint64_t successes,
                        std::uint64_t trials);

struct EliminationResult {
  PolicyState state;
  std::vector<ModelId> eliminated;  // ascending
};

/// Ends a round. Batched elimination drops every survivor whose ucb lies
/// strictly below the best lcb among survivors; uniform-fixed keeps everyone;
/// explore-then-commit collapses to the empirical best once its exploration
/// rounds are spent. Always advances round_index.
/// Throws NoDataError if a survivor has no trials.
EliminationResult eliminate(const PolicyState& state, double delta);

/// Survivor with the largest empirical mean, lowest id on ties. Survivors with
/// no data are skipped; NoDataError if none has data.
ModelId select_best(const PolicyState& state);

bool is_terminal(const PolicyState& state) noexcept;

}  // namespace modnet
