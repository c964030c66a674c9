#include "modnet/policy.hpp"

#include <algorithm>
#include <string>

#include "modnet/errors.hpp"

namespace modnet {

std::string_view to_string(PolicyKind k) noexcept {
  switch (k) {
    case PolicyKind::batched_elimination: return "batched-elimination";
    case PolicyKind::uniform_fixed: return "uniform-fixed";
    case PolicyKind::explore_then_commit: return "explore-then-commit";
  }
  return "?";
}

PolicyKind policy_kind_from_string(std::string_view name) {
  for (auto k : {PolicyKind::batched_elimination, PolicyKind::uniform_fixed,
                 PolicyKind::explore_then_commit}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown policy kind '" + std::string(name) +
                    "' (expected batched-elimination, uniform-fixed or explore-then-commit)");
}

PolicyState PolicyState::start(PolicyKind kind, const std::vector<ModelId>& models,
                               PolicyLimits limits) {
  PolicyState s;
  s.kind = kind;
  s.survivors = models;
  std::sort(s.survivors.begin(), s.survivors.end());
  s.survivors.erase(std::unique(s.survivors.begin(), s.survivors.end()), s.survivors.end());
  for (ModelId m : s.survivors) s.estimates.emplace(m, FitEstimate{});
  s.limits = limits;
  return s;
}

const FitEstimate& PolicyState::estimate(ModelId m) const {
  auto it = estimates.find(m);
  if (it == estimates.end()) {
    throw StateError("no estimate slot for model " + std::to_string(m.value));
  }
  return it->second;
}

BatchPlan plan_round(const PolicyState& state, std::uint32_t batch_size) {
  if (state.survivors.empty()) throw StateError("plan_round: survivor set is empty");
  if (batch_size == 0) throw ParameterError("batch size must be positive");
  BatchPlan plan;
  plan.round_index = state.round_index;
  plan.pilots_per_target = batch_size;
  if (state.kind == PolicyKind::explore_then_commit &&
      state.round_index >= state.limits.explore_rounds) {
    plan.targets = {select_best(state)};
  } else {
    plan.targets = state.survivors;
  }
  return plan;
}

PolicyState apply_batch(PolicyState state, ModelId model, std::uint64_t successes,
                        std::uint64_t trials) {
  auto it = state.estimates.find(model);
  if (it == state.estimates.end()) {
    throw StateError("apply_batch: model " + std::to_string(model.value) + " is not tracked");
  }
  it->second = record_batch(it->second, successes, trials);
  state.total_pilots += trials;
  return state;
}

EliminationResult eliminate(const PolicyState& state, double delta) {
  if (state.survivors.empty()) throw StateError("eliminate: survivor set is empty");
  for (ModelId m : state.survivors) {
    if (!state.estimate(m).has_data()) {
      throw NoDataError("eliminate: model " + std::to_string(m.value) +
                        " has no pilots yet; elimination deferred");
    }
  }

  EliminationResult out{state, {}};
  out.state.round_index = state.round_index + 1;

  switch (state.kind) {
    case PolicyKind::uniform_fixed:
      break;
    case PolicyKind::explore_then_commit:
      if (out.state.round_index >= state.limits.explore_rounds && state.survivors.size() > 1) {
        const ModelId best = select_best(state);
        for (ModelId m : state.survivors) {
          if (m != best) out.eliminated.push_back(m);
        }
        out.state.survivors = {best};
      }
      break;
    case PolicyKind::batched_elimination: {
      std::vector<ConfidenceBounds> b;
      b.reserve(state.survivors.size());
      double best_lcb = 0.0;
      for (ModelId m : state.survivors) {
        b.push_back(bounds(state.estimate(m), delta));
        best_lcb = std::max(best_lcb, b.back().lcb);
      }
      std::vector<ModelId> kept;
      for (std::size_t i = 0; i < state.survivors.size(); ++i) {
        if (b[i].ucb < best_lcb) {
          out.eliminated.push_back(state.survivors[i]);
        } else {
          kept.push_back(state.survivors[i]);
        }
      }
      out.state.survivors = std::move(kept);
      break;
    }
  }
  return out;
}

ModelId select_best(const PolicyState& state) {
  bool found = false;
  ModelId best{};
  double best_mean = -1.0;
  for (ModelId m : state.survivors) {
    const auto mean = state.estimate(m).mean();
    if (!mean) continue;
    // survivors are ascending, so strict > keeps the lowest id on ties
    if (!found || *mean > best_mean) {
      best = m;
      best_mean = *mean;
      found = true;
    }
  }
  if (!found) throw NoDataError("select_best: no surviving model has data");
  return best;
}

bool is_terminal(const PolicyState& state) noexcept {
  if (state.survivors.size() <= 1) return true;
  std::uint32_t cap = state.limits.max_rounds;
  if (state.kind == PolicyKind::uniform_fixed) cap = std::min(cap, state.limits.uniform_rounds);
  if (state.round_index >= cap) return true;
  return state.limits.pilot_budget > 0 && state.total_pilots >= state.limits.pilot_budget;
}

}  // namespace modnet
