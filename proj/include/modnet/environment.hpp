#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "modnet/estimator.hpp"
#include "modnet/ids.hpp"
#include "modnet/rng.hpp"

namespace modnet {

/// Index into the scenario's context labels.
struct Context {
  std::uint32_t index = 0;
  friend constexpr auto operator<=>(Context, Context) = default;
};

/// A hosted model seen as a Bernoulli oracle per context. `fit_table` holds the
/// hidden fit probability of the served version; `shadow_table` holds the copy
/// being trained offline.
struct ModelOracle {
  ModelId model_id;
  ServerId server_id;
  std::vector<double> fit_table;  // indexed by Context::index
  std::uint32_t version = 0;
  std::optional<std::vector<double>> shadow_table;

  double fit(Context ctx) const;
  void validate(std::size_t context_count) const;
};

/// First-order Markov chain over contexts.
struct ContextProcess {
  std::vector<std::vector<double>> transition;  // row-stochastic
  Context current;

  /// Throws ParameterError if the matrix is not square and row-stochastic
  /// within 1e-9, or `current` is out of range.
  void validate() const;
};

/// Sticky chain: stay with probability `self`, otherwise move uniformly to one
/// of the other contexts.
std::vector<std::vector<double>> sticky_transition(std::size_t contexts, double self);

/// Training knobs for the shadow copy.
struct TrainingParams {
  double rate = 0.5;               // fractional approach per pilot_unit pilots, in (0, 1]
  std::uint32_t pilot_unit = 50;
  double promotion_margin = 0.05;  // weighted-mean gain needed to replace the served version

  friend bool operator==(const TrainingParams&, const TrainingParams&) = default;
};

/// One response of the oracle in `ctx`. ConfigError if ctx is unknown.
Outcome sample_response(const ModelOracle& oracle, Context ctx, Rng& rng);

/// Number of successes in `count` independent responses.
std::uint64_t sample_responses(const ModelOracle& oracle, Context ctx, std::uint64_t count, Rng& rng);

ContextProcess step_context(ContextProcess proc, Rng& rng);

/// Moves the shadow table toward `target` for every context present in
/// `target`: shadow += eta * (target - shadow), eta = 1 - (1 - rate)^(pilots / pilot_unit).
/// The shadow starts as a copy of fit_table. fit_table itself never changes here.
ModelOracle train_shadow(ModelOracle oracle, std::uint64_t pilot_count,
                         const std::map<Context, double>& target, const TrainingParams& params);

/// Replaces the served version with the shadow when the shadow's weighted mean
/// beats the served one by more than the promotion margin.
ModelOracle promote_shadow(ModelOracle oracle, const std::vector<double>& ctx_weights,
                           const TrainingParams& params);

}  // namespace modnet
