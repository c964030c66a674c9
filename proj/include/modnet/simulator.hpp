#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "modnet/environment.hpp"
#include "modnet/estimator.hpp"
#include "modnet/ids.hpp"
#include "modnet/policy.hpp"
#include "modnet/radio.hpp"

namespace modnet {

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

struct ModelSpec {
  std::string name;
  ServerId server;
  std::vector<double> fit;  // one entry per context

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

struct TrainingConfig {
  bool enabled = false;
  TrainingParams params;
  std::vector<double> target;  // per context; empty when training is off

  friend bool operator==(const TrainingConfig&, const TrainingConfig&) = default;
};

/// Models, contexts and the dataset-shift process.
struct ScenarioConfig {
  std::vector<std::string> contexts;
  std::vector<ModelSpec> models;
  std::vector<std::vector<double>> transition;
  std::vector<std::uint32_t> initial_contexts;  // one per user
  TrainingConfig training;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

struct RadioConfig {
  RadioParams params;
  std::vector<double> mean_gains;       // one per server
  std::vector<double> user_gain_scale;  // one per user

  friend bool operator==(const RadioConfig&, const RadioConfig&) = default;
};

struct PolicyConfig {
  PolicyKind kind = PolicyKind::batched_elimination;
  std::uint32_t batch_size = 25;
  double epsilon = 0.05;
  PolicyLimits limits;

  friend bool operator==(const PolicyConfig&, const PolicyConfig&) = default;
};

struct SchedulingConfig {
  SchedulingMode mode = SchedulingMode::opportunistic;
  std::uint32_t slots = 1;
  SchedulingWeights weights;

  friend bool operator==(const SchedulingConfig&, const SchedulingConfig&) = default;
};

/// Users with index < pioneers explore every model from the start; the rest
/// order their exploration by neighbors' predictions when cooperation is on.
struct CooperationConfig {
  bool enabled = false;
  std::uint32_t min_overlap = 2;
  std::uint32_t neighbors = 4;
  std::uint32_t pioneers = 1;

  friend bool operator==(const CooperationConfig&, const CooperationConfig&) = default;
};

/// adaptive: send each round only to servers hosting a sampled model.
/// broadcast: keep broadcasting to every server for the whole episode.
enum class TransmissionMode { adaptive, broadcast };

std::string_view to_string(TransmissionMode m) noexcept;
TransmissionMode transmission_mode_from_string(std::string_view name);

struct EpisodeConfig {
  ScenarioConfig scenario;
  RadioConfig radio;
  PolicyConfig policy;
  SchedulingConfig scheduling;
  CooperationConfig cooperation;
  std::uint32_t users = 1;
  std::uint32_t servers = 1;
  TransmissionMode mode = TransmissionMode::adaptive;
  std::uint32_t task_count = 100;
  std::uint64_t seed = 1;

  /// ConfigError naming the offending field if any invariant fails.
  void validate() const;
  std::vector<ModelOracle> make_oracles() const;
  std::vector<ModelId> model_ids() const;

  friend bool operator==(const EpisodeConfig&, const EpisodeConfig&) = default;
};

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

/// Models dropped at the end of one round (1-based round of the user's policy).
struct EliminationEvent {
  std::uint32_t round;
  std::vector<ModelId> models;

  friend bool operator==(const EliminationEvent&, const EliminationEvent&) = default;
};

struct UserMetrics {
  ModelId chosen_model;
  ModelId true_best;
  bool identified_best = false;
  std::uint64_t pilots_sent = 0;
  std::uint32_t rounds = 0;
  double energy_joules = 0.0;
  double task_accuracy = 0.0;
  Context dominant_context;
  std::vector<EliminationEvent> timeline;

  friend bool operator==(const UserMetrics&, const UserMetrics&) = default;
};

/// Snapshot of one estimate after one of the user's rounds.
struct TraceRow {
  std::uint32_t frame;
  UserId user;
  ModelId model;
  FitEstimate estimate;
  bool survivor;

  friend bool operator==(const TraceRow&, const TraceRow&) = default;
};

struct EpisodeMetrics {
  std::uint64_t seed = 0;
  std::uint32_t feedback_rounds = 0;
  std::uint32_t promotions = 0;
  std::vector<UserMetrics> users;
  std::vector<double> round_energy;  // cross-user joules per frame
  std::vector<TraceRow> trace;       // filled only when requested

  double total_energy() const;
  std::uint64_t total_pilots() const;

  friend bool operator==(const EpisodeMetrics&, const EpisodeMetrics&) = default;
};

struct EpisodeOptions {
  bool record_trace = false;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

struct TransmissionPlan {
  bool broadcast = false;
  std::vector<ServerId> servers;  // ascending
  double effective_gain = 0.0;    // weakest destination gain
  double rate_bps = 0.0;
};

/// Broadcast to every server still hosting a survivor, or unicast when only
/// one such server is left. `links` holds the user's link to every server,
/// indexed by server id. StateError if no server hosts a survivor.
TransmissionPlan select_transmission_mode(std::span<const LinkState> links,
                                          const std::map<ServerId, std::vector<ModelId>>& survivors_per_server,
                                          const RadioParams& params);

/// Runs one learning episode followed by task offloading. Deterministic in
/// config.seed.
EpisodeMetrics run_episode(const EpisodeConfig& config, EpisodeOptions options = {});

/// Successes of `count` offloaded tasks of `oracle` in context `ctx`.
std::uint64_t offload_tasks(const ModelOracle& oracle, Context ctx, std::uint64_t count, Rng& rng);

}  // namespace modnet
