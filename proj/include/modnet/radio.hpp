#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string_view>
#include <vector>

#include "modnet/ids.hpp"
#include "modnet/rng.hpp"

namespace modnet {

/// Uplink parameters. Units: Hz, W, bits, seconds.
struct RadioParams {
  double bandwidth_hz = 1e6;
  double noise_power_w = 1e-9;
  double tx_power_w = 0.1;
  double pilot_bits = 1e5;
  double feedback_time_s = 0.01;
  double time_budget_s = 1.0;

  /// ParameterError unless every field is strictly positive and finite.
  void validate() const;

  friend bool operator==(const RadioParams&, const RadioParams&) = default;
};

/// Channel of one (user, server) link in the current fading block.
struct LinkState {
  UserId user_id;
  ServerId server_id;
  double mean_gain = 1.0;
  double gain = 1.0;
  std::uint64_t block_index = 0;
};

/// Rayleigh block fading: the power gain is mean_gain times a unit-mean
/// exponential, redrawn once per block.
LinkState draw_gain(LinkState link, Rng& rng);

/// Minimum energy to push `bits` through the link in `duration` seconds:
/// duration * (N / gain) * (2^(bits / (B * duration)) - 1).
/// ParameterError for non-positive inputs, InfeasibleError if the result
/// overflows a double.
double transmit_energy(double bits, double duration_s, double gain, const RadioParams& params);

/// Transmission time per round when the time budget is split into
/// `round_count` rounds, each followed by one feedback message.
/// InfeasibleError if the feedback alone uses up the budget.
double round_duration(std::uint32_t round_count, const RadioParams& params);

/// Shannon rate of a broadcast, limited by the weakest link.
double broadcast_rate(std::span<const LinkState> links, double power_w, const RadioParams& params);

enum class SchedulingMode { opportunistic, learning_aware };

std::string_view to_string(SchedulingMode m) noexcept;
SchedulingMode scheduling_mode_from_string(std::string_view name);

struct SchedulingCandidate {
  UserId user_id;
  double gain;
  double learning_score;  // confidence-interval width at the user's empirical best
};

struct SchedulingWeights {
  double alpha = 1.0;
  double beta = 1.0;
  friend bool operator==(const SchedulingWeights&, const SchedulingWeights&) = default;
};

/// Grants the uplink to `slots` users: by gain (opportunistic) or by
/// gain^alpha * score^beta (learning-aware). Ties go to the lower user id.
/// Returns granted ids in ascending order.
std::vector<UserId> schedule_users(std::span<const SchedulingCandidate> candidates,
                                   SchedulingMode mode, std::uint32_t slots,
                                   SchedulingWeights weights = {});

/// Uplink energy bookkeeping, one row of per-round entries per user.
class EnergyLedger {
 public:
  explicit EnergyLedger(std::size_t users = 0) : rounds_(users) {}

  /// Adds `joules` for `user` in round `round` (0-based). Rounds of one user
  /// never go back.
  void record(UserId user, std::uint32_t round, double joules);

  /// Sum of the user's per-round entries, accumulated in round order.
  double user_total(UserId user) const;
  const std::vector<double>& user_rounds(UserId user) const { return rounds_.at(user.value); }
  /// Cross-user energy per round.
  std::vector<double> per_round() const;
  double total() const;
  std::size_t users() const noexcept { return rounds_.size(); }

 private:
  std::vector<std::vector<double>> rounds_;
};

}  // namespace modnet
