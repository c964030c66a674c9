#include "modnet/radio.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "modnet/errors.hpp"

namespace modnet {

namespace {

bool positive(double v) { return v > 0.0 && std::isfinite(v); }

}  // namespace

void RadioParams::validate() const {
  const std::pair<const char*, double> fields[] = {
      {"radio.bandwidth_hz", bandwidth_hz},       {"radio.noise_power_w", noise_power_w},
      {"radio.tx_power_w", tx_power_w},           {"radio.pilot_bits", pilot_bits},
      {"radio.feedback_time_s", feedback_time_s}, {"radio.time_budget_s", time_budget_s},
  };
  for (const auto& [name, v] : fields) {
    if (!positive(v)) throw ParameterError(std::string(name) + " must be strictly positive");
  }
}

LinkState draw_gain(LinkState link, Rng& rng) {
  link.gain = link.mean_gain * rng.exponential();
  ++link.block_index;
  return link;
}

double transmit_energy(double bits, double duration_s, double gain, const RadioParams& params) {
  if (!positive(bits) || !positive(duration_s) || !positive(gain)) {
    throw ParameterError("transmit_energy: bits, duration and gain must be positive");
  }
  const double spectral = bits / (params.bandwidth_hz * duration_s);
  // expm1 keeps full relative precision when the rate demand is tiny
  const double energy =
      duration_s * (params.noise_power_w / gain) * std::expm1(spectral * std::numbers::ln2);
  if (!std::isfinite(energy)) {
    throw InfeasibleError("transmit_energy: rate demand of " + std::to_string(spectral) +
                          " bit/s/Hz overflows the energy model");
  }
  return energy;
}

double round_duration(std::uint32_t round_count, const RadioParams& params) {
  if (round_count == 0) throw ParameterError("round_duration: need at least one round");
  const double overhead = static_cast<double>(round_count) * params.feedback_time_s;
  if (overhead >= params.time_budget_s) {
    throw InfeasibleError("feedback overhead of " + std::to_string(round_count) +
                          " rounds uses the whole time budget");
  }
  return (params.time_budget_s - overhead) / static_cast<double>(round_count);
}

double broadcast_rate(std::span<const LinkState> links, double power_w, const RadioParams& params) {
  if (links.empty()) throw ParameterError("broadcast_rate: no destination links");
  double min_gain = links.front().gain;
  for (const auto& l : links) min_gain = std::min(min_gain, l.gain);
  return params.bandwidth_hz * std::log1p(power_w * min_gain / params.noise_power_w) / std::numbers::ln2;
}

std::string_view to_string(SchedulingMode m) noexcept {
  return m == SchedulingMode::opportunistic ? "opportunistic" : "learning-aware";
}

SchedulingMode scheduling_mode_from_string(std::string_view name) {
  if (name == "opportunistic") return SchedulingMode::opportunistic;
  if (name == "learning-aware") return SchedulingMode::learning_aware;
  throw ConfigError("unknown scheduling mode '" + std::string(name) +
                    "' (expected opportunistic or learning-aware)");
}

std::vector<UserId> schedule_users(std::span<const SchedulingCandidate> candidates,
                                   SchedulingMode mode, std::uint32_t slots,
                                   SchedulingWeights weights) {
  if (candidates.empty()) throw ParameterError("schedule_users: no candidates");
  if (slots == 0) throw ParameterError("schedule_users: need at least one slot");

  std::vector<double> score(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& c = candidates[i];
    score[i] = mode == SchedulingMode::opportunistic
                   ? c.gain
                   : std::pow(c.gain, weights.alpha) * std::pow(c.learning_score, weights.beta);
  }
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (score[a] != score[b]) return score[a] > score[b];
    return candidates[a].user_id < candidates[b].user_id;
  });
  const std::size_t n = std::min<std::size_t>(slots, order.size());
  std::vector<UserId> granted;
  granted.reserve(n);
  for (std::size_t i = 0; i < n; ++i) granted.push_back(candidates[order[i]].user_id);
  std::sort(granted.begin(), granted.end());
  return granted;
}

void EnergyLedger::record(UserId user, std::uint32_t round, double joules) {
  if (!(joules >= 0.0)) throw ParameterError("energy entries must be nonnegative");
  auto& row = rounds_.at(user.value);
  if (round + 1 < row.size()) throw StateError("energy ledger rounds must not go back");
  if (row.size() <= round) row.resize(round + 1, 0.0);
  row[round] += joules;
}

double EnergyLedger::user_total(UserId user) const {
  const auto& row = rounds_.at(user.value);
  return std::accumulate(row.begin(), row.end(), 0.0);
}

std::vector<double> EnergyLedger::per_round() const {
  std::size_t n = 0;
  for (const auto& row : rounds_) n = std::max(n, row.size());
  std::vector<double> out(n, 0.0);
  for (const auto& row : rounds_) {
    for (std::size_t r = 0; r < row.size(); ++r) out[r] += row[r];
  }
  return out;
}

double EnergyLedger::total() const {
  double t = 0.0;
  for (std::uint32_t u = 0; u < rounds_.size(); ++u) t += user_total(UserId{u});
  return t;
}

}  // namespace modnet
