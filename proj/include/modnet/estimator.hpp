#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>

namespace modnet {

enum class Outcome : bool { failure = false, success = true };

/// Success/trial counts from pilot outcomes for one (user, model) pair.
/// Invariant: successes <= trials.
struct FitEstimate {
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;

  bool has_data() const noexcept { return trials > 0; }

  /// Empirical fit probability; nullopt when no pilot has been observed.
  std::optional<double> mean() const noexcept {
    if (trials == 0) return std::nullopt;
    return static_cast<double>(successes) / static_cast<double>(trials);
  }

  friend bool operator==(const FitEstimate&, const FitEstimate&) = default;
};

struct ConfidenceBounds {
  double lcb;
  double ucb;
};

/// Failure budgets. `delta` applies to one arm in one round, `epsilon` to the
/// whole identification run.
struct ConfidenceParams {
  double delta;
  double epsilon;

  /// Splits epsilon over `arms` arms and `max_rounds` rounds with a union bound.
  static ConfidenceParams from_budget(double epsilon, std::size_t arms, std::size_t max_rounds);
};

/// Returns a copy of `est` with one more trial (and one more success if `outcome`
/// is a success).
FitEstimate record_outcome(FitEstimate est, Outcome outcome) noexcept;

/// Adds a block of `trials` observations with `successes` successes.
FitEstimate record_batch(FitEstimate est, std::uint64_t successes, std::uint64_t trials);

/// Two-sided Hoeffding radius sqrt(ln(2/delta) / (2 n)).
/// Throws NoDataError for n = 0 and ParameterError for delta outside (0, 1).
double confidence_radius(std::uint64_t trials, double delta);

/// Mean +/- radius, clamped to [0, 1].
ConfidenceBounds bounds(const FitEstimate& est, double delta);

/// Pilots per arm that separate two arms `gap` apart with confidence
/// 1 - epsilon: ceil(2 ln(2/epsilon) / gap^2).
std::uint64_t required_pilots(double epsilon, double gap);

/// KL(p || q) in nats, with 0 ln 0 = 0. Both inputs must be distributions on
/// the same support (sum to 1 within 1e-9) and q must dominate p.
double kl_divergence(std::span<const double> p, std::span<const double> q);

}  // namespace modnet
