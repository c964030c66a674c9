#include "modnet/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "modnet/errors.hpp"

namespace modnet {

namespace {

constexpr double kNormalizationTol = 1e-9;

void check_probability(double v, const char* name) {
  if (!(v > 0.0 && v < 1.0)) {
    throw ParameterError(std::string(name) + " must lie in (0, 1), got " + std::to_string(v));
  }
}

}  // namespace

ConfidenceParams ConfidenceParams::from_budget(double epsilon, std::size_t arms,
                                               std::size_t max_rounds) {
  check_probability(epsilon, "epsilon");
  if (arms == 0 || max_rounds == 0) {
    throw ParameterError("arm count and round cap must be positive");
  }
  return {epsilon / (static_cast<double>(arms) * static_cast<double>(max_rounds)), epsilon};
}

FitEstimate record_outcome(FitEstimate est, Outcome outcome) noexcept {
  ++est.trials;
  if (outcome == Outcome::success) ++est.successes;
  return est;
}

FitEstimate record_batch(FitEstimate est, std::uint64_t successes, std::uint64_t trials) {
  if (successes > trials) throw ParameterError("batch successes exceed batch trials");
  est.successes += successes;
  est.trials += trials;
  return est;
}

double confidence_radius(std::uint64_t trials, double delta) {
  if (trials == 0) throw NoDataError("confidence radius requested with zero trials");
  check_probability(delta, "delta");
  return std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(trials)));
}

ConfidenceBounds bounds(const FitEstimate& est, double delta) {
  const double r = confidence_radius(est.trials, delta);
  const double m = *est.mean();
  return {std::clamp(m - r, 0.0, 1.0), std::clamp(m + r, 0.0, 1.0)};
}

std::uint64_t required_pilots(double epsilon, double gap) {
  check_probability(epsilon, "epsilon");
  if (gap == 0.0) throw DivergenceError("required pilots diverge as the gap goes to zero");
  if (!(gap > 0.0 && gap <= 1.0)) {
    throw ParameterError("gap must lie in (0, 1], got " + std::to_string(gap));
  }
  return static_cast<std::uint64_t>(std::ceil(2.0 * std::log(2.0 / epsilon) / (gap * gap)));
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size() || p.empty()) {
    throw ParameterError("kl_divergence: distributions must share a nonempty support");
  }
  double sp = 0.0;
  double sq = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] >= 0.0) || !(q[i] >= 0.0)) throw ParameterError("kl_divergence: negative mass");
    sp += p[i];
    sq += q[i];
  }
  if (std::abs(sp - 1.0) > kNormalizationTol || std::abs(sq - 1.0) > kNormalizationTol) {
    throw ParameterError("kl_divergence: inputs must sum to 1 within 1e-9");
  }
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) {
      throw ParameterError("kl_divergence: p is not absolutely continuous w.r.t. q at index " +
                           std::to_string(i));
    }
    kl += p[i] * std::log(p[i] / q[i]);
  }
  // Rounding can leave a tiny negative value for p ~ q.
  return std::max(kl, 0.0);
}

}  // namespace modnet
