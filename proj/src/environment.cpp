#include "modnet/environment.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "modnet/errors.hpp"

namespace modnet {

namespace {
constexpr double kRowTol = 1e-9;

bool in_unit_interval(double p) { return p >= 0.0 && p <= 1.0; }
}  // namespace

double ModelOracle::fit(Context ctx) const {
  if (ctx.index >= fit_table.size()) {
    throw ConfigError("model " + std::to_string(model_id.value) + " has no fit entry for context " +
                      std::to_string(ctx.index));
  }
  return fit_table[ctx.index];
}

void ModelOracle::validate(std::size_t context_count) const {
  if (fit_table.size() != context_count) {
    throw ConfigError("fit table of model " + std::to_string(model_id.value) + " covers " +
                      std::to_string(fit_table.size()) + " contexts, expected " +
                      std::to_string(context_count));
  }
  for (double p : fit_table) {
    if (!in_unit_interval(p)) throw ConfigError("fit probabilities must lie in [0, 1]");
  }
  if (shadow_table) {
    if (shadow_table->size() != context_count) {
      throw ConfigError("shadow table must cover the same contexts as the fit table");
    }
    for (double p : *shadow_table) {
      if (!in_unit_interval(p)) throw ConfigError("shadow probabilities must lie in [0, 1]");
    }
  }
}

void ContextProcess::validate() const {
  const std::size_t n = transition.size();
  if (n == 0) throw ParameterError("transition matrix is empty");
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = transition[i];
    if (row.size() != n) throw ParameterError("transition matrix must be square");
    double sum = 0.0;
    for (double v : row) {
      if (!(v >= 0.0)) {
        throw ParameterError("transition row " + std::to_string(i) + " has a negative entry");
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > kRowTol) {
      throw ParameterError("transition row " + std::to_string(i) + " sums to " +
                           std::to_string(sum) + "; rows must sum to 1 within tolerance 1e-9");
    }
  }
  if (current.index >= n) throw ParameterError("current context outside the transition matrix");
}

std::vector<std::vector<double>> sticky_transition(std::size_t contexts, double self) {
  if (contexts == 0) throw ParameterError("need at least one context");
  if (!in_unit_interval(self)) throw ParameterError("self-transition must lie in [0, 1]");
  std::vector<std::vector<double>> t(contexts, std::vector<double>(contexts, 0.0));
  if (contexts == 1) {
    t[0][0] = 1.0;
    return t;
  }
  const double off = (1.0 - self) / static_cast<double>(contexts - 1);
  for (std::size_t i = 0; i < contexts; ++i) {
    for (std::size_t j = 0; j < contexts; ++j) t[i][j] = i == j ? self : off;
  }
  return t;
}

Outcome sample_response(const ModelOracle& oracle, Context ctx, Rng& rng) {
  return rng.bernoulli(oracle.fit(ctx)) ? Outcome::success : Outcome::failure;
}

std::uint64_t sample_responses(const ModelOracle& oracle, Context ctx, std::uint64_t count,
                               Rng& rng) {
  const double p = oracle.fit(ctx);
  std::uint64_t s = 0;
  for (std::uint64_t i = 0; i < count; ++i) s += rng.bernoulli(p) ? 1 : 0;
  return s;
}

ContextProcess step_context(ContextProcess proc, Rng& rng) {
  const auto& row = proc.transition.at(proc.current.index);
  const double u = rng.uniform();
  double acc = 0.0;
  std::uint32_t next = proc.current.index;
  bool picked = false;
  for (std::size_t j = 0; j < row.size(); ++j) {
    acc += row[j];
    if (u < acc) {
      next = static_cast<std::uint32_t>(j);
      picked = true;
      break;
    }
  }
  if (!picked) {
    // u landed in the rounding slack past the row sum; take the last positive entry
    for (std::size_t j = row.size(); j-- > 0;) {
      if (row[j] > 0.0) {
        next = static_cast<std::uint32_t>(j);
        break;
      }
    }
  }
  proc.current = Context{next};
  return proc;
}

ModelOracle train_shadow(ModelOracle oracle, std::uint64_t pilot_count,
                         const std::map<Context, double>& target, const TrainingParams& params) {
  if (!(params.rate > 0.0 && params.rate <= 1.0)) {
    throw ParameterError("training rate must lie in (0, 1]");
  }
  if (params.pilot_unit == 0) throw ParameterError("pilot_unit must be positive");
  if (!oracle.shadow_table) oracle.shadow_table = oracle.fit_table;
  if (pilot_count == 0) return oracle;

  const double steps = static_cast<double>(pilot_count) / static_cast<double>(params.pilot_unit);
  const double eta = params.rate == 1.0 ? 1.0 : -std::expm1(steps * std::log1p(-params.rate));
  auto& shadow = *oracle.shadow_table;
  for (const auto& [ctx, goal] : target) {
    if (ctx.index >= shadow.size()) throw ConfigError("training target names an unknown context");
    if (!in_unit_interval(goal)) throw ParameterError("training target must lie in [0, 1]");
    const double old = shadow[ctx.index];
    // the update is a convex combination; clamp away rounding overshoot
    shadow[ctx.index] = std::clamp(old + eta * (goal - old), std::min(old, goal), std::max(old, goal));
  }
  return oracle;
}

ModelOracle promote_shadow(ModelOracle oracle, const std::vector<double>& ctx_weights,
                           const TrainingParams& params) {
  if (!oracle.shadow_table) throw StateError("promote_shadow: no shadow copy to promote");
  if (ctx_weights.size() != oracle.fit_table.size()) {
    throw ParameterError("context weights must cover every context");
  }
  double wsum = 0.0;
  double fit_mean = 0.0;
  double shadow_mean = 0.0;
  for (std::size_t i = 0; i < ctx_weights.size(); ++i) {
    if (!(ctx_weights[i] >= 0.0)) throw ParameterError("context weights must be nonnegative");
    wsum += ctx_weights[i];
    fit_mean += ctx_weights[i] * oracle.fit_table[i];
    shadow_mean += ctx_weights[i] * (*oracle.shadow_table)[i];
  }
  if (std::abs(wsum - 1.0) > kRowTol) {
    throw ParameterError("context weights must sum to 1 within 1e-9");
  }
  if (shadow_mean > fit_mean + params.promotion_margin) {
    oracle.fit_table = *oracle.shadow_table;
    ++oracle.version;
  }
  return oracle;
}

}  // namespace modnet
