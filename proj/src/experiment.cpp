#include "modnet/experiment.hpp"

#include <cmath>
#include <exception>
#include <string>

#include "modnet/errors.hpp"

#ifdef MODNET_HAVE_OPENMP
#include <omp.h>
#endif

namespace modnet {

namespace {

EpisodeMetrics run_seed(const EpisodeConfig& base, std::uint64_t seed, bool trace) {
  EpisodeConfig cfg = base;
  cfg.seed = seed;
  return run_episode(cfg, EpisodeOptions{trace});
}

[[noreturn]] void rethrow_with_seed(std::exception_ptr ep, std::uint64_t seed) {
  const std::string where = "seed " + std::to_string(seed) + ": ";
  try {
    std::rethrow_exception(ep);
  } catch (const Error& e) {
    throw Error(e.category(), where + e.what());
  } catch (const std::exception& e) {
    throw StateError(where + e.what());
  }
}

template <class Acc>
Summary summarize(std::size_t n, Acc value) {
  Summary s;
  if (n == 0) return s;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += value(i);
  s.mean = sum / static_cast<double>(n);
  if (n > 1) {
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = value(i) - s.mean;
      ss += d * d;
    }
    s.stddev = std::sqrt(ss / static_cast<double>(n - 1));
  }
  return s;
}

}  // namespace

ExperimentAggregate aggregate(std::span<const EpisodeMetrics> rows) {
  ExperimentAggregate a;
  a.episodes = rows.size();
  std::vector<const UserMetrics*> users;
  std::uint64_t identified = 0;
  for (const auto& r : rows) {
    a.promotions += r.promotions;
    for (const auto& u : r.users) {
      users.push_back(&u);
      identified += u.identified_best ? 1 : 0;
    }
  }
  a.user_episodes = users.size();
  a.identification_rate =
      users.empty() ? 0.0 : static_cast<double>(identified) / static_cast<double>(users.size());
  a.energy_joules = summarize(rows.size(), [&](std::size_t i) { return rows[i].total_energy(); });
  a.pilots = summarize(rows.size(), [&](std::size_t i) { return static_cast<double>(rows[i].total_pilots()); });
  a.feedback_rounds =
      summarize(rows.size(), [&](std::size_t i) { return static_cast<double>(rows[i].feedback_rounds); });
  a.task_accuracy = summarize(users.size(), [&](std::size_t i) { return users[i]->task_accuracy; });
  return a;
}

ExperimentTable run_experiment_serial(const EpisodeConfig& config, std::span<const std::uint64_t> seeds,
                                      ExperimentOptions options) {
  if (seeds.empty()) throw ParameterError("run_experiment: seed list is empty");
  config.validate();
  ExperimentTable t;
  t.rows.reserve(seeds.size());
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    try {
      t.rows.push_back(run_seed(config, seeds[i], options.trace_first && i == 0));
    } catch (...) {
      rethrow_with_seed(std::current_exception(), seeds[i]);
    }
  }
  t.aggregate = aggregate(t.rows);
  return t;
}

ExperimentTable run_experiment(const EpisodeConfig& config, std::span<const std::uint64_t> seeds,
                               ExperimentOptions options) {
#ifndef MODNET_HAVE_OPENMP
  return run_experiment_serial(config, seeds, options);
#else
  if (seeds.empty()) throw ParameterError("run_experiment: seed list is empty");
  config.validate();
  const auto n = static_cast<std::int64_t>(seeds.size());
  ExperimentTable t;
  t.rows.resize(seeds.size());
  std::vector<std::exception_ptr> errors(seeds.size());
  const int threads = options.threads > 0 ? options.threads : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic, 4) num_threads(threads)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      t.rows[i] = run_seed(config, seeds[i], options.trace_first && i == 0);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }

  // report the first failure in seed order, independent of thread timing
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (errors[i]) rethrow_with_seed(errors[i], seeds[i]);
  }
  t.aggregate = aggregate(t.rows);
  return t;
#endif
}

std::vector<std::uint64_t> seed_range(std::uint64_t first, std::uint64_t count) {
  std::vector<std::uint64_t> s(count);
  for (std::uint64_t i = 0; i < count; ++i) s[i] = first + i;
  return s;
}

}  // namespace modnet
