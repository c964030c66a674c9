#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "modnet/simulator.hpp"

namespace modnet {

struct Summary {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, 0 for fewer than two rows

  friend bool operator==(const Summary&, const Summary&) = default;
};

struct ExperimentAggregate {
  std::uint64_t episodes = 0;
  std::uint64_t user_episodes = 0;
  double identification_rate = 0.0;  // identified user-episodes / user_episodes
  Summary energy_joules;             // per-episode total
  Summary pilots;                    // per-episode total
  Summary feedback_rounds;
  Summary task_accuracy;             // over user-episodes
  std::uint64_t promotions = 0;

  friend bool operator==(const ExperimentAggregate&, const ExperimentAggregate&) = default;
};

struct ExperimentTable {
  std::vector<EpisodeMetrics> rows;  // seed order
  ExperimentAggregate aggregate;
};

struct ExperimentOptions {
  bool trace_first = false;  // record a trace for the first seed
  int threads = 0;           // 0 = OpenMP default
};

/// Runs one episode per seed (config.seed is replaced by each seed) across
/// OpenMP threads. Rows come back in seed-list order regardless of schedule.
/// An episode failure is rethrown with its seed attached.
ExperimentTable run_experiment(const EpisodeConfig& config, std::span<const std::uint64_t> seeds,
                               ExperimentOptions options = {});

/// Single-threaded reference for run_experiment.
ExperimentTable run_experiment_serial(const EpisodeConfig& config, std::span<const std::uint64_t> seeds,
                                      ExperimentOptions options = {});

ExperimentAggregate aggregate(std::span<const EpisodeMetrics> rows);

/// seeds first, first+1, ..., first+count-1
std::vector<std::uint64_t> seed_range(std::uint64_t first, std::uint64_t count);

}  // namespace modnet
