#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "modnet/config.hpp"
#include "modnet/experiment.hpp"

namespace modnet {

struct SweepRow {
  std::string parameter;
  Json value;
  PolicyKind policy;
  ExperimentAggregate aggregate;
};

/// Runs the experiment once per (value, policy) pair, with `parameter` (a
/// dotted config path) set to each value. Every cell uses the same seeds.
std::vector<SweepRow> run_sweep(const EpisodeConfig& config, std::string_view parameter,
                                std::span<const Json> values, std::span<const PolicyKind> policies,
                                std::span<const std::uint64_t> seeds, ExperimentOptions options = {});

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);

}  // namespace modnet
