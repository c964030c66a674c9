#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "modnet/config.hpp"
#include "modnet/experiment.hpp"

namespace modnet {

/// Shortest decimal that parses back to exactly `v`.
std::string format_number(double v);

/// "sha256:<hex>" of arbitrary bytes.
std::string content_digest(const std::string& bytes);

/// "sha256:<hex>" of the serialized resolved configuration.
std::string config_digest(const EpisodeConfig& config);

struct RunManifest {
  std::string config_digest;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> artifacts;  // file names relative to the output directory
  std::string tool_version;
  std::optional<std::string> timestamp;  // left out unless asked for, so reruns match byte for byte
};

std::vector<std::string> metrics_columns();

/// One row per episode. Per-user fields are joined with '|', elimination
/// timelines are written as "round:model+model;round:model".
void write_metrics_csv(std::ostream& out, const EpisodeConfig& config, std::span<const EpisodeMetrics> rows);
void write_trace_csv(std::ostream& out, const EpisodeConfig& config, std::span<const EpisodeMetrics> rows);

Json aggregate_to_json(const ExperimentAggregate& a);
Json manifest_to_json(const RunManifest& m);
Json summary_document(const ExperimentTable& table, const EpisodeConfig& config, const RunManifest& manifest);

struct WriteOptions {
  std::optional<std::string> timestamp;
  std::vector<std::string> extra_artifacts;  // already written by the caller
};

/// Writes metrics.csv, summary.json and (when any row carries one) trace.csv
/// into `dir`, creating it if needed. IoError if anything cannot be written.
RunManifest write_metrics(const ExperimentTable& table, const EpisodeConfig& config,
                          std::span<const std::uint64_t> seeds, const std::filesystem::path& dir,
                          WriteOptions options = {});

/// Offloads `tasks` tasks to every model in every context and counts successes.
struct AccuracyRow {
  std::string model;
  std::string context;
  double configured = 0.0;
  std::uint64_t tasks = 0;
  std::uint64_t successes = 0;
};

std::vector<AccuracyRow> probe_accuracy(const EpisodeConfig& config, std::uint64_t tasks);
void write_accuracy_csv(std::ostream& out, std::span<const AccuracyRow> rows);

/// Writes `text` to `path` or throws IoError.
void write_file(const std::filesystem::path& path, const std::string& text);

}  // namespace modnet
