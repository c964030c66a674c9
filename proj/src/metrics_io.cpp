#include "modnet/metrics_io.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

#include "modnet/errors.hpp"
#include "modnet/rng.hpp"

namespace modnet {

namespace {

constexpr std::uint64_t kProbeStream = 5;

std::string sha256_hex(const std::string& text) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw StateError("sha256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xf];
  }
  return out;
}

template <class T, class F>
std::string joined(const std::vector<T>& items, char sep, F fmt) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += fmt(items[i]);
  }
  return out;
}

std::string timeline_text(const EpisodeConfig& c, const std::vector<EliminationEvent>& events) {
  return joined(events, ';', [&](const EliminationEvent& e) {
    return std::to_string(e.round) + ":" +
           joined(e.models, '+', [&](ModelId m) { return c.scenario.models[m.value].name; });
  });
}

}  // namespace

std::string format_number(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw StateError("number formatting failed");
  return std::string(buf.data(), end);
}

std::string content_digest(const std::string& bytes) { return "sha256:" + sha256_hex(bytes); }

std::string config_digest(const EpisodeConfig& config) { return content_digest(serialize_config(config)); }

std::vector<std::string> metrics_columns() {
  return {"seed",         "users",           "feedback_rounds",     "chosen_model",       "true_best",
          "identified_best", "pilots_sent",  "user_rounds",         "energy_joules",      "task_accuracy",
          "dominant_context", "elimination_timeline", "total_pilots", "total_energy_joules", "promotions"};
}

void write_metrics_csv(std::ostream& out, const EpisodeConfig& c, std::span<const EpisodeMetrics> rows) {
  out << joined(metrics_columns(), ',', [](const std::string& s) { return s; }) << '\n';
  const auto& names = c.scenario.models;
  for (const auto& r : rows) {
    const auto& u = r.users;
    out << r.seed << ',' << u.size() << ',' << r.feedback_rounds << ','
        << joined(u, '|', [&](const UserMetrics& m) { return names[m.chosen_model.value].name; }) << ','
        << joined(u, '|', [&](const UserMetrics& m) { return names[m.true_best.value].name; }) << ','
        << joined(u, '|', [](const UserMetrics& m) { return std::string(m.identified_best ? "1" : "0"); }) << ','
        << joined(u, '|', [](const UserMetrics& m) { return std::to_string(m.pilots_sent); }) << ','
        << joined(u, '|', [](const UserMetrics& m) { return std::to_string(m.rounds); }) << ','
        << joined(u, '|', [](const UserMetrics& m) { return format_number(m.energy_joules); }) << ','
        << joined(u, '|', [](const UserMetrics& m) { return format_number(m.task_accuracy); }) << ','
        << joined(u, '|', [&](const UserMetrics& m) { return c.scenario.contexts[m.dominant_context.index]; })
        << ',' << joined(u, '|', [&](const UserMetrics& m) { return timeline_text(c, m.timeline); }) << ','
        << r.total_pilots() << ',' << format_number(r.total_energy()) << ',' << r.promotions << '\n';
  }
}

void write_trace_csv(std::ostream& out, const EpisodeConfig& c, std::span<const EpisodeMetrics> rows) {
  out << "seed,frame,user,model,successes,trials,mean,lcb,ucb,survivor\n";
  const double delta =
      ConfidenceParams::from_budget(c.policy.epsilon, c.scenario.models.size(), c.policy.limits.max_rounds).delta;
  for (const auto& r : rows) {
    for (const auto& t : r.trace) {
      out << r.seed << ',' << t.frame << ',' << t.user.value << ',' << c.scenario.models[t.model.value].name << ','
          << t.estimate.successes << ',' << t.estimate.trials << ',';
      if (t.estimate.has_data()) {
        const auto b = bounds(t.estimate, delta);
        out << format_number(*t.estimate.mean()) << ',' << format_number(b.lcb) << ',' << format_number(b.ucb);
      } else {
        out << ",,";
      }
      out << ',' << (t.survivor ? 1 : 0) << '\n';
    }
  }
}

Json aggregate_to_json(const ExperimentAggregate& a) {
  auto summary = [](const Summary& s) { return Json{{"mean", s.mean}, {"stddev", s.stddev}}; };
  Json j;
  j["episodes"] = a.episodes;
  j["user_episodes"] = a.user_episodes;
  j["identification_rate"] = a.identification_rate;
  j["energy_joules"] = summary(a.energy_joules);
  j["pilots"] = summary(a.pilots);
  j["feedback_rounds"] = summary(a.feedback_rounds);
  j["task_accuracy"] = summary(a.task_accuracy);
  j["promotions"] = a.promotions;
  return j;
}

Json manifest_to_json(const RunManifest& m) {
  Json j;
  j["config_digest"] = m.config_digest;
  j["seeds"] = m.seeds;
  j["artifacts"] = m.artifacts;
  j["tool_version"] = m.tool_version;
  j["timestamp"] = m.timestamp ? Json(*m.timestamp) : Json(nullptr);
  return j;
}

Json summary_document(const ExperimentTable& table, const EpisodeConfig& config, const RunManifest& manifest) {
  Json j;
  j["manifest"] = manifest_to_json(manifest);
  j["aggregate"] = aggregate_to_json(table.aggregate);
  j["config"] = config_to_json(config);
  return j;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  f << text;
  f.flush();
  if (!f) throw IoError("write to '" + path.string() + "' failed");
}

RunManifest write_metrics(const ExperimentTable& table, const EpisodeConfig& config,
                          std::span<const std::uint64_t> seeds, const std::filesystem::path& dir,
                          WriteOptions options) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());

  RunManifest m;
  m.config_digest = config_digest(config);
  m.seeds.assign(seeds.begin(), seeds.end());
  m.tool_version = MODNET_VERSION;
  m.timestamp = options.timestamp;
  m.artifacts = {"metrics.csv", "summary.json"};

  std::ostringstream csv;
  write_metrics_csv(csv, config, table.rows);
  write_file(dir / "metrics.csv", csv.str());

  bool any_trace = false;
  for (const auto& r : table.rows) any_trace = any_trace || !r.trace.empty();
  if (any_trace) {
    std::ostringstream trace;
    write_trace_csv(trace, config, table.rows);
    write_file(dir / "trace.csv", trace.str());
    m.artifacts.push_back("trace.csv");
  }
  m.artifacts.insert(m.artifacts.end(), options.extra_artifacts.begin(), options.extra_artifacts.end());

  write_file(dir / "summary.json", summary_document(table, config, m).dump(2) + "\n");
  return m;
}

std::vector<AccuracyRow> probe_accuracy(const EpisodeConfig& config, std::uint64_t tasks) {
  std::vector<AccuracyRow> rows;
  const auto oracles = config.make_oracles();
  for (std::size_t m = 0; m < oracles.size(); ++m) {
    for (std::uint32_t c = 0; c < config.scenario.contexts.size(); ++c) {
      Rng rng(stream_seed(config.seed, kProbeStream, m, c));
      AccuracyRow row;
      row.model = config.scenario.models[m].name;
      row.context = config.scenario.contexts[c];
      row.configured = config.scenario.models[m].fit[c];
      row.tasks = tasks;
      row.successes = offload_tasks(oracles[m], Context{c}, tasks, rng);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void write_accuracy_csv(std::ostream& out, std::span<const AccuracyRow> rows) {
  out << "model,context,configured_accuracy,tasks,successes,accuracy\n";
  for (const auto& r : rows) {
    const double acc = r.tasks ? static_cast<double>(r.successes) / static_cast<double>(r.tasks) : 0.0;
    out << r.model << ',' << r.context << ',' << format_number(r.configured) << ',' << r.tasks << ','
        << r.successes << ',' << format_number(acc) << '\n';
  }
}

}  // namespace modnet
