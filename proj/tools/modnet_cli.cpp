#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "modnet/config.hpp"
#include "modnet/errors.hpp"
#include "modnet/experiment.hpp"
#include "modnet/metrics_io.hpp"
#include "modnet/sweep.hpp"

namespace fs = std::filesystem;
using namespace modnet;

namespace {

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct SeedArgs {
  std::uint64_t count = 1;
  std::vector<std::uint64_t> list;

  std::vector<std::uint64_t> resolve(const EpisodeConfig& c) const {
    if (!list.empty()) return list;
    if (count == 0) throw ParameterError("--seeds must be at least 1");
    return seed_range(c.seed, count);
  }
};

void add_seed_flags(CLI::App* cmd, SeedArgs& s) {
  auto* n = cmd->add_option("--seeds", s.count, "number of seeds, counting up from the config seed");
  auto* l = cmd->add_option("--seed-list", s.list, "explicit seeds")->delimiter(',');
  n->excludes(l);
}

EpisodeConfig load(const std::string& path, const std::string& policy) {
  EpisodeConfig c = parse_config(read_text(path));
  if (!policy.empty()) c.policy.kind = policy_kind_from_string(policy);
  return c;
}

std::optional<std::string> timestamp_option(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) return std::string(epoch);
  return std::nullopt;
}

Json parse_value(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error&) {
    return Json(text);
  }
}

void print_aggregate(const ExperimentAggregate& a) {
  std::cout << "episodes            " << a.episodes << "\n"
            << "identification_rate " << format_number(a.identification_rate) << "\n"
            << "mean_pilots         " << format_number(a.pilots.mean) << "\n"
            << "mean_energy_joules  " << format_number(a.energy_joules.mean) << "\n"
            << "mean_feedback       " << format_number(a.feedback_rounds.mean) << "\n"
            << "mean_task_accuracy  " << format_number(a.task_accuracy.mean) << "\n"
            << "promotions          " << a.promotions << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MoDNet edge model-selection simulator"};
  app.set_version_flag("--version", std::string(MODNET_VERSION));
  app.require_subcommand(1);

  std::string config_path, policy, out_dir = "out", timestamp;
  bool quiet = false;
  int threads = 0;
  SeedArgs seeds;

  auto* run = app.add_subcommand("run", "run an experiment and write metrics");
  run->add_option("--config", config_path, "configuration file")->required();
  add_seed_flags(run, seeds);
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--policy", policy, "override policy.kind");
  run->add_option("--threads", threads, "worker threads (0 = all)");
  std::uint64_t probe_tasks = 0;
  run->add_option("--probe-tasks", probe_tasks, "also write accuracy.csv with this many offloads per model and context");
  bool trace = false;
  run->add_flag("--trace", trace, "write trace.csv for the first seed");
  run->add_option("--timestamp", timestamp, "timestamp recorded in the manifest");
  run->add_flag("--quiet", quiet, "print nothing on success");

  auto* validate = app.add_subcommand("validate", "parse and check a configuration");
  validate->add_option("--config", config_path, "configuration file")->required();
  validate->add_option("--policy", policy, "override policy.kind");
  bool print_resolved = false;
  validate->add_flag("--print", print_resolved, "print the resolved configuration");
  validate->add_flag("--quiet", quiet, "print nothing on success");

  auto* scenarios = app.add_subcommand("scenarios", "list built-in scenarios");
  std::string show;
  scenarios->add_option("--show", show, "print one scenario section as JSON");

  auto* sweep = app.add_subcommand("sweep", "vary one parameter and compare policies");
  sweep->add_option("--config", config_path, "configuration file")->required();
  std::string param;
  std::vector<std::string> values, policies;
  sweep->add_option("--param", param, "dotted config path, e.g. policy.epsilon")->required();
  sweep->add_option("--values", values, "comma-separated values")->required()->delimiter(',');
  sweep->add_option("--policies", policies, "comma-separated policy kinds (default: the config's)")->delimiter(',');
  add_seed_flags(sweep, seeds);
  sweep->add_option("--out", out_dir, "output directory");
  sweep->add_option("--policy", policy, "override policy.kind");
  sweep->add_option("--threads", threads, "worker threads (0 = all)");
  sweep->add_option("--timestamp", timestamp, "timestamp recorded in the manifest");
  sweep->add_flag("--quiet", quiet, "print nothing on success");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      const EpisodeConfig cfg = load(config_path, policy);
      const auto seed_list = seeds.resolve(cfg);
      const auto table = run_experiment(cfg, seed_list, ExperimentOptions{trace, threads});
      WriteOptions wo{timestamp_option(timestamp), {}};
      if (probe_tasks > 0) {
        std::error_code dir_ec;
        fs::create_directories(out_dir, dir_ec);
        if (dir_ec) throw IoError("cannot create output directory '" + out_dir + "': " + dir_ec.message());
        std::ostringstream acc;
        const auto rows = probe_accuracy(cfg, probe_tasks);
        write_accuracy_csv(acc, rows);
        write_file(fs::path(out_dir) / "accuracy.csv", acc.str());
        wo.extra_artifacts.push_back("accuracy.csv");
      }
      const auto manifest = write_metrics(table, cfg, seed_list, out_dir, wo);
      if (!quiet) {
        print_aggregate(table.aggregate);
        std::cout << "config_digest       " << manifest.config_digest << "\n"
                  << "wrote               " << out_dir << "\n";
      }
    } else if (validate->parsed()) {
      const EpisodeConfig cfg = load(config_path, policy);
      if (print_resolved) {
        std::cout << serialize_config(cfg);
      } else if (!quiet) {
        std::cout << "ok " << config_digest(cfg) << "\n";
      }
    } else if (scenarios->parsed()) {
      if (!show.empty()) {
        std::cout << builtin_scenario(show).scenario.dump(2) << "\n";
      } else {
        for (const auto& s : builtin_scenarios()) std::cout << s.name << "\t" << s.description << "\n";
      }
    } else if (sweep->parsed()) {
      const EpisodeConfig cfg = load(config_path, policy);
      const auto seed_list = seeds.resolve(cfg);
      std::vector<Json> vals;
      for (const auto& v : values) vals.push_back(parse_value(v));
      std::vector<PolicyKind> kinds;
      for (const auto& p : policies) kinds.push_back(policy_kind_from_string(p));
      if (kinds.empty()) kinds.push_back(cfg.policy.kind);
      const auto rows = run_sweep(cfg, param, vals, kinds, seed_list, ExperimentOptions{false, threads});

      std::error_code ec;
      fs::create_directories(out_dir, ec);
      if (ec) throw IoError("cannot create output directory '" + out_dir + "': " + ec.message());
      std::ostringstream csv;
      write_sweep_csv(csv, rows);
      write_file(fs::path(out_dir) / "sweep.csv", csv.str());

      RunManifest m{config_digest(cfg), seed_list, {"sweep.csv", "sweep.json"}, MODNET_VERSION,
                    timestamp_option(timestamp)};
      Json doc;
      doc["manifest"] = manifest_to_json(m);
      doc["parameter"] = param;
      doc["values"] = vals;
      doc["config"] = config_to_json(cfg);
      write_file(fs::path(out_dir) / "sweep.json", doc.dump(2) + "\n");
      if (!quiet) std::cout << csv.str();
    }
  } catch (const Error& e) {
    std::cerr << "modnet: " << category_name(e.category()) << " error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "modnet: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
