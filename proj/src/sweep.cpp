#include "modnet/sweep.hpp"

#include "modnet/errors.hpp"
#include "modnet/metrics_io.hpp"

namespace modnet {

std::vector<SweepRow> run_sweep(const EpisodeConfig& config, std::string_view parameter,
                                std::span<const Json> values, std::span<const PolicyKind> policies,
                                std::span<const std::uint64_t> seeds, ExperimentOptions options) {
  if (values.empty()) throw ParameterError("sweep: no values given");
  if (policies.empty()) throw ParameterError("sweep: no policies given");
  options.trace_first = false;
  std::vector<SweepRow> rows;
  for (const auto& v : values) {
    const EpisodeConfig base = with_parameter(config, parameter, v);
    for (auto kind : policies) {
      EpisodeConfig cfg = base;
      cfg.policy.kind = kind;
      auto table = run_experiment(cfg, seeds, options);
      rows.push_back({std::string(parameter), v, kind, table.aggregate});
    }
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << "parameter,value,policy,episodes,identification_rate,mean_pilots,sd_pilots,mean_energy_joules,"
         "sd_energy_joules,mean_feedback_rounds,mean_task_accuracy\n";
  for (const auto& r : rows) {
    const auto& a = r.aggregate;
    const std::string value = r.value.is_number_float() ? format_number(r.value.get<double>())
                              : r.value.is_string()    ? r.value.get<std::string>()
                                                       : r.value.dump();
    out << r.parameter << ',' << value << ',' << to_string(r.policy) << ',' << a.episodes << ','
        << format_number(a.identification_rate) << ',' << format_number(a.pilots.mean) << ','
        << format_number(a.pilots.stddev) << ',' << format_number(a.energy_joules.mean) << ','
        << format_number(a.energy_joules.stddev) << ',' << format_number(a.feedback_rounds.mean) << ','
        << format_number(a.task_accuracy.mean) << '\n';
  }
}

}  // namespace modnet
