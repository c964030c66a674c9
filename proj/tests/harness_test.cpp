#include <gtest/gtest.h>

#include <unistd.h>

#include <algorithm>
#include <charconv>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "modnet/config.hpp"
#include "modnet/errors.hpp"
#include "modnet/metrics_io.hpp"
#include "modnet/sweep.hpp"

using namespace modnet;
namespace fs = std::filesystem;

namespace {

std::string config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("modnet_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(ParseConfig, DefaultsFromScenarioOnly) {
  const auto c = parse_config(R"({"seed": 7, "scenario": "fig3"})");
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.radio.params, RadioParams{});
  EXPECT_EQ(c.radio.params.pilot_bits, 1e5);
  EXPECT_EQ(c.radio.params.feedback_time_s, 0.01);
  EXPECT_EQ(c.users, 1u);
  EXPECT_EQ(c.servers, 1u);
  EXPECT_EQ(c.policy.batch_size, 25u);
  EXPECT_EQ(c.policy.kind, PolicyKind::batched_elimination);
  EXPECT_EQ(c.scenario.contexts.size(), 3u);
  EXPECT_EQ(c.scenario.transition[0][0], 0.95);
  EXPECT_EQ(c.scenario.models[0].fit, (std::vector<double>{0.98, 0.70, 0.90}));
}

TEST(ParseConfig, EmptyScenarioNamesMissingField) {
  const auto msg = config_error(R"({"scenario": {}})");
  EXPECT_NE(msg.find("scenario.contexts"), std::string::npos) << msg;
  EXPECT_NE(msg.find("missing"), std::string::npos) << msg;
  EXPECT_NE(config_error(R"({"seed": 1})").find("scenario"), std::string::npos);
}

TEST(ParseConfig, TransitionRowToleranceCited) {
  const auto msg = config_error(R"({"scenario": {"contexts": ["a", "b"],
    "models": [{"id": "m", "fit": {"a": 0.5, "b": 0.5}}],
    "transition": [[0.5, 0.49], [0.5, 0.5]]}})");
  EXPECT_NE(msg.find("scenario.transition[0]"), std::string::npos) << msg;
  EXPECT_NE(msg.find("1e-9"), std::string::npos) << msg;
}

TEST(ParseConfig, SyntaxErrorHasLineNumber) {
  const auto msg = config_error("{\n  \"seed\": 1,\n  \"scenario\": \"fig3\",,\n}");
  EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
}

TEST(ParseConfig, UnknownKeySuggestsSpelling) {
  const auto msg = config_error(R"({"scenario": "fig3", "radio": {"bandwith_hz": 2e6}})");
  EXPECT_NE(msg.find("radio.bandwith_hz"), std::string::npos) << msg;
  EXPECT_NE(msg.find("did you mean 'bandwidth_hz'"), std::string::npos) << msg;
  const auto top = config_error(R"({"scenaro": "fig3"})");
  EXPECT_NE(top.find("did you mean 'scenario'"), std::string::npos) << top;
}

TEST(ParseConfig, InvariantViolationsNameTheField) {
  EXPECT_NE(config_error(R"({"scenario": "fig3", "policy": {"epsilon": 1.5}})").find("policy.epsilon"),
            std::string::npos);
  EXPECT_NE(config_error(R"({"scenario": "fig3", "radio": {"pilot_bits": -1}})").find("radio.pilot_bits"),
            std::string::npos);
  EXPECT_NE(config_error(R"({"scenario": {"builtin": "fig3", "initial_context": "dusk"}})").find("dusk"),
            std::string::npos);
  EXPECT_NE(config_error(R"({"scenario": "fig3", "policy": {"kind": "greedy"}})").find("greedy"),
            std::string::npos);
  EXPECT_NE(config_error(R"({"scenario": "fig3", "users": 2, "radio": {"user_gain_scale": [1]}})")
                .find("radio.user_gain_scale"),
            std::string::npos);
  EXPECT_NE(config_error(R"({"scenario": "fig4"})").find("did you mean 'fig3'"), std::string::npos);
}

TEST(ParseConfig, RoundTrip) {
  std::mt19937_64 g(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const auto& b : builtin_scenarios()) {
    auto c = parse_config(R"({"scenario": ")" + b.name + R"("})");
    for (int rep = 0; rep < 20; ++rep) {
      c.seed = g();
      c.policy.epsilon = 0.001 + 0.9 * u(g);
      c.radio.params.noise_power_w = u(g) * 1e-6 + 1e-12;
      c.radio.mean_gains.assign(c.servers, 0.1 + u(g));
      for (auto& m : c.scenario.models) {
        for (auto& p : m.fit) p = u(g);
      }
      c.cooperation.enabled = rep % 2 == 0;
      c.mode = rep % 3 == 0 ? TransmissionMode::broadcast : TransmissionMode::adaptive;
      if (rep % 4 == 0) {
        c.scenario.training.enabled = true;
        c.scenario.training.target.assign(c.scenario.contexts.size(), u(g));
        c.scenario.training.params.rate = 0.01 + 0.9 * u(g);
      }
      c.validate();
      EXPECT_EQ(parse_config(serialize_config(c)), c);
    }
  }
}

TEST(WithParameter, SetsDottedPath) {
  const auto c = parse_config(R"({"scenario": "fig3"})");
  EXPECT_EQ(with_parameter(c, "policy.epsilon", 0.01).policy.epsilon, 0.01);
  EXPECT_EQ(with_parameter(c, "radio.mean_gains.0", 0.5).radio.mean_gains[0], 0.5);
  EXPECT_EQ(with_parameter(c, "mode", "broadcast").mode, TransmissionMode::broadcast);
  EXPECT_THROW(with_parameter(c, "policy.epsilom", 0.01), ConfigError);
  EXPECT_THROW(with_parameter(c, "policy.epsilon", 2.0), ConfigError);
}

TEST(FormatNumber, RoundTripsExactly) {
  std::mt19937_64 g(3);
  for (int i = 0; i < 20000; ++i) {
    double v;
    const std::uint64_t bits = g();
    std::memcpy(&v, &bits, sizeof v);
    if (!std::isfinite(v)) continue;
    const auto s = format_number(v);
    double back = 0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    EXPECT_EQ(back, v) << s;
    EXPECT_EQ(s.find(','), std::string::npos);
  }
  EXPECT_EQ(format_number(0.1), "0.1");
}

TEST(WriteMetrics, HeaderOnlyForEmptyTable) {
  const auto c = parse_config(R"({"scenario": "fig3"})");
  std::ostringstream out;
  write_metrics_csv(out, c, {});
  EXPECT_EQ(out.str(), "seed,users,feedback_rounds,chosen_model,true_best,identified_best,pilots_sent,user_rounds,"
                       "energy_joules,task_accuracy,dominant_context,elimination_timeline,total_pilots,"
                       "total_energy_joules,promotions\n");
}

TEST(WriteMetrics, RowCountDigestAndManifest) {
  const auto c = parse_config(R"({"scenario": "fig3-daytime", "radio": {"pilot_bits": 1000}})");
  const auto seeds = seed_range(1, 2000);
  const auto table = run_experiment(c, seeds, {true, 0});
  const auto d1 = scratch("a"), d2 = scratch("b");
  const auto m1 = write_metrics(table, c, seeds, d1);
  write_metrics(run_experiment(c, seeds, {true, 0}), c, seeds, d2);

  const auto csv = slurp(d1 / "metrics.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2001);
  for (const char* f : {"metrics.csv", "summary.json", "trace.csv"}) EXPECT_EQ(slurp(d1 / f), slurp(d2 / f)) << f;

  const auto summary = Json::parse(slurp(d1 / "summary.json"));
  EXPECT_EQ(summary["manifest"]["config_digest"], m1.config_digest);
  EXPECT_EQ(config_digest(config_from_json(summary["config"])), m1.config_digest);
  EXPECT_EQ(summary["manifest"]["seeds"].size(), 2000u);
  EXPECT_TRUE(summary["manifest"]["timestamp"].is_null());
  EXPECT_EQ(summary["aggregate"]["identification_rate"].get<double>(), table.aggregate.identification_rate);
  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST(WriteMetrics, UnwritableDestinationIsIoError) {
  const auto c = parse_config(R"({"scenario": "fig3-daytime", "radio": {"pilot_bits": 1000}})");
  const auto seeds = seed_range(1, 2);
  const auto table = run_experiment(c, seeds);
  const auto blocker = scratch("blocker");
  { std::ofstream(blocker) << "x"; }
  EXPECT_THROW(write_metrics(table, c, seeds, blocker / "sub"), IoError);
  fs::remove_all(blocker);
}

TEST(ProbeAccuracy, OneRowPerModelAndContext) {
  const auto c = parse_config(R"({"scenario": "fig3"})");
  const auto rows = probe_accuracy(c, 100);
  EXPECT_EQ(rows.size(), 12u);
  std::ostringstream out;
  write_accuracy_csv(out, rows);
  const auto s = out.str();
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 13);
}

TEST(Sweep, OneRowPerValueAndPolicy) {
  const auto c = parse_config(R"({"scenario": "fig3-daytime", "radio": {"pilot_bits": 1000}})");
  const std::vector<Json> values{0.2, 0.05};
  const std::vector<PolicyKind> kinds{PolicyKind::batched_elimination, PolicyKind::uniform_fixed};
  const auto rows = run_sweep(c, "policy.epsilon", values, kinds, seed_range(1, 20));
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[3].policy, PolicyKind::uniform_fixed);
  std::ostringstream out;
  write_sweep_csv(out, rows);
  EXPECT_NE(out.str().find("policy.epsilon,0.05,uniform-fixed,20,"), std::string::npos) << out.str();
}
