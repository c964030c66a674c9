#include <string>

#include "modnet/config.hpp"
#include "modnet/errors.hpp"

namespace modnet {

namespace {

Json model(const char* id, unsigned server, Json fit) {
  return Json{{"id", id}, {"server", server}, {"fit", std::move(fit)}};
}

std::vector<BuiltinScenario> make_builtins() {
  std::vector<BuiltinScenario> out;

  // Accuracies read from the object-detection bars. The general-context values
  // of the tiny models and the off-context values of the specialists are
  // placeholders; override them in a config if better numbers are known.
  Json fig3;
  fig3["contexts"] = {"general", "daytime", "nighttime"};
  fig3["models"] = {
      model("full-universal", 0, {{"general", 0.98}, {"daytime", 0.70}, {"nighttime", 0.90}}),
      model("tiny-universal", 0, {{"general", 0.90}, {"daytime", 0.25}, {"nighttime", 0.50}}),
      model("tiny-daytime", 0, {{"general", 0.90}, {"daytime", 0.80}, {"nighttime", 0.50}}),
      model("tiny-nighttime", 0, {{"general", 0.90}, {"daytime", 0.50}, {"nighttime", 0.95}}),
  };
  fig3["self_transition"] = 0.95;
  out.push_back({"fig3", "four detectors in general, daytime and nighttime contexts", fig3});

  Json day;
  day["contexts"] = {"daytime"};
  day["models"] = {
      model("full-universal", 0, {{"daytime", 0.70}}),
      model("tiny-universal", 0, {{"daytime", 0.25}}),
      model("tiny-daytime", 0, {{"daytime", 0.80}}),
  };
  day["self_transition"] = 1.0;
  out.push_back({"fig3-daytime", "the three detectors usable in sunlight, daytime only", day});

  Json day5 = day;
  day5["models"].push_back(model("distractor-a", 0, {{"daytime", 0.90}}));
  day5["models"].push_back(model("distractor-b", 0, {{"daytime", 0.95}}));
  out.push_back({"fig3-daytime-5arm", "daytime detectors plus two stronger distractors", day5});

  Json two;
  two["contexts"] = {"general"};
  two["models"] = {
      model("near-a", 0, {{"general", 0.90}}),
      model("near-b", 0, {{"general", 0.70}}),
      model("far-a", 1, {{"general", 0.50}}),
      model("far-b", 1, {{"general", 0.30}}),
  };
  two["self_transition"] = 1.0;
  out.push_back({"two-server", "strong models on server 0, weak models on server 1", two});

  Json coop;
  coop["contexts"] = {"general"};
  coop["models"] = {
      model("m-a", 0, {{"general", 0.30}}), model("m-b", 0, {{"general", 0.45}}),
      model("m-c", 0, {{"general", 0.60}}), model("m-d", 0, {{"general", 0.75}}),
      model("m-e", 0, {{"general", 0.90}}),
  };
  coop["self_transition"] = 1.0;
  out.push_back({"coop-pair", "five evenly spaced models for users with identical preferences", coop});

  return out;
}

}  // namespace

const std::vector<BuiltinScenario>& builtin_scenarios() {
  static const std::vector<BuiltinScenario> all = make_builtins();
  return all;
}

const BuiltinScenario& builtin_scenario(std::string_view name) {
  std::vector<std::string> names;
  for (const auto& s : builtin_scenarios()) {
    if (s.name == name) return s;
    names.push_back(s.name);
  }
  std::string msg = "unknown built-in scenario '" + std::string(name) + "'";
  const auto hint = suggest(name, names);
  if (!hint.empty()) msg += "; did you mean '" + hint + "'?";
  throw ConfigError(msg);
}

}  // namespace modnet
