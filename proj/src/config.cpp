#include "modnet/config.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "modnet/errors.hpp"

namespace modnet {

namespace {

std::string join_path(const std::string& base, std::string_view key) {
  return base.empty() ? std::string(key) : base + "." + std::string(key);
}

std::string index_path(const std::string& base, std::size_t i) {
  return base + "[" + std::to_string(i) + "]";
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> prev(b.size() + 1);
  std::vector<std::size_t> cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

/// Typed access to one JSON object; rejects keys outside `allowed`.
class Section {
 public:
  Section(const Json& obj, std::string path, std::vector<std::string> allowed)
      : obj_(obj), path_(std::move(path)), allowed_(std::move(allowed)) {
    if (!obj_.is_object()) throw ConfigError(label() + ": expected an object");
    for (const auto& [key, value] : obj_.items()) {
      if (std::find(allowed_.begin(), allowed_.end(), key) != allowed_.end()) continue;
      std::string msg = "unknown key '" + join_path(path_, key) + "'";
      const std::string hint = suggest(key, allowed_);
      if (!hint.empty()) msg += "; did you mean '" + hint + "'?";
      throw ConfigError(msg);
    }
  }

  bool has(std::string_view key) const { return obj_.contains(key); }
  const Json& at(std::string_view key) const {
    if (!has(key)) throw ConfigError(field(key) + ": missing required field");
    return obj_.at(std::string(key));
  }
  std::string field(std::string_view key) const { return join_path(path_, key); }

  double number(std::string_view key, double fallback) const {
    return has(key) ? number(key) : fallback;
  }
  double number(std::string_view key) const {
    const Json& v = at(key);
    if (!v.is_number()) throw ConfigError(field(key) + ": expected a number");
    return v.get<double>();
  }

  std::uint64_t u64(std::string_view key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const Json& v = at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
    throw ConfigError(field(key) + ": expected a nonnegative integer");
  }

  std::uint32_t count(std::string_view key, std::uint32_t fallback) const {
    const std::uint64_t v = u64(key, fallback);
    if (v > std::numeric_limits<std::uint32_t>::max()) throw ConfigError(field(key) + ": value too large");
    return static_cast<std::uint32_t>(v);
  }

  bool boolean(std::string_view key, bool fallback) const {
    if (!has(key)) return fallback;
    const Json& v = at(key);
    if (!v.is_boolean()) throw ConfigError(field(key) + ": expected true or false");
    return v.get<bool>();
  }

  std::string string(std::string_view key, std::string fallback) const {
    if (!has(key)) return fallback;
    const Json& v = at(key);
    if (!v.is_string()) throw ConfigError(field(key) + ": expected a string");
    return v.get<std::string>();
  }

  const std::string& path() const { return path_; }

 private:
  std::string label() const { return path_.empty() ? "configuration" : path_; }

  const Json& obj_;
  std::string path_;
  std::vector<std::string> allowed_;
};

std::vector<double> number_list(const Json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError(path + ": expected a list of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ConfigError(index_path(path, i) + ": expected a number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

std::uint32_t context_index(const std::vector<std::string>& contexts, const Json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError(path + ": expected a context label");
  const auto name = v.get<std::string>();
  auto it = std::find(contexts.begin(), contexts.end(), name);
  if (it == contexts.end()) {
    std::string msg = path + ": unknown context '" + name + "'";
    const auto hint = suggest(name, contexts);
    if (!hint.empty()) msg += "; did you mean '" + hint + "'?";
    throw ConfigError(msg);
  }
  return static_cast<std::uint32_t>(it - contexts.begin());
}

/// Reads a {context: probability} object covering every context.
std::vector<double> per_context(const std::vector<std::string>& contexts, const Json& v, const std::string& path) {
  if (!v.is_object()) throw ConfigError(path + ": expected an object keyed by context");
  Section sec(v, path, contexts);
  std::vector<double> out;
  for (const auto& c : contexts) out.push_back(sec.number(c));
  return out;
}

Json resolve_scenario_section(const Json& raw) {
  if (raw.is_string()) return builtin_scenario(raw.get<std::string>()).scenario;
  if (raw.is_object() && raw.contains("builtin")) {
    const auto& name = raw.at("builtin");
    if (!name.is_string()) throw ConfigError("scenario.builtin: expected a scenario name");
    Json merged = builtin_scenario(name.get<std::string>()).scenario;
    for (const auto& [k, v] : raw.items()) {
      if (k != "builtin") merged[k] = v;
    }
    return merged;
  }
  return raw;
}

ScenarioConfig read_scenario(const Json& raw, std::uint32_t users) {
  const Json doc = resolve_scenario_section(raw);
  Section sec(doc, "scenario",
              {"builtin", "contexts", "models", "transition", "self_transition", "initial_context", "training"});
  ScenarioConfig sc;

  const Json& ctx = sec.at("contexts");
  if (!ctx.is_array() || ctx.empty()) throw ConfigError("scenario.contexts: expected a nonempty list of labels");
  for (std::size_t i = 0; i < ctx.size(); ++i) {
    if (!ctx[i].is_string()) throw ConfigError(index_path("scenario.contexts", i) + ": expected a label");
    sc.contexts.push_back(ctx[i].get<std::string>());
  }

  const Json& models = sec.at("models");
  if (!models.is_array() || models.empty()) throw ConfigError("scenario.models: expected a nonempty list");
  for (std::size_t i = 0; i < models.size(); ++i) {
    const std::string p = index_path("scenario.models", i);
    Section m(models[i], p, {"id", "server", "fit"});
    ModelSpec spec;
    spec.name = m.string("id", "");
    if (spec.name.empty()) throw ConfigError(m.field("id") + ": missing required field");
    spec.server = ServerId{m.count("server", 0)};
    spec.fit = per_context(sc.contexts, m.at("fit"), m.field("fit"));
    sc.models.push_back(std::move(spec));
  }

  if (sec.has("transition") && sec.has("self_transition")) {
    throw ConfigError("scenario: give either transition or self_transition, not both");
  }
  if (sec.has("transition")) {
    const Json& t = sec.at("transition");
    if (!t.is_array()) throw ConfigError("scenario.transition: expected a matrix");
    for (std::size_t i = 0; i < t.size(); ++i) sc.transition.push_back(number_list(t[i], index_path("scenario.transition", i)));
  } else {
    const double self = sec.number("self_transition", 0.95);
    try {
      sc.transition = sticky_transition(sc.contexts.size(), self);
    } catch (const ParameterError& e) {
      throw ConfigError(std::string("scenario.self_transition: ") + e.what());
    }
  }

  if (sec.has("initial_context")) {
    const Json& ic = sec.at("initial_context");
    if (ic.is_array()) {
      for (std::size_t u = 0; u < ic.size(); ++u) {
        sc.initial_contexts.push_back(context_index(sc.contexts, ic[u], index_path("scenario.initial_context", u)));
      }
    } else {
      sc.initial_contexts.assign(users, context_index(sc.contexts, ic, "scenario.initial_context"));
    }
  } else {
    sc.initial_contexts.assign(users, 0);
  }

  if (sec.has("training")) {
    Section tr(sec.at("training"), "scenario.training", {"enabled", "rate", "pilot_unit", "promotion_margin", "target"});
    sc.training.enabled = tr.boolean("enabled", true);
    sc.training.params.rate = tr.number("rate", sc.training.params.rate);
    sc.training.params.pilot_unit = tr.count("pilot_unit", sc.training.params.pilot_unit);
    sc.training.params.promotion_margin = tr.number("promotion_margin", sc.training.params.promotion_margin);
    if (tr.has("target")) {
      sc.training.target = per_context(sc.contexts, tr.at("target"), tr.field("target"));
    } else if (sc.training.enabled) {
      throw ConfigError("scenario.training.target: missing required field");
    }
  }
  return sc;
}

}  // namespace

std::string suggest(std::string_view word, const std::vector<std::string>& candidates) {
  std::string best;
  std::size_t best_d = std::numeric_limits<std::size_t>::max();
  for (const auto& c : candidates) {
    const auto d = edit_distance(word, c);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  // only suggest when the typo is small relative to the word
  if (best_d > std::max<std::size_t>(2, word.size() / 3)) return {};
  return best;
}

EpisodeConfig config_from_json(const Json& doc) {
  Section top(doc, "", {"seed", "users", "servers", "mode", "task_count", "scenario", "radio", "policy", "scheduling",
                        "cooperation"});
  EpisodeConfig c;
  c.seed = top.u64("seed", c.seed);
  c.users = top.count("users", c.users);
  c.task_count = top.count("task_count", c.task_count);
  c.mode = transmission_mode_from_string(top.string("mode", std::string(to_string(c.mode))));
  c.scenario = read_scenario(top.at("scenario"), c.users);

  std::uint32_t needed_servers = 1;
  for (const auto& m : c.scenario.models) needed_servers = std::max(needed_servers, m.server.value + 1);
  c.servers = top.count("servers", needed_servers);

  c.radio.mean_gains.assign(c.servers, 1.0);
  c.radio.user_gain_scale.assign(c.users, 1.0);
  if (top.has("radio")) {
    Section r(top.at("radio"), "radio",
              {"bandwidth_hz", "noise_power_w", "tx_power_w", "pilot_bits", "feedback_time_s", "time_budget_s",
               "mean_gains", "user_gain_scale"});
    auto& p = c.radio.params;
    p.bandwidth_hz = r.number("bandwidth_hz", p.bandwidth_hz);
    p.noise_power_w = r.number("noise_power_w", p.noise_power_w);
    p.tx_power_w = r.number("tx_power_w", p.tx_power_w);
    p.pilot_bits = r.number("pilot_bits", p.pilot_bits);
    p.feedback_time_s = r.number("feedback_time_s", p.feedback_time_s);
    p.time_budget_s = r.number("time_budget_s", p.time_budget_s);
    if (r.has("mean_gains")) c.radio.mean_gains = number_list(r.at("mean_gains"), "radio.mean_gains");
    if (r.has("user_gain_scale")) c.radio.user_gain_scale = number_list(r.at("user_gain_scale"), "radio.user_gain_scale");
  }

  if (top.has("policy")) {
    Section p(top.at("policy"), "policy",
              {"kind", "batch_size", "epsilon", "max_rounds", "pilot_budget", "explore_rounds", "uniform_rounds"});
    c.policy.kind = policy_kind_from_string(p.string("kind", std::string(to_string(c.policy.kind))));
    c.policy.batch_size = p.count("batch_size", c.policy.batch_size);
    c.policy.epsilon = p.number("epsilon", c.policy.epsilon);
    c.policy.limits.max_rounds = p.count("max_rounds", c.policy.limits.max_rounds);
    c.policy.limits.pilot_budget = p.u64("pilot_budget", c.policy.limits.pilot_budget);
    c.policy.limits.explore_rounds = p.count("explore_rounds", c.policy.limits.explore_rounds);
    c.policy.limits.uniform_rounds = p.count("uniform_rounds", c.policy.limits.max_rounds);
  } else {
    c.policy.limits.uniform_rounds = c.policy.limits.max_rounds;
  }

  c.scheduling.slots = c.users;
  if (top.has("scheduling")) {
    Section s(top.at("scheduling"), "scheduling", {"mode", "slots", "alpha", "beta"});
    c.scheduling.mode = scheduling_mode_from_string(s.string("mode", std::string(to_string(c.scheduling.mode))));
    c.scheduling.slots = s.count("slots", c.users);
    c.scheduling.weights.alpha = s.number("alpha", c.scheduling.weights.alpha);
    c.scheduling.weights.beta = s.number("beta", c.scheduling.weights.beta);
  }

  if (top.has("cooperation")) {
    Section s(top.at("cooperation"), "cooperation", {"enabled", "min_overlap", "neighbors", "pioneers"});
    c.cooperation.enabled = s.boolean("enabled", true);
    c.cooperation.min_overlap = s.count("min_overlap", c.cooperation.min_overlap);
    c.cooperation.neighbors = s.count("neighbors", c.cooperation.neighbors);
    c.cooperation.pioneers = s.count("pioneers", c.cooperation.pioneers);
  }

  c.validate();
  return c;
}

EpisodeConfig parse_config(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end(), nullptr, true, true);
  } catch (const Json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    const std::size_t line = 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + upto, '\n'));
    throw ConfigError("syntax error at line " + std::to_string(line) + ": " + e.what());
  }
  return config_from_json(doc);
}

Json config_to_json(const EpisodeConfig& c) {
  const auto& sc = c.scenario;
  Json scen;
  scen["contexts"] = sc.contexts;
  Json models = Json::array();
  for (const auto& m : sc.models) {
    Json fit = Json::object();
    for (std::size_t i = 0; i < sc.contexts.size(); ++i) fit[sc.contexts[i]] = m.fit[i];
    models.push_back(Json{{"id", m.name}, {"server", m.server.value}, {"fit", fit}});
  }
  scen["models"] = models;
  scen["transition"] = sc.transition;
  Json init = Json::array();
  for (auto i : sc.initial_contexts) init.push_back(sc.contexts[i]);
  scen["initial_context"] = init;
  Json tr;
  tr["enabled"] = sc.training.enabled;
  tr["rate"] = sc.training.params.rate;
  tr["pilot_unit"] = sc.training.params.pilot_unit;
  tr["promotion_margin"] = sc.training.params.promotion_margin;
  if (!sc.training.target.empty()) {
    Json target = Json::object();
    for (std::size_t i = 0; i < sc.training.target.size(); ++i) target[sc.contexts[i]] = sc.training.target[i];
    tr["target"] = target;
  }
  scen["training"] = tr;

  const auto& rp = c.radio.params;
  Json radio{{"bandwidth_hz", rp.bandwidth_hz},       {"noise_power_w", rp.noise_power_w},
             {"tx_power_w", rp.tx_power_w},           {"pilot_bits", rp.pilot_bits},
             {"feedback_time_s", rp.feedback_time_s}, {"time_budget_s", rp.time_budget_s},
             {"mean_gains", c.radio.mean_gains},      {"user_gain_scale", c.radio.user_gain_scale}};

  Json policy{{"kind", std::string(to_string(c.policy.kind))},
              {"batch_size", c.policy.batch_size},
              {"epsilon", c.policy.epsilon},
              {"max_rounds", c.policy.limits.max_rounds},
              {"pilot_budget", c.policy.limits.pilot_budget},
              {"explore_rounds", c.policy.limits.explore_rounds},
              {"uniform_rounds", c.policy.limits.uniform_rounds}};

  Json sched{{"mode", std::string(to_string(c.scheduling.mode))},
             {"slots", c.scheduling.slots},
             {"alpha", c.scheduling.weights.alpha},
             {"beta", c.scheduling.weights.beta}};

  Json coop{{"enabled", c.cooperation.enabled},
            {"min_overlap", c.cooperation.min_overlap},
            {"neighbors", c.cooperation.neighbors},
            {"pioneers", c.cooperation.pioneers}};

  Json doc;
  doc["seed"] = c.seed;
  doc["users"] = c.users;
  doc["servers"] = c.servers;
  doc["mode"] = std::string(to_string(c.mode));
  doc["task_count"] = c.task_count;
  doc["scenario"] = scen;
  doc["radio"] = radio;
  doc["policy"] = policy;
  doc["scheduling"] = sched;
  doc["cooperation"] = coop;
  return doc;
}

std::string serialize_config(const EpisodeConfig& config) { return config_to_json(config).dump(2) + "\n"; }

EpisodeConfig with_parameter(const EpisodeConfig& config, std::string_view path, const Json& value) {
  Json doc = config_to_json(config);
  Json* node = &doc;
  std::string walked;
  std::size_t start = 0;
  while (start <= path.size()) {
    const std::size_t dot = path.find('.', start);
    const std::string key(path.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start));
    walked = join_path(walked, key);
    if (node->is_array()) {
      std::size_t idx = 0;
      try {
        idx = std::stoul(key);
      } catch (const std::exception&) {
        throw ConfigError("parameter path '" + std::string(path) + "': '" + walked + "' needs a list index");
      }
      if (idx >= node->size()) throw ConfigError("parameter path '" + std::string(path) + "': index out of range");
      node = &(*node)[idx];
    } else if (node->is_object() && node->contains(key)) {
      node = &(*node)[key];
    } else {
      throw ConfigError("parameter path '" + std::string(path) + "' does not name a configuration field");
    }
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  *node = value;
  return config_from_json(doc);
}

}  // namespace modnet
