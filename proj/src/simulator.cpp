#include "modnet/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <regex>
#include <set>
#include <string>

#include "modnet/cooperation.hpp"
#include "modnet/errors.hpp"

namespace modnet {

namespace {

// Random stream tags. Each (tag, a, b) names one independent stream so that
// policies run on the same seed share channel, context and oracle draws.
enum StreamTag : std::uint64_t {
  kChannelStream = 1,
  kContextStream = 2,
  kPilotStream = 3,
  kTaskStream = 4,
};

std::string field(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

void require(bool ok, const std::string& path, const std::string& msg) {
  if (!ok) throw ConfigError(path + ": " + msg);
}

bool unit(double p) { return p >= 0.0 && p <= 1.0; }

}  // namespace

std::string_view to_string(TransmissionMode m) noexcept {
  return m == TransmissionMode::adaptive ? "adaptive" : "broadcast";
}

TransmissionMode transmission_mode_from_string(std::string_view name) {
  if (name == "adaptive") return TransmissionMode::adaptive;
  if (name == "broadcast") return TransmissionMode::broadcast;
  throw ConfigError("unknown transmission mode '" + std::string(name) +
                    "' (expected adaptive or broadcast)");
}

void EpisodeConfig::validate() const {
  require(users >= 1, "users", "must be at least 1");
  require(servers >= 1, "servers", "must be at least 1");
  require(task_count >= 1, "task_count", "must be at least 1");

  const auto& sc = scenario;
  const std::size_t nctx = sc.contexts.size();
  require(nctx >= 1, "scenario.contexts", "at least one context is required");
  static const std::regex name_re("[A-Za-z0-9_.-]+");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < nctx; ++i) {
    require(std::regex_match(sc.contexts[i], name_re), field("scenario.contexts", i),
            "labels may use letters, digits, '_', '.' and '-'");
    require(seen.insert(sc.contexts[i]).second, field("scenario.contexts", i), "duplicate label");
  }
  require(!sc.models.empty(), "scenario.models", "at least one model is required");
  seen.clear();
  for (std::size_t i = 0; i < sc.models.size(); ++i) {
    const auto& m = sc.models[i];
    const std::string p = field("scenario.models", i);
    require(std::regex_match(m.name, name_re), p + ".id", "ids may use letters, digits, '_', '.' and '-'");
    require(seen.insert(m.name).second, p + ".id", "duplicate model id '" + m.name + "'");
    require(m.server.value < servers, p + ".server", "server index out of range");
    require(m.fit.size() == nctx, p + ".fit", "must give a probability for every context");
    for (std::size_t c = 0; c < m.fit.size(); ++c) {
      require(unit(m.fit[c]), p + ".fit." + sc.contexts[c], "must lie in [0, 1]");
    }
  }
  require(sc.transition.size() == nctx, "scenario.transition", "must be a square matrix over the contexts");
  for (std::size_t i = 0; i < nctx; ++i) {
    const auto& row = sc.transition[i];
    require(row.size() == nctx, field("scenario.transition", i), "row length must equal context count");
    double sum = 0.0;
    for (double v : row) {
      require(v >= 0.0, field("scenario.transition", i), "entries must be nonnegative");
      sum += v;
    }
    require(std::abs(sum - 1.0) <= 1e-9, field("scenario.transition", i),
            "row sums to " + std::to_string(sum) + ", must sum to 1 within tolerance 1e-9");
  }
  require(sc.initial_contexts.size() == users, "scenario.initial_context", "need one context per user");
  for (std::size_t u = 0; u < users; ++u) {
    require(sc.initial_contexts[u] < nctx, field("scenario.initial_context", u), "unknown context");
  }
  if (sc.training.enabled) {
    const auto& t = sc.training;
    require(t.params.rate > 0.0 && t.params.rate <= 1.0, "scenario.training.rate", "must lie in (0, 1]");
    require(t.params.pilot_unit >= 1, "scenario.training.pilot_unit", "must be positive");
    require(t.params.promotion_margin > 0.0, "scenario.training.promotion_margin", "must be positive");
    require(t.target.size() == nctx, "scenario.training.target", "must give a target for every context");
    for (double v : t.target) require(unit(v), "scenario.training.target", "must lie in [0, 1]");
  }

  try {
    radio.params.validate();
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }
  require(radio.mean_gains.size() == servers, "radio.mean_gains", "need one mean gain per server");
  for (std::size_t s = 0; s < servers; ++s) {
    require(radio.mean_gains[s] > 0.0 && std::isfinite(radio.mean_gains[s]), field("radio.mean_gains", s),
            "must be strictly positive");
  }
  require(radio.user_gain_scale.size() == users, "radio.user_gain_scale", "need one scale per user");
  for (std::size_t u = 0; u < users; ++u) {
    require(radio.user_gain_scale[u] > 0.0 && std::isfinite(radio.user_gain_scale[u]),
            field("radio.user_gain_scale", u), "must be strictly positive");
  }

  require(policy.batch_size >= 1, "policy.batch_size", "must be at least 1");
  require(policy.epsilon > 0.0 && policy.epsilon < 1.0, "policy.epsilon", "must lie in (0, 1)");
  require(policy.limits.max_rounds >= 1, "policy.max_rounds", "must be at least 1");
  require(policy.limits.uniform_rounds >= 1, "policy.uniform_rounds", "must be at least 1");
  require(policy.limits.explore_rounds >= 1, "policy.explore_rounds", "must be at least 1");

  require(scheduling.slots >= 1, "scheduling.slots", "must be at least 1");
  require(scheduling.weights.alpha >= 0.0, "scheduling.alpha", "must be nonnegative");
  require(scheduling.weights.beta >= 0.0, "scheduling.beta", "must be nonnegative");

  require(cooperation.min_overlap >= 1, "cooperation.min_overlap", "must be at least 1");
  require(cooperation.neighbors >= 1, "cooperation.neighbors", "must be at least 1");
  require(cooperation.pioneers >= 1, "cooperation.pioneers", "must be at least 1");
}

std::vector<ModelOracle> EpisodeConfig::make_oracles() const {
  std::vector<ModelOracle> out;
  out.reserve(scenario.models.size());
  for (std::size_t i = 0; i < scenario.models.size(); ++i) {
    const auto& m = scenario.models[i];
    out.push_back(ModelOracle{ModelId{static_cast<std::uint32_t>(i)}, m.server, m.fit, 0, std::nullopt});
  }
  return out;
}

std::vector<ModelId> EpisodeConfig::model_ids() const {
  std::vector<ModelId> ids(scenario.models.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = ModelId{static_cast<std::uint32_t>(i)};
  return ids;
}

double EpisodeMetrics::total_energy() const {
  double e = 0.0;
  for (const auto& u : users) e += u.energy_joules;
  return e;
}

std::uint64_t EpisodeMetrics::total_pilots() const {
  std::uint64_t p = 0;
  for (const auto& u : users) p += u.pilots_sent;
  return p;
}

TransmissionPlan select_transmission_mode(std::span<const LinkState> links,
                                          const std::map<ServerId, std::vector<ModelId>>& survivors_per_server,
                                          const RadioParams& params) {
  TransmissionPlan plan;
  std::vector<LinkState> dest;
  for (const auto& [server, models] : survivors_per_server) {
    if (models.empty()) continue;
    if (server.value >= links.size()) throw StateError("no link to server " + std::to_string(server.value));
    plan.servers.push_back(server);
    dest.push_back(links[server.value]);
  }
  if (plan.servers.empty()) throw StateError("select_transmission_mode: no server hosts a survivor");
  plan.broadcast = plan.servers.size() > 1;
  plan.effective_gain = dest.front().gain;
  for (const auto& l : dest) plan.effective_gain = std::min(plan.effective_gain, l.gain);
  plan.rate_bps = broadcast_rate(dest, params.tx_power_w, params);
  return plan;
}

std::uint64_t offload_tasks(const ModelOracle& oracle, Context ctx, std::uint64_t count, Rng& rng) {
  return sample_responses(oracle, ctx, count, rng);
}

namespace {

struct UserRun {
  UserId id;
  PolicyState state;
  std::vector<ModelId> pending;  // not yet admitted (cooperative followers only)
  bool follower = false;
  bool initialized = false;
  bool done = false;
  ContextProcess ctx;
  Context offload_ctx;
  std::vector<std::uint64_t> occupancy;
  std::vector<LinkState> links;  // indexed by server
  std::vector<Rng> channel_rng;  // indexed by server
  std::vector<Rng> pilot_rng;    // indexed by model
  Rng context_rng{0};
  Rng task_rng{0};
  std::vector<EliminationEvent> timeline;
};

UserProfile profile_of(const UserRun& r) {
  UserProfile p{r.id, {}};
  for (const auto& [m, est] : r.state.estimates) {
    if (est.has_data()) p.estimates.emplace(m, est);
  }
  return p;
}

class Episode {
 public:
  Episode(const EpisodeConfig& cfg, EpisodeOptions opts)
      : cfg_(cfg), opts_(opts), oracles_(cfg.make_oracles()), ledger_(cfg.users) {
    cfg_.validate();
    const auto& pol = cfg_.policy;
    slot_duration_ = round_duration(pol.limits.max_rounds, cfg_.radio.params);
    delta_ = ConfidenceParams::from_budget(pol.epsilon, oracles_.size(), pol.limits.max_rounds).delta;
    models_ = cfg_.model_ids();

    for (const auto& o : oracles_) hosting_servers_.insert(o.server_id);

    const std::uint64_t seed = cfg_.seed;
    runs_.reserve(cfg_.users);
    for (std::uint32_t u = 0; u < cfg_.users; ++u) {
      UserRun r;
      r.id = UserId{u};
      r.follower = cfg_.cooperation.enabled && u >= cfg_.cooperation.pioneers;
      r.state = PolicyState::start(pol.kind, r.follower ? std::vector<ModelId>{} : models_, pol.limits);
      if (r.follower) r.pending = models_;
      r.ctx = ContextProcess{cfg_.scenario.transition, Context{cfg_.scenario.initial_contexts[u]}};
      r.offload_ctx = r.ctx.current;
      r.occupancy.assign(cfg_.scenario.contexts.size(), 0);
      for (std::uint32_t s = 0; s < cfg_.servers; ++s) {
        const double mean = cfg_.radio.mean_gains[s] * cfg_.radio.user_gain_scale[u];
        r.links.push_back(LinkState{r.id, ServerId{s}, mean, mean, 0});
        r.channel_rng.emplace_back(stream_seed(seed, kChannelStream, u, s));
      }
      for (std::uint32_t m = 0; m < oracles_.size(); ++m) {
        r.pilot_rng.emplace_back(stream_seed(seed, kPilotStream, u, m));
      }
      r.context_rng = Rng(stream_seed(seed, kContextStream, u));
      r.task_rng = Rng(stream_seed(seed, kTaskStream, u));
      runs_.push_back(std::move(r));
    }
  }

  EpisodeMetrics run() {
    EpisodeMetrics out;
    out.seed = cfg_.seed;
    const std::uint32_t frames = cfg_.policy.limits.max_rounds;
    std::uint32_t frame = 0;
    for (; frame < frames; ++frame) {
      std::vector<UserId> active;
      for (const auto& r : runs_) {
        if (!r.done) active.push_back(r.id);
      }
      if (active.empty()) break;

      for (auto& r : runs_) {
        for (std::uint32_t s = 0; s < cfg_.servers; ++s) r.links[s] = draw_gain(r.links[s], r.channel_rng[s]);
      }

      training_pilots_.assign(oracles_.size(), std::vector<std::uint64_t>(cfg_.scenario.contexts.size(), 0));
      for (UserId u : grant(active)) serve(runs_[u.value], frame, out);
      train_shadows();

      for (UserId u : active) {
        auto& r = runs_[u.value];
        ++r.occupancy[r.ctx.current.index];
        if (r.done) r.offload_ctx = r.ctx.current;
      }
      for (auto& r : runs_) r.ctx = step_context(std::move(r.ctx), r.context_rng);
    }
    out.feedback_rounds = frame;
    for (auto& r : runs_) {
      if (!r.done) {
        r.done = true;
        r.offload_ctx = r.ctx.current;
      }
    }
    finish(out);
    return out;
  }

 private:
  std::vector<UserId> grant(const std::vector<UserId>& active) {
    if (active.size() <= cfg_.scheduling.slots) return active;
    std::vector<SchedulingCandidate> cands;
    cands.reserve(active.size());
    for (UserId u : active) {
      auto& r = runs_[u.value];
      ensure_initialized(r);
      const auto plan = plan_round(r.state, cfg_.policy.batch_size);
      cands.push_back({u, transmission_for(r, plan.targets).effective_gain, learning_score(r)});
    }
    return schedule_users(cands, cfg_.scheduling.mode, cfg_.scheduling.slots, cfg_.scheduling.weights);
  }

  double learning_score(const UserRun& r) const {
    bool any = false;
    for (ModelId m : r.state.survivors) any = any || r.state.estimate(m).has_data();
    if (!any) return 1.0;
    const auto b = bounds(r.state.estimate(select_best(r.state)), delta_);
    return b.ucb - b.lcb;
  }

  TransmissionPlan transmission_for(const UserRun& r, const std::vector<ModelId>& targets) const {
    std::map<ServerId, std::vector<ModelId>> per_server;
    if (cfg_.mode == TransmissionMode::broadcast) {
      // persistent broadcast keeps every hosting server in the destination set
      for (ServerId s : hosting_servers_) per_server[s];
      for (const auto& o : oracles_) per_server[o.server_id].push_back(o.model_id);
    } else {
      for (ModelId m : targets) per_server[oracles_[m.value].server_id].push_back(m);
    }
    return select_transmission_mode(r.links, per_server, cfg_.radio.params);
  }

  // Cooperative followers start with a few calibration models so that their
  // similarity to the pioneers can be measured; the rest wait in `pending`.
  void ensure_initialized(UserRun& r) {
    if (r.initialized) return;
    r.initialized = true;
    if (!r.follower) return;

    std::vector<std::pair<double, ModelId>> pooled;
    std::vector<ModelId> unknown;
    for (ModelId m : models_) {
      double sum = 0.0;
      int n = 0;
      for (const auto& other : runs_) {
        if (other.id == r.id || other.follower) continue;
        auto it = other.state.estimates.find(m);
        if (it != other.state.estimates.end() && it->second.has_data()) {
          sum += *it->second.mean();
          ++n;
        }
      }
      if (n == 0) {
        unknown.push_back(m);
      } else {
        pooled.emplace_back(sum / n, m);
      }
    }
    std::vector<ModelId> admit = unknown;
    if (pooled.size() <= cfg_.cooperation.min_overlap) {
      for (const auto& [v, m] : pooled) admit.push_back(m);
    } else {
      // alternate between the top and the bottom of the pooled ranking
      std::stable_sort(pooled.begin(), pooled.end(),
                       [](const auto& a, const auto& b) { return a.first > b.first; });
      std::size_t lo = 0;
      std::size_t hi = pooled.size();
      for (std::uint32_t k = 0; k < cfg_.cooperation.min_overlap; ++k) {
        admit.push_back(k % 2 == 0 ? pooled[lo++].second : pooled[--hi].second);
      }
    }
    admit_models(r, admit);
  }

  void admit_models(UserRun& r, const std::vector<ModelId>& models) {
    for (ModelId m : models) {
      auto it = std::find(r.pending.begin(), r.pending.end(), m);
      if (it == r.pending.end()) continue;
      r.pending.erase(it);
      r.state.survivors.push_back(m);
      r.state.estimates.emplace(m, FitEstimate{});
    }
    std::sort(r.state.survivors.begin(), r.state.survivors.end());
  }

  // Pending models join once their predicted fit could still beat the current
  // leader, or when the leader has no challenger left. Predictions only decide
  // when a model is first sampled; elimination uses measured estimates only.
  void admit_pending(UserRun& r) {
    if (r.pending.empty()) return;
    const UserProfile self = profile_of(r);
    std::vector<UserProfile> profiles;
    std::vector<std::pair<double, std::size_t>> sims;
    for (const auto& other : runs_) {
      if (other.id == r.id) continue;
      profiles.push_back(profile_of(other));
    }
    for (std::size_t i = 0; i < profiles.size(); ++i) {
      const auto s = similarity(self, profiles[i], cfg_.cooperation.min_overlap);
      if (s && *s > 0.0) sims.emplace_back(*s, i);
    }
    std::stable_sort(sims.begin(), sims.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    if (sims.size() > cfg_.cooperation.neighbors) sims.resize(cfg_.cooperation.neighbors);
    std::vector<Neighbor> nbrs;
    for (const auto& [s, i] : sims) nbrs.push_back({&profiles[i], s});

    double leader_lcb = 0.0;
    for (ModelId m : r.state.survivors) {
      const auto& e = r.state.estimate(m);
      if (e.has_data()) leader_lcb = std::max(leader_lcb, bounds(e, delta_).lcb);
    }

    std::vector<ModelId> admit;
    std::optional<std::pair<double, ModelId>> top;
    for (ModelId m : r.pending) {
      const auto pred = predict_fit(self, m, nbrs);
      if (!pred || *pred >= leader_lcb) {
        admit.push_back(m);
      } else if (!top || pred > top->first) {
        top = std::make_pair(*pred, m);
      }
    }
    if (admit.empty() && r.state.survivors.size() <= 1 && top) admit.push_back(top->second);
    admit_models(r, admit);
  }

  void serve(UserRun& r, std::uint32_t frame, EpisodeMetrics& out) {
    ensure_initialized(r);
    const auto plan = plan_round(r.state, cfg_.policy.batch_size);
    const auto tx = transmission_for(r, plan.targets);
    const double bits = static_cast<double>(plan.targets.size()) * plan.pilots_per_target *
                        cfg_.radio.params.pilot_bits;
    ledger_.record(r.id, frame, transmit_energy(bits, slot_duration_, tx.effective_gain, cfg_.radio.params));

    const Context ctx = r.ctx.current;
    for (ModelId m : plan.targets) {
      const auto s = sample_responses(oracles_[m.value], ctx, plan.pilots_per_target, r.pilot_rng[m.value]);
      r.state = apply_batch(std::move(r.state), m, s, plan.pilots_per_target);
      training_pilots_[m.value][ctx.index] += plan.pilots_per_target;
    }

    auto res = eliminate(r.state, delta_);
    r.state = std::move(res.state);
    if (!res.eliminated.empty()) r.timeline.push_back({r.state.round_index, std::move(res.eliminated)});
    if (r.follower) admit_pending(r);

    if (opts_.record_trace) {
      for (ModelId m : models_) {
        auto it = r.state.estimates.find(m);
        const FitEstimate est = it == r.state.estimates.end() ? FitEstimate{} : it->second;
        const bool alive = std::binary_search(r.state.survivors.begin(), r.state.survivors.end(), m) ||
                           std::find(r.pending.begin(), r.pending.end(), m) != r.pending.end();
        out.trace.push_back({frame, r.id, m, est, alive});
      }
    }

    r.done = is_terminal(r.state);
  }

  void train_shadows() {
    if (!cfg_.scenario.training.enabled) return;
    const auto& tr = cfg_.scenario.training;
    for (std::size_t m = 0; m < oracles_.size(); ++m) {
      for (std::uint32_t c = 0; c < training_pilots_[m].size(); ++c) {
        const auto n = training_pilots_[m][c];
        if (n == 0) continue;
        oracles_[m] = train_shadow(std::move(oracles_[m]), n, {{Context{c}, tr.target[c]}}, tr.params);
      }
    }
  }

  void finish(EpisodeMetrics& out) {
    // identification is judged against the served versions used during learning
    const std::vector<ModelOracle> learned = oracles_;

    if (cfg_.scenario.training.enabled) {
      std::vector<double> weights(cfg_.scenario.contexts.size(), 0.0);
      double total = 0.0;
      for (const auto& r : runs_) {
        for (std::size_t c = 0; c < weights.size(); ++c) {
          weights[c] += static_cast<double>(r.occupancy[c]);
          total += static_cast<double>(r.occupancy[c]);
        }
      }
      if (total > 0.0) {
        for (double& w : weights) w /= total;
        for (auto& o : oracles_) {
          if (!o.shadow_table) continue;
          const auto before = o.version;
          o = promote_shadow(std::move(o), weights, cfg_.scenario.training.params);
          out.promotions += o.version - before;
        }
      }
    }

    out.round_energy = ledger_.per_round();
    for (auto& r : runs_) {
      UserMetrics um;
      try {
        um.chosen_model = select_best(r.state);
      } catch (const NoDataError&) {
        throw InfeasibleError("user " + std::to_string(r.id.value) +
                              " never received an uplink grant within the round cap");
      }
      const auto occ = std::max_element(r.occupancy.begin(), r.occupancy.end());
      um.dominant_context = Context{static_cast<std::uint32_t>(occ - r.occupancy.begin())};
      double best_fit = -1.0;
      for (const auto& o : learned) {
        if (o.fit(um.dominant_context) > best_fit) {
          best_fit = o.fit(um.dominant_context);
          um.true_best = o.model_id;
        }
      }
      um.identified_best = learned[um.chosen_model.value].fit(um.dominant_context) == best_fit;
      um.pilots_sent = r.state.total_pilots;
      um.rounds = r.state.round_index;
      um.energy_joules = ledger_.user_total(r.id);
      const auto ok = offload_tasks(oracles_[um.chosen_model.value], r.offload_ctx, cfg_.task_count, r.task_rng);
      um.task_accuracy = static_cast<double>(ok) / static_cast<double>(cfg_.task_count);
      um.timeline = std::move(r.timeline);
      out.users.push_back(std::move(um));
    }
  }

  const EpisodeConfig& cfg_;
  EpisodeOptions opts_;
  std::vector<ModelOracle> oracles_;
  EnergyLedger ledger_;
  std::vector<ModelId> models_;
  std::set<ServerId> hosting_servers_;
  std::vector<UserRun> runs_;
  std::vector<std::vector<std::uint64_t>> training_pilots_;
  double slot_duration_ = 0.0;
  double delta_ = 0.0;
};

}  // namespace

EpisodeMetrics run_episode(const EpisodeConfig& config, EpisodeOptions options) {
  Episode ep(config, options);
  return ep.run();
}

}  // namespace modnet
