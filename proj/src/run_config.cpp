// Copyright (c) 2026, The cellpilot Authors
// SPDX-License-Identifier: Apache-2.0

#include "cellpilot/run_config.hpp"

#include <cmath>
#include <optional>
#include <set>

#include "cellpilot/errors.hpp"
#include "cellpilot/rng.hpp"
#include "cellpilot/text_util.hpp"
#include "json.hpp"

namespace cellpilot {

using nlohmann::json;

std::vector<std::uint64_t> SeedSet::episode_seeds(std::uint64_t run_seed) const {
  std::vector<std::uint64_t> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(derive_seed(run_seed, offset + i));
  return out;
}

std::vector<double> CurriculumConfig::round_lengths() const {
  if (!enabled) return {final_length_s};
  std::vector<double> out;
  for (std::size_t i = 0; i <= increments; ++i) {
    out.push_back(initial_length_s + increment_s * static_cast<double>(i));
  }
  return out;
}

void CurriculumConfig::validate() const {
  if (!(final_length_s > 0.0)) throw ValidationError("curriculum.final_length_s must be > 0");
  if (passes_per_round == 0) throw ValidationError("curriculum.passes_per_round must be >= 1");
  if (!enabled) return;
  if (!(initial_length_s > 0.0)) throw ValidationError("curriculum.initial_length_s must be > 0");
  if (increments > 0 && !(increment_s > 0.0)) {
    throw ValidationError("curriculum.increment_s must be > 0");
  }
  const double last = initial_length_s + increment_s * static_cast<double>(increments);
  if (std::abs(last - final_length_s) > 1e-9) {
    throw ValidationError("curriculum: initial_length_s + increments * increment_s = " +
                          format_double(last) + " does not reach final_length_s = " +
                          format_double(final_length_s));
  }
}

void RunConfig::validate() const {
  if (topology.empty()) throw ValidationError("topology: a topology file is required");
  if (train_seeds.count == 0) throw ValidationError("seeds.train.count must be >= 1");
  if (n_ues == 0) throw ValidationError("scenario.n_ues must be >= 1");
  if (pri < 1) throw ValidationError("scenario.pri must be >= 1");
  if (eval_pri < 0) throw ValidationError("scenario.eval_pri must be >= 0");
  if (!(eval_length_s > 0.0)) throw ValidationError("scenario.eval_length_s must be > 0");
  if (!(dt > 0.0)) throw ValidationError("scenario.dt must be > 0");
  traffic.validate();
  propagation.validate();
  weights.validate();
  if (baseline_window == 0) throw ValidationError("reward.baseline_window must be >= 1");
  if (policy.hidden == 0) throw ValidationError("policy.hidden must be >= 1");
  if (policy.history == 0) throw ValidationError("policy.history must be >= 1");
  if (!(policy.learning_rate >= 0.0)) throw ValidationError("policy.learning_rate must be >= 0");
  if (!(policy.weight_decay >= 0.0)) throw ValidationError("policy.weight_decay must be >= 0");
  if (!(policy.clip_norm > 0.0)) throw ValidationError("policy.clip_norm must be > 0");
  if (!(policy.sigma_cap > 0.0 && policy.sigma_min > 0.0 && policy.sigma_min < policy.sigma_cap)) {
    throw ValidationError("policy: need 0 < sigma_min < sigma_cap");
  }
  if (policy.warm_start != "none") preset_by_name(policy.warm_start);
  preset_by_name(reference);
  curriculum.validate();
  if (!(convergence.alpha > 0.0 && convergence.alpha <= 1.0)) {
    throw ValidationError("convergence.alpha must be in (0, 1]");
  }
  if (convergence.window < 2) throw ValidationError("convergence.window must be >= 2");
  if (checkpoint_every == 0) throw ValidationError("training.checkpoint_every must be >= 1");
  if (validate_every == 0) throw ValidationError("training.validate_every must be >= 1");
  if (jobs == 0) throw ValidationError("training.jobs must be >= 1");
}

namespace {

// Reads fields of one JSON object, remembering which keys were consumed so
// that leftovers can be reported as unknown.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ValidationError(label() + ": expected an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ValidationError(field(key) + ": wrong type");
    }
  }

  void number(const char* key, double& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    if (!j_.at(key).is_number()) throw ValidationError(field(key) + ": expected a number");
    out = j_.at(key).get<double>();
  }

  void count(const char* key, std::size_t& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    const auto& v = j_.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      throw ValidationError(field(key) + ": expected a non-negative integer");
    }
    out = v.get<std::size_t>();
  }

  std::optional<Section> child(const char* key) {
    seen_.insert(key);
    if (!j_.contains(key)) return std::nullopt;
    return Section(j_.at(key), field(key));
  }

  void finish() const {
    for (const auto& [k, _] : j_.items()) {
      if (!seen_.count(k)) throw ValidationError(field(k.c_str()) + ": unknown key");
    }
  }

  std::string field(const char* key) const { return path_.empty() ? key : path_ + "." + key; }
  std::string label() const { return path_.empty() ? "config" : path_; }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_seed_set(Section& parent, const char* key, SeedSet& out) {
  if (auto s = parent.child(key)) {
    s->count("count", out.count);
    s->count("offset", out.offset);
    s->finish();
  }
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  RunConfig cfg;
  Section root(j, "");
  std::string topo;
  std::string se;
  root.get("topology", topo);
  root.get("se_table", se);
  if (!topo.empty()) cfg.topology = std::filesystem::weakly_canonical(base_dir / topo);
  if (!se.empty()) cfg.se_table = std::filesystem::weakly_canonical(base_dir / se);
  root.get("run_seed", cfg.run_seed);

  if (auto s = root.child("seeds")) {
    read_seed_set(*s, "train", cfg.train_seeds);
    read_seed_set(*s, "validation", cfg.validation_seeds);
    read_seed_set(*s, "eval", cfg.eval_seeds);
    s->finish();
  }
  if (auto s = root.child("scenario")) {
    s->count("n_ues", cfg.n_ues);
    s->get("pri", cfg.pri);
    s->get("eval_pri", cfg.eval_pri);
    s->number("eval_length_s", cfg.eval_length_s);
    s->number("dt", cfg.dt);
    s->finish();
  }
  if (auto s = root.child("traffic")) {
    s->number("lambda_idle", cfg.traffic.lambda_idle);
    s->number("lambda_active", cfg.traffic.lambda_active);
    s->get("mobility", cfg.traffic.mobility_enabled);
    s->get("eval_mobility", cfg.eval_mobility);
    s->number("speed_kmh", cfg.traffic.speed_kmh);
    s->number("speed_spread", cfg.traffic.speed_spread);
    s->number("street_weight", cfg.traffic.street_weight);
    s->finish();
  }
  if (auto s = root.child("propagation")) {
    s->number("main_lobe_gain_db", cfg.propagation.main_lobe_gain_db);
    s->number("off_lobe_gain_db", cfg.propagation.off_lobe_gain_db);
    s->number("wall_loss_db", cfg.propagation.wall_loss_db);
    s->number("noise_density_dbm_hz", cfg.propagation.noise_density_dbm_hz);
    s->get("train_obstruction", cfg.propagation.obstruction_enabled);
    s->get("eval_obstruction", cfg.eval_obstruction);
    s->finish();
  }
  if (auto s = root.child("reselection")) {
    s->number("t_resel_s", cfg.fixed.t_resel);
    s->number("s_intra_db", cfg.fixed.s_intra);
    s->number("s_inter_db", cfg.fixed.s_inter);
    s->get("reference", cfg.reference);
    s->finish();
  }
  if (auto s = root.child("reward")) {
    std::vector<double> w;
    s->get("weights", w);
    if (!w.empty()) {
      if (w.size() != 3) throw ValidationError("reward.weights: expected 3 numbers");
      cfg.weights = {w[0], w[1], w[2]};
    }
    s->count("baseline_window", cfg.baseline_window);
    std::string weighting;
    s->get("weighting", weighting);
    if (weighting == "return_to_go") {
      cfg.weighting = RewardWeighting::return_to_go;
    } else if (!weighting.empty() && weighting != "immediate") {
      throw ValidationError("reward.weighting: expected 'immediate' or 'return_to_go'");
    }
    s->finish();
  }
  if (auto s = root.child("policy")) {
    s->count("hidden", cfg.policy.hidden);
    s->count("history", cfg.policy.history);
    s->number("learning_rate", cfg.policy.learning_rate);
    s->number("weight_decay", cfg.policy.weight_decay);
    s->number("clip_norm", cfg.policy.clip_norm);
    s->number("sigma_cap", cfg.policy.sigma_cap);
    s->number("sigma_min", cfg.policy.sigma_min);
    s->get("warm_start", cfg.policy.warm_start);
    s->finish();
  }
  if (auto s = root.child("curriculum")) {
    s->get("enabled", cfg.curriculum.enabled);
    s->number("initial_length_s", cfg.curriculum.initial_length_s);
    s->number("increment_s", cfg.curriculum.increment_s);
    s->count("increments", cfg.curriculum.increments);
    s->number("final_length_s", cfg.curriculum.final_length_s);
    s->count("passes_per_round", cfg.curriculum.passes_per_round);
    s->get("lr_halving", cfg.curriculum.lr_halving);
    s->finish();
  }
  if (auto s = root.child("convergence")) {
    s->number("alpha", cfg.convergence.alpha);
    s->count("window", cfg.convergence.window);
    s->number("epsilon", cfg.convergence.epsilon);
    s->number("std_threshold", cfg.convergence.std_threshold);
    s->finish();
  }
  if (auto s = root.child("training")) {
    s->count("checkpoint_every", cfg.checkpoint_every);
    s->count("validate_every", cfg.validate_every);
    s->count("max_episodes", cfg.max_episodes);
    s->count("jobs", cfg.jobs);
    s->finish();
  }
  root.finish();
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::exception& e) {
    throw IoError("config '" + path.string() + "': " + e.what());
  }
  try {
    return parse_run_config(text, path.parent_path());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string run_config_json(const RunConfig& c) {
  json j;
  j["topology"] = c.topology.string();
  j["se_table"] = c.se_table.string();
  j["run_seed"] = c.run_seed;
  auto seeds = [](const SeedSet& s) { return json{{"count", s.count}, {"offset", s.offset}}; };
  j["seeds"] = {{"train", seeds(c.train_seeds)},
                {"validation", seeds(c.validation_seeds)},
                {"eval", seeds(c.eval_seeds)}};
  j["scenario"] = {{"n_ues", c.n_ues},
                   {"pri", c.pri},
                   {"eval_pri", c.eval_pri},
                   {"eval_length_s", c.eval_length_s},
                   {"dt", c.dt}};
  j["traffic"] = {{"lambda_idle", c.traffic.lambda_idle},
                  {"lambda_active", c.traffic.lambda_active},
                  {"mobility", c.traffic.mobility_enabled},
                  {"eval_mobility", c.eval_mobility},
                  {"speed_kmh", c.traffic.speed_kmh},
                  {"speed_spread", c.traffic.speed_spread},
                  {"street_weight", c.traffic.street_weight}};
  j["propagation"] = {{"main_lobe_gain_db", c.propagation.main_lobe_gain_db},
                      {"off_lobe_gain_db", c.propagation.off_lobe_gain_db},
                      {"wall_loss_db", c.propagation.wall_loss_db},
                      {"noise_density_dbm_hz", c.propagation.noise_density_dbm_hz},
                      {"train_obstruction", c.propagation.obstruction_enabled},
                      {"eval_obstruction", c.eval_obstruction}};
  j["reselection"] = {{"t_resel_s", c.fixed.t_resel},
                      {"s_intra_db", c.fixed.s_intra},
                      {"s_inter_db", c.fixed.s_inter},
                      {"reference", c.reference}};
  j["reward"] = {{"weights", {c.weights.tput, c.weights.bal, c.weights.ue}},
                 {"baseline_window", c.baseline_window},
                 {"weighting",
                  c.weighting == RewardWeighting::immediate ? "immediate" : "return_to_go"}};
  j["policy"] = {{"hidden", c.policy.hidden},
                 {"history", c.policy.history},
                 {"learning_rate", c.policy.learning_rate},
                 {"weight_decay", c.policy.weight_decay},
                 {"clip_norm", c.policy.clip_norm},
                 {"sigma_cap", c.policy.sigma_cap},
                 {"sigma_min", c.policy.sigma_min},
                 {"warm_start", c.policy.warm_start}};
  j["curriculum"] = {{"enabled", c.curriculum.enabled},
                     {"initial_length_s", c.curriculum.initial_length_s},
                     {"increment_s", c.curriculum.increment_s},
                     {"increments", c.curriculum.increments},
                     {"final_length_s", c.curriculum.final_length_s},
                     {"passes_per_round", c.curriculum.passes_per_round},
                     {"lr_halving", c.curriculum.lr_halving}};
  j["convergence"] = {{"alpha", c.convergence.alpha},
                      {"window", c.convergence.window},
                      {"epsilon", c.convergence.epsilon},
                      {"std_threshold", c.convergence.std_threshold}};
  j["training"] = {{"checkpoint_every", c.checkpoint_every},
                   {"validate_every", c.validate_every},
                   {"max_episodes", c.max_episodes},
                   {"jobs", c.jobs}};
  return j.dump(2) + "\n";
}

std::uint64_t run_config_hash(const RunConfig& cfg) {
  // jobs and the episode cap only change scheduling and stopping, never the
  // trajectory of a run.
  RunConfig c = cfg;
  c.jobs = 1;
  c.max_episodes = 0;
  return fnv1a64(run_config_json(c));
}

}  // namespace cellpilot
