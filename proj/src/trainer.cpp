// Copyright (c) 2026, The cellpilot Authors
// SPDX-License-Identifier: Apache-2.0

#include "cellpilot/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "cellpilot/errors.hpp"
#include "cellpilot/text_util.hpp"

namespace cellpilot {

namespace {

constexpr std::uint64_t kActionStream = 0xac7104;
constexpr std::uint64_t kShuffleStream = 0x5fe1;
constexpr std::uint64_t kInitStream = 0x1417;

}  // namespace

Scenario load_scenario(const RunConfig& cfg) {
  Scenario sc;
  sc.topo = load_topology(cfg.topology);
  sc.se_table = cfg.se_table.empty() ? SeTable::default_table() : SeTable::load(cfg.se_table);
  return sc;
}

EpisodeConfig train_episode_config(const RunConfig& cfg, std::uint64_t seed, double length_s) {
  EpisodeConfig e;
  e.episode_seed = seed;
  e.n_ues = cfg.n_ues;
  e.length_s = length_s;
  e.pri = cfg.pri;
  e.dt = cfg.dt;
  e.traffic = cfg.traffic;
  e.propagation = cfg.propagation;
  e.fixed = cfg.fixed;
  return e;
}

EpisodeConfig eval_episode_config(const RunConfig& cfg, std::uint64_t seed,
                                  const EvalOverrides& ov) {
  EpisodeConfig e = train_episode_config(cfg, seed, ov.length_s.value_or(cfg.eval_length_s));
  e.n_ues = ov.n_ues.value_or(cfg.n_ues);
  e.pri = ov.pri.value_or(cfg.effective_eval_pri());
  e.traffic.mobility_enabled = ov.mobility.value_or(cfg.eval_mobility);
  e.propagation.obstruction_enabled = ov.obstruction.value_or(cfg.eval_obstruction);
  return e;
}

Agent Agent::from_net(const PolicyNet& net, const RunConfig& cfg, std::string label) {
  Agent a;
  a.net = &net;
  a.history = cfg.policy.history;
  a.head = {cfg.policy.sigma_cap, cfg.policy.sigma_min};
  a.label = std::move(label);
  return a;
}

Agent Agent::from_preset(const HeuristicPreset& preset) {
  Agent a;
  a.constant = preset.params;
  a.label = preset.name;
  return a;
}

Rollout run_agent_episode(const Agent& agent, const Scenario& sc, const EpisodeConfig& ecfg,
                          Rng* rng) {
  Rollout out;
  if (agent.constant) {
    ReselectionParams p = *agent.constant;
    out.result = run_episode(sc.topo, sc.se_table, ecfg, constant_controller(p));
    return out;
  }
  if (!agent.net) throw ValidationError("agent has neither a network nor constant parameters");
  auto controller = [&](const ControlContext& ctx) {
    DecisionRecord rec;
    rec.obs = build_observation(ctx.history, sc.topo.cells, ecfg.n_ues, agent.history);
    const auto net_out = agent.net->forward(rec.obs);
    if (rng) {
      rec.action = sample_action(net_out, agent.head, *rng).action;
    } else {
      std::copy_n(net_out.begin(), kTunableCount, rec.action.begin());
    }
    out.records.push_back(rec);
    // Out-of-range samples are clamped (and flagged) by the engine.
    return denormalize_params(rec.action, ecfg.fixed);
  };
  out.result = run_episode(sc.topo, sc.se_table, ecfg, controller);
  return out;
}

void ConvergenceMonitor::push(double reward) {
  ewma_ = started_ ? alpha_ * reward + (1.0 - alpha_) * ewma_ : reward;
  started_ = true;
  recent_.push_back(reward);
  while (recent_.size() > window_) recent_.pop_front();
}

double ConvergenceMonitor::rolling_std() const {
  if (recent_.size() < 2) return 0.0;
  const std::vector<double> v(recent_.begin(), recent_.end());
  return population_std(v);
}

bool ConvergenceMonitor::converged(double epsilon, double std_threshold) const {
  return full() && std::abs(ewma_) < epsilon && rolling_std() < std_threshold;
}

ConvergenceMonitor ConvergenceMonitor::replay(double alpha, std::size_t window,
                                              const std::vector<double>& rewards) {
  ConvergenceMonitor m(alpha, window);
  for (double r : rewards) m.push(r);
  return m;
}

std::string train_log_header() {
  return "episode,round,pass,seed_index,seed,length_s,lr,reward,r_tput,r_bal,r_ue,grad_norm,"
         "clamps,ewma,rolling_std\n";
}

std::string train_log_line(const TrainLogRow& r) {
  std::ostringstream os;
  os << r.episode << ',' << r.round << ',' << r.pass << ',' << r.seed_index << ',' << r.seed << ','
     << format_double(r.length_s) << ',' << format_double(r.lr) << ',' << format_double(r.reward)
     << ',' << format_double(r.r_tput) << ',' << format_double(r.r_bal) << ','
     << format_double(r.r_ue) << ',' << format_double(r.grad_norm) << ',' << r.clamps << ','
     << format_double(r.ewma) << ',' << format_double(r.rolling_std) << "\n";
  return os.str();
}

std::filesystem::path latest_checkpoint_path(const std::filesystem::path& out_dir) {
  return out_dir / "checkpoints" / "latest.ckpt";
}
std::filesystem::path best_checkpoint_path(const std::filesystem::path& out_dir) {
  return out_dir / "checkpoints" / "best.ckpt";
}
std::filesystem::path final_checkpoint_path(const std::filesystem::path& out_dir) {
  return out_dir / "checkpoints" / "final.ckpt";
}

PolicyNet make_initial_net(const RunConfig& cfg, std::size_t cells) {
  PolicyShape shape;
  shape.input = observation_size(cells, cfg.policy.history);
  shape.hidden1 = cfg.policy.hidden;
  shape.hidden2 = cfg.policy.hidden;
  PolicyNet net(shape);
  Rng rng(derive_seed(cfg.run_seed, kInitStream));
  net.init_uniform(rng);
  if (cfg.policy.warm_start != "none") warm_start(net, preset_by_name(cfg.policy.warm_start).params);
  return net;
}

namespace {

std::vector<RewardBreakdown> rewards_against(const std::vector<IntervalMetrics>& agent,
                                             const std::vector<IntervalMetrics>& reference,
                                             const RewardWeights& w, double ue_max) {
  std::vector<RewardBreakdown> out;
  const std::size_t n = std::min(agent.size(), reference.size());
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(compute_reward(agent[i], to_baseline(reference[i]), w, ue_max));
  }
  return out;
}

HeuristicPreset reference_preset(const RunConfig& cfg) { return preset_by_name(cfg.reference); }

// Runs fn(i) for i in [0, n) on up to `jobs` threads. Exceptions are
// rethrown on the calling thread.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t jobs, Fn fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, n));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < jobs; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mu);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

void write_log(const std::filesystem::path& path, const std::vector<std::string>& lines) {
  std::string text = train_log_header();
  for (const auto& l : lines) text += l;
  write_file(path, text);
}

std::vector<std::string> read_log_lines(const std::filesystem::path& path, std::size_t keep) {
  std::vector<std::string> lines;
  if (!std::filesystem::exists(path)) return lines;
  std::istringstream in(read_file(path));
  std::string line;
  std::getline(in, line);  // header
  while (lines.size() < keep && std::getline(in, line)) lines.push_back(line + "\n");
  return lines;
}

}  // namespace

double validation_score(const Agent& agent, const RunConfig& cfg, const Scenario& sc,
                        const std::vector<std::uint64_t>& seeds, ReferenceCache* cache) {
  if (seeds.empty()) return 0.0;
  std::vector<double> scores(seeds.size());
  parallel_for(seeds.size(), cfg.jobs, [&](std::size_t i) {
    EpisodeConfig e = train_episode_config(cfg, seeds[i], cfg.eval_length_s);
    const auto ref = run_heuristic_reference(sc.topo, sc.se_table, e, reference_preset(cfg), cache);
    const auto roll = run_agent_episode(agent, sc, e, nullptr);
    const auto r = rewards_against(interval_metrics(roll.result), interval_metrics(ref),
                                   cfg.weights, static_cast<double>(cfg.n_ues));
    double sum = 0.0;
    for (const auto& b : r) sum += b.r_total;
    scores[i] = r.empty() ? 0.0 : sum / static_cast<double>(r.size());
  });
  return std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(scores.size());
}

TrainResult train(const RunConfig& cfg, const Scenario& sc, const TrainOptions& opt) {
  cfg.validate();
  if (opt.out_dir.empty()) throw ValidationError("train: an output directory is required");
  const std::uint64_t config_hash = run_config_hash(cfg);
  const auto rounds = cfg.curriculum.round_lengths();
  const auto seeds = cfg.train_seeds.episode_seeds(cfg.run_seed);
  const auto validation = cfg.validation_seeds.episode_seeds(cfg.run_seed);
  {
    const std::set<std::uint64_t> train_set(seeds.begin(), seeds.end());
    for (auto s : validation) {
      if (train_set.count(s)) throw ValidationError("validation seeds overlap the training seeds");
    }
  }
  const GaussianHead head{cfg.policy.sigma_cap, cfg.policy.sigma_min};
  const HeuristicPreset ref_preset = reference_preset(cfg);
  const double ue_max = static_cast<double>(cfg.n_ues);
  const AdamWConfig adam{0.9, 0.999, 1e-8, cfg.policy.weight_decay, cfg.policy.clip_norm};
  const auto log_path = opt.out_dir / "train_log.csv";

  ReferenceCache local_cache;
  ReferenceCache* cache = opt.cache ? opt.cache : &local_cache;

  PolicyCheckpoint st;
  Rng shuffle_rng(derive_seed(cfg.run_seed, kShuffleStream));
  std::vector<std::string> log_lines;
  TrainResult result;

  if (opt.resume) {
    st = load_checkpoint(latest_checkpoint_path(opt.out_dir));
    if (st.config_hash != config_hash) {
      throw ValidationError("resume: checkpoint was written under a different run config");
    }
    shuffle_rng.set_state(st.rng_state);
    log_lines = read_log_lines(log_path, st.progress.episode);
    if (log_lines.size() != st.progress.episode) {
      throw CorruptFileError("resume: training log has fewer rows than the checkpoint episode");
    }
    if (std::filesystem::exists(best_checkpoint_path(opt.out_dir))) {
      result.best = load_checkpoint(best_checkpoint_path(opt.out_dir));
    }
  } else {
    st.config_hash = config_hash;
    st.net = make_initial_net(cfg, sc.topo.cell_count());
    st.optimizer = make_adamw_state(st.net, cfg.policy.learning_rate);
    st.baselines = BaselineTable(cfg.baseline_window);
    st.training_seeds = seeds;
    st.progress.permutation.resize(seeds.size());
    std::iota(st.progress.permutation.begin(), st.progress.permutation.end(), std::size_t{0});
    shuffle_rng.shuffle(st.progress.permutation);
    st.rng_state = shuffle_rng.state();
  }
  if (st.net.shape().input != observation_size(sc.topo.cell_count(), cfg.policy.history)) {
    throw ValidationError("policy input size does not match the topology and history length");
  }

  ConvergenceMonitor monitor = ConvergenceMonitor::replay(
      cfg.convergence.alpha, cfg.convergence.window, st.progress.episode_rewards);

  auto snapshot = [&] {
    st.rng_state = shuffle_rng.state();
    return st;
  };
  auto save_latest = [&] {
    write_log(log_path, log_lines);
    save_checkpoint(snapshot(), latest_checkpoint_path(opt.out_dir));
  };
  auto consider_best = [&] {
    const Agent agent = Agent::from_net(st.net, cfg);
    const double score = validation_score(agent, cfg, sc, validation, cache);
    if (!st.progress.has_best || score > st.progress.best_score) {
      st.progress.has_best = true;
      st.progress.best_score = score;
      st.progress.best_episode = st.progress.episode;
      result.best = snapshot();
      save_checkpoint(*result.best, best_checkpoint_path(opt.out_dir));
    }
  };

  if (!opt.resume) {
    consider_best();
    save_latest();
  }

  auto& pr = st.progress;
  while (pr.round < rounds.size()) {
    if (pr.position >= pr.permutation.size()) {
      ++pr.pass;
      if (pr.pass >= cfg.curriculum.passes_per_round) {
        pr.pass = 0;
        ++pr.round;
        if (pr.round >= rounds.size()) break;
        if (cfg.curriculum.lr_halving) {
          st.optimizer.lr = cfg.policy.learning_rate * std::pow(0.5, static_cast<double>(pr.round));
        }
      }
      std::iota(pr.permutation.begin(), pr.permutation.end(), std::size_t{0});
      shuffle_rng.shuffle(pr.permutation);
      pr.position = 0;
      continue;
    }
    if (cfg.max_episodes > 0 && pr.episode >= cfg.max_episodes) {
      save_latest();
      result.final_state = snapshot();
      result.converged_at = pr.converged_at;
      return result;
    }

    const std::size_t seed_index = pr.permutation[pr.position];
    const std::uint64_t seed = seeds[seed_index];
    const double length = rounds[pr.round];
    const EpisodeConfig ecfg = train_episode_config(cfg, seed, length);

    const auto ref = run_heuristic_reference(sc.topo, sc.se_table, ecfg, ref_preset, cache);
    st.baselines.seed_missing(seed, interval_metrics(ref));

    Rng action_rng(derive_seed(derive_seed(cfg.run_seed, kActionStream), pr.episode));
    const Agent agent = Agent::from_net(st.net, cfg);
    Rollout roll = run_agent_episode(agent, sc, ecfg, &action_rng);
    const auto intervals = interval_metrics(roll.result);
    if (intervals.size() != roll.records.size()) {
      throw Error("train: interval/decision count mismatch");
    }

    std::vector<RewardBreakdown> rewards;
    TrainLogRow row;
    for (std::size_t i = 0; i < intervals.size(); ++i) {
      rewards.push_back(compute_reward(intervals[i], st.baselines.mean(seed, i), cfg.weights, ue_max));
      row.reward += rewards.back().r_total;
      row.r_tput += rewards.back().r_tput;
      row.r_bal += rewards.back().r_bal;
      row.r_ue += rewards.back().r_ue;
    }
    const double n = static_cast<double>(std::max<std::size_t>(intervals.size(), 1));
    row.reward /= n;
    row.r_tput /= n;
    row.r_bal /= n;
    row.r_ue /= n;

    double tail = 0.0;
    for (std::size_t i = rewards.size(); i-- > 0;) {
      tail += rewards[i].r_total;
      roll.records[i].weight =
          cfg.weighting == RewardWeighting::immediate ? rewards[i].r_total : tail;
    }

    std::vector<double> grad;
    try {
      grad = reinforce_gradient(st.net, head, roll.records);
    } catch (const Error& e) {
      throw Error(std::string(e.what()) + " at episode " + std::to_string(pr.episode + 1) +
                  "; last good checkpoint: " + latest_checkpoint_path(opt.out_dir).string());
    }
    row.grad_norm = adamw_step(st.net, st.optimizer, adam, grad);

    for (std::size_t i = 0; i < intervals.size(); ++i) st.baselines.push(seed, i, intervals[i]);
    for (const auto& u : roll.result.updates) row.clamps += std::popcount(u.clamp_mask);

    ++pr.position;
    ++pr.episode;
    pr.episode_rewards.push_back(row.reward);
    monitor.push(row.reward);
    if (pr.converged_at == 0 &&
        monitor.converged(cfg.convergence.epsilon, cfg.convergence.std_threshold)) {
      pr.converged_at = pr.episode;
    }

    row.episode = pr.episode;
    row.round = pr.round;
    row.pass = pr.pass;
    row.seed_index = seed_index;
    row.seed = seed;
    row.length_s = length;
    row.lr = st.optimizer.lr;
    row.ewma = monitor.ewma();
    row.rolling_std = monitor.rolling_std();
    log_lines.push_back(train_log_line(row));
    result.log.push_back(row);
    if (opt.on_episode) opt.on_episode(row);

    if (pr.episode % cfg.validate_every == 0) consider_best();
    if (pr.episode % cfg.checkpoint_every == 0) {
      save_latest();
      save_checkpoint(snapshot(), opt.out_dir / "checkpoints" /
                                      ("episode-" + std::to_string(pr.episode) + ".ckpt"));
    }
  }

  if (pr.episode % cfg.validate_every != 0) consider_best();
  save_latest();
  result.final_state = snapshot();
  save_checkpoint(result.final_state, final_checkpoint_path(opt.out_dir));
  result.completed = true;
  result.converged_at = pr.converged_at;
  return result;
}

double percentile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] + (v[hi] - v[lo]) * frac;
}

GainStats gain_stats(const std::vector<double>& v) {
  return {percentile(v, 0.5), percentile(v, 0.05), percentile(v, 0.95)};
}

SeedGain episode_gain(const EpisodeResult& agent, const EpisodeResult& reference) {
  auto means = [](const EpisodeResult& r) {
    IntervalMetrics m;
    for (const auto& s : r.steps) {
      m.tput_bps += s.total_tput_bps;
      m.sigma_bps += s.per_cell_std_bps;
      m.ue_mean_bps += s.per_ue_mean_tput_bps;
    }
    const double n = static_cast<double>(std::max<std::size_t>(r.steps.size(), 1));
    m.tput_bps /= n;
    m.sigma_bps /= n;
    m.ue_mean_bps /= n;
    return m;
  };
  const IntervalMetrics a = means(agent);
  const IntervalMetrics b = means(reference);
  SeedGain g;
  g.tput_gain = b.tput_bps > 0.0 ? a.tput_bps / b.tput_bps - 1.0 : 0.0;
  g.lb_gain = std::max(b.sigma_bps, kRewardEpsilon) / std::max(a.sigma_bps, kRewardEpsilon) - 1.0;
  g.ue_gain = b.ue_mean_bps > 0.0 ? a.ue_mean_bps / b.ue_mean_bps - 1.0 : 0.0;
  return g;
}

EvalReport evaluate(const Agent& agent, const RunConfig& cfg, const Scenario& sc,
                    const EvalRequest& req, ReferenceCache* cache) {
  const std::set<std::uint64_t> train_set(req.training_seeds.begin(), req.training_seeds.end());
  for (auto s : req.seeds) {
    if (train_set.count(s)) {
      throw ValidationError("evaluation seed " + std::to_string(s) +
                            " is also a training seed; evaluation requires unseen seeds");
    }
  }
  const HeuristicPreset ref = preset_by_name(req.reference);
  EvalReport rep;
  rep.agent_label = agent.label;
  rep.reference_label = ref.name;
  rep.per_seed.resize(req.seeds.size());
  parallel_for(req.seeds.size(), cfg.jobs, [&](std::size_t i) {
    const EpisodeConfig e = eval_episode_config(cfg, req.seeds[i], req.overrides);
    const auto base = run_heuristic_reference(sc.topo, sc.se_table, e, ref, cache);
    const auto roll = run_agent_episode(agent, sc, e, nullptr);
    SeedGain g = episode_gain(roll.result, base);
    g.seed_index = req.seed_offset + i;
    g.seed = req.seeds[i];
    rep.per_seed[i] = g;
  });
  std::vector<double> t;
  std::vector<double> l;
  std::vector<double> u;
  for (const auto& g : rep.per_seed) {
    t.push_back(g.tput_gain);
    l.push_back(g.lb_gain);
    u.push_back(g.ue_gain);
  }
  rep.tput = gain_stats(t);
  rep.lb = gain_stats(l);
  rep.ue = gain_stats(u);
  return rep;
}

Ablation parse_ablation(const std::string& name) {
  for (auto a : {Ablation::no_curriculum, Ablation::seeds_500, Ablation::mobility_eval,
                 Ablation::stress_test, Ablation::slow_updates, Ablation::synchronous_updates}) {
    if (name == ablation_name(a)) return a;
  }
  std::string all;
  for (const auto& n : ablation_names()) all += (all.empty() ? "" : ", ") + n;
  throw ValidationError("unknown ablation variant '" + name + "' (expected one of: " + all + ")");
}

const char* ablation_name(Ablation a) {
  switch (a) {
    case Ablation::no_curriculum: return "no_curriculum";
    case Ablation::seeds_500: return "seeds_500";
    case Ablation::mobility_eval: return "mobility_eval";
    case Ablation::stress_test: return "stress_test";
    case Ablation::slow_updates: return "slow_updates";
    case Ablation::synchronous_updates: return "synchronous_updates";
  }
  return "?";
}

std::vector<std::string> ablation_names() {
  return {"no_curriculum", "seeds_500",    "mobility_eval",
          "stress_test",   "slow_updates", "synchronous_updates"};
}

bool ablation_retrains(Ablation a) {
  return a != Ablation::mobility_eval && a != Ablation::stress_test;
}

RunConfig ablation_config(const RunConfig& base, Ablation a) {
  RunConfig c = base;
  switch (a) {
    case Ablation::no_curriculum:
      c.curriculum.enabled = false;
      break;
    case Ablation::seeds_500:
      c.train_seeds.count = 500;
      break;
    case Ablation::mobility_eval:
      c.eval_mobility = true;
      break;
    case Ablation::stress_test:
      c.eval_pri = 10;
      break;
    case Ablation::slow_updates:
      c.pri = 5;
      c.eval_pri = 5;
      break;
    case Ablation::synchronous_updates:
      c.pri = 5;
      c.eval_pri = 5;
      c.weights = RewardWeights::synchronous();
      c.baseline_window = 10;
      break;
  }
  return c;
}

EvalOverrides ablation_overrides(Ablation a) {
  EvalOverrides ov;
  if (a == Ablation::mobility_eval) ov.mobility = true;
  if (a == Ablation::stress_test) ov.pri = 10;
  return ov;
}

}  // namespace cellpilot
