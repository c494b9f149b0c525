// Copyright (c) 2026, The cellpilot Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CELLPILOT_TRAINER_HPP_
#define CELLPILOT_TRAINER_HPP_

#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cellpilot/checkpoint.hpp"
#include "cellpilot/policy.hpp"
#include "cellpilot/radio.hpp"
#include "cellpilot/rlenv.hpp"
#include "cellpilot/run_config.hpp"
#include "cellpilot/simcore.hpp"
#include "cellpilot/topology.hpp"

namespace cellpilot {

struct Scenario {
  Topology topo;
  SeTable se_table;
};

Scenario load_scenario(const RunConfig& cfg);

EpisodeConfig train_episode_config(const RunConfig& cfg, std::uint64_t seed, double length_s);

/// Evaluation-time knobs; unset fields fall back to the run config.
struct EvalOverrides {
  std::optional<std::size_t> n_ues;
  std::optional<int> pri;
  std::optional<bool> mobility;
  std::optional<bool> obstruction;
  std::optional<double> length_s;
};

EpisodeConfig eval_episode_config(const RunConfig& cfg, std::uint64_t seed,
                                  const EvalOverrides& ov = {});

/// The parameter source under evaluation: a network or a constant preset.
struct Agent {
  const PolicyNet* net = nullptr;
  std::size_t history = 10;
  GaussianHead head;
  std::optional<ReselectionParams> constant;
  std::string label;

  static Agent from_net(const PolicyNet& net, const RunConfig& cfg, std::string label = "policy");
  static Agent from_preset(const HeuristicPreset& preset);
};

struct Rollout {
  EpisodeResult result;
  std::vector<DecisionRecord> records;  // one per update; weights unset
};

/// With `rng` the agent samples from its Gaussian heads; without it the
/// mean action is used.
Rollout run_agent_episode(const Agent& agent, const Scenario& sc, const EpisodeConfig& ecfg,
                          Rng* rng);

class ConvergenceMonitor {
 public:
  ConvergenceMonitor(double alpha, std::size_t window) : alpha_(alpha), window_(window) {}

  void push(double reward);
  double ewma() const { return ewma_; }
  /// Population std over the last `window` rewards (0 before two exist).
  double rolling_std() const;
  bool full() const { return recent_.size() >= window_; }
  bool converged(double epsilon, double std_threshold) const;

  static ConvergenceMonitor replay(double alpha, std::size_t window,
                                   const std::vector<double>& rewards);

 private:
  double alpha_;
  std::size_t window_;
  double ewma_ = 0.0;
  bool started_ = false;
  std::deque<double> recent_;
};

struct TrainLogRow {
  std::size_t episode = 0;  // 1-based
  std::size_t round = 0;
  std::size_t pass = 0;
  std::size_t seed_index = 0;
  std::uint64_t seed = 0;
  double length_s = 0.0;
  double lr = 0.0;
  double reward = 0.0;  // mean r_total over intervals
  double r_tput = 0.0;
  double r_bal = 0.0;
  double r_ue = 0.0;
  double grad_norm = 0.0;
  std::size_t clamps = 0;
  double ewma = 0.0;
  double rolling_std = 0.0;
};

std::string train_log_header();
std::string train_log_line(const TrainLogRow& r);

struct TrainOptions {
  std::filesystem::path out_dir;  // checkpoints/ and train_log.csv live here
  bool resume = false;
  ReferenceCache* cache = nullptr;
  std::function<void(const TrainLogRow&)> on_episode;
};

struct TrainResult {
  PolicyCheckpoint final_state;
  std::optional<PolicyCheckpoint> best;
  std::vector<TrainLogRow> log;  // rows produced by this invocation
  bool completed = false;        // false when stopped by max_episodes
  std::size_t converged_at = 0;
};

/// Checkpoint files inside out_dir/checkpoints.
std::filesystem::path latest_checkpoint_path(const std::filesystem::path& out_dir);
std::filesystem::path best_checkpoint_path(const std::filesystem::path& out_dir);
std::filesystem::path final_checkpoint_path(const std::filesystem::path& out_dir);

/// Warm-started (or freshly initialized) network for the config.
PolicyNet make_initial_net(const RunConfig& cfg, std::size_t cells);

TrainResult train(const RunConfig& cfg, const Scenario& sc, const TrainOptions& opt);

/// Mean r_total of deterministic rollouts against the reference preset.
double validation_score(const Agent& agent, const RunConfig& cfg, const Scenario& sc,
                        const std::vector<std::uint64_t>& seeds, ReferenceCache* cache);

struct SeedGain {
  std::size_t seed_index = 0;
  std::uint64_t seed = 0;
  double tput_gain = 0.0;
  double lb_gain = 0.0;
  double ue_gain = 0.0;
};

struct GainStats {
  double median = 0.0;
  double p05 = 0.0;
  double p95 = 0.0;
};

struct EvalReport {
  std::string agent_label;
  std::string reference_label;
  std::vector<SeedGain> per_seed;
  GainStats tput;
  GainStats lb;
  GainStats ue;
};

/// Linear-interpolated percentile, q in [0, 1].
double percentile(std::vector<double> v, double q);
GainStats gain_stats(const std::vector<double>& v);

/// Relative gains of one agent episode over one reference episode.
SeedGain episode_gain(const EpisodeResult& agent, const EpisodeResult& reference);

struct EvalRequest {
  std::vector<std::uint64_t> seeds;
  std::size_t seed_offset = 0;  // index of seeds[0] in the eval seed set
  std::vector<std::uint64_t> training_seeds;  // refused if they overlap `seeds`
  EvalOverrides overrides;
  std::string reference = "config_b";
};

/// Deterministic rollouts; never mutates the agent.
EvalReport evaluate(const Agent& agent, const RunConfig& cfg, const Scenario& sc,
                    const EvalRequest& req, ReferenceCache* cache);

enum class Ablation {
  no_curriculum,
  seeds_500,
  mobility_eval,
  stress_test,
  slow_updates,
  synchronous_updates
};

Ablation parse_ablation(const std::string& name);
const char* ablation_name(Ablation a);
std::vector<std::string> ablation_names();
/// Whether the variant needs its own training run.
bool ablation_retrains(Ablation a);
/// The variant's config and evaluation overrides.
RunConfig ablation_config(const RunConfig& base, Ablation a);
EvalOverrides ablation_overrides(Ablation a);

}  // namespace cellpilot

#endif  // CELLPILOT_TRAINER_HPP_
