// Copyright (c) 2026, The cellpilot Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CELLPILOT_RUN_CONFIG_HPP_
#define CELLPILOT_RUN_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cellpilot/radio.hpp"
#include "cellpilot/reselect.hpp"
#include "cellpilot/rlenv.hpp"
#include "cellpilot/traffic.hpp"

namespace cellpilot {

struct SeedSet {
  std::size_t count = 0;
  std::size_t offset = 0;  // first seed index

  /// derive_seed(run_seed, offset + i) for i < count.
  std::vector<std::uint64_t> episode_seeds(std::uint64_t run_seed) const;
};

struct CurriculumConfig {
  bool enabled = true;
  double initial_length_s = 30.0;
  double increment_s = 10.0;
  std::size_t increments = 2;
  double final_length_s = 50.0;
  std::size_t passes_per_round = 3;
  bool lr_halving = true;

  /// One entry per round. Disabled: a single round at final_length_s.
  std::vector<double> round_lengths() const;
  void validate() const;
};

enum class RewardWeighting { immediate, return_to_go };

struct PolicyConfig {
  std::size_t hidden = 1024;
  std::size_t history = 10;
  double learning_rate = 1e-4;
  double weight_decay = 1e-4;
  double clip_norm = 10.0;
  double sigma_cap = 0.1;
  double sigma_min = 1e-3;
  std::string warm_start = "config_b";  // preset name, or "none"
};

struct ConvergenceConfig {
  double alpha = 0.2;
  std::size_t window = 100;
  double epsilon = 5e-3;
  double std_threshold = 7e-3;
};

struct RunConfig {
  std::filesystem::path topology;  // resolved against the config file directory
  std::filesystem::path se_table;  // empty: built-in default table
  std::uint64_t run_seed = 1;
  SeedSet train_seeds{100, 0};
  SeedSet validation_seeds{3, 100000};
  SeedSet eval_seeds{100, 200000};
  std::size_t n_ues = 500;
  int pri = 1;
  int eval_pri = 0;                 // 0: same as pri
  double eval_length_s = 60.0;
  double dt = 1.0;
  TrafficConfig traffic;
  bool eval_mobility = false;
  PropagationConfig propagation;    // obstruction_enabled applies to training
  bool eval_obstruction = false;
  ReselectionParams fixed;          // t_resel, s_intra, s_inter
  std::string reference = "config_b";
  RewardWeights weights;
  std::size_t baseline_window = 2;
  RewardWeighting weighting = RewardWeighting::immediate;
  PolicyConfig policy;
  CurriculumConfig curriculum;
  ConvergenceConfig convergence;
  std::size_t checkpoint_every = 50;
  std::size_t validate_every = 50;
  std::size_t max_episodes = 0;  // 0: unlimited
  std::size_t jobs = 1;

  void validate() const;
  int effective_eval_pri() const { return eval_pri > 0 ? eval_pri : pri; }
};

/// Parses JSON. Unknown keys are rejected; errors carry the field path.
RunConfig parse_run_config(const std::string& json_text, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);
/// Canonical JSON (sorted keys, absolute paths); hashed into checkpoints.
std::string run_config_json(const RunConfig& cfg);
std::uint64_t run_config_hash(const RunConfig& cfg);

}  // namespace cellpilot

#endif  // CELLPILOT_RUN_CONFIG_HPP_
