// Copyright (c) 2026, The cellpilot Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CELLPILOT_CHECKPOINT_HPP_
#define CELLPILOT_CHECKPOINT_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cellpilot/policy.hpp"
#include "cellpilot/rlenv.hpp"

namespace cellpilot {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Where training stands; enough to continue a run exactly.
struct TrainerProgress {
  std::size_t round = 0;
  std::size_t pass = 0;
  std::size_t position = 0;  // next index into `permutation`
  std::size_t episode = 0;   // episodes completed
  std::vector<std::size_t> permutation;
  std::vector<double> episode_rewards;  // one per completed episode
  std::size_t converged_at = 0;         // 0: not yet
  double best_score = 0.0;
  std::size_t best_episode = 0;
  bool has_best = false;

  friend bool operator==(const TrainerProgress&, const TrainerProgress&) = default;
};

/// Layout (all integers little-endian):
///   "CPCK" | u32 version | u64 config_hash | shape (4 x u64)
///   | u64 n | n x f64 params | u64 step | f64 lr | n x f64 m | n x f64 v
///   | string rng_state | string baselines | string progress
///   | u64 n_seeds | n_seeds x u64 | u64 FNV-1a of everything before it
/// Strings are u64 length + bytes.
struct PolicyCheckpoint {
  std::uint64_t config_hash = 0;
  PolicyNet net;
  AdamWState optimizer;
  std::string rng_state;
  BaselineTable baselines;
  TrainerProgress progress;
  std::vector<std::uint64_t> training_seeds;

  friend bool operator==(const PolicyCheckpoint&, const PolicyCheckpoint&) = default;
};

std::string encode_checkpoint(const PolicyCheckpoint& ck);
/// Throws VersionError or CorruptFileError.
PolicyCheckpoint decode_checkpoint(const std::string& bytes);

void save_checkpoint(const PolicyCheckpoint& ck, const std::filesystem::path& path);
PolicyCheckpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace cellpilot

#endif  // CELLPILOT_CHECKPOINT_HPP_
