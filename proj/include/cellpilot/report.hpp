// Copyright (c) 2026, The cellpilot Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CELLPILOT_REPORT_HPP_
#define CELLPILOT_REPORT_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "cellpilot/run_config.hpp"
#include "cellpilot/trainer.hpp"

namespace cellpilot {

/// seed_index,seed,tput_gain,lb_gain,ue_gain
std::string gains_csv(const EvalReport& rep);
EvalReport parse_gains_csv(const std::string& text);

/// metric,median,p05,p95 for tput, lb and ue.
std::string gains_summary_csv(const EvalReport& rep);

/// One row per UE count with the median and interval of every metric.
std::string sweep_csv(const std::vector<std::pair<std::size_t, EvalReport>>& points);

/// episode,reward,ewma,round from a training log.
std::string convergence_csv(const std::string& train_log_text);

/// Paired per-seed comparison of a base and a variant evaluation on the same
/// seeds: seed_index,seed,base_*,variant_*,delta_* for each metric.
std::string ablation_csv(const EvalReport& base, const EvalReport& variant);

struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  std::string version;
  std::string config_json;  // canonical run config, empty when not applicable
  std::string topology_hash;
  std::uint64_t run_seed = 0;
  std::vector<std::uint64_t> train_seeds;
  std::vector<std::uint64_t> validation_seeds;
  std::vector<std::uint64_t> eval_seeds;
  std::vector<std::string> outputs;  // paths relative to the run directory
};

inline constexpr const char* kManifestName = "manifest.json";

std::string manifest_json(const RunManifest& m);
RunManifest parse_manifest(const std::string& text);
void write_manifest(const std::filesystem::path& dir, const RunManifest& m);
RunManifest read_manifest(const std::filesystem::path& dir);

/// Writes plot-ready files into <run_dir>/plots and returns their names.
/// Needs the manifest plus at least one of train_log.csv or gains.csv.
std::vector<std::string> write_report(const std::filesystem::path& run_dir);

/// Library version plus the git description captured at build time.
std::string version_string();

}  // namespace cellpilot

#endif  // CELLPILOT_REPORT_HPP_
