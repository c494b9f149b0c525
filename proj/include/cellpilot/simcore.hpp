// Copyright (c) 2026, The cellpilot Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CELLPILOT_SIMCORE_HPP_
#define CELLPILOT_SIMCORE_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cellpilot/radio.hpp"
#include "cellpilot/reselect.hpp"
#include "cellpilot/scheduler.hpp"
#include "cellpilot/topology.hpp"
#include "cellpilot/traffic.hpp"

namespace cellpilot {

struct EpisodeConfig {
  std::uint64_t episode_seed = 0;
  std::size_t n_ues = 500;
  double length_s = 60.0;
  int pri = 1;        // steps between parameter updates
  double dt = 1.0;    // s
  TrafficConfig traffic;
  PropagationConfig propagation;
  /// Supplies the fixed fields (t_resel, s_intra, s_inter). Tunables are
  /// overwritten by the controller at every update.
  ReselectionParams fixed;

  std::size_t steps() const;
  void validate() const;
  /// Stable text form of everything that influences a trajectory except the
  /// controller; hashed together with topology and SE table for caching.
  std::string canonical() const;
};

/// Everything observable about the network after one step.
struct StepMetrics {
  double time = 0.0;
  double total_tput_bps = 0.0;
  double per_ue_mean_tput_bps = 0.0;
  double per_cell_std_bps = 0.0;
  std::size_t active_count = 0;
  std::size_t idle_count = 0;
  std::size_t unserved_count = 0;  // UEs with no suitable cell
  std::size_t reselection_events = 0;
  std::vector<double> per_cell_tput_bps;
  std::vector<double> per_cell_avail_bw_hz;
  std::vector<std::size_t> per_cell_active;  // ACTIVE UEs camped on the cell
  std::vector<std::size_t> per_cell_camped;  // all UEs camped on the cell

  friend bool operator==(const StepMetrics&, const StepMetrics&) = default;
};

struct UpdateRecord {
  std::size_t update_index = 0;
  std::size_t step = 0;
  ReselectionParams requested;
  ReselectionParams applied;
  std::uint32_t clamp_mask = 0;  // bit i: tunable i was clamped

  friend bool operator==(const UpdateRecord&, const UpdateRecord&) = default;
};

struct ControlContext {
  std::size_t update_index;
  std::size_t step;
  /// Metrics of all completed steps, oldest first.
  std::span<const StepMetrics> history;
};

/// Called every `pri` steps (starting with step 0) before the step executes.
using Controller = std::function<ReselectionParams(const ControlContext&)>;

Controller constant_controller(const ReselectionParams& params);

struct EpisodeResult {
  std::vector<StepMetrics> steps;
  std::vector<UpdateRecord> updates;
  int pri = 1;
  double dt = 1.0;
  double sdt = 5.0;  // mean UE state dwell time, s

  /// Update-to-dwell ratio: pri * dt / SDT.
  double udr() const { return pri * dt / sdt; }

  friend bool operator==(const EpisodeResult&, const EpisodeResult&) = default;
};

/// Per-step order: parameter update (every pri steps) -> mobility -> received
/// power snapshot -> mode switching -> (re)selection -> scheduling -> metrics.
/// Only IDLE UEs run the reselection state machine; any UE whose serving cell
/// is no longer suitable, or that has none, runs initial selection.
EpisodeResult run_episode(const Topology& topo, const SeTable& se_table, const EpisodeConfig& cfg,
                          const Controller& controller);

/// Trajectory CSV: one row per step.
std::string trajectory_csv(const EpisodeResult& r);
/// Per-update CSV: applied parameters and clamp mask. `extra` adds columns
/// (one value per update) after the fixed ones.
std::string updates_csv(const EpisodeResult& r,
                        const std::vector<std::pair<std::string, std::vector<double>>>& extra = {});

/// Lossless text serialization used by the reference cache.
std::string serialize_result(const EpisodeResult& r);
EpisodeResult deserialize_result(const std::string& text);

/// Cache of heuristic reference trajectories keyed by (seed, preset, config
/// hash). Memory-backed; additionally file-backed when a directory is set.
class ReferenceCache {
 public:
  ReferenceCache() = default;
  explicit ReferenceCache(std::optional<std::filesystem::path> dir) : dir_(std::move(dir)) {}
  /// Directory from $CELLPILOT_CACHE, memory-only when unset.
  static ReferenceCache from_env();

  const std::optional<std::filesystem::path>& dir() const { return dir_; }

  EpisodeResult get_or_run(const Topology& topo, const SeTable& se_table,
                           const EpisodeConfig& cfg, const HeuristicPreset& preset);
  std::string key(const Topology& topo, const SeTable& se_table, const EpisodeConfig& cfg,
                  const HeuristicPreset& preset) const;
  std::optional<std::filesystem::path> path_for(const std::string& key) const;

 private:
  std::optional<std::filesystem::path> dir_;
  std::map<std::string, EpisodeResult> memory_;
  std::mutex mu_;
};

/// Episode under constant preset parameters, via the cache when given.
EpisodeResult run_heuristic_reference(const Topology& topo, const SeTable& se_table,
                                      const EpisodeConfig& cfg, const HeuristicPreset& preset,
                                      ReferenceCache* cache = nullptr);

}  // namespace cellpilot

#endif  // CELLPILOT_SIMCORE_HPP_
