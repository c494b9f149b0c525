// Copyright (c) 2026, The cellpilot Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CELLPILOT_RLENV_HPP_
#define CELLPILOT_RLENV_HPP_

#include <array>
#include <cstdint>
#include <deque>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cellpilot/reselect.hpp"
#include "cellpilot/simcore.hpp"
#include "cellpilot/topology.hpp"

namespace cellpilot {

inline constexpr std::size_t kGlobalFeatures = 5;
inline constexpr std::size_t kActionSize = 2 * kTunableCount;

inline std::size_t frame_size(std::size_t cells) { return 2 * cells + kGlobalFeatures; }
inline std::size_t observation_size(std::size_t cells, std::size_t k) { return k * frame_size(cells); }

/// One frame: per cell [available_bw / cell_bw, active_on_cell / n_ues]
/// interleaved, then [mean avail ratio, std avail ratio, mean active ratio,
/// std active ratio, idle ratio].
std::vector<double> build_frame(const StepMetrics& m, std::span<const Cell> cells, std::size_t n_ues);

/// Last k frames of `history`, oldest first, zero-padded at the front when
/// fewer than k steps exist.
std::vector<double> build_observation(std::span<const StepMetrics> history,
                                      std::span<const Cell> cells, std::size_t n_ues,
                                      std::size_t k);

/// Tunables to [0, 1] and back, linearly over their ranges.
std::array<double, kTunableCount> normalize_params(const ReselectionParams& p);
ReselectionParams denormalize_params(std::span<const double> normalized,
                                     const ReselectionParams& fixed = {});

/// Clips the six mean components of a raw action to [0, 1] and maps them to
/// physical values. Fixed fields come from `fixed`.
ReselectionParams map_action(std::span<const double> raw, const ReselectionParams& fixed = {});
/// Standard deviations in normalized units: sigma_cap * raw[6 + i].
std::array<double, kTunableCount> map_sigma(std::span<const double> raw, double sigma_cap = 0.1);

struct RewardWeights {
  double tput = 0.4;
  double bal = 0.4;
  double ue = 0.2;

  void validate() const;
  static RewardWeights synchronous() { return {0.025, 0.95, 0.025}; }
};

/// Aggregates of one update interval (pri steps).
struct IntervalMetrics {
  double tput_bps = 0.0;        // mean total throughput
  double sigma_bps = 0.0;       // mean per-cell throughput std
  double ue_mean_bps = 0.0;     // mean per-UE throughput
  double avg_active = 0.0;      // mean ACTIVE count

  friend bool operator==(const IntervalMetrics&, const IntervalMetrics&) = default;
};

/// Interval i covers steps [i*pri, min((i+1)*pri, steps)).
std::vector<IntervalMetrics> interval_metrics(const EpisodeResult& r);

struct BaselineValues {
  double tput_bps = 0.0;
  double sigma_bps = 0.0;
  double ue_bps = 0.0;

  friend bool operator==(const BaselineValues&, const BaselineValues&) = default;
};

struct RewardBreakdown {
  double r_tput = 0.0;
  double r_bal = 0.0;
  double r_ue = 0.0;
  double r_total = 0.0;
  RewardWeights weights;
};

inline constexpr double kRewardEpsilon = 1.0;  // bit/s

RewardBreakdown compute_reward(const IntervalMetrics& m, const BaselineValues& b,
                               const RewardWeights& w, double ue_max);

/// Per-(seed, interval) ring buffers of the last `window` episode values.
class BaselineTable {
 public:
  explicit BaselineTable(std::size_t window = 2);

  std::size_t window() const { return window_; }
  bool has(std::uint64_t seed, std::size_t interval) const;
  /// Throws std::out_of_range for an untouched (seed, interval).
  BaselineValues mean(std::uint64_t seed, std::size_t interval) const;
  const std::deque<BaselineValues>& buffer(std::uint64_t seed, std::size_t interval) const;

  void push(std::uint64_t seed, std::size_t interval, const BaselineValues& v);
  void push(std::uint64_t seed, std::size_t interval, const IntervalMetrics& m);
  /// Initializes every untouched interval of `seed` from a reference run.
  void seed_missing(std::uint64_t seed, std::span<const IntervalMetrics> reference);
  std::size_t size() const { return table_.size(); }

  std::string serialize() const;
  static BaselineTable deserialize(const std::string& text);

  friend bool operator==(const BaselineTable&, const BaselineTable&) = default;

 private:
  std::size_t window_;
  std::map<std::pair<std::uint64_t, std::size_t>, std::deque<BaselineValues>> table_;
};

BaselineValues to_baseline(const IntervalMetrics& m);

}  // namespace cellpilot

#endif  // CELLPILOT_RLENV_HPP_
