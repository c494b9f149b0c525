// Copyright (c) 2026, The cellpilot Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CELLPILOT_RESELECT_HPP_
#define CELLPILOT_RESELECT_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cellpilot/topology.hpp"

namespace cellpilot {

/// The six broadcast parameters the agent tunes, in action-vector order.
enum class Tunable : int { t_xhigh = 0, t_xlow, t_slow, q_hyst, q_offset, q_rxlevmin };
inline constexpr std::size_t kTunableCount = 6;

struct ParamRange {
  double lo;
  double hi;
};

/// Physical range of each tunable: thresholds in dBm over [-100, 0],
/// hysteresis and offset in dB over [0, 30].
ParamRange tunable_range(Tunable p);
const char* tunable_name(Tunable p);

/// Idle-mode (re)selection parameters, broadcast identically by every cell.
struct ReselectionParams {
  double t_xhigh = -56.0;     // dBm, threshold to move to a higher-priority cell
  double t_xlow = -58.0;      // dBm, target threshold to move to a lower-priority cell
  double t_slow = -54.0;      // dBm, serving threshold below which lower priority is allowed
  double q_hyst = 3.0;        // dB, serving-rank hysteresis
  double q_offset = 14.0;     // dB, neighbour-rank offset
  double q_rxlevmin = -60.0;  // dBm, suitability floor
  // Fixed, not part of the action space.
  double t_resel = 1.0;  // s
  double s_intra = 4.0;  // dB on S_rxlev
  double s_inter = 6.0;  // dB on S_rxlev

  double get(Tunable p) const;
  void set(Tunable p, double v);
  std::array<double, kTunableCount> tunables() const;

  friend bool operator==(const ReselectionParams&, const ReselectionParams&) = default;
};

/// Clamps each tunable into its range. Returns a bitmask with bit i set when
/// tunable i was out of range (NaN counts as out of range and maps to lo).
std::uint32_t clamp_to_ranges(ReselectionParams& p);
bool in_ranges(const ReselectionParams& p);

struct HeuristicPreset {
  std::string name;
  ReselectionParams params;
};

/// Operator reference configuration (the stronger heuristic).
HeuristicPreset preset_config_b();
/// Alternative operator configuration.
HeuristicPreset preset_config_a();
/// Looks up "config_a" / "config_b"; throws ValidationError otherwise.
HeuristicPreset preset_by_name(const std::string& name);

/// S_rxlev > 0.
bool is_suitable(double rx_dbm, const ReselectionParams& params);

/// Initial cell selection: the strongest suitable cell among the highest
/// priority that has any suitable cell. Ties go to the lowest index.
std::optional<std::size_t> initial_select(std::span<const double> rx_dbm,
                                          std::span<const Cell> cells,
                                          const ReselectionParams& params);

enum class Criterion : int { higher = 0, equal = 1, lower = 2 };
inline constexpr std::size_t kCriterionCount = 3;
const char* criterion_name(Criterion c);

/// Per-UE dwell timers, one per (criterion, target cell). Each entry is the
/// time its condition has held continuously; unmet conditions read 0.
class ReselectTimers {
 public:
  ReselectTimers() = default;
  explicit ReselectTimers(std::size_t cells) : elapsed_(kCriterionCount * cells, 0.0) {}

  double elapsed(Criterion c, std::size_t target) const {
    return elapsed_[static_cast<std::size_t>(c) * cells() + target];
  }
  double& at(Criterion c, std::size_t target) {
    return elapsed_[static_cast<std::size_t>(c) * cells() + target];
  }
  std::size_t cells() const { return elapsed_.size() / kCriterionCount; }
  void clear() { std::fill(elapsed_.begin(), elapsed_.end(), 0.0); }
  bool all_zero() const;

 private:
  std::vector<double> elapsed_;
};

struct ReselectionDecision {
  std::size_t serving;                  // possibly unchanged
  std::optional<Criterion> fired;       // set when a reselection happened
};

/// Advances one step of the idle-mode state machine for a UE camped on
/// `serving`, given this step's received powers. Checks, in order: higher
/// priority targets, equal-priority ranking, lower priority targets. At most
/// one reselection per call; timers are cleared after a reselection.
ReselectionDecision step_reselection(std::size_t serving, ReselectTimers& timers,
                                     std::span<const double> rx_dbm,
                                     std::span<const Cell> cells,
                                     const ReselectionParams& params, double dt);

struct ReselectionEvent {
  std::size_t step;
  std::size_t from;
  std::size_t to;
  Criterion criterion;

  friend bool operator==(const ReselectionEvent&, const ReselectionEvent&) = default;
};

/// Drives step_reselection over a per-step trace of received powers.
std::vector<ReselectionEvent> run_reselection_trace(
    const std::vector<std::vector<double>>& trace, std::span<const Cell> cells,
    const ReselectionParams& params, std::size_t initial_serving, double dt);

/// Independent reference for run_reselection_trace. Holds no timers: at every
/// step it re-derives, for each candidate, how long its condition has held by
/// scanning the trace backwards to the last reselection.
std::vector<ReselectionEvent> reselection_oracle(
    const std::vector<std::vector<double>>& trace, std::span<const Cell> cells,
    const ReselectionParams& params, std::size_t initial_serving, double dt);

}  // namespace cellpilot

#endif  // CELLPILOT_RESELECT_HPP_
