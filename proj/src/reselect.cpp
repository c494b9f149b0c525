// Copyright (c) 2026, The cellpilot Authors
// SPDX-License-Identifier: Apache-2.0

#include "cellpilot/reselect.hpp"

#include <algorithm>
#include <cmath>

#include "cellpilot/errors.hpp"

namespace cellpilot {

ParamRange tunable_range(Tunable p) {
  switch (p) {
    case Tunable::q_hyst:
    case Tunable::q_offset:
      return {0.0, 30.0};
    default:
      return {-100.0, 0.0};
  }
}

const char* tunable_name(Tunable p) {
  switch (p) {
    case Tunable::t_xhigh: return "t_xhigh";
    case Tunable::t_xlow: return "t_xlow";
    case Tunable::t_slow: return "t_slow";
    case Tunable::q_hyst: return "q_hyst";
    case Tunable::q_offset: return "q_offset";
    case Tunable::q_rxlevmin: return "q_rxlevmin";
  }
  return "?";
}

double ReselectionParams::get(Tunable p) const {
  switch (p) {
    case Tunable::t_xhigh: return t_xhigh;
    case Tunable::t_xlow: return t_xlow;
    case Tunable::t_slow: return t_slow;
    case Tunable::q_hyst: return q_hyst;
    case Tunable::q_offset: return q_offset;
    case Tunable::q_rxlevmin: return q_rxlevmin;
  }
  return 0.0;
}

void ReselectionParams::set(Tunable p, double v) {
  switch (p) {
    case Tunable::t_xhigh: t_xhigh = v; break;
    case Tunable::t_xlow: t_xlow = v; break;
    case Tunable::t_slow: t_slow = v; break;
    case Tunable::q_hyst: q_hyst = v; break;
    case Tunable::q_offset: q_offset = v; break;
    case Tunable::q_rxlevmin: q_rxlevmin = v; break;
  }
}

std::array<double, kTunableCount> ReselectionParams::tunables() const {
  std::array<double, kTunableCount> out{};
  for (std::size_t i = 0; i < kTunableCount; ++i) out[i] = get(static_cast<Tunable>(i));
  return out;
}

std::uint32_t clamp_to_ranges(ReselectionParams& p) {
  std::uint32_t mask = 0;
  for (std::size_t i = 0; i < kTunableCount; ++i) {
    const auto which = static_cast<Tunable>(i);
    const auto r = tunable_range(which);
    const double v = p.get(which);
    if (std::isnan(v)) {
      p.set(which, r.lo);
      mask |= 1u << i;
    } else if (v < r.lo || v > r.hi) {
      p.set(which, std::clamp(v, r.lo, r.hi));
      mask |= 1u << i;
    }
  }
  return mask;
}

bool in_ranges(const ReselectionParams& p) {
  ReselectionParams copy = p;
  return clamp_to_ranges(copy) == 0;
}

HeuristicPreset preset_config_b() {
  ReselectionParams p;
  p.q_hyst = 3.0;
  p.q_offset = 14.0;
  p.q_rxlevmin = -60.0;
  p.t_xhigh = -56.0;
  p.t_xlow = -58.0;
  p.t_slow = -54.0;
  return {"config_b", p};
}

HeuristicPreset preset_config_a() {
  ReselectionParams p;
  p.q_hyst = 3.0;
  p.q_offset = 20.0;
  p.q_rxlevmin = -60.0;
  p.t_xhigh = -58.0;
  p.t_xlow = -60.0;
  p.t_slow = -58.0;
  return {"config_a", p};
}

HeuristicPreset preset_by_name(const std::string& name) {
  if (name == "config_b") return preset_config_b();
  if (name == "config_a") return preset_config_a();
  throw ValidationError("unknown heuristic preset '" + name + "' (expected config_a or config_b)");
}

bool is_suitable(double rx_dbm, const ReselectionParams& params) {
  return rx_dbm - params.q_rxlevmin > 0.0;
}

std::optional<std::size_t> initial_select(std::span<const double> rx_dbm,
                                          std::span<const Cell> cells,
                                          const ReselectionParams& params) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!is_suitable(rx_dbm[i], params)) continue;
    if (!best) {
      best = i;
      continue;
    }
    const Cell& b = cells[*best];
    if (cells[i].priority > b.priority ||
        (cells[i].priority == b.priority && rx_dbm[i] > rx_dbm[*best])) {
      best = i;
    }
  }
  return best;
}

const char* criterion_name(Criterion c) {
  switch (c) {
    case Criterion::higher: return "higher";
    case Criterion::equal: return "equal";
    case Criterion::lower: return "lower";
  }
  return "?";
}

bool ReselectTimers::all_zero() const {
  return std::all_of(elapsed_.begin(), elapsed_.end(), [](double v) { return v == 0.0; });
}

ReselectionDecision step_reselection(std::size_t serving, ReselectTimers& timers,
                                     std::span<const double> rx_dbm,
                                     std::span<const Cell> cells,
                                     const ReselectionParams& params, double dt) {
  const std::size_t n = cells.size();
  if (timers.cells() != n) timers = ReselectTimers(n);

  const Cell& srv = cells[serving];
  const double rx_srv = rx_dbm[serving];
  const double s_rxlev_srv = rx_srv - params.q_rxlevmin;
  const double rank_srv = rx_srv + params.q_hyst;

  for (std::size_t j = 0; j < n; ++j) {
    bool higher = false;
    bool equal = false;
    bool lower = false;
    if (j != serving && is_suitable(rx_dbm[j], params)) {
      const Cell& nbr = cells[j];
      if (nbr.priority > srv.priority) {
        higher = rx_dbm[j] > params.t_xhigh;
      } else if (nbr.priority == srv.priority) {
        equal = rx_dbm[j] - params.q_offset > rank_srv;
      } else {
        const double gate =
            nbr.frequency_hz == srv.frequency_hz ? params.s_intra : params.s_inter;
        lower = s_rxlev_srv < gate && rx_srv < params.t_slow && rx_dbm[j] > params.t_xlow;
      }
    }
    double& th = timers.at(Criterion::higher, j);
    double& te = timers.at(Criterion::equal, j);
    double& tl = timers.at(Criterion::lower, j);
    th = higher ? th + dt : 0.0;
    te = equal ? te + dt : 0.0;
    tl = lower ? tl + dt : 0.0;
  }

  // Candidate order: higher priority first, then stronger signal, then lower
  // index. Within the equal criterion priority is constant, so this reduces
  // to the highest neighbour rank.
  auto pick = [&](Criterion c) -> std::optional<std::size_t> {
    std::optional<std::size_t> best;
    for (std::size_t j = 0; j < n; ++j) {
      const double e = timers.elapsed(c, j);
      if (e <= 0.0 || e < params.t_resel) continue;
      if (!best || cells[j].priority > cells[*best].priority ||
          (cells[j].priority == cells[*best].priority && rx_dbm[j] > rx_dbm[*best])) {
        best = j;
      }
    }
    return best;
  };

  for (Criterion c : {Criterion::higher, Criterion::equal, Criterion::lower}) {
    if (auto target = pick(c)) {
      timers.clear();
      return {*target, c};
    }
  }
  return {serving, std::nullopt};
}

std::vector<ReselectionEvent> run_reselection_trace(
    const std::vector<std::vector<double>>& trace, std::span<const Cell> cells,
    const ReselectionParams& params, std::size_t initial_serving, double dt) {
  std::vector<ReselectionEvent> events;
  ReselectTimers timers(cells.size());
  std::size_t serving = initial_serving;
  for (std::size_t step = 0; step < trace.size(); ++step) {
    const auto d = step_reselection(serving, timers, trace[step], cells, params, dt);
    if (d.fired) {
      events.push_back({step, serving, d.serving, *d.fired});
      serving = d.serving;
    }
  }
  return events;
}

}  // namespace cellpilot
