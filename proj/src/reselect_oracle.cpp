// Copyright (c) 2026, The cellpilot Authors
// SPDX-License-Identifier: Apache-2.0

// Reference evaluation of the reselection rules. Kept deliberately separate
// from step_reselection: no timer state, no shared helpers beyond the data
// types.

#include <algorithm>
#include <tuple>

#include "cellpilot/reselect.hpp"

namespace cellpilot {

namespace {

bool condition_holds(Criterion c, std::size_t target, std::size_t serving,
                     const std::vector<double>& rx, std::span<const Cell> cells,
                     const ReselectionParams& p) {
  if (target == serving) return false;
  const double s_target = rx[target] - p.q_rxlevmin;
  if (!(s_target > 0.0)) return false;
  const int pt = cells[target].priority;
  const int ps = cells[serving].priority;
  switch (c) {
    case Criterion::higher:
      return pt > ps && rx[target] > p.t_xhigh;
    case Criterion::equal: {
      const double r_nbr = rx[target] - p.q_offset;
      const double r_ser = rx[serving] + p.q_hyst;
      return pt == ps && r_nbr > r_ser;
    }
    case Criterion::lower: {
      if (!(pt < ps)) return false;
      const double s_serving = rx[serving] - p.q_rxlevmin;
      const bool same_freq = cells[target].frequency_hz == cells[serving].frequency_hz;
      const double search = same_freq ? p.s_intra : p.s_inter;
      return s_serving < search && rx[serving] < p.t_slow && rx[target] > p.t_xlow;
    }
  }
  return false;
}

int criterion_rank(Criterion c) {
  switch (c) {
    case Criterion::higher: return 0;
    case Criterion::equal: return 1;
    case Criterion::lower: return 2;
  }
  return 3;
}

}  // namespace

std::vector<ReselectionEvent> reselection_oracle(
    const std::vector<std::vector<double>>& trace, std::span<const Cell> cells,
    const ReselectionParams& params, std::size_t initial_serving, double dt) {
  std::vector<ReselectionEvent> events;
  std::size_t serving = initial_serving;
  long last_change = -1;

  for (std::size_t step = 0; step < trace.size(); ++step) {
    // (rank, -priority, -rx, index, criterion) for every qualifying candidate.
    std::vector<std::tuple<int, int, double, std::size_t, Criterion>> qualifying;
    for (Criterion c : {Criterion::lower, Criterion::equal, Criterion::higher}) {
      for (std::size_t j = 0; j < cells.size(); ++j) {
        long held = 0;
        for (long s = static_cast<long>(step); s > last_change; --s) {
          if (!condition_holds(c, j, serving, trace[static_cast<std::size_t>(s)], cells, params)) {
            break;
          }
          ++held;
        }
        if (held > 0 && static_cast<double>(held) * dt >= params.t_resel) {
          qualifying.emplace_back(criterion_rank(c), -cells[j].priority, -trace[step][j], j, c);
        }
      }
    }
    if (qualifying.empty()) continue;
    const auto best = *std::min_element(qualifying.begin(), qualifying.end());
    const std::size_t target = std::get<3>(best);
    events.push_back({step, serving, target, std::get<4>(best)});
    serving = target;
    last_change = static_cast<long>(step);
  }
  return events;
}

}  // namespace cellpilot
