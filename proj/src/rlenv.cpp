// Copyright (c) 2026, The cellpilot Authors
// SPDX-License-Identifier: Apache-2.0

#include "cellpilot/rlenv.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "cellpilot/errors.hpp"
#include "cellpilot/scheduler.hpp"
#include "cellpilot/text_util.hpp"

namespace cellpilot {

std::vector<double> build_frame(const StepMetrics& m, std::span<const Cell> cells,
                                std::size_t n_ues) {
  const std::size_t c_count = cells.size();
  if (m.per_cell_avail_bw_hz.size() != c_count || m.per_cell_active.size() != c_count) {
    throw ValidationError("observation: metrics cover " +
                          std::to_string(m.per_cell_avail_bw_hz.size()) + " cells, expected " +
                          std::to_string(c_count));
  }
  const double n = static_cast<double>(std::max<std::size_t>(n_ues, 1));
  std::vector<double> frame;
  frame.reserve(frame_size(c_count));
  std::vector<double> avail(c_count);
  std::vector<double> active(c_count);
  for (std::size_t c = 0; c < c_count; ++c) {
    avail[c] = std::clamp(m.per_cell_avail_bw_hz[c] / cells[c].bandwidth_hz, 0.0, 1.0);
    active[c] = std::clamp(static_cast<double>(m.per_cell_active[c]) / n, 0.0, 1.0);
    frame.push_back(avail[c]);
    frame.push_back(active[c]);
  }
  frame.push_back(mean_of(avail));
  frame.push_back(population_std(avail));
  frame.push_back(mean_of(active));
  frame.push_back(population_std(active));
  frame.push_back(std::clamp(static_cast<double>(m.idle_count) / n, 0.0, 1.0));
  return frame;
}

std::vector<double> build_observation(std::span<const StepMetrics> history,
                                      std::span<const Cell> cells, std::size_t n_ues,
                                      std::size_t k) {
  if (k == 0) throw ValidationError("observation: history length k must be >= 1");
  const std::size_t fs = frame_size(cells.size());
  std::vector<double> obs(k * fs, 0.0);
  const std::size_t have = std::min(k, history.size());
  const std::size_t first_slot = k - have;
  for (std::size_t i = 0; i < have; ++i) {
    const auto frame = build_frame(history[history.size() - have + i], cells, n_ues);
    std::copy(frame.begin(), frame.end(), obs.begin() + (first_slot + i) * fs);
  }
  return obs;
}

std::array<double, kTunableCount> normalize_params(const ReselectionParams& p) {
  std::array<double, kTunableCount> out{};
  for (std::size_t i = 0; i < kTunableCount; ++i) {
    const auto t = static_cast<Tunable>(i);
    const auto r = tunable_range(t);
    out[i] = (p.get(t) - r.lo) / (r.hi - r.lo);
  }
  return out;
}

ReselectionParams denormalize_params(std::span<const double> normalized,
                                     const ReselectionParams& fixed) {
  if (normalized.size() < kTunableCount) {
    throw ValidationError("action: expected at least 6 values, got " +
                          std::to_string(normalized.size()));
  }
  ReselectionParams p = fixed;
  for (std::size_t i = 0; i < kTunableCount; ++i) {
    const auto t = static_cast<Tunable>(i);
    const auto r = tunable_range(t);
    p.set(t, r.lo + normalized[i] * (r.hi - r.lo));
  }
  return p;
}

ReselectionParams map_action(std::span<const double> raw, const ReselectionParams& fixed) {
  std::array<double, kTunableCount> clipped{};
  if (raw.size() < kTunableCount) {
    throw ValidationError("action: expected 12 values, got " + std::to_string(raw.size()));
  }
  for (std::size_t i = 0; i < kTunableCount; ++i) {
    clipped[i] = std::isnan(raw[i]) ? 0.0 : std::clamp(raw[i], 0.0, 1.0);
  }
  return denormalize_params(clipped, fixed);
}

std::array<double, kTunableCount> map_sigma(std::span<const double> raw, double sigma_cap) {
  if (raw.size() != kActionSize) {
    throw ValidationError("action: expected 12 values, got " + std::to_string(raw.size()));
  }
  std::array<double, kTunableCount> out{};
  for (std::size_t i = 0; i < kTunableCount; ++i) {
    out[i] = sigma_cap * std::clamp(raw[kTunableCount + i], 0.0, 1.0);
  }
  return out;
}

void RewardWeights::validate() const {
  if (tput < 0.0 || bal < 0.0 || ue < 0.0) throw ValidationError("reward weights must be >= 0");
  if (std::abs(tput + bal + ue - 1.0) > 1e-9) {
    throw ValidationError("reward weights must sum to 1, got " + format_double(tput + bal + ue));
  }
}

std::vector<IntervalMetrics> interval_metrics(const EpisodeResult& r) {
  std::vector<IntervalMetrics> out;
  const std::size_t pri = static_cast<std::size_t>(std::max(r.pri, 1));
  for (std::size_t start = 0; start < r.steps.size(); start += pri) {
    const std::size_t end = std::min(start + pri, r.steps.size());
    IntervalMetrics m;
    for (std::size_t s = start; s < end; ++s) {
      const auto& st = r.steps[s];
      m.tput_bps += st.total_tput_bps;
      m.sigma_bps += st.per_cell_std_bps;
      m.ue_mean_bps += st.per_ue_mean_tput_bps;
      m.avg_active += static_cast<double>(st.active_count);
    }
    const double n = static_cast<double>(end - start);
    m.tput_bps /= n;
    m.sigma_bps /= n;
    m.ue_mean_bps /= n;
    m.avg_active /= n;
    out.push_back(m);
  }
  return out;
}

RewardBreakdown compute_reward(const IntervalMetrics& m, const BaselineValues& b,
                               const RewardWeights& w, double ue_max) {
  RewardBreakdown r;
  r.weights = w;
  r.r_tput = b.tput_bps > 0.0 ? m.tput_bps / b.tput_bps - 1.0 : 0.0;
  r.r_bal = std::max(b.sigma_bps, kRewardEpsilon) / std::max(m.sigma_bps, kRewardEpsilon) - 1.0;
  const double activity = ue_max > 0.0 ? std::min(1.0, m.avg_active / ue_max) : 0.0;
  r.r_ue = b.ue_bps > 0.0 ? (m.ue_mean_bps / b.ue_bps - 1.0) * activity : 0.0;
  r.r_total = w.tput * r.r_tput + w.bal * r.r_bal + w.ue * r.r_ue;
  return r;
}

BaselineValues to_baseline(const IntervalMetrics& m) {
  return {m.tput_bps, m.sigma_bps, m.ue_mean_bps};
}

BaselineTable::BaselineTable(std::size_t window) : window_(window) {
  if (window_ == 0) throw ValidationError("baseline window must be >= 1");
}

bool BaselineTable::has(std::uint64_t seed, std::size_t interval) const {
  return table_.count({seed, interval}) != 0;
}

const std::deque<BaselineValues>& BaselineTable::buffer(std::uint64_t seed,
                                                        std::size_t interval) const {
  auto it = table_.find({seed, interval});
  if (it == table_.end()) {
    throw std::out_of_range("baseline: no entry for seed " + std::to_string(seed) +
                            " interval " + std::to_string(interval));
  }
  return it->second;
}

BaselineValues BaselineTable::mean(std::uint64_t seed, std::size_t interval) const {
  // Incremental mean: exact when every buffered value is identical.
  BaselineValues m;
  double k = 0.0;
  for (const auto& v : buffer(seed, interval)) {
    k += 1.0;
    m.tput_bps += (v.tput_bps - m.tput_bps) / k;
    m.sigma_bps += (v.sigma_bps - m.sigma_bps) / k;
    m.ue_bps += (v.ue_bps - m.ue_bps) / k;
  }
  return m;
}

void BaselineTable::push(std::uint64_t seed, std::size_t interval, const BaselineValues& v) {
  auto& ring = table_[{seed, interval}];
  ring.push_back(v);
  while (ring.size() > window_) ring.pop_front();
}

void BaselineTable::push(std::uint64_t seed, std::size_t interval, const IntervalMetrics& m) {
  push(seed, interval, to_baseline(m));
}

void BaselineTable::seed_missing(std::uint64_t seed, std::span<const IntervalMetrics> reference) {
  for (std::size_t i = 0; i < reference.size(); ++i) {
    if (!has(seed, i)) push(seed, i, reference[i]);
  }
}

std::string BaselineTable::serialize() const {
  std::ostringstream os;
  os << "baselines " << window_ << ' ' << table_.size() << "\n";
  for (const auto& [key, ring] : table_) {
    os << key.first << ' ' << key.second << ' ' << ring.size();
    for (const auto& v : ring) {
      os << ' ' << format_double(v.tput_bps) << ' ' << format_double(v.sigma_bps) << ' '
         << format_double(v.ue_bps);
    }
    os << "\n";
  }
  return os.str();
}

BaselineTable BaselineTable::deserialize(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  try {
    if (!std::getline(in, line)) throw CorruptFileError("baselines: empty");
    auto tok = split_ws(line);
    if (tok.size() != 3 || tok[0] != "baselines") throw CorruptFileError("baselines: bad header");
    BaselineTable t(static_cast<std::size_t>(parse_int(tok[1])));
    const auto n = static_cast<std::size_t>(parse_int(tok[2]));
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::getline(in, line)) throw CorruptFileError("baselines: truncated");
      tok = split_ws(line);
      if (tok.size() < 3) throw CorruptFileError("baselines: bad row");
      const auto seed = std::stoull(tok[0]);
      const auto interval = static_cast<std::size_t>(parse_int(tok[1]));
      const auto len = static_cast<std::size_t>(parse_int(tok[2]));
      if (tok.size() != 3 + 3 * len) throw CorruptFileError("baselines: bad row length");
      for (std::size_t j = 0; j < len; ++j) {
        t.push(seed, interval,
               BaselineValues{parse_double(tok[3 + 3 * j]), parse_double(tok[4 + 3 * j]),
                              parse_double(tok[5 + 3 * j])});
      }
    }
    return t;
  } catch (const std::invalid_argument& e) {
    throw CorruptFileError(std::string("baselines: ") + e.what());
  } catch (const std::out_of_range& e) {
    throw CorruptFileError(std::string("baselines: ") + e.what());
  }
}

}  // namespace cellpilot
