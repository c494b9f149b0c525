// Copyright (c) 2026, The cellpilot Authors
// SPDX-License-Identifier: Apache-2.0

#include "cellpilot/simcore.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "cellpilot/errors.hpp"
#include "cellpilot/text_util.hpp"

namespace cellpilot {

std::size_t EpisodeConfig::steps() const {
  return static_cast<std::size_t>(std::llround(length_s / dt));
}

void EpisodeConfig::validate() const {
  if (!(length_s > 0.0)) throw ValidationError("episode: length must be > 0");
  if (!(dt > 0.0)) throw ValidationError("episode: dt must be > 0");
  if (pri < 1) throw ValidationError("episode: pri must be >= 1");
  if (n_ues == 0) throw ValidationError("episode: n_ues must be > 0");
  if (steps() == 0) throw ValidationError("episode: length shorter than one step");
  traffic.validate();
  propagation.validate();
}

std::string EpisodeConfig::canonical() const {
  std::ostringstream os;
  os << "seed=" << episode_seed << ";n_ues=" << n_ues << ";length=" << format_double(length_s)
     << ";pri=" << pri << ";dt=" << format_double(dt)
     << ";lambda_idle=" << format_double(traffic.lambda_idle)
     << ";lambda_active=" << format_double(traffic.lambda_active)
     << ";mobility=" << traffic.mobility_enabled << ";speed=" << format_double(traffic.speed_kmh)
     << ";spread=" << format_double(traffic.speed_spread)
     << ";street_weight=" << format_double(traffic.street_weight)
     << ";main_lobe=" << format_double(propagation.main_lobe_gain_db)
     << ";off_lobe=" << format_double(propagation.off_lobe_gain_db)
     << ";wall_loss=" << format_double(propagation.wall_loss_db)
     << ";noise=" << format_double(propagation.noise_density_dbm_hz)
     << ";obstruction=" << propagation.obstruction_enabled
     << ";t_resel=" << format_double(fixed.t_resel) << ";s_intra=" << format_double(fixed.s_intra)
     << ";s_inter=" << format_double(fixed.s_inter);
  return os.str();
}

Controller constant_controller(const ReselectionParams& params) {
  return [params](const ControlContext&) { return params; };
}

namespace {

// Per-UE link quantities for every cell.
struct LinkTable {
  std::size_t cells = 0;
  std::vector<double> rx;  // [ue * cells + cell], dBm
  std::vector<double> se;  // [ue * cells + cell], bit/s/Hz

  std::span<const double> rx_row(std::size_t ue) const { return {rx.data() + ue * cells, cells}; }
};

// Building bounding boxes let the wall count skip most polygons.
struct WallIndex {
  const Topology* topo;
  std::vector<Rect> boxes;

  explicit WallIndex(const Topology& t) : topo(&t) {
    for (const auto& b : t.buildings) boxes.push_back(bounding_box(b));
  }

  int crossings(Point a, Point b) const {
    const Rect seg{std::min(a.x, b.x), std::min(a.y, b.y), std::max(a.x, b.x), std::max(a.y, b.y)};
    int count = 0;
    for (std::size_t i = 0; i < boxes.size(); ++i) {
      const Rect& r = boxes[i];
      if (r.max_x < seg.min_x || r.min_x > seg.max_x || r.max_y < seg.min_y || r.min_y > seg.max_y) {
        continue;
      }
      count += segment_polygon_crossings(a, b, topo->buildings[i]);
    }
    return count;
  }
};

void fill_links(LinkTable& links, std::size_t ue, Point pos, const Topology& topo,
                const WallIndex& walls, const SeTable& se_table, const PropagationConfig& prop) {
  for (std::size_t c = 0; c < links.cells; ++c) {
    const Cell& cell = topo.cells[c];
    const int w = prop.obstruction_enabled && !(pos == cell.position)
                      ? walls.crossings(cell.position, pos)
                      : 0;
    const double rx = rx_power_dbm(cell, pos, w, prop);
    links.rx[ue * links.cells + c] = rx;
    links.se[ue * links.cells + c] =
        se_table.lookup(snr_db(rx, cell.bandwidth_hz, prop));
  }
}

}  // namespace

EpisodeResult run_episode(const Topology& topo, const SeTable& se_table, const EpisodeConfig& cfg,
                          const Controller& controller) {
  cfg.validate();
  const std::size_t n_cells = topo.cell_count();
  const std::size_t n_steps = cfg.steps();

  EpisodeResult result;
  result.pri = cfg.pri;
  result.dt = cfg.dt;
  result.sdt = cfg.traffic.mean_dwell();
  result.steps.reserve(n_steps);

  std::vector<UeState> ues = init_population(cfg.n_ues, topo, cfg.episode_seed, cfg.traffic);
  const WallIndex walls(topo);
  LinkTable links{n_cells, std::vector<double>(cfg.n_ues * n_cells),
                  std::vector<double>(cfg.n_ues * n_cells)};
  for (const auto& ue : ues) fill_links(links, ue.id, ue.position, topo, walls, se_table, cfg.propagation);

  ReselectionParams params = cfg.fixed;
  std::vector<std::vector<ActiveUe>> per_cell(n_cells);

  for (std::size_t step = 0; step < n_steps; ++step) {
    const double t = static_cast<double>(step) * cfg.dt;

    if (step % static_cast<std::size_t>(cfg.pri) == 0) {
      const ControlContext ctx{result.updates.size(), step, result.steps};
      UpdateRecord rec;
      rec.update_index = result.updates.size();
      rec.step = step;
      rec.requested = controller(ctx);
      // Fixed fields always come from the episode config.
      rec.requested.t_resel = cfg.fixed.t_resel;
      rec.requested.s_intra = cfg.fixed.s_intra;
      rec.requested.s_inter = cfg.fixed.s_inter;
      rec.applied = rec.requested;
      rec.clamp_mask = clamp_to_ranges(rec.applied);
      params = rec.applied;
      result.updates.push_back(rec);
    }

    if (step > 0 && cfg.traffic.mobility_enabled) {
      step_mobility(ues, topo, cfg.dt, cfg.traffic);
      for (const auto& ue : ues) {
        if (!ue.indoor) fill_links(links, ue.id, ue.position, topo, walls, se_table, cfg.propagation);
      }
    }

    step_modes(ues, t, cfg.dt, cfg.traffic);

    StepMetrics m;
    m.time = t;
    m.per_cell_active.assign(n_cells, 0);
    m.per_cell_camped.assign(n_cells, 0);
    for (auto& ue : ues) {
      const auto rx = links.rx_row(ue.id);
      if (!ue.serving || !is_suitable(rx[*ue.serving], params)) {
        const auto chosen = initial_select(rx, topo.cells, params);
        if (ue.serving && chosen && *chosen != *ue.serving) ++m.reselection_events;
        ue.serving = chosen;
        ue.timers.clear();
      } else if (ue.mode == UeMode::idle) {
        const auto d = step_reselection(*ue.serving, ue.timers, rx, topo.cells, params, cfg.dt);
        if (d.fired) {
          ++m.reselection_events;
          ue.serving = d.serving;
        }
      } else {
        ue.timers.clear();
      }
    }

    for (auto& list : per_cell) list.clear();
    for (const auto& ue : ues) {
      if (ue.mode == UeMode::active) ++m.active_count;
      else ++m.idle_count;
      if (!ue.serving) {
        ++m.unserved_count;
        continue;
      }
      ++m.per_cell_camped[*ue.serving];
      if (ue.mode == UeMode::active) {
        ++m.per_cell_active[*ue.serving];
        per_cell[*ue.serving].push_back({ue.id, links.se[ue.id * n_cells + *ue.serving]});
      }
    }

    std::vector<Allocation> allocs;
    allocs.reserve(n_cells);
    for (std::size_t c = 0; c < n_cells; ++c) {
      allocs.push_back(allocate(topo.cells[c].bandwidth_hz, per_cell[c]));
    }
    const NetworkThroughput net = network_throughput(allocs, m.active_count);
    m.total_tput_bps = net.total_bps;
    m.per_ue_mean_tput_bps = net.per_ue_mean_bps;
    m.per_cell_std_bps = net.per_cell_std_bps;
    m.per_cell_tput_bps = net.per_cell_bps;
    m.per_cell_avail_bw_hz.reserve(n_cells);
    for (const auto& a : allocs) m.per_cell_avail_bw_hz.push_back(a.available_bandwidth_hz);
    result.steps.push_back(std::move(m));
  }
  return result;
}

std::string trajectory_csv(const EpisodeResult& r) {
  std::ostringstream os;
  const std::size_t cells = r.steps.empty() ? 0 : r.steps.front().per_cell_tput_bps.size();
  os << "time_s,total_tput_bps,per_ue_mean_tput_bps,per_cell_std_bps,active,idle,unserved,"
        "reselections";
  for (std::size_t c = 0; c < cells; ++c) os << ",tput_c" << c;
  for (std::size_t c = 0; c < cells; ++c) os << ",avail_bw_c" << c;
  for (std::size_t c = 0; c < cells; ++c) os << ",active_c" << c;
  os << "\n";
  for (const auto& m : r.steps) {
    os << format_double(m.time) << ',' << format_double(m.total_tput_bps) << ','
       << format_double(m.per_ue_mean_tput_bps) << ',' << format_double(m.per_cell_std_bps) << ','
       << m.active_count << ',' << m.idle_count << ',' << m.unserved_count << ','
       << m.reselection_events;
    for (double v : m.per_cell_tput_bps) os << ',' << format_double(v);
    for (double v : m.per_cell_avail_bw_hz) os << ',' << format_double(v);
    for (auto v : m.per_cell_active) os << ',' << v;
    os << "\n";
  }
  return os.str();
}

std::string updates_csv(const EpisodeResult& r,
                        const std::vector<std::pair<std::string, std::vector<double>>>& extra) {
  std::ostringstream os;
  os << "update,step,time_s";
  for (std::size_t i = 0; i < kTunableCount; ++i) os << ',' << tunable_name(static_cast<Tunable>(i));
  os << ",clamp_mask";
  for (const auto& [name, _] : extra) os << ',' << name;
  os << "\n";
  for (std::size_t u = 0; u < r.updates.size(); ++u) {
    const auto& rec = r.updates[u];
    os << rec.update_index << ',' << rec.step << ',' << format_double(rec.step * r.dt);
    for (double v : rec.applied.tunables()) os << ',' << format_double(v);
    os << ',' << rec.clamp_mask;
    for (const auto& [_, col] : extra) os << ',' << (u < col.size() ? format_double(col[u]) : "");
    os << "\n";
  }
  return os.str();
}

namespace {

void write_params(std::ostream& os, const ReselectionParams& p) {
  for (double v : p.tunables()) os << ' ' << format_double(v);
  os << ' ' << format_double(p.t_resel) << ' ' << format_double(p.s_intra) << ' '
     << format_double(p.s_inter);
}

ReselectionParams read_params(const std::vector<std::string>& tok, std::size_t& i) {
  ReselectionParams p;
  for (std::size_t k = 0; k < kTunableCount; ++k) p.set(static_cast<Tunable>(k), parse_double(tok.at(i++)));
  p.t_resel = parse_double(tok.at(i++));
  p.s_intra = parse_double(tok.at(i++));
  p.s_inter = parse_double(tok.at(i++));
  return p;
}

}  // namespace

std::string serialize_result(const EpisodeResult& r) {
  std::ostringstream os;
  const std::size_t cells = r.steps.empty() ? 0 : r.steps.front().per_cell_tput_bps.size();
  os << "cellpilot-episode 1\n";
  os << "meta " << r.pri << ' ' << format_double(r.dt) << ' ' << format_double(r.sdt) << ' '
     << cells << ' ' << r.steps.size() << ' ' << r.updates.size() << "\n";
  for (const auto& m : r.steps) {
    os << "step " << format_double(m.time) << ' ' << format_double(m.total_tput_bps) << ' '
       << format_double(m.per_ue_mean_tput_bps) << ' ' << format_double(m.per_cell_std_bps) << ' '
       << m.active_count << ' ' << m.idle_count << ' ' << m.unserved_count << ' '
       << m.reselection_events;
    for (double v : m.per_cell_tput_bps) os << ' ' << format_double(v);
    for (double v : m.per_cell_avail_bw_hz) os << ' ' << format_double(v);
    for (auto v : m.per_cell_active) os << ' ' << v;
    for (auto v : m.per_cell_camped) os << ' ' << v;
    os << "\n";
  }
  for (const auto& u : r.updates) {
    os << "update " << u.update_index << ' ' << u.step << ' ' << u.clamp_mask;
    write_params(os, u.requested);
    write_params(os, u.applied);
    os << "\n";
  }
  return os.str();
}

EpisodeResult deserialize_result(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "cellpilot-episode 1") {
    throw CorruptFileError("episode record: bad header");
  }
  EpisodeResult r;
  std::size_t cells = 0;
  std::size_t n_steps = 0;
  std::size_t n_updates = 0;
  try {
    if (!std::getline(in, line)) throw CorruptFileError("episode record: missing meta");
    auto tok = split_ws(line);
    if (tok.size() != 7 || tok[0] != "meta") throw CorruptFileError("episode record: bad meta");
    r.pri = static_cast<int>(parse_int(tok[1]));
    r.dt = parse_double(tok[2]);
    r.sdt = parse_double(tok[3]);
    cells = static_cast<std::size_t>(parse_int(tok[4]));
    n_steps = static_cast<std::size_t>(parse_int(tok[5]));
    n_updates = static_cast<std::size_t>(parse_int(tok[6]));
    for (std::size_t s = 0; s < n_steps; ++s) {
      if (!std::getline(in, line)) throw CorruptFileError("episode record: truncated steps");
      tok = split_ws(line);
      if (tok.size() != 9 + 4 * cells || tok[0] != "step") {
        throw CorruptFileError("episode record: bad step row");
      }
      StepMetrics m;
      std::size_t i = 1;
      m.time = parse_double(tok[i++]);
      m.total_tput_bps = parse_double(tok[i++]);
      m.per_ue_mean_tput_bps = parse_double(tok[i++]);
      m.per_cell_std_bps = parse_double(tok[i++]);
      m.active_count = static_cast<std::size_t>(parse_int(tok[i++]));
      m.idle_count = static_cast<std::size_t>(parse_int(tok[i++]));
      m.unserved_count = static_cast<std::size_t>(parse_int(tok[i++]));
      m.reselection_events = static_cast<std::size_t>(parse_int(tok[i++]));
      for (std::size_t c = 0; c < cells; ++c) m.per_cell_tput_bps.push_back(parse_double(tok[i++]));
      for (std::size_t c = 0; c < cells; ++c) m.per_cell_avail_bw_hz.push_back(parse_double(tok[i++]));
      for (std::size_t c = 0; c < cells; ++c) {
        m.per_cell_active.push_back(static_cast<std::size_t>(parse_int(tok[i++])));
      }
      for (std::size_t c = 0; c < cells; ++c) {
        m.per_cell_camped.push_back(static_cast<std::size_t>(parse_int(tok[i++])));
      }
      r.steps.push_back(std::move(m));
    }
    for (std::size_t u = 0; u < n_updates; ++u) {
      if (!std::getline(in, line)) throw CorruptFileError("episode record: truncated updates");
      tok = split_ws(line);
      if (tok.size() != 4 + 18 || tok[0] != "update") {
        throw CorruptFileError("episode record: bad update row");
      }
      UpdateRecord rec;
      rec.update_index = static_cast<std::size_t>(parse_int(tok[1]));
      rec.step = static_cast<std::size_t>(parse_int(tok[2]));
      rec.clamp_mask = static_cast<std::uint32_t>(parse_int(tok[3]));
      std::size_t i = 4;
      rec.requested = read_params(tok, i);
      rec.applied = read_params(tok, i);
      r.updates.push_back(rec);
    }
  } catch (const std::invalid_argument& e) {
    throw CorruptFileError(std::string("episode record: ") + e.what());
  }
  return r;
}

ReferenceCache ReferenceCache::from_env() {
  if (const char* dir = std::getenv("CELLPILOT_CACHE"); dir && *dir) {
    return ReferenceCache(std::filesystem::path(dir));
  }
  return ReferenceCache(std::nullopt);
}

std::string ReferenceCache::key(const Topology& topo, const SeTable& se_table,
                                const EpisodeConfig& cfg, const HeuristicPreset& preset) const {
  std::uint64_t h = fnv1a64(cfg.canonical());
  h = fnv1a64(to_text(topo), h);
  h = fnv1a64(se_table.to_text(), h);
  std::ostringstream params;
  write_params(params, preset.params);
  h = fnv1a64(params.str(), h);
  return "ref-" + std::to_string(cfg.episode_seed) + "-" + preset.name + "-" + hex64(h);
}

std::optional<std::filesystem::path> ReferenceCache::path_for(const std::string& key) const {
  if (!dir_) return std::nullopt;
  return *dir_ / (key + ".episode");
}

EpisodeResult ReferenceCache::get_or_run(const Topology& topo, const SeTable& se_table,
                                         const EpisodeConfig& cfg, const HeuristicPreset& preset) {
  const std::string k = key(topo, se_table, cfg, preset);
  {
    std::lock_guard lock(mu_);
    if (auto it = memory_.find(k); it != memory_.end()) return it->second;
  }
  const auto path = path_for(k);
  if (path && std::filesystem::exists(*path)) {
    EpisodeResult r;
    try {
      r = deserialize_result(read_file(*path));
    } catch (const Error& e) {
      throw IoError("reference cache '" + path->string() + "': " + e.what());
    }
    std::lock_guard lock(mu_);
    return memory_.emplace(k, std::move(r)).first->second;
  }
  EpisodeResult r = run_episode(topo, se_table, cfg, constant_controller(preset.params));
  if (path) {
    try {
      write_file(*path, serialize_result(r));
    } catch (const std::exception& e) {
      throw IoError("reference cache '" + path->string() + "': " + e.what());
    }
  }
  std::lock_guard lock(mu_);
  return memory_.emplace(k, std::move(r)).first->second;
}

EpisodeResult run_heuristic_reference(const Topology& topo, const SeTable& se_table,
                                      const EpisodeConfig& cfg, const HeuristicPreset& preset,
                                      ReferenceCache* cache) {
  if (!in_ranges(preset.params)) {
    throw ValidationError("preset '" + preset.name + "' has parameters outside their ranges");
  }
  if (cache) return cache->get_or_run(topo, se_table, cfg, preset);
  return run_episode(topo, se_table, cfg, constant_controller(preset.params));
}

}  // namespace cellpilot
