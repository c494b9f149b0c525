// Copyright (c) 2026, The cellpilot Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <numeric>

#include "cellpilot/errors.hpp"
#include "cellpilot/radio.hpp"
#include "cellpilot/simcore.hpp"
#include "cellpilot/text_util.hpp"
#include "cellpilot/topology.hpp"
#include "test_support.hpp"

using namespace cellpilot;
using cellpilot::testing::data_dir;
using cellpilot::testing::scratch_dir;

namespace {

const Topology& small_topo() {
  static const Topology t = load_topology(data_dir() / "topologies" / "small.topo");
  return t;
}

EpisodeConfig small_config(std::uint64_t seed = 3) {
  EpisodeConfig c;
  c.episode_seed = seed;
  c.n_ues = 50;
  c.length_s = 30;
  return c;
}

}  // namespace

TEST_SUITE("simcore") {
  TEST_CASE("constant heuristic runs are bit-identical") {
    const SeTable se = SeTable::default_table();
    const auto a = run_episode(small_topo(), se, small_config(), constant_controller(preset_config_b().params));
    const auto b = run_episode(small_topo(), se, small_config(), constant_controller(preset_config_b().params));
    CHECK(a == b);
    CHECK(trajectory_csv(a) == trajectory_csv(b));
    CHECK(updates_csv(a) == updates_csv(b));
    CHECK(a.steps.size() == 30);
  }

  TEST_CASE("update-to-dwell ratio") {
    const SeTable se = SeTable::default_table();
    auto c = small_config();
    c.length_s = 20;
    CHECK(run_episode(small_topo(), se, c, constant_controller({})).udr() == doctest::Approx(0.2));
    c.pri = 10;
    const auto r = run_episode(small_topo(), se, c, constant_controller({}));
    CHECK(r.udr() == doctest::Approx(2.0));
    CHECK(r.updates.size() == 2);
  }

  TEST_CASE("per-step accounting") {
    const SeTable se = SeTable::default_table();
    auto c = small_config(8);
    c.traffic.mobility_enabled = true;
    const auto r = run_episode(small_topo(), se, c, constant_controller(preset_config_a().params));
    bool any_tput = false;
    for (const auto& m : r.steps) {
      CHECK(m.active_count + m.idle_count == c.n_ues);
      const auto on_cells =
          std::accumulate(m.per_cell_active.begin(), m.per_cell_active.end(), std::size_t{0});
      CHECK(on_cells <= m.active_count);
      const double sum = std::accumulate(m.per_cell_tput_bps.begin(), m.per_cell_tput_bps.end(), 0.0);
      CHECK(sum == doctest::Approx(m.total_tput_bps));
      for (std::size_t k = 0; k < small_topo().cell_count(); ++k) {
        CHECK(m.per_cell_avail_bw_hz[k] >= 0.0);
        CHECK(m.per_cell_avail_bw_hz[k] <= small_topo().cells[k].bandwidth_hz);
        if (m.per_cell_active[k] > 0) CHECK(m.per_cell_tput_bps[k] > 0.0);
      }
      if (on_cells > 0) any_tput = any_tput || m.total_tput_bps > 0.0;
    }
    CHECK(any_tput);
  }

  TEST_CASE("out-of-range controller output is clamped and flagged once") {
    const SeTable se = SeTable::default_table();
    auto c = small_config();
    c.length_s = 6;
    c.pri = 2;
    Controller wild = [](const ControlContext& ctx) {
      ReselectionParams p;
      if (ctx.update_index == 1) {
        p.q_offset = 45.0;
        p.t_xlow = -130.0;
      }
      return p;
    };
    const auto r = run_episode(small_topo(), se, c, wild);
    REQUIRE(r.updates.size() == 3);
    CHECK(r.updates[0].clamp_mask == 0u);
    CHECK(r.updates[1].clamp_mask ==
          ((1u << static_cast<int>(Tunable::q_offset)) | (1u << static_cast<int>(Tunable::t_xlow))));
    CHECK(r.updates[1].applied.q_offset == 30.0);
    CHECK(r.updates[1].applied.t_xlow == -100.0);
    CHECK(r.updates[1].requested.q_offset == 45.0);
    CHECK(r.updates[2].clamp_mask == 0u);
    CHECK(r.updates[1].step == 2);
  }

  TEST_CASE("fixed fields come from the episode config") {
    const SeTable se = SeTable::default_table();
    auto c = small_config();
    c.length_s = 3;
    c.fixed.t_resel = 2.0;
    Controller ctl = [](const ControlContext&) {
      ReselectionParams p;
      p.t_resel = 9.0;
      return p;
    };
    const auto r = run_episode(small_topo(), se, c, ctl);
    for (const auto& u : r.updates) CHECK(u.applied.t_resel == 2.0);
  }

  TEST_CASE("controller sees the completed history") {
    const SeTable se = SeTable::default_table();
    auto c = small_config();
    c.length_s = 5;
    std::vector<std::size_t> seen;
    Controller ctl = [&](const ControlContext& ctx) {
      seen.push_back(ctx.history.size());
      CHECK(ctx.step == ctx.history.size());
      return ReselectionParams{};
    };
    run_episode(small_topo(), se, c, ctl);
    CHECK(seen == std::vector<std::size_t>{0, 1, 2, 3, 4});
  }

  TEST_CASE("invalid episode configs") {
    auto c = small_config();
    c.pri = 0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    auto d = small_config();
    d.length_s = 0.0;
    CHECK_THROWS_AS(d.validate(), ValidationError);
  }

  TEST_CASE("result serialization round trip") {
    const SeTable se = SeTable::default_table();
    const auto r = run_episode(small_topo(), se, small_config(), constant_controller(preset_config_b().params));
    const std::string text = serialize_result(r);
    const auto back = deserialize_result(text);
    CHECK(back == r);
    CHECK(serialize_result(back) == text);
    CHECK_THROWS(deserialize_result("garbage"));
  }

  TEST_CASE("reference cache returns identical results from memory and disk") {
    const SeTable se = SeTable::default_table();
    const auto dir = scratch_dir("refcache");
    ReferenceCache cache(dir);
    const auto cfg = small_config();
    const auto a = cache.get_or_run(small_topo(), se, cfg, preset_config_b());
    const auto b = cache.get_or_run(small_topo(), se, cfg, preset_config_b());
    CHECK(serialize_result(a) == serialize_result(b));
    const auto path = cache.path_for(cache.key(small_topo(), se, cfg, preset_config_b()));
    REQUIRE(path.has_value());
    CHECK(std::filesystem::exists(*path));
    ReferenceCache fresh(dir);
    const auto c = fresh.get_or_run(small_topo(), se, cfg, preset_config_b());
    CHECK(serialize_result(c) == serialize_result(a));
    CHECK(cache.key(small_topo(), se, cfg, preset_config_b()) !=
          cache.key(small_topo(), se, cfg, preset_config_a()));
    auto other = cfg;
    other.episode_seed += 1;
    CHECK(cache.key(small_topo(), se, cfg, preset_config_b()) !=
          cache.key(small_topo(), se, other, preset_config_b()));
  }

  TEST_CASE("reference cache errors name the path") {
    const SeTable se = SeTable::default_table();
    const auto dir = scratch_dir("refcache-bad");
    ReferenceCache cache(dir);
    const auto cfg = small_config();
    const auto path = *cache.path_for(cache.key(small_topo(), se, cfg, preset_config_b()));
    write_file(path, "not an episode");
    CHECK_THROWS_WITH_AS(cache.get_or_run(small_topo(), se, cfg, preset_config_b()),
                         doctest::Contains(path.string().c_str()), IoError);
  }
}
