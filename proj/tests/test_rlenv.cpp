// Copyright (c) 2026, The cellpilot Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <limits>

#include "cellpilot/radio.hpp"
#include "cellpilot/rlenv.hpp"
#include "cellpilot/simcore.hpp"
#include "test_support.hpp"

using namespace cellpilot;
using cellpilot::testing::data_dir;

namespace {

StepMetrics idle_metrics(const Topology& t, std::size_t n_ues) {
  StepMetrics m;
  m.idle_count = n_ues;
  for (const auto& c : t.cells) {
    m.per_cell_tput_bps.push_back(0.0);
    m.per_cell_avail_bw_hz.push_back(c.bandwidth_hz);
    m.per_cell_active.push_back(0);
    m.per_cell_camped.push_back(0);
  }
  return m;
}

}  // namespace

TEST_SUITE("rlenv") {
  TEST_CASE("observation length") {
    CHECK(observation_size(15, 10) == 350);
    CHECK(frame_size(6) == 17);
  }

  TEST_CASE("empty-load frame") {
    const Topology t = load_topology(data_dir() / "topologies" / "baseline.topo");
    const auto f = build_frame(idle_metrics(t, 100), t.cells, 100);
    REQUIRE(f.size() == frame_size(15));
    for (std::size_t c = 0; c < 15; ++c) {
      CHECK(f[2 * c] == 1.0);
      CHECK(f[2 * c + 1] == 0.0);
    }
    CHECK(f[30] == 1.0);  // mean avail ratio
    CHECK(f[31] == 0.0);
    CHECK(f[34] == 1.0);  // idle ratio
  }

  TEST_CASE("history is zero-padded at the front, oldest first") {
    const Topology t = load_topology(data_dir() / "topologies" / "small.topo");
    const std::vector<StepMetrics> none;
    const auto empty = build_observation(none, t.cells, 50, 4);
    CHECK(empty.size() == observation_size(6, 4));
    for (double v : empty) CHECK(v == 0.0);
    std::vector<StepMetrics> h{idle_metrics(t, 50)};
    const auto one = build_observation(h, t.cells, 50, 4);
    const std::size_t fs = frame_size(6);
    for (std::size_t i = 0; i < 3 * fs; ++i) CHECK(one[i] == 0.0);
    CHECK(one[3 * fs] == 1.0);
    auto busy = idle_metrics(t, 50);
    busy.per_cell_active[0] = 5;
    busy.idle_count = 45;
    busy.active_count = 5;
    h.push_back(busy);
    const auto two = build_observation(h, t.cells, 50, 4);
    CHECK(two[2 * fs + 1] == 0.0);
    CHECK(two[3 * fs + 1] == doctest::Approx(0.1));
  }

  TEST_CASE("observations stay bounded on real episodes") {
    const Topology t = load_topology(data_dir() / "topologies" / "small.topo");
    const SeTable se = SeTable::default_table();
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      EpisodeConfig c;
      c.episode_seed = seed;
      c.n_ues = 80;
      c.length_s = 20;
      c.traffic.mobility_enabled = seed % 2 == 1;
      const auto r = run_episode(t, se, c, constant_controller(preset_config_a().params));
      for (const auto& m : r.steps) {
        for (double v : build_frame(m, t.cells, c.n_ues)) {
          REQUIRE(std::isfinite(v));
          REQUIRE(v >= 0.0);
          REQUIRE(v <= 1.0);
        }
      }
    }
  }

  TEST_CASE("action mapping") {
    std::vector<double> raw(kActionSize, 0.5);
    CHECK(map_action(raw).q_hyst == doctest::Approx(15.0));
    raw[0] = 0.0;
    CHECK(map_action(raw).t_xhigh == -100.0);
    raw[0] = 1.0;
    CHECK(map_action(raw).t_xhigh == 0.0);
    raw[0] = 1.7;
    CHECK(map_action(raw).t_xhigh == 0.0);
    raw[0] = std::numeric_limits<double>::quiet_NaN();
    CHECK(map_action(raw).t_xhigh == -100.0);
    ReselectionParams fixed;
    fixed.t_resel = 3.0;
    CHECK(map_action(raw, fixed).t_resel == 3.0);
  }

  TEST_CASE("config_b normalized values") {
    const auto n = normalize_params(preset_config_b().params);
    CHECK(n[static_cast<int>(Tunable::q_hyst)] == doctest::Approx(0.1));
    CHECK(n[static_cast<int>(Tunable::q_offset)] == doctest::Approx(0.4667).epsilon(1e-4));
    CHECK(n[static_cast<int>(Tunable::q_rxlevmin)] == doctest::Approx(0.4));
    CHECK(n[static_cast<int>(Tunable::t_xhigh)] == doctest::Approx(0.44));
    CHECK(n[static_cast<int>(Tunable::t_xlow)] == doctest::Approx(0.42));
    CHECK(n[static_cast<int>(Tunable::t_slow)] == doctest::Approx(0.46));
  }

  TEST_CASE("map and inverse map are the identity on presets") {
    for (const auto& preset : {preset_config_a(), preset_config_b()}) {
      const auto n = normalize_params(preset.params);
      std::vector<double> raw(n.begin(), n.end());
      raw.resize(kActionSize, 0.5);
      const auto back = map_action(raw, preset.params);
      for (std::size_t k = 0; k < kTunableCount; ++k) {
        const auto t = static_cast<Tunable>(k);
        CHECK(std::abs(back.get(t) - preset.params.get(t)) < 1e-9);
      }
    }
  }

  TEST_CASE("sigma mapping") {
    std::vector<double> raw(kActionSize, 0.0);
    raw[6] = 0.5;
    raw[11] = 1.0;
    const auto s = map_sigma(raw, 0.1);
    CHECK(s[0] == doctest::Approx(0.05));
    CHECK(s[5] == doctest::Approx(0.1));
  }

  TEST_CASE("reward identities") {
    const RewardWeights w;
    const IntervalMetrics m{100e6, 5e6, 2e6, 20.0};
    const BaselineValues same{100e6, 5e6, 2e6};
    const auto r0 = compute_reward(m, same, w, 50.0);
    CHECK(r0.r_tput == 0.0);
    CHECK(r0.r_bal == 0.0);
    CHECK(r0.r_ue == 0.0);
    CHECK(r0.r_total == 0.0);
    const IntervalMetrics better{200e6, 2.5e6, 2e6, 20.0};
    CHECK(compute_reward(better, same, w, 50.0).r_total == doctest::Approx(0.8));
  }

  TEST_CASE("reward guards") {
    const RewardWeights w;
    const IntervalMetrics m{10e6, 0.0, 1e6, 3.0};
    const BaselineValues silent{0.0, 0.0, 0.0};
    const auto r = compute_reward(m, silent, w, 50.0);
    CHECK(r.r_tput == 0.0);
    CHECK(r.r_ue == 0.0);
    CHECK(r.r_bal == 0.0);
    CHECK(std::isfinite(r.r_total));
    const BaselineValues spread{10e6, 4.0, 1e6};
    CHECK(compute_reward(m, spread, w, 50.0).r_bal == doctest::Approx(3.0));
  }

  TEST_CASE("per-UE term scales with activity") {
    const RewardWeights w{0.0, 0.0, 1.0};
    const BaselineValues b{1.0, 1.0, 1e6};
    const IntervalMetrics half{1.0, 1.0, 2e6, 25.0};
    CHECK(compute_reward(half, b, w, 50.0).r_ue == doctest::Approx(0.5));
    const IntervalMetrics full{1.0, 1.0, 2e6, 80.0};
    CHECK(compute_reward(full, b, w, 50.0).r_ue == doctest::Approx(1.0));
  }

  TEST_CASE("reward ratios are scale invariant") {
    const RewardWeights w;
    const IntervalMetrics m{130e6, 7e6, 3e6, 20.0};
    const BaselineValues b{100e6, 9e6, 2.5e6};
    const IntervalMetrics m2{260e6, 14e6, 6e6, 20.0};
    const BaselineValues b2{200e6, 18e6, 5e6};
    const auto r1 = compute_reward(m, b, w, 50.0);
    const auto r2 = compute_reward(m2, b2, w, 50.0);
    CHECK(r1.r_tput == doctest::Approx(r2.r_tput));
    CHECK(r1.r_bal == doctest::Approx(r2.r_bal));
  }

  TEST_CASE("weights must sum to one") {
    RewardWeights w{0.5, 0.5, 0.5};
    CHECK_THROWS(w.validate());
    RewardWeights::synchronous().validate();
  }

  TEST_CASE("interval aggregation") {
    EpisodeResult r;
    r.pri = 2;
    for (int i = 0; i < 5; ++i) {
      StepMetrics m;
      m.total_tput_bps = 10.0 * (i + 1);
      m.per_cell_std_bps = 1.0;
      m.per_ue_mean_tput_bps = 2.0;
      m.active_count = static_cast<std::size_t>(i);
      r.steps.push_back(m);
    }
    const auto iv = interval_metrics(r);
    REQUIRE(iv.size() == 3);
    CHECK(iv[0].tput_bps == doctest::Approx(15.0));
    CHECK(iv[0].avg_active == doctest::Approx(0.5));
    CHECK(iv[2].tput_bps == doctest::Approx(50.0));
  }

  TEST_CASE("baseline ring semantics") {
    BaselineTable t(2);
    CHECK_FALSE(t.has(1, 0));
    CHECK_THROWS_AS(t.mean(1, 0), std::out_of_range);
    t.push(1, 0, BaselineValues{10, 1, 1});
    t.push(1, 0, BaselineValues{20, 1, 1});
    t.push(1, 0, BaselineValues{30, 1, 1});
    CHECK(t.buffer(1, 0).size() == 2);
    CHECK(t.mean(1, 0).tput_bps == doctest::Approx(25.0));
    const BaselineValues v{0.1 + 0.2, 1.0 / 3.0, 7e-7};
    BaselineTable same(3);
    for (int i = 0; i < 3; ++i) same.push(5, 2, v);
    CHECK(same.mean(5, 2) == v);
    CHECK(BaselineTable::deserialize(t.serialize()) == t);
  }

  TEST_CASE("fresh seeds are initialized from the reference") {
    BaselineTable t(2);
    const std::vector<IntervalMetrics> ref{{10, 2, 3, 1}, {20, 4, 6, 1}};
    t.push(9, 0, BaselineValues{99, 99, 99});
    t.seed_missing(9, ref);
    CHECK(t.mean(9, 0).tput_bps == 99.0);
    CHECK(t.mean(9, 1) == to_baseline(ref[1]));
  }

  TEST_CASE("replaying the baseline trajectory earns zero reward") {
    const Topology t = load_topology(data_dir() / "topologies" / "small.topo");
    const SeTable se = SeTable::default_table();
    EpisodeConfig c;
    c.episode_seed = 4;
    c.n_ues = 50;
    c.length_s = 30;
    c.pri = 3;
    const auto ref = run_episode(t, se, c, constant_controller(preset_config_b().params));
    const auto again = run_episode(t, se, c, constant_controller(preset_config_b().params));
    BaselineTable table(2);
    table.seed_missing(4, interval_metrics(ref));
    const auto iv = interval_metrics(again);
    for (std::size_t i = 0; i < iv.size(); ++i) {
      CHECK(std::abs(compute_reward(iv[i], table.mean(4, i), RewardWeights{}, 50.0).r_total) < 1e-9);
    }
  }
}
