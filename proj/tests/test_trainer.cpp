// Copyright (c) 2026, The cellpilot Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "cellpilot/errors.hpp"
#include "cellpilot/text_util.hpp"
#include "cellpilot/trainer.hpp"
#include "test_support.hpp"

using namespace cellpilot;
using cellpilot::testing::data_dir;
using cellpilot::testing::scratch_dir;

namespace {

// 3 seeds, two rounds of two passes: 12 episodes.
RunConfig tiny_config() {
  RunConfig c = load_run_config(data_dir() / "configs" / "small.json");
  c.train_seeds = {3, 0};
  c.validation_seeds = {2, 100000};
  c.eval_seeds = {3, 200000};
  c.n_ues = 20;
  c.eval_length_s = 6;
  c.policy.hidden = 16;
  c.policy.history = 2;
  c.curriculum.initial_length_s = 4;
  c.curriculum.increment_s = 2;
  c.curriculum.increments = 1;
  c.curriculum.final_length_s = 6;
  c.curriculum.passes_per_round = 2;
  c.checkpoint_every = 2;
  c.validate_every = 3;
  c.max_episodes = 0;
  return c;
}

const Scenario& tiny_scenario() {
  static const Scenario sc = load_scenario(tiny_config());
  return sc;
}

TrainResult run(const RunConfig& cfg, const std::filesystem::path& dir, bool resume = false) {
  TrainOptions opt;
  opt.out_dir = dir;
  opt.resume = resume;
  return train(cfg, tiny_scenario(), opt);
}

}  // namespace

TEST_SUITE("trainer") {
  TEST_CASE("every pass visits each training seed once") {
    const auto res = run(tiny_config(), scratch_dir("train-passes"));
    REQUIRE(res.completed);
    REQUIRE(res.log.size() == 12);
    std::map<std::pair<std::size_t, std::size_t>, std::multiset<std::size_t>> passes;
    for (const auto& r : res.log) passes[{r.round, r.pass}].insert(r.seed_index);
    CHECK(passes.size() == 4);
    for (const auto& [key, idx] : passes) CHECK(idx == std::multiset<std::size_t>{0, 1, 2});
    for (std::size_t i = 0; i < res.log.size(); ++i) CHECK(res.log[i].episode == i + 1);
  }

  TEST_CASE("learning rate halves per round and episodes follow the curriculum") {
    RunConfig cfg = tiny_config();
    cfg.curriculum.increments = 2;
    cfg.curriculum.final_length_s = 8;
    cfg.curriculum.passes_per_round = 1;
    const auto res = run(cfg, scratch_dir("train-lr"));
    REQUIRE(res.log.size() == 9);
    for (const auto& r : res.log) {
      CHECK(r.lr == doctest::Approx(1e-4 * std::pow(0.5, static_cast<double>(r.round))));
      CHECK(r.length_s == 4.0 + 2.0 * static_cast<double>(r.round));
    }
    CHECK(res.log.back().lr == doctest::Approx(2.5e-5));
  }

  TEST_CASE("zero learning rate and zero decay leave the policy unchanged") {
    RunConfig cfg = tiny_config();
    cfg.policy.learning_rate = 0.0;
    cfg.policy.weight_decay = 0.0;
    const auto res = run(cfg, scratch_dir("train-lr0"));
    const PolicyNet init = make_initial_net(cfg, tiny_scenario().topo.cell_count());
    CHECK(res.final_state.net == init);
  }

  TEST_CASE("resume reproduces the uninterrupted run exactly") {
    const auto full_dir = scratch_dir("train-full");
    const auto split_dir = scratch_dir("train-split");
    const auto full = run(tiny_config(), full_dir);
    RunConfig first = tiny_config();
    first.max_episodes = 5;
    const auto part = run(first, split_dir);
    CHECK_FALSE(part.completed);
    CHECK(part.log.size() == 5);
    const auto rest = run(tiny_config(), split_dir, true);
    CHECK(rest.completed);
    CHECK(rest.log.size() == 7);
    CHECK(rest.final_state == full.final_state);
    CHECK(read_file(final_checkpoint_path(split_dir)) == read_file(final_checkpoint_path(full_dir)));
    CHECK(read_file(split_dir / "train_log.csv") == read_file(full_dir / "train_log.csv"));
    CHECK(read_file(best_checkpoint_path(split_dir)) == read_file(best_checkpoint_path(full_dir)));
  }

  TEST_CASE("worker count does not change the result") {
    const auto one = run(tiny_config(), scratch_dir("train-jobs1"));
    RunConfig cfg = tiny_config();
    cfg.jobs = 4;
    const auto four = run(cfg, scratch_dir("train-jobs4"));
    CHECK(one.final_state == four.final_state);
    REQUIRE(one.best.has_value());
    CHECK(*one.best == *four.best);
  }

  TEST_CASE("resume refuses a different config") {
    const auto dir = scratch_dir("train-mismatch");
    RunConfig cfg = tiny_config();
    cfg.max_episodes = 2;
    run(cfg, dir);
    cfg.policy.learning_rate = 3e-4;
    CHECK_THROWS_AS(run(cfg, dir, true), ValidationError);
  }

  TEST_CASE("log rows carry a replayable convergence monitor") {
    const RunConfig cfg = tiny_config();
    const auto dir = scratch_dir("train-ewma");
    const auto res = run(cfg, dir);
    std::vector<double> rewards;
    for (const auto& r : res.log) {
      rewards.push_back(r.reward);
      const auto m = ConvergenceMonitor::replay(cfg.convergence.alpha, cfg.convergence.window, rewards);
      CHECK(m.ewma() == r.ewma);
      CHECK(m.rolling_std() == r.rolling_std);
      CHECK(std::isfinite(r.reward));
      CHECK(r.grad_norm >= 0.0);
    }
    const auto text = read_file(dir / "train_log.csv");
    CHECK(text.rfind(train_log_header(), 0) == 0);
  }

  TEST_CASE("evaluation leaves the agent untouched and is repeatable") {
    const RunConfig cfg = tiny_config();
    const PolicyNet net = make_initial_net(cfg, tiny_scenario().topo.cell_count());
    const PolicyNet copy = net;
    const Agent agent = Agent::from_net(net, cfg);
    EvalRequest req;
    req.seeds = cfg.eval_seeds.episode_seeds(cfg.run_seed);
    const auto a = evaluate(agent, cfg, tiny_scenario(), req, nullptr);
    const auto b = evaluate(agent, cfg, tiny_scenario(), req, nullptr);
    CHECK(net == copy);
    REQUIRE(a.per_seed.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(a.per_seed[i].tput_gain == b.per_seed[i].tput_gain);
      CHECK(a.per_seed[i].lb_gain == b.per_seed[i].lb_gain);
    }
  }

  TEST_CASE("warm-started agent matches its preset") {
    const RunConfig cfg = tiny_config();
    const PolicyNet net = make_initial_net(cfg, tiny_scenario().topo.cell_count());
    EvalRequest req;
    req.seeds = cfg.eval_seeds.episode_seeds(cfg.run_seed);
    const auto rep = evaluate(Agent::from_net(net, cfg), cfg, tiny_scenario(), req, nullptr);
    for (const auto& g : rep.per_seed) {
      CHECK(std::abs(g.tput_gain) <= 0.005);
      CHECK(std::abs(g.lb_gain) <= 0.005);
    }
  }

  TEST_CASE("evaluation refuses training seeds") {
    const RunConfig cfg = tiny_config();
    EvalRequest req;
    req.seeds = cfg.train_seeds.episode_seeds(cfg.run_seed);
    req.training_seeds = req.seeds;
    CHECK_THROWS_AS(evaluate(Agent::from_preset(preset_config_a()), cfg, tiny_scenario(), req, nullptr),
                    ValidationError);
    RunConfig bad = tiny_config();
    bad.validation_seeds = {2, 1};
    CHECK_THROWS_AS(run(bad, scratch_dir("train-overlap")), ValidationError);
  }

  TEST_CASE("percentiles") {
    CHECK(percentile({3.0, 1.0, 2.0}, 0.5) == 2.0);
    CHECK(percentile({1.0, 2.0, 3.0, 4.0}, 0.5) == doctest::Approx(2.5));
    CHECK(percentile({0.0, 10.0}, 0.05) == doctest::Approx(0.5));
    CHECK(percentile({7.0}, 0.95) == 7.0);
    const auto s = gain_stats({5, 1, 4, 2, 3});
    CHECK(s.median == 3.0);
    CHECK(s.p05 == doctest::Approx(1.2));
    CHECK(s.p95 == doctest::Approx(4.8));
  }

  TEST_CASE("convergence monitor") {
    ConvergenceMonitor m(0.5, 3);
    m.push(2.0);
    CHECK(m.ewma() == 2.0);
    CHECK(m.rolling_std() == 0.0);
    m.push(4.0);
    CHECK(m.ewma() == 3.0);
    CHECK(m.rolling_std() == doctest::Approx(1.0));
    CHECK_FALSE(m.full());
    m.push(0.0);
    CHECK(m.full());
    CHECK_FALSE(m.converged(0.1, 10.0));
    ConvergenceMonitor q(0.2, 2);
    for (int i = 0; i < 50; ++i) q.push(1e-4);
    CHECK(q.converged(5e-3, 7e-3));
  }

  TEST_CASE("ablation variants") {
    const RunConfig base = tiny_config();
    for (const auto& name : ablation_names()) CHECK(ablation_name(parse_ablation(name)) == name);
    CHECK_THROWS_WITH_AS(parse_ablation("bogus"), doctest::Contains("no_curriculum"), ValidationError);

    CHECK_FALSE(ablation_config(base, Ablation::no_curriculum).curriculum.enabled);
    CHECK(ablation_config(base, Ablation::no_curriculum).curriculum.round_lengths() ==
          std::vector<double>{6});
    CHECK(ablation_config(base, Ablation::seeds_500).train_seeds.count == 500);
    CHECK(ablation_overrides(Ablation::mobility_eval).mobility == true);
    CHECK(ablation_overrides(Ablation::stress_test).pri == 10);
    CHECK_FALSE(ablation_retrains(Ablation::mobility_eval));
    CHECK_FALSE(ablation_retrains(Ablation::stress_test));
    const auto slow = ablation_config(base, Ablation::slow_updates);
    CHECK(slow.pri == 5);
    CHECK(slow.weights.bal == base.weights.bal);
    const auto sync = ablation_config(base, Ablation::synchronous_updates);
    CHECK(sync.pri == 5);
    CHECK(sync.weights.bal == 0.95);
    CHECK(sync.baseline_window == 10);
    CHECK(ablation_retrains(Ablation::synchronous_updates));
    const auto ecfg = eval_episode_config(ablation_config(base, Ablation::stress_test), 1);
    CHECK(ecfg.pri == 10);
  }
}
