// Copyright (c) 2026, The cellpilot Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "cellpilot/errors.hpp"
#include "cellpilot/policy.hpp"
#include "cellpilot/rlenv.hpp"
#include "gradcheck.hpp"

using namespace cellpilot;

namespace {

PolicyNet small_net(std::uint64_t seed, std::size_t in = 8, std::size_t h = 16) {
  PolicyShape s;
  s.input = in;
  s.hidden1 = h;
  s.hidden2 = h;
  PolicyNet net(s);
  Rng rng(seed);
  net.init_uniform(rng);
  return net;
}

}  // namespace

TEST_SUITE("policy") {
  TEST_CASE("parameter layout") {
    PolicyShape s;
    s.input = 8;
    s.hidden1 = 16;
    s.hidden2 = 16;
    CHECK(s.param_count() == 8 * 16 + 16 + 16 * 16 + 16 + 16 * 12 + 12);
    PolicyNet net(s);
    CHECK(net.params().size() == s.param_count());
    CHECK(net.b3() + 12 == net.params().size());
    CHECK(net.is_weight(0));
    CHECK_FALSE(net.is_weight(net.b1()));
    CHECK(net.is_weight(net.w3()));
    CHECK_FALSE(net.is_weight(net.b3()));
  }

  TEST_CASE("zero network outputs one half") {
    PolicyShape s;
    s.input = 5;
    s.hidden1 = 4;
    s.hidden2 = 3;
    const PolicyNet net(s);
    for (double v : net.forward(std::vector<double>{1, 2, 3, 4, 5})) CHECK(v == 0.5);
  }

  TEST_CASE("forward is deterministic, bounded and checks dimensions") {
    const PolicyNet net = small_net(1);
    Rng rng(2);
    for (int i = 0; i < 200; ++i) {
      std::vector<double> obs(8);
      for (auto& v : obs) v = rng.uniform(-1e3, 1e3);
      const auto a = net.forward(obs);
      CHECK(a == net.forward(obs));
      for (double v : a) {
        REQUIRE(v > 0.0);
        REQUIRE(v < 1.0);
      }
    }
    CHECK_THROWS_WITH_AS(net.forward(std::vector<double>(7)), doctest::Contains("8"), ValidationError);
  }

  TEST_CASE("warm start reproduces the preset for any observation") {
    PolicyNet net = small_net(3, 35, 32);
    warm_start(net, preset_config_b().params);
    const auto want = normalize_params(preset_config_b().params);
    const GaussianHead head;
    Rng rng(4);
    for (int i = 0; i < 20; ++i) {
      std::vector<double> obs(35);
      for (auto& v : obs) v = rng.uniform(0, 1);
      const auto out = net.forward(obs);
      for (std::size_t k = 0; k < kTunableCount; ++k) {
        CHECK(out[k] == doctest::Approx(want[k]).epsilon(1e-12));
        CHECK(head.sigma(out)[k] == doctest::Approx(0.05));
      }
      const auto mapped = map_action(out, preset_config_b().params);
      CHECK(std::abs(mapped.q_offset - 14.0) < 1e-9);
    }
  }

  TEST_CASE("warm start clamps endpoint logits") {
    PolicyNet net = small_net(5);
    ReselectionParams p;
    p.q_hyst = 0.0;
    p.t_xhigh = 0.0;
    warm_start(net, p);
    CHECK(net.params()[net.b3() + static_cast<int>(Tunable::q_hyst)] == -kWarmStartLogitClamp);
    CHECK(net.params()[net.b3() + static_cast<int>(Tunable::t_xhigh)] == kWarmStartLogitClamp);
  }

  TEST_CASE("Gaussian log-density") {
    const GaussianHead head{0.1, 1e-3};
    std::vector<double> out(kActionSize, 0.5);
    for (std::size_t i = 6; i < 12; ++i) out[i] = 0.0;  // sigma floored
    std::vector<double> a(out.begin(), out.begin() + 6);
    const double at_mean = head.log_prob(out, a);
    CHECK(at_mean == doctest::Approx(6.0 * -std::log(1e-3 * std::sqrt(2.0 * std::numbers::pi))));
    a[2] += 1e-3;
    CHECK(head.log_prob(out, a) == doctest::Approx(at_mean - 0.5));
  }

  TEST_CASE("sampling is reproducible") {
    const GaussianHead head;
    const std::vector<double> out(kActionSize, 0.4);
    Rng r1(9), r2(9);
    const auto a = sample_action(out, head, r1);
    const auto b = sample_action(out, head, r2);
    CHECK(a.action == b.action);
    CHECK(a.log_prob == doctest::Approx(head.log_prob(out, a.action)));
  }

  TEST_CASE("zero rewards give zero gradients") {
    const PolicyNet net = small_net(6);
    std::vector<DecisionRecord> recs(3);
    for (auto& r : recs) {
      r.obs.assign(8, 0.3);
      r.action.fill(0.2);
      r.weight = 0.0;
    }
    for (double g : reinforce_gradient(net, GaussianHead{}, recs)) CHECK(g == 0.0);
  }

  TEST_CASE("non-finite rewards name the record") {
    const PolicyNet net = small_net(6);
    std::vector<DecisionRecord> recs(3);
    for (auto& r : recs) {
      r.obs.assign(8, 0.3);
      r.action.fill(0.2);
      r.weight = 1.0;
    }
    recs[2].weight = std::numeric_limits<double>::infinity();
    CHECK_THROWS_WITH_AS(reinforce_gradient(net, GaussianHead{}, recs), doctest::Contains("record 2"),
                         Error);
  }

  TEST_CASE("analytic gradient matches central differences") {
    Rng rng(12);
    for (int net_i = 0; net_i < 10; ++net_i) {
      const auto res = cellpilot::testing::reinforce_gradcheck(rng, 40);
      CHECK(res.checked == 40);
      CHECK(res.max_rel_error < 1e-4);
    }
  }

  TEST_CASE("gradient clipping") {
    std::vector<double> g{12.0, 16.0};
    CHECK(clip_global_norm(g, 10.0) == doctest::Approx(20.0));
    CHECK(g[0] == doctest::Approx(6.0));
    CHECK(g[1] == doctest::Approx(8.0));
    std::vector<double> small{3.0, 4.0};
    clip_global_norm(small, 10.0);
    CHECK(small == std::vector<double>{3.0, 4.0});
    Rng rng(1);
    for (int i = 0; i < 100; ++i) {
      std::vector<double> v(10);
      for (auto& x : v) x = rng.uniform(-50, 50);
      const auto orig = v;
      clip_global_norm(v, 1.0);
      const double ratio = v[0] / orig[0];
      CHECK(ratio > 0.0);
      for (std::size_t k = 0; k < v.size(); ++k) CHECK(v[k] == doctest::Approx(orig[k] * ratio));
    }
  }

  TEST_CASE("AdamW step against a hand-computed update") {
    PolicyNet net = small_net(7, 2, 2);
    const auto before = net.params();
    AdamWState st = make_adamw_state(net, 0.01);
    const AdamWConfig cfg{0.9, 0.999, 1e-8, 0.1, 1e9};
    std::vector<double> g(before.size());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = 0.01 * static_cast<double>(i % 7) - 0.02;
    std::vector<double> g1 = g;
    adamw_step(net, st, cfg, g1);
    for (std::size_t i = 0; i < g.size(); ++i) {
      double p = before[i];
      if (net.is_weight(i)) p -= 0.01 * 0.1 * p;
      const double m = 0.1 * g[i];
      const double v = 0.001 * g[i] * g[i];
      const double mh = m / (1 - 0.9);
      const double vh = v / (1 - 0.999);
      p -= 0.01 * mh / (std::sqrt(vh) + 1e-8);
      CHECK(net.params()[i] == doctest::Approx(p).epsilon(1e-12));
    }
    CHECK(st.step == 1);
  }

  TEST_CASE("zero gradient and zero decay leave parameters unchanged") {
    PolicyNet net = small_net(8);
    const auto before = net.params();
    AdamWState st = make_adamw_state(net, 1e-3);
    std::vector<double> g(before.size(), 0.0);
    adamw_step(net, st, AdamWConfig{0.9, 0.999, 1e-8, 0.0, 10.0}, g);
    CHECK(net.params() == before);
  }
}
