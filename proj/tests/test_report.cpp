// Copyright (c) 2026, The cellpilot Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>

#include "cellpilot/errors.hpp"
#include "cellpilot/report.hpp"
#include "cellpilot/text_util.hpp"
#include "test_support.hpp"

using namespace cellpilot;
using cellpilot::testing::scratch_dir;

namespace {

EvalReport sample_report() {
  EvalReport rep;
  std::vector<double> t, l, u;
  for (std::size_t i = 0; i < 5; ++i) {
    SeedGain g;
    g.seed_index = i;
    g.seed = 1000 + i;
    g.tput_gain = 0.01 * static_cast<double>(i) - 0.005;
    g.lb_gain = 1.0 / 3.0 + static_cast<double>(i);
    g.ue_gain = -0.1 * static_cast<double>(i);
    rep.per_seed.push_back(g);
    t.push_back(g.tput_gain);
    l.push_back(g.lb_gain);
    u.push_back(g.ue_gain);
  }
  rep.tput = gain_stats(t);
  rep.lb = gain_stats(l);
  rep.ue = gain_stats(u);
  return rep;
}

RunManifest sample_manifest() {
  RunManifest m;
  m.command = "eval";
  m.argv = {"cellpilot", "eval", "x.json"};
  m.version = version_string();
  m.config_json = R"({"a": 1})";
  m.topology_hash = "abc";
  m.run_seed = 7;
  m.eval_seeds = {1, 2, 3};
  m.outputs = {"gains.csv"};
  return m;
}

std::size_t line_count(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace

TEST_SUITE("report") {
  TEST_CASE("gains CSV round trip") {
    const auto rep = sample_report();
    const std::string text = gains_csv(rep);
    CHECK(text.rfind("seed_index,seed,tput_gain,lb_gain,ue_gain\n", 0) == 0);
    CHECK(line_count(text) == 6);
    const auto back = parse_gains_csv(text);
    REQUIRE(back.per_seed.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) {
      CHECK(back.per_seed[i].seed == rep.per_seed[i].seed);
      CHECK(back.per_seed[i].lb_gain == rep.per_seed[i].lb_gain);
    }
    CHECK(back.tput.median == rep.tput.median);
    CHECK(gains_csv(back) == text);
    CHECK_THROWS_AS(parse_gains_csv("seed,tput_gain\n1,2\n"), CorruptFileError);
    CHECK_THROWS_AS(parse_gains_csv(text + "9,9,1\n"), CorruptFileError);
  }

  TEST_CASE("summary and sweep tables") {
    const auto rep = sample_report();
    const std::string s = gains_summary_csv(rep);
    CHECK(s.rfind("metric,median,p05,p95\ntput,", 0) == 0);
    CHECK(line_count(s) == 4);
    const std::string sw = sweep_csv({{25, rep}, {100, rep}});
    CHECK(line_count(sw) == 3);
    CHECK(sw.find("\n25,") != std::string::npos);
    CHECK(sw.find("\n100,") != std::string::npos);
  }

  TEST_CASE("convergence columns come from the training log") {
    TrainLogRow r;
    r.episode = 1;
    r.reward = 0.25;
    r.ewma = 0.25;
    const std::string log = train_log_header() + train_log_line(r);
    CHECK(convergence_csv(log) == "episode,reward,ewma,round\n1,0.25,0.25,0\n");
    CHECK_THROWS_AS(convergence_csv("a,b\n1,2\n"), CorruptFileError);
  }

  TEST_CASE("ablation table pairs seeds") {
    const auto base = sample_report();
    auto variant = base;
    variant.per_seed[2].tput_gain += 0.5;
    const std::string t = ablation_csv(base, variant);
    CHECK(line_count(t) == 6);
    CHECK(t.find(",0.5,") != std::string::npos);
    variant.per_seed[1].seed = 1;
    CHECK_THROWS_AS(ablation_csv(base, variant), ValidationError);
    variant.per_seed.pop_back();
    CHECK_THROWS_AS(ablation_csv(base, variant), ValidationError);
  }

  TEST_CASE("manifest round trip") {
    const auto m = sample_manifest();
    const auto back = parse_manifest(manifest_json(m));
    CHECK(back.command == m.command);
    CHECK(back.argv == m.argv);
    CHECK(back.eval_seeds == m.eval_seeds);
    CHECK(back.run_seed == 7);
    CHECK(manifest_json(back) == manifest_json(m));
    CHECK_THROWS_AS(parse_manifest("{}"), CorruptFileError);
    CHECK(version_string().rfind("0.1.0 (", 0) == 0);
  }

  TEST_CASE("report is idempotent and needs inputs") {
    const auto dir = scratch_dir("report");
    CHECK_THROWS_AS(write_report(dir), IoError);
    write_manifest(dir, sample_manifest());
    CHECK_THROWS_AS(write_report(dir), IoError);
    write_file(dir / "gains.csv", gains_csv(sample_report()));
    const auto names = write_report(dir);
    CHECK(names == std::vector<std::string>{"plots/gains.csv", "plots/gains_summary.csv"});
    const std::string first = read_file(dir / "plots" / "gains_summary.csv");
    write_report(dir);
    CHECK(read_file(dir / "plots" / "gains_summary.csv") == first);
    CHECK(read_file(dir / "plots" / "gains.csv") == read_file(dir / "gains.csv"));
    write_file(dir / "gains.csv", "junk\n");
    CHECK_THROWS_WITH_AS(write_report(dir), doctest::Contains("gains.csv"), CorruptFileError);
  }
}
