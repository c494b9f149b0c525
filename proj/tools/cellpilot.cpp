// Copyright (c) 2026, The cellpilot Authors
// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cellpilot/checkpoint.hpp"
#include "cellpilot/errors.hpp"
#include "cellpilot/report.hpp"
#include "cellpilot/run_config.hpp"
#include "cellpilot/simcore.hpp"
#include "cellpilot/text_util.hpp"
#include "cellpilot/topogen.hpp"
#include "cellpilot/topology.hpp"
#include "cellpilot/trainer.hpp"

namespace fs = std::filesystem;
using namespace cellpilot;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitAcceptance = 3;

struct AcceptanceFailure : Error {
  using Error::Error;
};

std::vector<std::string> g_argv;

RunManifest base_manifest(const std::string& command) {
  RunManifest m;
  m.command = command;
  m.argv = g_argv;
  m.version = version_string();
  return m;
}

void fill_from_config(RunManifest& m, const RunConfig& cfg, const Scenario& sc) {
  m.config_json = run_config_json(cfg);
  m.topology_hash = hex64(topology_hash(sc.topo));
  m.run_seed = cfg.run_seed;
  m.train_seeds = cfg.train_seeds.episode_seeds(cfg.run_seed);
  m.validation_seeds = cfg.validation_seeds.episode_seeds(cfg.run_seed);
  m.eval_seeds = cfg.eval_seeds.episode_seeds(cfg.run_seed);
}

/// Parses "100..1000:100", "25,50,100" or a single count.
std::vector<std::size_t> parse_ue_list(const std::string& spec) {
  std::vector<std::size_t> out;
  auto count = [&](const std::string& s) {
    const long long v = parse_int(s);
    if (v <= 0) throw ValidationError("--ues: counts must be positive, got '" + s + "'");
    return static_cast<std::size_t>(v);
  };
  try {
    const auto dots = spec.find("..");
    if (dots != std::string::npos) {
      const auto colon = spec.find(':', dots);
      const std::size_t lo = count(spec.substr(0, dots));
      const std::size_t hi = count(spec.substr(dots + 2, colon == std::string::npos
                                                             ? std::string::npos
                                                             : colon - dots - 2));
      const std::size_t step = colon == std::string::npos ? 1 : count(spec.substr(colon + 1));
      if (hi < lo) throw ValidationError("--ues: range end is below its start");
      for (std::size_t n = lo; n <= hi; n += step) out.push_back(n);
    } else {
      std::size_t start = 0;
      while (start <= spec.size()) {
        const auto comma = spec.find(',', start);
        out.push_back(count(spec.substr(start, comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
    }
  } catch (const std::invalid_argument& e) {
    throw ValidationError(std::string("--ues: ") + e.what());
  }
  return out;
}

bool is_preset_name(const std::string& s) { return s == "config_a" || s == "config_b"; }

/// A policy source: a heuristic preset name or a checkpoint path.
struct LoadedPolicy {
  std::unique_ptr<PolicyCheckpoint> checkpoint;
  Agent agent;
};

LoadedPolicy load_policy(const std::string& source, const RunConfig& cfg, const Scenario& sc) {
  LoadedPolicy lp;
  if (is_preset_name(source)) {
    lp.agent = Agent::from_preset(preset_by_name(source));
    return lp;
  }
  lp.checkpoint = std::make_unique<PolicyCheckpoint>(load_checkpoint(source));
  if (lp.checkpoint->net.shape().input !=
      observation_size(sc.topo.cell_count(), cfg.policy.history)) {
    throw ValidationError("checkpoint '" + source +
                          "' does not match the topology's cell count or the history length");
  }
  lp.agent = Agent::from_net(lp.checkpoint->net, cfg, fs::path(source).filename().string());
  return lp;
}

std::vector<std::uint64_t> training_seeds_for(const LoadedPolicy& lp, const RunConfig& cfg) {
  if (lp.checkpoint) return lp.checkpoint->training_seeds;
  return cfg.train_seeds.episode_seeds(cfg.run_seed);
}

void print_report(const EvalReport& rep, const std::string& prefix = "") {
  std::printf("%s%s vs %s over %zu seeds: tput %+.4f [%+.4f, %+.4f]  lb %+.4f  ue %+.4f\n",
              prefix.c_str(), rep.agent_label.c_str(), rep.reference_label.c_str(),
              rep.per_seed.size(), rep.tput.median, rep.tput.p05, rep.tput.p95, rep.lb.median,
              rep.ue.median);
}

// gen-topology ---------------------------------------------------------------

struct GenTopologyArgs {
  std::string preset;
  double width = 0.0;
  double height = 0.0;
  int towers = 1;
  int sectors = 3;
  int carriers = 2;
  double density = 0.7;
  double street_spacing = 120.0;
  std::optional<double> tx_power;
  std::uint64_t seed = 1;
  std::string output;
};

int cmd_gen_topology(const GenTopologyArgs& a) {
  TopoGenSpec spec;
  if (!a.preset.empty()) {
    spec = topogen_preset(a.preset);
  } else {
    spec = topogen_grid(a.width, a.height, a.towers, a.sectors, a.carriers, a.density,
                        a.street_spacing);
  }
  if (a.tx_power) spec.tx_power_dbm = *a.tx_power;
  const Topology topo = generate_topology(spec, a.seed);
  save_topology(topo, a.output);
  std::printf("wrote %s: %zu towers, %zu cells, %.3f km^2, %zu buildings\n", a.output.c_str(),
              topo.towers.size(), topo.cells.size(), topo.area.area() / 1e6,
              topo.buildings.size());
  return kExitOk;
}

// train ------------------------------------------------------------------------

struct TrainArgs {
  std::string config;
  std::string out;
  bool resume = false;
  std::optional<std::size_t> jobs;
  std::optional<std::size_t> max_episodes;
  bool quiet = false;
};

int cmd_train(const TrainArgs& a) {
  RunConfig cfg = load_run_config(a.config);
  if (a.jobs) cfg.jobs = *a.jobs;
  if (a.max_episodes) cfg.max_episodes = *a.max_episodes;
  const Scenario sc = load_scenario(cfg);
  const fs::path out(a.out);
  fs::create_directories(out);

  RunManifest m = base_manifest("train");
  fill_from_config(m, cfg, sc);
  m.outputs = {"train_log.csv", "checkpoints/latest.ckpt", "checkpoints/best.ckpt",
               "checkpoints/final.ckpt"};
  write_manifest(out, m);

  ReferenceCache cache = ReferenceCache::from_env();
  TrainOptions opt;
  opt.out_dir = out;
  opt.resume = a.resume;
  opt.cache = &cache;
  if (!a.quiet) {
    opt.on_episode = [](const TrainLogRow& r) {
      std::printf("episode %zu round %zu pass %zu len %.0fs lr %.3g reward %.5g ewma %.5g\n",
                  r.episode, r.round, r.pass, r.length_s, r.lr, r.reward, r.ewma);
      std::fflush(stdout);
    };
  }
  const TrainResult res = train(cfg, sc, opt);
  std::printf("%s after %zu episodes", res.completed ? "finished" : "stopped",
              res.final_state.progress.episode);
  if (res.converged_at > 0) std::printf(" (converged at episode %zu)", res.converged_at);
  std::printf("\n");
  return kExitOk;
}

// eval -------------------------------------------------------------------------

struct EvalArgs {
  std::string config;
  std::string out;
  std::string policy;
  std::string baseline = "config_b";
  std::string ues;
  std::optional<int> pri;
  std::optional<bool> mobility;
  std::optional<bool> obstruction;
  std::optional<double> length;
  std::optional<std::size_t> seeds;
  std::optional<std::size_t> jobs;
  bool trajectories = false;
  std::optional<double> require_gain;
};

int cmd_eval(const EvalArgs& a, const std::string& command) {
  RunConfig cfg = load_run_config(a.config);
  if (a.jobs) cfg.jobs = *a.jobs;
  if (a.seeds) cfg.eval_seeds.count = *a.seeds;
  const Scenario sc = load_scenario(cfg);
  const LoadedPolicy lp = load_policy(a.policy, cfg, sc);
  preset_by_name(a.baseline);
  const fs::path out(a.out);
  fs::create_directories(out);

  EvalRequest req;
  req.seeds = cfg.eval_seeds.episode_seeds(cfg.run_seed);
  req.seed_offset = cfg.eval_seeds.offset;
  req.training_seeds = training_seeds_for(lp, cfg);
  req.reference = a.baseline;
  req.overrides.pri = a.pri;
  req.overrides.mobility = a.mobility;
  req.overrides.obstruction = a.obstruction;
  req.overrides.length_s = a.length;

  RunManifest m = base_manifest(command);
  fill_from_config(m, cfg, sc);
  ReferenceCache cache = ReferenceCache::from_env();

  std::optional<EvalReport> headline;
  if (!a.ues.empty()) {
    std::vector<std::pair<std::size_t, EvalReport>> points;
    for (std::size_t n : parse_ue_list(a.ues)) {
      req.overrides.n_ues = n;
      EvalReport rep = evaluate(lp.agent, cfg, sc, req, &cache);
      print_report(rep, "N=" + std::to_string(n) + " ");
      const std::string name = "gains_n" + std::to_string(n) + ".csv";
      write_file(out / name, gains_csv(rep));
      m.outputs.push_back(name);
      points.emplace_back(n, std::move(rep));
    }
    write_file(out / "sweep.csv", sweep_csv(points));
    m.outputs.push_back("sweep.csv");
    if (points.size() == 1) headline = points.front().second;
  } else {
    EvalReport rep = evaluate(lp.agent, cfg, sc, req, &cache);
    print_report(rep);
    write_file(out / "gains.csv", gains_csv(rep));
    write_file(out / "summary.csv", gains_summary_csv(rep));
    m.outputs.push_back("gains.csv");
    m.outputs.push_back("summary.csv");
    headline = std::move(rep);
  }

  if (a.trajectories) {
    const HeuristicPreset ref = preset_by_name(a.baseline);
    const Agent ref_agent = Agent::from_preset(ref);
    fs::create_directories(out / "trajectories");
    for (std::size_t i = 0; i < req.seeds.size(); ++i) {
      const EpisodeConfig e = eval_episode_config(cfg, req.seeds[i], req.overrides);
      const std::string idx = std::to_string(req.seed_offset + i);
      const auto agent_run = run_agent_episode(lp.agent, sc, e, nullptr);
      const auto ref_run = run_agent_episode(ref_agent, sc, e, nullptr);
      write_file(out / "trajectories" / ("policy-" + idx + ".csv"),
                 trajectory_csv(agent_run.result));
      write_file(out / "trajectories" / ("reference-" + idx + ".csv"),
                 trajectory_csv(ref_run.result));
      m.outputs.push_back("trajectories/policy-" + idx + ".csv");
      m.outputs.push_back("trajectories/reference-" + idx + ".csv");
    }
  }
  write_manifest(out, m);

  if (a.require_gain) {
    if (!headline) throw ValidationError("--require-gain needs a single UE count");
    if (!(headline->tput.median >= *a.require_gain)) {
      throw AcceptanceFailure("median throughput gain " + format_double(headline->tput.median) +
                              " is below the required " + format_double(*a.require_gain));
    }
  }
  return kExitOk;
}

// ablate -----------------------------------------------------------------------

struct AblateArgs {
  std::string config;
  std::string variant;
  std::string out;
  std::string base_policy;
  std::optional<std::size_t> jobs;
  std::optional<std::size_t> max_episodes;
};

int cmd_ablate(const AblateArgs& a) {
  const Ablation variant = parse_ablation(a.variant);
  RunConfig base = load_run_config(a.config);
  if (a.jobs) base.jobs = *a.jobs;
  const RunConfig vcfg = ablation_config(base, variant);
  vcfg.validate();
  const Scenario sc = load_scenario(base);
  const fs::path out(a.out);
  fs::create_directories(out);
  ReferenceCache cache = ReferenceCache::from_env();

  const LoadedPolicy base_policy = load_policy(a.base_policy, base, sc);

  RunManifest m = base_manifest("ablate");
  fill_from_config(m, vcfg, sc);

  std::unique_ptr<PolicyCheckpoint> trained;
  Agent variant_agent = base_policy.agent;
  std::vector<std::uint64_t> variant_train = training_seeds_for(base_policy, base);
  if (ablation_retrains(variant)) {
    RunConfig tcfg = vcfg;
    if (a.max_episodes) tcfg.max_episodes = *a.max_episodes;
    TrainOptions opt;
    opt.out_dir = out / "train";
    opt.cache = &cache;
    TrainResult res = train(tcfg, sc, opt);
    trained = std::make_unique<PolicyCheckpoint>(res.best ? *res.best : res.final_state);
    variant_agent = Agent::from_net(trained->net, vcfg, ablation_name(variant));
    variant_train = trained->training_seeds;
    m.outputs.push_back("train/train_log.csv");
    m.outputs.push_back("train/checkpoints/best.ckpt");
  }
  variant_agent.label = ablation_name(variant);

  EvalRequest req;
  req.seeds = base.eval_seeds.episode_seeds(base.run_seed);
  req.seed_offset = base.eval_seeds.offset;
  req.reference = base.reference;
  req.training_seeds = training_seeds_for(base_policy, base);
  const EvalReport base_rep = evaluate(base_policy.agent, base, sc, req, &cache);

  req.training_seeds = variant_train;
  req.overrides = ablation_overrides(variant);
  const EvalReport var_rep = evaluate(variant_agent, vcfg, sc, req, &cache);

  print_report(base_rep, "base    ");
  print_report(var_rep, "variant ");
  write_file(out / "base_gains.csv", gains_csv(base_rep));
  write_file(out / "variant_gains.csv", gains_csv(var_rep));
  write_file(out / "ablation.csv", ablation_csv(base_rep, var_rep));
  m.outputs.push_back("base_gains.csv");
  m.outputs.push_back("variant_gains.csv");
  m.outputs.push_back("ablation.csv");
  write_manifest(out, m);
  return kExitOk;
}

// report -----------------------------------------------------------------------

int cmd_report(const std::string& run_dir) {
  for (const auto& f : write_report(run_dir)) std::printf("wrote %s\n", (fs::path(run_dir) / f).c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  g_argv.assign(argv, argv + argc);
  CLI::App app{"cellpilot: learned idle-mode reselection parameter control"};
  app.require_subcommand(1);
  app.set_version_flag("--version", version_string());

  GenTopologyArgs gen;
  auto* c_gen = app.add_subcommand("gen-topology", "Generate a synthetic topology file");
  c_gen->add_option("--preset", gen.preset, "baseline, alternative, large or small");
  c_gen->add_option("--width", gen.width, "Area width in metres");
  c_gen->add_option("--height", gen.height, "Area height in metres");
  c_gen->add_option("--towers", gen.towers, "Number of towers on a regular grid");
  c_gen->add_option("--sectors", gen.sectors, "Sectors per tower");
  c_gen->add_option("--carriers", gen.carriers, "Carriers per sector (1-4)");
  c_gen->add_option("--density", gen.density, "Fraction of blocks holding a building");
  c_gen->add_option("--street-spacing", gen.street_spacing, "Street grid spacing in metres");
  c_gen->add_option("--tx-power", gen.tx_power, "Transmit power in dBm for every cell");
  c_gen->add_option("--seed", gen.seed, "Building layout seed");
  c_gen->add_option("-o,--output", gen.output, "Output topology file")->required();

  TrainArgs tr;
  auto* c_train = app.add_subcommand("train", "Train a policy");
  c_train->add_option("config", tr.config, "Run config (JSON)")->required()->check(CLI::ExistingFile);
  c_train->add_option("-o,--out", tr.out, "Run directory")->required();
  c_train->add_flag("--resume", tr.resume, "Continue from checkpoints/latest.ckpt");
  c_train->add_option("--jobs", tr.jobs, "Parallel episode workers");
  c_train->add_option("--max-episodes", tr.max_episodes, "Stop after this many episodes");
  c_train->add_flag("-q,--quiet", tr.quiet, "No per-episode progress");

  EvalArgs ev;
  auto add_eval_options = [](CLI::App* c, EvalArgs& e) {
    c->add_option("config", e.config, "Run config (JSON)")->required()->check(CLI::ExistingFile);
    c->add_option("-o,--out", e.out, "Output directory")->required();
    c->add_option("--baseline", e.baseline, "Reference preset");
    c->add_option("--ues", e.ues, "UE counts: N, a list 25,50,100 or a range 100..1000:100");
    c->add_option("--pri", e.pri, "Parameter refresh interval in steps");
    c->add_option("--mobility", e.mobility, "Enable UE mobility (true/false)");
    c->add_option("--obstruction", e.obstruction, "Enable wall loss (true/false)");
    c->add_option("--length", e.length, "Episode length in seconds");
    c->add_option("--seeds", e.seeds, "Number of evaluation seeds");
    c->add_option("--jobs", e.jobs, "Parallel episode workers");
    c->add_flag("--trajectories", e.trajectories, "Write per-seed trajectory CSVs");
    c->add_option("--require-gain", e.require_gain,
                  "Exit with status 3 if the median throughput gain is below this value");
  };
  auto* c_eval = app.add_subcommand("eval", "Evaluate a checkpoint or preset against a reference");
  add_eval_options(c_eval, ev);
  c_eval->add_option("--policy", ev.policy, "Checkpoint path or preset name")->required();

  EvalArgs cmp;
  cmp.policy = "config_a";
  auto* c_cmp = app.add_subcommand("compare", "Compare two heuristic presets");
  add_eval_options(c_cmp, cmp);
  c_cmp->add_option("--policy", cmp.policy, "Preset under test")
      ->check(CLI::IsMember({"config_a", "config_b"}));

  AblateArgs ab;
  auto* c_ab = app.add_subcommand("ablate", "Run one ablation variant against a base policy");
  c_ab->add_option("config", ab.config, "Base run config (JSON)")->required()->check(CLI::ExistingFile);
  c_ab->add_option("variant", ab.variant, "Variant name")->required();
  c_ab->add_option("--base-policy", ab.base_policy, "Checkpoint of the base run")->required();
  c_ab->add_option("-o,--out", ab.out, "Output directory")->required();
  c_ab->add_option("--jobs", ab.jobs, "Parallel episode workers");
  c_ab->add_option("--max-episodes", ab.max_episodes, "Training budget for retraining variants");

  std::string report_dir;
  auto* c_rep = app.add_subcommand("report", "Emit plot-ready CSVs for a run directory");
  c_rep->add_option("run_dir", report_dir, "Run directory")->required()->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (c_gen->parsed()) {
      if (gen.preset.empty() && !(gen.width > 0.0 && gen.height > 0.0)) {
        throw ValidationError("gen-topology: give --preset or a positive --width and --height");
      }
      return cmd_gen_topology(gen);
    }
    if (c_train->parsed()) return cmd_train(tr);
    if (c_eval->parsed()) return cmd_eval(ev, "eval");
    if (c_cmp->parsed()) return cmd_eval(cmp, "compare");
    if (c_ab->parsed()) return cmd_ablate(ab);
    if (c_rep->parsed()) return cmd_report(report_dir);
  } catch (const AcceptanceFailure& e) {
    std::fprintf(stderr, "acceptance check failed: %s\n", e.what());
    return kExitAcceptance;
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitRuntime;
}
