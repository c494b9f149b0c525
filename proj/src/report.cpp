// Copyright (c) 2026, The cellpilot Authors
// SPDX-License-Identifier: Apache-2.0

#include "cellpilot/report.hpp"

#include <sstream>

#include <json.hpp>

#include "cellpilot/errors.hpp"
#include "cellpilot/text_util.hpp"

#ifndef CELLPILOT_GIT_DESCRIBE
#define CELLPILOT_GIT_DESCRIBE "unknown"
#endif

namespace cellpilot {

namespace {

constexpr const char* kVersion = "0.1.0";

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line != "\r") out.push_back(line);
  }
  return out;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name,
                   const std::string& what) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw CorruptFileError(what + ": missing column '" + name + "'");
}

void stats_cells(std::ostream& os, const GainStats& s) {
  os << format_double(s.median) << ',' << format_double(s.p05) << ',' << format_double(s.p95);
}

}  // namespace

std::string gains_csv(const EvalReport& rep) {
  std::ostringstream os;
  os << "seed_index,seed,tput_gain,lb_gain,ue_gain\n";
  for (const auto& g : rep.per_seed) {
    os << g.seed_index << ',' << g.seed << ',' << format_double(g.tput_gain) << ','
       << format_double(g.lb_gain) << ',' << format_double(g.ue_gain) << "\n";
  }
  return os.str();
}

EvalReport parse_gains_csv(const std::string& text) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw CorruptFileError("gains csv: empty file");
  const auto header = split_csv(lines[0]);
  const std::size_t ci = column(header, "seed_index", "gains csv");
  const std::size_t cs = column(header, "seed", "gains csv");
  const std::size_t ct = column(header, "tput_gain", "gains csv");
  const std::size_t cl = column(header, "lb_gain", "gains csv");
  const std::size_t cu = column(header, "ue_gain", "gains csv");
  EvalReport rep;
  std::vector<double> t, l, u;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split_csv(lines[i]);
    if (f.size() != header.size()) {
      throw CorruptFileError("gains csv line " + std::to_string(i + 1) + ": expected " +
                             std::to_string(header.size()) + " fields");
    }
    SeedGain g;
    try {
      g.seed_index = static_cast<std::size_t>(parse_int(f[ci]));
      g.seed = std::stoull(f[cs]);
      g.tput_gain = parse_double(f[ct]);
      g.lb_gain = parse_double(f[cl]);
      g.ue_gain = parse_double(f[cu]);
    } catch (const std::exception& e) {
      throw CorruptFileError("gains csv line " + std::to_string(i + 1) + ": " + e.what());
    }
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

std::string gains_summary_csv(const EvalReport& rep) {
  std::ostringstream os;
  os << "metric,median,p05,p95\n";
  os << "tput,";
  stats_cells(os, rep.tput);
  os << "\nlb,";
  stats_cells(os, rep.lb);
  os << "\nue,";
  stats_cells(os, rep.ue);
  os << "\n";
  return os.str();
}

std::string sweep_csv(const std::vector<std::pair<std::size_t, EvalReport>>& points) {
  std::ostringstream os;
  os << "n_ues,tput_median,tput_p05,tput_p95,lb_median,lb_p05,lb_p95,ue_median,ue_p05,ue_p95\n";
  for (const auto& [n, rep] : points) {
    os << n << ',';
    stats_cells(os, rep.tput);
    os << ',';
    stats_cells(os, rep.lb);
    os << ',';
    stats_cells(os, rep.ue);
    os << "\n";
  }
  return os.str();
}

std::string convergence_csv(const std::string& train_log_text) {
  const auto lines = lines_of(train_log_text);
  if (lines.empty()) throw CorruptFileError("train log: empty file");
  const auto header = split_csv(lines[0]);
  const std::size_t ce = column(header, "episode", "train log");
  const std::size_t cr = column(header, "reward", "train log");
  const std::size_t cw = column(header, "ewma", "train log");
  const std::size_t cd = column(header, "round", "train log");
  std::ostringstream os;
  os << "episode,reward,ewma,round\n";
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split_csv(lines[i]);
    if (f.size() != header.size()) {
      throw CorruptFileError("train log line " + std::to_string(i + 1) + ": expected " +
                             std::to_string(header.size()) + " fields");
    }
    os << f[ce] << ',' << f[cr] << ',' << f[cw] << ',' << f[cd] << "\n";
  }
  return os.str();
}

std::string ablation_csv(const EvalReport& base, const EvalReport& variant) {
  if (base.per_seed.size() != variant.per_seed.size()) {
    throw ValidationError("ablation: base and variant were evaluated on different seed counts");
  }
  std::ostringstream os;
  os << "seed_index,seed,base_tput,variant_tput,delta_tput,base_lb,variant_lb,delta_lb,base_ue,"
        "variant_ue,delta_ue\n";
  for (std::size_t i = 0; i < base.per_seed.size(); ++i) {
    const auto& b = base.per_seed[i];
    const auto& v = variant.per_seed[i];
    if (b.seed != v.seed) throw ValidationError("ablation: seed lists are not paired");
    os << b.seed_index << ',' << b.seed << ',' << format_double(b.tput_gain) << ','
       << format_double(v.tput_gain) << ',' << format_double(v.tput_gain - b.tput_gain) << ','
       << format_double(b.lb_gain) << ',' << format_double(v.lb_gain) << ','
       << format_double(v.lb_gain - b.lb_gain) << ',' << format_double(b.ue_gain) << ','
       << format_double(v.ue_gain) << ',' << format_double(v.ue_gain - b.ue_gain) << "\n";
  }
  return os.str();
}

std::string manifest_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["command"] = m.command;
  j["argv"] = m.argv;
  j["version"] = m.version;
  j["config"] = m.config_json.empty() ? nlohmann::ordered_json() : nlohmann::ordered_json::parse(m.config_json);
  j["topology_hash"] = m.topology_hash;
  j["run_seed"] = m.run_seed;
  j["seeds"] = {{"train", m.train_seeds},
                {"validation", m.validation_seeds},
                {"eval", m.eval_seeds}};
  j["outputs"] = m.outputs;
  return j.dump(2) + "\n";
}

RunManifest parse_manifest(const std::string& text) {
  RunManifest m;
  try {
    const auto j = nlohmann::json::parse(text);
    m.command = j.at("command").get<std::string>();
    m.argv = j.at("argv").get<std::vector<std::string>>();
    m.version = j.at("version").get<std::string>();
    if (!j.at("config").is_null()) m.config_json = j.at("config").dump(2);
    m.topology_hash = j.at("topology_hash").get<std::string>();
    m.run_seed = j.at("run_seed").get<std::uint64_t>();
    const auto& s = j.at("seeds");
    m.train_seeds = s.at("train").get<std::vector<std::uint64_t>>();
    m.validation_seeds = s.at("validation").get<std::vector<std::uint64_t>>();
    m.eval_seeds = s.at("eval").get<std::vector<std::uint64_t>>();
    m.outputs = j.at("outputs").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw CorruptFileError(std::string("manifest: ") + e.what());
  }
  return m;
}

void write_manifest(const std::filesystem::path& dir, const RunManifest& m) {
  std::filesystem::create_directories(dir);
  write_file(dir / kManifestName, manifest_json(m));
}

RunManifest read_manifest(const std::filesystem::path& dir) {
  const auto path = dir / kManifestName;
  if (!std::filesystem::exists(path)) {
    throw IoError("'" + dir.string() + "' has no " + kManifestName);
  }
  try {
    return parse_manifest(read_file(path));
  } catch (const CorruptFileError& e) {
    throw CorruptFileError("'" + path.string() + "': " + e.what());
  }
}

std::vector<std::string> write_report(const std::filesystem::path& run_dir) {
  read_manifest(run_dir);
  const auto plots = run_dir / "plots";
  std::vector<std::string> written;
  auto emit = [&](const std::string& name, const std::string& body) {
    std::filesystem::create_directories(plots);
    write_file(plots / name, body);
    written.push_back("plots/" + name);
  };
  auto load = [&](const std::filesystem::path& p) {
    try {
      return read_file(p);
    } catch (const std::exception& e) {
      throw IoError("'" + p.string() + "': " + e.what());
    }
  };
  auto wrap = [&](const std::filesystem::path& p, auto fn) {
    try {
      return fn();
    } catch (const CorruptFileError& e) {
      throw CorruptFileError("'" + p.string() + "': " + e.what());
    }
  };

  const auto log = run_dir / "train_log.csv";
  if (std::filesystem::exists(log)) {
    const std::string text = load(log);
    emit("convergence.csv", wrap(log, [&] { return convergence_csv(text); }));
  }
  const auto gains = run_dir / "gains.csv";
  if (std::filesystem::exists(gains)) {
    const std::string text = load(gains);
    const EvalReport rep = wrap(gains, [&] { return parse_gains_csv(text); });
    emit("gains.csv", gains_csv(rep));
    emit("gains_summary.csv", gains_summary_csv(rep));
  }
  const auto sweep = run_dir / "sweep.csv";
  if (std::filesystem::exists(sweep)) emit("sweep.csv", load(sweep));
  const auto ablation = run_dir / "ablation.csv";
  if (std::filesystem::exists(ablation)) emit("ablation.csv", load(ablation));
  if (written.empty()) {
    throw IoError("'" + run_dir.string() + "' contains no train_log.csv, gains.csv or sweep.csv");
  }
  return written;
}

std::string version_string() { return std::string(kVersion) + " (" + CELLPILOT_GIT_DESCRIBE + ")"; }

}  // namespace cellpilot
