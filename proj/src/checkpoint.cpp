// Copyright (c) 2026, The cellpilot Authors
// SPDX-License-Identifier: Apache-2.0

#include "cellpilot/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <sstream>

#include "cellpilot/errors.hpp"
#include "cellpilot/text_util.hpp"

namespace cellpilot {

namespace {

constexpr char kMagic[4] = {'C', 'P', 'C', 'K'};

class Writer {
 public:
  void bytes(const void* p, std::size_t n) { out_.append(static_cast<const char*>(p), n); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void f64s(const std::vector<double>& v) {
    for (double x : v) f64(x);
  }
  void str(const std::string& s) {
    u64(s.size());
    out_ += s;
  }
  std::string& out() { return out_; }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(const std::string& in) : in_(in) {}

  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw CorruptFileError("checkpoint: truncated");
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{static_cast<unsigned char>(in_[pos_++])} << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t{static_cast<unsigned char>(in_[pos_++])} << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::vector<double> f64s(std::size_t n) {
    need(n * 8);
    std::vector<double> v(n);
    for (auto& x : v) x = f64();
    return v;
  }
  std::string str() {
    const std::uint64_t n = u64();
    need(n);
    std::string s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t pos() const { return pos_; }

 private:
  const std::string& in_;
  std::size_t pos_ = 0;
};

std::string encode_progress(const TrainerProgress& p) {
  std::ostringstream os;
  os << "round " << p.round << "\npass " << p.pass << "\nposition " << p.position << "\nepisode "
     << p.episode << "\nconverged_at " << p.converged_at << "\nhas_best " << p.has_best
     << "\nbest_score " << format_double(p.best_score) << "\nbest_episode " << p.best_episode
     << "\npermutation";
  for (auto v : p.permutation) os << ' ' << v;
  os << "\nrewards";
  for (double v : p.episode_rewards) os << ' ' << format_double(v);
  os << "\n";
  return os.str();
}

TrainerProgress decode_progress(const std::string& text) {
  TrainerProgress p;
  std::istringstream in(text);
  std::string line;
  try {
    while (std::getline(in, line)) {
      const auto tok = split_ws(line);
      if (tok.empty()) continue;
      const std::string& k = tok[0];
      auto one = [&]() -> const std::string& {
        if (tok.size() != 2) throw CorruptFileError("checkpoint progress: bad field '" + k + "'");
        return tok[1];
      };
      if (k == "round") p.round = static_cast<std::size_t>(parse_int(one()));
      else if (k == "pass") p.pass = static_cast<std::size_t>(parse_int(one()));
      else if (k == "position") p.position = static_cast<std::size_t>(parse_int(one()));
      else if (k == "episode") p.episode = static_cast<std::size_t>(parse_int(one()));
      else if (k == "converged_at") p.converged_at = static_cast<std::size_t>(parse_int(one()));
      else if (k == "has_best") p.has_best = parse_int(one()) != 0;
      else if (k == "best_score") p.best_score = parse_double(one());
      else if (k == "best_episode") p.best_episode = static_cast<std::size_t>(parse_int(one()));
      else if (k == "permutation") {
        for (std::size_t i = 1; i < tok.size(); ++i) {
          p.permutation.push_back(static_cast<std::size_t>(parse_int(tok[i])));
        }
      } else if (k == "rewards") {
        for (std::size_t i = 1; i < tok.size(); ++i) p.episode_rewards.push_back(parse_double(tok[i]));
      } else {
        throw CorruptFileError("checkpoint progress: unknown field '" + k + "'");
      }
    }
  } catch (const std::invalid_argument& e) {
    throw CorruptFileError(std::string("checkpoint progress: ") + e.what());
  }
  return p;
}

}  // namespace

std::string encode_checkpoint(const PolicyCheckpoint& ck) {
  const auto& shape = ck.net.shape();
  const auto& params = ck.net.params();
  if (ck.optimizer.m.size() != params.size() || ck.optimizer.v.size() != params.size()) {
    throw ValidationError("checkpoint: optimizer moments do not match the network");
  }
  Writer w;
  w.bytes(kMagic, 4);
  w.u32(kCheckpointVersion);
  w.u64(ck.config_hash);
  w.u64(shape.input);
  w.u64(shape.hidden1);
  w.u64(shape.hidden2);
  w.u64(shape.output);
  w.u64(params.size());
  w.f64s(params);
  w.u64(ck.optimizer.step);
  w.f64(ck.optimizer.lr);
  w.f64s(ck.optimizer.m);
  w.f64s(ck.optimizer.v);
  w.str(ck.rng_state);
  w.str(ck.baselines.serialize());
  w.str(encode_progress(ck.progress));
  w.u64(ck.training_seeds.size());
  for (auto s : ck.training_seeds) w.u64(s);
  const std::uint64_t sum = fnv1a64(w.out());
  w.u64(sum);
  return std::move(w.out());
}

PolicyCheckpoint decode_checkpoint(const std::string& bytes) {
  if (bytes.size() < 8 + 8 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw CorruptFileError("checkpoint: not a checkpoint file (bad magic)");
  }
  Reader body(bytes);
  body.u32();  // magic, checked above
  const std::uint32_t version = body.u32();
  if (version != kCheckpointVersion) {
    throw VersionError("checkpoint: unsupported version " + std::to_string(version) +
                       " (expected " + std::to_string(kCheckpointVersion) + ")");
  }
  const std::string payload = bytes.substr(0, bytes.size() - 8);
  {
    std::uint64_t stored = 0;
    for (int i = 0; i < 8; ++i) {
      stored |= std::uint64_t{static_cast<unsigned char>(bytes[bytes.size() - 8 + i])} << (8 * i);
    }
    if (stored != fnv1a64(payload)) throw CorruptFileError("checkpoint: checksum mismatch");
  }

  PolicyCheckpoint ck;
  ck.config_hash = body.u64();
  PolicyShape shape;
  shape.input = body.u64();
  shape.hidden1 = body.u64();
  shape.hidden2 = body.u64();
  shape.output = body.u64();
  const std::uint64_t n = body.u64();
  if (n != shape.param_count()) throw CorruptFileError("checkpoint: parameter count mismatch");
  ck.net = PolicyNet(shape);
  ck.net.params() = body.f64s(n);
  ck.optimizer.step = body.u64();
  ck.optimizer.lr = body.f64();
  ck.optimizer.m = body.f64s(n);
  ck.optimizer.v = body.f64s(n);
  ck.rng_state = body.str();
  ck.baselines = BaselineTable::deserialize(body.str());
  ck.progress = decode_progress(body.str());
  const std::uint64_t seeds = body.u64();
  body.need(seeds * 8);
  for (std::uint64_t i = 0; i < seeds; ++i) ck.training_seeds.push_back(body.u64());
  if (body.pos() != payload.size()) throw CorruptFileError("checkpoint: trailing bytes");
  return ck;
}

void save_checkpoint(const PolicyCheckpoint& ck, const std::filesystem::path& path) {
  write_file(path, encode_checkpoint(ck));
}

PolicyCheckpoint load_checkpoint(const std::filesystem::path& path) {
  std::string bytes;
  try {
    bytes = read_file(path);
  } catch (const std::exception& e) {
    throw IoError("checkpoint '" + path.string() + "': " + e.what());
  }
  try {
    return decode_checkpoint(bytes);
  } catch (const VersionError& e) {
    throw VersionError("'" + path.string() + "': " + e.what());
  } catch (const CorruptFileError& e) {
    throw CorruptFileError("'" + path.string() + "': " + e.what());
  }
}

}  // namespace cellpilot
