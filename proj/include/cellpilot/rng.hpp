// Copyright (c) 2026, The cellpilot Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CELLPILOT_RNG_HPP_
#define CELLPILOT_RNG_HPP_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace cellpilot {

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Child seed for stream `index` under `parent`. Used for the
/// run -> episode -> UE seed hierarchy; independent of derivation order.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index);

/// Seeded random stream. All variates are built from the raw 64-bit engine
/// output so the full state is the engine state.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n);
  double exponential(double rate);
  /// Standard normal (Box-Muller, one variate per call).
  double normal();

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[index(i)]);
  }

  std::string state() const;
  void set_state(const std::string& s);

  friend bool operator==(const Rng& a, const Rng& b) { return a.engine_ == b.engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace cellpilot

#endif  // CELLPILOT_RNG_HPP_
