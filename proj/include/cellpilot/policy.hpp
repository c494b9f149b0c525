// Copyright (c) 2026, The cellpilot Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CELLPILOT_POLICY_HPP_
#define CELLPILOT_POLICY_HPP_

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "cellpilot/reselect.hpp"
#include "cellpilot/rlenv.hpp"
#include "cellpilot/rng.hpp"

namespace cellpilot {

struct PolicyShape {
  std::size_t input = 0;
  std::size_t hidden1 = 1024;
  std::size_t hidden2 = 1024;
  std::size_t output = kActionSize;

  std::size_t param_count() const;
  friend bool operator==(const PolicyShape&, const PolicyShape&) = default;
};

/// Cached activations of one forward pass.
struct ForwardCache {
  std::vector<double> input;
  std::vector<double> h1;
  std::vector<double> h2;
  std::vector<double> out;  // sigmoid outputs
};

/// input -> tanh(hidden1) -> tanh(hidden2) -> sigmoid(output). All
/// parameters live in one flat vector laid out as W1, b1, W2, b2, W3, b3 with
/// row-major weights (row = output unit).
class PolicyNet {
 public:
  PolicyNet() = default;
  explicit PolicyNet(const PolicyShape& shape);

  const PolicyShape& shape() const { return shape_; }
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }

  /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and biases.
  void init_uniform(Rng& rng);
  bool is_weight(std::size_t index) const;

  /// Throws ValidationError when obs has the wrong length.
  std::vector<double> forward(std::span<const double> obs, ForwardCache* cache = nullptr) const;
  /// Accumulates into `grad` the parameter gradient of sum_i d_out[i] * out[i].
  void backward(const ForwardCache& cache, std::span<const double> d_out,
                std::span<double> grad) const;

  std::size_t w1() const { return 0; }
  std::size_t b1() const { return w1() + shape_.hidden1 * shape_.input; }
  std::size_t w2() const { return b1() + shape_.hidden1; }
  std::size_t b2() const { return w2() + shape_.hidden2 * shape_.hidden1; }
  std::size_t w3() const { return b2() + shape_.hidden2; }
  std::size_t b3() const { return w3() + shape_.output * shape_.hidden2; }

  friend bool operator==(const PolicyNet&, const PolicyNet&) = default;

 private:
  PolicyShape shape_;
  std::vector<double> params_;
};

struct GaussianHead {
  double sigma_cap = 0.1;
  double sigma_min = 1e-3;

  /// sigma_i = max(sigma_cap * out[6 + i], sigma_min).
  std::array<double, kTunableCount> sigma(std::span<const double> out) const;
  /// Sum over the six dimensions of log N(a_i; mu_i, sigma_i).
  double log_prob(std::span<const double> out, std::span<const double> action) const;
  /// d log_prob / d out, written into d_out (length 12).
  void log_prob_grad(std::span<const double> out, std::span<const double> action,
                     std::span<double> d_out) const;
};

struct ActionSample {
  std::array<double, kTunableCount> action{};  // unclipped Gaussian draw
  double log_prob = 0.0;
};

ActionSample sample_action(std::span<const double> out, const GaussianHead& head, Rng& rng);

struct DecisionRecord {
  std::vector<double> obs;
  std::array<double, kTunableCount> action{};
  double weight = 0.0;  // reward multiplying log pi(a | s)
};

/// Gradient of L = -sum_j weight_j * log pi(a_j | s_j). Throws Error naming
/// the record index when a non-finite gradient appears.
std::vector<double> reinforce_gradient(const PolicyNet& net, const GaussianHead& head,
                                       std::span<const DecisionRecord> records);
/// L itself, for finite-difference checks.
double reinforce_loss(const PolicyNet& net, const GaussianHead& head,
                      std::span<const DecisionRecord> records);

struct AdamWConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 1e-4;
  double clip_norm = 10.0;
};

struct AdamWState {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t step = 0;
  double lr = 1e-4;

  friend bool operator==(const AdamWState&, const AdamWState&) = default;
};

AdamWState make_adamw_state(const PolicyNet& net, double lr);
double global_norm(std::span<const double> g);
/// Rescales g in place when its norm exceeds threshold. Returns the pre-clip norm.
double clip_global_norm(std::span<double> g, double threshold);
/// Clips, applies decoupled weight decay to weights only, then the
/// bias-corrected Adam step. Returns the pre-clip gradient norm.
double adamw_step(PolicyNet& net, AdamWState& opt, const AdamWConfig& cfg, std::span<double> grad);

inline constexpr double kWarmStartLogitClamp = 8.0;

/// Mean-head biases = logit(normalized preset), all output weights zeroed,
/// sigma-head biases 0 (sigma = sigma_cap / 2).
void warm_start(PolicyNet& net, const ReselectionParams& preset);

}  // namespace cellpilot

#endif  // CELLPILOT_POLICY_HPP_
