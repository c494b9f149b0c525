// Copyright (c) 2026, The cellpilot Authors
// SPDX-License-Identifier: Apache-2.0

#include "cellpilot/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cellpilot/errors.hpp"

namespace cellpilot {

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// y[r] = act(b[r] + W[r, :] . x)
template <typename Act>
void dense(const double* w, const double* b, std::span<const double> x, std::vector<double>& y,
           std::size_t rows, Act act) {
  const std::size_t cols = x.size();
  y.resize(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = w + r * cols;
    double acc = 0.0;
    for (std::size_t c = 0; c < cols; ++c) acc += row[c] * x[c];
    y[r] = act(b[r] + acc);
  }
}

}  // namespace

std::size_t PolicyShape::param_count() const {
  return hidden1 * input + hidden1 + hidden2 * hidden1 + hidden2 + output * hidden2 + output;
}

PolicyNet::PolicyNet(const PolicyShape& shape) : shape_(shape), params_(shape.param_count(), 0.0) {
  if (shape.input == 0 || shape.hidden1 == 0 || shape.hidden2 == 0) {
    throw ValidationError("policy: layer sizes must be positive");
  }
  if (shape.output != kActionSize) {
    throw ValidationError("policy: output size must be " + std::to_string(kActionSize));
  }
}

void PolicyNet::init_uniform(Rng& rng) {
  auto fill = [&](std::size_t from, std::size_t to, std::size_t fan_in) {
    const double a = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (std::size_t i = from; i < to; ++i) params_[i] = rng.uniform(-a, a);
  };
  fill(w1(), w2(), shape_.input);
  fill(w2(), w3(), shape_.hidden1);
  fill(w3(), params_.size(), shape_.hidden2);
}

bool PolicyNet::is_weight(std::size_t i) const {
  return i < b1() || (i >= w2() && i < b2()) || (i >= w3() && i < b3());
}

std::vector<double> PolicyNet::forward(std::span<const double> obs, ForwardCache* cache) const {
  if (obs.size() != shape_.input) {
    throw ValidationError("policy: observation length " + std::to_string(obs.size()) +
                          ", expected " + std::to_string(shape_.input));
  }
  const double* p = params_.data();
  ForwardCache local;
  ForwardCache& c = cache ? *cache : local;
  c.input.assign(obs.begin(), obs.end());
  auto tanh_act = [](double z) { return std::tanh(z); };
  dense(p + w1(), p + b1(), c.input, c.h1, shape_.hidden1, tanh_act);
  dense(p + w2(), p + b2(), c.h1, c.h2, shape_.hidden2, tanh_act);
  dense(p + w3(), p + b3(), c.h2, c.out, shape_.output, sigmoid);
  return c.out;
}

void PolicyNet::backward(const ForwardCache& c, std::span<const double> d_out,
                         std::span<double> grad) const {
  const std::size_t n_in = shape_.input;
  const std::size_t n_h1 = shape_.hidden1;
  const std::size_t n_h2 = shape_.hidden2;
  const std::size_t n_out = shape_.output;
  const double* p = params_.data();
  double* g = grad.data();

  std::vector<double> dz3(n_out);
  for (std::size_t k = 0; k < n_out; ++k) dz3[k] = d_out[k] * c.out[k] * (1.0 - c.out[k]);

  std::vector<double> dz2(n_h2, 0.0);
  for (std::size_t k = 0; k < n_out; ++k) {
    if (dz3[k] == 0.0) continue;
    const double* w_row = p + w3() + k * n_h2;
    double* g_row = g + w3() + k * n_h2;
    for (std::size_t j = 0; j < n_h2; ++j) {
      g_row[j] += dz3[k] * c.h2[j];
      dz2[j] += w_row[j] * dz3[k];
    }
    g[b3() + k] += dz3[k];
  }
  for (std::size_t j = 0; j < n_h2; ++j) dz2[j] *= 1.0 - c.h2[j] * c.h2[j];

  std::vector<double> dz1(n_h1, 0.0);
  for (std::size_t j = 0; j < n_h2; ++j) {
    const double d = dz2[j];
    if (d == 0.0) continue;
    const double* w_row = p + w2() + j * n_h1;
    double* g_row = g + w2() + j * n_h1;
    for (std::size_t i = 0; i < n_h1; ++i) {
      g_row[i] += d * c.h1[i];
      dz1[i] += w_row[i] * d;
    }
    g[b2() + j] += d;
  }
  for (std::size_t i = 0; i < n_h1; ++i) dz1[i] *= 1.0 - c.h1[i] * c.h1[i];

  for (std::size_t i = 0; i < n_h1; ++i) {
    const double d = dz1[i];
    if (d == 0.0) continue;
    double* g_row = g + w1() + i * n_in;
    for (std::size_t x = 0; x < n_in; ++x) g_row[x] += d * c.input[x];
    g[b1() + i] += d;
  }
}

std::array<double, kTunableCount> GaussianHead::sigma(std::span<const double> out) const {
  std::array<double, kTunableCount> s{};
  for (std::size_t i = 0; i < kTunableCount; ++i) {
    s[i] = std::max(sigma_cap * out[kTunableCount + i], sigma_min);
  }
  return s;
}

double GaussianHead::log_prob(std::span<const double> out, std::span<const double> action) const {
  const auto s = sigma(out);
  double lp = 0.0;
  for (std::size_t i = 0; i < kTunableCount; ++i) {
    const double z = (action[i] - out[i]) / s[i];
    lp += -0.5 * z * z - std::log(s[i]) - 0.5 * std::log(2.0 * std::numbers::pi);
  }
  return lp;
}

void GaussianHead::log_prob_grad(std::span<const double> out, std::span<const double> action,
                                 std::span<double> d_out) const {
  const auto s = sigma(out);
  for (std::size_t i = 0; i < kTunableCount; ++i) {
    const double diff = action[i] - out[i];
    d_out[i] = diff / (s[i] * s[i]);
    const bool floored = sigma_cap * out[kTunableCount + i] <= sigma_min;
    const double d_sigma = diff * diff / (s[i] * s[i] * s[i]) - 1.0 / s[i];
    d_out[kTunableCount + i] = floored ? 0.0 : d_sigma * sigma_cap;
  }
}

ActionSample sample_action(std::span<const double> out, const GaussianHead& head, Rng& rng) {
  ActionSample a;
  const auto s = head.sigma(out);
  for (std::size_t i = 0; i < kTunableCount; ++i) a.action[i] = out[i] + s[i] * rng.normal();
  a.log_prob = head.log_prob(out, a.action);
  return a;
}

std::vector<double> reinforce_gradient(const PolicyNet& net, const GaussianHead& head,
                                       std::span<const DecisionRecord> records) {
  std::vector<double> grad(net.params().size(), 0.0);
  ForwardCache cache;
  std::array<double, kActionSize> d_out{};
  for (std::size_t j = 0; j < records.size(); ++j) {
    const auto& rec = records[j];
    if (!std::isfinite(rec.weight)) {
      throw Error("policy gradient: non-finite reward in record " + std::to_string(j));
    }
    if (rec.weight == 0.0) continue;
    net.forward(rec.obs, &cache);
    head.log_prob_grad(cache.out, rec.action, d_out);
    for (double& d : d_out) {
      d *= -rec.weight;
      if (!std::isfinite(d)) {
        throw Error("policy gradient: non-finite gradient in record " + std::to_string(j));
      }
    }
    net.backward(cache, d_out, grad);
  }
  for (double gv : grad) {
    if (!std::isfinite(gv)) throw Error("policy gradient: non-finite accumulated gradient");
  }
  return grad;
}

double reinforce_loss(const PolicyNet& net, const GaussianHead& head,
                      std::span<const DecisionRecord> records) {
  double loss = 0.0;
  for (const auto& rec : records) {
    const auto out = net.forward(rec.obs);
    loss -= rec.weight * head.log_prob(out, rec.action);
  }
  return loss;
}

AdamWState make_adamw_state(const PolicyNet& net, double lr) {
  AdamWState s;
  s.m.assign(net.params().size(), 0.0);
  s.v.assign(net.params().size(), 0.0);
  s.lr = lr;
  return s;
}

double global_norm(std::span<const double> g) {
  double sq = 0.0;
  for (double v : g) sq += v * v;
  return std::sqrt(sq);
}

double clip_global_norm(std::span<double> g, double threshold) {
  const double norm = global_norm(g);
  if (norm > threshold && norm > 0.0) {
    const double scale = threshold / norm;
    for (double& v : g) v *= scale;
  }
  return norm;
}

double adamw_step(PolicyNet& net, AdamWState& opt, const AdamWConfig& cfg, std::span<double> grad) {
  auto& p = net.params();
  if (grad.size() != p.size() || opt.m.size() != p.size() || opt.v.size() != p.size()) {
    throw ValidationError("optimizer: gradient/moment shapes do not match the network");
  }
  const double norm = clip_global_norm(grad, cfg.clip_norm);
  ++opt.step;
  const double t = static_cast<double>(opt.step);
  const double c1 = 1.0 - std::pow(cfg.beta1, t);
  const double c2 = 1.0 - std::pow(cfg.beta2, t);
  const double decay = opt.lr * cfg.weight_decay;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (decay != 0.0 && net.is_weight(i)) p[i] -= decay * p[i];
    const double g = grad[i];
    opt.m[i] = cfg.beta1 * opt.m[i] + (1.0 - cfg.beta1) * g;
    opt.v[i] = cfg.beta2 * opt.v[i] + (1.0 - cfg.beta2) * g * g;
    const double m_hat = opt.m[i] / c1;
    const double v_hat = opt.v[i] / c2;
    p[i] -= opt.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
  }
  return norm;
}

void warm_start(PolicyNet& net, const ReselectionParams& preset) {
  auto& p = net.params();
  std::fill(p.begin() + static_cast<std::ptrdiff_t>(net.w3()), p.end(), 0.0);
  const auto norm = normalize_params(preset);
  for (std::size_t i = 0; i < kTunableCount; ++i) {
    const double x = norm[i];
    double logit;
    if (x <= 0.0) {
      logit = -kWarmStartLogitClamp;
    } else if (x >= 1.0) {
      logit = kWarmStartLogitClamp;
    } else {
      logit = std::clamp(std::log(x / (1.0 - x)), -kWarmStartLogitClamp, kWarmStartLogitClamp);
    }
    p[net.b3() + i] = logit;
  }
}

}  // namespace cellpilot
