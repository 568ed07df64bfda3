/* Copyright 2026 The DOST Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    https://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "dost/model.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "dost/random.h"
#include "dost/relax.h"

namespace dost {

ModelParams zero_params(std::size_t input_dim, std::size_t hidden_units,
                        std::size_t num_labels) {
  ModelParams p;
  p.w1 = Matrix(hidden_units, input_dim, 0.0);
  p.b1.assign(hidden_units, 0.0);
  p.w2 = Matrix(num_labels, hidden_units, 0.0);
  p.b2.assign(num_labels, 0.0);
  return p;
}

const char* to_string(CorrectionMode mode) {
  switch (mode) {
    case CorrectionMode::kOff:
      return "off";
    case CorrectionMode::kMaskOnly:
      return "mask_only";
    case CorrectionMode::kRelabel:
      return "relabel";
  }
  return "off";
}

CorrectionMode parse_correction_mode(const std::string& text) {
  if (text == "off") return CorrectionMode::kOff;
  if (text == "mask_only") return CorrectionMode::kMaskOnly;
  if (text == "relabel") return CorrectionMode::kRelabel;
  throw std::invalid_argument("unknown correction mode '" + text +
                              "' (expected off, mask_only or relabel)");
}

void TrainConfig::validate() const {
  auto fail = [](const std::string& msg) {
    throw std::invalid_argument("invalid training config: " + msg);
  };
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
    fail("learning_rate must be > 0");
  if (epochs < 1) fail("epochs must be >= 1");
  if (batch_size < 1) fail("batch_size must be >= 1");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) fail("lambda must be >= 0");
  if (warmup_epochs < 0) fail("warmup_epochs must be >= 0");
  if (warmup_epochs > epochs) fail("warmup_epochs must not exceed epochs");
  if (!(tau > 0.5 && tau < 1.0)) fail("tau must lie in (0.5, 1)");
  if (hidden_units < 1) fail("hidden_units must be >= 1");
}

Json to_json(const TrainConfig& cfg) {
  Json j;
  j["learning_rate"] = cfg.learning_rate;
  j["epochs"] = cfg.epochs;
  j["batch_size"] = cfg.batch_size;
  j["lambda"] = cfg.lambda;
  j["warmup_epochs"] = cfg.warmup_epochs;
  j["tau"] = cfg.tau;
  j["hidden_units"] = cfg.hidden_units;
  j["seed"] = cfg.seed;
  j["correction_mode"] = to_string(cfg.correction_mode);
  return j;
}

ModelParams init_params(std::uint64_t seed, std::size_t input_dim,
                        std::size_t hidden_units, std::size_t num_labels) {
  if (input_dim == 0 || hidden_units == 0 || num_labels == 0) {
    throw std::invalid_argument("init_params: dimensions must be >= 1");
  }
  ModelParams p = zero_params(input_dim, hidden_units, num_labels);
  Rng rng(derive_seed(seed, kStreamInit, 0));
  const double bound1 = 1.0 / std::sqrt(static_cast<double>(input_dim));
  for (double& w : p.w1.values()) w = rng.uniform(-bound1, bound1);
  const double bound2 = 1.0 / std::sqrt(static_cast<double>(hidden_units));
  for (double& w : p.w2.values()) w = rng.uniform(-bound2, bound2);
  return p;
}

namespace {

double sigmoid(double z) {
  // Split on sign so exp never overflows.
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void check_shapes(const Matrix& probs, const Matrix& targets,
                  const Matrix& mask) {
  if (!probs.same_shape(targets) || !probs.same_shape(mask)) {
    throw std::invalid_argument("bce: shape mismatch (P " + shape_string(probs) +
                                ", T " + shape_string(targets) + ", M " +
                                shape_string(mask) + ")");
  }
}

double mask_count(const Matrix& mask) {
  double n = 0.0;
  for (double m : mask.values()) {
    if (m != 0.0) n += 1.0;
  }
  return n;
}

}  // namespace

Forward forward(const ModelParams& params, const Matrix& x) {
  const std::size_t n = x.rows();
  const std::size_t d = params.input_dim();
  const std::size_t h = params.hidden_units();
  const std::size_t l = params.num_labels();
  if (x.cols() != d) {
    throw std::invalid_argument("forward: input has " + std::to_string(x.cols()) +
                                " features, model expects " + std::to_string(d));
  }
  Forward out{Matrix(n, h), Matrix(n, l)};
  for (std::size_t i = 0; i < n; ++i) {
    auto xi = x.row(i);
    auto hi = out.hidden.row(i);
    for (std::size_t k = 0; k < h; ++k) {
      double z = params.b1[k];
      auto wk = params.w1.row(k);
      for (std::size_t c = 0; c < d; ++c) z += xi[c] * wk[c];
      hi[k] = std::tanh(z);
    }
    auto pi = out.probs.row(i);
    for (std::size_t j = 0; j < l; ++j) {
      double z = params.b2[j];
      auto wj = params.w2.row(j);
      for (std::size_t k = 0; k < h; ++k) z += hi[k] * wj[k];
      pi[j] = sigmoid(z);
    }
  }
  return out;
}

double bce_masked(const Matrix& probs, const Matrix& targets,
                  const Matrix& mask) {
  check_shapes(probs, targets, mask);
  const double count = mask_count(mask);
  if (count == 0.0) throw std::invalid_argument("no supervision");
  double sum = 0.0;
  const auto& p = probs.values();
  const auto& t = targets.values();
  const auto& m = mask.values();
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (m[k] == 0.0) continue;
    const double ph = std::clamp(p[k], kBceClamp, 1.0 - kBceClamp);
    sum -= t[k] * std::log(ph) + (1.0 - t[k]) * std::log(1.0 - ph);
  }
  return sum / count;
}

Matrix bce_masked_grad(const Matrix& probs, const Matrix& targets,
                       const Matrix& mask) {
  check_shapes(probs, targets, mask);
  const double count = mask_count(mask);
  if (count == 0.0) throw std::invalid_argument("no supervision");
  Matrix grad(probs.rows(), probs.cols(), 0.0);
  const auto& p = probs.values();
  const auto& t = targets.values();
  const auto& m = mask.values();
  auto& g = grad.values();
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (m[k] == 0.0) continue;
    if (p[k] < kBceClamp || p[k] > 1.0 - kBceClamp) continue;
    g[k] = (-t[k] / p[k] + (1.0 - t[k]) / (1.0 - p[k])) / count;
  }
  return grad;
}

ModelParams backward(const ModelParams& params, const Matrix& x,
                     const Forward& fwd, const Matrix& grad_probs) {
  const std::size_t n = x.rows();
  const std::size_t d = params.input_dim();
  const std::size_t h = params.hidden_units();
  const std::size_t l = params.num_labels();
  if (!grad_probs.same_shape(fwd.probs) || fwd.hidden.rows() != n) {
    throw std::invalid_argument("backward: shape mismatch");
  }
  ModelParams g = zero_params(d, h, l);
  std::vector<double> dz2(l);
  std::vector<double> dz1(h);
  for (std::size_t i = 0; i < n; ++i) {
    auto xi = x.row(i);
    auto hi = fwd.hidden.row(i);
    auto pi = fwd.probs.row(i);
    auto gi = grad_probs.row(i);
    for (std::size_t j = 0; j < l; ++j) {
      dz2[j] = gi[j] * pi[j] * (1.0 - pi[j]);
    }
    for (std::size_t j = 0; j < l; ++j) {
      auto gw = g.w2.row(j);
      for (std::size_t k = 0; k < h; ++k) gw[k] += dz2[j] * hi[k];
      g.b2[j] += dz2[j];
    }
    for (std::size_t k = 0; k < h; ++k) {
      double dh = 0.0;
      for (std::size_t j = 0; j < l; ++j) dh += dz2[j] * params.w2(j, k);
      dz1[k] = dh * (1.0 - hi[k] * hi[k]);
    }
    for (std::size_t k = 0; k < h; ++k) {
      auto gw = g.w1.row(k);
      for (std::size_t c = 0; c < d; ++c) gw[c] += dz1[k] * xi[c];
      g.b1[k] += dz1[k];
    }
  }
  return g;
}

LossAndGrads total_loss_and_grads(const ModelParams& params, const Matrix& x,
                                  const Matrix& targets, const Matrix& mask,
                                  const RuleSet& rs, double lambda) {
  if (!(lambda >= 0.0)) {
    throw std::invalid_argument("lambda must be >= 0");
  }
  const Forward fwd = forward(params, x);
  LossAndGrads out;
  out.bce = bce_masked(fwd.probs, targets, mask);
  Matrix grad_probs = bce_masked_grad(fwd.probs, targets, mask);
  if (!rs.rules.empty()) {
    out.domain = domain_loss(rs, fwd.probs);
    // With lambda == 0 the domain term is left out entirely so the result
    // is bitwise identical to plain BCE.
    if (lambda != 0.0) {
      const Matrix dg = domain_loss_grad(rs, fwd.probs);
      auto& g = grad_probs.values();
      const auto& dv = dg.values();
      for (std::size_t k = 0; k < g.size(); ++k) g[k] += lambda * dv[k];
    }
  }
  out.loss = lambda != 0.0 ? out.bce + lambda * out.domain : out.bce;
  out.grads = backward(params, x, fwd, grad_probs);
  return out;
}

ModelParams sgd_step(const ModelParams& params, const ModelParams& grads,
                     double learning_rate) {
  if (!params.w1.same_shape(grads.w1) || !params.w2.same_shape(grads.w2) ||
      params.b1.size() != grads.b1.size() ||
      params.b2.size() != grads.b2.size()) {
    throw std::invalid_argument("sgd_step: gradient shape mismatch");
  }
  ModelParams out = params;
  auto step = [learning_rate](std::vector<double>& theta,
                              const std::vector<double>& g) {
    for (std::size_t k = 0; k < theta.size(); ++k) {
      theta[k] -= learning_rate * g[k];
    }
  };
  step(out.w1.values(), grads.w1.values());
  step(out.b1, grads.b1);
  step(out.w2.values(), grads.w2.values());
  step(out.b2, grads.b2);
  return out;
}

Json checkpoint_json(const ModelParams& params, std::uint64_t seed,
                     const Json& config) {
  Json doc;
  doc["dims"] = {{"D", params.input_dim()},
                 {"H", params.hidden_units()},
                 {"L", params.num_labels()}};
  doc["seed"] = seed;
  doc["W1"] = params.w1.values();
  doc["b1"] = params.b1;
  doc["W2"] = params.w2.values();
  doc["b2"] = params.b2;
  doc["config"] = config;
  return doc;
}

void save_checkpoint(const std::string& path, const ModelParams& params,
                     std::uint64_t seed, const Json& config) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint '" + path + "'");
  out << to_json_text(checkpoint_json(params, seed, config), 2) << '\n';
  if (!out) throw std::runtime_error("failed writing checkpoint '" + path + "'");
}

ModelParams params_from_checkpoint(const Json& doc) {
  try {
    const auto& dims = doc.at("dims");
    const auto d = dims.at("D").get<std::size_t>();
    const auto h = dims.at("H").get<std::size_t>();
    const auto l = dims.at("L").get<std::size_t>();
    if (d == 0 || h == 0 || l == 0) {
      throw std::invalid_argument("checkpoint dims must be >= 1");
    }
    ModelParams p;
    p.w1 = Matrix(h, d, doc.at("W1").get<std::vector<double>>());
    p.b1 = doc.at("b1").get<std::vector<double>>();
    p.w2 = Matrix(l, h, doc.at("W2").get<std::vector<double>>());
    p.b2 = doc.at("b2").get<std::vector<double>>();
    if (p.b1.size() != h || p.b2.size() != l) {
      throw std::invalid_argument("checkpoint bias length mismatch");
    }
    return p;
  } catch (const Json::exception& e) {
    throw std::invalid_argument(std::string("malformed checkpoint: ") +
                                e.what());
  }
}

ModelParams load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint '" + path + "'");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw std::invalid_argument("checkpoint '" + path +
                                "' is not valid JSON: " + e.what());
  }
  return params_from_checkpoint(doc);
}

}  // namespace dost
