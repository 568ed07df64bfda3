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

#ifndef DOST_MODEL_H_
#define DOST_MODEL_H_

// One-hidden-layer multi-label classifier:
//
//   hidden = tanh(X W1^T + b1)
//   P      = sigmoid(hidden W2^T + b2)
//
// trained on  masked BCE + lambda * domain_loss  with plain SGD. All
// gradients are analytic.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "dost/json_writer.h"
#include "dost/matrix.h"
#include "dost/rules.h"

namespace dost {

struct ModelParams {
  Matrix w1;               // H x D
  std::vector<double> b1;  // H
  Matrix w2;               // L x H
  std::vector<double> b2;  // L

  std::size_t input_dim() const { return w1.cols(); }
  std::size_t hidden_units() const { return w1.rows(); }
  std::size_t num_labels() const { return w2.rows(); }

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

// Zero-valued parameters with the given dimensions.
ModelParams zero_params(std::size_t input_dim, std::size_t hidden_units,
                        std::size_t num_labels);

enum class CorrectionMode { kOff, kMaskOnly, kRelabel };

const char* to_string(CorrectionMode mode);
// Accepts "off", "mask_only", "relabel"; throws std::invalid_argument.
CorrectionMode parse_correction_mode(const std::string& text);

struct TrainConfig {
  double learning_rate = 0.05;
  int epochs = 60;
  int batch_size = 32;
  double lambda = 1.0;
  int warmup_epochs = 15;
  double tau = 0.9;
  int hidden_units = 16;
  std::uint64_t seed = 0;
  CorrectionMode correction_mode = CorrectionMode::kRelabel;

  // Throws std::invalid_argument describing the first violated constraint.
  void validate() const;
};

Json to_json(const TrainConfig& cfg);

// Weights uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)], drawn W1 row-major
// then W2 row-major; biases zero.
ModelParams init_params(std::uint64_t seed, std::size_t input_dim,
                        std::size_t hidden_units, std::size_t num_labels);

struct Forward {
  Matrix hidden;  // N x H, post-tanh
  Matrix probs;   // N x L
};

Forward forward(const ModelParams& params, const Matrix& x);

inline constexpr double kBceClamp = 1e-7;

// Mean over entries with mask 1 of the binary cross-entropy, with p clamped
// to [kBceClamp, 1 - kBceClamp]. Throws std::invalid_argument("no
// supervision") when every entry is masked out.
double bce_masked(const Matrix& probs, const Matrix& targets,
                  const Matrix& mask);

// d bce_masked / d probs. Zero where the mask is 0 and where the clamp is
// active.
Matrix bce_masked_grad(const Matrix& probs, const Matrix& targets,
                       const Matrix& mask);

// Backpropagates d loss / d probs through the network.
ModelParams backward(const ModelParams& params, const Matrix& x,
                     const Forward& fwd, const Matrix& grad_probs);

struct LossAndGrads {
  double loss = 0.0;    // bce + lambda * domain
  double bce = 0.0;
  double domain = 0.0;  // unweighted domain_loss
  ModelParams grads;
};

LossAndGrads total_loss_and_grads(const ModelParams& params, const Matrix& x,
                                  const Matrix& targets, const Matrix& mask,
                                  const RuleSet& rs, double lambda);

// theta - lr * g for every tensor.
ModelParams sgd_step(const ModelParams& params, const ModelParams& grads,
                     double learning_rate);

// Checkpoint document: {dims, seed, W1, b1, W2, b2, config}.
Json checkpoint_json(const ModelParams& params, std::uint64_t seed,
                     const Json& config);
void save_checkpoint(const std::string& path, const ModelParams& params,
                     std::uint64_t seed, const Json& config);
ModelParams params_from_checkpoint(const Json& doc);
ModelParams load_checkpoint(const std::string& path);

}  // namespace dost

#endif  // DOST_MODEL_H_
