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

#ifndef DOST_TRAINING_H_
#define DOST_TRAINING_H_

// The domain-obedient self-supervised training schedule.
//
//  1. Flag every label taking part in a rule its sample's given labels
//     violate, and (unless correction is off) mask those labels out of BCE.
//  2. Train on BCE + lambda * domain_loss with shuffled mini-batch SGD.
//  3. In relabel mode, after every epoch e >= warmup_epochs, replace masked
//     labels the model is confident about (p >= tau or p <= 1 - tau) with
//     the predicted value. Corrections are permanent.

#include <cstddef>
#include <string>
#include <vector>

#include "dost/data.h"
#include "dost/json_writer.h"
#include "dost/metrics.h"
#include "dost/model.h"
#include "dost/rules.h"
#include "dost/supervision.h"

namespace dost {

struct EpochRecord {
  int epoch = 0;
  double bce = 0.0;          // full-dataset masked BCE after the epoch
  double domain_loss = 0.0;  // full-dataset domain loss after the epoch
  double total = 0.0;
  std::size_t masked = 0;    // after this epoch's correction pass
  std::size_t corrected_cumulative = 0;
};

using TrainHistory = std::vector<EpochRecord>;

struct TrainResult {
  ModelParams params;
  TrainHistory history;
  SupervisionState state;
};

// `rs` is matched to the dataset's labels by name.
TrainResult train(const Dataset& data, const RuleSet& rs,
                  const TrainConfig& cfg);

// Epoch order: one seeded permutation of 0..n-1 per epoch.
std::vector<std::size_t> epoch_order(std::uint64_t seed, int epoch,
                                     std::size_t n);

inline constexpr double kDefaultThreshold = 0.5;

// Binarizes predictions with p >= threshold -> 1.
Matrix binarize(const Matrix& probs, double threshold);

// Scores thresholded predictions against the dataset's evaluation labels
// (clean labels when recorded). `correction` is left empty.
MetricsReport evaluate(const ModelParams& params, const Dataset& data,
                       const RuleSet& rs,
                       double threshold = kDefaultThreshold);

Json to_json(const EpochRecord& record);
// One JSON object per line, one line per epoch.
std::string history_jsonl(const TrainHistory& history);

}  // namespace dost

#endif  // DOST_TRAINING_H_
