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

#ifndef DOST_METRICS_H_
#define DOST_METRICS_H_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "dost/json_writer.h"
#include "dost/data.h"
#include "dost/matrix.h"
#include "dost/rules.h"
#include "dost/supervision.h"

namespace dost {

struct LabelScore {
  std::string label;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;  // positives in the reference
};

struct F1Scores {
  std::vector<LabelScore> per_label;
  double macro_f1 = 0.0;
  double micro_f1 = 0.0;
};

// Standard per-label precision / recall / F1; every 0/0 is taken as 0.
// Micro-F1 pools TP, FP and FN over all labels. `names` may be empty, in
// which case labels are reported by index.
F1Scores f1_scores(const Matrix& predicted, const Matrix& reference,
                   const std::vector<std::string>& names = {});

// Fraction of samples whose every label matches.
double exact_match(const Matrix& predicted, const Matrix& reference);

// Violated (sample, rule) pairs over N * |rules|; 0 for an empty rule set.
double cvr(const Matrix& predicted, const RuleSet& rs);

struct CorrectionRecord {
  std::size_t n_flipped = 0;
  std::size_t n_corrected_right = 0;
  std::size_t n_corrected_wrong = 0;
  std::size_t n_still_masked = 0;
  std::size_t n_undetected = 0;
  std::optional<double> recovery_rate;  // absent when n_flipped == 0
};

// Outcome of self-correction on the injected noise. Each flipped position is
// exactly one of: corrected to its clean value, corrected to the wrong value,
// still masked, or never flagged (undetected). Throws DataError when `ds`
// carries no flip record.
CorrectionRecord correction_report(const SupervisionState& state,
                                   const Dataset& ds);

enum class EvalTarget { kClean, kGiven };

struct MetricsReport {
  std::vector<LabelScore> per_label;
  double macro_f1 = 0.0;
  double micro_f1 = 0.0;
  double exact_match = 0.0;
  double cvr = 0.0;
  std::optional<CorrectionRecord> correction;
  EvalTarget eval_target = EvalTarget::kGiven;
};

Json to_json(const CorrectionRecord& record);
Json to_json(const MetricsReport& report);

}  // namespace dost

#endif  // DOST_METRICS_H_
