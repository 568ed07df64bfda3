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

#include "dost/supervision.h"

#include <stdexcept>

namespace dost {

const char* to_string(LabelOrigin origin) {
  switch (origin) {
    case LabelOrigin::kGiven:
      return "given";
    case LabelOrigin::kMasked:
      return "masked";
    case LabelOrigin::kSelfCorrected:
      return "self_corrected";
  }
  return "given";
}

std::size_t SupervisionState::count(LabelOrigin which) const {
  std::size_t n = 0;
  for (LabelOrigin o : origin) {
    if (o == which) ++n;
  }
  return n;
}

Matrix flag_inconsistent(const RuleSet& rs, const Matrix& y) {
  if (!rs.rules.empty() && y.cols() != rs.num_labels()) {
    throw std::invalid_argument("flag_inconsistent: labels have " +
                                std::to_string(y.cols()) +
                                " columns, rules cover " +
                                std::to_string(rs.num_labels()));
  }
  Matrix flags(y.rows(), y.cols(), 0.0);
  if (rs.rules.empty()) return flags;
  for (std::size_t i = 0; i < y.rows(); ++i) {
    for (std::size_t r : violated_rules(rs, y.row(i))) {
      for (std::size_t j : rule_labels(rs.rules[r])) flags(i, j) = 1.0;
    }
  }
  return flags;
}

SupervisionState init_supervision(const Matrix& y, const Matrix& flags,
                                  CorrectionMode mode) {
  if (!y.same_shape(flags)) {
    throw std::invalid_argument("init_supervision: flag shape mismatch");
  }
  SupervisionState s;
  s.targets = y;
  s.mask = Matrix(y.rows(), y.cols(), 1.0);
  s.flags = flags;
  s.origin.assign(y.size(), LabelOrigin::kGiven);
  if (mode == CorrectionMode::kOff) return s;
  for (std::size_t k = 0; k < y.size(); ++k) {
    if (flags.values()[k] != 0.0) {
      s.mask.values()[k] = 0.0;
      s.origin[k] = LabelOrigin::kMasked;
    }
  }
  return s;
}

std::size_t correct_labels(SupervisionState& state, const Matrix& probs,
                           double tau) {
  if (!(tau > 0.5 && tau < 1.0)) {
    throw std::invalid_argument("tau must lie in (0.5, 1)");
  }
  if (!probs.same_shape(state.targets)) {
    throw std::invalid_argument("correct_labels: prediction shape mismatch");
  }
  std::size_t corrected = 0;
  for (std::size_t k = 0; k < state.origin.size(); ++k) {
    if (state.origin[k] != LabelOrigin::kMasked) continue;
    const double p = probs.values()[k];
    if (p >= tau) {
      state.targets.values()[k] = 1.0;
    } else if (p <= 1.0 - tau) {
      state.targets.values()[k] = 0.0;
    } else {
      continue;
    }
    state.mask.values()[k] = 1.0;
    state.origin[k] = LabelOrigin::kSelfCorrected;
    ++corrected;
  }
  return corrected;
}

}  // namespace dost
