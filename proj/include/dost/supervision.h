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

#ifndef DOST_SUPERVISION_H_
#define DOST_SUPERVISION_H_

// Rule-driven supervision bookkeeping: which given labels are implicated in
// a rule violation, which are masked out of the supervised loss, and which
// have been replaced by a confident model prediction.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "dost/matrix.h"
#include "dost/model.h"
#include "dost/rules.h"

namespace dost {

enum class LabelOrigin : std::uint8_t { kGiven, kMasked, kSelfCorrected };

const char* to_string(LabelOrigin origin);

// Invariants: origin kMasked <=> mask 0. Flags come from the original labels
// and are never recomputed. Targets are always 0 or 1.
struct SupervisionState {
  Matrix targets;  // N x L
  Matrix mask;     // N x L, 1 = participates in BCE
  Matrix flags;    // N x L, 1 = implicated in a violated rule
  std::vector<LabelOrigin> origin;  // N * L, row-major

  std::size_t rows() const { return targets.rows(); }
  std::size_t cols() const { return targets.cols(); }
  LabelOrigin origin_at(std::size_t i, std::size_t j) const {
    return origin[i * cols() + j];
  }
  std::size_t count(LabelOrigin which) const;

  friend bool operator==(const SupervisionState&,
                         const SupervisionState&) = default;
};

// flags(i, j) = 1 iff label j appears, with either polarity, in some rule
// that y.row(i) violates. `rs` must be indexed over y's columns.
Matrix flag_inconsistent(const RuleSet& rs, const Matrix& y);

// kOff ignores the flags; the other modes mask every flagged position.
SupervisionState init_supervision(const Matrix& y, const Matrix& flags,
                                  CorrectionMode mode);

// Turns masked positions with probs >= tau into target 1 and probs <= 1 - tau
// into target 0, unmasking them for good. Returns the number corrected.
std::size_t correct_labels(SupervisionState& state, const Matrix& probs,
                           double tau);

}  // namespace dost

#endif  // DOST_SUPERVISION_H_
