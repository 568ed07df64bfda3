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

#ifndef DOST_RELAX_H_
#define DOST_RELAX_H_

// Product-logic relaxation of rules over predicted label probabilities.
//
// For a rule  a1 & ... & an => c1 | ... | cm  and probabilities p, the
// violation degree is
//
//   v(a1) * ... * v(an) * (1 - v(c1)) * ... * (1 - v(cm))
//
// where v(l) = p[l] for a positive literal and 1 - p[l] for a negated one.
// On crisp p this is exactly the indicator of a hard violation. Products are
// always taken left to right over antecedent then consequent literals in the
// rule's stored order.

#include <span>
#include <vector>

#include "dost/matrix.h"
#include "dost/rules.h"

namespace dost {

struct PenaltyResult {
  double value = 0.0;
  std::vector<double> grad;  // d value / d p, length = p.size()
};

double literal_value(const Literal& lit, std::span<const double> p);

PenaltyResult rule_penalty(const Rule& rule, std::span<const double> p);

// Weighted mean penalty, averaged over the batch:
//   (1/N) sum_i sum_r w_r * penalty(r, p_i) / sum_r w_r
// Zero for an empty rule set.
double domain_loss(const RuleSet& rs, const Matrix& probs);

// Exact gradient of domain_loss with respect to every entry of `probs`.
Matrix domain_loss_grad(const RuleSet& rs, const Matrix& probs);

}  // namespace dost

#endif  // DOST_RELAX_H_
