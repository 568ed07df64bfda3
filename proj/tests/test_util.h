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

#ifndef DOST_TESTS_TEST_UTIL_H_
#define DOST_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "dost/random.h"
#include "dost/rules.h"

namespace dost::testing {

inline LabelVocabulary letters(std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t k = 0; k < n; ++k) names.push_back(std::string(1, char('A' + k)));
  return LabelVocabulary(names);
}

// Random clause with distinct labels on each side. A label may appear on both
// sides.
inline Rule random_rule(Rng& rng, std::size_t num_labels, std::size_t max_ant,
                        std::size_t max_cons, bool random_weight = false) {
  auto pick_side = [&](std::size_t lo, std::size_t hi) {
    std::vector<std::size_t> labels(num_labels);
    std::iota(labels.begin(), labels.end(), std::size_t{0});
    rng.shuffle(labels);
    const std::size_t n = lo + rng.below(std::min(hi, num_labels) - lo + 1);
    std::vector<Literal> side;
    for (std::size_t k = 0; k < n; ++k) {
      side.push_back({labels[k], rng.bernoulli(0.5)});
    }
    return side;
  };
  Rule r;
  r.antecedent = pick_side(1, max_ant);
  r.consequent = pick_side(0, max_cons);
  if (random_weight && rng.bernoulli(0.5)) {
    r.weight = std::ldexp(static_cast<double>(1 + rng.below(1000)), -3) *
               (rng.bernoulli(0.5) ? 1.0 : 1e-3 * (1 + rng.below(7)));
  }
  return r;
}

// Truth-table oracle over assignment bitmasks, independent of the library's
// evaluator: a clause is violated iff the assignment agrees with every
// antecedent literal and disagrees with every consequent literal.
inline bool oracle_satisfied(const Rule& rule, std::uint32_t assignment) {
  std::uint32_t must_one = 0, must_zero = 0;
  for (const Literal& l : rule.antecedent) {
    (l.negated ? must_zero : must_one) |= 1u << l.label;
  }
  for (const Literal& l : rule.consequent) {
    (l.negated ? must_one : must_zero) |= 1u << l.label;
  }
  // Contradictory requirements (e.g. A => A) can never be met.
  if (must_one & must_zero) return true;
  const bool violated =
      (assignment & must_one) == must_one && (assignment & must_zero) == 0;
  return !violated;
}

inline std::vector<double> bits_to_vector(std::uint32_t assignment,
                                          std::size_t num_labels) {
  std::vector<double> y(num_labels);
  for (std::size_t j = 0; j < num_labels; ++j) y[j] = (assignment >> j) & 1u;
  return y;
}

// |a - n| / max(|a|, |n|, 1e-4).
inline double relative_error(double analytic, double numeric) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-4});
  return std::abs(analytic - numeric) / scale;
}

}  // namespace dost::testing

#endif  // DOST_TESTS_TEST_UTIL_H_
