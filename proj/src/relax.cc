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

#include "dost/relax.h"

#include <stdexcept>
#include <string>

namespace dost {
namespace {

void check_probability(double v) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw std::domain_error("probability " + std::to_string(v) +
                            " outside [0, 1]");
  }
}

void check_batch(const RuleSet& rs, const Matrix& probs) {
  if (probs.rows() == 0) {
    throw std::invalid_argument("domain loss needs a nonempty batch");
  }
  if (!rs.rules.empty() && probs.cols() != rs.num_labels()) {
    throw std::invalid_argument("probability matrix has " +
                                std::to_string(probs.cols()) +
                                " columns, rule vocabulary has " +
                                std::to_string(rs.num_labels()));
  }
}

// A rule's factors in evaluation order: antecedent literals contribute
// v(l), consequent literals 1 - v(l). `sign` is d factor / d p[label].
struct Factor {
  std::size_t label;
  double value;
  double sign;
};

std::vector<Factor> factors(const Rule& rule, std::span<const double> p) {
  std::vector<Factor> out;
  out.reserve(rule.antecedent.size() + rule.consequent.size());
  for (const Literal& lit : rule.antecedent) {
    out.push_back({lit.label, literal_value(lit, p), lit.negated ? -1.0 : 1.0});
  }
  for (const Literal& lit : rule.consequent) {
    out.push_back(
        {lit.label, 1.0 - literal_value(lit, p), lit.negated ? 1.0 : -1.0});
  }
  return out;
}

}  // namespace

double literal_value(const Literal& lit, std::span<const double> p) {
  if (lit.label >= p.size()) {
    throw std::invalid_argument("literal label " + std::to_string(lit.label) +
                                " outside probability vector of length " +
                                std::to_string(p.size()));
  }
  const double v = p[lit.label];
  check_probability(v);
  return lit.negated ? 1.0 - v : v;
}

PenaltyResult rule_penalty(const Rule& rule, std::span<const double> p) {
  PenaltyResult result;
  result.grad.assign(p.size(), 0.0);
  const std::vector<Factor> fs = factors(rule, p);

  double value = 1.0;
  for (const Factor& f : fs) value *= f.value;
  result.value = value;

  // Product rule: d/dp of the k-th factor times all the others, multiplied
  // left to right with factor k skipped. Quadratic, but rules are short and
  // this stays exact when some factor is zero.
  for (std::size_t k = 0; k < fs.size(); ++k) {
    double others = 1.0;
    for (std::size_t m = 0; m < fs.size(); ++m) {
      if (m != k) others *= fs[m].value;
    }
    result.grad[fs[k].label] += fs[k].sign * others;
  }
  return result;
}

double domain_loss(const RuleSet& rs, const Matrix& probs) {
  check_batch(rs, probs);
  if (rs.rules.empty()) return 0.0;
  const double total_weight = rs.total_weight();
  double sum = 0.0;
  for (std::size_t i = 0; i < probs.rows(); ++i) {
    double sample = 0.0;
    for (const Rule& rule : rs.rules) {
      sample += rule.weight * rule_penalty(rule, probs.row(i)).value;
    }
    sum += sample / total_weight;
  }
  return sum / static_cast<double>(probs.rows());
}

Matrix domain_loss_grad(const RuleSet& rs, const Matrix& probs) {
  check_batch(rs, probs);
  Matrix grad(probs.rows(), probs.cols(), 0.0);
  if (rs.rules.empty()) return grad;
  const double scale =
      1.0 / (rs.total_weight() * static_cast<double>(probs.rows()));
  for (std::size_t i = 0; i < probs.rows(); ++i) {
    std::span<double> g = grad.row(i);
    for (const Rule& rule : rs.rules) {
      const PenaltyResult pr = rule_penalty(rule, probs.row(i));
      for (std::size_t j = 0; j < g.size(); ++j) {
        g[j] += rule.weight * pr.grad[j];
      }
    }
    for (double& v : g) v *= scale;
  }
  return grad;
}

}  // namespace dost
