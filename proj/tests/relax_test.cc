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

#include <gtest/gtest.h>

#include "test_util.h"

namespace dost {
namespace {

using testing::letters;

constexpr double kFdStep = 1e-6;

// Central differences of a scalar function of p, one coordinate at a time.
template <typename F>
std::vector<double> numeric_grad(F f, std::vector<double> p) {
  std::vector<double> g(p.size());
  for (std::size_t j = 0; j < p.size(); ++j) {
    const double saved = p[j];
    p[j] = saved + kFdStep;
    const double up = f(p);
    p[j] = saved - kFdStep;
    const double down = f(p);
    p[j] = saved;
    g[j] = (up - down) / (2.0 * kFdStep);
  }
  return g;
}

std::vector<double> random_probs(Rng& rng, std::size_t n, double lo, double hi) {
  std::vector<double> p(n);
  for (double& v : p) v = rng.uniform(lo, hi);
  return p;
}

TEST(LiteralValueTest, Examples) {
  const std::vector<double> p{0.7};
  EXPECT_DOUBLE_EQ(literal_value({0, false}, p), 0.7);
  EXPECT_DOUBLE_EQ(literal_value({0, true}, p), 0.3);
  EXPECT_EQ(literal_value({0, true}, std::vector<double>{1.0}), 0.0);
  EXPECT_THROW(literal_value({0, false}, std::vector<double>{1.5}),
               std::domain_error);
  EXPECT_THROW(literal_value({0, false}, std::vector<double>{-0.1}),
               std::domain_error);
  EXPECT_THROW(literal_value({1, false}, p), std::invalid_argument);
}

TEST(RulePenaltyTest, MaximalViolation) {
  RuleSet rs = parse_rules("A => B", letters(2));
  EXPECT_EQ(rule_penalty(rs.rules[0], std::vector<double>{1, 0}).value, 1.0);
}

TEST(RulePenaltyTest, MutexPairValueAndGradient) {
  RuleSet rs = parse_rules("A => !B", letters(2));
  const std::vector<double> p{0.5, 0.5};
  PenaltyResult r = rule_penalty(rs.rules[0], p);
  EXPECT_EQ(r.value, 0.25);
  EXPECT_EQ(r.grad, (std::vector<double>{0.5, 0.5}));
  auto fd = numeric_grad(
      [&](const std::vector<double>& q) { return rule_penalty(rs.rules[0], q).value; },
      p);
  EXPECT_NEAR(fd[0], 0.5, 1e-9);
  EXPECT_NEAR(fd[1], 0.5, 1e-9);
}

TEST(RulePenaltyTest, CrispConsistencyExhaustive) {
  Rng rng(5);
  for (std::size_t l = 1; l <= 4; ++l) {
    for (int trial = 0; trial < 200; ++trial) {
      const Rule r = testing::random_rule(rng, l, 3, 3);
      for (std::uint32_t a = 0; a < (1u << l); ++a) {
        const auto p = testing::bits_to_vector(a, l);
        const double expected = testing::oracle_satisfied(r, a) ? 0.0 : 1.0;
        ASSERT_EQ(rule_penalty(r, p).value, expected);
      }
    }
  }
}

TEST(RulePenaltyTest, ValueInUnitIntervalAndUnmentionedGradZero) {
  Rng rng(6);
  for (int trial = 0; trial < 500; ++trial) {
    const Rule r = testing::random_rule(rng, 6, 3, 3);
    const auto p = random_probs(rng, 6, 0.0, 1.0);
    const PenaltyResult pr = rule_penalty(r, p);
    EXPECT_GE(pr.value, 0.0);
    EXPECT_LE(pr.value, 1.0);
    const auto used = rule_labels(r);
    for (std::size_t j = 0; j < 6; ++j) {
      EXPECT_TRUE(std::isfinite(pr.grad[j]));
      if (std::find(used.begin(), used.end(), j) == used.end()) {
        EXPECT_EQ(pr.grad[j], 0.0);
      }
    }
  }
}

TEST(RulePenaltyTest, ZeroExactlyWhenSomeFactorVanishes) {
  Rng rng(7);
  for (int trial = 0; trial < 2000; ++trial) {
    const Rule r = testing::random_rule(rng, 4, 3, 3);
    // Mix of interior and crisp coordinates.
    std::vector<double> p(4);
    for (double& v : p) {
      const auto k = rng.below(3);
      v = k == 0 ? 0.0 : (k == 1 ? 1.0 : rng.uniform(0.01, 0.99));
    }
    bool some_factor_zero = false;
    for (const Literal& l : r.antecedent) {
      if (literal_value(l, p) == 0.0) some_factor_zero = true;
    }
    for (const Literal& l : r.consequent) {
      if (literal_value(l, p) == 1.0) some_factor_zero = true;
    }
    EXPECT_EQ(rule_penalty(r, p).value == 0.0, some_factor_zero);
  }
}

TEST(RulePenaltyTest, GradientMatchesFiniteDifferences) {
  Rng rng(8);
  for (int trial = 0; trial < 500; ++trial) {
    const Rule r = testing::random_rule(rng, 5, 3, 3);
    const auto p = random_probs(rng, 5, 0.05, 0.95);
    const auto analytic = rule_penalty(r, p).grad;
    const auto fd = numeric_grad(
        [&](const std::vector<double>& q) { return rule_penalty(r, q).value; }, p);
    for (std::size_t j = 0; j < p.size(); ++j) {
      EXPECT_LT(testing::relative_error(analytic[j], fd[j]), 1e-5)
          << format_rule(r, letters(5)) << " label " << j;
    }
  }
}

TEST(RulePenaltyTest, ImplicationMonotonicity) {
  RuleSet rs = parse_rules("A => B", letters(2));
  const Rule& r = rs.rules[0];
  for (int i = 0; i <= 10; ++i) {
    for (int k = 0; k < 10; ++k) {
      const double a = i / 10.0, b = k / 10.0, step = 0.1;
      EXPECT_LE(rule_penalty(r, std::vector<double>{a, b}).value,
                rule_penalty(r, std::vector<double>{std::min(1.0, a + step), b}).value);
      EXPECT_GE(rule_penalty(r, std::vector<double>{a, b}).value,
                rule_penalty(r, std::vector<double>{a, b + step}).value);
    }
  }
}

TEST(DomainLossTest, Examples) {
  RuleSet empty = parse_rules("", letters(2));
  EXPECT_EQ(domain_loss(empty, Matrix(1, 2, 0.3)), 0.0);

  RuleSet one = parse_rules("A => !B", letters(2));
  EXPECT_EQ(domain_loss(one, Matrix(1, 2, {1, 1})), 1.0);

  RuleSet two = parse_rules("A => B @ 1\nA => !C @ 1", letters(3));
  EXPECT_EQ(domain_loss(two, Matrix(1, 3, {1, 0, 1})), 1.0);

  EXPECT_THROW(domain_loss(one, Matrix(0, 2)), std::invalid_argument);
  EXPECT_THROW(domain_loss(one, Matrix(1, 3, 0.5)), std::invalid_argument);
}

TEST(DomainLossTest, WeightedMeanOverBatch) {
  // Two samples: first violates only the weight-3 rule fully, second nothing.
  RuleSet rs = parse_rules("A => B @ 3\nB => FALSE", letters(2));
  const double loss = domain_loss(rs, Matrix(2, 2, {1, 0, 0, 0}));
  EXPECT_DOUBLE_EQ(loss, (3.0 / 4.0) / 2.0);
}

TEST(DomainLossGradTest, Examples) {
  RuleSet empty = parse_rules("", letters(2));
  EXPECT_EQ(domain_loss_grad(empty, Matrix(2, 2, 0.3)), Matrix(2, 2, 0.0));

  RuleSet one = parse_rules("A => !B", letters(2));
  EXPECT_EQ(domain_loss_grad(one, Matrix(1, 2, {0.5, 0.5})),
            Matrix(1, 2, {0.5, 0.5}));
}

TEST(DomainLossGradTest, MatchesFiniteDifferences) {
  Rng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    RuleSet rs;
    rs.vocabulary = letters(4);
    const std::size_t nrules = 1 + rng.below(4);
    for (std::size_t k = 0; k < nrules; ++k) {
      rs.rules.push_back(testing::random_rule(rng, 4, 3, 3, true));
    }
    const std::size_t n = 1 + rng.below(5);
    Matrix p(n, 4, random_probs(rng, n * 4, 0.05, 0.95));
    const Matrix g = domain_loss_grad(rs, p);
    for (std::size_t k = 0; k < p.size(); ++k) {
      Matrix up = p, down = p;
      up.values()[k] += kFdStep;
      down.values()[k] -= kFdStep;
      const double fd =
          (domain_loss(rs, up) - domain_loss(rs, down)) / (2.0 * kFdStep);
      EXPECT_LT(testing::relative_error(g.values()[k], fd), 1e-5);
    }
  }
}

TEST(DomainLossGradTest, RowsAreSeparable) {
  RuleSet rs = parse_rules("A & B => C\nMUTEX(A, C)", letters(3));
  Matrix p(3, 3, {0.2, 0.7, 0.4, 0.9, 0.1, 0.6, 0.5, 0.5, 0.5});
  const Matrix g = domain_loss_grad(rs, p);
  Matrix p2 = p;
  p2(2, 0) = 0.05;
  p2(2, 2) = 0.95;
  const Matrix g2 = domain_loss_grad(rs, p2);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(g(i, j), g2(i, j));
  }
}

}  // namespace
}  // namespace dost
