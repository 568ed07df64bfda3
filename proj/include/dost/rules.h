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

#ifndef DOST_RULES_H_
#define DOST_RULES_H_

// Propositional domain rules over a multi-label vocabulary.
//
// A rule is a clause `a1 & ... & an => c1 | ... | cm` over label literals.
// An empty consequent (written `FALSE`) forbids the antecedent outright.
// `MUTEX(a, b, c)` is sugar for the pairwise exclusions `a => !b`,
// `a => !c`, `b => !c`.
//
// Rule file grammar, one rule per line, `#` starts a comment:
//
//   rule := conj "=>" disj ["@" weight]
//         | "MUTEX" "(" ident ("," ident)+ ")" ["@" weight]
//   conj := lit ("&" lit)*
//   disj := lit ("|" lit)* | "FALSE"
//   lit  := ["!"] ident

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace dost {

enum class RuleErrorKind {
  kSyntax,
  kUnknownIdentifier,
  kDuplicateLiteral,
  kNonpositiveWeight,
  kEmptyAntecedent,
  kInvalidVocabulary,
  kLengthMismatch,
};

const char* to_string(RuleErrorKind kind);

// Thrown for every rule-related validation failure. `line` and `column` are
// 1-based and zero when the error has no source position.
class RuleError : public std::runtime_error {
 public:
  RuleError(RuleErrorKind kind, const std::string& message,
            std::size_t line = 0, std::size_t column = 0);

  RuleErrorKind kind() const { return kind_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  RuleErrorKind kind_;
  std::size_t line_;
  std::size_t column_;
};

// Ordered set of label identifiers. Names match [A-Za-z_][A-Za-z0-9_]* and
// must not collide with the keywords MUTEX or FALSE.
class LabelVocabulary {
 public:
  LabelVocabulary() = default;
  explicit LabelVocabulary(std::vector<std::string> names);

  std::size_t size() const { return names_.size(); }
  bool empty() const { return names_.empty(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(std::size_t index) const { return names_.at(index); }

  std::optional<std::size_t> find(std::string_view name) const;
  // Throws RuleError(kUnknownIdentifier).
  std::size_t index_of(std::string_view name) const;
  // Appends `name` if missing and returns its index.
  std::size_t intern(std::string_view name);

  friend bool operator==(const LabelVocabulary& a, const LabelVocabulary& b) {
    return a.names_ == b.names_;
  }

  static bool is_valid_identifier(std::string_view name);

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct Literal {
  std::size_t label = 0;
  bool negated = false;

  friend bool operator==(const Literal&, const Literal&) = default;
};

struct Rule {
  std::vector<Literal> antecedent;  // conjunction, nonempty
  std::vector<Literal> consequent;  // disjunction, empty means FALSE
  double weight = 1.0;
  std::size_t line = 0;  // 1-based source line, 0 if built in code
  std::string text;      // original source text of the line
};

// Literal order is sorted by label index; source info is dropped.
Rule canonicalize(Rule rule);

// Equality of the logical content and weight, ignoring literal order and
// source info.
bool structurally_equal(const Rule& a, const Rule& b);

// Validates a rule against `num_labels`: nonempty antecedent, labels in
// range, no label twice on one side, finite positive weight.
void validate_rule(const Rule& rule, std::size_t num_labels);

struct RuleSet {
  LabelVocabulary vocabulary;
  std::vector<Rule> rules;

  std::size_t num_labels() const { return vocabulary.size(); }
  double total_weight() const;
};

// Parses rule-file text. When `vocab` is given every identifier must exist in
// it; otherwise the vocabulary is built in order of first appearance.
// Duplicate rules are kept; a message is appended to `warnings` for each.
RuleSet parse_rules(std::string_view text,
                    const std::optional<LabelVocabulary>& vocab = std::nullopt,
                    std::vector<std::string>* warnings = nullptr);

// Reads a rule file from disk and parses it. I/O failures throw
// std::runtime_error.
RuleSet load_rules(const std::string& path,
                   const std::optional<LabelVocabulary>& vocab = std::nullopt,
                   std::vector<std::string>* warnings = nullptr);

// Rewrites `rs` onto `target` by label name. Every label used by a rule must
// exist in `target`.
RuleSet reindex(const RuleSet& rs, const LabelVocabulary& target);

// True iff a literal holds under binary labels `y`.
bool literal_holds(const Literal& lit, std::span<const double> y);

// Crisp clause semantics: not(all antecedent literals hold) or (some
// consequent literal holds). `y` must be binary and cover every label used.
bool hard_satisfied(const Rule& rule, std::span<const double> y);

// Ascending indices of rules violated by `y`. y.size() must equal the
// vocabulary size.
std::vector<std::size_t> violated_rules(const RuleSet& rs,
                                        std::span<const double> y);

// Canonical text: literals ascending by label index, " => " separator,
// " @ w" suffix unless the weight is exactly 1.
std::string format_rule(const Rule& rule, const LabelVocabulary& vocab);

// Distinct labels mentioned by the rule, ascending.
std::vector<std::size_t> rule_labels(const Rule& rule);

}  // namespace dost

#endif  // DOST_RULES_H_
