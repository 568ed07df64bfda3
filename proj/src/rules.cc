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

#include "dost/rules.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace dost {

const char* to_string(RuleErrorKind kind) {
  switch (kind) {
    case RuleErrorKind::kSyntax:
      return "syntax error";
    case RuleErrorKind::kUnknownIdentifier:
      return "unknown identifier";
    case RuleErrorKind::kDuplicateLiteral:
      return "duplicate literal";
    case RuleErrorKind::kNonpositiveWeight:
      return "nonpositive weight";
    case RuleErrorKind::kEmptyAntecedent:
      return "empty antecedent";
    case RuleErrorKind::kInvalidVocabulary:
      return "invalid vocabulary";
    case RuleErrorKind::kLengthMismatch:
      return "length mismatch";
  }
  return "rule error";
}

namespace {

std::string position_prefix(std::size_t line, std::size_t column) {
  if (line == 0) return "";
  std::string s = "line " + std::to_string(line);
  if (column != 0) s += ", column " + std::to_string(column);
  return s + ": ";
}

}  // namespace

RuleError::RuleError(RuleErrorKind kind, const std::string& message,
                     std::size_t line, std::size_t column)
    : std::runtime_error(position_prefix(line, column) + to_string(kind) +
                         ": " + message),
      kind_(kind),
      line_(line),
      column_(column) {}

// ---------------------------------------------------------------------------
// LabelVocabulary

namespace {

constexpr std::string_view kMutexKeyword = "MUTEX";
constexpr std::string_view kFalseKeyword = "FALSE";

bool is_ident_start(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
}
bool is_ident_char(char c) {
  return is_ident_start(c) || (c >= '0' && c <= '9');
}

}  // namespace

bool LabelVocabulary::is_valid_identifier(std::string_view name) {
  if (name.empty() || !is_ident_start(name.front())) return false;
  if (name == kMutexKeyword || name == kFalseKeyword) return false;
  return std::all_of(name.begin(), name.end(), is_ident_char);
}

LabelVocabulary::LabelVocabulary(std::vector<std::string> names) {
  if (names.empty()) {
    throw RuleError(RuleErrorKind::kInvalidVocabulary,
                    "vocabulary must contain at least one label");
  }
  for (auto& n : names) {
    if (!is_valid_identifier(n)) {
      throw RuleError(RuleErrorKind::kInvalidVocabulary,
                      "invalid label name '" + n + "'");
    }
    if (find(n)) {
      throw RuleError(RuleErrorKind::kInvalidVocabulary,
                      "duplicate label name '" + n + "'");
    }
    intern(n);
  }
}

std::optional<std::size_t> LabelVocabulary::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t LabelVocabulary::index_of(std::string_view name) const {
  if (auto idx = find(name)) return *idx;
  throw RuleError(RuleErrorKind::kUnknownIdentifier,
                  "label '" + std::string(name) + "' is not in the vocabulary");
}

std::size_t LabelVocabulary::intern(std::string_view name) {
  if (auto idx = find(name)) return *idx;
  names_.emplace_back(name);
  index_.emplace(names_.back(), names_.size() - 1);
  return names_.size() - 1;
}

// ---------------------------------------------------------------------------
// Rule helpers

namespace {

bool literal_less(const Literal& a, const Literal& b) {
  if (a.label != b.label) return a.label < b.label;
  return a.negated < b.negated;
}

}  // namespace

Rule canonicalize(Rule rule) {
  std::sort(rule.antecedent.begin(), rule.antecedent.end(), literal_less);
  std::sort(rule.consequent.begin(), rule.consequent.end(), literal_less);
  rule.line = 0;
  rule.text.clear();
  return rule;
}

bool structurally_equal(const Rule& a, const Rule& b) {
  Rule ca = canonicalize(a);
  Rule cb = canonicalize(b);
  return ca.antecedent == cb.antecedent && ca.consequent == cb.consequent &&
         ca.weight == cb.weight;
}

void validate_rule(const Rule& rule, std::size_t num_labels) {
  if (rule.antecedent.empty()) {
    throw RuleError(RuleErrorKind::kEmptyAntecedent,
                    "rule has no antecedent literal", rule.line);
  }
  if (!(rule.weight > 0.0) || !std::isfinite(rule.weight)) {
    throw RuleError(RuleErrorKind::kNonpositiveWeight,
                    "weight must be a finite positive number", rule.line);
  }
  for (const auto* side : {&rule.antecedent, &rule.consequent}) {
    std::vector<bool> seen(num_labels, false);
    for (const Literal& lit : *side) {
      if (lit.label >= num_labels) {
        throw RuleError(RuleErrorKind::kUnknownIdentifier,
                        "label index " + std::to_string(lit.label) +
                            " out of range for " + std::to_string(num_labels) +
                            " labels",
                        rule.line);
      }
      if (seen[lit.label]) {
        throw RuleError(RuleErrorKind::kDuplicateLiteral,
                        "label index " + std::to_string(lit.label) +
                            " appears twice on one side",
                        rule.line);
      }
      seen[lit.label] = true;
    }
  }
}

double RuleSet::total_weight() const {
  double total = 0.0;
  for (const Rule& r : rules) total += r.weight;
  return total;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

enum class Tok { kIdent, kBang, kAnd, kOr, kArrow, kLParen, kRParen, kComma,
                 kAt, kNumber, kEnd };

const char* tok_name(Tok t) {
  switch (t) {
    case Tok::kIdent: return "identifier";
    case Tok::kBang: return "'!'";
    case Tok::kAnd: return "'&'";
    case Tok::kOr: return "'|'";
    case Tok::kArrow: return "'=>'";
    case Tok::kLParen: return "'('";
    case Tok::kRParen: return "')'";
    case Tok::kComma: return "','";
    case Tok::kAt: return "'@'";
    case Tok::kNumber: return "number";
    case Tok::kEnd: return "end of line";
  }
  return "token";
}

struct Token {
  Tok kind;
  std::string_view text;
  std::size_t column;  // 1-based
};

std::vector<Token> tokenize(std::string_view line, std::size_t line_no) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    const char c = line[i];
    const std::size_t col = i + 1;
    if (c == ' ' || c == '\t') {
      ++i;
      continue;
    }
    if (is_ident_start(c)) {
      std::size_t j = i;
      while (j < line.size() && is_ident_char(line[j])) ++j;
      out.push_back({Tok::kIdent, line.substr(i, j - i), col});
      i = j;
      continue;
    }
    if ((c >= '0' && c <= '9') || c == '.' || c == '-' || c == '+') {
      std::size_t j = i + 1;
      while (j < line.size()) {
        const char d = line[j];
        const bool exp_sign =
            (d == '-' || d == '+') && (line[j - 1] == 'e' || line[j - 1] == 'E');
        if ((d >= '0' && d <= '9') || d == '.' || d == 'e' || d == 'E' ||
            exp_sign) {
          ++j;
        } else {
          break;
        }
      }
      out.push_back({Tok::kNumber, line.substr(i, j - i), col});
      i = j;
      continue;
    }
    Tok kind;
    std::size_t len = 1;
    switch (c) {
      case '!': kind = Tok::kBang; break;
      case '&': kind = Tok::kAnd; break;
      case '|': kind = Tok::kOr; break;
      case '(': kind = Tok::kLParen; break;
      case ')': kind = Tok::kRParen; break;
      case ',': kind = Tok::kComma; break;
      case '@': kind = Tok::kAt; break;
      case '=':
        if (i + 1 < line.size() && line[i + 1] == '>') {
          kind = Tok::kArrow;
          len = 2;
          break;
        }
        [[fallthrough]];
      default: {
        std::string shown = (static_cast<unsigned char>(c) < 0x20 ||
                             static_cast<unsigned char>(c) >= 0x7f)
                                ? "byte 0x" + [&] {
                                    char b[8];
                                    std::snprintf(b, sizeof(b), "%02x",
                                                  static_cast<unsigned char>(c));
                                    return std::string(b);
                                  }()
                                : "'" + std::string(1, c) + "'";
        throw RuleError(RuleErrorKind::kSyntax, "unexpected character " + shown,
                        line_no, col);
      }
    }
    out.push_back({kind, line.substr(i, len), col});
    i += len;
  }
  out.push_back({Tok::kEnd, {}, line.size() + 1});
  return out;
}

class LineParser {
 public:
  LineParser(std::string_view line, std::size_t line_no, LabelVocabulary& vocab,
             bool vocab_fixed)
      : line_(line),
        line_no_(line_no),
        tokens_(tokenize(line, line_no)),
        vocab_(vocab),
        vocab_fixed_(vocab_fixed) {}

  // Appends one or more rules (MUTEX expands) to `out`.
  void parse(std::vector<Rule>& out) {
    if (peek().kind == Tok::kIdent && peek().text == kMutexKeyword &&
        peek(1).kind == Tok::kLParen) {
      parse_mutex(out);
      return;
    }
    if (peek().kind == Tok::kArrow) {
      throw RuleError(RuleErrorKind::kEmptyAntecedent,
                      "rule must start with at least one literal", line_no_,
                      peek().column);
    }
    Rule rule;
    rule.antecedent = parse_literals(Tok::kAnd);
    expect(Tok::kArrow, "expected '=>'");
    if (peek().kind == Tok::kIdent && peek().text == kFalseKeyword) {
      advance();
    } else {
      rule.consequent = parse_literals(Tok::kOr);
    }
    rule.weight = parse_weight();
    expect(Tok::kEnd, "unexpected trailing input");
    rule.line = line_no_;
    rule.text = std::string(line_);
    out.push_back(std::move(rule));
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }
  const Token& advance() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] void syntax_error(const Token& at, const std::string& what) const {
    throw RuleError(RuleErrorKind::kSyntax,
                    what + ", found " + tok_name(at.kind) +
                        (at.text.empty() ? "" : " '" + std::string(at.text) + "'"),
                    line_no_, at.column);
  }

  void expect(Tok kind, const std::string& what) {
    if (peek().kind != kind) syntax_error(peek(), what);
    advance();
  }

  std::size_t resolve(const Token& tok) {
    if (tok.text == kMutexKeyword || tok.text == kFalseKeyword) {
      syntax_error(tok, "keyword cannot be used as a label");
    }
    if (vocab_fixed_) {
      if (auto idx = vocab_.find(tok.text)) return *idx;
      throw RuleError(RuleErrorKind::kUnknownIdentifier,
                      "label '" + std::string(tok.text) +
                          "' is not in the vocabulary",
                      line_no_, tok.column);
    }
    return vocab_.intern(tok.text);
  }

  std::vector<Literal> parse_literals(Tok separator) {
    std::vector<Literal> lits;
    std::vector<std::size_t> columns;
    while (true) {
      Literal lit;
      const std::size_t col = peek().column;
      if (peek().kind == Tok::kBang) {
        advance();
        lit.negated = true;
      }
      if (peek().kind != Tok::kIdent) {
        syntax_error(peek(), lits.empty() ? "expected literal"
                                          : std::string("expected literal after ") +
                                                tok_name(separator));
      }
      lit.label = resolve(advance());
      for (std::size_t k = 0; k < lits.size(); ++k) {
        if (lits[k].label == lit.label) {
          throw RuleError(RuleErrorKind::kDuplicateLiteral,
                          "label '" + vocab_.name(lit.label) +
                              "' appears twice on the same side",
                          line_no_, col);
        }
      }
      lits.push_back(lit);
      columns.push_back(col);
      if (peek().kind != separator) break;
      advance();
    }
    return lits;
  }

  double parse_weight() {
    if (peek().kind != Tok::kAt) return 1.0;
    advance();
    const Token& tok = peek();
    if (tok.kind != Tok::kNumber) syntax_error(tok, "expected weight after '@'");
    advance();
    double w = 0.0;
    std::string_view text = tok.text;
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), w);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      syntax_error(tok, "malformed weight");
    }
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw RuleError(RuleErrorKind::kNonpositiveWeight,
                      "weight '" + std::string(tok.text) + "' must be positive",
                      line_no_, tok.column);
    }
    return w;
  }

  void parse_mutex(std::vector<Rule>& out) {
    advance();  // MUTEX
    advance();  // (
    std::vector<std::size_t> labels;
    while (true) {
      const Token& tok = peek();
      if (tok.kind != Tok::kIdent) syntax_error(tok, "expected label in MUTEX");
      advance();
      const std::size_t label = resolve(tok);
      if (std::find(labels.begin(), labels.end(), label) != labels.end()) {
        throw RuleError(RuleErrorKind::kDuplicateLiteral,
                        "label '" + std::string(tok.text) +
                            "' listed twice in MUTEX",
                        line_no_, tok.column);
      }
      labels.push_back(label);
      if (peek().kind == Tok::kComma) {
        advance();
        continue;
      }
      break;
    }
    expect(Tok::kRParen, "expected ',' or ')' in MUTEX");
    if (labels.size() < 2) {
      throw RuleError(RuleErrorKind::kSyntax, "MUTEX needs at least two labels",
                      line_no_, tokens_[0].column);
    }
    const double weight = parse_weight();
    expect(Tok::kEnd, "unexpected trailing input");
    for (std::size_t i = 0; i < labels.size(); ++i) {
      for (std::size_t j = i + 1; j < labels.size(); ++j) {
        Rule rule;
        rule.antecedent = {Literal{labels[i], false}};
        rule.consequent = {Literal{labels[j], true}};
        rule.weight = weight;
        rule.line = line_no_;
        rule.text = std::string(line_);
        out.push_back(std::move(rule));
      }
    }
  }

  std::string_view line_;
  std::size_t line_no_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  LabelVocabulary& vocab_;
  bool vocab_fixed_;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

RuleSet parse_rules(std::string_view text,
                    const std::optional<LabelVocabulary>& vocab,
                    std::vector<std::string>* warnings) {
  RuleSet rs;
  if (vocab) rs.vocabulary = *vocab;
  const bool fixed = vocab.has_value();

  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    // Columns are reported against the untrimmed line, so only check for
    // blank here and hand the full line to the parser.
    if (!trim(line).empty()) {
      std::vector<Rule> parsed;
      LineParser(line, line_no, rs.vocabulary, fixed).parse(parsed);
      for (Rule& r : parsed) {
        r.text = std::string(trim(r.text));
        if (warnings) {
          for (std::size_t k = 0; k < rs.rules.size(); ++k) {
            Rule a = canonicalize(rs.rules[k]);
            Rule b = canonicalize(r);
            if (a.antecedent == b.antecedent && a.consequent == b.consequent) {
              warnings->push_back("line " + std::to_string(line_no) +
                                  ": duplicate of rule on line " +
                                  std::to_string(rs.rules[k].line) + " (" +
                                  format_rule(r, rs.vocabulary) + ")");
              break;
            }
          }
        }
        rs.rules.push_back(std::move(r));
      }
    }
    if (end == text.size()) break;
    start = end + 1;
  }
  return rs;
}

RuleSet load_rules(const std::string& path,
                   const std::optional<LabelVocabulary>& vocab,
                   std::vector<std::string>* warnings) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open rule file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_rules(buf.str(), vocab, warnings);
}

RuleSet reindex(const RuleSet& rs, const LabelVocabulary& target) {
  RuleSet out;
  out.vocabulary = target;
  out.rules.reserve(rs.rules.size());
  auto map = [&](const Literal& lit, const Rule& r) {
    const std::string& name = rs.vocabulary.name(lit.label);
    auto idx = target.find(name);
    if (!idx) {
      throw RuleError(RuleErrorKind::kUnknownIdentifier,
                      "label '" + name + "' is not among the dataset labels",
                      r.line);
    }
    return Literal{*idx, lit.negated};
  };
  for (const Rule& r : rs.rules) {
    Rule m = r;
    for (Literal& lit : m.antecedent) lit = map(lit, r);
    for (Literal& lit : m.consequent) lit = map(lit, r);
    out.rules.push_back(std::move(m));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Crisp evaluation

namespace {

bool binary_value(double v) {
  if (v == 1.0) return true;
  if (v == 0.0) return false;
  throw std::invalid_argument("label vector entries must be 0 or 1");
}

}  // namespace

bool literal_holds(const Literal& lit, std::span<const double> y) {
  if (lit.label >= y.size()) {
    throw RuleError(RuleErrorKind::kLengthMismatch,
                    "label index " + std::to_string(lit.label) +
                        " outside label vector of length " +
                        std::to_string(y.size()));
  }
  return binary_value(y[lit.label]) != lit.negated;
}

bool hard_satisfied(const Rule& rule, std::span<const double> y) {
  bool antecedent_holds = true;
  for (const Literal& lit : rule.antecedent) {
    if (!literal_holds(lit, y)) antecedent_holds = false;
  }
  if (!antecedent_holds) return true;
  for (const Literal& lit : rule.consequent) {
    if (literal_holds(lit, y)) return true;
  }
  return false;
}

std::vector<std::size_t> violated_rules(const RuleSet& rs,
                                        std::span<const double> y) {
  if (y.size() != rs.num_labels()) {
    throw RuleError(RuleErrorKind::kLengthMismatch,
                    "label vector has length " + std::to_string(y.size()) +
                        ", vocabulary has " + std::to_string(rs.num_labels()));
  }
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < rs.rules.size(); ++r) {
    if (!hard_satisfied(rs.rules[r], y)) out.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Formatting

std::string format_rule(const Rule& rule, const LabelVocabulary& vocab) {
  const Rule c = canonicalize(rule);
  auto side = [&](const std::vector<Literal>& lits, const char* sep) {
    std::string s;
    for (std::size_t k = 0; k < lits.size(); ++k) {
      if (k > 0) s += sep;
      if (lits[k].negated) s += '!';
      s += vocab.name(lits[k].label);
    }
    return s;
  };
  std::string out = side(c.antecedent, " & ");
  out += " => ";
  out += c.consequent.empty() ? std::string(kFalseKeyword)
                              : side(c.consequent, " | ");
  if (c.weight != 1.0) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), c.weight);
    out += " @ ";
    out.append(buf, ptr);
  }
  return out;
}

std::vector<std::size_t> rule_labels(const Rule& rule) {
  std::vector<std::size_t> labels;
  for (const Literal& l : rule.antecedent) labels.push_back(l.label);
  for (const Literal& l : rule.consequent) labels.push_back(l.label);
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  return labels;
}

}  // namespace dost
