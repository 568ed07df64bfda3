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

#ifndef DOST_DATA_H_
#define DOST_DATA_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dost/json_writer.h"
#include "dost/matrix.h"
#include "dost/rules.h"

namespace dost {

// Malformed or inconsistent dataset content. `line` is 1-based, 0 if unknown.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& message, std::size_t line = 0)
      : std::runtime_error(line == 0 ? message
                                     : "line " + std::to_string(line) + ": " +
                                           message),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct NoiseFlip {
  std::size_t sample = 0;
  std::size_t label = 0;
  friend bool operator==(const NoiseFlip&, const NoiseFlip&) = default;
};

// Features, binary labels and, for noise experiments, the pre-noise labels.
// clean_y and flips are present together; flips lists, in row-major order,
// exactly the positions where y and clean_y differ.
struct Dataset {
  Matrix x;  // N x D
  Matrix y;  // N x L, entries 0/1
  LabelVocabulary names;
  std::optional<Matrix> clean_y;
  std::optional<std::vector<NoiseFlip>> flips;

  std::size_t num_samples() const { return x.rows(); }
  std::size_t num_features() const { return x.cols(); }
  std::size_t num_labels() const { return names.size(); }

  // Labels metrics are computed against: clean_y when recorded, else y.
  const Matrix& eval_labels() const { return clean_y ? *clean_y : y; }

  // Throws DataError on any broken invariant.
  void validate() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

// Positions where `noisy` differs from `clean`, row-major.
std::vector<NoiseFlip> diff_positions(const Matrix& noisy, const Matrix& clean);

// JSON Lines: header {"labels":[...]} then one {"x":[...],"y":[...]
// [,"y_clean":[...]]} per sample.
Dataset load_dataset(const std::string& path);
Dataset parse_dataset(const std::string& text);
void save_dataset(const Dataset& ds, const std::string& path);
std::string dataset_to_text(const Dataset& ds);

inline constexpr double kClusterSigma = 0.3;
inline constexpr std::size_t kRejectionBudgetPerPattern = 10000;
inline constexpr std::size_t kMaxSynthLabels = 20;

// Rule-consistent clustered data: k distinct consistent label patterns, each
// with a centroid in [-1, 1]^D; samples are centroid + N(0, 0.3^2) noise.
Dataset synthesize(std::uint64_t seed, std::size_t num_samples,
                   std::size_t num_features, const RuleSet& rs,
                   std::size_t k_patterns);

enum class NoiseMode { kUniform, kViolating };

const char* to_string(NoiseMode mode);
NoiseMode parse_noise_mode(const std::string& text);

// Flips labels and records clean_y / flips. Uniform flips each bit with
// probability rho. Violating picks, for each sample with probability rho, one
// single-bit flip that introduces a rule violation not present before; the
// sample is left alone when no such flip exists. `rs` is only consulted in
// violating mode and is matched to the dataset by label name.
Dataset inject_noise(const Dataset& ds, double rho, std::uint64_t seed,
                     NoiseMode mode, const RuleSet& rs);

struct RuleAudit {
  std::size_t rule = 0;
  std::string text;
  std::size_t count = 0;
};

struct SampleAudit {
  std::size_t sample = 0;
  std::vector<std::size_t> rules;
};

struct AuditReport {
  std::vector<RuleAudit> per_rule;
  std::vector<SampleAudit> samples;  // violating samples only, ascending
  std::size_t num_samples = 0;
  std::size_t violating_samples = 0;
  double fraction = 0.0;
};

// Rules are matched to dataset labels by name.
AuditReport audit(const Dataset& ds, const RuleSet& rs);

inline constexpr std::size_t kAuditTextSampleCap = 100;

Json audit_json(const AuditReport& report);
std::string audit_text(const AuditReport& report);

}  // namespace dost

#endif  // DOST_DATA_H_
