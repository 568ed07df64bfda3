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

#include "dost/data.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "dost/random.h"

namespace dost {

void Dataset::validate() const {
  const std::size_t n = x.rows();
  if (y.rows() != n) {
    throw DataError("label matrix has " + std::to_string(y.rows()) +
                    " rows, feature matrix has " + std::to_string(n));
  }
  if (n > 0 && y.cols() != names.size()) {
    throw DataError("label matrix has " + std::to_string(y.cols()) +
                    " columns, vocabulary has " + std::to_string(names.size()));
  }
  for (double v : y.values()) {
    if (v != 0.0 && v != 1.0) throw DataError("labels must be 0 or 1");
  }
  if (clean_y.has_value() != flips.has_value()) {
    throw DataError("clean labels and flip records must be present together");
  }
  if (clean_y) {
    if (!clean_y->same_shape(y)) throw DataError("clean label shape mismatch");
    for (double v : clean_y->values()) {
      if (v != 0.0 && v != 1.0) throw DataError("clean labels must be 0 or 1");
    }
    if (*flips != diff_positions(y, *clean_y)) {
      throw DataError("flip records do not match label differences");
    }
  }
}

std::vector<NoiseFlip> diff_positions(const Matrix& noisy, const Matrix& clean) {
  std::vector<NoiseFlip> out;
  for (std::size_t i = 0; i < noisy.rows(); ++i) {
    for (std::size_t j = 0; j < noisy.cols(); ++j) {
      if (noisy(i, j) != clean(i, j)) out.push_back({i, j});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSONL I/O

namespace {

std::vector<double> read_numbers(const Json& arr, const char* key,
                                 std::size_t line) {
  if (!arr.is_array()) {
    throw DataError(std::string("\"") + key + "\" must be an array", line);
  }
  std::vector<double> out;
  out.reserve(arr.size());
  for (const Json& v : arr) {
    if (!v.is_number()) {
      throw DataError(std::string("\"") + key + "\" must contain numbers", line);
    }
    out.push_back(v.get<double>());
  }
  return out;
}

std::vector<double> read_labels(const Json& arr, const char* key,
                                std::size_t line) {
  std::vector<double> out = read_numbers(arr, key, line);
  for (double v : out) {
    if (v != 0.0 && v != 1.0) {
      throw DataError(std::string("\"") + key + "\" entries must be 0 or 1",
                      line);
    }
  }
  return out;
}

Json label_array(std::span<const double> row) {
  Json arr = Json::array();
  for (double v : row) arr.push_back(static_cast<int>(v));
  return arr;
}

}  // namespace

Dataset parse_dataset(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;

  Dataset ds;
  bool have_header = false;
  std::optional<bool> has_clean;
  std::size_t dim = 0;
  std::vector<double> xs;
  std::vector<double> ys;
  std::vector<double> cs;
  std::size_t rows = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    Json obj;
    try {
      obj = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw DataError(std::string("malformed JSON: ") + e.what(), line_no);
    }
    if (!obj.is_object()) throw DataError("expected a JSON object", line_no);

    if (!have_header) {
      if (!obj.contains("labels") || obj.size() != 1) {
        throw DataError("missing label header", line_no);
      }
      std::vector<std::string> names;
      try {
        names = obj.at("labels").get<std::vector<std::string>>();
      } catch (const Json::exception&) {
        throw DataError("\"labels\" must be an array of strings", line_no);
      }
      try {
        ds.names = LabelVocabulary(std::move(names));
      } catch (const RuleError& e) {
        throw DataError(e.what(), line_no);
      }
      have_header = true;
      continue;
    }

    for (const auto& [key, value] : obj.items()) {
      if (key != "x" && key != "y" && key != "y_clean") {
        throw DataError("unknown key \"" + key + "\"", line_no);
      }
    }
    if (!obj.contains("x") || !obj.contains("y")) {
      throw DataError("sample needs \"x\" and \"y\"", line_no);
    }
    std::vector<double> x = read_numbers(obj["x"], "x", line_no);
    std::vector<double> y = read_labels(obj["y"], "y", line_no);
    if (rows == 0) {
      dim = x.size();
    } else if (x.size() != dim) {
      throw DataError("x has " + std::to_string(x.size()) +
                          " features, expected " + std::to_string(dim),
                      line_no);
    }
    if (y.size() != ds.names.size()) {
      throw DataError("y has " + std::to_string(y.size()) +
                          " labels, header declares " +
                          std::to_string(ds.names.size()),
                      line_no);
    }
    const bool row_clean = obj.contains("y_clean");
    if (has_clean && *has_clean != row_clean) {
      throw DataError("\"y_clean\" must be present on all samples or none",
                      line_no);
    }
    has_clean = row_clean;
    if (row_clean) {
      std::vector<double> c = read_labels(obj["y_clean"], "y_clean", line_no);
      if (c.size() != y.size()) {
        throw DataError("y_clean length differs from y", line_no);
      }
      cs.insert(cs.end(), c.begin(), c.end());
    }
    xs.insert(xs.end(), x.begin(), x.end());
    ys.insert(ys.end(), y.begin(), y.end());
    ++rows;
  }
  if (!have_header) throw DataError("missing label header", 1);

  ds.x = Matrix(rows, dim, std::move(xs));
  ds.y = Matrix(rows, ds.names.size(), std::move(ys));
  if (has_clean.value_or(false)) {
    ds.clean_y = Matrix(rows, ds.names.size(), std::move(cs));
    ds.flips = diff_positions(ds.y, *ds.clean_y);
  }
  return ds;
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open dataset '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_dataset(buf.str());
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

std::string dataset_to_text(const Dataset& ds) {
  ds.validate();
  std::string out;
  Json header;
  header["labels"] = ds.names.names();
  out += to_json_text(header);
  out += '\n';
  for (std::size_t i = 0; i < ds.num_samples(); ++i) {
    Json row;
    row["x"] = std::vector<double>(ds.x.row(i).begin(), ds.x.row(i).end());
    row["y"] = label_array(ds.y.row(i));
    if (ds.clean_y) row["y_clean"] = label_array(ds.clean_y->row(i));
    out += to_json_text(row);
    out += '\n';
  }
  return out;
}

void save_dataset(const Dataset& ds, const std::string& path) {
  const std::string text = dataset_to_text(ds);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write dataset '" + path + "'");
  out << text;
  if (!out) throw std::runtime_error("failed writing dataset '" + path + "'");
}

// ---------------------------------------------------------------------------
// Synthesis

Dataset synthesize(std::uint64_t seed, std::size_t num_samples,
                   std::size_t num_features, const RuleSet& rs,
                   std::size_t k_patterns) {
  const std::size_t l = rs.num_labels();
  if (l == 0) throw DataError("synthesize: rule set has an empty vocabulary");
  if (l > kMaxSynthLabels) {
    throw DataError("synthesize: at most " + std::to_string(kMaxSynthLabels) +
                    " labels supported, got " + std::to_string(l));
  }
  if (k_patterns < 2) throw DataError("synthesize: k_patterns must be >= 2");
  if (num_features == 0) throw DataError("synthesize: dims must be >= 1");

  Rng rng(derive_seed(seed, kStreamSynthPatterns, 0));
  std::vector<std::vector<double>> patterns;
  std::set<std::uint64_t> seen;
  const std::size_t budget = kRejectionBudgetPerPattern * k_patterns;
  std::size_t rejections = 0;
  while (patterns.size() < k_patterns) {
    const std::uint64_t bits = rng.next_u64() & ((std::uint64_t{1} << l) - 1);
    std::vector<double> y(l);
    for (std::size_t j = 0; j < l; ++j) y[j] = static_cast<double>((bits >> j) & 1);
    if (seen.count(bits) || !violated_rules(rs, y).empty()) {
      if (++rejections > budget) {
        throw DataError("synthesize: could not find " +
                        std::to_string(k_patterns) +
                        " distinct rule-consistent label patterns within " +
                        std::to_string(budget) + " rejections (found " +
                        std::to_string(patterns.size()) + ")");
      }
      continue;
    }
    seen.insert(bits);
    patterns.push_back(std::move(y));
  }
  Matrix centroids(k_patterns, num_features);
  for (double& c : centroids.values()) c = rng.uniform(-1.0, 1.0);

  Dataset ds;
  ds.names = rs.vocabulary;
  ds.x = Matrix(num_samples, num_features);
  ds.y = Matrix(num_samples, l);
  for (std::size_t i = 0; i < num_samples; ++i) {
    Rng srng(derive_seed(seed, kStreamSynthSample, i));
    const std::size_t k = static_cast<std::size_t>(srng.below(k_patterns));
    auto xi = ds.x.row(i);
    for (std::size_t c = 0; c < num_features; ++c) {
      xi[c] = centroids(k, c) + srng.normal(0.0, kClusterSigma);
    }
    std::copy(patterns[k].begin(), patterns[k].end(), ds.y.row(i).begin());
  }
  ds.clean_y = ds.y;
  ds.flips = std::vector<NoiseFlip>{};
  return ds;
}

// ---------------------------------------------------------------------------
// Noise

const char* to_string(NoiseMode mode) {
  return mode == NoiseMode::kUniform ? "uniform" : "violating";
}

NoiseMode parse_noise_mode(const std::string& text) {
  if (text == "uniform") return NoiseMode::kUniform;
  if (text == "violating") return NoiseMode::kViolating;
  throw std::invalid_argument("unknown noise mode '" + text +
                              "' (expected uniform or violating)");
}

Dataset inject_noise(const Dataset& ds, double rho, std::uint64_t seed,
                     NoiseMode mode, const RuleSet& rs) {
  if (!(rho >= 0.0 && rho <= 1.0)) {
    throw std::invalid_argument("rho must lie in [0, 1]");
  }
  if (ds.flips && !ds.flips->empty()) {
    throw DataError("dataset already carries injected noise");
  }
  Dataset out = ds;
  out.clean_y = ds.clean_y ? *ds.clean_y : ds.y;
  const std::size_t l = ds.num_labels();

  RuleSet rules;
  if (mode == NoiseMode::kViolating) rules = reindex(rs, ds.names);

  for (std::size_t i = 0; i < ds.num_samples(); ++i) {
    Rng rng(derive_seed(seed, kStreamNoise, i));
    auto yi = out.y.row(i);
    if (mode == NoiseMode::kUniform) {
      for (std::size_t j = 0; j < l; ++j) {
        if (rng.bernoulli(rho)) yi[j] = 1.0 - yi[j];
      }
      continue;
    }
    if (!rng.bernoulli(rho)) continue;
    const std::vector<std::size_t> before = violated_rules(rules, yi);
    std::vector<std::size_t> candidates;
    std::vector<double> trial(yi.begin(), yi.end());
    for (std::size_t j = 0; j < l; ++j) {
      trial[j] = 1.0 - trial[j];
      for (std::size_t r : violated_rules(rules, trial)) {
        if (!std::binary_search(before.begin(), before.end(), r)) {
          candidates.push_back(j);
          break;
        }
      }
      trial[j] = 1.0 - trial[j];
    }
    if (candidates.empty()) continue;
    const std::size_t j = candidates[rng.below(candidates.size())];
    yi[j] = 1.0 - yi[j];
  }
  out.flips = diff_positions(out.y, *out.clean_y);
  return out;
}

// ---------------------------------------------------------------------------
// Audit

AuditReport audit(const Dataset& ds, const RuleSet& rs) {
  const RuleSet rules = reindex(rs, ds.names);
  AuditReport report;
  report.num_samples = ds.num_samples();
  for (std::size_t r = 0; r < rules.rules.size(); ++r) {
    report.per_rule.push_back({r, format_rule(rules.rules[r], rules.vocabulary), 0});
  }
  for (std::size_t i = 0; i < ds.num_samples(); ++i) {
    std::vector<std::size_t> v = violated_rules(rules, ds.y.row(i));
    if (v.empty()) continue;
    for (std::size_t r : v) ++report.per_rule[r].count;
    report.samples.push_back({i, std::move(v)});
  }
  report.violating_samples = report.samples.size();
  report.fraction = report.num_samples == 0
                        ? 0.0
                        : static_cast<double>(report.violating_samples) /
                              static_cast<double>(report.num_samples);
  return report;
}

Json audit_json(const AuditReport& report) {
  Json j;
  Json per_rule = Json::array();
  for (const RuleAudit& r : report.per_rule) {
    per_rule.push_back({{"rule", r.rule}, {"text", r.text}, {"count", r.count}});
  }
  j["per_rule"] = std::move(per_rule);
  Json samples = Json::array();
  for (const SampleAudit& s : report.samples) {
    samples.push_back({{"sample", s.sample}, {"rules", s.rules}});
  }
  j["samples"] = std::move(samples);
  j["num_samples"] = report.num_samples;
  j["violating_samples"] = report.violating_samples;
  j["fraction"] = report.fraction;
  return j;
}

std::string audit_text(const AuditReport& report) {
  std::ostringstream out;
  out << "samples: " << report.num_samples << "\n";
  out << "violating samples: " << report.violating_samples << "\n";
  char frac[32];
  std::snprintf(frac, sizeof(frac), "%.17g", report.fraction);
  out << "fraction: " << frac << "\n";
  out << "per rule:\n";
  for (const RuleAudit& r : report.per_rule) {
    out << "  [" << r.rule << "] " << r.text << ": " << r.count << "\n";
  }
  if (!report.samples.empty()) {
    out << "violating samples (sample: rules):\n";
    const std::size_t shown = std::min(report.samples.size(), kAuditTextSampleCap);
    for (std::size_t k = 0; k < shown; ++k) {
      out << "  " << report.samples[k].sample << ":";
      for (std::size_t r : report.samples[k].rules) out << ' ' << r;
      out << "\n";
    }
    if (shown < report.samples.size()) {
      out << "  ... " << report.samples.size() - shown << " more\n";
    }
  }
  return out.str();
}

}  // namespace dost
