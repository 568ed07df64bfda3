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

#include "dost/metrics.h"

#include <stdexcept>

namespace dost {
namespace {

double safe_ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

double f1_from_counts(double tp, double fp, double fn) {
  const double precision = safe_ratio(tp, tp + fp);
  const double recall = safe_ratio(tp, tp + fn);
  return safe_ratio(2.0 * precision * recall, precision + recall);
}

void check_same_shape(const Matrix& a, const Matrix& b) {
  if (!a.same_shape(b)) {
    throw std::invalid_argument("metrics: shape mismatch (" + shape_string(a) +
                                " vs " + shape_string(b) + ")");
  }
}

}  // namespace

F1Scores f1_scores(const Matrix& predicted, const Matrix& reference,
                   const std::vector<std::string>& names) {
  check_same_shape(predicted, reference);
  const std::size_t l = predicted.cols();
  if (!names.empty() && names.size() != l) {
    throw std::invalid_argument("metrics: label names do not match columns");
  }
  F1Scores out;
  double tp_all = 0.0, fp_all = 0.0, fn_all = 0.0;
  double f1_sum = 0.0;
  for (std::size_t j = 0; j < l; ++j) {
    double tp = 0.0, fp = 0.0, fn = 0.0;
    std::size_t support = 0;
    for (std::size_t i = 0; i < predicted.rows(); ++i) {
      const bool p = predicted(i, j) != 0.0;
      const bool r = reference(i, j) != 0.0;
      if (r) ++support;
      if (p && r) tp += 1.0;
      if (p && !r) fp += 1.0;
      if (!p && r) fn += 1.0;
    }
    LabelScore s;
    s.label = names.empty() ? std::to_string(j) : names[j];
    s.precision = safe_ratio(tp, tp + fp);
    s.recall = safe_ratio(tp, tp + fn);
    s.f1 = f1_from_counts(tp, fp, fn);
    s.support = support;
    f1_sum += s.f1;
    out.per_label.push_back(std::move(s));
    tp_all += tp;
    fp_all += fp;
    fn_all += fn;
  }
  out.macro_f1 = l == 0 ? 0.0 : f1_sum / static_cast<double>(l);
  out.micro_f1 = f1_from_counts(tp_all, fp_all, fn_all);
  return out;
}

double exact_match(const Matrix& predicted, const Matrix& reference) {
  check_same_shape(predicted, reference);
  if (predicted.rows() == 0) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predicted.rows(); ++i) {
    bool all = true;
    for (std::size_t j = 0; j < predicted.cols(); ++j) {
      if ((predicted(i, j) != 0.0) != (reference(i, j) != 0.0)) {
        all = false;
        break;
      }
    }
    if (all) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(predicted.rows());
}

double cvr(const Matrix& predicted, const RuleSet& rs) {
  if (rs.rules.empty() || predicted.rows() == 0) return 0.0;
  std::size_t violations = 0;
  for (std::size_t i = 0; i < predicted.rows(); ++i) {
    violations += violated_rules(rs, predicted.row(i)).size();
  }
  return static_cast<double>(violations) /
         (static_cast<double>(predicted.rows()) *
          static_cast<double>(rs.rules.size()));
}

CorrectionRecord correction_report(const SupervisionState& state,
                                   const Dataset& ds) {
  if (!ds.flips || !ds.clean_y) {
    throw DataError("correction report needs a dataset with a flip record");
  }
  if (state.rows() != ds.num_samples() || state.cols() != ds.num_labels()) {
    throw std::invalid_argument("correction report: state shape mismatch");
  }
  CorrectionRecord rec;
  rec.n_flipped = ds.flips->size();
  for (const NoiseFlip& f : *ds.flips) {
    switch (state.origin_at(f.sample, f.label)) {
      case LabelOrigin::kSelfCorrected:
        if (state.targets(f.sample, f.label) == (*ds.clean_y)(f.sample, f.label)) {
          ++rec.n_corrected_right;
        } else {
          ++rec.n_corrected_wrong;
        }
        break;
      case LabelOrigin::kMasked:
        ++rec.n_still_masked;
        break;
      case LabelOrigin::kGiven:
        ++rec.n_undetected;
        break;
    }
  }
  if (rec.n_flipped > 0) {
    rec.recovery_rate = static_cast<double>(rec.n_corrected_right) /
                        static_cast<double>(rec.n_flipped);
  }
  return rec;
}

Json to_json(const CorrectionRecord& record) {
  Json j;
  j["n_flipped"] = record.n_flipped;
  j["n_corrected_right"] = record.n_corrected_right;
  j["n_corrected_wrong"] = record.n_corrected_wrong;
  j["n_still_masked"] = record.n_still_masked;
  j["n_undetected"] = record.n_undetected;
  j["recovery_rate"] = record.recovery_rate ? Json(*record.recovery_rate)
                                            : Json(nullptr);
  return j;
}

Json to_json(const MetricsReport& report) {
  Json j;
  Json per_label = Json::array();
  for (const LabelScore& s : report.per_label) {
    per_label.push_back({{"label", s.label},
                         {"precision", s.precision},
                         {"recall", s.recall},
                         {"f1", s.f1},
                         {"support", s.support}});
  }
  j["per_label"] = std::move(per_label);
  j["macro_f1"] = report.macro_f1;
  j["micro_f1"] = report.micro_f1;
  j["exact_match"] = report.exact_match;
  j["cvr"] = report.cvr;
  j["correction"] =
      report.correction ? to_json(*report.correction) : Json(nullptr);
  j["eval_target"] = report.eval_target == EvalTarget::kClean ? "clean" : "given";
  return j;
}

}  // namespace dost
