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

#include "dost/training.h"

#include <numeric>
#include <stdexcept>

#include "dost/random.h"
#include "dost/relax.h"

namespace dost {

std::vector<std::size_t> epoch_order(std::uint64_t seed, int epoch,
                                     std::size_t n) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(seed, kStreamShuffle, static_cast<std::uint64_t>(epoch)));
  rng.shuffle(order);
  return order;
}

namespace {

Matrix gather_rows(const Matrix& m, std::span<const std::size_t> idx) {
  Matrix out(idx.size(), m.cols());
  for (std::size_t r = 0; r < idx.size(); ++r) {
    auto src = m.row(idx[r]);
    std::copy(src.begin(), src.end(), out.row(r).begin());
  }
  return out;
}

bool any_supervised(const Matrix& mask) {
  for (double v : mask.values()) {
    if (v != 0.0) return true;
  }
  return false;
}

// Domain-only step for a batch whose every label is masked out.
ModelParams domain_only_grads(const ModelParams& params, const Matrix& x,
                              const RuleSet& rs, double lambda) {
  const Forward fwd = forward(params, x);
  Matrix g = domain_loss_grad(rs, fwd.probs);
  for (double& v : g.values()) v *= lambda;
  return backward(params, x, fwd, g);
}

}  // namespace

TrainResult train(const Dataset& data, const RuleSet& rs,
                  const TrainConfig& cfg) {
  cfg.validate();
  if (data.num_samples() == 0) {
    throw std::invalid_argument("cannot train on an empty dataset");
  }
  const RuleSet rules = reindex(rs, data.names);
  const bool use_domain = cfg.lambda != 0.0 && !rules.rules.empty();

  TrainResult result;
  const Matrix flags = flag_inconsistent(rules, data.y);
  result.state = init_supervision(data.y, flags, cfg.correction_mode);
  SupervisionState& state = result.state;

  ModelParams params =
      init_params(cfg.seed, data.num_features(),
                  static_cast<std::size_t>(cfg.hidden_units), data.num_labels());

  const std::size_t n = data.num_samples();
  const std::size_t batch = static_cast<std::size_t>(cfg.batch_size);
  std::size_t corrected_total = 0;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const std::vector<std::size_t> order = epoch_order(cfg.seed, epoch, n);
    for (std::size_t start = 0; start < n; start += batch) {
      const std::span<const std::size_t> idx(
          order.data() + start, std::min(batch, n - start));
      const Matrix xb = gather_rows(data.x, idx);
      const Matrix mb = gather_rows(state.mask, idx);
      ModelParams grads;
      if (any_supervised(mb)) {
        const Matrix tb = gather_rows(state.targets, idx);
        grads = total_loss_and_grads(params, xb, tb, mb, rules, cfg.lambda).grads;
      } else if (use_domain) {
        grads = domain_only_grads(params, xb, rules, cfg.lambda);
      } else {
        continue;
      }
      params = sgd_step(params, grads, cfg.learning_rate);
    }

    const Forward full = forward(params, data.x);
    EpochRecord rec;
    rec.epoch = epoch;
    rec.bce = any_supervised(state.mask)
                  ? bce_masked(full.probs, state.targets, state.mask)
                  : 0.0;
    rec.domain_loss = domain_loss(rules, full.probs);
    rec.total = rec.bce + cfg.lambda * rec.domain_loss;

    if (cfg.correction_mode == CorrectionMode::kRelabel &&
        epoch >= cfg.warmup_epochs) {
      corrected_total += correct_labels(state, full.probs, cfg.tau);
    }
    rec.masked = state.count(LabelOrigin::kMasked);
    rec.corrected_cumulative = corrected_total;
    result.history.push_back(rec);
  }
  result.params = std::move(params);
  return result;
}

Matrix binarize(const Matrix& probs, double threshold) {
  Matrix out(probs.rows(), probs.cols());
  for (std::size_t k = 0; k < probs.size(); ++k) {
    out.values()[k] = probs.values()[k] >= threshold ? 1.0 : 0.0;
  }
  return out;
}

MetricsReport evaluate(const ModelParams& params, const Dataset& data,
                       const RuleSet& rs, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw std::invalid_argument("threshold must lie in (0, 1)");
  }
  if (params.num_labels() != data.num_labels()) {
    throw std::invalid_argument("model predicts " +
                                std::to_string(params.num_labels()) +
                                " labels, dataset has " +
                                std::to_string(data.num_labels()));
  }
  const RuleSet rules = reindex(rs, data.names);
  const Matrix predicted = binarize(forward(params, data.x).probs, threshold);
  const Matrix& reference = data.eval_labels();

  MetricsReport report;
  F1Scores f1 = f1_scores(predicted, reference, data.names.names());
  report.per_label = std::move(f1.per_label);
  report.macro_f1 = f1.macro_f1;
  report.micro_f1 = f1.micro_f1;
  report.exact_match = exact_match(predicted, reference);
  report.cvr = cvr(predicted, rules);
  report.eval_target = data.clean_y ? EvalTarget::kClean : EvalTarget::kGiven;
  return report;
}

Json to_json(const EpochRecord& record) {
  Json j;
  j["epoch"] = record.epoch;
  j["bce"] = record.bce;
  j["domain_loss"] = record.domain_loss;
  j["total"] = record.total;
  j["masked"] = record.masked;
  j["corrected_cumulative"] = record.corrected_cumulative;
  return j;
}

std::string history_jsonl(const TrainHistory& history) {
  std::string out;
  for (const EpochRecord& r : history) {
    out += to_json_text(to_json(r));
    out += '\n';
  }
  return out;
}

}  // namespace dost
