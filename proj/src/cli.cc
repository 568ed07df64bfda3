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

#include "dost/cli.h"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "dost/data.h"
#include "dost/metrics.h"
#include "dost/rules.h"
#include "dost/training.h"

namespace dost::cli {
namespace {

// Missing or conflicting arguments discovered after CLI11 parsing.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

template <typename T>
T require(const std::optional<T>& value, const char* flag) {
  if (!value) throw UsageError(std::string("missing required option ") + flag);
  return *value;
}

RuleSet load_rules_for(const std::string& path, const Dataset& ds,
                       std::ostream& err) {
  std::vector<std::string> warnings;
  RuleSet rs;
  try {
    rs = load_rules(path, ds.names, &warnings);
  } catch (const RuleError& e) {
    throw RuleError(e.kind(), path + ": " + e.what());
  }
  for (const auto& w : warnings) err << path << ": warning: " << w << "\n";
  return rs;
}

struct SynthArgs {
  std::string rules, out;
  std::vector<std::string> labels;
  std::size_t n = 0, dims = 0, patterns = 0;
  std::uint64_t seed = 0;
};

struct NoiseArgs {
  std::string in, out, mode = "uniform";
  std::optional<std::string> rules;
  double rho = 0.0;
  std::uint64_t seed = 0;
};

struct AuditArgs {
  std::string rules, data;
  bool json = false;
};

struct TrainArgs {
  std::optional<std::string> config, rules, data, out_model, out_history,
      out_report, mode;
  std::optional<double> lambda, tau, lr, threshold;
  std::optional<int> epochs, warmup, batch, hidden;
  std::optional<std::uint64_t> seed;
};

struct EvalArgs {
  std::string rules, data, model;
  double threshold = 0.5;
  std::optional<std::string> out_report;
};

int do_synth(const SynthArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<std::string> warnings;
  std::optional<LabelVocabulary> vocab;
  if (!a.labels.empty()) vocab = LabelVocabulary(a.labels);
  const RuleSet rs = load_rules(a.rules, vocab, &warnings);
  for (const auto& w : warnings) err << a.rules << ": warning: " << w << "\n";
  const Dataset ds = synthesize(a.seed, a.n, a.dims, rs, a.patterns);
  save_dataset(ds, a.out);
  out << "wrote " << ds.num_samples() << " samples, " << ds.num_labels()
      << " labels to " << a.out << "\n";
  return kOk;
}

int do_noise(const NoiseArgs& a, std::ostream& out, std::ostream& err) {
  const NoiseMode mode = parse_noise_mode(a.mode);
  const Dataset ds = load_dataset(a.in);
  RuleSet rs;
  if (mode == NoiseMode::kViolating) {
    if (!a.rules) throw UsageError("--mode violating requires --rules");
    rs = load_rules_for(*a.rules, ds, err);
  }
  const Dataset noisy = inject_noise(ds, a.rho, a.seed, mode, rs);
  save_dataset(noisy, a.out);
  out << "flipped " << noisy.flips->size() << " labels, wrote " << a.out
      << "\n";
  return kOk;
}

int do_audit(const AuditArgs& a, std::ostream& out, std::ostream& err) {
  const Dataset ds = load_dataset(a.data);
  const RuleSet rs = load_rules_for(a.rules, ds, err);
  const AuditReport report = audit(ds, rs);
  if (a.json) {
    out << to_json_text(audit_json(report), 2) << "\n";
  } else {
    out << audit_text(report);
  }
  return kOk;
}

int do_train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg;
  if (a.config) cfg = load_experiment_config(*a.config);
  if (a.rules) cfg.rules = a.rules;
  if (a.data) cfg.data = a.data;
  if (a.out_model) cfg.out_model = a.out_model;
  if (a.out_history) cfg.out_history = a.out_history;
  if (a.out_report) cfg.out_report = a.out_report;
  if (a.lambda) cfg.train.lambda = *a.lambda;
  if (a.tau) cfg.train.tau = *a.tau;
  if (a.lr) cfg.train.learning_rate = *a.lr;
  if (a.epochs) cfg.train.epochs = *a.epochs;
  if (a.warmup) cfg.train.warmup_epochs = *a.warmup;
  if (a.batch) cfg.train.batch_size = *a.batch;
  if (a.hidden) cfg.train.hidden_units = *a.hidden;
  if (a.seed) cfg.train.seed = *a.seed;
  if (a.mode) cfg.train.correction_mode = parse_correction_mode(*a.mode);
  if (a.threshold) cfg.threshold = *a.threshold;

  const std::string rules_path = require(cfg.rules, "--rules");
  const std::string data_path = require(cfg.data, "--data");
  cfg.train.validate();

  const Dataset ds = load_dataset(data_path);
  const RuleSet rs = load_rules_for(rules_path, ds, err);
  const TrainResult result = train(ds, rs, cfg.train);

  MetricsReport report = evaluate(result.params, ds, rs, cfg.threshold);
  if (ds.flips) report.correction = correction_report(result.state, ds);

  if (cfg.out_model) {
    save_checkpoint(*cfg.out_model, result.params, cfg.train.seed,
                    to_json(cfg.train));
  }
  if (cfg.out_history) write_file(*cfg.out_history, history_jsonl(result.history));
  const std::string report_text = to_json_text(to_json(report), 2) + "\n";
  if (cfg.out_report) {
    write_file(*cfg.out_report, report_text);
  } else {
    out << report_text;
  }
  const EpochRecord& last = result.history.back();
  err << "trained " << cfg.train.epochs << " epochs: total loss " << last.total
      << ", macro-F1 " << report.macro_f1 << ", CVR " << report.cvr << "\n";
  return kOk;
}

int do_eval(const EvalArgs& a, std::ostream& out, std::ostream& err) {
  const Dataset ds = load_dataset(a.data);
  const RuleSet rs = load_rules_for(a.rules, ds, err);
  const ModelParams params = load_checkpoint(a.model);
  const MetricsReport report = evaluate(params, ds, rs, a.threshold);
  const std::string text = to_json_text(to_json(report), 2) + "\n";
  if (a.out_report) {
    write_file(*a.out_report, text);
  } else {
    out << text;
  }
  return kOk;
}

}  // namespace

ExperimentConfig parse_experiment_config(const Json& doc) {
  if (!doc.is_object()) {
    throw std::invalid_argument("experiment config must be a JSON object");
  }
  ExperimentConfig cfg;
  auto get = [](const Json& v, const std::string& key, auto& dst) {
    try {
      v.get_to(dst);
    } catch (const Json::exception&) {
      throw std::invalid_argument("config key \"" + key +
                                  "\" has the wrong type");
    }
  };
  for (const auto& [key, value] : doc.items()) {
    if (key == "learning_rate") get(value, key, cfg.train.learning_rate);
    else if (key == "epochs") get(value, key, cfg.train.epochs);
    else if (key == "batch_size") get(value, key, cfg.train.batch_size);
    else if (key == "lambda") get(value, key, cfg.train.lambda);
    else if (key == "warmup_epochs") get(value, key, cfg.train.warmup_epochs);
    else if (key == "tau") get(value, key, cfg.train.tau);
    else if (key == "hidden_units") get(value, key, cfg.train.hidden_units);
    else if (key == "seed") get(value, key, cfg.train.seed);
    else if (key == "threshold") get(value, key, cfg.threshold);
    else if (key == "correction_mode") {
      std::string mode;
      get(value, key, mode);
      cfg.train.correction_mode = parse_correction_mode(mode);
    } else if (key == "paths") {
      if (!value.is_object()) {
        throw std::invalid_argument("config key \"paths\" must be an object");
      }
      for (const auto& [pkey, pval] : value.items()) {
        std::string path;
        get(pval, "paths." + pkey, path);
        if (pkey == "rules") cfg.rules = path;
        else if (pkey == "data") cfg.data = path;
        else if (pkey == "out_model") cfg.out_model = path;
        else if (pkey == "out_history") cfg.out_history = path;
        else if (pkey == "out_report") cfg.out_report = path;
        else throw std::invalid_argument("unknown config key \"paths." + pkey + "\"");
      }
    } else {
      throw std::invalid_argument("unknown config key \"" + key + "\"");
    }
  }
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw std::invalid_argument("config '" + path + "' is not valid JSON: " +
                                e.what());
  }
  try {
    return parse_experiment_config(doc);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Domain-obedient self-supervised training for multi-label "
               "classification with noisy labels",
               "dost"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a rule-consistent synthetic dataset");
  synth_cmd->add_option("--rules", synth.rules, "Rule file")->required();
  synth_cmd->add_option("--out", synth.out, "Output dataset (JSONL)")->required();
  synth_cmd->add_option("--n", synth.n, "Number of samples")->required();
  synth_cmd->add_option("--dims", synth.dims, "Feature dimension")->required();
  synth_cmd->add_option("--patterns", synth.patterns, "Distinct label patterns")->required();
  synth_cmd->add_option("--seed", synth.seed, "Random seed")->required();
  synth_cmd->add_option("--labels", synth.labels,
                        "Label vocabulary, in order (default: labels named in the rules)")
      ->delimiter(',');

  NoiseArgs noise;
  auto* noise_cmd = app.add_subcommand("noise", "Inject label noise into a dataset");
  noise_cmd->add_option("--in", noise.in, "Input dataset")->required();
  noise_cmd->add_option("--out", noise.out, "Output dataset")->required();
  noise_cmd->add_option("--rho", noise.rho, "Noise rate in [0, 1]")->required();
  noise_cmd->add_option("--mode", noise.mode, "uniform | violating")
      ->check(CLI::IsMember({"uniform", "violating"}));
  noise_cmd->add_option("--seed", noise.seed, "Random seed")->required();
  noise_cmd->add_option("--rules", noise.rules, "Rule file (violating mode)");

  AuditArgs aud;
  auto* audit_cmd = app.add_subcommand("audit", "Count rule violations in dataset labels");
  audit_cmd->add_option("--rules", aud.rules, "Rule file")->required();
  audit_cmd->add_option("--data", aud.data, "Dataset")->required();
  audit_cmd->add_flag("--json", aud.json, "Emit the full JSON report");

  TrainArgs tr;
  auto* train_cmd = app.add_subcommand("train", "Train a classifier");
  train_cmd->add_option("--config", tr.config, "Experiment config (JSON)");
  train_cmd->add_option("--rules", tr.rules, "Rule file");
  train_cmd->add_option("--data", tr.data, "Dataset");
  train_cmd->add_option("--lambda", tr.lambda, "Domain loss weight");
  train_cmd->add_option("--epochs", tr.epochs, "Epochs");
  train_cmd->add_option("--warmup", tr.warmup, "Warmup epochs before relabeling");
  train_cmd->add_option("--tau", tr.tau, "Relabeling confidence threshold");
  train_cmd->add_option("--lr", tr.lr, "Learning rate");
  train_cmd->add_option("--batch", tr.batch, "Batch size");
  train_cmd->add_option("--hidden", tr.hidden, "Hidden units");
  train_cmd->add_option("--seed", tr.seed, "Random seed");
  train_cmd->add_option("--mode", tr.mode, "off | mask_only | relabel")
      ->check(CLI::IsMember({"off", "mask_only", "relabel"}));
  train_cmd->add_option("--threshold", tr.threshold, "Evaluation threshold");
  train_cmd->add_option("--out-model", tr.out_model, "Checkpoint output");
  train_cmd->add_option("--out-history", tr.out_history, "History output (JSONL)");
  train_cmd->add_option("--out-report", tr.out_report, "Metrics report output");

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint");
  eval_cmd->add_option("--rules", ev.rules, "Rule file")->required();
  eval_cmd->add_option("--data", ev.data, "Dataset")->required();
  eval_cmd->add_option("--model", ev.model, "Checkpoint")->required();
  eval_cmd->add_option("--threshold", ev.threshold, "Evaluation threshold");
  eval_cmd->add_option("--out-report", ev.out_report, "Metrics report output");

  // CLI11 consumes a reversed argument list without the program name.
  std::vector<std::string> rev(args.empty() ? args.end() : args.begin() + 1,
                               args.end());
  std::reverse(rev.begin(), rev.end());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  try {
    if (synth_cmd->parsed()) return do_synth(synth, out, err);
    if (noise_cmd->parsed()) return do_noise(noise, out, err);
    if (audit_cmd->parsed()) return do_audit(aud, out, err);
    if (train_cmd->parsed()) return do_train(tr, out, err);
    if (eval_cmd->parsed()) return do_eval(ev, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const RuleError& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const DataError& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const std::logic_error& e) {
    // invalid_argument / domain_error: bad config or inconsistent inputs.
    err << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kUsage;
}

}  // namespace dost::cli
