// Copyright 2026 The Runahead Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "runahead/calibration.hpp"
#include "runahead/error.hpp"
#include "runahead/fault_lab.hpp"
#include "runahead/io.hpp"
#include "runahead/scenario.hpp"
#include "runahead/selector.hpp"

namespace runahead::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct RunArgs {
  std::string scenario;
  std::string mode;
  std::string clock;
  std::string selection;
  std::string out_dir;
  std::optional<double> budget;
  std::optional<double> lambda;
  std::optional<std::size_t> k;
  std::optional<std::uint64_t> seed;
};

void apply(const RunArgs& a, Scenario& s) {
  if (!a.mode.empty()) s.run.mode = parse_mode(a.mode);
  if (!a.clock.empty()) s.run.clock = parse_clock(a.clock);
  if (!a.selection.empty()) s.selection = a.selection;
  if (!a.out_dir.empty()) s.output_dir = a.out_dir;
  if (a.budget) {
    if (!(*a.budget >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "budget must be >= 0");
    s.run.budget = *a.budget;
  }
  if (a.lambda) {
    if (!(*a.lambda >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "lambda must be >= 0");
    s.lambda = *a.lambda;
  }
  if (a.k) {
    s.placement_k = *a.k;
    s.placement_nodes.clear();
  }
  if (a.seed) s.seed = *a.seed;
}

void add_run_flags(CLI::App* cmd, RunArgs& a) {
  cmd->add_option("--mode", a.mode, "noverify | sequential | speculative");
  cmd->add_option("--clock", a.clock, "virtual | wall");
  cmd->add_option("--budget", a.budget, "speculation budget B (currency)");
  cmd->add_option("--lambda", a.lambda, "willingness to pay");
  cmd->add_option("--placement-k", a.k, "number of verifiers to place");
  cmd->add_option("--seed", a.seed, "seed for simulated components");
  cmd->add_option("--selection", a.selection, "learned | static:<kind> | tabular | oracle");
}

int cmd_run(const RunArgs& a, std::ostream& out) {
  Scenario s = load_scenario(a.scenario);
  apply(a, s);
  ScenarioRun run = run_scenario(s);
  fs::path dir = resolve(s, s.output_dir);
  fs::create_directories(dir);
  write_text_file(dir / "trace.jsonl", trace_jsonl(run.result));
  write_text_file(dir / "ledger.jsonl", ledger_jsonl(run.result.ledger));
  json summary = metrics_json(run.result.metrics);
  summary["mode"] = mode_name(s.run.mode);
  summary["placement"] = run.placement.selected;
  json assigned = json::object();
  for (std::size_t i = 0; i < run.assignment.size(); ++i) {
    if (run.assignment[i]) assigned[s.graph->node(i).id] = run.assignment[i]->name();
  }
  summary["verifiers"] = assigned;
  write_text_file(dir / "summary.json", summary.dump(2) + "\n");
  out << summary.dump(2) << "\n";
  return run.result.metrics.failed ? kExitRunFailed : kExitOk;
}

struct SweepArgs {
  std::string scenario;
  std::vector<double> lambdas;
  std::vector<double> budgets;
  std::vector<std::size_t> ks;
  std::vector<double> match_rates;
  std::vector<double> vrf_scales;
  std::string out;
};

int cmd_sweep(const SweepArgs& a, std::ostream& out) {
  Scenario base = load_scenario(a.scenario);
  base.run.clock = ClockKind::kVirtual;
  auto lambdas = a.lambdas.empty() ? std::vector<double>{base.lambda} : a.lambdas;
  auto budgets = a.budgets.empty() ? std::vector<double>{base.run.budget} : a.budgets;
  auto ks = a.ks;
  if (ks.empty()) {
    ks.push_back(base.placement_nodes.empty() ? base.placement_k.value_or(base.graph->size())
                                              : base.placement_nodes.size());
  }
  auto rates = a.match_rates.empty() ? std::vector<double>{base.run.default_match_rate}
                                     : a.match_rates;
  auto scales = a.vrf_scales.empty() ? std::vector<double>{1.0} : a.vrf_scales;
  std::string table =
      "lambda\tbudget\tk\tmatch_rate\tvrf_scale\tt_exec\tt_exec_seq\tt_vrf\ttotal_cost\t"
      "wasted_cost\trollbacks\tnspec\n";
  for (double lambda : lambdas) {
    for (double budget : budgets) {
      for (std::size_t k : ks) {
        for (double m : rates) {
          for (double scale : scales) {
            Scenario s = base;
            s.lambda = lambda;
            s.run.budget = budget;
            if (!a.ks.empty()) {
              s.placement_k = k;
              s.placement_nodes.clear();
            }
            Overrides o{m, scale};
            s.run.mode = RunMode::kSpeculative;
            ScenarioRun spec = run_scenario(s, o);
            s.run.mode = RunMode::kSequential;
            ScenarioRun seq = run_scenario(s, o);
            const auto& sm = spec.result.metrics;
            std::size_t nspec = static_nspec(s, spec.assignment, o);
            table += num(lambda) + "\t" + num(budget) + "\t" + std::to_string(k) + "\t" + num(m) +
                     "\t" + num(scale) + "\t" + num(sm.t_exec) + "\t" +
                     num(seq.result.metrics.t_exec) + "\t" + num(sm.t_vrf) + "\t" +
                     num(sm.total_cost.dollars()) + "\t" + num(sm.wasted_cost.dollars()) + "\t" +
                     std::to_string(sm.rollbacks) + "\t" + std::to_string(nspec) + "\n";
          }
        }
      }
    }
  }
  if (!a.out.empty()) write_text_file(a.out, table);
  out << table;
  return kExitOk;
}

struct FaultArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::string out;
};

int cmd_faults(const FaultArgs& a, std::ostream& out) {
  CampaignSetup c = load_campaign(a.config);
  if (a.seed) c.config.seed = *a.seed;
  if (a.trials) c.config.trials_per_node = *a.trials;
  auto corpus = load_payload_corpus(c.config.payload_corpus_path);
  auto executor = make_executor(c.executor, c.base_dir, "executor");
  std::unique_ptr<Executor> judge;
  Scorer scorer = exact_match_delta;
  if (!(c.scorer.is_string() && c.scorer.get<std::string>() == "exact")) {
    judge = make_executor(c.scorer, c.base_dir, "judge");
    scorer = llm_scorer(*judge);
  }
  CampaignReport report = run_campaign(*c.graph, c.config, corpus, *executor, scorer);
  std::string jsonl = campaign_jsonl(report);
  if (!a.out.empty()) write_text_file(a.out, jsonl);
  out << "node\ttrials\tvulnerability\n";
  for (const auto& [node, est] : report.nodes) {
    out << node << "\t" << est.trials << "\t" << num(est.estimate) << "\n";
  }
  return kExitOk;
}

std::vector<VerifierKind> parse_kinds(const std::vector<std::string>& names) {
  if (names.empty()) return default_verifier_set();
  std::vector<VerifierKind> kinds;
  for (const auto& n : names) kinds.push_back(VerifierKind::parse(n));
  return kinds;
}

struct TrainArgs {
  std::string data;
  std::string out;
  std::vector<std::string> verifiers;
  TrainOptions opt;
  std::size_t dim = 1024;
  std::size_t synthetic = 0;
};

int cmd_train(const TrainArgs& a, std::ostream& out) {
  auto kinds = parse_kinds(a.verifiers);
  if (a.synthetic > 0) {
    auto data = synthetic_dominated_dataset(a.synthetic, kinds.size(), a.opt.seed);
    write_text_file(a.out, dump_training_jsonl(data));
    out << "wrote " << data.size() << " synthetic samples to " << a.out << "\n";
    return kExitOk;
  }
  auto data = load_training_jsonl(a.data);
  if (data.empty()) throw Error(ErrorCode::kInvalidArgument, "training data is empty");
  SelectorPolicy policy(std::make_shared<HashedBowFeaturizer>(a.dim), kinds);
  auto losses = train_selector(policy, data, a.opt);
  for (std::size_t i = 0; i < losses.size(); ++i) {
    if (i % 50 == 0 || i + 1 == losses.size()) {
      out << "step " << i << "\tloss " << num(losses[i]) << "\n";
    }
  }
  save_policy(policy, a.out);
  out << "saved " << a.out << "\n";
  return kExitOk;
}

struct EvalArgs {
  std::string checkpoint;
  std::string data;
  std::string train;
  double lambda = 1.0;
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  SelectorPolicy policy = load_policy(a.checkpoint);
  auto data = load_training_jsonl(a.data);
  if (data.empty()) throw Error(ErrorCode::kInvalidArgument, "evaluation data is empty");
  const std::size_t n = policy.num_verifiers();
  std::optional<TabularSelector> table;
  if (!a.train.empty()) table = TabularSelector::fit(load_training_jsonl(a.train), a.lambda, n);

  struct Row {
    std::string name;
    double utility = 0.0, gain = 0.0, cost = 0.0;
    std::size_t hits = 0;
  };
  std::vector<Row> rows;
  rows.push_back({"learned"});
  if (table) rows.push_back({"tabular"});
  rows.push_back({"oracle"});
  for (const auto& k : policy.verifiers()) rows.push_back({"static:" + k.name()});
  for (const auto& s : data) {
    validate(s, n);
    std::size_t best = utility_argmax(s, a.lambda);
    std::vector<std::size_t> picks;
    picks.push_back(select_verifier(policy, s.prompt).index);
    if (table) picks.push_back(table->select(s.category.value_or(TaskCategory::kInstruction)));
    picks.push_back(s.correct.empty() ? best : oracle_select(s).index);
    for (std::size_t v = 0; v < n; ++v) picks.push_back(v);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      std::size_t p = picks[r];
      rows[r].utility += utility(s.perf_gain[p], s.cost[p], a.lambda);
      rows[r].gain += s.perf_gain[p];
      rows[r].cost += s.cost[p];
      rows[r].hits += p == best ? 1 : 0;
    }
  }
  double count = static_cast<double>(data.size());
  out << "strategy\tmean_utility\tmean_gain\tmean_cost\targmax_accuracy\n";
  for (const auto& r : rows) {
    out << r.name << "\t" << num(r.utility / count) << "\t" << num(r.gain / count) << "\t"
        << num(r.cost / count) << "\t" << num(static_cast<double>(r.hits) / count) << "\n";
  }
  return kExitOk;
}

struct CalibrateArgs {
  std::string data;
  std::string out;
};

int cmd_calibrate(const CalibrateArgs& a, std::ostream& out) {
  auto pairs = load_calibration_jsonl(a.data);
  if (pairs.empty()) throw Error(ErrorCode::kInvalidArgument, "calibration set is empty");
  CalibrationReport report = calibrate(pairs);
  out << report_table(report);
  if (!a.out.empty()) {
    json th = json::object();
    for (const auto& [cat, t] : report.thresholds) {
      if (cat == TaskCategory::kInstruction || cat == TaskCategory::kTool) {
        th[std::string(category_name(cat))] = t;
      }
    }
    write_text_file(a.out, json{{"thresholds", th}}.dump(2) + "\n");
  }
  return kExitOk;
}

bool is_config_error(ErrorCode c) {
  switch (c) {
    case ErrorCode::kMalformedDocument:
    case ErrorCode::kCycleDetected:
    case ErrorCode::kMultipleTerminals:
    case ErrorCode::kDanglingEdge:
    case ErrorCode::kUnknownRole:
    case ErrorCode::kUnknownMetric:
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kIo:
    case ErrorCode::kMissingExecutor:
      return true;
    default:
      return false;
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Speculative verification runtime for agent workflows", "runahead"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Execute a scenario and write trace, ledger and summary");
  run->add_option("scenario", run_args.scenario, "scenario config")->required();
  run->add_option("--out", run_args.out_dir, "output directory");
  add_run_flags(run, run_args);

  SweepArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "Grid over lambda x budget x k x match rate");
  sweep->add_option("scenario", sweep_args.scenario, "scenario config")->required();
  sweep->add_option("--lambda", sweep_args.lambdas)->delimiter(',');
  sweep->add_option("--budget", sweep_args.budgets)->delimiter(',');
  sweep->add_option("--placement-k", sweep_args.ks)->delimiter(',');
  sweep->add_option("--match-rate", sweep_args.match_rates)->delimiter(',');
  sweep->add_option("--vrf-scale", sweep_args.vrf_scales, "verifier latency multipliers")
      ->delimiter(',');
  sweep->add_option("--out", sweep_args.out, "also write the table here");

  FaultArgs fault_args;
  auto* faults = app.add_subcommand("faults", "Run a fault-injection campaign");
  faults->add_option("config", fault_args.config, "campaign config")->required();
  faults->add_option("--seed", fault_args.seed);
  faults->add_option("--trials", fault_args.trials, "trials per node");
  faults->add_option("--out", fault_args.out, "per-trial JSONL");

  TrainArgs train_args;
  auto* train = app.add_subcommand("train-selector", "Train the verifier selector");
  train->add_option("--data", train_args.data, "training JSONL");
  train->add_option("--out", train_args.out, "checkpoint (or dataset with --synthetic)")
      ->required();
  train->add_option("--verifiers", train_args.verifiers, "candidate verifiers")->delimiter(',');
  train->add_option("--lambda", train_args.opt.lambda);
  train->add_option("--steps", train_args.opt.steps);
  train->add_option("--step-size", train_args.opt.step_size);
  train->add_option("--batch-size", train_args.opt.batch_size);
  train->add_option("--seed", train_args.opt.seed);
  train->add_option("--dim", train_args.dim, "featurizer width");
  train->add_option("--synthetic", train_args.synthetic,
                    "write N synthetic dominated-verifier samples to --out instead");

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval-selector", "Compare selection strategies on held-out data");
  eval->add_option("--checkpoint", eval_args.checkpoint)->required();
  eval->add_option("--data", eval_args.data)->required();
  eval->add_option("--train", eval_args.train, "training JSONL for the tabular baseline");
  eval->add_option("--lambda", eval_args.lambda);

  CalibrateArgs cal_args;
  auto* cal = app.add_subcommand("calibrate-sim", "Calibrate similarity thresholds");
  cal->add_option("--data", cal_args.data, "calibration JSONL")->required();
  cal->add_option("--out", cal_args.out, "write thresholds JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (*run) return cmd_run(run_args, out);
    if (*sweep) return cmd_sweep(sweep_args, out);
    if (*faults) return cmd_faults(fault_args, out);
    if (*train) {
      if (train_args.synthetic == 0 && train_args.data.empty()) {
        throw Error(ErrorCode::kInvalidArgument, "--data is required");
      }
      return cmd_train(train_args, out);
    }
    if (*eval) return cmd_eval(eval_args, out);
    if (*cal) return cmd_calibrate(cal_args, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return is_config_error(e.code()) ? kExitConfig : kExitRunFailed;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace runahead::cli
