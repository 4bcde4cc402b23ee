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

#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "runahead/cost_model.hpp"
#include "runahead/executor.hpp"
#include "runahead/fsm.hpp"
#include "runahead/graph.hpp"
#include "runahead/speculation.hpp"
#include "runahead/verifiers.hpp"

namespace runahead {

enum class RunMode { kNoVerify, kSequential, kSpeculative };
enum class ClockKind { kVirtual, kWall };

std::string_view mode_name(RunMode m);
RunMode parse_mode(std::string_view name);
std::string_view clock_name(ClockKind c);
ClockKind parse_clock(std::string_view name);

// Verifies one node attempt. Implementations must be thread-safe in wall
// clock mode.
class NodeVerifier {
 public:
  virtual ~NodeVerifier() = default;
  virtual VerifierOutcome verify(const VerifierKind& kind, const VerifierInput& input,
                                 int attempt) = 0;
  // Latency of the next verification of `node`, when known in advance.
  virtual std::optional<double> peek_latency(const VerifierKind& /*kind*/,
                                             std::string_view /*node*/) const {
    return std::nullopt;
  }
};

// Runs the real verifier pipelines.
class PipelineVerifier : public NodeVerifier {
 public:
  explicit PipelineVerifier(VerifierExecutors executors) : executors_(executors) {}
  VerifierOutcome verify(const VerifierKind& kind, const VerifierInput& input,
                         int attempt) override;

 private:
  VerifierExecutors executors_;
};

// Replays scripted outcomes keyed "<node>@<kind>" or "<node>"; the n-th
// verification of a key gets entry n, the last entry repeats.
class ScriptedVerifier : public NodeVerifier {
 public:
  struct Entry {
    std::optional<std::string> revised_output;  // unset: keep the original
    double latency = 0.0;
    std::vector<ExecResult> calls;
  };
  using Script = std::map<std::string, std::vector<Entry>, std::less<>>;

  explicit ScriptedVerifier(Script script, double latency_scale = 1.0)
      : script_(std::move(script)), latency_scale_(latency_scale) {}
  VerifierOutcome verify(const VerifierKind& kind, const VerifierInput& input,
                         int attempt) override;
  std::optional<double> peek_latency(const VerifierKind& kind,
                                     std::string_view node) const override;

 private:
  const std::vector<Entry>* find(const VerifierKind& kind, std::string_view node,
                                 std::string* key) const;

  Script script_;
  double latency_scale_;
  std::map<std::string, std::size_t, std::less<>> next_;
  mutable std::mutex mu_;
};

// Keeps the original with probability match_rate(kind). A revision is a
// minor edit (appends " [revised]") with probability minor_revision_share,
// otherwise an unrelated rewrite. Draws are pure functions of
// (seed, node, output), so identical inputs always get identical decisions.
class SimulatedVerifier : public NodeVerifier {
 public:
  struct Config {
    std::uint64_t seed = 0;
    std::map<std::string, double, std::less<>> match_rate;  // by kind name
    double default_match_rate = 0.8;
    std::map<std::string, double, std::less<>> latency;  // by node id
    double default_latency = 2.0;
    double latency_scale = 1.0;
    std::int64_t tokens_per_call = 500;
    double minor_revision_share = 0.5;
  };

  explicit SimulatedVerifier(Config cfg) : cfg_(std::move(cfg)) {}
  VerifierOutcome verify(const VerifierKind& kind, const VerifierInput& input,
                         int attempt) override;

  std::optional<double> peek_latency(const VerifierKind& /*kind*/,
                                     std::string_view node) const override {
    return latency(node);
  }

  double match_rate(const VerifierKind& kind) const;
  double latency(std::string_view node) const;

 private:
  Config cfg_;
};

// Number of internal calls each pipeline makes.
int pipeline_call_count(const VerifierKind& kind);

// Deterministic stand-in for a model: the output is a hash of the prompt;
// latency and token counts come from per-node tables.
class SimulatedExecutor : public Executor {
 public:
  struct Config {
    std::map<std::string, double, std::less<>> latency;  // by node id
    double default_latency = 1.0;
    std::int64_t prompt_tokens = 200;
    std::int64_t output_tokens = 300;
  };

  explicit SimulatedExecutor(Config cfg) : cfg_(std::move(cfg)) {}
  ExecResult execute(const ExecRequest& req) override;
  std::optional<ExecResult> peek(std::string_view key) const override;

 private:
  Config cfg_;
};

struct NodeEstimate {
  double exec_latency = 1.0;
  double exec_cost = 0.0;      // dollars
  double verifier_latency = 0.0;
  double verifier_cost = 0.0;  // dollars
};

// Plan-time estimates. Called only from the scheduler thread.
class Estimator {
 public:
  virtual ~Estimator() = default;
  virtual NodeEstimate estimate(WorkflowGraph::NodeIndex node) const = 0;
  virtual void observe_exec(WorkflowGraph::NodeIndex, double /*latency*/, double /*cost*/) {}
  virtual void observe_verifier(WorkflowGraph::NodeIndex, double /*latency*/, double /*cost*/) {}
};

// Per-node exponential moving average seeded with priors; alpha = 0 keeps
// the priors fixed.
class EmaEstimator : public Estimator {
 public:
  EmaEstimator(std::vector<NodeEstimate> priors, double alpha = 0.5);
  NodeEstimate estimate(WorkflowGraph::NodeIndex node) const override;
  void observe_exec(WorkflowGraph::NodeIndex node, double latency, double cost) override;
  void observe_verifier(WorkflowGraph::NodeIndex node, double latency, double cost) override;

 private:
  std::vector<NodeEstimate> est_;
  double alpha_;
};

// Reads the next execution result from executors that can peek (scripted,
// simulated) and falls back to the EMA otherwise.
class PeekEstimator : public EmaEstimator {
 public:
  PeekEstimator(const WorkflowGraph& g, const Executor& executor, const CostConfig& cost,
                std::vector<NodeEstimate> priors, double alpha = 0.5);
  NodeEstimate estimate(WorkflowGraph::NodeIndex node) const override;

 private:
  const WorkflowGraph& graph_;
  const Executor& executor_;
  const CostConfig& cost_;
};

struct RunOptions {
  RunMode mode = RunMode::kSpeculative;
  ClockKind clock = ClockKind::kVirtual;
  double budget = std::numeric_limits<double>::infinity();
  RollbackThresholds rollback;
  std::map<std::string, double, std::less<>> match_rate;  // by kind name
  double default_match_rate = 0.8;
  CostConfig cost;
  // Wall clock: sleep for each result's reported latency before posting it.
  bool emulate_latency = false;
};

struct RunInputs {
  const WorkflowGraph* graph = nullptr;
  Executor* executor = nullptr;
  NodeVerifier* verifier = nullptr;
  // Verifier kind per node index; nullopt means unverified.
  std::vector<std::optional<VerifierKind>> assignment;
  Estimator* estimator = nullptr;  // default: PeekEstimator over the executor
};

struct TraceEvent {
  double t = 0.0;
  std::string node;
  std::string event;  // state-transition | spec-start | commit | rollback
  nlohmann::json detail;
};

struct RollbackEvent {
  std::string failed_node;
  std::vector<std::string> invalidated;
  std::string corrected_output;
  double timestamp = 0.0;
};

struct RunMetrics {
  double t_exec = 0.0;
  double t_vrf = 0.0;
  std::size_t rollbacks = 0;
  Money wasted_cost;
  Money total_cost;
  Money verification_cost;
  std::string final_output;
  bool failed = false;
  std::string error;
};

struct RunResult {
  RunMetrics metrics;
  std::vector<TraceEvent> trace;
  std::vector<SpeculationPlan> plans;
  std::vector<RollbackEvent> rollback_events;
  CostLedger ledger;
  std::map<std::string, std::string> outputs;  // committed output per node
};

// Executes the workflow. Executor and verifier failures do not throw; they
// end dispatching and set metrics.failed.
RunResult run_workflow(const RunInputs& inputs, const RunOptions& options);

nlohmann::json metrics_json(const RunMetrics& m);
std::string trace_jsonl(const RunResult& result);
std::string ledger_jsonl(const CostLedger& ledger);

}  // namespace runahead
