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
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "runahead/executor.hpp"
#include "runahead/graph.hpp"

namespace runahead {

enum class FaultClass { kPromptReplacement, kContextDrop, kOutputReplacement };

std::string_view fault_class_name(FaultClass cls);

// Observed failure-mode frequencies of multi-agent traces, mapped onto the
// three injectable classes.
struct FaultDistribution {
  double prompt_replacement = 0.2863;
  double context_drop = 0.1868;
  double output_replacement = 0.5269;
};

// Weights positive and summing to 1 within 1e-9.
void validate(const FaultDistribution& dist);

// Inverse CDF with the fixed order (PromptReplacement, ContextDrop,
// OutputReplacement); u in [0, 1).
FaultClass fault_class_at(double u, const FaultDistribution& dist);

// 53-bit uniform in [0, 1); identical across standard libraries.
double uniform01(std::mt19937_64& rng);

FaultClass sample_fault(std::mt19937_64& rng, const FaultDistribution& dist);

struct FaultSpec {
  FaultClass cls = FaultClass::kOutputReplacement;
  std::string target;
  std::string payload;         // replacement text (prompt/output classes)
  double drop_fraction = 1.0;  // kContextDrop only, in [0, 1]
};

void validate(const FaultSpec& spec);

// Per-node prompts/outputs of one topological run at fixed sampling.
struct PipelineTrace {
  std::map<std::string, std::string, std::less<>> prompts;
  std::map<std::string, std::string, std::less<>> outputs;
  std::string final_output;
};

PipelineTrace run_pipeline(const WorkflowGraph& graph, Executor& executor,
                           const Sampling& sampling = {});

// Removes floor(fraction * n) entries, earliest first.
std::vector<UpstreamOutput> drop_context(std::vector<UpstreamOutput> upstream, double fraction);

struct InjectedNode {
  std::optional<std::string> prompt;  // replaces the node's prompt
  std::optional<std::string> output;  // replaces the node's output (no call)
};

// Modified inputs/output of the target node given a baseline run. Throws
// kNoUpstreamContext for a context drop on an initial node.
InjectedNode inject_fault(const WorkflowGraph& graph, const PipelineTrace& baseline,
                          const FaultSpec& spec);

// Re-runs the target (unless its output is replaced) and every descendant;
// all other nodes keep their baseline outputs.
PipelineTrace run_with_fault(const WorkflowGraph& graph, Executor& executor,
                             const PipelineTrace& baseline, const FaultSpec& spec,
                             const Sampling& sampling = {});

// Maps (baseline final output, faulted final output) to a deviation in [0, 1].
using Scorer = std::function<double(const std::string& baseline, const std::string& faulted)>;

double exact_match_delta(const std::string& baseline, const std::string& faulted);
// Asks `judge` with the scorer prompt; [[Correct]] -> 0, [[Incorrect]] -> 1.
Scorer llm_scorer(Executor& judge);

struct VulnerabilityEstimate {
  double estimate = 0.0;  // mean deviation
  std::size_t trials = 0;
  std::vector<double> deltas;
};

VulnerabilityEstimate estimate_vulnerability(const WorkflowGraph& graph, const std::string& node,
                                             std::span<const FaultSpec> faults,
                                             const Scorer& scorer, Executor& executor,
                                             const PipelineTrace& baseline,
                                             const Sampling& sampling = {});

// One payload per line; blank lines and lines starting with '#' are skipped.
std::vector<std::string> load_payload_corpus(const std::filesystem::path& path);

struct CampaignConfig {
  std::filesystem::path graph_path;
  std::vector<std::string> targets;  // empty: every node
  int trials_per_node = 10;
  std::uint64_t seed = 0;
  std::filesystem::path payload_corpus_path;
  FaultDistribution distribution;
  std::vector<double> drop_fractions = {1.0, 0.5};
};

struct TrialRecord {
  std::size_t trial = 0;
  std::string node;
  FaultClass cls = FaultClass::kOutputReplacement;
  double delta = 0.0;
};

struct CampaignReport {
  std::vector<TrialRecord> trials;
  std::vector<std::pair<std::string, VulnerabilityEstimate>> nodes;
};

// Trial t (numbered across all targets) draws from its own stream seeded
// with seed + t. Context drops drawn for an initial node are redrawn among
// the other two classes.
CampaignReport run_campaign(const WorkflowGraph& graph, const CampaignConfig& config,
                            std::span<const std::string> corpus, Executor& executor,
                            const Scorer& scorer, const Sampling& sampling = {});

// JSONL: one {"node","class","delta","trial"} record per trial, then
// {"summary": {...}}.
std::string campaign_jsonl(const CampaignReport& report);

}  // namespace runahead
