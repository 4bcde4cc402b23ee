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

#include "runahead/fault_lab.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "json.hpp"
#include "runahead/error.hpp"
#include "runahead/prompts.hpp"
#include "runahead/verifiers.hpp"

namespace runahead {

using json = nlohmann::json;

std::string_view fault_class_name(FaultClass cls) {
  switch (cls) {
    case FaultClass::kPromptReplacement: return "prompt-replacement";
    case FaultClass::kContextDrop: return "context-drop";
    case FaultClass::kOutputReplacement: return "output-replacement";
  }
  return "";
}

void validate(const FaultDistribution& d) {
  if (!(d.prompt_replacement > 0 && d.context_drop > 0 && d.output_replacement > 0)) {
    throw Error(ErrorCode::kInvalidArgument, "fault weights must be positive");
  }
  const double sum = d.prompt_replacement + d.context_drop + d.output_replacement;
  if (std::abs(sum - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidArgument, "fault weights must sum to 1");
  }
}

FaultClass fault_class_at(double u, const FaultDistribution& d) {
  if (u < d.prompt_replacement) return FaultClass::kPromptReplacement;
  if (u < d.prompt_replacement + d.context_drop) return FaultClass::kContextDrop;
  return FaultClass::kOutputReplacement;
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

FaultClass sample_fault(std::mt19937_64& rng, const FaultDistribution& dist) {
  return fault_class_at(uniform01(rng), dist);
}

void validate(const FaultSpec& spec) {
  if (spec.target.empty()) throw Error(ErrorCode::kInvalidArgument, "fault without target");
  if (spec.cls == FaultClass::kContextDrop) {
    if (!(spec.drop_fraction >= 0.0 && spec.drop_fraction <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "drop fraction must be in [0, 1]");
    }
  } else if (spec.payload.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "replacement payload must be non-empty");
  }
}

namespace {

std::string execute_node(Executor& executor, const std::string& id, std::string prompt,
                         const Sampling& sampling) {
  ExecRequest req{id, std::move(prompt), sampling};
  validate(req);
  return executor.execute(req).output;
}

}  // namespace

PipelineTrace run_pipeline(const WorkflowGraph& graph, Executor& executor,
                           const Sampling& sampling) {
  PipelineTrace trace;
  for (auto i : graph.topo_order()) {
    const auto& node = graph.node(i);
    const auto upstream = gather_upstream(graph, i, trace.outputs);
    std::string prompt = build_prompt(node, upstream);
    trace.outputs[node.id] = execute_node(executor, node.id, prompt, sampling);
    trace.prompts[node.id] = std::move(prompt);
  }
  trace.final_output = trace.outputs.at(graph.node(graph.terminal()).id);
  return trace;
}

std::vector<UpstreamOutput> drop_context(std::vector<UpstreamOutput> upstream, double fraction) {
  const auto n = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(upstream.size())));
  upstream.erase(upstream.begin(), upstream.begin() + static_cast<std::ptrdiff_t>(n));
  return upstream;
}

InjectedNode inject_fault(const WorkflowGraph& graph, const PipelineTrace& baseline,
                          const FaultSpec& spec) {
  validate(spec);
  const auto i = graph.index_of(spec.target);
  WorkflowNode node = graph.node(i);
  switch (spec.cls) {
    case FaultClass::kPromptReplacement: {
      node.objective = spec.payload;
      const auto upstream = gather_upstream(graph, i, baseline.outputs);
      return {build_prompt(node, upstream), std::nullopt};
    }
    case FaultClass::kContextDrop: {
      if (graph.parents(i).empty()) {
        throw Error(ErrorCode::kNoUpstreamContext,
                    "cannot drop context of initial node '" + spec.target + "'");
      }
      const auto upstream = drop_context(gather_upstream(graph, i, baseline.outputs),
                                         spec.drop_fraction);
      return {build_prompt(node, upstream), std::nullopt};
    }
    case FaultClass::kOutputReplacement:
      return {std::nullopt, spec.payload};
  }
  return {};
}

PipelineTrace run_with_fault(const WorkflowGraph& graph, Executor& executor,
                             const PipelineTrace& baseline, const FaultSpec& spec,
                             const Sampling& sampling) {
  const auto target = graph.index_of(spec.target);
  const InjectedNode injected = inject_fault(graph, baseline, spec);

  PipelineTrace trace = baseline;
  const auto& tid = graph.node(target).id;
  if (injected.output) {
    trace.outputs[tid] = *injected.output;
  } else {
    trace.prompts[tid] = *injected.prompt;
    trace.outputs[tid] = execute_node(executor, tid, *injected.prompt, sampling);
  }
  for (auto i : graph.descendants(target)) {
    const auto& node = graph.node(i);
    const auto upstream = gather_upstream(graph, i, trace.outputs);
    std::string prompt = build_prompt(node, upstream);
    trace.outputs[node.id] = execute_node(executor, node.id, prompt, sampling);
    trace.prompts[node.id] = std::move(prompt);
  }
  trace.final_output = trace.outputs.at(graph.node(graph.terminal()).id);
  return trace;
}

double exact_match_delta(const std::string& baseline, const std::string& faulted) {
  return baseline == faulted ? 0.0 : 1.0;
}

Scorer llm_scorer(Executor& judge) {
  return [&judge](const std::string& baseline, const std::string& faulted) {
    ExecRequest req{"scorer",
                    render_prompt(prompt_template(PromptTemplate::kScorer),
                                  {{"GROUND_TRUTH", baseline}, {"PREDICTION", faulted}})};
    for (int attempt = 0; attempt < 2; ++attempt) {
      try {
        const Verdict v = parse_verdict(judge.execute(req).output);
        if (v == Verdict::kCorrect) return 0.0;
        if (v == Verdict::kIncorrect) return 1.0;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kUnparseableVerdict) throw;
      }
    }
    throw Error(ErrorCode::kUnparseableVerdict, "scorer gave no [[Correct]]/[[Incorrect]] verdict");
  };
}

VulnerabilityEstimate estimate_vulnerability(const WorkflowGraph& graph, const std::string& node,
                                             std::span<const FaultSpec> faults,
                                             const Scorer& scorer, Executor& executor,
                                             const PipelineTrace& baseline,
                                             const Sampling& sampling) {
  VulnerabilityEstimate est;
  double sum = 0.0;
  for (FaultSpec spec : faults) {
    spec.target = node;
    const auto faulted = run_with_fault(graph, executor, baseline, spec, sampling);
    const double delta = std::clamp(scorer(baseline.final_output, faulted.final_output), 0.0, 1.0);
    est.deltas.push_back(delta);
    sum += delta;
  }
  est.trials = est.deltas.size();
  est.estimate = est.trials == 0 ? 0.0 : sum / static_cast<double>(est.trials);
  return est;
}

std::vector<std::string> load_payload_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open payload corpus " + path.string());
  std::vector<std::string> corpus;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    corpus.push_back(line);
  }
  if (corpus.empty()) throw Error(ErrorCode::kInvalidArgument, "payload corpus is empty");
  return corpus;
}

CampaignReport run_campaign(const WorkflowGraph& graph, const CampaignConfig& config,
                            std::span<const std::string> corpus, Executor& executor,
                            const Scorer& scorer, const Sampling& sampling) {
  validate(config.distribution);
  if (corpus.empty()) throw Error(ErrorCode::kInvalidArgument, "payload corpus is empty");
  if (config.drop_fractions.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "need at least one drop fraction");
  }
  std::vector<std::string> targets = config.targets;
  if (targets.empty()) {
    for (const auto& n : graph.nodes()) targets.push_back(n.id);
  }

  const PipelineTrace baseline = run_pipeline(graph, executor, sampling);
  CampaignReport report;
  std::size_t trial = 0;
  for (const auto& target : targets) {
    const bool initial = graph.parents(graph.index_of(target)).empty();
    std::vector<FaultSpec> faults;
    for (int t = 0; t < config.trials_per_node; ++t, ++trial) {
      std::mt19937_64 rng(config.seed + trial);
      FaultSpec spec;
      spec.target = target;
      spec.cls = sample_fault(rng, config.distribution);
      while (initial && spec.cls == FaultClass::kContextDrop) {
        spec.cls = sample_fault(rng, config.distribution);
      }
      if (spec.cls == FaultClass::kContextDrop) {
        spec.drop_fraction = config.drop_fractions[rng() % config.drop_fractions.size()];
      } else {
        spec.payload = corpus[rng() % corpus.size()];
      }
      faults.push_back(spec);
    }
    auto est = estimate_vulnerability(graph, target, faults, scorer, executor, baseline, sampling);
    for (std::size_t k = 0; k < faults.size(); ++k) {
      report.trials.push_back({trial - faults.size() + k, target, faults[k].cls, est.deltas[k]});
    }
    report.nodes.emplace_back(target, std::move(est));
  }
  return report;
}

std::string campaign_jsonl(const CampaignReport& report) {
  std::string out;
  for (const auto& t : report.trials) {
    json rec = {{"trial", t.trial},
                {"node", t.node},
                {"class", std::string(fault_class_name(t.cls))},
                {"delta", t.delta}};
    out += rec.dump() + "\n";
  }
  json nodes = json::array();
  for (const auto& [node, est] : report.nodes) {
    nodes.push_back({{"node", node}, {"estimate", est.estimate}, {"trials", est.trials}});
  }
  out += json{{"summary", {{"nodes", nodes}, {"trials", report.trials.size()}}}}.dump() + "\n";
  return out;
}

}  // namespace runahead
