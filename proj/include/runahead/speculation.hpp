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

#include <limits>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "runahead/graph.hpp"

namespace runahead {

struct SpeculationPlan {
  std::string verifying_node;
  std::vector<std::string> eligible;  // topological order
  double expected_cost = 0.0;
  double budget = 0.0;
  bool approved = false;
};

// Longest hop distance from `from` to each node; 0 for `from` itself and
// for nodes it does not reach.
std::vector<std::size_t> relative_depths(const WorkflowGraph& g, WorkflowGraph::NodeIndex from);

// Descendants j of `verifying` whose cumulative level latency
//   sum_{l=1..d(j)} max_{k : d(k) = l} exec_latency[k]
// fits in the verifier's window (<=), where d is the relative depth.
// `exec_latency` is indexed by node.
std::vector<WorkflowGraph::NodeIndex> eligible_spec_set(const WorkflowGraph& g,
                                                        WorkflowGraph::NodeIndex verifying,
                                                        std::span<const double> exec_latency,
                                                        double verifier_latency);

// (1 - m) * sum of per-node (execution + verification) costs.
double expected_spec_cost(double match_rate, std::span<const double> node_costs);

// A plan is approved iff the budget is positive and covers the expected
// cost; a zero budget disables speculation.
bool approve(double expected_cost, double budget);

enum class RollbackDecision { kKeep, kRollback };

struct RollbackThresholds {
  std::map<TaskCategory, double> by_category = {{TaskCategory::kInstruction, 0.7},
                                                {TaskCategory::kTool, 0.7}};
  double fallback = 0.7;
  // Roll back on every revision regardless of similarity.
  bool conservative = false;

  double threshold(TaskCategory c) const;
};

// Code and math always roll back; instruction and tool keep speculative
// work iff ROUGE-L F1(original, revised) >= threshold.
RollbackDecision decide_rollback(TaskCategory category, std::string_view original,
                                 std::string_view revised, const RollbackThresholds& thresholds);

}  // namespace runahead
