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

#include "runahead/speculation.hpp"

#include <algorithm>

#include "runahead/error.hpp"
#include "runahead/similarity.hpp"

namespace runahead {

std::vector<std::size_t> relative_depths(const WorkflowGraph& g, WorkflowGraph::NodeIndex from) {
  std::vector<std::size_t> depth(g.size(), 0);
  for (auto v : g.topo_order()) {
    if (v != from && !g.reaches(from, v)) continue;
    for (auto c : g.children(v)) depth[c] = std::max(depth[c], depth[v] + 1);
  }
  return depth;
}

std::vector<WorkflowGraph::NodeIndex> eligible_spec_set(const WorkflowGraph& g,
                                                        WorkflowGraph::NodeIndex verifying,
                                                        std::span<const double> exec_latency,
                                                        double verifier_latency) {
  if (exec_latency.size() != g.size()) {
    throw Error(ErrorCode::kInvalidArgument, "exec latency table does not match graph size");
  }
  auto desc = g.descendants(verifying);
  auto depth = relative_depths(g, verifying);
  std::size_t max_depth = 0;
  for (auto d : desc) max_depth = std::max(max_depth, depth[d]);
  std::vector<double> level_max(max_depth + 1, 0.0);
  for (auto d : desc) level_max[depth[d]] = std::max(level_max[depth[d]], exec_latency[d]);
  std::vector<double> cumulative(max_depth + 1, 0.0);
  for (std::size_t l = 1; l <= max_depth; ++l) cumulative[l] = cumulative[l - 1] + level_max[l];
  std::vector<WorkflowGraph::NodeIndex> out;
  for (auto d : desc) {
    if (cumulative[depth[d]] <= verifier_latency) out.push_back(d);
  }
  return out;
}

double expected_spec_cost(double match_rate, std::span<const double> node_costs) {
  if (!(match_rate >= 0.0 && match_rate <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "match rate must be in [0, 1]");
  }
  double sum = 0.0;
  for (double c : node_costs) sum += c;
  return (1.0 - match_rate) * sum;
}

bool approve(double expected_cost, double budget) {
  return budget > 0.0 && expected_cost <= budget;
}

double RollbackThresholds::threshold(TaskCategory c) const {
  auto it = by_category.find(c);
  return it == by_category.end() ? fallback : it->second;
}

RollbackDecision decide_rollback(TaskCategory category, std::string_view original,
                                 std::string_view revised, const RollbackThresholds& thresholds) {
  if (thresholds.conservative) return RollbackDecision::kRollback;
  if (category == TaskCategory::kCode || category == TaskCategory::kMath) {
    return RollbackDecision::kRollback;
  }
  return rouge_l(original, revised) >= thresholds.threshold(category) ? RollbackDecision::kKeep
                                                                      : RollbackDecision::kRollback;
}

}  // namespace runahead
