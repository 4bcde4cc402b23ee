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

#include "runahead/placement.hpp"

#include <algorithm>

namespace runahead {

PlacementPlan place_verifiers(const WorkflowGraph& graph, const TopoProfile& profile,
                              std::size_t k) {
  using NodeIndex = WorkflowGraph::NodeIndex;
  std::vector<NodeIndex> initials, intermediates;
  for (NodeIndex i = 0; i < graph.size(); ++i) {
    if (profile[i].terminal) continue;
    (profile[i].initial ? initials : intermediates).push_back(i);
  }
  auto by_id = [&](NodeIndex a, NodeIndex b) { return graph.node(a).id < graph.node(b).id; };
  std::sort(initials.begin(), initials.end(), by_id);
  std::sort(intermediates.begin(), intermediates.end(), [&](NodeIndex a, NodeIndex b) {
    if (profile[a].fan_in != profile[b].fan_in) return profile[a].fan_in > profile[b].fan_in;
    return by_id(a, b);
  });

  std::vector<NodeIndex> order{graph.terminal()};
  order.insert(order.end(), initials.begin(), initials.end());
  order.insert(order.end(), intermediates.begin(), intermediates.end());

  PlacementPlan plan;
  plan.budget = k;
  for (std::size_t i = 0; i < std::min(k, order.size()); ++i) {
    plan.selected.push_back(graph.node(order[i]).id);
  }
  return plan;
}

}  // namespace runahead
