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

#include <cstddef>
#include <string>
#include <vector>

#include "runahead/graph.hpp"

namespace runahead {

struct PlacementPlan {
  std::vector<std::string> selected;  // priority order
  std::size_t budget = 0;
};

// Priority order: the terminal node, then initial nodes by id, then
// intermediates by fan-in descending (ties by id). Returns the first
// min(k, |V|) entries.
PlacementPlan place_verifiers(const WorkflowGraph& graph, const TopoProfile& profile,
                              std::size_t k);

}  // namespace runahead
