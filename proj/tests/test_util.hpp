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
#include <cstdio>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "runahead/executor.hpp"
#include "runahead/graph.hpp"

namespace runahead::testing {

inline std::string node_name(std::size_t i) {
  std::string s = std::to_string(i);
  return "n" + std::string(s.size() < 2 ? 2 - s.size() : 0, '0') + s;
}

// Random DAG on n nodes with a single terminal: forward edges i -> j (i < j)
// with probability p, then every other sink is wired to the last node.
// Node declaration order is shuffled so ids and positions disagree.
inline std::pair<std::vector<WorkflowNode>, std::vector<Edge>> random_dag_parts(
    std::mt19937_64& rng, std::size_t n, double p = 0.35) {
  std::bernoulli_distribution coin(p);
  std::vector<std::set<std::size_t>> children(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (coin(rng)) children[i].insert(j);
    }
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (children[i].empty()) children[i].insert(n - 1);
  }
  std::vector<WorkflowNode> nodes;
  for (std::size_t i = 0; i < n; ++i) {
    WorkflowNode node;
    node.id = node_name(i);
    node.objective = "objective of " + node.id;
    node.agent = "agent";
    node.category = kAllCategories[rng() % 4];
    nodes.push_back(node);
  }
  std::shuffle(nodes.begin(), nodes.end(), rng);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (auto j : children[i]) edges.push_back({node_name(i), node_name(j)});
  }
  std::shuffle(edges.begin(), edges.end(), rng);
  return {nodes, edges};
}

inline WorkflowGraph random_dag(std::mt19937_64& rng, std::size_t n, double p = 0.35) {
  auto [nodes, edges] = random_dag_parts(rng, n, p);
  return WorkflowGraph::create(std::move(nodes), std::move(edges));
}

inline WorkflowGraph chain(std::size_t n) {
  std::vector<WorkflowNode> nodes;
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    nodes.push_back({"node" + std::to_string(i + 1), "step " + std::to_string(i + 1), "agent",
                     TaskCategory::kInstruction, false});
    if (i > 0) edges.push_back({nodes[i - 1].id, nodes[i].id});
  }
  return WorkflowGraph::create(nodes, edges);
}

inline WorkflowGraph diamond() {
  return WorkflowGraph::create(
      {{"W1", "plan", "a", TaskCategory::kInstruction, false},
       {"W2", "left", "a", TaskCategory::kInstruction, false},
       {"W3", "right", "a", TaskCategory::kInstruction, false},
       {"W4", "join", "a", TaskCategory::kInstruction, false}},
      {{"W1", "W2"}, {"W1", "W3"}, {"W2", "W4"}, {"W3", "W4"}});
}

inline ExecResult result(std::string output, double latency = 0.0, std::int64_t prompt = 0,
                         std::int64_t out = 0) {
  ExecResult r;
  r.output = std::move(output);
  r.latency = latency;
  r.prompt_tokens = prompt;
  r.output_tokens = out;
  return r;
}

}  // namespace runahead::testing
