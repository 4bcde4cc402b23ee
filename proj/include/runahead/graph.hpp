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
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace runahead {

enum class TaskCategory { kInstruction, kCode, kMath, kTool };

inline constexpr TaskCategory kAllCategories[] = {
    TaskCategory::kInstruction, TaskCategory::kCode, TaskCategory::kMath,
    TaskCategory::kTool};

// Lowercase wire names: "instruction", "code", "math", "tool".
std::string_view category_name(TaskCategory category);
TaskCategory parse_category(std::string_view name);

struct WorkflowNode {
  std::string id;
  std::string objective;
  std::string agent;
  TaskCategory category = TaskCategory::kInstruction;
  bool uses_tools = false;
};

struct Edge {
  std::string parent;
  std::string child;
};

// Immutable, validated DAG. Nodes are addressed by their position in the
// document (NodeIndex); ids are unique. Parent lists follow the order in
// which edges were declared.
class WorkflowGraph {
 public:
  using NodeIndex = std::size_t;

  // Validates and builds. Throws Error with kMalformedDocument,
  // kDanglingEdge, kCycleDetected or kMultipleTerminals.
  static WorkflowGraph create(std::vector<WorkflowNode> nodes,
                              std::vector<Edge> edges);

  std::size_t size() const { return nodes_.size(); }
  const std::vector<WorkflowNode>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }

  const WorkflowNode& node(NodeIndex i) const { return nodes_.at(i); }
  std::optional<NodeIndex> find(std::string_view id) const;
  // Throws kInvalidArgument for unknown ids.
  NodeIndex index_of(std::string_view id) const;

  const std::vector<NodeIndex>& parents(NodeIndex i) const {
    return parents_.at(i);
  }
  const std::vector<NodeIndex>& children(NodeIndex i) const {
    return children_.at(i);
  }

  // Kahn order, ties broken by declaration position.
  const std::vector<NodeIndex>& topo_order() const { return topo_order_; }
  std::size_t topo_position(NodeIndex i) const { return topo_pos_.at(i); }

  NodeIndex terminal() const { return terminal_; }
  std::vector<NodeIndex> initials() const;

  // Strict descendants of i, in topological order.
  std::vector<NodeIndex> descendants(NodeIndex i) const;
  // True iff there is a non-empty path from a to b.
  bool reaches(NodeIndex a, NodeIndex b) const {
    return reach_[a * nodes_.size() + b] != 0;
  }

 private:
  WorkflowGraph() = default;

  std::vector<WorkflowNode> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::vector<NodeIndex>> parents_;
  std::vector<std::vector<NodeIndex>> children_;
  std::vector<NodeIndex> topo_order_;
  std::vector<std::size_t> topo_pos_;
  std::vector<char> reach_;
  NodeIndex terminal_ = 0;
};

// Parses the normalized planner document:
//   {"nodes": [{"id", "objective", "agent", "category", "uses_tools"}...],
//    "edges": [[parent, child]...]}
WorkflowGraph load_workflow(std::string_view document);
WorkflowGraph load_workflow_file(const std::filesystem::path& path);
std::string dump_workflow(const WorkflowGraph& graph);

enum class NodeRole { kInitial, kIntermediate, kTerminal };

struct NodeProfile {
  std::size_t fan_in = 0;
  std::size_t fan_out = 0;
  // Longest hop distance from any initial node.
  std::size_t depth = 0;
  bool initial = false;
  bool terminal = false;

  bool intermediate() const { return !initial && !terminal; }
  // A single-node graph is both initial and terminal; terminal wins.
  NodeRole role() const {
    if (terminal) return NodeRole::kTerminal;
    if (initial) return NodeRole::kInitial;
    return NodeRole::kIntermediate;
  }
};

struct TopoProfile {
  std::vector<NodeProfile> nodes;

  const NodeProfile& operator[](std::size_t i) const { return nodes.at(i); }
  std::size_t size() const { return nodes.size(); }
};

TopoProfile topo_profile(const WorkflowGraph& graph);

}  // namespace runahead
