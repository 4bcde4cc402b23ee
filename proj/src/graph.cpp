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

#include "runahead/graph.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <queue>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "runahead/error.hpp"

namespace runahead {

using json = nlohmann::json;

std::string_view category_name(TaskCategory category) {
  switch (category) {
    case TaskCategory::kInstruction: return "instruction";
    case TaskCategory::kCode: return "code";
    case TaskCategory::kMath: return "math";
    case TaskCategory::kTool: return "tool";
  }
  return "instruction";
}

TaskCategory parse_category(std::string_view name) {
  for (TaskCategory c : kAllCategories) {
    if (category_name(c) == name) return c;
  }
  throw Error(ErrorCode::kMalformedDocument,
              "unknown task category '" + std::string(name) + "'");
}

WorkflowGraph WorkflowGraph::create(std::vector<WorkflowNode> nodes,
                                    std::vector<Edge> edges) {
  if (nodes.empty()) {
    throw Error(ErrorCode::kMalformedDocument, "workflow has no nodes");
  }
  WorkflowGraph g;
  std::unordered_map<std::string, NodeIndex> ids;
  for (NodeIndex i = 0; i < nodes.size(); ++i) {
    const auto& n = nodes[i];
    if (n.id.empty()) {
      throw Error(ErrorCode::kMalformedDocument, "node with empty id");
    }
    if (n.objective.empty()) {
      throw Error(ErrorCode::kMalformedDocument,
                  "node '" + n.id + "' has an empty objective");
    }
    if (!ids.emplace(n.id, i).second) {
      throw Error(ErrorCode::kMalformedDocument, "duplicate node id '" + n.id + "'");
    }
  }

  const std::size_t n = nodes.size();
  g.parents_.resize(n);
  g.children_.resize(n);
  std::unordered_set<std::size_t> seen_edges;
  for (const auto& e : edges) {
    auto p = ids.find(e.parent);
    auto c = ids.find(e.child);
    if (p == ids.end() || c == ids.end()) {
      throw Error(ErrorCode::kDanglingEdge,
                  "edge " + e.parent + " -> " + e.child + " names an unknown node");
    }
    if (p->second == c->second) {
      throw Error(ErrorCode::kCycleDetected, "self-edge on '" + e.parent + "'");
    }
    if (!seen_edges.insert(p->second * n + c->second).second) {
      throw Error(ErrorCode::kMalformedDocument,
                  "duplicate edge " + e.parent + " -> " + e.child);
    }
    g.parents_[c->second].push_back(p->second);
    g.children_[p->second].push_back(c->second);
  }

  // Kahn, smallest declaration index first.
  std::vector<std::size_t> indeg(n);
  for (NodeIndex i = 0; i < n; ++i) indeg[i] = g.parents_[i].size();
  std::priority_queue<NodeIndex, std::vector<NodeIndex>, std::greater<>> ready;
  for (NodeIndex i = 0; i < n; ++i) {
    if (indeg[i] == 0) ready.push(i);
  }
  while (!ready.empty()) {
    NodeIndex u = ready.top();
    ready.pop();
    g.topo_order_.push_back(u);
    for (NodeIndex v : g.children_[u]) {
      if (--indeg[v] == 0) ready.push(v);
    }
  }
  if (g.topo_order_.size() != n) {
    throw Error(ErrorCode::kCycleDetected, "workflow graph contains a cycle");
  }

  std::vector<NodeIndex> terminals;
  for (NodeIndex i = 0; i < n; ++i) {
    if (g.children_[i].empty()) terminals.push_back(i);
  }
  if (terminals.size() != 1) {
    std::string names;
    for (NodeIndex t : terminals) names += (names.empty() ? "" : ", ") + nodes[t].id;
    throw Error(ErrorCode::kMultipleTerminals,
                "expected exactly one terminal node, found: " + names);
  }
  g.terminal_ = terminals.front();

  g.topo_pos_.resize(n);
  for (std::size_t k = 0; k < n; ++k) g.topo_pos_[g.topo_order_[k]] = k;

  g.reach_.assign(n * n, 0);
  for (auto it = g.topo_order_.rbegin(); it != g.topo_order_.rend(); ++it) {
    NodeIndex u = *it;
    for (NodeIndex v : g.children_[u]) {
      g.reach_[u * n + v] = 1;
      for (NodeIndex w = 0; w < n; ++w) {
        if (g.reach_[v * n + w]) g.reach_[u * n + w] = 1;
      }
    }
  }

  g.nodes_ = std::move(nodes);
  g.edges_ = std::move(edges);
  return g;
}

std::optional<WorkflowGraph::NodeIndex> WorkflowGraph::find(std::string_view id) const {
  for (NodeIndex i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].id == id) return i;
  }
  return std::nullopt;
}

WorkflowGraph::NodeIndex WorkflowGraph::index_of(std::string_view id) const {
  if (auto i = find(id)) return *i;
  throw Error(ErrorCode::kInvalidArgument, "unknown node id '" + std::string(id) + "'");
}

std::vector<WorkflowGraph::NodeIndex> WorkflowGraph::initials() const {
  std::vector<NodeIndex> out;
  for (NodeIndex i = 0; i < nodes_.size(); ++i) {
    if (parents_[i].empty()) out.push_back(i);
  }
  return out;
}

std::vector<WorkflowGraph::NodeIndex> WorkflowGraph::descendants(NodeIndex i) const {
  std::vector<NodeIndex> out;
  for (NodeIndex v : topo_order_) {
    if (reaches(i, v)) out.push_back(v);
  }
  return out;
}

namespace {

template <typename T>
T required(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw Error(ErrorCode::kMalformedDocument, std::string("missing field '") + key + "'");
  }
  try {
    return it->get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedDocument,
                std::string("field '") + key + "' has the wrong type");
  }
}

}  // namespace

WorkflowGraph load_workflow(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kMalformedDocument, e.what());
  }
  if (!doc.is_object() || !doc.contains("nodes") || !doc["nodes"].is_array()) {
    throw Error(ErrorCode::kMalformedDocument, "expected an object with a 'nodes' array");
  }
  std::vector<WorkflowNode> nodes;
  for (const auto& jn : doc["nodes"]) {
    if (!jn.is_object()) {
      throw Error(ErrorCode::kMalformedDocument, "node entries must be objects");
    }
    WorkflowNode n;
    n.id = required<std::string>(jn, "id");
    n.objective = required<std::string>(jn, "objective");
    n.agent = required<std::string>(jn, "agent");
    n.category = parse_category(required<std::string>(jn, "category"));
    n.uses_tools = required<bool>(jn, "uses_tools");
    nodes.push_back(std::move(n));
  }
  std::vector<Edge> edges;
  if (doc.contains("edges")) {
    if (!doc["edges"].is_array()) {
      throw Error(ErrorCode::kMalformedDocument, "'edges' must be an array");
    }
    for (const auto& je : doc["edges"]) {
      if (!je.is_array() || je.size() != 2 || !je[0].is_string() || !je[1].is_string()) {
        throw Error(ErrorCode::kMalformedDocument, "edges must be [parent_id, child_id] pairs");
      }
      edges.push_back({je[0].get<std::string>(), je[1].get<std::string>()});
    }
  }
  return WorkflowGraph::create(std::move(nodes), std::move(edges));
}

WorkflowGraph load_workflow_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIo, "cannot open workflow file " + path.string());
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return load_workflow(ss.str());
}

std::string dump_workflow(const WorkflowGraph& graph) {
  json doc;
  doc["nodes"] = json::array();
  for (const auto& n : graph.nodes()) {
    doc["nodes"].push_back({{"id", n.id},
                            {"objective", n.objective},
                            {"agent", n.agent},
                            {"category", std::string(category_name(n.category))},
                            {"uses_tools", n.uses_tools}});
  }
  doc["edges"] = json::array();
  for (const auto& e : graph.edges()) doc["edges"].push_back({e.parent, e.child});
  return doc.dump(2);
}

TopoProfile topo_profile(const WorkflowGraph& graph) {
  TopoProfile profile;
  profile.nodes.resize(graph.size());
  for (std::size_t i = 0; i < graph.size(); ++i) {
    auto& p = profile.nodes[i];
    p.fan_in = graph.parents(i).size();
    p.fan_out = graph.children(i).size();
    p.initial = p.fan_in == 0;
    p.terminal = p.fan_out == 0;
  }
  for (auto u : graph.topo_order()) {
    for (auto v : graph.children(u)) {
      profile.nodes[v].depth = std::max(profile.nodes[v].depth, profile.nodes[u].depth + 1);
    }
  }
  return profile;
}

}  // namespace runahead
