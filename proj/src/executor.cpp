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

#include "runahead/executor.hpp"

#include "runahead/error.hpp"

namespace runahead {

void validate(const ExecRequest& req) {
  if (req.prompt.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty prompt for " + req.node_id);
  }
  if (!(req.sampling.temperature >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "temperature must be >= 0");
  }
  if (!(req.sampling.top_p > 0.0 && req.sampling.top_p <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "top_p must be in (0, 1]");
  }
}

ScriptedExecutor::ScriptedExecutor(std::string provider, Script script)
    : provider_(std::move(provider)), script_(std::move(script)) {}

void ScriptedExecutor::append(const std::string& key, ExecResult result) {
  std::lock_guard lock(mu_);
  script_[key].push_back(std::move(result));
}

ExecResult ScriptedExecutor::execute(const ExecRequest& req) {
  validate(req);
  std::lock_guard lock(mu_);
  auto it = script_.find(req.node_id);
  std::size_t& index = next_[req.node_id];
  if (it == script_.end() || index >= it->second.size()) {
    throw Error(ErrorCode::kScriptExhausted,
                "no scripted entry for (" + req.node_id + ", " + std::to_string(index) + ")");
  }
  ExecResult r = it->second[index++];
  r.provider = provider_;
  return r;
}

std::optional<ExecResult> ScriptedExecutor::peek(std::string_view key) const {
  std::lock_guard lock(mu_);
  auto it = script_.find(key);
  if (it == script_.end()) return std::nullopt;
  auto n = next_.find(key);
  std::size_t index = n == next_.end() ? 0 : n->second;
  if (index >= it->second.size()) return std::nullopt;
  ExecResult r = it->second[index];
  r.provider = provider_;
  return r;
}

std::size_t ScriptedExecutor::calls(std::string_view key) const {
  std::lock_guard lock(mu_);
  auto n = next_.find(key);
  return n == next_.end() ? 0 : n->second;
}

void ScriptedExecutor::reset() {
  std::lock_guard lock(mu_);
  next_.clear();
}

ExecResult FunctionExecutor::execute(const ExecRequest& req) {
  ExecResult r = fn_(req);
  r.provider = provider_;
  return r;
}

std::string build_prompt(const WorkflowNode& node, std::span<const UpstreamOutput> upstream) {
  std::string prompt = node.objective;
  for (const auto& u : upstream) {
    prompt += "\n\nOutput of ";
    prompt += u.parent_id;
    prompt += ":\n";
    prompt += u.output;
  }
  return prompt;
}

std::vector<UpstreamOutput> gather_upstream(
    const WorkflowGraph& graph, WorkflowGraph::NodeIndex node,
    const std::map<std::string, std::string, std::less<>>& outputs) {
  std::vector<UpstreamOutput> upstream;
  for (auto p : graph.parents(node)) {
    const auto& pid = graph.node(p).id;
    auto it = outputs.find(pid);
    if (it == outputs.end()) {
      throw Error(ErrorCode::kMissingParentOutput,
                  "node '" + graph.node(node).id + "' is missing the output of '" + pid + "'");
    }
    upstream.push_back({pid, it->second});
  }
  return upstream;
}

}  // namespace runahead
