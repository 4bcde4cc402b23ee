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
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "runahead/graph.hpp"

namespace runahead {

struct Sampling {
  double temperature = 0.0;
  double top_p = 1.0;
};

struct ExecRequest {
  // Script key for scripted executors. Verifier pipelines append a stage
  // suffix ("W1#feedback") so their calls never collide with node runs.
  std::string node_id;
  std::string prompt;
  Sampling sampling;
};

struct ExecResult {
  std::string output;
  std::int64_t prompt_tokens = 0;
  std::int64_t output_tokens = 0;
  double latency = 0.0;  // seconds
  // Role label of the deployment that served the call ("executor", "judge",
  // ...). The cost model prices calls by this label.
  std::string provider;

  std::int64_t total_tokens() const { return prompt_tokens + output_tokens; }
};

void validate(const ExecRequest& req);

// Executors are shared between concurrently running nodes and verifier
// pipelines; implementations must be thread-safe.
class Executor {
 public:
  virtual ~Executor() = default;
  virtual ExecResult execute(const ExecRequest& req) = 0;
  // Next result for `key` without consuming it, when the executor can know
  // it ahead of time. Used for plan-time latency estimates.
  virtual std::optional<ExecResult> peek(std::string_view /*key*/) const {
    return std::nullopt;
  }
};

// Replays scripted results keyed by (node_id, call_index).
class ScriptedExecutor : public Executor {
 public:
  using Script = std::map<std::string, std::vector<ExecResult>, std::less<>>;

  explicit ScriptedExecutor(std::string provider = "executor", Script script = {});

  void append(const std::string& key, ExecResult result);

  ExecResult execute(const ExecRequest& req) override;
  std::optional<ExecResult> peek(std::string_view key) const override;

  std::size_t calls(std::string_view key) const;
  void reset();

 private:
  std::string provider_;
  Script script_;
  std::map<std::string, std::size_t, std::less<>> next_;
  mutable std::mutex mu_;
};

// Deterministic executor backed by a callable; the provider label is
// stamped on every result.
class FunctionExecutor : public Executor {
 public:
  using Fn = std::function<ExecResult(const ExecRequest&)>;

  FunctionExecutor(std::string provider, Fn fn)
      : provider_(std::move(provider)), fn_(std::move(fn)) {}

  ExecResult execute(const ExecRequest& req) override;

 private:
  std::string provider_;
  Fn fn_;
};

struct UpstreamOutput {
  std::string parent_id;
  std::string output;
};

// Objective, then each upstream output as "\n\nOutput of <id>:\n<text>",
// in the order given.
std::string build_prompt(const WorkflowNode& node, std::span<const UpstreamOutput> upstream);

// Upstream outputs of `node` in the graph's stored edge order. Throws
// kMissingParentOutput when `outputs` lacks a parent.
std::vector<UpstreamOutput> gather_upstream(
    const WorkflowGraph& graph, WorkflowGraph::NodeIndex node,
    const std::map<std::string, std::string, std::less<>>& outputs);

}  // namespace runahead
