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

#include "runahead/fsm.hpp"

#include <string>

#include "runahead/error.hpp"

namespace runahead {

std::string_view state_name(NodeState s) {
  switch (s) {
    case NodeState::kWaiting: return "waiting";
    case NodeState::kRunning: return "running";
    case NodeState::kVerifying: return "verifying";
    case NodeState::kCompleted: return "completed";
    case NodeState::kFailed: return "failed";
  }
  return "?";
}

std::string_view input_name(FsmInput in) {
  switch (in) {
    case FsmInput::kRun: return "run";
    case FsmInput::kVerify: return "verify";
    case FsmInput::kNoVerify: return "no-verify";
    case FsmInput::kSuccess: return "success";
    case FsmInput::kFail: return "fail";
    case FsmInput::kRerun: return "rerun";
  }
  return "?";
}

std::optional<NodeState> parse_state(std::string_view name) {
  for (auto s : kAllNodeStates) {
    if (state_name(s) == name) return s;
  }
  return std::nullopt;
}

std::optional<FsmInput> parse_input(std::string_view name) {
  for (auto in : kAllFsmInputs) {
    if (input_name(in) == name) return in;
  }
  return std::nullopt;
}

std::optional<NodeState> try_transition(NodeState state, FsmInput input) {
  using S = NodeState;
  using I = FsmInput;
  if (state == S::kWaiting && input == I::kRun) return S::kRunning;
  if (state == S::kRunning && input == I::kVerify) return S::kVerifying;
  if (state == S::kRunning && input == I::kNoVerify) return S::kCompleted;
  if (state == S::kVerifying && input == I::kSuccess) return S::kCompleted;
  if (state == S::kVerifying && input == I::kFail) return S::kFailed;
  if (state == S::kFailed && input == I::kRerun) return S::kCompleted;
  return std::nullopt;
}

NodeState transition(NodeState state, FsmInput input) {
  if (auto next = try_transition(state, input)) return *next;
  throw Error(ErrorCode::kIllegalTransition, "(" + std::string(state_name(state)) + ", " +
                                                 std::string(input_name(input)) + ")");
}

}  // namespace runahead
