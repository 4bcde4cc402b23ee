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

#include <array>
#include <optional>
#include <string_view>

namespace runahead {

enum class NodeState { kWaiting, kRunning, kVerifying, kCompleted, kFailed };
enum class FsmInput { kRun, kVerify, kNoVerify, kSuccess, kFail, kRerun };

inline constexpr std::array<NodeState, 5> kAllNodeStates = {
    NodeState::kWaiting, NodeState::kRunning, NodeState::kVerifying, NodeState::kCompleted,
    NodeState::kFailed};
inline constexpr std::array<FsmInput, 6> kAllFsmInputs = {
    FsmInput::kRun,     FsmInput::kVerify, FsmInput::kNoVerify,
    FsmInput::kSuccess, FsmInput::kFail,   FsmInput::kRerun};

std::string_view state_name(NodeState s);
std::string_view input_name(FsmInput in);
std::optional<NodeState> parse_state(std::string_view name);
std::optional<FsmInput> parse_input(std::string_view name);

// The node lifecycle:
//   waiting  --run-->       running
//   running  --verify-->    verifying
//   running  --no-verify--> completed
//   verifying --success-->  completed
//   verifying --fail-->     failed
//   failed   --rerun-->     completed
// Every other pair throws kIllegalTransition.
NodeState transition(NodeState state, FsmInput input);
std::optional<NodeState> try_transition(NodeState state, FsmInput input);

}  // namespace runahead
