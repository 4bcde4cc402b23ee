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

#include "runahead/error.hpp"

namespace runahead {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedDocument: return "MalformedDocument";
    case ErrorCode::kCycleDetected: return "CycleDetected";
    case ErrorCode::kMultipleTerminals: return "MultipleTerminals";
    case ErrorCode::kDanglingEdge: return "DanglingEdge";
    case ErrorCode::kProviderError: return "ProviderError";
    case ErrorCode::kScriptExhausted: return "ScriptExhausted";
    case ErrorCode::kMissingParentOutput: return "MissingParentOutput";
    case ErrorCode::kNoUpstreamContext: return "NoUpstreamContext";
    case ErrorCode::kMissingExecutor: return "MissingExecutor";
    case ErrorCode::kUnparseableVerdict: return "UnparseableVerdict";
    case ErrorCode::kUnknownRole: return "UnknownRole";
    case ErrorCode::kNonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::kIllegalTransition: return "IllegalTransition";
    case ErrorCode::kUnknownMetric: return "UnknownMetric";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

}  // namespace runahead
